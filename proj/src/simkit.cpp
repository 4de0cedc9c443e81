#include "csflab/simkit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_set>

#include "csflab/errors.hpp"
#include "parallel.hpp"

namespace csflab::simkit {

namespace {

constexpr std::uint64_t kCodebookStream = 0x636f6465626f6f6bULL;
constexpr std::uint64_t kTrialStream = 0x747269616c73ULL;

int popcount(std::uint64_t x) { return std::popcount(x); }


double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Uniform weight-k subset of {0..n-1} (Floyd's algorithm).
std::uint64_t random_word(int n, int k, std::mt19937_64& rng) {
  std::uint64_t w = 0;
  for (int j = n - k; j < n; ++j) {
    std::uniform_int_distribution<int> pick(0, j);
    const int t = pick(rng);
    const std::uint64_t bit = 1ULL << t;
    w |= (w & bit) ? (1ULL << j) : bit;
  }
  return w;
}

std::uint64_t bernoulli_word(int n, double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uint64_t w = 0;
  for (int i = 0; i < n; ++i) {
    if (u(rng) < p) w |= 1ULL << i;
  }
  return w;
}

void check_length(int n, const char* who) {
  if (n < 1 || n > 63) {
    std::ostringstream os;
    os << who << ": n must lie in [1, 63], got " << n;
    throw DomainError(os.str());
  }
}

SimReport finish(const detail::RunningStats& d, const detail::RunningStats& f,
                 const detail::RunningStats& r, int n) {
  SimReport rep;
  rep.trials = d.count;
  rep.mean_distortion = d.mean;
  rep.stderr_distortion = d.stderr_mean();
  rep.mean_feedback_bits = f.mean;
  rep.stderr_feedback_bits = f.stderr_mean();
  rep.mean_forward_rate = r.mean;
  rep.stderr_forward_rate = r.stderr_mean();
  rep.feedback_rate = f.mean / static_cast<double>(n);
  return rep;
}

double forward_rate_of(const twostate::TwoStateParams& params, std::uint64_t state,
                       std::uint64_t word, int n) {
  const int hits = popcount(word & state);
  const int misfires = popcount(word & ~state);
  return (params.c1 * hits + params.c0 * misfires) / static_cast<double>(n);
}

}  // namespace

StateVector gen_states(const SourceModel& model, std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("gen_states: n must be >= 1");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  StateVector sv;
  sv.bits.resize(static_cast<std::size_t>(n));

  if (const auto* m = std::get_if<IidModel>(&model)) {
    if (!(m->q >= 0.0 && m->q <= 1.0)) throw DomainError("gen_states: q must lie in [0,1]");
    for (auto& b : sv.bits) b = u(rng) < m->q ? 1 : 0;
  } else if (const auto* m = std::get_if<MarkovModel>(&model)) {
    twostate::MarkovSource{m->delta01, m->delta10}.validate();
    const double q = m->delta01 / (m->delta01 + m->delta10);
    std::uint8_t s = u(rng) < q ? 1 : 0;
    for (auto& b : sv.bits) {
      b = s;
      const double flip = s ? m->delta10 : m->delta01;
      if (u(rng) < flip) s ^= 1;
    }
  } else if (const auto* m = std::get_if<RayleighIidModel>(&model)) {
    if (!(m->t >= 0.0)) throw DomainError("gen_states: t must be >= 0");
    std::exponential_distribution<double> expo(1.0);
    for (auto& b : sv.bits) b = expo(rng) >= m->t ? 1 : 0;
  } else if (const auto* m = std::get_if<RayleighAr1Model>(&model)) {
    if (!(m->alpha >= 0.0 && m->alpha < 1.0)) throw DomainError("gen_states: alpha in [0,1)");
    if (!(m->t >= 0.0)) throw DomainError("gen_states: t must be >= 0");
    // Unit-variance circularly symmetric complex Gaussian innovations.
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    const double innov = std::sqrt(1.0 - m->alpha * m->alpha);
    std::complex<double> h(g(rng), g(rng));
    for (auto& b : sv.bits) {
      b = std::norm(h) >= m->t ? 1 : 0;
      h = m->alpha * h + innov * std::complex<double>(g(rng), g(rng));
    }
  }
  for (auto b : sv.bits) sv.weight += b;
  return sv;
}

Codebook full_type_class(int n, int active) {
  check_length(n, "full_type_class");
  if (active < 0 || active > n) throw DomainError("full_type_class: active must lie in [0, n]");
  Codebook book{n, active, {}};
  if (active == 0) {
    book.words.push_back(0);
    return book;
  }
  // Gosper's hack walks the weight-`active` masks in increasing order.
  const std::uint64_t limit = 1ULL << n;
  for (std::uint64_t w = (1ULL << active) - 1ULL; w < limit;) {
    book.words.push_back(w);
    const std::uint64_t c = w & (~w + 1ULL);
    const std::uint64_t r = w + c;
    w = (((r ^ w) >> 2) / c) | r;
  }
  return book;
}

Codebook build_fixed_codebook(int n, int active, std::int64_t m_words, std::uint64_t seed,
                              bool dedup) {
  check_length(n, "build_fixed_codebook");
  if (active < 1 || active > n) throw DomainError("build_fixed_codebook: need 1 <= active <= n");
  if (m_words < 1) throw DomainError("build_fixed_codebook: m_words must be >= 1");
  const double class_size = std::exp(log_choose(n, active));
  if (static_cast<double>(m_words) > class_size + 0.5) {
    throw DomainError("build_fixed_codebook: m_words exceeds the size of the type class");
  }
  std::mt19937_64 rng = detail::partition_rng(seed ^ kCodebookStream, 0);
  Codebook book{n, active, {}};
  book.words.reserve(static_cast<std::size_t>(m_words));
  if (!dedup) {
    for (std::int64_t i = 0; i < m_words; ++i) book.words.push_back(random_word(n, active, rng));
    return book;
  }
  std::unordered_set<std::uint64_t> seen;
  while (static_cast<std::int64_t>(book.words.size()) < m_words) {
    const std::uint64_t w = random_word(n, active, rng);
    if (seen.insert(w).second) book.words.push_back(w);
  }
  return book;
}

std::size_t encode_fixed(const Codebook& book, std::uint64_t state) {
  std::size_t best = 0;
  int best_miss = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < book.words.size(); ++i) {
    const int miss = popcount(state & ~book.words[i]);
    if (miss < best_miss) {
      best_miss = miss;
      best = i;
      if (miss == 0) break;
    }
  }
  return best;
}

SimReport simulate_fixed(const twostate::TwoStateParams& params, int n, std::int64_t m_words,
                         std::int64_t trials, std::uint64_t seed, const SimOptions& opt) {
  params.validate();
  check_length(n, "simulate_fixed");
  if (m_words >= (1LL << 16) && n > 24) {
    throw PreconditionError("simulate_fixed: codebooks of 2^16 or more words need n <= 24");
  }
  const int active = std::clamp(static_cast<int>(std::lround(params.p * n)), 1, n);
  const Codebook book = build_fixed_codebook(n, active, m_words, seed);
  return simulate_fixed(params, book, trials, seed, opt);
}

SimReport simulate_fixed(const twostate::TwoStateParams& params, const Codebook& book,
                         std::int64_t trials, std::uint64_t seed, const SimOptions& opt) {
  params.validate();
  check_length(book.n, "simulate_fixed");
  if (book.words.empty()) throw DomainError("simulate_fixed: empty codebook");
  if (trials < 1000) throw PreconditionError("simulate_fixed: trials must be >= 1000");
  const double scans = static_cast<double>(trials) * static_cast<double>(book.words.size());
  if (scans > opt.scan_budget) {
    std::ostringstream os;
    os << "simulate_fixed: " << scans << " codeword comparisons exceed the budget of "
       << opt.scan_budget;
    throw BudgetError(os.str(), std::numeric_limits<double>::quiet_NaN());
  }
  const int n = book.n;
  const double feedback_bits = std::log2(static_cast<double>(book.words.size()));
  std::vector<detail::RunningStats> dist(detail::kPartitions);
  std::vector<detail::RunningStats> fb(detail::kPartitions);
  std::vector<detail::RunningStats> rate(detail::kPartitions);
  detail::for_each_partition(opt.jobs, [&](std::int64_t part) {
    std::mt19937_64 rng = detail::partition_rng(seed ^ kTrialStream, part);
    for (std::int64_t s = detail::partition_size(trials, part); s > 0; --s) {
      const std::uint64_t state = bernoulli_word(n, params.q, rng);
      const std::uint64_t word = book.words[encode_fixed(book, state)];
      dist[part].add(popcount(state & ~word) / static_cast<double>(n));
      fb[part].add(feedback_bits);
      rate[part].add(forward_rate_of(params, state, word, n));
    }
  });
  detail::RunningStats d, f, r;
  for (std::int64_t i = 0; i < detail::kPartitions; ++i) {
    d.merge(dist[i]);
    f.merge(fb[i]);
    r.merge(rate[i]);
  }
  return finish(d, f, r, n);
}

Composition target_composition(const twostate::TwoStateParams& params,
                               twostate::CrossoverPair eps, int n, int k) {
  if (k < 0 || k > n) throw DomainError("target_composition: k must lie in [0, n]");
  const int miss = std::clamp(static_cast<int>(std::lround(eps.eps0 * k)), 0, k);
  const int target_active = static_cast<int>(std::lround(params.p * n));
  const int misfire = std::clamp(target_active - (k - miss), 0, n - k);
  return {miss, misfire};
}

SimReport simulate_variable(const twostate::TwoStateParams& params, twostate::CrossoverPair eps,
                            int n, std::int64_t trials, std::uint64_t seed,
                            const SimOptions& opt) {
  params.validate();
  if (n < 1 || n > 20) throw PreconditionError("simulate_variable: n must lie in [1, 20]");
  if (trials < 1) throw DomainError("simulate_variable: trials must be >= 1");
  const double header = std::log2(static_cast<double>(n) + 1.0);
  const double part_budget = opt.scan_budget / static_cast<double>(detail::kPartitions);
  std::vector<detail::RunningStats> dist(detail::kPartitions);
  std::vector<detail::RunningStats> fb(detail::kPartitions);
  std::vector<detail::RunningStats> rate(detail::kPartitions);
  std::vector<char> over(detail::kPartitions, 0);
  detail::for_each_partition(opt.jobs, [&](std::int64_t part) {
    std::mt19937_64 rng = detail::partition_rng(seed ^ kTrialStream, part);
    double draws_used = 0.0;
    for (std::int64_t s = detail::partition_size(trials, part); s > 0; --s) {
      const std::uint64_t state = bernoulli_word(n, params.q, rng);
      const int k = popcount(state);
      const Composition c = target_composition(params, eps, n, k);
      // Encoder and decoder both regenerate the candidate stream from this seed.
      std::mt19937_64 candidates(rng());
      std::uint64_t word = 0;
      std::int64_t index = 0;
      for (;;) {
        ++index;
        word = bernoulli_word(n, params.p, candidates);
        if (popcount(state & ~word) == c.miss && popcount(word & ~state) == c.misfire) break;
        if (draws_used + static_cast<double>(index) > part_budget) {
          over[part] = 1;
          return;
        }
      }
      draws_used += static_cast<double>(index);
      dist[part].add(c.miss / static_cast<double>(n));
      fb[part].add(std::log2(static_cast<double>(index)) + header);
      rate[part].add(forward_rate_of(params, state, word, n));
    }
  });
  detail::RunningStats d, f, r;
  for (std::int64_t i = 0; i < detail::kPartitions; ++i) {
    d.merge(dist[i]);
    f.merge(fb[i]);
    r.merge(rate[i]);
  }
  if (std::any_of(over.begin(), over.end(), [](char c) { return c != 0; })) {
    std::ostringstream os;
    os << "simulate_variable: candidate draws exceed the budget of " << opt.scan_budget
       << " after " << d.count << " trials";
    throw BudgetError(os.str(), f.mean);
  }
  return finish(d, f, r, n);
}

double variable_rate_bound(const twostate::TwoStateParams& params, twostate::CrossoverPair eps,
                           int n) {
  params.validate();
  if (n < 1 || n > 1000) throw DomainError("variable_rate_bound: n must lie in [1, 1000]");
  const double p = params.p;
  const double q = params.q;
  double expected = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double log_pk = log_choose(n, k) + k * std::log(q) + (n - k) * std::log1p(-q);
    const Composition c = target_composition(params, eps, n, k);
    const int a = k - c.miss + c.misfire;
    double log_ql = log_choose(k, c.miss) + log_choose(n - k, c.misfire);
    if (a > 0) log_ql += a * std::log(p);
    if (n - a > 0) log_ql += (n - a) * std::log1p(-p);
    expected += std::exp(log_pk) * (-log_ql * mathkit::kLog2E);
  }
  return expected + mathkit::kLog2E + std::log2(n + 1.0) + 1.0;
}

double coverage_probability(int n, int k, int miss, int misfire) {
  if (k < 0 || k > n || miss < 0 || miss > k || misfire < 0 || misfire > n - k) {
    throw DomainError("coverage_probability: counts out of range");
  }
  const int active = k - miss + misfire;
  return std::exp(log_choose(k, miss) + log_choose(n - k, misfire) - log_choose(n, active));
}

long double expected_distortion(const Codebook& book, double q) {
  if (book.n < 1 || book.n > 24) throw DomainError("expected_distortion: n must lie in [1, 24]");
  if (book.words.empty()) throw DomainError("expected_distortion: empty codebook");
  const int n = book.n;
  const std::uint64_t states = 1ULL << n;
  long double total = 0.0L;
  for (std::uint64_t s = 0; s < states; ++s) {
    int best = n;
    for (std::uint64_t w : book.words) best = std::min(best, popcount(s & ~w));
    const int k = popcount(s);
    const long double prob = std::pow(static_cast<long double>(q), k) *
                             std::pow(1.0L - static_cast<long double>(q), n - k);
    total += prob * best;
  }
  return total / n;
}

OracleResult exhaustive_codebook_oracle(int n, int active, int m_words, double q,
                                        const OracleOptions& opt) {
  if (n < 1 || n > 16) throw DomainError("exhaustive_codebook_oracle: n must lie in [1, 16]");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("exhaustive_codebook_oracle: q in [0,1]");
  const Codebook klass = full_type_class(n, active);
  const int kwords = static_cast<int>(klass.words.size());
  if (m_words < 1 || m_words > kwords) {
    throw DomainError("exhaustive_codebook_oracle: m_words must lie in [1, C(n, active)]");
  }
  const std::uint64_t states = 1ULL << n;
  // miss[w * states + s]: missed good sub-channels of state s under word w.
  std::vector<std::uint8_t> miss(static_cast<std::size_t>(kwords) * states);
  for (int w = 0; w < kwords; ++w) {
    for (std::uint64_t s = 0; s < states; ++s) {
      miss[static_cast<std::size_t>(w) * states + s] =
          static_cast<std::uint8_t>(popcount(s & ~klass.words[w]));
    }
  }
  std::vector<long double> prob(states);
  for (std::uint64_t s = 0; s < states; ++s) {
    const int k = popcount(s);
    prob[s] = std::pow(static_cast<long double>(q), k) *
              std::pow(1.0L - static_cast<long double>(q), n - k);
  }
  const auto evaluate = [&](const std::vector<int>& idx) {
    long double total = 0.0L;
    for (std::uint64_t s = 0; s < states; ++s) {
      int best = n;
      for (int w : idx) best = std::min<int>(best, miss[static_cast<std::size_t>(w) * states + s]);
      total += prob[s] * best;
    }
    return total / n;
  };

  // Greedy: add the word that lowers the expected distortion most.
  const auto greedy = [&]() {
    OracleResult res;
    res.exact = false;
    std::vector<int> idx;
    for (int j = 0; j < m_words; ++j) {
      long double best_val = std::numeric_limits<long double>::infinity();
      int best_w = 0;
      for (int w = 0; w < kwords; ++w) {
        if (std::find(idx.begin(), idx.end(), w) != idx.end()) continue;
        idx.push_back(w);
        const long double v = evaluate(idx);
        idx.pop_back();
        ++res.codebooks_checked;
        if (v < best_val) {
          best_val = v;
          best_w = w;
        }
      }
      idx.push_back(best_w);
      res.distortion = best_val;
    }
    res.best = {n, active, {}};
    for (int w : idx) res.best.words.push_back(klass.words[w]);
    return res;
  };

  const double combos = std::exp(log_choose(kwords, m_words));
  if (combos * static_cast<double>(states) > opt.budget) {
    OracleResult g = greedy();
    if (opt.allow_greedy) return g;
    std::ostringstream os;
    os << "exhaustive_codebook_oracle: " << combos << " codebooks x " << states
       << " states exceed the budget of " << opt.budget;
    throw BudgetError(os.str(), static_cast<double>(g.distortion));
  }

  OracleResult res;
  res.distortion = std::numeric_limits<long double>::infinity();
  std::vector<int> idx(m_words);
  for (int j = 0; j < m_words; ++j) idx[j] = j;
  std::vector<int> best_idx = idx;
  for (;;) {
    const long double v = evaluate(idx);
    ++res.codebooks_checked;
    if (v < res.distortion) {
      res.distortion = v;
      best_idx = idx;
    }
    int j = m_words - 1;
    while (j >= 0 && idx[j] == kwords - m_words + j) --j;
    if (j < 0) break;
    ++idx[j];
    for (int i = j + 1; i < m_words; ++i) idx[i] = idx[i - 1] + 1;
  }
  res.best = {n, active, {}};
  for (int w : best_idx) res.best.words.push_back(klass.words[w]);
  return res;
}

}  // namespace csflab::simkit
