#include "csflab/rayleigh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "csflab/errors.hpp"
#include "parallel.hpp"

namespace csflab::rayleigh {

namespace {

using mathkit::binary_entropy;
using mathkit::kLog2E;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_n(const RayleighSystem& sys) { return std::log(static_cast<double>(sys.n)); }

double t_upper(const RayleighSystem& sys) { return log_n(sys) + 3.0; }

// e^{t} tail_log_integral(t, a): finite even when e^{-t} underflows.
double scaled_tail(double t, double a) {
  return std::log1p(a * t) + mathkit::expint_e1_scaled(t + 1.0 / a);
}

struct BudgetChoice {
  double t = 0.0;
  double value = kNegInf;
  double used = 0.0;
  bool constrained = false;
};

// Maximizes rate(t) over [lo, hi] subject to cost(t) <= budget: grid scan,
// golden-section refinement around the best feasible grid point, and the
// roots of cost(t) = budget as boundary candidates.
template <class Rate, class Cost>
BudgetChoice best_under_budget(const Rate& rate, const Cost& cost, double budget, double lo,
                               double hi, int grid = 256) {
  const double slack = 1e-9 * std::max(1.0, budget);
  std::vector<double> ts(grid);
  std::vector<double> vs(grid);
  std::vector<double> cs(grid);
  for (int i = 0; i < grid; ++i) {
    ts[i] = lo + (hi - lo) * i / (grid - 1);
    cs[i] = cost(ts[i]);
    vs[i] = rate(ts[i]);
  }
  BudgetChoice best;
  int best_i = -1;
  for (int i = 0; i < grid; ++i) {
    if (cs[i] <= budget + slack && vs[i] > best.value) {
      best = {ts[i], vs[i], cs[i], false};
      best_i = i;
    }
  }
  if (best_i >= 0) {
    const double a = ts[std::max(best_i - 1, 0)];
    const double b = ts[std::min(best_i + 1, grid - 1)];
    const auto penalized = [&](double t) { return cost(t) <= budget + slack ? rate(t) : kNegInf; };
    const mathkit::LineMax lm = mathkit::golden_section_max(penalized, a, b, 1e-10 * (hi - lo));
    if (lm.value > best.value) best = {lm.x, lm.value, cost(lm.x), false};
  }
  for (int i = 0; i + 1 < grid; ++i) {
    const double d0 = cs[i] - budget;
    const double d1 = cs[i + 1] - budget;
    if ((d0 > 0.0) == (d1 > 0.0)) continue;
    const double tr = mathkit::find_root([&](double t) { return cost(t) - budget; }, ts[i],
                                         ts[i + 1], {.abs = 1e-13, .rel = 1e-12});
    // Step to the feasible side of the root.
    const double te = d0 <= 0.0 ? std::min(tr, ts[i + 1]) : std::max(tr, ts[i]);
    const double v = rate(te);
    if (v > best.value) best = {te, v, cost(te), true};
  }
  if (best.value == kNegInf) throw InfeasibleError("no threshold satisfies the feedback budget");
  if (best.used >= budget * (1.0 - 1e-7) && budget > 0.0) best.constrained = true;
  return best;
}

// Chebyshev interpolant of log P(H2 > t | H1 > t) in sqrt(t / hi), built once per
// (alpha, hi) from ar1_transition at the nodes. Outside that range the
// transition is computed directly.
class TransitionTable {
 public:
  static constexpr int kNodes = 64;

  TransitionTable(double alpha, double hi) : alpha_(alpha), hi_(hi) {
    std::array<double, kNodes> vals{};
    for (int k = 0; k < kNodes; ++k) {
      const double x = std::cos(std::numbers::pi * (k + 0.5) / kNodes);
      const double u = 0.5 * (x + 1.0);
      vals[k] = std::log1p(-ar1_transition(alpha, hi * u * u).delta10);
    }
    for (int j = 0; j < kNodes; ++j) {
      double c = 0.0;
      for (int k = 0; k < kNodes; ++k) {
        c += vals[k] * std::cos(std::numbers::pi * j * (k + 0.5) / kNodes);
      }
      coef_[j] = 2.0 * c / kNodes;
    }
  }

  twostate::MarkovSource get(double t) const {
    if (t <= 0.0) return {1.0, 0.0};
    if (t > hi_) return ar1_transition(alpha_, t);
    const double d10 = std::clamp(-std::expm1(eval(t)), 0.0, 1.0);
    return {std::exp(-t) * d10 / -std::expm1(-t), d10};
  }

 private:
  double eval(double t) const {
    const double x = 2.0 * std::sqrt(t / hi_) - 1.0;
    double b1 = 0.0;
    double b2 = 0.0;
    for (int j = kNodes - 1; j >= 1; --j) {
      const double b0 = 2.0 * x * b1 - b2 + coef_[j];
      b2 = b1;
      b1 = b0;
    }
    return x * b1 - b2 + 0.5 * coef_[0];
  }

  double alpha_;
  double hi_;
  std::array<double, kNodes> coef_{};
};

const TransitionTable& transition_table(double alpha, double hi) {
  static std::mutex mu;
  static std::map<std::pair<double, double>, std::unique_ptr<TransitionTable>> tables;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = tables[{alpha, hi}];
  if (!slot) slot = std::make_unique<TransitionTable>(alpha, hi);
  return *slot;
}

bool usable(const twostate::MarkovSource& s) {
  return s.delta01 > 0.0 && s.delta01 < 1.0 && s.delta10 > 0.0 && s.delta10 < 1.0;
}

ThresholdPolicy spread_policy(const RayleighSystem& sys) {
  ThresholdPolicy pol;
  pol.t = 0.0;
  pol.q = 1.0;
  pol.p = 1.0;
  pol.eps = {0.0, 0.0};
  pol.c1 = spread_rate(sys);
  pol.c0 = 0.0;
  pol.forward_rate = pol.c1;
  pol.feedback_rate = 0.0;
  return pol;
}

}  // namespace

void RayleighSystem::validate() const {
  if (n < 1) throw DomainError("RayleighSystem: n must be >= 1");
  if (!(snr > 0.0) || !std::isfinite(snr)) throw DomainError("RayleighSystem: snr must be > 0");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("RayleighSystem: alpha must lie in [0,1)");
}

Capacities good_bad_capacities(const RayleighSystem& sys, double p, double t) {
  sys.validate();
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("good_bad_capacities: p must lie in (0,1]");
  if (!(t >= 0.0)) throw DomainError("good_bad_capacities: t must be >= 0");
  const double a = sys.snr / (static_cast<double>(sys.n) * p);
  const double c1 = scaled_tail(t, a) * kLog2E;
  if (t == 0.0) return {c1, 0.0};
  const double one_minus_q = -std::expm1(-t);
  return {c1, mathkit::head_log_integral(t, a) / one_minus_q * kLog2E};
}

double spread_rate(const RayleighSystem& sys) {
  sys.validate();
  return mathkit::tail_log_integral(0.0, sys.snr / static_cast<double>(sys.n)) * kLog2E;
}

double onoff_rate(const RayleighSystem& sys, double t) {
  sys.validate();
  if (!(t >= 0.0)) throw DomainError("onoff_rate: t must be >= 0");
  const double q = std::exp(-t);
  if (q < 1e-300) return 0.0;
  const double a = sys.snr / (static_cast<double>(sys.n) * q);
  return q * scaled_tail(t, a) * kLog2E;
}

ThresholdPolicy vq_optimize(const RayleighSystem& sys, double rf) {
  sys.validate();
  if (!(rf >= 0.0)) throw DomainError("vq_optimize: rf must be >= 0");
  if (sys.alpha != 0.0) throw PreconditionError("vq_optimize: requires independent sub-channels");

  const auto evaluate = [&](double p, double t, ThresholdPolicy* out) {
    const Capacities caps = good_bad_capacities(sys, p, t);
    const double q = std::exp(-t);
    if (t < 1e-12 || !(q < 1.0) || !(caps.c1 > caps.c0)) {
      if (out) *out = {t, 1.0, p, {0.0, 0.0}, caps.c1, 0.0, p * caps.c1, 0.0, false};
      return p * caps.c1;
    }
    const twostate::TwoStateParams params{q, p, caps.c1, caps.c0};
    const twostate::CrossoverPair eps = twostate::solve_crossover(params, rf);
    const double c = twostate::forward_rate(params, eps);
    if (out) {
      *out = {t, q, p, eps, caps.c1, caps.c0, c, twostate::mutual_info_rate(q, eps), false};
    }
    return c;
  };
  const std::array<mathkit::Interval, 2> box = {mathkit::Interval{1e-4, 1.0},
                                                mathkit::Interval{0.0, t_upper(sys)}};
  const mathkit::MaximizeResult best = mathkit::maximize_box(
      [&](std::span<const double> x) { return evaluate(x[0], x[1], nullptr); }, box,
      {.abs = 1e-10, .rel = 1e-12, .max_iter = 200});
  ThresholdPolicy pol;
  evaluate(best.point[0], best.point[1], &pol);
  pol.on_boundary = best.boundary();
  // Exact reporting (p = q, eps = 0) lies on a ridge of the objective.
  const ThresholdPolicy exact = lsc_threshold_rate(sys, rf * static_cast<double>(sys.n));
  if (exact.forward_rate > pol.forward_rate && exact.t > 0.0) {
    const Capacities caps = good_bad_capacities(sys, exact.q, exact.t);
    pol = {exact.t, exact.q, exact.q, {0.0, 0.0}, caps.c1, caps.c0,
           exact.forward_rate, exact.feedback_rate, exact.on_boundary};
  }
  return pol;
}

ThresholdPolicy onoff_optimum(const RayleighSystem& sys) {
  sys.validate();
  const BudgetChoice c = best_under_budget([&](double t) { return onoff_rate(sys, t); },
                                           [](double) { return 0.0; }, 0.0, 0.0, t_upper(sys));
  ThresholdPolicy pol;
  pol.t = c.t;
  pol.q = std::exp(-c.t);
  pol.p = pol.q;
  pol.forward_rate = c.value;
  pol.feedback_rate = binary_entropy(pol.q);
  pol.c1 = pol.q > 0.0 ? c.value / pol.q : 0.0;
  return pol;
}

ThresholdPolicy lsc_threshold_rate(const RayleighSystem& sys, double b) {
  sys.validate();
  if (!(b >= 0.0)) throw DomainError("lsc_threshold_rate: b must be >= 0");
  const double nd = static_cast<double>(sys.n);
  const BudgetChoice c = best_under_budget(
      [&](double t) { return onoff_rate(sys, t); },
      [&](double t) { return nd * binary_entropy(std::exp(-t)); }, b, 0.0, t_upper(sys));
  ThresholdPolicy pol;
  pol.t = c.t;
  pol.q = std::exp(-c.t);
  pol.p = pol.q;
  pol.eps = {0.0, 0.0};
  pol.forward_rate = c.value;
  pol.feedback_rate = c.used / nd;
  pol.c1 = pol.q > 0.0 ? c.value / pol.q : 0.0;
  pol.on_boundary = c.constrained;
  return pol;
}

double group_rate(const RayleighSystem& sys, double m, double t) {
  sys.validate();
  const double nd = static_cast<double>(sys.n);
  if (!(m >= 1.0 && m <= nd)) throw DomainError("group_rate: m must lie in [1, n]");
  if (!(t >= 0.0)) throw DomainError("group_rate: t must be >= 0");
  const double q = std::exp(-m * t);
  if (q < 1e-300) return 0.0;
  const double a = sys.snr / (nd * q);
  return nd * q * scaled_tail(t, a) * kLog2E;
}

GroupPolicy group_best_threshold(const RayleighSystem& sys, double m, double b) {
  sys.validate();
  const double nd = static_cast<double>(sys.n);
  if (!(m >= 1.0 && m <= nd)) throw DomainError("group_best_threshold: m must lie in [1, n]");
  if (!(b >= 0.0)) throw DomainError("group_best_threshold: b must be >= 0");
  const double groups = nd / m;
  const BudgetChoice c = best_under_budget(
      [&](double t) { return group_rate(sys, m, t); },
      [&](double t) { return groups * binary_entropy(std::exp(-m * t)); }, b, 0.0,
      t_upper(sys) / m, 160);
  GroupPolicy g;
  g.m = m;
  g.t = c.t;
  g.groups = groups;
  g.total_rate = c.value;
  g.forward_rate = c.value / nd;
  g.feedback_bits = c.used;
  g.constrained = c.constrained;
  return g;
}

GroupPolicy group_optimize(const RayleighSystem& sys, double b, GroupMode mode) {
  sys.validate();
  if (!(b > 0.0)) throw DomainError("group_optimize: b must be > 0");
  const double nd = static_cast<double>(sys.n);
  const double log_hi = std::log(nd);
  const auto value = [&](double log_m) {
    return group_best_threshold(sys, std::clamp(std::exp(log_m), 1.0, nd), b).total_rate;
  };

  GroupPolicy best = group_best_threshold(sys, 1.0, b);
  if (sys.n > 1) {
    constexpr int kGrid = 96;
    double best_lm = 0.0;
    double best_v = best.total_rate;
    int best_i = 0;
    for (int i = 1; i < kGrid; ++i) {
      const double lm = log_hi * i / (kGrid - 1);
      const double v = value(lm);
      if (v > best_v) {
        best_v = v;
        best_lm = lm;
        best_i = i;
      }
    }
    const double a = log_hi * std::max(best_i - 1, 0) / (kGrid - 1);
    const double c = log_hi * std::min(best_i + 1, kGrid - 1) / (kGrid - 1);
    const mathkit::LineMax lm = mathkit::golden_section_max(value, a, c, 1e-9);
    if (lm.value > best_v) best_lm = lm.x;
    best = group_best_threshold(sys, std::clamp(std::exp(best_lm), 1.0, nd), b);
  }

  if (mode != GroupMode::real) {
    std::vector<double> candidates;
    if (mode == GroupMode::integer) {
      candidates = {std::floor(best.m), std::ceil(best.m)};
    } else {
      double below = 1.0;
      double above = nd;
      for (std::int64_t d = 1; d <= sys.n; ++d) {
        if (sys.n % d != 0) continue;
        const double dd = static_cast<double>(d);
        if (dd <= best.m) below = dd;
        if (dd >= best.m) {
          above = dd;
          break;
        }
      }
      candidates = {below, above};
    }
    GroupPolicy snapped;
    snapped.total_rate = kNegInf;
    for (double m : candidates) {
      const GroupPolicy g = group_best_threshold(sys, std::clamp(m, 1.0, nd), b);
      if (g.total_rate > snapped.total_rate) snapped = g;
    }
    best = snapped;
  }
  best.on_boundary = best.m <= 1.0 + 1e-9 || best.m >= nd - 1e-9;
  return best;
}

double ustar() {
  return mathkit::find_root([](double u) { return (1.0 + u) * std::log1p(u) - 2.0 * u; }, 1.0,
                            10.0, {.abs = 1e-15, .rel = 1e-15});
}

// Root of a monotone residual; the bracket [lo, hi] is widened until it holds a sign change.
double expanding_root(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 60 && std::signbit(f(lo)) == std::signbit(f(hi)); ++i) {
    const double w = hi - lo;
    lo -= w;
    hi += w;
  }
  return mathkit::find_root(f, lo, hi, {.abs = 1e-15, .rel = 1e-15});
}

double eta1(std::int64_t n, double snr) {
  if (n < 3 || !(snr > 0.0)) throw DomainError("eta1: requires n >= 3 and snr > 0");
  const double ln_n = std::log(static_cast<double>(n));
  const double us = ustar();
  const auto residual = [&](double eta) {
    const double y = std::pow(ln_n, 1.0 - 0.5 * eta);
    return ln_n - std::log(snr / us * y) - y;
  };
  return expanding_root(residual, 0.0, 2.0);
}

double eta2(std::int64_t n, double snr) {
  if (n < 3 || !(snr > 0.0)) throw DomainError("eta2: requires n >= 3 and snr > 0");
  const double ln_n = std::log(static_cast<double>(n));
  const auto residual = [&](double eta) {
    return ln_n - std::log(snr * std::pow(ln_n, 1.0 + eta)) - std::pow(ln_n, 0.5 * (1.0 + eta));
  };
  return expanding_root(residual, 0.0, 1.0);
}

AsymptoticRegime asymptotic_regime(const RayleighSystem& sys, double b) {
  sys.validate();
  if (!(b > 0.0)) throw DomainError("asymptotic_regime: b must be > 0");
  AsymptoticRegime r;
  const double ln_n = log_n(sys);
  r.ustar = ustar();
  r.eta1 = eta1(sys.n, sys.snr);
  r.eta2 = eta2(sys.n, sys.snr);
  r.b1 = sys.snr / r.ustar * std::pow(ln_n, 2.0 - r.eta1);
  r.bmax = sys.snr * std::pow(ln_n, 2.0 + r.eta2);
  r.regime = b < r.b1 ? Regime::low : (b < r.bmax ? Regime::mid : Regime::saturated);
  return r;
}

GroupAsymptotic group_asymptotic(const RayleighSystem& sys, double b) {
  GroupAsymptotic g;
  g.regime = asymptotic_regime(sys, b);
  const double nd = static_cast<double>(sys.n);
  const double ln_n = std::log(nd);
  const double lnln_n = std::log(ln_n);
  const double p = sys.snr;
  const double us = g.regime.ustar;
  double c_nats = 0.0;
  switch (g.regime.regime) {
    case Regime::low: {
      const double w = std::sqrt(p * b / us);
      g.t_star = std::sqrt(us * b / p);
      g.m_star = std::sqrt(p / (us * b)) * std::log(nd / w);
      c_nats = w * std::log1p(us);
      break;
    }
    case Regime::mid: {
      const double lt = std::log(nd * ln_n / b);
      g.t_star = lt;
      g.m_star = 1.0;
      c_nats = b / ln_n * std::log1p(p * ln_n / b * lt);
      break;
    }
    case Regime::saturated: {
      g.t_star = ln_n - (1.0 + g.regime.eta2) * lnln_n - std::log(p);
      g.m_star = 1.0;
      c_nats = p * (ln_n - (1.0 + g.regime.eta2) * lnln_n);
      break;
    }
  }
  g.c_leading = c_nats * kLog2E;
  g.c_star = group_rate(sys, std::clamp(g.m_star, 1.0, nd), std::max(g.t_star, 0.0));
  return g;
}

double ar1_joint_tail_series(double alpha, double t) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("ar1_joint_tail_series: alpha in [0,1)");
  if (!(t >= 0.0)) throw DomainError("ar1_joint_tail_series: t must be >= 0");
  const double a2 = alpha * alpha;
  const double s = t / (1.0 - a2);
  if (alpha == 0.0) return std::exp(-2.0 * s);
  // (1-a^2) sum_k a^{2k} F_k(s)^2 with F_k the Poisson(s) distribution function.
  const double log_s = s > 0.0 ? std::log(s) : kNegInf;
  const double log_a2 = std::log(a2);
  double cdf = 0.0;
  double sum = 0.0;
  for (long k = 0; k < 10'000'000; ++k) {
    const double log_pmf = s > 0.0 ? -s + k * log_s - std::lgamma(k + 1.0) : (k == 0 ? 0.0 : kNegInf);
    cdf = std::min(1.0, cdf + std::exp(log_pmf));
    sum += std::exp(k * log_a2) * cdf * cdf;
    const double rest = std::exp((k + 1) * log_a2) / (1.0 - a2);
    if (k > s && rest < 1e-17 * sum) break;
  }
  return (1.0 - a2) * sum;
}

double ar1_joint_tail_quadrature(double alpha, double t) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw DomainError("ar1_joint_tail_quadrature: alpha in [0,1)");
  }
  if (!(t >= 0.0)) throw DomainError("ar1_joint_tail_quadrature: t must be >= 0");
  const double b = 1.0 - alpha * alpha;
  const double upper = t + 60.0 * b + 60.0;
  const auto density = [&](double x, double y) {
    const double z = 2.0 * alpha * std::sqrt(x * y) / b;
    return std::exp(-(x + y) / b + z) * mathkit::bessel_i0_scaled(z) / b;
  };
  bool converged = true;
  double worst = 0.0;
  const auto inner = [&](double x) {
    const mathkit::QuadResult r =
        mathkit::integrate([&](double y) { return density(x, y); }, t, upper, 1e-15, 1e-12);
    if (!r.converged) {
      converged = false;
      worst = std::max(worst, r.error);
    }
    return r.value;
  };
  const mathkit::QuadResult outer = mathkit::integrate(inner, t, upper, 1e-14, 1e-11);
  if (!outer.converged || !converged) {
    std::ostringstream os;
    os << "ar1_joint_tail_quadrature: no convergence at alpha = " << alpha << ", t = " << t;
    throw QuadratureError(os.str(), std::max(outer.error, worst));
  }
  return outer.value;
}

twostate::MarkovSource ar1_transition(double alpha, double t) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("ar1_transition: alpha in [0,1)");
  if (!(t >= 0.0)) throw DomainError("ar1_transition: t must be >= 0");
  if (t == 0.0) return {1.0, 0.0};
  const double q = std::exp(-t);
  const double joint =
      alpha > 0.95 ? ar1_joint_tail_series(alpha, t) : ar1_joint_tail_quadrature(alpha, t);
  const double d10 = std::clamp(1.0 - joint / q, 0.0, 1.0);
  return {q * d10 / -std::expm1(-t), d10};
}

ThresholdPolicy ar1_achievable_rate(const RayleighSystem& sys, double rf) {
  sys.validate();
  if (!(sys.alpha > 0.0)) throw PreconditionError("ar1_achievable_rate: requires alpha > 0");
  if (!(rf >= 0.0)) throw DomainError("ar1_achievable_rate: rf must be >= 0");
  const TransitionTable& cache = transition_table(sys.alpha, t_upper(sys));

  const auto evaluate = [&](double p, double t, ThresholdPolicy* out) {
    const Capacities caps = good_bad_capacities(sys, p, t);
    const double q = std::exp(-t);
    const twostate::MarkovSource src = cache.get(t);
    if (!usable(src) || !(caps.c1 > caps.c0)) return kNegInf;
    const twostate::MarkovLower lower = twostate::markov_lower_crossover(src, p, rf);
    const twostate::TwoStateParams params{q, p, caps.c1, caps.c0};
    const double c = twostate::forward_rate(params, lower.eps);
    if (out) {
      const double used = lower.feasible ? twostate::markov_ub_rate(src, lower.eps) : 0.0;
      *out = {t, q, p, lower.eps, caps.c1, caps.c0, c, used, false};
    }
    return c;
  };
  const std::array<mathkit::Interval, 2> box = {mathkit::Interval{1e-4, 1.0},
                                                mathkit::Interval{1e-3, t_upper(sys)}};
  const mathkit::MaximizeResult best = mathkit::maximize_box(
      [&](std::span<const double> x) { return evaluate(x[0], x[1], nullptr); }, box,
      {.abs = 1e-8, .rel = 1e-10, .max_iter = 100});
  ThresholdPolicy pol;
  evaluate(best.point[0], best.point[1], &pol);
  pol.on_boundary = best.boundary();
  // Zero-error reporting (p = q, eps = 0) lies on a ridge of the objective.
  const ThresholdPolicy exact = lsc_markov_rate(sys, rf * static_cast<double>(sys.n));
  if (exact.forward_rate > pol.forward_rate && exact.t > 0.0) {
    const Capacities caps = good_bad_capacities(sys, exact.q, exact.t);
    pol = {exact.t, exact.q, exact.q, {0.0, 0.0}, caps.c1, caps.c0,
           exact.forward_rate, exact.feedback_rate, exact.on_boundary};
  }
  const ThresholdPolicy spread = spread_policy(sys);
  return spread.forward_rate > pol.forward_rate ? spread : pol;
}

ThresholdPolicy lsc_markov_rate(const RayleighSystem& sys, double b) {
  sys.validate();
  if (!(sys.alpha > 0.0)) throw PreconditionError("lsc_markov_rate: requires alpha > 0");
  if (!(b >= 0.0)) throw DomainError("lsc_markov_rate: b must be >= 0");
  const TransitionTable& cache = transition_table(sys.alpha, t_upper(sys));
  const double nd = static_cast<double>(sys.n);
  const auto entropy = [&](double t) {
    if (t <= 0.0) return 0.0;
    const twostate::MarkovSource src = cache.get(t);
    if (!usable(src)) return 0.0;
    return nd * twostate::markov_entropy_rate(src);
  };
  const BudgetChoice c = best_under_budget([&](double t) { return onoff_rate(sys, t); }, entropy,
                                           b, 0.0, t_upper(sys), 128);
  ThresholdPolicy pol;
  pol.t = c.t;
  pol.q = std::exp(-c.t);
  pol.p = pol.q;
  pol.forward_rate = c.value;
  pol.feedback_rate = c.used / nd;
  pol.c1 = pol.q > 0.0 ? c.value / pol.q : 0.0;
  pol.on_boundary = c.constrained;
  return pol;
}

double water_level(std::span<const double> gains, double power) {
  if (gains.empty()) throw DomainError("water_level: no gains");
  if (!(power > 0.0)) throw DomainError("water_level: power must be > 0");
  double inv_min = std::numeric_limits<double>::infinity();
  for (double g : gains) {
    if (!(g > 0.0)) throw DomainError("water_level: gains must be > 0");
    inv_min = std::min(inv_min, 1.0 / g);
  }
  double lo = inv_min;
  double hi = inv_min + power;
  const auto filled = [&](double mu) {
    double s = 0.0;
    for (double g : gains) s += std::max(0.0, mu - 1.0 / g);
    return s;
  };
  for (int i = 0; i < 200 && hi - lo > 1e-10 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (filled(mid) < power) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

WaterfillReport waterfilling_reference(const RayleighSystem& sys, std::int64_t samples,
                                       std::uint64_t seed, int jobs) {
  sys.validate();
  if (samples < 10'000) throw PreconditionError("waterfilling_reference: samples must be >= 1e4");
  std::vector<detail::RunningStats> parts(detail::kPartitions);
  const std::size_t n = static_cast<std::size_t>(sys.n);
  detail::for_each_partition(jobs, [&](std::int64_t part) {
    std::mt19937_64 rng = detail::partition_rng(seed, part);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> gains(n);
    detail::RunningStats st;
    for (std::int64_t s = detail::partition_size(samples, part); s > 0; --s) {
      for (double& g : gains) g = expo(rng);
      const double mu = water_level(gains, sys.snr);
      double rate = 0.0;
      for (double g : gains) {
        if (mu * g > 1.0) rate += std::log2(mu * g);
      }
      st.add(rate);
    }
    parts[part] = st;
  });
  detail::RunningStats total;
  for (const auto& st : parts) total.merge(st);

  WaterfillReport rep;
  rep.samples = total.count;
  rep.mean_total = total.mean;
  rep.stderr_total = total.stderr_mean();
  rep.mean_per_subchannel = rep.mean_total / static_cast<double>(sys.n);
  rep.stderr_per_subchannel = rep.stderr_total / static_cast<double>(sys.n);
  return rep;
}

}  // namespace csflab::rayleigh
