#include "csflab/twostate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "csflab/errors.hpp"

namespace csflab::twostate {

namespace {

using mathkit::binary_entropy;

constexpr double kSlack = 1e-12;

bool is_prob(double x) { return x >= 0.0 && x <= 1.0; }

void require_prob(const char* what, double x) {
  if (!is_prob(x)) {
    std::ostringstream os;
    os << what << " must lie in [0,1], got " << x;
    throw DomainError(os.str());
  }
}

// H2(num/den) with the ratio clamped to [0,1] inside kSlack.
double h2_ratio(double num, double den) {
  if (den <= 0.0) return 0.0;
  double r = num / den;
  if (r < -kSlack || r > 1.0 + kSlack) {
    std::ostringstream os;
    os << "conditional probability " << r << " outside [0,1]";
    throw DomainError(os.str());
  }
  return binary_entropy(std::clamp(r, 0.0, 1.0));
}

double eps1_on_line(double q, double p, double eps0) {
  return std::clamp((p - q * (1.0 - eps0)) / (1.0 - q), 0.0, 1.0);
}

double h2_prime(double x) { return std::log2((1.0 - x) / x); }

void require_bound_regime(CrossoverPair eps) {
  const auto ok = [](double e) { return e > 0.0 && e < 0.5; };
  if (!ok(eps.eps0) || !ok(eps.eps1)) {
    std::ostringstream os;
    os << "finite-N bound needs both crossover probabilities in (0, 0.5); got eps0 = " << eps.eps0
       << ", eps1 = " << eps.eps1;
    throw PreconditionError(os.str());
  }
}

}  // namespace

void TwoStateParams::validate() const {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("TwoStateParams: q must lie in (0,1)");
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("TwoStateParams: p must lie in (0,1]");
  if (!(c1 > c0 && c0 >= 0.0)) throw DomainError("TwoStateParams: need c1 > c0 >= 0");
}

void MarkovSource::validate() const {
  if (!(delta01 > 0.0 && delta01 < 1.0) || !(delta10 > 0.0 && delta10 < 1.0)) {
    throw DomainError("MarkovSource: transition probabilities must lie in (0,1)");
  }
}

double mutual_info_rate(double q, CrossoverPair eps) {
  require_prob("q", q);
  require_prob("eps0", eps.eps0);
  require_prob("eps1", eps.eps1);
  const double p = std::clamp(q * (1.0 - eps.eps0) + (1.0 - q) * eps.eps1, 0.0, 1.0);
  const double i =
      binary_entropy(p) - q * binary_entropy(eps.eps0) - (1.0 - q) * binary_entropy(eps.eps1);
  return std::max(i, 0.0);
}

double max_useful_feedback(double q, double p) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("max_useful_feedback: q must lie in (0,1)");
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("max_useful_feedback: p must lie in (0,1]");
  if (p <= q) return binary_entropy(p) - q * binary_entropy(p / q);
  return binary_entropy(1.0 - p) - (1.0 - q) * binary_entropy((1.0 - p) / (1.0 - q));
}

CrossoverPair solve_crossover(const TwoStateParams& params, double rf, const mathkit::Tolerance& tol) {
  params.validate();
  if (!(rf >= 0.0)) throw DomainError("solve_crossover: rf must be >= 0");
  const double q = params.q;
  const double p = params.p;
  const double lo = std::max(0.0, 1.0 - p / q);
  if (rf >= max_useful_feedback(q, p)) return {lo, eps1_on_line(q, p, lo)};

  // Along the weight line, i(eps0) falls monotonically from R̄ at lo to 0 at 1-p.
  const double hi = 1.0 - p;
  if (!(hi >= lo)) throw InfeasibleError("solve_crossover: empty feasible interval for eps0");
  const auto gap = [&](double e0) {
    return mutual_info_rate(q, {e0, eps1_on_line(q, p, e0)}) - rf;
  };
  // i(1-p) is zero up to rounding.
  if (gap(hi) >= 0.0) return {hi, eps1_on_line(q, p, hi)};
  const double e0 = mathkit::find_root(gap, lo, hi, tol);
  return {e0, eps1_on_line(q, p, e0)};
}

double forward_rate(const TwoStateParams& params, CrossoverPair eps) {
  return params.q * (1.0 - eps.eps0) * (params.c1 - params.c0) + params.p * params.c0;
}

double vq_forward_rate(const TwoStateParams& params, double rf) {
  return forward_rate(params, solve_crossover(params, rf));
}

double distortion_rate(double q, double p, double rf) {
  const CrossoverPair eps = solve_crossover({q, p, 1.0, 0.0}, rf);
  return q * eps.eps0;
}

double lsc_forward_rate(const TwoStateParams& params, double rf) {
  params.validate();
  if (!(rf >= 0.0)) throw DomainError("lsc_forward_rate: rf must be >= 0");
  const double q = params.q;
  const double p = params.p;
  const double c1 = params.c1;
  const double c0 = params.c0;

  const double fq = rf >= binary_entropy(q) ? q : mathkit::inv_binary_entropy(std::min(rf, 1.0));
  double cf;
  if (p <= fq) {
    cf = p * c1;
  } else {
    const double rest_good = q - fq;
    cf = fq * c1 + (p - fq) * (rest_good * c1 + (1.0 - q) * c0) / (rest_good + (1.0 - q));
  }

  const double fb = rf >= binary_entropy(1.0 - q)
                        ? (1.0 - q)
                        : mathkit::inv_binary_entropy(std::min(rf, 1.0));
  const double unreported = q + (1.0 - q) - fb;
  double cfb;
  if (p < unreported) {
    cfb = p * (q * c1 + ((1.0 - q) - fb) * c0) / unreported;
  } else {
    cfb = q * c1 + (p - q) * c0;
  }
  return cfb > cf ? cfb : cf;
}

FiniteNBound fixed_length_lower_bound(const TwoStateParams& params, double rf, std::int64_t n) {
  if (n < 2) throw DomainError("fixed_length_lower_bound: n must be >= 2");
  const CrossoverPair eps = solve_crossover(params, rf);
  require_bound_regime(eps);
  const double c = forward_rate(params, eps);
  const double nd = static_cast<double>(n);
  const double nq = nd * params.q;

  FiniteNBound out;
  out.n = n;
  out.scheme = Scheme::fixed;
  out.rate_asymptotic = c;
  out.eps = eps;
  if (nq > 1.0) {
    const double k1 = 2.0 / (params.q * (h2_prime(eps.eps0) + h2_prime(eps.eps1)));
    const double loss = (std::sqrt(2.0 * std::log(nq)) + 2.0) / std::sqrt(nq) + 1.0 / nd +
                        k1 * std::log2(nd) / nd;
    out.rate_lower = std::max(0.0, c * (1.0 - loss));
    out.rate_simplified = std::max(0.0, c * (1.0 - 2.0 * std::sqrt(std::log(nq) / nq)));
  }
  const double p = params.p;
  const double k2 = std::log2(std::sqrt(2.0 * std::numbers::pi) * std::exp(5.0 / 12.0)) -
                    0.5 * std::log2(p * (1.0 - p));
  const double overhead = (std::log2(nd) + 2.0 * k2 + 2.0 * std::log2(std::log(nd))) / (2.0 * nd);
  out.feedback_overhead = std::isfinite(overhead) ? overhead : std::numeric_limits<double>::quiet_NaN();
  return out;
}

FiniteNBound variable_length_lower_bound(const TwoStateParams& params, double rf, std::int64_t n) {
  if (n < 2) throw DomainError("variable_length_lower_bound: n must be >= 2");
  const CrossoverPair eps = solve_crossover(params, rf);
  require_bound_regime(eps);
  const double c = forward_rate(params, eps);
  const double nd = static_cast<double>(n);
  const double k = 6.0 / (params.q * (h2_prime(eps.eps0) + h2_prime(eps.eps1)));

  FiniteNBound out;
  out.n = n;
  out.scheme = Scheme::variable;
  out.rate_asymptotic = c;
  out.eps = eps;
  out.rate_lower = std::max(0.0, c * (1.0 - k * std::log2(nd) / nd));
  out.rate_simplified = out.rate_lower;
  out.feedback_overhead = 0.0;
  return out;
}

double markov_entropy_rate(const MarkovSource& src) {
  src.validate();
  const double q = src.q();
  return q * binary_entropy(src.delta10) + (1.0 - q) * binary_entropy(src.delta01);
}

JointReportProbs zero_error_report(const MarkovSource& src) {
  src.validate();
  const double q = src.q();
  return {(1.0 - q) * (1.0 - src.delta01), 0.0, q * src.delta10, 0.0};
}

double markov_lb_rate(const MarkovSource& src, const JointReportProbs& jp) {
  src.validate();
  const double q = src.q();
  const double d01 = src.delta01;
  const double d10 = src.delta10;
  for (double v : {jp.q00, jp.q01, jp.q10, jp.q11}) {
    if (v < -kSlack) throw DomainError("markov_lb_rate: negative joint report probability");
  }
  const double h_given_s0 =
      (1.0 - q) * h2_ratio(jp.q00 + jp.q01, 1.0 - q) + q * h2_ratio(jp.q10 + jp.q11, q);
  const double h_given_s0_s1 = (1.0 - q) * (1.0 - d01) * h2_ratio(jp.q00, (1.0 - q) * (1.0 - d01)) +
                               q * d10 * h2_ratio(jp.q10, q * d10) +
                               (1.0 - q) * d01 * h2_ratio(jp.q01, (1.0 - q) * d01) +
                               q * (1.0 - d10) * h2_ratio(jp.q11, q * (1.0 - d10));
  return std::max(0.0, h_given_s0 - h_given_s0_s1);
}

double markov_ub_rate(const MarkovSource& src, CrossoverPair eps) {
  src.validate();
  require_prob("eps0", eps.eps0);
  require_prob("eps1", eps.eps1);
  const double q = src.q();
  const double d01 = src.delta01;
  const double d10 = src.delta10;
  const double e0 = eps.eps0;
  const double e1 = eps.eps1;

  const double h_s2_s0 = q * binary_entropy((1.0 - d10) * (1.0 - d10) + d10 * d01) +
                         (1.0 - q) * binary_entropy(d01 * (1.0 - d10) + (1.0 - d01) * d01);
  const double h_hat_s1 = q * binary_entropy(e0) + (1.0 - q) * binary_entropy(e1);
  const double h_s2_s1 = q * binary_entropy(d10) + (1.0 - q) * binary_entropy(d01);

  // Weights of (S0,S2) = (0,0), (0,1) or (1,0), (1,1), split by S1 = 0 / S1 = 1.
  const std::array<double, 3> bad = {(1.0 - d01) * (1.0 - d01) * (1.0 - q),
                                     d01 * (1.0 - d01) * (1.0 - q), d01 * d01 * (1.0 - q)};
  const std::array<double, 3> good = {d10 * d10 * q, d10 * (1.0 - d10) * q,
                                      (1.0 - d10) * (1.0 - d10) * q};
  const std::array<double, 3> mult = {1.0, 2.0, 1.0};
  double h_hat_s0_s2 = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    const double total = bad[j] + good[j];
    const double w = ((1.0 - e1) * bad[j] + e0 * good[j]) / total;
    h_hat_s0_s2 += mult[j] * total * binary_entropy(std::clamp(w, 0.0, 1.0));
  }
  return std::max(0.0, h_s2_s0 + h_hat_s0_s2 - h_hat_s1 - h_s2_s1);
}

MarkovLower markov_lower_crossover(const MarkovSource& src, double p, double rf) {
  src.validate();
  const double q = src.q();
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("markov_lower_crossover: p must lie in (0,1]");
  if (!(rf >= 0.0)) throw DomainError("markov_lower_crossover: rf must be >= 0");
  const double lo = std::max(0.0, 1.0 - p / q);
  const double hi = 1.0 - p;
  const auto iu = [&](double e0) { return markov_ub_rate(src, {e0, eps1_on_line(q, p, e0)}); };
  if (iu(lo) <= rf) return {{lo, eps1_on_line(q, p, lo)}, true};
  // i_u is convex along the weight line; its minimum is I(S1;S2|S0) > 0.
  const mathkit::LineMax argmin =
      mathkit::golden_section_max([&](double e0) { return -iu(e0); }, lo, hi, 1e-12);
  if (-argmin.value > rf) return {{hi, eps1_on_line(q, p, hi)}, false};
  const double e0 = mathkit::find_root([&](double e) { return iu(e) - rf; }, lo, argmin.x,
                                       {.abs = 1e-14, .rel = 1e-13});
  return {{e0, eps1_on_line(q, p, e0)}, true};
}

MarkovBounds markov_vq_bounds(const MarkovSource& src, double p, double c1, double c0, double rf) {
  src.validate();
  const double q = src.q();
  TwoStateParams{q, p, c1, c0}.validate();
  if (!(rf >= 0.0)) throw DomainError("markov_vq_bounds: rf must be >= 0");

  MarkovBounds out;
  const double spread = p * (q * c1 + (1.0 - q) * c0);

  // Upper bound. I(S1;Ŝ1|S0), the weight and the objective all split over the
  // value of S0, so the problem is two binary rate-distortion problems with
  // sources P(S1=1|S0=0) = delta01 and P(S1=1|S0=1) = 1 - delta10 sharing the
  // activation budget p and the feedback budget rf.
  const double beta0 = src.delta01;
  const double beta1 = 1.0 - src.delta10;
  const auto sub_rate = [&](double beta, double ps, double rs) {
    if (ps <= 0.0) return 0.0;
    const TwoStateParams sub{beta, std::min(ps, 1.0), c1, c0};
    return vq_forward_rate(sub, std::max(rs, 0.0));
  };
  const double p0_lo = std::max(0.0, (p - q) / (1.0 - q));
  const double p0_hi = std::min(1.0, p / (1.0 - q));
  const double r0_hi = std::min(rf / (1.0 - q), binary_entropy(beta0));
  const std::array<mathkit::Interval, 2> box = {mathkit::Interval{p0_lo, p0_hi},
                                                mathkit::Interval{0.0, std::max(r0_hi, 0.0)}};
  const auto objective = [&](std::span<const double> x) {
    const double p0 = x[0];
    const double r0 = x[1];
    const double p1 = std::clamp((p - (1.0 - q) * p0) / q, 0.0, 1.0);
    const double r1 = (rf - (1.0 - q) * r0) / q;
    return (1.0 - q) * sub_rate(beta0, p0, r0) + q * sub_rate(beta1, p1, r1);
  };
  const mathkit::MaximizeResult best =
      mathkit::maximize_box(objective, box, {.abs = 1e-10, .rel = 1e-12, .max_iter = 200},
                            {.grid_points = 16, .starts = 2});
  out.rate_upper = best.value;
  out.upper_p0 = best.point[0];
  out.upper_r0 = best.point[1];
  out.upper_on_boundary = best.boundary();

  const MarkovLower lower = markov_lower_crossover(src, p, rf);
  out.lower_eps = lower.eps;
  out.lower_feasible = lower.feasible;
  const TwoStateParams params{q, p, c1, c0};
  out.rate_lower = std::max(forward_rate(params, out.lower_eps), spread);
  if (out.rate_lower > out.rate_upper + 1e-9) {
    std::ostringstream os;
    os << "markov_vq_bounds: lower bound " << out.rate_lower << " exceeds upper bound "
       << out.rate_upper;
    throw ConvergenceError(os.str());
  }
  return out;
}

}  // namespace csflab::twostate
