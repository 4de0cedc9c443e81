// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "csflab/mathkit.hpp"
#include "csflab/rayleigh.hpp"
#include "csflab/simkit.hpp"
#include "csflab/twostate.hpp"
#include "oracles.hpp"

using namespace csflab;
using twostate::MarkovSource;
using twostate::TwoStateParams;

namespace {

// Tolerances.
constexpr double kSolverAbs = 1e-4;         // bits, solver vs dense grid
constexpr double kSolverMs = 5.0;           // ms per point
constexpr double kIdentity = 1e-9;          // saturation and entropy identities
constexpr double kGainRatio = 1.5;          // VQ/LSC, weak form
constexpr double kScalingBand = 0.01;       // variable-length gap constancy
constexpr double kFixedBand = 0.05;         // fixed-length limit 2C
constexpr double kRefBand = 0.02;           // water-filling reference values
constexpr double kWaterSeconds = 60.0;
constexpr double kEtaResidual = 1e-8;
constexpr double kAsymptoticBand = 0.15;
constexpr double kCoincide = 0.01;
constexpr double kBracket = 0.10;
constexpr double kSavedBits = 100.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) ok = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (cond ? "" : " [FAILED]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

Check criterion1() {
  Check c;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.05, 0.95), r(0.0, 1.0);
  double worst = 0.0, elapsed = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double q = u(rng), p = u(rng), rf = r(rng);
    const TwoStateParams params{q, p, 3.0, 0.5};
    const auto t0 = Clock::now();
    const double got = twostate::vq_forward_rate(params, rf);
    elapsed += seconds_since(t0);
    const double want = oracle::two_state_rate(q, p, 3.0, 0.5, oracle::dense_grid_crossover(q, p, rf));
    worst = std::max(worst, std::fabs(got - want));
  }
  const double ms = elapsed / 200.0 * 1e3;
  c.require(worst <= kSolverAbs, fmt("max |error| %.3g bits", worst));
  c.require(ms < kSolverMs, fmt("%.3g ms per point", ms));
  return c;
}

Check criterion2() {
  Check c;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  double worst = 0.0, worst_h = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double q = u(rng), p = u(rng);
    const TwoStateParams params{q, p, 3.0, 0.5};
    const double sat = p <= q ? p * 3.0 : q * 3.0 + (p - q) * 0.5;
    const double rbar = twostate::max_useful_feedback(q, p);
    for (double rf : {rbar, rbar + 0.05, rbar + 0.5}) {
      worst = std::max(worst, std::fabs(twostate::vq_forward_rate(params, rf) - sat));
    }
    worst_h = std::max(worst_h, std::fabs(twostate::max_useful_feedback(q, q) - oracle::h2(q)));
  }
  c.require(worst <= kIdentity, fmt("C at Rf >= Rbar off by %.3g", worst));
  c.require(worst_h <= kIdentity, fmt("Rbar(q,q) - H2(q) = %.3g", worst_h));
  return c;
}

Check criterion3() {
  Check c;
  bool dominates = true;
  double best = 0.0;
  for (double p : {0.2, 0.3, 0.4}) {
    const TwoStateParams params{0.3, p, 3.0, 0.0};
    for (int i = 0; i <= 100; ++i) {
      const double rf = i / 100.0;
      const double v = twostate::vq_forward_rate(params, rf);
      const double l = twostate::lsc_forward_rate(params, rf);
      if (v < l - 1e-12) dominates = false;
      if (rf < 0.5 && l > 0.0) best = std::max(best, v / l);
    }
  }
  c.require(dominates, "VQ >= LSC on every grid point");
  c.require(best >= kGainRatio, fmt("max VQ/LSC below Rf=0.5 is %.3f", best));
  return c;
}

Check criterion4() {
  Check c;
  const TwoStateParams params{0.3, 0.3, 3.0, 0.0};
  const double rf = 0.4;
  const double cap = twostate::vq_forward_rate(params, rf);
  const auto var_scaled = [&](std::int64_t n) {
    const double nd = static_cast<double>(n);
    return (cap - twostate::variable_length_lower_bound(params, rf, n).rate_lower) * nd / std::log2(nd);
  };
  const double ref = var_scaled(1000);
  double spread = 0.0;
  for (std::int64_t n : {10000, 100000, 1000000}) spread = std::max(spread, std::fabs(var_scaled(n) / ref - 1.0));
  c.require(spread <= kScalingBand, fmt("variable gap*N/log2 N spread %.3g", spread));

  const std::int64_t n = 100'000'000;
  const double nq = 0.3 * static_cast<double>(n);
  const auto fixed = twostate::fixed_length_lower_bound(params, rf, n);
  const double norm = (cap - fixed.rate_lower) * std::sqrt(nq / std::log(nq)) / cap;
  const double simp = (cap - fixed.rate_simplified) * std::sqrt(nq / std::log(nq)) / cap;
  c.require(std::fabs(norm / 2.0 - 1.0) <= kFixedBand,
            fmt("fixed gap*sqrt(Nq/ln Nq)/C at N=1e8 is %.4f (simplified form %.4f)", norm, simp));

  const double v500 = twostate::variable_length_lower_bound(params, rf, 500).rate_lower;
  const double f500 = twostate::fixed_length_lower_bound(params, rf, 500).rate_lower;
  c.require(v500 >= f500, fmt("N=500 variable %.4f vs fixed %.4f", v500, f500));
  return c;
}

Check criterion5() {
  Check c;
  const MarkovSource s{0.3 * 0.3 / 0.7, 0.3};
  const double h = twostate::markov_entropy_rate(s);
  const double il = twostate::markov_lb_rate(s, twostate::zero_error_report(s));
  const double iu = twostate::markov_ub_rate(s, {0.0, 0.0});
  c.require(std::fabs(il - h) <= kIdentity && std::fabs(iu - h) <= kIdentity,
            fmt("|i_l - H| %.2g, |i_u - H| %.2g", std::fabs(il - h), std::fabs(iu - h)));
  bool ordered = true, above_iid = true;
  const TwoStateParams iid{0.3, 0.3, 3.0, 0.0};
  for (int i = 0; i <= 45; ++i) {
    const double rf = i * 0.02;
    const auto b = twostate::markov_vq_bounds(s, 0.3, 3.0, 0.0, rf);
    if (b.rate_upper < b.rate_lower - 1e-9) ordered = false;
    if (b.rate_upper < twostate::vq_forward_rate(iid, rf) - 1e-9) above_iid = false;
  }
  c.require(ordered, "upper >= lower on the Rf grid");
  c.require(above_iid, "upper >= i.i.d. VQ");
  double worst = 0.0;
  for (double rf : {h, h + 0.05, 0.9}) {
    const auto b = twostate::markov_vq_bounds(s, 0.3, 3.0, 0.0, rf);
    worst = std::max({worst, std::fabs(b.rate_upper - 0.9), std::fabs(b.rate_lower - 0.9)});
  }
  c.require(worst <= 1e-6, fmt("collapse to zero-error rate within %.2g", worst));
  return c;
}

Check criterion6() {
  Check c;
  const auto one = rayleigh::waterfilling_reference({1, 10.0}, 200000, 5, jobs());
  const double exact = std::exp(0.1) * oracle::e1(0.1) * oracle::kLog2E;
  c.require(std::fabs(one.mean_total - exact) <= 3.0 * one.stderr_total,
            fmt("N=1 %.5f vs %.5f", one.mean_total, exact));
  const auto t0 = Clock::now();
  const auto w20 = rayleigh::waterfilling_reference({500, 100.0}, 100000, 6, jobs());
  const double secs = seconds_since(t0);
  c.require(std::fabs(w20.mean_per_subchannel / 0.385 - 1.0) <= kRefBand,
            fmt("20 dB %.4f bits/sub-channel", w20.mean_per_subchannel));
  c.require(secs < kWaterSeconds, fmt("1e5 blocks in %.1f s", secs));
  const auto w5 = rayleigh::waterfilling_reference({500, std::pow(10.0, 0.5)}, 100000, 7, jobs());
  c.require(std::fabs(w5.mean_total / 14.93 - 1.0) <= kRefBand, fmt("5 dB %.3f bits/use", w5.mean_total));
  return c;
}

Check criterion7() {
  Check c;
  const double u = rayleigh::ustar();
  c.require(u >= 3.91 && u <= 3.93, fmt("u* = %.5f", u));
  double worst = 0.0;
  for (std::int64_t n : {500, 5000, 100000}) {
    for (double snr : {std::pow(10.0, 0.5), 100.0}) {
      const double ln_n = std::log(static_cast<double>(n));
      const double y = std::pow(ln_n, 1.0 - rayleigh::eta1(n, snr) / 2.0);
      const double z = std::pow(ln_n, (1.0 + rayleigh::eta2(n, snr)) / 2.0);
      worst = std::max(worst, std::fabs(y + std::log(y) - (ln_n - std::log(snr / u))));
      worst = std::max(worst, std::fabs(z + 2.0 * std::log(z) - (ln_n - std::log(snr))));
    }
  }
  c.require(worst < kEtaResidual, fmt("max eta residual %.2g", worst));
  const double e1 = rayleigh::eta1(500, std::pow(10.0, 0.5));
  const double e2 = rayleigh::eta2(500, std::pow(10.0, 0.5));
  c.require(std::fabs(e1 - 0.25) <= 0.1 && std::fabs(e2 - 0.25) <= 0.1, fmt("eta1 %.4f, eta2 %.4f", e1, e2));
  return c;
}

Check criterion8() {
  using rayleigh::GroupMode;
  Check c;
  const rayleigh::RayleighSystem s5{500, std::pow(10.0, 0.5)};
  double worst = 0.0;
  for (double b = 20.0; b <= 200.0; b += 10.0) {
    const double num = rayleigh::group_optimize(s5, b, GroupMode::real).total_rate;
    const double asy = rayleigh::group_asymptotic(s5, b).c_star;
    worst = std::max(worst, std::fabs(asy / num - 1.0));
  }
  c.require(worst <= kAsymptoticBand, fmt("asymptotic vs numeric, B in [20,200]: max %.3f", worst));

  double cross = -1.0;
  for (double b = 5.0; b <= 100.0 && cross < 0.0; b += 1.0) {
    if (rayleigh::group_optimize(s5, b, GroupMode::real).m <= 1.0 + 1e-9) cross = b;
  }
  c.require(std::fabs(cross - 40.0) <= 15.0, fmt("m* reaches 1 at B = %.0f", cross));
  const double top = rayleigh::group_optimize(s5, 1000.0, GroupMode::real).total_rate;
  double sat = -1.0;
  for (double b = 50.0; b <= 300.0 && sat < 0.0; b += 1.0) {
    if (rayleigh::group_optimize(s5, b, GroupMode::real).total_rate >= top * (1.0 - 1e-4)) sat = b;
  }
  c.require(std::fabs(sat - 135.0) <= 20.0, fmt("saturation at B = %.0f", sat));

  const rayleigh::RayleighSystem s20{500, 100.0};
  double gain = 0.0, at = 0.0;
  for (double b = 20.0; b <= 300.0; b += 10.0) {
    const double g = rayleigh::group_optimize(s20, b, GroupMode::real).forward_rate /
                         rayleigh::lsc_threshold_rate(s20, b).forward_rate - 1.0;
    if (g > gain) gain = g, at = b;
  }
  c.require(std::fabs(gain - 0.15) <= 0.05, fmt("20 dB peak grouping gain %.3f at B = %.0f", gain, at));
  double apart = 0.0;
  for (double b = 340.0; b <= 450.0; b += 10.0) {
    const double g = rayleigh::group_optimize(s20, b, GroupMode::real).forward_rate;
    const double l = rayleigh::lsc_threshold_rate(s20, b).forward_rate;
    apart = std::max(apart, std::fabs(g / l - 1.0));
  }
  c.require(apart <= kCoincide, fmt("B >= 340 max difference %.4f", apart));
  return c;
}

Check criterion9() {
  Check c;
  const rayleigh::RayleighSystem s{500, 100.0};
  const double bmax = 500.0 * oracle::h2(rayleigh::onoff_optimum(s).q);
  const double best = rayleigh::onoff_optimum(s).forward_rate;
  const bool saturated = std::fabs(rayleigh::lsc_threshold_rate(s, bmax + 1.0).forward_rate - best) <= 1e-6 * best;
  c.require(std::fabs(bmax - 440.0) <= 44.0, fmt("B_max = %.1f bits", bmax));
  c.require(saturated, "LSC rate saturates at B_max");
  return c;
}

// Smallest feedback in [0, hi] reaching `rate` for a nondecreasing curve, to 0.25 bits.
double feedback_for(const std::function<double(double)>& curve, double rate, double hi) {
  if (curve(hi) < rate) return INFINITY;
  double lo = 0.0;
  while (hi - lo > 0.25) {
    const double mid = 0.5 * (lo + hi);
    (curve(mid) >= rate ? hi : lo) = mid;
  }
  return hi;
}

Check criterion10() {
  Check c;
  const rayleigh::RayleighSystem s{500, 100.0};
  double worst = 0.0;
  for (double b = 100.0; b <= 400.0; b += 25.0) {
    const auto v = rayleigh::vq_optimize(s, b / 500.0);
    const double lower =
        twostate::variable_length_lower_bound({v.q, v.p, v.c1, v.c0}, b / 500.0, 500).rate_lower;
    worst = std::max(worst, 1.0 - lower / v.forward_rate);
  }
  c.require(worst <= kBracket, fmt("max relative bracket width %.4f", worst));

  const auto vq = [&](double b) { return rayleigh::vq_optimize(s, b / 500.0).forward_rate; };
  const auto lsc = [&](double b) { return rayleigh::lsc_threshold_rate(s, b).forward_rate; };
  double saved = 0.0, at = 0.0;
  for (double r = 0.25; r <= 0.34 + 1e-9; r += 0.01) {
    const double d = feedback_for(lsc, r, 500.0) - feedback_for(vq, r, 500.0);
    if (d > saved) saved = d, at = r;
  }
  c.require(saved >= kSavedBits, fmt("VQ saves %.0f bits at rate %.2f", saved, at));
  return c;
}

Check criterion11() {
  Check c;
  bool converse = true;
  const auto record = [&](const simkit::SimReport& r, double q, double p) {
    if (r.mean_distortion < twostate::distortion_rate(q, p, r.feedback_rate) - 3.0 * r.stderr_distortion) {
      converse = false;
    }
  };
  const TwoStateParams fixed{0.3, 0.25, 3.0, 0.0};
  record(simkit::simulate_fixed(fixed, 16, 256, 100000, 1, {.jobs = jobs()}), 0.3, 0.25);
  for (std::int64_t m : {2, 16, 128}) {
    record(simkit::simulate_fixed(fixed, 12, m, 20000, 2, {.jobs = jobs()}), 0.3, 0.25);
  }
  const TwoStateParams var{0.3, 0.3, 3.0, 0.0};
  const twostate::CrossoverPair eps{0.25, 3.0 / 28.0};
  const auto v = simkit::simulate_variable(var, eps, 12, 20000, 3, {.jobs = jobs()});
  record(v, 0.3, 0.3);
  const auto best = simkit::exhaustive_codebook_oracle(6, 2, 2, 0.3);
  const double d = static_cast<double>(best.distortion);
  if (d < twostate::distortion_rate(0.3, 2.0 / 6.0, 1.0 / 6.0)) converse = false;
  c.require(converse, "distortion >= D(R) - 3 sigma in every run");

  bool beats = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto book = simkit::build_fixed_codebook(6, 2, 2, 50 + seed);
    if (d > static_cast<double>(simkit::expected_distortion(book, 0.3)) + 1e-15) beats = false;
  }
  c.require(beats, fmt("oracle n=6 M=2 distortion %.5f beats 10 random codebooks", d));

  const double bound = simkit::variable_rate_bound(var, eps, 12);
  c.require(v.mean_feedback_bits <= bound + 3.0 * v.stderr_feedback_bits,
            fmt("variable feedback %.3f bits vs bound %.3f", v.mean_feedback_bits, bound));

  const auto full = simkit::simulate_fixed({0.5, 0.5, 3.0, 0.0}, simkit::full_type_class(4, 2), 100000, 4,
                                           {.jobs = jobs()});
  c.require(std::fabs(full.mean_distortion - 0.09375) <= 3.0 * full.stderr_distortion,
            fmt("full class n=4 distortion %.5f", full.mean_distortion));
  return c;
}

}  // namespace

int main() {
  const std::vector<std::function<Check()>> criteria = {
      criterion1, criterion2, criterion3, criterion4, criterion5, criterion6,
      criterion7, criterion8, criterion9, criterion10, criterion11};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Check c;
    try {
      c = criteria[i]();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %2zu: %s (%.1f s) %s\n", i + 1, c.ok ? "PASS" : "FAIL", seconds_since(t0),
                c.detail.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
