#pragma once

// Threshold feedback schemes for N Rayleigh sub-channels with total SNR P.
//
// A sub-channel is good when its gain exceeds t, so q = e^{-t}. Forward rates
// are bits per sub-channel per use unless a name says "total"; feedback is
// per sub-channel (rf) or per block (b = n rf).

#include <cstdint>
#include <span>

#include "csflab/twostate.hpp"

namespace csflab::rayleigh {

struct RayleighSystem {
  std::int64_t n;
  double snr;          // linear total SNR P
  double alpha = 0.0;  // correlation between neighbouring sub-channels

  void validate() const;
};

struct Capacities {
  double c1;  // bits per use on a good sub-channel
  double c0;  // bits per use on a bad sub-channel
};

struct ThresholdPolicy {
  double t = 0.0;
  double q = 1.0;
  double p = 1.0;
  twostate::CrossoverPair eps{};
  double c1 = 0.0;
  double c0 = 0.0;
  double forward_rate = 0.0;   // bits / sub-channel / use
  double feedback_rate = 0.0;  // bits / sub-channel / block
  bool on_boundary = false;
};

Capacities good_bad_capacities(const RayleighSystem& sys, double p, double t);

/// Equal power over every sub-channel: tail(0, P/N) log2 e per sub-channel.
double spread_rate(const RayleighSystem& sys);

/// On-off loading over the sub-channels above t, per sub-channel.
double onoff_rate(const RayleighSystem& sys, double t);

/// Largest two-state forward rate over (p, t) with the crossover pair from
/// the binary rate-distortion solver.
ThresholdPolicy vq_optimize(const RayleighSystem& sys, double rf);

/// Lossless coding of the thresholded state vector, n H2(q) <= b.
ThresholdPolicy lsc_threshold_rate(const RayleighSystem& sys, double b);

/// Threshold maximizing onoff_rate with no feedback limit.
ThresholdPolicy onoff_optimum(const RayleighSystem& sys);

/// Total bits per use when groups of m sub-channels are activated together.
double group_rate(const RayleighSystem& sys, double m, double t);

enum class GroupMode {
  real,     // continuous m
  integer,  // better of floor/ceil of the real optimum
  divisor,  // better of the nearest divisors of n below and above
};

struct GroupPolicy {
  double m = 1.0;
  double t = 0.0;
  double groups = 0.0;        // n / m
  double total_rate = 0.0;    // bits / use
  double forward_rate = 0.0;  // bits / sub-channel / use
  double feedback_bits = 0.0; // (n/m) H2(e^{-mt})
  bool constrained = false;   // feedback constraint active
  bool on_boundary = false;   // m at 1 or n
};

/// Optimal threshold for a fixed group size.
GroupPolicy group_best_threshold(const RayleighSystem& sys, double m, double b);

GroupPolicy group_optimize(const RayleighSystem& sys, double b, GroupMode mode = GroupMode::integer);

enum class Regime { low, mid, saturated };

struct AsymptoticRegime {
  Regime regime = Regime::low;
  double b1 = 0.0;
  double bmax = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  double ustar = 0.0;
};

struct GroupAsymptotic {
  AsymptoticRegime regime;
  double t_star = 0.0;
  double m_star = 0.0;
  double c_star = 0.0;     // total bits / use: group_rate at (max(m*,1), t*)
  double c_leading = 0.0;  // total bits / use: leading-order closed form
};

/// Positive root of (1+u) ln(1+u) = 2u.
double ustar();

/// eta1 with y + ln y = ln N - ln(P/u*), y = (ln N)^{1 - eta1/2}.
double eta1(std::int64_t n, double snr);

/// eta2 with z + 2 ln z = ln N - ln P, z = (ln N)^{(1 + eta2)/2}.
double eta2(std::int64_t n, double snr);

AsymptoticRegime asymptotic_regime(const RayleighSystem& sys, double b);

GroupAsymptotic group_asymptotic(const RayleighSystem& sys, double b);

/// First-order Markov approximation of the thresholded AR(1) gain sequence.
twostate::MarkovSource ar1_transition(double alpha, double t);

/// P(|H_i|^2 > t, |H_{i+1}|^2 > t) by two-dimensional quadrature of the
/// bivariate density.
double ar1_joint_tail_quadrature(double alpha, double t);

/// Same probability from the Poisson-mixture series.
double ar1_joint_tail_series(double alpha, double t);

/// Achievable rate for correlated sub-channels: the i.i.d. optimization with
/// the feedback constraint i_u(eps0, eps1) <= rf.
ThresholdPolicy ar1_achievable_rate(const RayleighSystem& sys, double rf);

/// Lossless coding under the first-order Markov entropy n H(S1|S0) <= b.
ThresholdPolicy lsc_markov_rate(const RayleighSystem& sys, double b);

struct WaterfillReport {
  double mean_total = 0.0;       // bits / use
  double stderr_total = 0.0;
  double mean_per_subchannel = 0.0;
  double stderr_per_subchannel = 0.0;
  std::int64_t samples = 0;
};

/// Water-filling sum rate averaged over i.i.d. unit-mean exponential gains.
/// Samples are split into fixed partitions seeded from (seed, partition), so
/// the result does not depend on jobs.
WaterfillReport waterfilling_reference(const RayleighSystem& sys, std::int64_t samples,
                                       std::uint64_t seed, int jobs = 1);

/// Water level mu solving sum (mu - 1/g_i)^+ = P by bisection.
double water_level(std::span<const double> gains, double power);

}  // namespace csflab::rayleigh
