#pragma once

// Two-state (good/bad) sub-channel analysis: the rate-distortion optimizer for
// binary feedback, the lossless-coding comparison scheme, finite-N bounds and
// bounds for a first-order Markov state sequence.
//
// Rates of feedback are bits per sub-channel per block; forward rates are bits
// per sub-channel per channel use.

#include <cstdint>

#include "csflab/mathkit.hpp"

namespace csflab::twostate {

struct TwoStateParams {
  double q;   // P(sub-channel good)
  double p;   // activation fraction
  double c1;  // good sub-channel capacity
  double c0;  // bad sub-channel capacity

  void validate() const;
};

/// eps0 = P(reported bad | good), eps1 = P(reported good | bad).
struct CrossoverPair {
  double eps0;
  double eps1;
};

struct MarkovSource {
  double delta01;  // bad -> good
  double delta10;  // good -> bad

  double q() const { return delta01 / (delta01 + delta10); }
  void validate() const;
};

/// q_{s0 s1} = P(reported bad, S0 = s0, S1 = s1).
struct JointReportProbs {
  double q00;
  double q01;
  double q10;
  double q11;
};

enum class Scheme { fixed, variable };

struct FiniteNBound {
  std::int64_t n = 0;
  double rate_lower = 0.0;
  Scheme scheme = Scheme::fixed;
  double rate_asymptotic = 0.0;  // C at the same (params, rf)
  double rate_simplified = 0.0;  // fixed only: (1 - 2 sqrt(ln(nq)/(nq))) C, clamped at 0
  double feedback_overhead = 0.0;  // fixed only: extra bits per sub-channel of the covering codebook
  CrossoverPair eps{};
};

/// H2(p) - q H2(eps0) - (1-q) H2(eps1) with p = q(1-eps0) + (1-q) eps1, clamped at 0.
double mutual_info_rate(double q, CrossoverPair eps);

/// Feedback rate beyond which the forward rate no longer grows.
double max_useful_feedback(double q, double p);

/// Crossover pair maximizing the forward rate under mutual_info_rate <= rf and
/// the weight constraint q(1-eps0) + (1-q) eps1 = p.
CrossoverPair solve_crossover(const TwoStateParams& params, double rf,
                              const mathkit::Tolerance& tol = {.abs = 1e-14, .rel = 1e-13});

/// q(1-eps0)(c1-c0) + p c0.
double forward_rate(const TwoStateParams& params, CrossoverPair eps);

double vq_forward_rate(const TwoStateParams& params, double rf);

/// Missed-opportunity fraction q eps0* at feedback rate rf: the distortion-rate function.
double distortion_rate(double q, double p, double rf);

/// Lossless coding of a reported subset of good (or bad) sub-channels.
double lsc_forward_rate(const TwoStateParams& params, double rf);

FiniteNBound fixed_length_lower_bound(const TwoStateParams& params, double rf, std::int64_t n);
FiniteNBound variable_length_lower_bound(const TwoStateParams& params, double rf,
                                         std::int64_t n);

/// H(S1|S0) = q H2(delta10) + (1-q) H2(delta01).
double markov_entropy_rate(const MarkovSource& src);

/// Report probabilities of error-free feedback.
JointReportProbs zero_error_report(const MarkovSource& src);

/// I(S1; Ŝ1 | S0) in terms of the joint report probabilities.
double markov_lb_rate(const MarkovSource& src, const JointReportProbs& jp);

/// I(S1; S2, Ŝ1 | S0) when Ŝ1 depends on S1 alone through eps.
double markov_ub_rate(const MarkovSource& src, CrossoverPair eps);

struct MarkovLower {
  CrossoverPair eps{};
  bool feasible = true;  // false when i_u > rf everywhere on the weight line
};

/// Smallest eps0 on the weight line q(1-eps0) + (1-q) eps1 = p with
/// markov_ub_rate <= rf. When infeasible, eps is the independent pair (1-p, p).
MarkovLower markov_lower_crossover(const MarkovSource& src, double p, double rf);

struct MarkovBounds {
  double rate_upper = 0.0;
  double rate_lower = 0.0;
  bool upper_on_boundary = false;
  bool lower_feasible = true;  // false when only the zero-feedback rate is reachable
  CrossoverPair lower_eps{};
  double upper_p0 = 0.0;  // activation fraction among sub-channels with a bad predecessor
  double upper_r0 = 0.0;  // feedback rate spent on those sub-channels
};

MarkovBounds markov_vq_bounds(const MarkovSource& src, double p, double c1, double c0, double rf);

}  // namespace csflab::twostate
