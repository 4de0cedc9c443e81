#pragma once

// Monte Carlo runs of the random feedback-code constructions at small N and
// an exhaustive search over tiny codebooks.
//
// A state or codeword of length n <= 64 is a bit mask; bit i is sub-channel i.
// Distortion is the fraction of sub-channels that are good but left inactive.

#include <cstdint>
#include <variant>
#include <vector>

#include "csflab/twostate.hpp"

namespace csflab::simkit {

struct IidModel {
  double q;
};
struct MarkovModel {
  double delta01;
  double delta10;
};
struct RayleighIidModel {
  double t;
};
struct RayleighAr1Model {
  double alpha;
  double t;
};
using SourceModel = std::variant<IidModel, MarkovModel, RayleighIidModel, RayleighAr1Model>;

struct StateVector {
  std::vector<std::uint8_t> bits;
  std::int64_t weight = 0;
};

StateVector gen_states(const SourceModel& model, std::int64_t n, std::uint64_t seed);

struct Codebook {
  int n = 0;
  int composition = 0;
  std::vector<std::uint64_t> words;
};

/// m_words uniform draws with replacement from the weight-`active` words of
/// length n. With dedup, draws repeat until m_words distinct words are held.
Codebook build_fixed_codebook(int n, int active, std::int64_t m_words, std::uint64_t seed,
                              bool dedup = false);

/// Every weight-`active` word of length n in lexicographic order of masks.
Codebook full_type_class(int n, int active);

/// Index of the word with the fewest missed good sub-channels; lowest index on ties.
std::size_t encode_fixed(const Codebook& book, std::uint64_t state);

struct SimReport {
  std::int64_t trials = 0;
  double mean_distortion = 0.0;
  double stderr_distortion = 0.0;
  double mean_feedback_bits = 0.0;  // bits per block
  double stderr_feedback_bits = 0.0;
  double mean_forward_rate = 0.0;   // bits per sub-channel per use
  double stderr_forward_rate = 0.0;
  double feedback_rate = 0.0;       // mean_feedback_bits / n

  bool operator==(const SimReport&) const = default;
};

struct SimOptions {
  int jobs = 1;
  double scan_budget = 1e11;  // codeword comparisons (fixed) or candidate draws (variable)
};

/// Fixed-length code with a random constant-composition codebook of weight
/// round(p n). States are i.i.d. Bernoulli(q).
SimReport simulate_fixed(const twostate::TwoStateParams& params, int n, std::int64_t m_words,
                         std::int64_t trials, std::uint64_t seed, const SimOptions& opt = {});

SimReport simulate_fixed(const twostate::TwoStateParams& params, const Codebook& book,
                         std::int64_t trials, std::uint64_t seed, const SimOptions& opt = {});

/// Target miss and misfire counts for a state of weight k: miss = round(eps0 k),
/// misfire chosen so that the active count equals round(p n) where possible.
struct Composition {
  int miss;
  int misfire;
};
Composition target_composition(const twostate::TwoStateParams& params,
                               twostate::CrossoverPair eps, int n, int k);

/// Variable-length code: Bernoulli(p) candidates are drawn from a stream both
/// ends seed identically until one has the target composition; the index of
/// that candidate plus a log2(n+1) header is the feedback.
SimReport simulate_variable(const twostate::TwoStateParams& params, twostate::CrossoverPair eps,
                            int n, std::int64_t trials, std::uint64_t seed,
                            const SimOptions& opt = {});

/// Right side of the variable-length rate bound, in bits per block, evaluated
/// with exact admissibility probabilities.
double variable_rate_bound(const twostate::TwoStateParams& params, twostate::CrossoverPair eps,
                           int n);

/// Probability that a uniform weight-`active` word covers a state of weight
/// k with exactly `miss` missed and `misfire` misfired sub-channels.
double coverage_probability(int n, int k, int miss, int misfire);

/// Expected distortion of a codebook under i.i.d. Bernoulli(q) states.
long double expected_distortion(const Codebook& book, double q);

struct OracleResult {
  long double distortion = 0.0L;
  Codebook best;
  bool exact = true;
  std::int64_t codebooks_checked = 0;
};

struct OracleOptions {
  double budget = 1e9;          // codebooks x states
  bool allow_greedy = false;    // fall back to greedy search instead of throwing
};

/// Minimum expected distortion over all codebooks of m_words distinct
/// weight-`active` words.
OracleResult exhaustive_codebook_oracle(int n, int active, int m_words, double q,
                                        const OracleOptions& opt = {});

}  // namespace csflab::simkit
