#pragma once

// Special functions and small numeric solvers shared by the analysis modules.
//
// Entropies are in bits. The log-integrals are in nats; callers convert with
// kLog2E when they need bits.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace csflab::mathkit {

inline constexpr double kLog2E = 1.4426950408889634074;
inline constexpr double kEulerGamma = 0.57721566490153286061;

struct Tolerance {
  double abs = 1e-12;
  double rel = 1e-10;
  int max_iter = 200;

  void validate() const;
};

/// H2(x) = -x log2 x - (1-x) log2(1-x), with 0 log 0 = 0.
double binary_entropy(double x);

/// dH2/dx = log2((1-x)/x). Infinite at the end points.
double binary_entropy_derivative(double x);

enum class Branch { lower, upper };

/// Solves binary_entropy(x) = y on [0, 1/2] (lower) or [1/2, 1] (upper).
double inv_binary_entropy(double y, Branch branch = Branch::lower);

/// Exponential integral E1(x) for x > 0.
double expint_e1(double x);

/// e^x E1(x), finite for every x > 0.
double expint_e1_scaled(double x);

/// ∫_t^∞ e^{-τ} ln(1 + aτ) dτ in closed form, e^{-t}[ln(1+at) + e^{x}E1(x)] with x = t + 1/a.
double tail_log_integral(double t, double a);

/// ∫_0^t e^{-τ} ln(1 + aτ) dτ. Direct quadrature for t <= 2, where the
/// difference of two tails would cancel.
double head_log_integral(double t, double a);

/// Modified Bessel function of the first kind, order zero.
double bessel_i0(double x);

/// e^{-x} I0(x); stays finite for large x.
double bessel_i0_scaled(double x);

/// Brent's method (bisection with secant / inverse quadratic steps).
/// Throws BracketError when f(lo) and f(hi) have the same strict sign.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 const Tolerance& tol = {});

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-12, double rel_tol = 1e-10, int max_depth = 40);

struct LineMax {
  double x;
  double value;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
/// Non-finite values are treated as -inf.
LineMax golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                           double x_tol = 1e-10, int max_iter = 200);

struct Interval {
  double lo;
  double hi;
};

struct MaximizeOptions {
  int grid_points = 32;   // per axis, end points included
  int starts = 3;         // best grid points refined by coordinate descent
  int random_starts = 0;  // extra uniformly drawn starts
  std::uint64_t seed = 0;
};

struct MaximizeResult {
  std::vector<double> point;
  double value = 0.0;
  std::vector<bool> on_boundary;
  long evaluations = 0;

  bool boundary() const;
};

/// Maximizes f over a box of at most four dimensions: a coarse grid, then
/// coordinate descent with golden-section line searches from the best grid
/// points until the improvement per sweep drops below cfg.rel.
MaximizeResult maximize_box(const std::function<double(std::span<const double>)>& f,
                            std::span<const Interval> bounds, const Tolerance& cfg = {},
                            const MaximizeOptions& opt = {});

}  // namespace csflab::mathkit
