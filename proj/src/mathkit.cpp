#include "csflab/mathkit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "csflab/errors.hpp"

namespace csflab::mathkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_value(const char* name, double v) {
  std::ostringstream os;
  os << name << " = " << v;
  return os.str();
}

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

// Kronrod 15-point abscissae / weights and the embedded 7-point Gauss weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Gk15 {
  double value;
  double error;
};

Gk15 gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  return {resk * half, std::abs((resk - resg) * half)};
}

void integrate_rec(const std::function<double(double)>& f, double a, double b, double whole,
                   double err, double abs_tol, int depth, QuadResult& out) {
  if (err <= abs_tol || depth <= 0 || (b - a) <= 1e-15 * std::max(1.0, std::abs(a))) {
    out.value += whole;
    out.error += err;
    if (err > abs_tol && depth <= 0) out.converged = false;
    return;
  }
  const double mid = 0.5 * (a + b);
  const Gk15 left = gk15(f, a, mid);
  const Gk15 right = gk15(f, mid, b);
  out.evaluations += 30;
  integrate_rec(f, a, mid, left.value, left.error, 0.5 * abs_tol, depth - 1, out);
  integrate_rec(f, mid, b, right.value, right.error, 0.5 * abs_tol, depth - 1, out);
}

}  // namespace

void Tolerance::validate() const {
  if (!(abs > 0.0) || !(rel > 0.0) || max_iter < 1) {
    throw DomainError("Tolerance requires abs > 0, rel > 0, max_iter >= 1");
  }
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(fmt_value("binary_entropy: x outside [0,1], x", x));
  return -xlog2x(x) - xlog2x(1.0 - x);
}

double binary_entropy_derivative(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(fmt_value("binary_entropy_derivative: x outside [0,1], x", x));
  }
  if (x == 0.0) return kInf;
  if (x == 1.0) return -kInf;
  return std::log2((1.0 - x) / x);
}

double inv_binary_entropy(double y, Branch branch) {
  if (!(y >= 0.0 && y <= 1.0)) throw DomainError(fmt_value("inv_binary_entropy: y outside [0,1], y", y));
  if (y == 1.0) return 0.5;
  if (y == 0.0) return branch == Branch::lower ? 0.0 : 1.0;
  // H2 is strictly increasing on [0, 1/2]; plain bisection to machine precision.
  double lo = 0.0;
  double hi = 0.5;
  for (int i = 0; i < 200 && hi - lo > 1e-17; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (binary_entropy(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x = 0.5 * (lo + hi);
  return branch == Branch::lower ? x : 1.0 - x;
}

double expint_e1(double x) {
  if (!(x > 0.0)) throw DomainError(fmt_value("expint_e1: requires x > 0, x", x));
  if (x <= 1.0) {
    // E1(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k k!)
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k < 100; ++k) {
      term *= -x / k;
      const double add = term / k;
      sum += add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return -kEulerGamma - std::log(x) - sum;
  }
  if (x > 745.0) return 0.0;
  return std::exp(-x) * expint_e1_scaled(x);
}

double expint_e1_scaled(double x) {
  if (!(x > 0.0)) throw DomainError(fmt_value("expint_e1_scaled: requires x > 0, x", x));
  if (x <= 1.0) return std::exp(x) * expint_e1(x);
  // Modified Lentz evaluation of the continued fraction for e^x E1(x).
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return h;
  }
  throw ConvergenceError(fmt_value("expint_e1_scaled: continued fraction did not converge, x", x));
}

double tail_log_integral(double t, double a) {
  if (!(t >= 0.0)) throw DomainError(fmt_value("tail_log_integral: requires t >= 0, t", t));
  if (!(a > 0.0)) throw DomainError(fmt_value("tail_log_integral: requires a > 0, a", a));
  if (t > 745.0) return 0.0;
  const double x = t + 1.0 / a;
  return std::exp(-t) * (std::log1p(a * t) + expint_e1_scaled(x));
}

double head_log_integral(double t, double a) {
  if (!(t >= 0.0)) throw DomainError(fmt_value("head_log_integral: requires t >= 0, t", t));
  if (!(a > 0.0)) throw DomainError(fmt_value("head_log_integral: requires a > 0, a", a));
  if (t == 0.0) return 0.0;
  if (t > 2.0) return tail_log_integral(0.0, a) - tail_log_integral(t, a);
  const auto integrand = [a](double tau) { return std::exp(-tau) * std::log1p(a * tau); };
  return integrate(integrand, 0.0, t, 1e-16, 1e-14).value;
}

double bessel_i0(double x) {
  if (!(x >= 0.0)) throw DomainError(fmt_value("bessel_i0: requires x >= 0, x", x));
  if (x <= 15.0) {
    const double y = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= y / (static_cast<double>(k) * k);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return sum;
  }
  if (x > 700.0) return kInf;
  return std::exp(x) * bessel_i0_scaled(x);
}

double bessel_i0_scaled(double x) {
  if (!(x >= 0.0)) throw DomainError(fmt_value("bessel_i0_scaled: requires x >= 0, x", x));
  if (x <= 15.0) return std::exp(-x) * bessel_i0(x);
  // e^{-x} I0(x) ~ (2πx)^{-1/2} Σ_k ((2k-1)!!)^2 / (k! (8x)^k)
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
    if (next > term) break;
    term = next;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

double find_root(const std::function<double(double)>& f, double lo, double hi, const Tolerance& tol) {
  tol.validate();
  double a = lo;
  double b = hi;
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (!std::isfinite(fa) || !std::isfinite(fb) || (fa > 0.0) == (fb > 0.0)) {
    std::ostringstream os;
    os << "find_root: f(lo) and f(hi) do not bracket a root (f(" << lo << ") = " << fa << ", f("
       << hi << ") = " << fb << ")";
    throw BracketError(os.str());
  }
  double c = b;
  double fc = fb;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < tol.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                        0.5 * std::max(tol.abs, tol.rel * std::abs(b));
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p;
      double q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw ConvergenceError("find_root: no convergence within max_iter iterations");
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                     double rel_tol, int max_depth) {
  QuadResult out;
  if (a == b) return out;
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  const Gk15 whole = gk15(f, a, b);
  out.evaluations = 15;
  const double tol = std::max(abs_tol, rel_tol * std::abs(whole.value));
  integrate_rec(f, a, b, whole.value, whole.error, tol, max_depth, out);
  out.value *= sign;
  return out;
}

LineMax golden_section_max(const std::function<double(double)>& f, double lo, double hi, double x_tol,
                           int max_iter) {
  const auto eval = [&f](double x) {
    const double v = f(x);
    return std::isfinite(v) ? v : -kInf;
  };
  LineMax best{lo, eval(lo)};
  if (hi <= lo) return best;
  const double f_hi = eval(hi);
  if (f_hi > best.value) best = {hi, f_hi};

  constexpr double inv_phi = 0.6180339887498948482;
  double a = lo;
  double b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  for (int i = 0; i < max_iter && (b - a) > x_tol; ++i) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = eval(x2);
    }
  }
  if (f1 > best.value) best = {x1, f1};
  if (f2 > best.value) best = {x2, f2};
  return best;
}

bool MaximizeResult::boundary() const {
  return std::any_of(on_boundary.begin(), on_boundary.end(), [](bool b) { return b; });
}

MaximizeResult maximize_box(const std::function<double(std::span<const double>)>& f,
                            std::span<const Interval> bounds, const Tolerance& cfg,
                            const MaximizeOptions& opt) {
  cfg.validate();
  const std::size_t k = bounds.size();
  if (k < 1 || k > 4) throw DomainError("maximize_box: dimension must be between 1 and 4");
  if (opt.grid_points < 2) throw DomainError("maximize_box: grid_points must be >= 2");
  for (const auto& iv : bounds) {
    if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      throw DomainError("maximize_box: every interval needs finite lo <= hi");
    }
  }

  MaximizeResult result;
  const auto eval = [&](std::span<const double> x) {
    ++result.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : -kInf;
  };

  const int g = opt.grid_points;
  long total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= g;

  struct Start {
    std::vector<double> x;
    double value;
  };
  std::vector<Start> starts;
  const std::size_t keep = static_cast<std::size_t>(std::max(1, opt.starts));
  std::vector<double> x(k);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (std::size_t i = 0; i < k; ++i) {
      const int j = static_cast<int>(rem % g);
      rem /= g;
      x[i] = bounds[i].lo + (bounds[i].hi - bounds[i].lo) * j / (g - 1);
    }
    const double v = eval(x);
    if (starts.size() < keep || v > starts.back().value) {
      starts.push_back({x, v});
      std::stable_sort(starts.begin(), starts.end(),
                       [](const Start& l, const Start& r) { return l.value > r.value; });
      if (starts.size() > keep) starts.pop_back();
    }
  }
  std::mt19937_64 rng(opt.seed);
  for (int r = 0; r < opt.random_starts; ++r) {
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_real_distribution<double> u(bounds[i].lo, bounds[i].hi);
      x[i] = u(rng);
    }
    starts.push_back({x, eval(x)});
  }

  std::vector<double> width(k);
  for (std::size_t i = 0; i < k; ++i) width[i] = bounds[i].hi - bounds[i].lo;
  constexpr double kRelStepTol = 1e-9;

  Start best{starts.front().x, starts.front().value};
  for (auto& s : starts) {
    std::vector<double> pt = s.x;
    double v = s.value;
    std::vector<double> step(k);
    for (std::size_t i = 0; i < k; ++i) step[i] = width[i] / (g - 1);
    for (int sweep = 0; sweep < cfg.max_iter; ++sweep) {
      const double before = v;
      std::vector<bool> hit_edge(k, false);
      for (std::size_t i = 0; i < k; ++i) {
        if (width[i] == 0.0) continue;
        const double a = std::max(bounds[i].lo, pt[i] - step[i]);
        const double b = std::min(bounds[i].hi, pt[i] + step[i]);
        std::vector<double> probe = pt;
        const auto line = [&](double xi) {
          probe[i] = xi;
          return eval(probe);
        };
        const double x_tol = std::max(cfg.abs, kRelStepTol * width[i]);
        const LineMax lm = golden_section_max(line, a, b, x_tol);
        if (lm.value > v) {
          pt[i] = lm.x;
          v = lm.value;
        }
        const bool at_a = std::abs(lm.x - a) <= x_tol && a > bounds[i].lo;
        const bool at_b = std::abs(lm.x - b) <= x_tol && b < bounds[i].hi;
        hit_edge[i] = at_a || at_b;
      }
      const double gain = v - before;
      bool small_steps = true;
      for (std::size_t i = 0; i < k; ++i) {
        if (hit_edge[i]) {
          step[i] = std::min(2.0 * step[i], width[i]);
        } else {
          step[i] *= 0.5;
        }
        if (step[i] > std::max(cfg.abs, kRelStepTol * width[i])) small_steps = false;
      }
      if (small_steps && gain <= cfg.rel * std::max(1.0, std::abs(v))) break;
    }
    if (v > best.value) best = {pt, v};
  }

  result.point = best.x;
  result.value = best.value;
  result.on_boundary.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double eps = 1e-9 * std::max(width[i], 1.0);
    result.on_boundary[i] = width[i] > 0.0 && (std::abs(best.x[i] - bounds[i].lo) <= eps ||
                                               std::abs(best.x[i] - bounds[i].hi) <= eps);
  }
  return result;
}

}  // namespace csflab::mathkit
