#include <cmath>
#include <limits>
#include <sstream>

#include "csflab/errors.hpp"
#include "csflab/rayleigh.hpp"
#include "csflab/simkit.hpp"
#include "csflab/twostate.hpp"
#include "internal.hpp"

namespace csflab::cli::detail {

namespace {

using twostate::TwoStateParams;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::string kRate = "bits/sub-channel/use";
const std::string kRateTotal = "bits/use";
const std::string kFeedback = "bits/sub-channel/block";
const std::string kFeedbackBlock = "bits/block";
const std::string kOne = "1";

// Finite-N bounds reject crossover pairs outside (0, 1/2); such points are nan.
template <class F>
double or_nan(const F& f) {
  try {
    return f();
  } catch (const PreconditionError&) {
    return kNaN;
  }
}

std::string label(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

TwoStateParams two_state(const Params& ps, double q, double p, double c1, double c0) {
  TwoStateParams params{ps.number_or("q", q), p, ps.number_or("c1", c1), ps.number_or("c0", c0)};
  params.validate();
  return params;
}

rayleigh::RayleighSystem rayleigh_system(const Params& ps, std::int64_t n, double db,
                                         double alpha = 0.0) {
  rayleigh::RayleighSystem sys{ps.integer_or("n", n), ps.snr(db), ps.number_or("alpha", alpha)};
  sys.validate();
  return sys;
}

double regime_code(rayleigh::Regime r) {
  switch (r) {
    case rayleigh::Regime::low: return 0.0;
    case rayleigh::Regime::mid: return 1.0;
    case rayleigh::Regime::saturated: return 2.0;
  }
  return kNaN;
}

rayleigh::GroupMode group_mode(const Params& ps, const std::string& fallback) {
  const std::string mode = ps.has("mode") ? ps.text("mode") : fallback;
  if (mode == "real") return rayleigh::GroupMode::real;
  if (mode == "integer") return rayleigh::GroupMode::integer;
  if (mode == "divisor") return rayleigh::GroupMode::divisor;
  throw ConfigError("mode: expected real, integer or divisor, got '" + mode + "'");
}

// ---- two-state curves ----------------------------------------------------

struct VqPoint {
  double rate, eps0, eps1, lsc, variable, fixed;
};

std::vector<VqPoint> two_state_points(const TwoStateParams& params, const std::vector<double>& rf,
                                      std::int64_t n, int jobs) {
  return parallel_map<VqPoint>(rf.size(), jobs, [&](std::size_t i) {
    const auto eps = twostate::solve_crossover(params, rf[i]);
    VqPoint pt{};
    pt.rate = twostate::forward_rate(params, eps);
    pt.eps0 = eps.eps0;
    pt.eps1 = eps.eps1;
    pt.lsc = twostate::lsc_forward_rate(params, rf[i]);
    pt.variable = or_nan([&] { return twostate::variable_length_lower_bound(params, rf[i], n).rate_lower; });
    pt.fixed = or_nan([&] { return twostate::fixed_length_lower_bound(params, rf[i], n).rate_lower; });
    return pt;
  });
}

std::vector<TradeoffCurve> twostate_sweep(const Context& ctx) {
  const auto& ps = ctx.params;
  const auto params = two_state(ps, 0.3, ps.number("p"), 3.0, 0.0);
  const auto rf = ps.grid("rf");
  const auto n = ps.integer("n");
  const auto pts = two_state_points(params, rf, n, ctx.jobs);

  TradeoffCurve vq{"twostate_sweep_vq",
                   {{"rf", kFeedback}, {"rate", kRate}, {"eps0", kOne}, {"eps1", kOne},
                    {"missed", kOne}, {"misfire", kOne}},
                   {}};
  TradeoffCurve lsc{"twostate_sweep_lsc", {{"rf", kFeedback}, {"rate", kRate}}, {}};
  TradeoffCurve bounds{"twostate_sweep_bounds",
                       {{"rf", kFeedback}, {"variable", kRate}, {"fixed", kRate}}, {}};
  for (std::size_t i = 0; i < rf.size(); ++i) {
    const auto& p = pts[i];
    vq.rows.push_back({rf[i], p.rate, p.eps0, p.eps1, params.q * p.eps0, (1.0 - params.q) * p.eps1});
    lsc.rows.push_back({rf[i], p.lsc});
    bounds.rows.push_back({rf[i], p.variable, p.fixed});
  }
  return {vq, lsc, bounds};
}

struct MarkovPoint {
  double upper, lower, iid, feasible;
};

std::vector<MarkovPoint> markov_points(const twostate::MarkovSource& src, double p, double c1,
                                       double c0, const std::vector<double>& rf, int jobs) {
  const TwoStateParams iid{src.q(), p, c1, c0};
  iid.validate();
  return parallel_map<MarkovPoint>(rf.size(), jobs, [&](std::size_t i) {
    const auto b = twostate::markov_vq_bounds(src, p, c1, c0, rf[i]);
    return MarkovPoint{b.rate_upper, b.rate_lower, twostate::vq_forward_rate(iid, rf[i]),
                       b.lower_feasible ? 1.0 : 0.0};
  });
}

twostate::MarkovSource markov_source(double q, double delta10) {
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("q must lie in (0, 1)");
  const twostate::MarkovSource src{q * delta10 / (1.0 - q), delta10};
  src.validate();
  return src;
}

void markov_curves(std::vector<TradeoffCurve>& out, const std::string& prefix,
                   const std::vector<double>& rf, const std::vector<MarkovPoint>& pts) {
  TradeoffCurve up{prefix + "_upper", {{"rf", kFeedback}, {"rate", kRate}}, {}};
  TradeoffCurve lo{prefix + "_lower", {{"rf", kFeedback}, {"rate", kRate}, {"feasible", kOne}}, {}};
  TradeoffCurve iid{prefix + "_iid", {{"rf", kFeedback}, {"rate", kRate}}, {}};
  for (std::size_t i = 0; i < rf.size(); ++i) {
    up.rows.push_back({rf[i], pts[i].upper});
    lo.rows.push_back({rf[i], pts[i].lower, pts[i].feasible});
    iid.rows.push_back({rf[i], pts[i].iid});
  }
  out.push_back(up);
  out.push_back(lo);
  out.push_back(iid);
}

std::vector<TradeoffCurve> markov_bounds(const Context& ctx) {
  const auto& ps = ctx.params;
  const auto src = markov_source(ps.number("q"), ps.number("delta10"));
  const auto rf = ps.grid("rf");
  std::vector<TradeoffCurve> out;
  markov_curves(out, "markov",
                rf, markov_points(src, ps.number("p"), ps.number("c1"), ps.number("c0"), rf, ctx.jobs));
  return out;
}

// ---- Rayleigh curves -----------------------------------------------------

struct RayleighVqPoint {
  rayleigh::ThresholdPolicy vq;
  double variable = kNaN;
  double fixed = kNaN;
};

std::vector<RayleighVqPoint> rayleigh_vq_points(const rayleigh::RayleighSystem& sys,
                                                const std::vector<double>& b, int jobs) {
  const double n = static_cast<double>(sys.n);
  return parallel_map<RayleighVqPoint>(b.size(), jobs, [&](std::size_t i) {
    RayleighVqPoint pt;
    pt.vq = rayleigh::vq_optimize(sys, b[i] / n);
    const TwoStateParams params{pt.vq.q, pt.vq.p, pt.vq.c1, pt.vq.c0};
    pt.variable = or_nan([&] { return twostate::variable_length_lower_bound(params, b[i] / n, sys.n).rate_lower; });
    pt.fixed = or_nan([&] { return twostate::fixed_length_lower_bound(params, b[i] / n, sys.n).rate_lower; });
    return pt;
  });
}

std::vector<rayleigh::ThresholdPolicy> rayleigh_lsc_points(const rayleigh::RayleighSystem& sys,
                                                           const std::vector<double>& b, int jobs) {
  return parallel_map<rayleigh::ThresholdPolicy>(
      b.size(), jobs, [&](std::size_t i) { return rayleigh::lsc_threshold_rate(sys, b[i]); });
}

TradeoffCurve vq_curve(const std::string& scheme, const std::vector<double>& b,
                       const std::vector<RayleighVqPoint>& pts) {
  TradeoffCurve c{scheme,
                  {{"b", kFeedbackBlock}, {"rate", kRate}, {"t", kOne}, {"q", kOne}, {"p", kOne},
                   {"eps0", kOne}, {"eps1", kOne}},
                  {}};
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& v = pts[i].vq;
    c.rows.push_back({b[i], v.forward_rate, v.t, v.q, v.p, v.eps.eps0, v.eps.eps1});
  }
  return c;
}

TradeoffCurve bound_curve(const std::string& scheme, const std::vector<double>& b,
                          const std::vector<RayleighVqPoint>& pts, bool variable) {
  TradeoffCurve c{scheme, {{"b", kFeedbackBlock}, {"rate", kRate}}, {}};
  for (std::size_t i = 0; i < b.size(); ++i) {
    c.rows.push_back({b[i], variable ? pts[i].variable : pts[i].fixed});
  }
  return c;
}

TradeoffCurve lsc_curve(const std::string& scheme, const std::vector<double>& b,
                        const std::vector<rayleigh::ThresholdPolicy>& pts) {
  TradeoffCurve c{scheme, {{"b", kFeedbackBlock}, {"rate", kRate}, {"t", kOne}, {"q", kOne}}, {}};
  for (std::size_t i = 0; i < b.size(); ++i) {
    c.rows.push_back({b[i], pts[i].forward_rate, pts[i].t, pts[i].q});
  }
  return c;
}

std::vector<TradeoffCurve> rayleigh_vq(const Context& ctx) {
  const auto sys = rayleigh_system(ctx.params, 500, 20.0);
  const auto b = ctx.params.grid("b");
  const auto pts = rayleigh_vq_points(sys, b, ctx.jobs);
  return {vq_curve("rayleigh_vq", b, pts), bound_curve("rayleigh_vq_variable_bound", b, pts, true),
          bound_curve("rayleigh_vq_fixed_bound", b, pts, false)};
}

std::vector<TradeoffCurve> rayleigh_lsc(const Context& ctx) {
  const auto sys = rayleigh_system(ctx.params, 500, 20.0);
  const auto b = ctx.params.grid("b");
  return {lsc_curve("rayleigh_lsc", b, rayleigh_lsc_points(sys, b, ctx.jobs))};
}

void group_curves(std::vector<TradeoffCurve>& out, const std::string& prefix,
                  const rayleigh::RayleighSystem& sys, const std::vector<double>& b,
                  rayleigh::GroupMode mode, int jobs) {
  struct Point {
    rayleigh::GroupPolicy num;
    rayleigh::GroupAsymptotic asym;
  };
  const auto pts = parallel_map<Point>(b.size(), jobs, [&](std::size_t i) {
    return Point{rayleigh::group_optimize(sys, b[i], mode), rayleigh::group_asymptotic(sys, b[i])};
  });
  TradeoffCurve num{prefix + "_numeric",
                    {{"b", kFeedbackBlock}, {"total", kRateTotal}, {"rate", kRate}, {"m", kOne},
                     {"t", kOne}, {"feedback", kFeedbackBlock}},
                    {}};
  TradeoffCurve asym{prefix + "_asymptotic",
                     {{"b", kFeedbackBlock}, {"c_star", kRateTotal}, {"c_leading", kRateTotal},
                      {"m_star", kOne}, {"t_star", kOne}, {"regime", kOne}},
                     {}};
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& g = pts[i].num;
    const auto& a = pts[i].asym;
    num.rows.push_back({b[i], g.total_rate, g.forward_rate, g.m, g.t, g.feedback_bits});
    asym.rows.push_back({b[i], a.c_star, a.c_leading, a.m_star, a.t_star, regime_code(a.regime.regime)});
  }
  out.push_back(num);
  out.push_back(asym);
}

std::vector<TradeoffCurve> rayleigh_group(const Context& ctx) {
  const auto sys = rayleigh_system(ctx.params, 500, 5.0);
  std::vector<TradeoffCurve> out;
  group_curves(out, "rayleigh_group", sys, ctx.params.grid("b"), group_mode(ctx.params, "integer"),
               ctx.jobs);
  return out;
}

void corr_curves(std::vector<TradeoffCurve>& out, const std::string& prefix,
                 const rayleigh::RayleighSystem& sys, const std::vector<double>& b, int jobs) {
  const double n = static_cast<double>(sys.n);
  struct Point {
    rayleigh::ThresholdPolicy vq, lsc;
  };
  const auto pts = parallel_map<Point>(b.size(), jobs, [&](std::size_t i) {
    return Point{rayleigh::ar1_achievable_rate(sys, b[i] / n), rayleigh::lsc_markov_rate(sys, b[i])};
  });
  TradeoffCurve vq{prefix + "_vq",
                   {{"b", kFeedbackBlock}, {"rate", kRate}, {"t", kOne}, {"p", kOne}, {"eps0", kOne},
                    {"eps1", kOne}},
                   {}};
  TradeoffCurve lsc{prefix + "_lsc", {{"b", kFeedbackBlock}, {"rate", kRate}, {"t", kOne}}, {}};
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& v = pts[i].vq;
    vq.rows.push_back({b[i], v.forward_rate, v.t, v.p, v.eps.eps0, v.eps.eps1});
    lsc.rows.push_back({b[i], pts[i].lsc.forward_rate, pts[i].lsc.t});
  }
  out.push_back(vq);
  out.push_back(lsc);
}

std::vector<TradeoffCurve> rayleigh_corr(const Context& ctx) {
  const auto sys = rayleigh_system(ctx.params, 500, 20.0, 0.6);
  std::vector<TradeoffCurve> out;
  corr_curves(out, "rayleigh_corr", sys, ctx.params.grid("b"), ctx.jobs);
  return out;
}

TradeoffCurve waterfill_curve(const std::string& scheme, const rayleigh::RayleighSystem& sys,
                              std::int64_t samples, std::uint64_t seed, int jobs) {
  const auto w = rayleigh::waterfilling_reference(sys, samples, seed, jobs);
  return {scheme,
          {{"total", kRateTotal}, {"total_stderr", kRateTotal}, {"rate", kRate},
           {"rate_stderr", kRate}, {"samples", kOne}},
          {{w.mean_total, w.stderr_total, w.mean_per_subchannel, w.stderr_per_subchannel,
            static_cast<double>(w.samples)}}};
}

std::vector<TradeoffCurve> waterfill(const Context& ctx) {
  const auto sys = rayleigh_system(ctx.params, 500, 20.0);
  return {waterfill_curve("waterfill", sys, ctx.params.integer("samples"), ctx.seed, ctx.jobs)};
}

// ---- simulations ---------------------------------------------------------

int small_length(const Params& ps) {
  const auto n = ps.integer("n");
  if (n < 1 || n > 63) throw ConfigError("n must lie in [1, 63] for simulations");
  return static_cast<int>(n);
}

std::vector<TradeoffCurve> sim_fixed(const Context& ctx) {
  const auto& ps = ctx.params;
  const auto params = two_state(ps, 0.3, ps.number("p"), 3.0, 0.0);
  const int n = small_length(ps);
  const auto m_words = ps.integer("m-words");
  const simkit::SimOptions opt{.jobs = ctx.jobs, .scan_budget = ps.number("budget")};
  const auto rep = simkit::simulate_fixed(params, n, m_words, ps.integer("trials"), ctx.seed, opt);
  const double bits = std::log2(static_cast<double>(m_words));
  const double d_r = twostate::distortion_rate(params.q, params.p, bits / n);
  return {{"sim_fixed",
           {{"feedback", kFeedbackBlock}, {"distortion", kOne}, {"distortion_stderr", kOne},
            {"rate", kRate}, {"rate_stderr", kRate}, {"distortion_rate", kOne}, {"trials", kOne}},
           {{bits, rep.mean_distortion, rep.stderr_distortion, rep.mean_forward_rate,
             rep.stderr_forward_rate, d_r, static_cast<double>(rep.trials)}}}};
}

std::vector<TradeoffCurve> sim_variable(const Context& ctx) {
  const auto& ps = ctx.params;
  const auto params = two_state(ps, 0.3, ps.number("p"), 3.0, 0.0);
  const int n = small_length(ps);
  const auto eps = twostate::solve_crossover(params, ps.number("rf"));
  const simkit::SimOptions opt{.jobs = ctx.jobs, .scan_budget = ps.number("budget")};
  const auto rep = simkit::simulate_variable(params, eps, n, ps.integer("trials"), ctx.seed, opt);
  const double bound = simkit::variable_rate_bound(params, eps, n);
  const double d_r = twostate::distortion_rate(params.q, params.p, rep.feedback_rate);
  return {{"sim_variable",
           {{"feedback", kFeedbackBlock}, {"feedback_stderr", kFeedbackBlock},
            {"feedback_bound", kFeedbackBlock}, {"distortion", kOne}, {"distortion_stderr", kOne},
            {"rate", kRate}, {"distortion_rate", kOne}, {"eps0", kOne}, {"eps1", kOne},
            {"trials", kOne}},
           {{rep.mean_feedback_bits, rep.stderr_feedback_bits, bound, rep.mean_distortion,
             rep.stderr_distortion, rep.mean_forward_rate, d_r, eps.eps0, eps.eps1,
             static_cast<double>(rep.trials)}}}};
}

std::vector<TradeoffCurve> sim_oracle(const Context& ctx) {
  const auto& ps = ctx.params;
  const int n = small_length(ps);
  const auto active = ps.integer("active");
  const auto m_words = ps.integer("m-words");
  const double q = ps.number("q");
  if (active < 0 || active > n) throw ConfigError("active must lie in [0, n]");
  if (m_words < 1 || m_words > 64) throw ConfigError("m-words must lie in [1, 64]");
  const simkit::OracleOptions opt{.budget = ps.number("budget"),
                                  .allow_greedy = ps.integer("greedy") != 0};
  const auto res = simkit::exhaustive_codebook_oracle(n, static_cast<int>(active),
                                                      static_cast<int>(m_words), q, opt);
  const double bits = std::log2(static_cast<double>(m_words));
  const double p = static_cast<double>(active) / n;
  const double d_r = twostate::distortion_rate(q, p, bits / n);
  return {{"sim_oracle",
           {{"feedback", kFeedbackBlock}, {"distortion", kOne}, {"distortion_rate", kOne},
            {"exact", kOne}, {"codebooks", kOne}},
           {{bits, static_cast<double>(res.distortion), d_r, res.exact ? 1.0 : 0.0,
             static_cast<double>(res.codebooks_checked)}}}};
}

// ---- figures -------------------------------------------------------------

std::vector<TradeoffCurve> fig_bincaps(const Context& ctx) {
  const auto& ps = ctx.params;
  const auto ps_list = ps.list_or("p", {0.2, 0.3, 0.4});
  const auto rf = ps.grid_or("rf", "0:0.9:0.01");
  const auto n = ps.integer_or("n", 500);
  std::vector<TradeoffCurve> vq, lsc;
  TradeoffCurve bound{"bincaps_variable_bound_n" + std::to_string(n), {{"rf", kFeedback}}, {}};
  for (double r : rf) bound.rows.push_back({r});
  for (double p : ps_list) {
    const auto params = two_state(ps, 0.3, p, 3.0, 0.0);
    const auto pts = two_state_points(params, rf, n, ctx.jobs);
    const std::string tag = "_p" + label(p);
    TradeoffCurve v{"bincaps_vq" + tag, {{"rf", kFeedback}, {"rate", kRate}}, {}};
    TradeoffCurve l{"bincaps_lsc" + tag, {{"rf", kFeedback}, {"rate", kRate}}, {}};
    bound.columns.push_back({"rate" + tag, kRate});
    for (std::size_t i = 0; i < rf.size(); ++i) {
      v.rows.push_back({rf[i], pts[i].rate});
      l.rows.push_back({rf[i], pts[i].lsc});
      bound.rows[i].push_back(pts[i].variable);
    }
    vq.push_back(v);
    lsc.push_back(l);
  }
  std::vector<TradeoffCurve> out = vq;
  out.insert(out.end(), lsc.begin(), lsc.end());
  out.push_back(bound);
  return out;
}

std::vector<TradeoffCurve> fig_e0e1(const Context& ctx) {
  const auto& ps = ctx.params;
  const auto rf = ps.grid_or("rf", "0:0.9:0.01");
  std::vector<TradeoffCurve> out;
  for (double p : ps.list_or("p", {0.2, 0.3, 0.4})) {
    const auto params = two_state(ps, 0.3, p, 3.0, 0.0);
    const auto eps = parallel_map<twostate::CrossoverPair>(
        rf.size(), ctx.jobs, [&](std::size_t i) { return twostate::solve_crossover(params, rf[i]); });
    TradeoffCurve c{"e0e1_p" + label(p),
                    {{"rf", kFeedback}, {"missed", kOne}, {"misfire", kOne}, {"active_good", kOne},
                     {"eps0", kOne}, {"eps1", kOne}},
                    {}};
    for (std::size_t i = 0; i < rf.size(); ++i) {
      const double q = params.q;
      c.rows.push_back({rf[i], q * eps[i].eps0, (1.0 - q) * eps[i].eps1, q * (1.0 - eps[i].eps0),
                        eps[i].eps0, eps[i].eps1});
    }
    out.push_back(c);
  }
  return out;
}

std::vector<TradeoffCurve> fig_rrublb(const Context& ctx) {
  const auto& ps = ctx.params;
  const auto rf = ps.grid_or("rf", "0:0.9:0.02");
  const double delta10 = ps.number_or("delta10", 0.3);
  const double p = ps.list_or("p", {0.3}).front();
  const double c1 = ps.number_or("c1", 3.0);
  const double c0 = ps.number_or("c0", 0.0);
  std::vector<TradeoffCurve> out;
  for (double q : ps.list_or("q", {0.2, 0.3, 0.4})) {
    const auto src = markov_source(q, delta10);
    markov_curves(out, "rrublb_q" + label(q), rf, markov_points(src, p, c1, c0, rf, ctx.jobs));
  }
  return out;
}

void maybe_reference(std::vector<TradeoffCurve>& out, const std::string& scheme, const Context& ctx,
                     const rayleigh::RayleighSystem& sys) {
  const auto samples = ctx.params.integer_or("samples", 0);
  if (samples > 0) out.push_back(waterfill_curve(scheme, sys, samples, ctx.seed, ctx.jobs));
}

std::vector<TradeoffCurve> fig_iidraycaps(const Context& ctx) {
  const auto sys = rayleigh_system(ctx.params, 500, 20.0);
  const auto b = ctx.params.grid_or("b", "10:450:10");
  const auto vq = rayleigh_vq_points(sys, b, ctx.jobs);
  const auto lsc = rayleigh_lsc_points(sys, b, ctx.jobs);
  std::vector<TradeoffCurve> out{vq_curve("iidraycaps_vq", b, vq),
                                 bound_curve("iidraycaps_vq_variable_bound", b, vq, true),
                                 lsc_curve("iidraycaps_lsc", b, lsc)};
  const auto onoff = rayleigh::onoff_optimum(sys);
  out.push_back({"iidraycaps_onoff",
                 {{"b", kFeedbackBlock}, {"rate", kRate}, {"t", kOne}},
                 {{static_cast<double>(sys.n) * twostate::max_useful_feedback(onoff.q, onoff.q),
                   onoff.forward_rate, onoff.t}}});
  maybe_reference(out, "iidraycaps_waterfill", ctx, sys);
  return out;
}

std::vector<TradeoffCurve> fig_iidthres(const Context& ctx) {
  const auto sys = rayleigh_system(ctx.params, 500, 20.0);
  const auto b = ctx.params.grid_or("b", "10:450:10");
  const auto vq = rayleigh_vq_points(sys, b, ctx.jobs);
  const auto lsc = rayleigh_lsc_points(sys, b, ctx.jobs);
  TradeoffCurve v{"iidthres_vq", {{"b", kFeedbackBlock}, {"t", kOne}}, {}};
  TradeoffCurve l{"iidthres_lsc", {{"b", kFeedbackBlock}, {"t", kOne}}, {}};
  for (std::size_t i = 0; i < b.size(); ++i) {
    v.rows.push_back({b[i], vq[i].vq.t});
    l.rows.push_back({b[i], lsc[i].t});
  }
  return {v, l};
}

std::vector<TradeoffCurve> fig_map_ray(const Context& ctx) {
  const auto sys = rayleigh_system(ctx.params, 500, 20.0);
  const auto b = ctx.params.grid_or("b", "10:450:10");
  const auto vq = rayleigh_vq_points(sys, b, ctx.jobs);
  const double n = static_cast<double>(sys.n);
  TradeoffCurve c{"map_ray_vq",
                  {{"b", kFeedbackBlock}, {"above_threshold", kOne}, {"missed", kOne},
                   {"misfire", kOne}, {"active", kOne}},
                  {}};
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& v = vq[i].vq;
    c.rows.push_back({b[i], n * v.q, n * v.q * v.eps.eps0, n * (1.0 - v.q) * v.eps.eps1, n * v.p});
  }
  return {c};
}

std::vector<TradeoffCurve> fig_optpara(const Context& ctx) {
  const auto sys = rayleigh_system(ctx.params, 500, 5.0);
  std::vector<TradeoffCurve> out;
  group_curves(out, "optpara", sys, ctx.params.grid_or("b", "5:300:5"),
               group_mode(ctx.params, "real"), ctx.jobs);
  maybe_reference(out, "optpara_waterfill", ctx, sys);
  return out;
}

std::vector<TradeoffCurve> fig_corrray(const Context& ctx) {
  const auto sys = rayleigh_system(ctx.params, 500, 20.0, 0.6);
  std::vector<TradeoffCurve> out;
  corr_curves(out, "corrray", sys, ctx.params.grid_or("b", "10:450:20"), ctx.jobs);
  maybe_reference(out, "corrray_waterfill", ctx, sys);
  return out;
}

std::vector<TradeoffCurve> figure(const Context& ctx) {
  const std::string name = ctx.params.text("name");
  if (name == "bincaps") return fig_bincaps(ctx);
  if (name == "e0e1") return fig_e0e1(ctx);
  if (name == "rrublb") return fig_rrublb(ctx);
  if (name == "iidraycaps") return fig_iidraycaps(ctx);
  if (name == "iidthres") return fig_iidthres(ctx);
  if (name == "map_ray") return fig_map_ray(ctx);
  if (name == "optpara") return fig_optpara(ctx);
  if (name == "corrray") return fig_corrray(ctx);
  throw ConfigError("unknown figure '" + name +
                    "'; expected bincaps, e0e1, rrublb, iidraycaps, iidthres, map_ray, optpara "
                    "or corrray");
}

std::vector<ParamSpec> two_state_specs(const std::string& p) {
  return {{"q", "0.3", "probability a sub-channel is good"},
          {"p", p, "fraction of active sub-channels"},
          {"c1", "3", "good sub-channel capacity [bits/sub-channel/use]"},
          {"c0", "0", "bad sub-channel capacity [bits/sub-channel/use]"}};
}

std::vector<ParamSpec> rayleigh_specs(const std::string& b) {
  return {{"n", "500", "number of sub-channels"},
          {"snr-db", "", "total SNR in dB (default depends on the command)"},
          {"snr-linear", "", "total SNR, linear"},
          {"b", b, "feedback grid [bits/block], start:stop:step"}};
}

template <class... Lists>
std::vector<ParamSpec> join(Lists... lists) {
  std::vector<ParamSpec> out;
  (out.insert(out.end(), lists.begin(), lists.end()), ...);
  return out;
}

}  // namespace

const std::vector<CommandSpec>& command_table() {
  static const std::vector<CommandSpec> table = [] {
    std::vector<CommandSpec> t;
    t.push_back({"twostate sweep", "VQ, LSC and finite-N forward rates over a feedback grid",
                 join(two_state_specs("0.3"),
                      std::vector<ParamSpec>{
                          {"rf", "0:0.9:0.01", "feedback grid [bits/sub-channel/block]"},
                          {"n", "500", "block length for the finite-N bounds"}}),
                 twostate_sweep});
    t.push_back({"markov bounds", "upper and lower VQ bounds for first-order Markov states",
                 {{"q", "0.3", "stationary probability of a good sub-channel"},
                  {"delta10", "0.3", "good to bad transition probability"},
                  {"p", "0.3", "fraction of active sub-channels"},
                  {"c1", "3", "good sub-channel capacity"},
                  {"c0", "0", "bad sub-channel capacity"},
                  {"rf", "0:0.9:0.02", "feedback grid [bits/sub-channel/block]"}},
                 markov_bounds});
    t.push_back({"rayleigh vq", "optimized VQ threshold scheme for i.i.d. Rayleigh sub-channels",
                 rayleigh_specs("10:450:10"), rayleigh_vq});
    t.push_back({"rayleigh lsc", "lossless threshold feedback for i.i.d. Rayleigh sub-channels",
                 rayleigh_specs("10:450:10"), rayleigh_lsc});
    t.push_back({"rayleigh group", "group-based loading, numeric and asymptotic",
                 join(rayleigh_specs("5:300:5"),
                      std::vector<ParamSpec>{{"mode", "integer", "group size: real, integer or divisor"}}),
                 rayleigh_group});
    t.push_back({"rayleigh corr", "VQ and LSC for AR(1) correlated Rayleigh sub-channels",
                 join(rayleigh_specs("10:450:20"),
                      std::vector<ParamSpec>{{"alpha", "0.6", "neighbour correlation"}}),
                 rayleigh_corr});
    t.push_back({"waterfill", "Monte Carlo water-filling reference",
                 {{"n", "500", "number of sub-channels"},
                  {"snr-db", "", "total SNR in dB (default 20)"},
                  {"snr-linear", "", "total SNR, linear"},
                  {"samples", "100000", "number of fading blocks"}},
                 waterfill});
    t.push_back({"sim fixed", "fixed-length random codebook simulation",
                 join(two_state_specs("0.3"),
                      std::vector<ParamSpec>{{"n", "16", "block length"},
                                             {"m-words", "256", "codebook size"},
                                             {"trials", "100000", "number of state vectors"},
                                             {"budget", "1e11", "codeword comparison budget"}}),
                 sim_fixed});
    t.push_back({"sim variable", "variable-length shared-seed code simulation",
                 join(two_state_specs("0.3"),
                      std::vector<ParamSpec>{{"n", "12", "block length (at most 20)"},
                                             {"rf", "0.4", "design feedback rate"},
                                             {"trials", "20000", "number of state vectors"},
                                             {"budget", "1e11", "candidate draw budget"}}),
                 sim_variable});
    t.push_back({"sim oracle", "exhaustive search over small codebooks",
                 {{"n", "6", "block length"},
                  {"active", "2", "codeword weight"},
                  {"m-words", "2", "codebook size"},
                  {"q", "0.3", "probability a sub-channel is good"},
                  {"budget", "1e9", "codebooks x states budget"},
                  {"greedy", "0", "1 to fall back to greedy search over budget"}},
                 sim_oracle});
    t.push_back({"figure",
                 "reproduce a figure: bincaps, e0e1, rrublb, iidraycaps, iidthres, map_ray, "
                 "optpara, corrray",
                 {{"q", "", "probability a sub-channel is good (list for rrublb)"},
                  {"p", "", "fraction of active sub-channels (list)"},
                  {"c1", "", "good sub-channel capacity"},
                  {"c0", "", "bad sub-channel capacity"},
                  {"delta10", "", "good to bad transition probability"},
                  {"rf", "", "feedback grid [bits/sub-channel/block]"},
                  {"b", "", "feedback grid [bits/block]"},
                  {"n", "", "number of sub-channels"},
                  {"snr-db", "", "total SNR in dB"},
                  {"snr-linear", "", "total SNR, linear"},
                  {"alpha", "", "neighbour correlation"},
                  {"mode", "", "group size: real, integer or divisor"},
                  {"samples", "", "water-filling reference blocks (0 skips it)"}},
                 figure,
                 true});
    return t;
  }();
  return table;
}

}  // namespace csflab::cli::detail
