#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "csflab/errors.hpp"
#include "csflab/mathkit.hpp"
#include "csflab/rayleigh.hpp"
#include "csflab/simkit.hpp"
#include "csflab/twostate.hpp"

namespace py = pybind11;
using namespace csflab;

#ifndef CSFLAB_VERSION
#define CSFLAB_VERSION "0.0.0"
#endif

namespace {

py::dict policy_dict(const rayleigh::ThresholdPolicy& p) {
  py::dict d;
  d["t"] = p.t;
  d["q"] = p.q;
  d["p"] = p.p;
  d["eps0"] = p.eps.eps0;
  d["eps1"] = p.eps.eps1;
  d["c1"] = p.c1;
  d["c0"] = p.c0;
  d["forward_rate"] = p.forward_rate;
  d["feedback_rate"] = p.feedback_rate;
  d["on_boundary"] = p.on_boundary;
  return d;
}

py::dict report_dict(const simkit::SimReport& r) {
  py::dict d;
  d["trials"] = r.trials;
  d["mean_distortion"] = r.mean_distortion;
  d["stderr_distortion"] = r.stderr_distortion;
  d["mean_feedback_bits"] = r.mean_feedback_bits;
  d["stderr_feedback_bits"] = r.stderr_feedback_bits;
  d["mean_forward_rate"] = r.mean_forward_rate;
  d["stderr_forward_rate"] = r.stderr_forward_rate;
  d["feedback_rate"] = r.feedback_rate;
  return d;
}

twostate::TwoStateParams params(double q, double p, double c1, double c0) {
  twostate::TwoStateParams s{q, p, c1, c0};
  s.validate();
  return s;
}

rayleigh::RayleighSystem system(std::int64_t n, double snr, double alpha) {
  rayleigh::RayleighSystem s{n, snr, alpha};
  s.validate();
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Forward rate versus feedback rate trade-offs for multicarrier channels";
  m.attr("__version__") = CSFLAB_VERSION;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<BracketError>(m, "BracketError", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);
  py::register_exception<QuadratureError>(m, "QuadratureError", PyExc_RuntimeError);

  m.def("binary_entropy", &mathkit::binary_entropy, py::arg("x"));
  m.def("inv_binary_entropy",
        [](double y) { return mathkit::inv_binary_entropy(y); }, py::arg("y"));
  m.def("expint_e1", &mathkit::expint_e1, py::arg("x"));
  m.def("bessel_i0", &mathkit::bessel_i0, py::arg("x"));

  m.def("mutual_info_rate",
        [](double q, double eps0, double eps1) { return twostate::mutual_info_rate(q, {eps0, eps1}); },
        py::arg("q"), py::arg("eps0"), py::arg("eps1"));
  m.def("max_useful_feedback", &twostate::max_useful_feedback, py::arg("q"), py::arg("p"));
  m.def(
      "solve_crossover",
      [](double q, double p, double c1, double c0, double rf) {
        const auto e = twostate::solve_crossover(params(q, p, c1, c0), rf);
        return py::make_tuple(e.eps0, e.eps1);
      },
      py::arg("q"), py::arg("p"), py::arg("c1"), py::arg("c0"), py::arg("rf"));
  m.def(
      "vq_forward_rate",
      [](double q, double p, double c1, double c0, double rf) {
        return twostate::vq_forward_rate(params(q, p, c1, c0), rf);
      },
      py::arg("q"), py::arg("p"), py::arg("c1"), py::arg("c0"), py::arg("rf"));
  m.def(
      "lsc_forward_rate",
      [](double q, double p, double c1, double c0, double rf) {
        return twostate::lsc_forward_rate(params(q, p, c1, c0), rf);
      },
      py::arg("q"), py::arg("p"), py::arg("c1"), py::arg("c0"), py::arg("rf"));
  m.def("distortion_rate", &twostate::distortion_rate, py::arg("q"), py::arg("p"), py::arg("rf"));
  m.def(
      "variable_length_lower_bound",
      [](double q, double p, double c1, double c0, double rf, std::int64_t n) {
        return twostate::variable_length_lower_bound(params(q, p, c1, c0), rf, n).rate_lower;
      },
      py::arg("q"), py::arg("p"), py::arg("c1"), py::arg("c0"), py::arg("rf"), py::arg("n"));
  m.def(
      "fixed_length_lower_bound",
      [](double q, double p, double c1, double c0, double rf, std::int64_t n) {
        return twostate::fixed_length_lower_bound(params(q, p, c1, c0), rf, n).rate_lower;
      },
      py::arg("q"), py::arg("p"), py::arg("c1"), py::arg("c0"), py::arg("rf"), py::arg("n"));
  m.def(
      "markov_vq_bounds",
      [](double delta01, double delta10, double p, double c1, double c0, double rf) {
        const auto b = twostate::markov_vq_bounds({delta01, delta10}, p, c1, c0, rf);
        return py::make_tuple(b.rate_lower, b.rate_upper);
      },
      py::arg("delta01"), py::arg("delta10"), py::arg("p"), py::arg("c1"), py::arg("c0"),
      py::arg("rf"));

  m.def(
      "vq_optimize",
      [](std::int64_t n, double snr, double rf) { return policy_dict(rayleigh::vq_optimize(system(n, snr, 0.0), rf)); },
      py::arg("n"), py::arg("snr"), py::arg("rf"));
  m.def(
      "lsc_threshold_rate",
      [](std::int64_t n, double snr, double b) {
        return policy_dict(rayleigh::lsc_threshold_rate(system(n, snr, 0.0), b));
      },
      py::arg("n"), py::arg("snr"), py::arg("b"));
  m.def(
      "ar1_achievable_rate",
      [](std::int64_t n, double snr, double alpha, double rf) {
        return policy_dict(rayleigh::ar1_achievable_rate(system(n, snr, alpha), rf));
      },
      py::arg("n"), py::arg("snr"), py::arg("alpha"), py::arg("rf"));
  m.def(
      "ar1_transition",
      [](double alpha, double t) {
        const auto s = rayleigh::ar1_transition(alpha, t);
        return py::make_tuple(s.delta01, s.delta10);
      },
      py::arg("alpha"), py::arg("t"));
  m.def(
      "group_optimize",
      [](std::int64_t n, double snr, double b, const std::string& mode) {
        rayleigh::GroupMode gm = rayleigh::GroupMode::integer;
        if (mode == "real") {
          gm = rayleigh::GroupMode::real;
        } else if (mode == "divisor") {
          gm = rayleigh::GroupMode::divisor;
        } else if (mode != "integer") {
          throw py::value_error("mode must be real, integer or divisor");
        }
        const auto g = rayleigh::group_optimize(system(n, snr, 0.0), b, gm);
        py::dict d;
        d["m"] = g.m;
        d["t"] = g.t;
        d["total_rate"] = g.total_rate;
        d["forward_rate"] = g.forward_rate;
        d["feedback_bits"] = g.feedback_bits;
        return d;
      },
      py::arg("n"), py::arg("snr"), py::arg("b"), py::arg("mode") = "integer");
  m.def("ustar", &rayleigh::ustar);
  m.def(
      "waterfilling_reference",
      [](std::int64_t n, double snr, std::int64_t samples, std::uint64_t seed, int jobs) {
        rayleigh::WaterfillReport w;
        {
          py::gil_scoped_release release;
          w = rayleigh::waterfilling_reference(system(n, snr, 0.0), samples, seed, jobs);
        }
        return py::make_tuple(w.mean_total, w.stderr_total);
      },
      py::arg("n"), py::arg("snr"), py::arg("samples"), py::arg("seed") = 1, py::arg("jobs") = 1);

  m.def(
      "simulate_fixed",
      [](double q, double p, double c1, double c0, int n, std::int64_t m_words, std::int64_t trials,
         std::uint64_t seed, int jobs) {
        simkit::SimReport r;
        {
          py::gil_scoped_release release;
          r = simkit::simulate_fixed(params(q, p, c1, c0), n, m_words, trials, seed, {.jobs = jobs});
        }
        return report_dict(r);
      },
      py::arg("q"), py::arg("p"), py::arg("c1"), py::arg("c0"), py::arg("n"), py::arg("m_words"),
      py::arg("trials"), py::arg("seed") = 1, py::arg("jobs") = 1);
  m.def(
      "exhaustive_codebook_oracle",
      [](int n, int active, int m_words, double q) {
        const auto r = simkit::exhaustive_codebook_oracle(n, active, m_words, q);
        return py::make_tuple(static_cast<double>(r.distortion), r.best.words);
      },
      py::arg("n"), py::arg("active"), py::arg("m_words"), py::arg("q"));
}
