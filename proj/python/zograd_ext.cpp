#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <string>

#include "zograd/acceptance.hpp"
#include "zograd/core.hpp"
#include "zograd/errors.hpp"
#include "zograd/estimators.hpp"
#include "zograd/risk.hpp"
#include "zograd/verify.hpp"
#include "zograd/worstcase.hpp"

namespace py = pybind11;
using namespace zograd;

namespace {

Norm to_norm(const py::object& q) {
  if (py::isinstance<py::int_>(q)) return parse_norm(std::to_string(q.cast<int>()));
  if (py::isinstance<py::float_>(q) && std::isinf(q.cast<double>())) return Norm::linf;
  return parse_norm(q.cast<std::string>());
}

py::dict report_dict(const RiskReport& r) {
  py::dict d;
  d["mse"] = r.mse;
  d["bias_sq"] = r.bias_sq;
  d["variance"] = r.variance;
  d["std_error"] = r.std_error;
  d["reps"] = r.reps;
  d["seed"] = r.seed;
  d["evals_consumed"] = r.evals_consumed;
  return d;
}

// 1-d designs can be given as flat lists.
std::vector<Point> as_points(const py::sequence& seq) {
  std::vector<Point> out;
  for (const auto& item : seq) {
    if (py::isinstance<py::sequence>(item)) out.push_back(item.cast<Point>());
    else out.push_back({item.cast<double>()});
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_zograd, m) {
  m.doc() = "Minimax bounds and estimators for zeroth-order gradient estimation";

  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);
  py::register_exception<DistributionError>(m, "DistributionError", PyExc_RuntimeError);

  py::class_<LinearDesign>(m, "LinearDesign")
      .def(py::init([](const py::sequence& deltas, const py::sequence& weights) {
             return LinearDesign(as_points(deltas), as_points(weights));
           }),
           py::arg("deltas"), py::arg("weights"))
      .def_property_readonly("deltas", &LinearDesign::deltas)
      .def_property_readonly("weights", &LinearDesign::weights)
      .def_property_readonly("dimension", &LinearDesign::dimension)
      .def("weight_energy", &LinearDesign::weight_energy)
      .def("__len__", &LinearDesign::size)
      .def("__eq__", [](const LinearDesign& a, const LinearDesign& b) { return a == b; })
      .def("__repr__", [](const LinearDesign& d) {
        return "<LinearDesign n=" + std::to_string(d.size()) + " p=" + std::to_string(d.dimension()) + ">";
      });

  m.def("cfd_design_1d", &cfd_design_1d, py::arg("n"), py::arg("delta"));
  m.def("cfd_design_multi", &cfd_design_multi, py::arg("n"), py::arg("p"), py::arg("delta"));
  m.def("forward_difference_design", &forward_difference_design, py::arg("n"), py::arg("delta"));
  m.def("optimal_delta", &optimal_delta, py::arg("a"), py::arg("b"), py::arg("n"), py::arg("p") = 1);
  m.def("is_same_sign", &is_same_sign, py::arg("design"));
  m.def(
      "moment_conditions",
      [](const LinearDesign& d) {
        const auto r = moment_conditions(d);
        py::dict out;
        out["constant"] = r.constant;
        out["linear"] = r.linear;
        out["quadratic"] = r.quadratic;
        out["matched"] = r.matched;
        return out;
      },
      py::arg("design"));

  m.def(
      "linear_minimax_lower",
      [](int n, double a, double b, int p, const py::object& q, bool same_sign) {
        return linear_minimax_lower(
            {n, a, b, p, to_norm(q), same_sign ? BoundFlavor::linear_lower_same_sign : BoundFlavor::linear_lower});
      },
      py::arg("n"), py::arg("a"), py::arg("b"), py::arg("p") = 1, py::arg("q") = 2, py::arg("same_sign") = false);
  m.def("cfd_worst_case_mse", &cfd_worst_case_mse, py::arg("n"), py::arg("a"), py::arg("b"), py::arg("p"),
        py::arg("delta"));
  m.def(
      "general_minimax_lower",
      [](int n, double a, double b, int p, const py::object& q) { return general_minimax_lower(n, a, b, p, to_norm(q)); },
      py::arg("n"), py::arg("a"), py::arg("b"), py::arg("p") = 1, py::arg("q") = 2);
  m.def(
      "bound",
      [](const std::string& flavor, int n, double a, double b, int p, const py::object& q) {
        return bound_value({n, a, b, p, to_norm(q), parse_bound_flavor(flavor)});
      },
      py::arg("flavor"), py::arg("n"), py::arg("a"), py::arg("b"), py::arg("p") = 1, py::arg("q") = 2);
  m.def(
      "exact_worst_case_risk_linear",
      [](const LinearDesign& d, double a, double b, const py::object& q) {
        const auto r = exact_worst_case_risk_linear(d, a, b, to_norm(q));
        py::dict out;
        out["lower"] = r.lower;
        out["upper"] = r.upper;
        out["exact"] = r.exact;
        return out;
      },
      py::arg("design"), py::arg("a"), py::arg("b"), py::arg("q") = 2);
  m.def(
      "le_cam_bound",
      [](double eps, int n, double a, double b, int p, const py::object& q) {
        return le_cam_bound(eps, n, a, b, p, to_norm(q));
      },
      py::arg("eps"), py::arg("n"), py::arg("a"), py::arg("b"), py::arg("p") = 1, py::arg("q") = 2);
  m.def(
      "le_cam_optimal_eps",
      [](int n, double a, double b, int p, const py::object& q) { return le_cam_optimal_eps(n, a, b, p, to_norm(q)); },
      py::arg("n"), py::arg("a"), py::arg("b"), py::arg("p") = 1, py::arg("q") = 2);
  m.def(
      "kl_gaussian", [](const Point& mu1, const Point& mu2, double b) { return kl_gaussian(mu1, mu2, b); },
      py::arg("mu1"), py::arg("mu2"), py::arg("b"));
  m.def(
      "min_integral_gaussian",
      [](double separation) {
        const auto r = min_integral_gaussian(separation);
        return py::make_tuple(r.exact, r.floor);
      },
      py::arg("separation"));

  py::class_<ExtremalFunction>(m, "ExtremalFunction")
      .def("__call__", [](const ExtremalFunction& f, const py::object& x) {
        if (py::isinstance<py::sequence>(x)) return f(x.cast<Point>());
        const Point p{x.cast<double>()};
        return f(p);
      })
      .def_property_readonly("eps", &ExtremalFunction::eps)
      .def_property_readonly("orientation", &ExtremalFunction::orientation)
      .def("gradient", &ExtremalFunction::gradient)
      .def("sup_abs", &ExtremalFunction::sup_abs)
      .def("maximizer", &ExtremalFunction::maximizer)
      .def("zero_boundary", &ExtremalFunction::zero_boundary)
      .def("negated", &ExtremalFunction::negated)
      .def("grid_sup_abs", [](const ExtremalFunction& f, std::size_t points) { return grid_sup_abs(f, points); },
           py::arg("points") = 100'000);

  m.def("f_star_1d", &f_star_1d, py::arg("eps"), py::arg("a"), py::arg("x0") = 0.0);
  m.def(
      "f_star_multi",
      [](double eps, double a, int p, const py::object& q) {
        return f_star_multi(eps, FunctionClassSpec::centered(a, p, to_norm(q)));
      },
      py::arg("eps"), py::arg("a"), py::arg("p"), py::arg("q") = 2);
  m.def(
      "inverse_modulus",
      [](double eps, double a, int p, const py::object& q) { return inverse_modulus(eps, a, p, to_norm(q)); },
      py::arg("eps"), py::arg("a"), py::arg("p") = 1, py::arg("q") = 2);

  m.def(
      "spike_mc_mse",
      [](const LinearDesign& d, double a, double b, std::uint64_t reps, std::uint64_t seed, unsigned workers,
         const py::object& q) {
        RiskReport r;
        {
          py::gil_scoped_release release;
          r = spike_mc_mse(d, FunctionClassSpec::centered(a, d.dimension(), to_norm(q)), b, {reps, seed, workers});
        }
        return report_dict(r);
      },
      py::arg("design"), py::arg("a"), py::arg("b"), py::arg("reps") = 100'000, py::arg("seed") = 0,
      py::arg("workers") = 0, py::arg("q") = 2);
  m.def(
      "mc_mse",
      [](const LinearDesign& d, const std::function<double(const Point&)>& f, const Point& grad, double b,
         const Point& x0, std::uint64_t reps, std::uint64_t seed) {
        // Calls back into Python, so keep to one worker and take the GIL per call.
        const Function wrapped = [&f](std::span<const double> x) {
          py::gil_scoped_acquire acquire;
          return f(Point(x.begin(), x.end()));
        };
        RiskReport r;
        {
          py::gil_scoped_release release;
          r = mc_mse(d, wrapped, grad, b > 0.0 ? NoiseSpec::gaussian(b) : NoiseSpec::none(), x0, {reps, seed, 1});
        }
        return report_dict(r);
      },
      py::arg("design"), py::arg("f"), py::arg("grad"), py::arg("b"), py::arg("x0"), py::arg("reps") = 10'000,
      py::arg("seed") = 0);
  m.def(
      "brute_force_linear_minimax",
      [](int n, double a, double b, int grid_points, int refine_starts) {
        BruteForceResult r{0.0, cfd_design_1d(2, 1.0), 0.0, 0, 0.0};
        {
          py::gil_scoped_release release;
          r = brute_force_linear_minimax(n, a, b, {grid_points, refine_starts});
        }
        py::dict out;
        out["value"] = r.value;
        out["design"] = r.design;
        out["min_evaluated"] = r.min_evaluated;
        out["evaluated"] = r.evaluated;
        out["asymmetric_branch_min"] = r.asymmetric_branch_min;
        return out;
      },
      py::arg("n"), py::arg("a"), py::arg("b"), py::arg("grid_points") = 2001, py::arg("refine_starts") = 8);
  m.def(
      "rate_fit",
      [](const std::vector<std::pair<double, double>>& points) {
        const auto r = rate_fit(points);
        py::dict out;
        out["slope"] = r.slope;
        out["intercept"] = r.intercept;
        out["r_squared"] = r.r_squared;
        return out;
      },
      py::arg("points"));
  m.def(
      "sp_blowup_curve",
      [](const std::vector<double>& rhos, int p, int n, double h, std::uint64_t reps, std::uint64_t seed,
         unsigned workers) {
        std::vector<BlowupPoint> curve;
        {
          py::gil_scoped_release release;
          curve = sp_blowup_curve(rhos, p, n, h, reps, seed, workers);
        }
        py::list out;
        for (const auto& pt : curve) {
          py::dict d = report_dict(pt.empirical);
          d["rho"] = pt.rho;
          d["analytic"] = pt.analytic;
          out.append(d);
        }
        return out;
      },
      py::arg("rho_list"), py::arg("p"), py::arg("n"), py::arg("h") = 1.0, py::arg("reps") = 100'000,
      py::arg("seed") = 0, py::arg("workers") = 0);

  m.def(
      "run_acceptance",
      [](std::uint64_t seed, std::uint64_t reps, std::uint64_t rate_reps, unsigned workers) {
        std::vector<CriterionResult> results;
        {
          py::gil_scoped_release release;
          results = run_acceptance({seed, reps, rate_reps, workers});
        }
        py::list out;
        for (const auto& r : results) {
          py::dict d;
          d["id"] = r.id;
          d["title"] = r.title;
          d["passed"] = r.passed;
          d["detail"] = r.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 7, py::arg("reps") = 1'000'000, py::arg("rate_reps") = 100'000, py::arg("workers") = 0);
}
