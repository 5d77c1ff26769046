#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dunkl_lab/bellman.hpp"
#include "dunkl_lab/harness.hpp"
#include "dunkl_lab/kernel.hpp"
#include "dunkl_lab/riesz.hpp"
#include "dunkl_lab/semigroup.hpp"
#include "dunkl_lab/suites.hpp"

namespace py = pybind11;
using namespace dunkl;

namespace {

// a physical grid, a frequency grid and the Poisson evaluator built on them
class Lab {
 public:
  Lab(const RootSystemSpec& rs, double radius, int resolution, double freq_radius, int freq_resolution)
      : grid_(build_grid(rs, radius, resolution)),
        pe_(make_plan(grid_, freq_radius > 0.0 ? build_grid(rs, freq_radius, freq_resolution > 0 ? freq_resolution : resolution)
                                               : grid_)) {}

  py::array_t<double> nodes() const {
    const auto& g = *grid_;
    py::array_t<double> out({g.size(), static_cast<std::size_t>(g.dimension)});
    std::copy(g.nodes.begin(), g.nodes.end(), out.mutable_data());
    return out;
  }
  py::array_t<double> weights() const {
    py::array_t<double> out(grid_->size());
    std::copy(grid_->dw_weights.begin(), grid_->dw_weights.end(), out.mutable_data());
    return out;
  }

  GridFunction wrap(py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> v) const {
    if (static_cast<std::size_t>(v.size()) != grid_->size())
      throw std::invalid_argument("expected " + std::to_string(grid_->size()) + " values");
    return make_grid_function(grid_, std::vector<cplx>(v.data(), v.data() + v.size()));
  }
  static py::array_t<std::complex<double>> unwrap(const GridFunction& f) {
    py::array_t<std::complex<double>> out(f.values.size());
    std::copy(f.values.begin(), f.values.end(), out.mutable_data());
    return out;
  }

  const PoissonEvaluator& pe() const { return pe_; }

 private:
  GridPtr grid_;
  PoissonEvaluator pe_;
};

using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "rational Dunkl analysis: kernels, Poisson semigroup, Riesz transforms and Bellman certificates";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<UpsilonError>(m, "UpsilonError", PyExc_ArithmeticError);
  py::register_exception<LowFrequencyError>(m, "LowFrequencyError", PyExc_RuntimeError);

  py::class_<RootSystemSpec>(m, "RootSystem")
      .def_readonly("dimension", &RootSystemSpec::dimension)
      .def_readonly("roots", &RootSystemSpec::roots)
      .def_readonly("multiplicity", &RootSystemSpec::multiplicity)
      .def_readonly("prefactor", &RootSystemSpec::prefactor)
      .def_property_readonly("kind", [](const RootSystemSpec& rs) { return to_string(rs.kind); })
      .def_property_readonly("group_order", [](const RootSystemSpec& rs) { return rs.group.size(); })
      .def("k_sum", &RootSystemSpec::k_sum)
      .def("weight_density", &weight_density, py::arg("x"))
      .def("orbit_distance", &orbit_distance, py::arg("x"), py::arg("y"))
      .def("reflect", py::overload_cast<const RootSystemSpec&, const Vec&, const Vec&>(&reflect), py::arg("alpha"),
           py::arg("x"))
      .def("to_json", &root_system_to_json)
      .def_static("from_json", &root_system_from_json);

  m.def(
      "root_system",
      [](const std::string& kind, int N, const std::vector<double>& k, const std::vector<Vec>& roots, double prefactor) {
        return make_root_system(root_kind_from_string(kind), N, k, roots, prefactor);
      },
      py::arg("kind"), py::arg("N"), py::arg("k"), py::arg("roots") = std::vector<Vec>{}, py::arg("prefactor") = 1.0);

  m.def(
      "dunkl_kernel",
      [](const RootSystemSpec& rs, const Vec& x, const Vec& y, bool imaginary) {
        return dunkl_kernel(KernelEval(rs), x, y, imaginary);
      },
      py::arg("rs"), py::arg("x"), py::arg("y"), py::arg("imaginary") = false);
  m.def(
      "kernel_ode_residual",
      [](double k, double x, double y) {
        return kernel_ode_residual(KernelEval(make_root_system(RootKind::RankOne, 1, {k})), x, y);
      },
      py::arg("k"), py::arg("x"), py::arg("y"));

  py::class_<Lab>(m, "Lab")
      .def(py::init<const RootSystemSpec&, double, int, double, int>(), py::arg("rs"), py::arg("radius"),
           py::arg("resolution"), py::arg("freq_radius") = 0.0, py::arg("freq_resolution") = 0)
      .def_property_readonly("nodes", &Lab::nodes)
      .def_property_readonly("weights", &Lab::weights)
      .def("forward_backward",
           [](const Lab& lab, CArray v) {
             const auto& plan = lab.pe().plan();
             return Lab::unwrap(plan.inverse(plan.forward(lab.wrap(v))));
           })
      .def("plancherel_residual",
           [](const Lab& lab, CArray v) { return plancherel_residual(lab.pe().plan(), lab.wrap(v)); })
      .def("poisson", [](const Lab& lab, CArray v, double t) { return Lab::unwrap(poisson_apply(lab.pe(), lab.wrap(v), t)); },
           py::arg("values"), py::arg("t"))
      .def("poisson_kernel", [](const Lab& lab, const Vec& x, const Vec& y, double t) { return lab.pe().kernel(x, y, t); },
           py::arg("x"), py::arg("y"), py::arg("t"))
      .def("riesz", [](const Lab& lab, CArray v, int j) { return Lab::unwrap(riesz_apply(lab.pe(), lab.wrap(v), j)); },
           py::arg("values"), py::arg("j"))
      .def("lp_norm", [](const Lab& lab, CArray v, double p) { return lp_norm(lab.wrap(v), p); }, py::arg("values"),
           py::arg("p"))
      .def(
          "norm_ratios",
          [](const Lab& lab, double p, int trials, std::uint64_t seed, bool symmetrize) {
            FamilySpec fam;
            fam.symmetrize = symmetrize;
            const RatioReport r =
                norm_ratio_experiment(lab.pe(), RieszParams::make(p, lab.pe().rs()), fam, trials, seed);
            std::vector<double> ratios;
            for (const auto& row : r.rows) ratios.push_back(row.ratio);
            return py::make_tuple(ratios, r.bound);
          },
          py::arg("p"), py::arg("trials") = 20, py::arg("seed") = 7, py::arg("symmetrize") = false);

  py::class_<BellmanParams>(m, "BellmanParams")
      .def(py::init(&BellmanParams::make), py::arg("p"), py::arg("kappa") = 0.1, py::arg("N1") = 1, py::arg("N2") = 1)
      .def_readonly("p", &BellmanParams::p)
      .def_readonly("q", &BellmanParams::q)
      .def_readonly("gamma", &BellmanParams::gamma)
      .def_readonly("kappa", &BellmanParams::kappa);
  m.def("beta", &beta_eval, py::arg("bp"), py::arg("s"), py::arg("t"));
  m.def("bellman_B", &bellman_B, py::arg("bp"), py::arg("eta"), py::arg("zeta"));
  m.def("mollified_B", &mollified_B, py::arg("bp"), py::arg("eta"), py::arg("zeta"));
  m.def(
      "bellman_hessian",
      [](const BellmanParams& bp, const Vec& eta, const Vec& zeta) {
        const HessianAt h = bellman_hessian(bp, eta, zeta);
        py::array_t<double> out({h.dim, h.dim});
        for (int i = 0; i < h.dim; ++i)
          for (int j = 0; j < h.dim; ++j) out.mutable_at(i, j) = h.at(i, j);
        return out;
      },
      py::arg("bp"), py::arg("eta"), py::arg("zeta"));
  m.def(
      "elementary_margins",
      [](double q, const Vec& a, const Vec& b) {
        const ElementaryMargins e = elementary_margins(q, a, b);
        return py::make_tuple(e.m1, e.m2);
      },
      py::arg("q"), py::arg("a"), py::arg("b"));

  m.def("nu", &nu, py::arg("t"), py::arg("a"), py::arg("derivative") = 0);
  m.def("nu_second_integral", &nu_second_integral, py::arg("a"));
  m.def("cutoff_phi", &cutoff_phi, py::arg("x"), py::arg("n"));

  m.def("suite_names", &suite_names);
  m.def(
      "run_suite",
      [](const std::string& config_json) {
        const RunConfig c = config_from_json(config_json);
        VerificationReport r;
        {
          py::gil_scoped_release release;
          r = run_suite(c);
        }
        return report_to_json(r, c.to_json());
      },
      py::arg("config_json"), "runs a suite from a JSON config and returns the report as JSON text");
}
