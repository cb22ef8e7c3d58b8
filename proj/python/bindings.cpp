#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "catforge/analysis.hpp"
#include "catforge/commands.hpp"
#include "catforge/errors.hpp"
#include "catforge/fock.hpp"
#include "catforge/serialize.hpp"
#include "catforge/state_generator.hpp"
#include "catforge/temporal_modes.hpp"
#include "catforge/tomography.hpp"

namespace py = pybind11;
using namespace catforge;

namespace {

Parity parse_parity(const std::string& s) {
  if (s == "even") return Parity::even;
  if (s == "odd") return Parity::odd;
  throw InvalidArgument("parity must be 'even' or 'odd'");
}

SchemeParams make_scheme(double eps_plus, double eps_minus, double eta,
                         int cutoff) {
  SchemeParams p;
  p.eps_plus = Squeeze(eps_plus);
  p.eps_minus = Squeeze(eps_minus);
  p.eta = eta;
  p.cutoff = cutoff;
  p.validate();
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Photon-subtracted squeezed-state cats: states, Wigner functions, tomography";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  auto numeric = py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<CutoffTooSmall>(m, "CutoffTooSmall", numeric.ptr());
  py::register_exception<ZeroState>(m, "ZeroState", numeric.ptr());
  py::register_exception<DegenerateMode>(m, "DegenerateMode", numeric.ptr());

  py::class_<PureState>(m, "PureState")
      .def(py::init<CVector, int, int>(), py::arg("amplitudes"),
           py::arg("cutoff"), py::arg("n_modes") = 1)
      .def_static("fock", &PureState::fock, py::arg("n"), py::arg("cutoff"))
      .def_property_readonly("amplitudes", &PureState::amplitudes)
      .def_property_readonly("cutoff", &PureState::cutoff)
      .def_property_readonly("n_modes", &PureState::n_modes)
      .def("norm", &PureState::norm)
      .def("normalized", &PureState::normalized)
      .def("to_json", [](const PureState& s) { return dump(to_json(s)); });

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def(py::init<CMatrix, int, int>(), py::arg("entries"), py::arg("cutoff"),
           py::arg("n_modes") = 1)
      .def(py::init(&DensityMatrix::from_pure), py::arg("psi"))
      .def_static("from_pure", &DensityMatrix::from_pure)
      .def_static("maximally_mixed", &DensityMatrix::maximally_mixed)
      .def_property_readonly("entries", &DensityMatrix::entries)
      .def_property_readonly("cutoff", &DensityMatrix::cutoff)
      .def_property_readonly("n_modes", &DensityMatrix::n_modes)
      .def("trace", &DensityMatrix::trace)
      .def("to_json", [](const DensityMatrix& r) { return dump(to_json(r)); });
  py::implicitly_convertible<PureState, DensityMatrix>();

  m.def("squeezed_vacuum", [](double eps, int cutoff) {
    return squeezed_vacuum(Squeeze(eps), cutoff);
  }, py::arg("eps"), py::arg("cutoff") = kDefaultCutoff);
  m.def("squeeze_operator", [](double eps, int cutoff) {
    return squeeze_operator(Squeeze(eps), cutoff).entries();
  }, py::arg("eps"), py::arg("cutoff") = kDefaultCutoff);
  m.def("coherent_state", &coherent_state, py::arg("alpha"),
        py::arg("cutoff") = kDefaultCutoff);
  m.def("cat_state", [](Complex alpha, const std::string& parity, int cutoff) {
    return cat_state(alpha, parse_parity(parity), cutoff);
  }, py::arg("alpha"), py::arg("parity") = "even",
        py::arg("cutoff") = kDefaultCutoff);
  m.def("apply_loss", &apply_loss, py::arg("rho"), py::arg("eta"));
  m.def("partial_trace", [](const PureState& s, const std::string& keep) {
    if (keep != "plus" && keep != "minus") {
      throw InvalidArgument("keep must be 'plus' or 'minus'");
    }
    return partial_trace(s, keep == "plus" ? KeepMode::plus : KeepMode::minus);
  }, py::arg("state"), py::arg("keep") = "plus");

  m.def("overlap", &overlap, py::arg("delta"), py::arg("zeta0"));

  m.def("two_photon_subtract_single", [](double eps0, int cutoff) {
    const auto r = two_photon_subtract_single(Squeeze(eps0), cutoff);
    return py::make_tuple(r.state, r.beta, r.success_weight);
  }, py::arg("eps0"), py::arg("cutoff") = kDefaultCutoff);
  m.def("ancilla_subtract_exact",
        [](double eps_plus, double eps_minus, int cutoff) {
          const auto r = ancilla_subtract_exact(
              make_scheme(eps_plus, eps_minus, 1.0, cutoff));
          return py::make_tuple(r.two_mode, r.success_weight);
        },
        py::arg("eps_plus"), py::arg("eps_minus"),
        py::arg("cutoff") = kDefaultTwoModeCutoff);
  m.def("approx_phi", [](double eps_plus, double eps_minus, int cutoff) {
    return approx_phi(make_scheme(eps_plus, eps_minus, 1.0, cutoff));
  }, py::arg("eps_plus"), py::arg("eps_minus"),
        py::arg("cutoff") = kDefaultTwoModeCutoff);
  m.def("lossy_state",
        [](double eps_plus, double eps_minus, double eta, int cutoff) {
          const auto r = lossy_state(make_scheme(eps_plus, eps_minus, eta, cutoff));
          py::dict d;
          d["rho_plus"] = r.rho_plus;
          d["success_weight"] = r.success_weight;
          d["c0"] = r.c0;
          return d;
        },
        py::arg("eps_plus"), py::arg("eps_minus") = 0.0, py::arg("eta") = 1.0,
        py::arg("cutoff") = kDefaultTwoModeCutoff);

  m.def("wigner", [](const DensityMatrix& rho, std::vector<double> x,
                     std::vector<double> p) {
    return wigner(rho, x, p).values;
  }, py::arg("rho"), py::arg("x"), py::arg("p"));
  m.def("wigner_at", &wigner_at, py::arg("rho"), py::arg("x"), py::arg("p"));
  m.def("photon_distribution", &photon_distribution, py::arg("rho"));
  m.def("mean_photon", &mean_photon, py::arg("rho"));
  m.def("purity", &purity, py::arg("rho"));
  m.def("trace_distance", &trace_distance, py::arg("rho"), py::arg("sigma"));
  m.def("fidelity",
        py::overload_cast<const DensityMatrix&, const PureState&>(&fidelity),
        py::arg("rho"), py::arg("target"));
  m.def("fidelity",
        py::overload_cast<const DensityMatrix&, const DensityMatrix&>(&fidelity),
        py::arg("rho"), py::arg("sigma"));
  m.def("best_cat_fit",
        [](const DensityMatrix& rho, std::vector<double> grid,
           const std::string& parity) {
          const CatFit f = best_cat_fit(rho, parse_parity(parity), grid);
          return py::make_tuple(f.alpha_star, f.fidelity_star);
        },
        py::arg("rho"), py::arg("alpha_grid"), py::arg("parity") = "even");

  m.def("sample_quadratures",
        [](const DensityMatrix& rho, std::size_t n, std::uint64_t seed,
           std::optional<std::vector<double>> phases) {
          PhaseScheme scheme = UniformRandomPhases{};
          if (phases) scheme = FixedPhases{*phases};
          const QuadratureRecord r = sample_quadratures(rho, n, scheme, seed);
          Eigen::MatrixX2d out(static_cast<Eigen::Index>(r.samples.size()), 2);
          for (std::size_t i = 0; i < r.samples.size(); ++i) {
            out(static_cast<Eigen::Index>(i), 0) = r.samples[i].x;
            out(static_cast<Eigen::Index>(i), 1) = r.samples[i].theta;
          }
          return out;
        },
        py::arg("rho"), py::arg("n_samples"), py::arg("seed"),
        py::arg("phases") = py::none());
  m.def("mle_reconstruct",
        [](const Eigen::MatrixX2d& samples, int cutoff, int max_iters,
           double stop_tol) {
          QuadratureRecord r;
          for (Eigen::Index i = 0; i < samples.rows(); ++i) {
            r.samples.push_back({samples(i, 0), samples(i, 1)});
          }
          MleConfig cfg;
          cfg.cutoff = cutoff;
          cfg.max_iters = max_iters;
          cfg.stop_tol = stop_tol;
          const MleResult res = mle_reconstruct(r, cfg);
          py::dict d;
          d["rho_hat"] = res.rho_hat;
          d["loglikelihood"] = res.diagnostics.loglikelihood;
          d["iterations"] = res.diagnostics.iterations;
          d["converged"] = res.diagnostics.converged;
          return d;
        },
        py::arg("samples"), py::arg("cutoff") = 12, py::arg("max_iters") = 2000,
        py::arg("stop_tol") = 1e-7);

  m.def("run_command",
        [](const std::string& name, const std::string& config,
           const std::string& out_dir, std::optional<std::uint64_t> seed,
           std::optional<int> cutoff) {
          CommandOptions opt{config, out_dir, seed, cutoff};
          std::ostringstream out;
          std::ostringstream err;
          const int code = run_command(name, opt, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("name"), py::arg("config"), py::arg("out") = ".",
        py::arg("seed") = py::none(), py::arg("cutoff") = py::none());
}
