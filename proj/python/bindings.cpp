#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trimlab/anomalous.hpp"
#include "trimlab/cli/config.hpp"
#include "trimlab/cli/emit.hpp"
#include "trimlab/cli/experiments.hpp"
#include "trimlab/coupling.hpp"
#include "trimlab/fracmoment.hpp"
#include "trimlab/spectral.hpp"

namespace py = pybind11;
using namespace trimlab;

namespace {

Region box_region(const std::vector<int>& lo, const std::vector<int>& hi) {
  return Region(make_box(static_cast<int>(lo.size()), lo, hi));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Trimmed Anderson model: finite-volume operators, Green functions and experiment runner";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("in_gamma", [](const std::string& gamma, const std::vector<int>& x) {
    return SublatticeMask::parse(gamma).contains(Site{x});
  });

  m.def("relative_density", [](const std::string& gamma, int radius, const std::vector<int>& centre) {
    return relative_density(SublatticeMask::parse(gamma), radius, Site{centre}).value();
  });

  m.def("box_sites", [](const std::vector<int>& lo, const std::vector<int>& hi) {
    std::vector<std::vector<int>> out;
    Region r = box_region(lo, hi);
    for (const auto& s : r.sites()) out.push_back(s.coords);
    return out;
  });

  m.def(
      "hamiltonian",
      [](const std::vector<int>& lo, const std::vector<int>& hi, const std::string& gamma, const std::string& v0,
         double g, const std::vector<double>& V) {
        return assemble(box_region(lo, hi), SublatticeMask::parse(gamma), V0Spec::parse(v0), g, V).H;
      },
      py::arg("lo"), py::arg("hi"), py::arg("gamma") = "full", py::arg("v0") = "zero", py::arg("g") = 0.0,
      py::arg("V") = std::vector<double>{});

  m.def(
      "free_hamiltonian",
      [](const std::vector<int>& lo, const std::vector<int>& hi, const std::string& gamma, const std::string& v0) {
        return assemble_free(box_region(lo, hi), SublatticeMask::parse(gamma), V0Spec::parse(v0)).H;
      },
      py::arg("lo"), py::arg("hi"), py::arg("gamma") = "full", py::arg("v0") = "zero");

  m.def("green", [](const Eigen::MatrixXd& H, cplx z) { return green(H, z); }, "(H - z)^{-1}");
  m.def("green_general", &green_general);
  m.def("schur_green", &schur_green);
  m.def("resolvent_identity_residual", [](const Eigen::MatrixXd& H, const std::vector<std::size_t>& X, cplx z,
                                          const std::string& which) {
    ResolventCase c = which == "in_out"    ? ResolventCase::InOut
                      : which == "out_in"  ? ResolventCase::OutIn
                      : which == "out_out" ? ResolventCase::OutOut
                                           : throw InvalidArgument("case must be in_out, out_in or out_out");
    return resolvent_identity_residual(H, X, z, c);
  });

  m.def("eigvalsh", [](const Eigen::MatrixXd& H) { return eigendecompose(H).values; });

  m.def(
      "chi",
      [](const Eigen::MatrixXcd& A, const std::vector<int>& lo, const std::vector<int>& hi, double eta, double s) {
        return chi_kernel(A, box_region(lo, hi), DecayMetric{eta}, s).value;
      },
      py::arg("A"), py::arg("lo"), py::arg("hi"), py::arg("eta"), py::arg("s") = 1.0);

  m.def("u_sharp", [](const Eigen::VectorXcd& U, cplx z) { return u_sharp(U, z).values; });
  m.def("s2w_identity_check", [](const Eigen::MatrixXd& H0, const Eigen::VectorXcd& U, cplx z) {
    auto r = s2w_identity_check(H0, U, z);
    return py::make_tuple(r.residual0, r.residual1);
  });

  m.def(
      "decoupling_constant",
      [](const std::string& disorder_json, double s, std::size_t trials, std::uint64_t seed) {
        auto spec = cli::disorder_from_json(nlohmann::json::parse(disorder_json));
        return estimate_decoupling_constants(spec, s, trials, seed).C_s;
      },
      py::arg("disorder_json"), py::arg("s"), py::arg("trials") = 200, py::arg("seed") = 0);

  m.def("gamma1_eigenfunction", [](int k, int m_, int a, int b, const std::vector<int>& lo, const std::vector<int>& hi) {
    auto psi = gamma1_eigenfunction(k, m_, a, b);
    std::vector<double> out;
    Region r = box_region(lo, hi);
    for (const auto& s : r.sites()) out.push_back(psi(s));
    return out;
  });

  m.def(
      "compact_eigenfunctions",
      [](const std::vector<int>& lo, const std::vector<int>& hi, const std::string& gamma, double lambda) {
        auto rep = compact_eigenfunctions(assemble_free(box_region(lo, hi), SublatticeMask::parse(gamma), V0Spec{}),
                                          lambda);
        py::dict d;
        d["full_mult"] = rep.full_mult;
        d["supported_dim"] = rep.supported_dim;
        d["assumption3"] = rep.assumption3;
        d["max_residual"] = rep.max_residual;
        d["basis"] = rep.basis;
        return d;
      });

  // Runs an experiment from a JSON config string and returns the record as JSON text plus the CSV.
  m.def(
      "run",
      [](const std::string& config_json) {
        auto cfg = cli::parse_config(nlohmann::json::parse(config_json));
        cli::ResultRecord rec;
        {
          py::gil_scoped_release release;
          rec = cli::run(cfg);
        }
        return py::make_tuple(cli::to_json(rec).dump(), cli::to_csv(rec.table));
      },
      py::arg("config_json"));
}
