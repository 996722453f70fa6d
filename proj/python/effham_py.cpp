// Python bindings: physics, reduction, baseline and the surrogate forward pass.

#include "effham/cli.hpp"
#include "effham/dataset.hpp"
#include "effham/effective_model.hpp"
#include "effham/physics.hpp"
#include "effham/reduction.hpp"
#include "effham/surrogate.hpp"
#include "effham/swpt.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace effham;

namespace {

py::dict coefficients_dict(const CoefficientVector& c) {
    py::dict d;
    for (std::size_t k = 0; k < kNumTerms; ++k) d[py::str(std::string(kTermNames[k]))] = c[k];
    return d;
}

DeviceParams eta_from(const std::array<double, 5>& a) { return DeviceParams::from_array(a); }
ControlFlux phi_from(const std::array<double, 3>& a) { return ControlFlux::from_array(a); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Effective two-qubit Hamiltonians for transmon-coupler-transmon devices";

    py::register_exception<DomainError>(m, "DomainError");
    py::register_exception<ResonanceError>(m, "ResonanceError");
    py::register_exception<DegenerateSelectionError>(m, "DegenerateSelectionError");
    py::register_exception<MetadataMismatchError>(m, "MetadataMismatchError");
    py::register_exception<SchemaError>(m, "SchemaError");

    m.attr("TERMS") = py::make_tuple("ZI", "IZ", "XX", "YY", "ZZ");
    m.attr("ETA_NAMES") = py::make_tuple("ej0_c1", "ec_c1", "ec_q1c1", "ec_q2c1", "ec_q1q2");
    m.attr("FRAME_OMEGA0") = FrameConfig::standard().omega0;

    m.def("mode_frequency", &mode_frequency, py::arg("ej0"), py::arg("ec"), py::arg("phi"),
          "sqrt(8 E_J E_C) - E_C in GHz for E_J = E_J0 |cos(phi/2)|");

    m.def(
        "full_hamiltonian",
        [](const std::array<double, 5>& eta, const std::array<double, 3>& phi, double omega0) {
            return Eigen::MatrixXcd(build_full_hamiltonian(QubitConstants{}, eta_from(eta), phi_from(phi),
                                                           FrameConfig{omega0}));
        },
        py::arg("eta"), py::arg("phi"), py::arg("omega0") = FrameConfig::standard().omega0,
        "8x8 three-mode Hamiltonian in rad/ns, basis index 4 b_q1 + 2 b_q2 + b_c1");

    m.def(
        "reduce",
        [](const std::array<double, 5>& eta, const std::array<double, 3>& phi, double t) {
            const ReductionResult r =
                reduce(QubitConstants{}, eta_from(eta), phi_from(phi), FrameConfig::standard(), t);
            py::dict d;
            d["c_true"] = coefficients_dict(r.c_true);
            d["c_dress"] = coefficients_dict(r.c_dress);
            d["fidelity_true"] = r.fidelity_true;
            d["fidelity_dress"] = r.fidelity_dress;
            d["residual_norm"] = r.residual_norm;
            d["u_proj"] = Eigen::MatrixXcd(r.u_proj);
            return d;
        },
        py::arg("eta"), py::arg("phi"), py::arg("t") = 1.0, "Ground-truth effective coefficients (MHz)");

    m.def(
        "swpt",
        [](const std::array<double, 5>& eta, const std::array<double, 3>& phi) {
            return coefficients_dict(
                swpt_coefficients(QubitConstants{}, eta_from(eta), phi_from(phi), FrameConfig::standard()));
        },
        py::arg("eta"), py::arg("phi"), "Second-order Schrieffer-Wolff coefficients (MHz)");

    m.def(
        "hybridization_ratios",
        [](const std::array<double, 5>& eta, const std::array<double, 3>& phi) {
            const HybridizationReport h = hybridization_ratios(QubitConstants{}, eta_from(eta), phi_from(phi));
            return py::make_tuple(h.ratio_q1, h.ratio_q2);
        },
        py::arg("eta"), py::arg("phi"));

    m.def(
        "sample_ensemble",
        [](std::size_t n, std::uint64_t seed) {
            EnsembleSpec spec;
            spec.seed = seed;
            std::vector<std::array<double, 5>> out;
            for (const auto& d : sample_ensemble(spec, n)) out.push_back(d.to_array());
            return out;
        },
        py::arg("n"), py::arg("seed") = 0, "Devices drawn uniformly from the default box");

    m.def(
        "expectation",
        [](const std::array<double, 5>& c, const std::string& pair, double t) {
            CoefficientVector cv{c};
            const MeasurementPair p = MeasurementPair::parse(pair);
            return effective_expectations(cv, std::span<const MeasurementPair>(&p, 1), t)(0);
        },
        py::arg("coefficients"), py::arg("pair"), py::arg("t") = 1.0,
        "Effective-model expectation for a probe label such as '(X+,Z-)|XY'");

    py::class_<SurrogateModel>(m, "Surrogate")
        .def_static("load", [](const std::string& path) { return load_checkpoint(path); }, py::arg("path"))
        .def(
            "predict",
            [](const SurrogateModel& s, const std::array<double, 5>& eta, const std::array<double, 3>& phi) {
                return coefficients_dict(forward(s, eta_from(eta), phi_from(phi)));
            },
            py::arg("eta"), py::arg("phi"))
        .def_property_readonly("best_epoch", [](const SurrogateModel& s) { return s.meta.best_epoch; })
        .def_property_readonly("best_loss", [](const SurrogateModel& s) { return s.meta.best_loss; });

    m.def(
        "run", [](const std::vector<std::string>& args) { return run_command(args); }, py::arg("args"),
        "Run an effham subcommand in-process and return its exit code");
}
