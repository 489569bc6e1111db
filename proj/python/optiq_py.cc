#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>
#include <sstream>

#include "optiq/cli.h"
#include "optiq/devices.h"
#include "optiq/imperfections.h"
#include "optiq/io.h"
#include "optiq/oracle_check.h"

namespace py = pybind11;
using namespace optiq;

namespace {

OpticsConfig make_optics(double reflection_phase_deg, double leak) {
    return OpticsConfig{reflection_phase_deg * std::numbers::pi / 180.0, leak};
}

py::dict row_dict(const TruthTableRow &r) {
    py::dict d;
    d["in_control"] = r.in_control;
    d["in_target"] = r.in_target;
    d["output_distribution"] = r.output_distribution;
    d["success_probability"] = r.success_probability;
    d["expected_output"] = r.expected_output ? py::object(py::int_(*r.expected_output)) : py::object(py::none());
    d["error"] = r.error;
    d["synthetic_counts"] = r.synthetic_counts;
    return d;
}

}  // namespace

PYBIND11_MODULE(_optiq, m) {
    m.doc() = "Post-selected linear-optical logic simulator";
    m.attr("__version__") = std::string(tool_version());

    py::class_<QubitState>(m, "Qubit")
        .def(py::init([](std::complex<double> alpha, std::complex<double> beta) {
                 return QubitState::normalize(alpha, beta);
             }),
             py::arg("alpha"), py::arg("beta"), "alpha|H> + beta|V>, rescaled to unit norm")
        .def_static("basis", &QubitState::basis, py::arg("bit"))
        .def_static("plus", &QubitState::plus)
        .def_static("from_angle", &QubitState::from_angle, py::arg("angle_deg"), py::arg("phase_deg") = 0.0)
        .def_property_readonly("alpha", &QubitState::alpha)
        .def_property_readonly("beta", &QubitState::beta)
        .def_property_readonly("polarization_angle_deg", &QubitState::polarization_angle_deg)
        .def("__repr__", [](const QubitState &q) {
            std::ostringstream os;
            os << "Qubit(" << q.alpha() << ", " << q.beta() << ")";
            return os.str();
        });

    py::enum_<DeviceKind>(m, "Device")
        .value("parity", DeviceKind::parity)
        .value("dcnot", DeviceKind::dcnot)
        .value("cnot", DeviceKind::cnot);

    py::enum_<HeraldPolicy>(m, "Policy")
        .value("strict", HeraldPolicy::strict)
        .value("feedforward", HeraldPolicy::feedforward);

    py::class_<DeviceOutcome>(m, "Outcome")
        .def_readonly("success_probability", &DeviceOutcome::success_probability)
        .def_readonly("herald_label", &DeviceOutcome::herald_label)
        .def_readonly("n_output_qubits", &DeviceOutcome::n_output_qubits)
        .def_readonly("density", &DeviceOutcome::density)
        .def("output_distribution", &DeviceOutcome::output_distribution)
        .def(
            "fidelity",
            [](const DeviceOutcome &o, const Eigen::VectorXcd &expected) { return o.fidelity(expected); },
            py::arg("expected"))
        .def("corrections", [](const DeviceOutcome &o) {
            std::vector<std::string> out;
            for (Correction c : o.corrections_applied()) out.emplace_back(to_string(c));
            return out;
        });

    m.def(
        "run_device",
        [](DeviceKind kind, const QubitState &control, const QubitState &target, HeraldPolicy policy,
           double visibility, double reflection_phase_deg, double leak) {
            return run_with_visibility(kind, DeviceInputs{control, target}, VisibilityModel(visibility), policy,
                                       make_optics(reflection_phase_deg, leak));
        },
        py::arg("kind"), py::arg("control"), py::arg("target"), py::arg("policy") = HeraldPolicy::strict,
        py::arg("visibility") = 1.0, py::arg("reflection_phase_deg") = 0.0, py::arg("leak") = 0.0,
        "Run a device. For the parity check, control is q2 and target is q1.");

    m.def(
        "truth_table",
        [](DeviceKind kind, HeraldPolicy policy, double visibility, double pair_rate_per_minute) {
            const VisibilityModel model(visibility);
            auto rows = truth_table(
                kind, [&](const DeviceInputs &in) { return run_with_visibility(kind, in, model, policy); },
                pair_rate_per_minute);
            py::list out;
            for (const auto &r : rows) out.append(row_dict(r));
            return out;
        },
        py::arg("kind"), py::arg("policy") = HeraldPolicy::strict, py::arg("visibility") = 1.0,
        py::arg("pair_rate_per_minute") = kDefaultPairRatePerMinute);

    m.def(
        "coherence_scan",
        [](const QubitState &q1, const QubitState &q2, const std::vector<double> &angles_deg, HeraldPolicy policy) {
            std::vector<double> probs;
            for (const auto &p : coherence_scan(q1, q2, angles_deg, policy)) probs.push_back(p.coincidence_probability);
            return probs;
        },
        py::arg("q1"), py::arg("q2"), py::arg("angles_deg"), py::arg("policy") = HeraldPolicy::strict);

    m.def(
        "fit_malus",
        [](const std::vector<double> &angles_deg, const std::vector<double> &values) {
            if (angles_deg.size() != values.size()) throw std::invalid_argument("angles and values differ in length");
            std::vector<ScanPoint> pts;
            for (size_t k = 0; k < values.size(); ++k) pts.push_back(ScanPoint{angles_deg[k], values[k]});
            return fit_json(fit_malus(pts)).dump();
        },
        py::arg("angles_deg"), py::arg("values"), "Fit summary as a JSON string");

    m.def(
        "error_report",
        [](DeviceKind kind, double visibility, HeraldPolicy policy, int random_pairs, std::uint64_t seed,
           double leak) {
            auto r = error_report(kind, VisibilityModel(visibility), policy, ExtinctionSpec{leak},
                                  InputGrid{random_pairs, seed});
            std::vector<double> errors;
            for (const auto &e : r.per_input) errors.push_back(e.error);
            py::dict d;
            d["worst_case_error"] = r.worst_case_error;
            d["mean_error"] = r.mean_error;
            d["errors"] = errors;
            return d;
        },
        py::arg("kind"), py::arg("visibility"), py::arg("policy") = HeraldPolicy::strict,
        py::arg("random_pairs") = InputGrid{}.random_pairs, py::arg("seed") = InputGrid{}.seed,
        py::arg("leak") = 0.0);

    m.def(
        "fit_visibility",
        [](DeviceKind kind, double target, HeraldPolicy policy, double leak) {
            return fit_visibility(kind, target, policy, ExtinctionSpec{leak});
        },
        py::arg("kind"), py::arg("target_worst_case_error"), py::arg("policy") = HeraldPolicy::strict,
        py::arg("leak") = 0.0);

    m.def(
        "oracle_check",
        [](int trials, std::uint64_t seed) {
            auto r = run_oracle_check(trials, seed);
            py::dict d;
            d["trials"] = r.trials;
            d["amplitudes_compared"] = r.amplitudes_compared;
            d["max_deviation"] = r.max_deviation;
            return d;
        },
        py::arg("trials") = 100, py::arg("seed") = 1);

    m.def(
        "run_cli",
        [](const std::vector<std::string> &args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command-line tool in process; returns (exit_code, stdout, stderr).");
}
