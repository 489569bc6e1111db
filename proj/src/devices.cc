#include "optiq/devices.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace optiq {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Path labels used by every device: inputs 1 and 2 carry the logical qubits,
// 3 and 4 the ancilla pair of the composite gate.
constexpr int kPath1 = 1;
constexpr int kPath2 = 2;
constexpr int kPath3 = 3;
constexpr int kPath4 = 4;

Eigen::VectorXcd qubit_vector(const QubitState &q) {
    Eigen::VectorXcd v(2);
    v << q.alpha(), q.beta();
    return v;
}

int output_bit(const ModeLayout &layout, const FockVector &v, int path) {
    int h = v[layout.mode(path, Pol::H)];
    int pv = v[layout.mode(path, Pol::V)];
    if (h + pv != 1) return -1;
    return pv;
}

double wrap_degrees(double deg) {
    double w = std::fmod(deg, 180.0);
    if (w < 0) w += 180.0;
    if (w >= 180.0) w -= 180.0;
    return w;
}

}  // namespace

std::string_view to_string(HeraldPolicy p) {
    return p == HeraldPolicy::strict ? "strict" : "feedforward";
}

std::string_view to_string(Correction c) {
    switch (c) {
        case Correction::none:
            return "none";
        case Correction::phase_flip:
            return "phase-flip";
        case Correction::bit_flip:
            return "bit-flip";
    }
    return "none";
}

std::string_view to_string(DeviceKind d) {
    switch (d) {
        case DeviceKind::parity:
            return "parity";
        case DeviceKind::dcnot:
            return "dcnot";
        case DeviceKind::cnot:
            return "cnot";
    }
    return "parity";
}

HeraldPolicy parse_policy(std::string_view s) {
    if (s == "strict") return HeraldPolicy::strict;
    if (s == "feedforward") return HeraldPolicy::feedforward;
    throw std::invalid_argument("unknown herald policy '" + std::string(s) + "'");
}

DeviceKind parse_device(std::string_view s) {
    if (s == "parity") return DeviceKind::parity;
    if (s == "dcnot") return DeviceKind::dcnot;
    if (s == "cnot") return DeviceKind::cnot;
    throw std::invalid_argument("unknown device '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Circuits

PhotonicState Circuit::prepare() const {
    PhotonicState s = PhotonicState::vacuum(layout);
    for (const auto &[path, q] : photons) s = inject_photon(s, path, q);
    if (ancilla) {
        PhotonicState hh = inject_photon(inject_photon(s, ancilla->path_a, QubitState::zero()), ancilla->path_b,
                                         QubitState::zero());
        PhotonicState vv =
            inject_photon(inject_photon(s, ancilla->path_a, QubitState::one()), ancilla->path_b, QubitState::one());
        s = superpose(hh, std::numbers::sqrt2 / 2, vv, std::numbers::sqrt2 / 2);
    }
    return s;
}

int Circuit::n_photons() const {
    return static_cast<int>(photons.size()) + (ancilla ? 2 : 0);
}

Circuit parity_circuit(const QubitState &q1, const QubitState &q2, const OpticsConfig &optics) {
    Circuit c;
    c.layout = ModeLayout({kPath1, kPath2});
    c.photons = {{kPath1, q1}, {kPath2, q2}};
    c.unitary = pbs_unitary(PbsSpec{0.0, kPath1, kPath2, optics.reflection_phase, optics.leak}, c.layout);
    c.heralds = {HeraldStage{kPath2, 45.0, kPath1, Correction::phase_flip}};
    c.output_paths = {kPath1};
    return c;
}

Circuit dcnot_circuit(const QubitState &target, const QubitState &control, const OpticsConfig &optics) {
    Circuit c;
    c.layout = ModeLayout({kPath1, kPath2});
    c.photons = {{kPath1, target}, {kPath2, control}};
    c.unitary = pbs_unitary(PbsSpec{45.0, kPath1, kPath2, optics.reflection_phase, optics.leak}, c.layout);
    c.heralds = {HeraldStage{kPath2, 0.0, kPath1, Correction::bit_flip}};
    c.output_paths = {kPath1};
    return c;
}

Circuit cnot_circuit(const QubitState &control, const QubitState &target, const OpticsConfig &optics) {
    // Parity check between the control and one half of a Bell pair copies the
    // control value onto the other half, which then drives a destructive CNOT
    // on the target.
    Circuit c;
    c.layout = ModeLayout({kPath1, kPath2, kPath3, kPath4});
    c.photons = {{kPath1, control}, {kPath2, target}};
    c.ancilla = BellAncilla{kPath3, kPath4};
    auto parity = pbs_unitary(PbsSpec{0.0, kPath1, kPath3, optics.reflection_phase, optics.leak}, c.layout);
    auto dcnot = pbs_unitary(PbsSpec{45.0, kPath2, kPath4, optics.reflection_phase, optics.leak}, c.layout);
    c.unitary = dcnot.then_after(parity);
    c.heralds = {HeraldStage{kPath3, 45.0, kPath1, Correction::phase_flip},
                 HeraldStage{kPath4, 0.0, kPath2, Correction::bit_flip}};
    c.output_paths = {kPath1, kPath2};
    return c;
}

Circuit build_circuit(DeviceKind kind, const DeviceInputs &inputs, const OpticsConfig &optics) {
    switch (kind) {
        case DeviceKind::parity:
            return parity_circuit(inputs.target, inputs.control, optics);
        case DeviceKind::dcnot:
            return dcnot_circuit(inputs.target, inputs.control, optics);
        case DeviceKind::cnot:
            return cnot_circuit(inputs.control, inputs.target, optics);
    }
    throw std::invalid_argument("unknown device");
}

std::vector<std::vector<HeraldPol>> accepted_outcomes(const Circuit &circuit, HeraldPolicy policy) {
    std::vector<std::vector<HeraldPol>> combos{{}};
    for (size_t h = 0; h < circuit.heralds.size(); ++h) {
        std::vector<std::vector<HeraldPol>> next;
        for (const auto &c : combos) {
            auto pass = c;
            pass.push_back(HeraldPol::pass);
            next.push_back(std::move(pass));
            if (policy == HeraldPolicy::feedforward) {
                auto orth = c;
                orth.push_back(HeraldPol::orthogonal);
                next.push_back(std::move(orth));
            }
        }
        combos = std::move(next);
    }
    return combos;
}

Eigen::Matrix2cd correction_jones(Correction c) {
    switch (c) {
        case Correction::none:
            return Eigen::Matrix2cd::Identity();
        case Correction::phase_flip:
            return hwp_jones(0.0);
        case Correction::bit_flip:
            return hwp_jones(45.0);
    }
    return Eigen::Matrix2cd::Identity();
}

// ---------------------------------------------------------------------------
// Outcomes

std::string HeraldBranch::label() const {
    std::ostringstream os;
    for (size_t k = 0; k < outcomes.size(); ++k) {
        os << (k ? "," : "") << outcomes[k].label();
        if (k < corrections.size() && corrections[k] != Correction::none) os << "(" << to_string(corrections[k]) << ")";
    }
    return os.str();
}

std::vector<double> DeviceOutcome::output_distribution() const {
    std::vector<double> d(size_t{1} << n_output_qubits, 0.0);
    if (density.size() == 0) return d;
    for (int k = 0; k < density.rows(); ++k) d[k] = std::max(0.0, density(k, k).real());
    return d;
}

double DeviceOutcome::fidelity(const Eigen::VectorXcd &expected) const {
    if (!(success_probability > 0.0) || density.size() == 0) return 0.0;
    if (expected.size() != density.rows()) throw std::invalid_argument("expected state has the wrong dimension");
    Eigen::VectorXcd psi = expected / expected.norm();
    return std::clamp((psi.adjoint() * density * psi)(0, 0).real(), 0.0, 1.0);
}

std::vector<Correction> DeviceOutcome::corrections_applied() const {
    std::vector<Correction> out;
    for (const auto &b : branches) {
        for (Correction c : b.corrections) {
            if (c != Correction::none && std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
        }
    }
    if (out.empty()) out.push_back(Correction::none);
    return out;
}

DeviceOutcome assemble_outcome(std::vector<HeraldBranch> branches, int n_output_qubits,
                               std::optional<PhotonicState> logical_output) {
    DeviceOutcome out;
    out.n_output_qubits = n_output_qubits;
    const int dim = 1 << n_output_qubits;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    std::ostringstream label;
    for (size_t k = 0; k < branches.size(); ++k) {
        out.success_probability += branches[k].probability;
        if (branches[k].density.size() != 0) rho += branches[k].density;
        label << (k ? " | " : "") << branches[k].label();
    }
    out.herald_label = label.str();
    out.density = out.success_probability > 0.0 ? Eigen::MatrixXcd(rho / out.success_probability)
                                                 : Eigen::MatrixXcd::Zero(dim, dim);
    out.branches = std::move(branches);
    out.logical_output = std::move(logical_output);
    return out;
}

Eigen::VectorXcd logical_amplitudes(const PhotonicState &state, std::span<const int> paths) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << paths.size());
    for (const auto &[fv, a] : state.amplitudes()) {
        int index = 0;
        bool valid = true;
        for (int p : paths) {
            int bit = output_bit(state.layout(), fv, p);
            if (bit < 0) {
                valid = false;
                break;
            }
            index = 2 * index + bit;
        }
        if (valid) v(index) += a;
    }
    return v;
}

PhotonicState logical_state(const ModeLayout &layout, const Eigen::VectorXcd &amplitudes) {
    const int n = layout.n_paths();
    if (amplitudes.size() != (Eigen::Index{1} << n)) throw std::invalid_argument("logical vector has the wrong size");
    PhotonicState::Amplitudes amps;
    for (Eigen::Index idx = 0; idx < amplitudes.size(); ++idx) {
        std::vector<int> occ(layout.n_modes(), 0);
        for (int k = 0; k < n; ++k) {
            int bit = static_cast<int>((idx >> (n - 1 - k)) & 1);
            occ[2 * k + bit] = 1;
        }
        amps[FockVector(std::move(occ))] = amplitudes(idx);
    }
    return PhotonicState::from_amplitudes(layout, amps);
}

DeviceOutcome evaluate_coherent(const Circuit &circuit, HeraldPolicy policy) {
    const PhotonicState evolved = apply_unitary(circuit.prepare(), circuit.unitary);
    const int n_out = static_cast<int>(circuit.output_paths.size());

    std::vector<HeraldBranch> branches;
    std::optional<PhotonicState> first_output;
    for (const auto &combo : accepted_outcomes(circuit, policy)) {
        HeraldBranch br;
        PhotonicState s = evolved;
        double prob = 1.0;
        for (size_t h = 0; h < circuit.heralds.size() && prob > 0.0; ++h) {
            const HeraldStage &stage = circuit.heralds[h];
            HeraldOutcome outcome{stage.path, stage.basis_angle_deg, combo[h]};
            br.outcomes.push_back(outcome);
            PostSelection ps = postselect_one_photon(s, outcome);
            prob *= ps.probability;
            s = ps.conditional;
            Correction corr = combo[h] == HeraldPol::orthogonal ? stage.orthogonal_correction : Correction::none;
            br.corrections.push_back(corr);
            if (corr != Correction::none && !s.empty()) {
                s = apply_unitary(s, local_unitary(s.layout(), stage.corrected_path, correction_jones(corr)));
            }
        }
        // A zero-probability stage short-circuits; keep the outcome list complete.
        for (size_t h = br.outcomes.size(); h < circuit.heralds.size(); ++h) {
            const HeraldStage &stage = circuit.heralds[h];
            br.outcomes.push_back(HeraldOutcome{stage.path, stage.basis_angle_deg, combo[h]});
            br.corrections.push_back(combo[h] == HeraldPol::orthogonal ? stage.orthogonal_correction
                                                                       : Correction::none);
        }
        br.probability = prob;
        if (prob > 0.0) {
            br.logical = std::sqrt(prob) * logical_amplitudes(s, circuit.output_paths);
            if (!first_output) first_output = s;
        } else {
            br.probability = 0.0;
            br.logical = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_out);
        }
        br.density = br.logical * br.logical.adjoint();
        branches.push_back(std::move(br));
    }
    return assemble_outcome(std::move(branches), n_out, std::move(first_output));
}

DeviceOutcome parity_check(const QubitState &q1, const QubitState &q2, HeraldPolicy policy,
                           const OpticsConfig &optics) {
    return evaluate_coherent(parity_circuit(q1, q2, optics), policy);
}

DeviceOutcome destructive_cnot(const QubitState &target, const QubitState &control, HeraldPolicy policy,
                               const OpticsConfig &optics) {
    return evaluate_coherent(dcnot_circuit(target, control, optics), policy);
}

DeviceOutcome full_cnot(const QubitState &control, const QubitState &target, HeraldPolicy policy,
                        const OpticsConfig &optics) {
    return evaluate_coherent(cnot_circuit(control, target, optics), policy);
}

DeviceOutcome run_device(DeviceKind kind, const DeviceInputs &inputs, HeraldPolicy policy,
                         const OpticsConfig &optics) {
    return evaluate_coherent(build_circuit(kind, inputs, optics), policy);
}

Eigen::MatrixXcd cnot_matrix() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    m(0, 0) = 1;
    m(1, 1) = 1;
    m(3, 2) = 1;
    m(2, 3) = 1;
    return m;
}

std::optional<Eigen::VectorXcd> expected_logical_output(DeviceKind kind, const DeviceInputs &inputs) {
    const Eigen::VectorXcd c = qubit_vector(inputs.control);
    const Eigen::VectorXcd t = qubit_vector(inputs.target);
    Eigen::VectorXcd out;
    switch (kind) {
        case DeviceKind::parity:
            // Projection onto equal values; the control's amplitude weights each branch.
            out = t.cwiseProduct(c);
            break;
        case DeviceKind::dcnot: {
            Eigen::VectorXcd flipped(2);
            flipped << t(1), t(0);
            out = c(0) * t + c(1) * flipped;
            break;
        }
        case DeviceKind::cnot: {
            Eigen::VectorXcd ct(4);
            ct << c(0) * t(0), c(0) * t(1), c(1) * t(0), c(1) * t(1);
            out = cnot_matrix() * ct;
            break;
        }
    }
    if (!(out.norm() > 1e-12)) return std::nullopt;
    return Eigen::VectorXcd(out / out.norm());
}

// ---------------------------------------------------------------------------
// Truth tables and scans

std::vector<TruthTableRow> truth_table(DeviceKind kind, HeraldPolicy policy, const OpticsConfig &optics,
                                       double pair_rate_per_minute) {
    return truth_table(
        kind, [&](const DeviceInputs &in) { return run_device(kind, in, policy, optics); }, pair_rate_per_minute);
}

std::vector<TruthTableRow> truth_table(DeviceKind kind, const DeviceRunner &runner, double pair_rate_per_minute) {
    if (!(pair_rate_per_minute >= 0.0)) throw std::invalid_argument("pair rate must be non-negative");
    std::vector<TruthTableRow> rows;
    for (int c = 0; c < 2; ++c) {
        for (int t = 0; t < 2; ++t) {
            DeviceInputs in{QubitState::basis(c), QubitState::basis(t)};
            DeviceOutcome out = runner(in);
            TruthTableRow row;
            row.in_control = c;
            row.in_target = t;
            row.success_probability = out.success_probability;
            row.output_distribution = out.output_distribution();
            switch (kind) {
                case DeviceKind::parity:
                    if (c == t) row.expected_output = t;
                    break;
                case DeviceKind::dcnot:
                    row.expected_output = t ^ c;
                    break;
                case DeviceKind::cnot:
                    row.expected_output = 2 * c + (t ^ c);
                    break;
            }
            if (row.expected_output && row.success_probability > 0.0) {
                row.error = std::max(0.0, 1.0 - row.output_distribution[*row.expected_output]);
            }
            for (double p : row.output_distribution) {
                row.synthetic_counts.push_back(pair_rate_per_minute * row.success_probability * p);
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<ScanPoint> coherence_scan(const QubitState &q1, const QubitState &q2, std::span<const double> angles_deg,
                                      HeraldPolicy policy, const OpticsConfig &optics) {
    if (angles_deg.empty()) throw std::invalid_argument("coherence scan needs at least one angle");
    const Circuit circuit = parity_circuit(q1, q2, optics);
    const HeraldStage &herald = circuit.heralds.front();
    const PhotonicState evolved = apply_unitary(circuit.prepare(), circuit.unitary);
    // Under feedforward the orthogonal herald outcome is counted after its
    // correction; the correction acts on path 1 only, so it commutes with
    // the herald projection and can be applied to the whole state.
    const PhotonicState corrected =
        apply_unitary(evolved, local_unitary(evolved.layout(), herald.corrected_path,
                                             correction_jones(herald.orthogonal_correction)));

    std::vector<ScanPoint> out;
    out.reserve(angles_deg.size());
    for (double angle : angles_deg) {
        const double wrapped = wrap_degrees(angle);
        std::array<AnalyzerSetting, 2> pass{AnalyzerSetting{herald.corrected_path, wrapped},
                                            AnalyzerSetting{herald.path, herald.basis_angle_deg}};
        double p = coincidence_probability(evolved, pass);
        if (policy == HeraldPolicy::feedforward) {
            std::array<AnalyzerSetting, 2> orth{AnalyzerSetting{herald.corrected_path, wrapped},
                                                AnalyzerSetting{herald.path, wrap_degrees(herald.basis_angle_deg + 90.0)}};
            p += coincidence_probability(corrected, orth);
        }
        out.push_back(ScanPoint{angle, p});
    }
    return out;
}

MalusFit fit_malus(std::span<const ScanPoint> points) {
    if (points.size() < 3) throw std::invalid_argument("Malus fit needs at least three points");
    Eigen::MatrixXd a(points.size(), 3);
    Eigen::VectorXd y(points.size());
    for (size_t k = 0; k < points.size(); ++k) {
        const double x = 2.0 * points[k].angle_deg * kDeg;
        a(k, 0) = 1.0;
        a(k, 1) = std::cos(x);
        a(k, 2) = std::sin(x);
        y(k) = points[k].coincidence_probability;
    }
    const Eigen::Vector3d coef = a.colPivHouseholderQr().solve(y);
    const double swing = std::hypot(coef(1), coef(2));
    MalusFit fit;
    fit.peak_angle_deg = wrap_degrees(0.5 * std::atan2(coef(2), coef(1)) / kDeg);
    fit.zero_angle_deg = wrap_degrees(fit.peak_angle_deg + 90.0);
    fit.amplitude = coef(0) + swing;
    fit.floor = coef(0) - swing;
    fit.rms_residual = std::sqrt((a * coef - y).squaredNorm() / static_cast<double>(points.size()));
    return fit;
}

double process_fidelity(DeviceKind kind, HeraldPolicy policy, const Eigen::MatrixXcd &ideal,
                        const OpticsConfig &optics) {
    const int d = 4;
    if (ideal.cols() != d) throw std::invalid_argument("ideal map must act on two input qubits");
    std::vector<Eigen::MatrixXcd> kraus;
    for (int j = 0; j < d; ++j) {
        DeviceInputs in{QubitState::basis(j >> 1), QubitState::basis(j & 1)};
        DeviceOutcome out = run_device(kind, in, policy, optics);
        if (kraus.empty()) {
            kraus.assign(out.branches.size(), Eigen::MatrixXcd::Zero(ideal.rows(), d));
        }
        for (size_t b = 0; b < out.branches.size(); ++b) {
            if (out.branches[b].logical.size() != ideal.rows()) {
                throw std::invalid_argument("ideal map has the wrong output dimension");
            }
            kraus[b].col(j) = out.branches[b].logical;
        }
    }
    double overlap = 0.0;
    double weight = 0.0;
    for (const auto &k : kraus) {
        overlap += std::norm((ideal.adjoint() * k).trace());
        weight += (k.adjoint() * k).trace().real();
    }
    if (!(weight > 0.0)) return 0.0;
    return overlap / (static_cast<double>(d) * weight);
}

}  // namespace optiq
