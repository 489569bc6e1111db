#include "optiq/imperfections.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace optiq {

namespace {

Eigen::VectorXcd single_photon_vector(const ModeLayout &layout, int path, const QubitState &q) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(layout.n_modes());
    v(layout.mode(path, Pol::H)) = q.alpha();
    v(layout.mode(path, Pol::V)) = q.beta();
    return v;
}

// Calls fn(modes, amplitude) for every assignment of labeled photons to modes
// with a nonzero product amplitude.
template <typename Fn>
void for_each_assignment(const std::vector<Eigen::VectorXcd> &photons, int n_modes, Fn &&fn) {
    const size_t n = photons.size();
    std::vector<int> modes(n, 0);
    auto rec = [&](auto &&self, size_t k, cplx amp) -> void {
        if (k == n) {
            fn(modes, amp);
            return;
        }
        for (int m = 0; m < n_modes; ++m) {
            cplx a = photons[k](m);
            if (a == cplx(0.0)) continue;
            modes[k] = m;
            self(self, k + 1, amp * a);
        }
    };
    rec(rec, 0, cplx(1.0));
}

// Applies a 2x2 Jones matrix to qubit `position` (0 = most significant) of
// an n-qubit logical vector.
Eigen::VectorXcd apply_on_qubit(const Eigen::VectorXcd &v, int position, int n_qubits, const Eigen::Matrix2cd &j) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
    const int shift = n_qubits - 1 - position;
    for (Eigen::Index idx = 0; idx < v.size(); ++idx) {
        const int bit = static_cast<int>((idx >> shift) & 1);
        const Eigen::Index base = idx & ~(Eigen::Index{1} << shift);
        out(base) += j(0, bit) * v(idx);
        out(base | (Eigen::Index{1} << shift)) += j(1, bit) * v(idx);
    }
    return out;
}

bool is_basis_pair(const DeviceInputs &in) {
    auto basis = [](const QubitState &q) { return std::abs(q.alpha()) == 0.0 || std::abs(q.beta()) == 0.0; };
    return basis(in.control) && basis(in.target);
}

QubitState haar_qubit(std::mt19937_64 &rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    cplx a(g(rng), g(rng));
    cplx b(g(rng), g(rng));
    return QubitState::normalize(a, b);
}

}  // namespace

// ---------------------------------------------------------------------------

VisibilityModel::VisibilityModel(double overlap) : overlap_(overlap) {
    if (!(overlap >= 0.0 && overlap <= 1.0)) {
        throw std::invalid_argument("visibility must lie in [0, 1], got " + std::to_string(overlap));
    }
}

VisibilityModel VisibilityModel::from_delay(double delay_um, double coherence_length_um) {
    if (!(coherence_length_um > 0.0)) throw std::invalid_argument("coherence length must be positive");
    if (!std::isfinite(delay_um)) throw std::invalid_argument("delay must be finite");
    const double x = delay_um / coherence_length_um;
    return VisibilityModel(std::exp(-x * x));
}

LabeledPhotons::LabeledPhotons(ModeLayout layout, std::vector<Eigen::VectorXcd> photons)
    : layout_(std::move(layout)), photons_(std::move(photons)) {
    if (static_cast<int>(photons_.size()) > kMaxPhotons) throw std::invalid_argument("too many photons");
    for (const auto &p : photons_) {
        if (p.size() != layout_.n_modes()) throw std::invalid_argument("photon vector has the wrong dimension");
    }
}

LabeledPhotons LabeledPhotons::from_fock(const ModeLayout &layout, const FockVector &occupation) {
    if (occupation.size() != layout.n_modes()) throw std::invalid_argument("occupation has the wrong length");
    std::vector<Eigen::VectorXcd> photons;
    for (int m = 0; m < occupation.size(); ++m) {
        for (int k = 0; k < occupation[m]; ++k) {
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(layout.n_modes());
            v(m) = 1.0;
            photons.push_back(std::move(v));
        }
    }
    return LabeledPhotons(layout, std::move(photons));
}

LabeledPhotons LabeledPhotons::apply(const SingleParticleUnitary &u) const {
    if (u.n_modes() != layout_.n_modes()) throw std::invalid_argument("unitary dimension mismatch");
    std::vector<Eigen::VectorXcd> out;
    out.reserve(photons_.size());
    for (const auto &p : photons_) out.push_back(u.matrix() * p);
    return LabeledPhotons(layout_, std::move(out));
}

double LabeledPhotons::pattern_probability(const FockVector &pattern) const {
    if (pattern.size() != layout_.n_modes()) throw std::invalid_argument("pattern has the wrong length");
    if (pattern.total() != static_cast<int>(photons_.size())) return 0.0;
    double p = 0.0;
    std::vector<int> occ(layout_.n_modes());
    for_each_assignment(photons_, layout_.n_modes(), [&](const std::vector<int> &modes, cplx amp) {
        std::fill(occ.begin(), occ.end(), 0);
        for (int m : modes) ++occ[m];
        if (occ == pattern.occupations()) p += std::norm(amp);
    });
    return p;
}

// ---------------------------------------------------------------------------

DeviceOutcome evaluate_distinguishable(const Circuit &circuit, HeraldPolicy policy) {
    if (circuit.ancilla) {
        throw std::invalid_argument("labeled-photon runs support product-input two-photon devices only");
    }
    const ModeLayout &layout = circuit.layout;
    const int n_modes = layout.n_modes();
    const int n_out = static_cast<int>(circuit.output_paths.size());
    const Eigen::Index dim = Eigen::Index{1} << n_out;

    std::vector<Eigen::VectorXcd> evolved;
    for (const auto &[path, q] : circuit.photons) {
        evolved.push_back(circuit.unitary.matrix() * single_photon_vector(layout, path, q));
    }

    std::vector<HeraldBranch> branches;
    for (const auto &combo : accepted_outcomes(circuit, policy)) {
        HeraldBranch br;
        // Rotate every herald path into its measurement basis.
        Eigen::MatrixXcd to_basis = Eigen::MatrixXcd::Identity(n_modes, n_modes);
        for (size_t h = 0; h < circuit.heralds.size(); ++h) {
            const HeraldStage &stage = circuit.heralds[h];
            br.outcomes.push_back(HeraldOutcome{stage.path, stage.basis_angle_deg, combo[h]});
            br.corrections.push_back(combo[h] == HeraldPol::orthogonal ? stage.orthogonal_correction
                                                                       : Correction::none);
            to_basis = rotation_unitary(layout, stage.path, stage.basis_angle_deg).adjoint().matrix() * to_basis;
        }
        std::vector<Eigen::VectorXcd> photons;
        for (const auto &v : evolved) photons.push_back(to_basis * v);

        // Each label-to-path assignment is an orthogonal, non-interfering branch.
        std::map<std::vector<int>, Eigen::VectorXcd> by_assignment;
        double prob = 0.0;
        std::vector<int> occ(n_modes);
        for_each_assignment(photons, n_modes, [&](const std::vector<int> &modes, cplx amp) {
            std::fill(occ.begin(), occ.end(), 0);
            for (int m : modes) ++occ[m];
            for (size_t h = 0; h < circuit.heralds.size(); ++h) {
                const int mh = layout.mode(circuit.heralds[h].path, Pol::H);
                const bool pass = combo[h] == HeraldPol::pass;
                if (occ[mh] != (pass ? 1 : 0) || occ[mh + 1] != (pass ? 0 : 1)) return;
            }
            prob += std::norm(amp);
            Eigen::Index idx = 0;
            for (int p : circuit.output_paths) {
                const int mh = layout.mode(p, Pol::H);
                if (occ[mh] + occ[mh + 1] != 1) return;
                idx = 2 * idx + occ[mh + 1];
            }
            std::vector<int> key(modes.size());
            for (size_t k = 0; k < modes.size(); ++k) key[k] = layout.mode_at(modes[k]).path;
            auto [it, inserted] = by_assignment.try_emplace(key, Eigen::VectorXcd::Zero(dim));
            it->second(idx) += amp;
        });

        br.probability = prob;
        br.density = Eigen::MatrixXcd::Zero(dim, dim);
        for (auto &[key, vec] : by_assignment) {
            for (size_t h = 0; h < circuit.heralds.size(); ++h) {
                if (br.corrections[h] == Correction::none) continue;
                auto pos = std::find(circuit.output_paths.begin(), circuit.output_paths.end(),
                                     circuit.heralds[h].corrected_path);
                vec = apply_on_qubit(vec, static_cast<int>(pos - circuit.output_paths.begin()), n_out,
                                     correction_jones(br.corrections[h]));
            }
            br.density += vec * vec.adjoint();
        }
        branches.push_back(std::move(br));
    }
    return assemble_outcome(std::move(branches), n_out);
}

DeviceOutcome run_distinguishable(DeviceKind kind, const DeviceInputs &inputs, HeraldPolicy policy,
                                  const OpticsConfig &optics) {
    if (kind == DeviceKind::cnot) {
        throw std::invalid_argument("labeled-photon runs support the two-photon devices (parity, dcnot) only");
    }
    return evaluate_distinguishable(build_circuit(kind, inputs, optics), policy);
}

DeviceOutcome mix_outcomes(double coherent_weight, const DeviceOutcome &coherent, const DeviceOutcome &labeled) {
    if (coherent.branches.size() != labeled.branches.size() || coherent.n_output_qubits != labeled.n_output_qubits) {
        throw std::invalid_argument("outcomes have different branch structure");
    }
    const double w = coherent_weight;
    std::vector<HeraldBranch> branches;
    for (size_t b = 0; b < coherent.branches.size(); ++b) {
        HeraldBranch br;
        br.outcomes = coherent.branches[b].outcomes;
        br.corrections = coherent.branches[b].corrections;
        br.probability = w * coherent.branches[b].probability + (1.0 - w) * labeled.branches[b].probability;
        br.density = w * coherent.branches[b].density + (1.0 - w) * labeled.branches[b].density;
        branches.push_back(std::move(br));
    }
    return assemble_outcome(std::move(branches), coherent.n_output_qubits);
}

DeviceOutcome run_with_visibility(DeviceKind kind, const DeviceInputs &inputs, const VisibilityModel &model,
                                  HeraldPolicy policy, const OpticsConfig &optics) {
    const double w = model.coherent_weight();
    if (w == 1.0) return run_device(kind, inputs, policy, optics);
    if (kind == DeviceKind::cnot) {
        throw std::invalid_argument("partial distinguishability is modeled for the two-photon devices only");
    }
    DeviceOutcome labeled = run_distinguishable(kind, inputs, policy, optics);
    if (w == 0.0) return labeled;
    return mix_outcomes(w, run_device(kind, inputs, policy, optics), labeled);
}

std::vector<DeviceInputs> error_grid(const InputGrid &grid) {
    if (grid.random_pairs < 0) throw std::invalid_argument("random pair count must be non-negative");
    std::vector<DeviceInputs> out;
    for (int c = 0; c < 2; ++c) {
        for (int t = 0; t < 2; ++t) out.push_back(DeviceInputs{QubitState::basis(c), QubitState::basis(t)});
    }
    std::mt19937_64 rng(grid.seed);
    for (int k = 0; k < grid.random_pairs; ++k) {
        QubitState c = haar_qubit(rng);
        QubitState t = haar_qubit(rng);
        out.push_back(DeviceInputs{c, t});
    }
    return out;
}

double output_error(DeviceKind kind, const DeviceInputs &inputs, const DeviceOutcome &outcome, HeraldPolicy policy,
                    const OpticsConfig &ideal_optics) {
    if (!(outcome.success_probability > 0.0)) return 0.0;
    const DeviceOutcome ideal = run_device(kind, inputs, policy, OpticsConfig{ideal_optics.reflection_phase, 0.0});
    if (!(ideal.success_probability > 0.0)) return 1.0;
    const auto best = std::max_element(ideal.branches.begin(), ideal.branches.end(),
                                       [](const auto &a, const auto &b) { return a.probability < b.probability; });
    const double err = 1.0 - outcome.fidelity(best->logical);
    return err < kErrorFloor ? 0.0 : err;
}

ErrorReport error_report(DeviceKind kind, const VisibilityModel &model, HeraldPolicy policy,
                         const ExtinctionSpec &extinction, const InputGrid &grid, double reflection_phase) {
    const OpticsConfig optics{reflection_phase, extinction.leak};
    ErrorReport report;
    double sum = 0.0;
    for (const DeviceInputs &in : error_grid(grid)) {
        const DeviceOutcome out = run_with_visibility(kind, in, model, policy, optics);
        InputError e;
        e.inputs = in;
        e.basis_input = is_basis_pair(in);
        e.success_probability = out.success_probability;
        e.error = output_error(kind, in, out, policy, optics);
        if (e.basis_input) report.worst_case_error = std::max(report.worst_case_error, e.error);
        sum += e.error;
        report.per_input.push_back(e);
    }
    report.mean_error = report.per_input.empty() ? 0.0 : sum / static_cast<double>(report.per_input.size());
    return report;
}

double fit_visibility(DeviceKind kind, double target_worst_case_error, HeraldPolicy policy,
                      const ExtinctionSpec &extinction, double tolerance) {
    const InputGrid basis_only{0, 0};
    auto worst = [&](double v) {
        return error_report(kind, VisibilityModel(v), policy, extinction, basis_only).worst_case_error;
    };
    double lo = 0.0;
    double hi = 1.0;
    const double at_lo = worst(lo);
    const double at_hi = worst(hi);
    if (target_worst_case_error > at_lo || target_worst_case_error < at_hi) {
        throw std::invalid_argument("target error lies outside the range reachable by the visibility model");
    }
    // Error is non-increasing in v, so keep error(lo) >= target >= error(hi).
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (worst(mid) >= target_worst_case_error) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace optiq
