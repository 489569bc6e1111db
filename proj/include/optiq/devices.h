#ifndef OPTIQ_DEVICES_H
#define OPTIQ_DEVICES_H

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "optiq/fock.h"
#include "optiq/optics.h"
#include "optiq/qubit.h"

namespace optiq {

enum class HeraldPolicy {
    strict,       // accept only the designated herald outcome
    feedforward,  // accept both outcomes and correct the output classically
};

enum class Correction { none, phase_flip, bit_flip };

enum class DeviceKind { parity, dcnot, cnot };

std::string_view to_string(HeraldPolicy p);
std::string_view to_string(Correction c);
std::string_view to_string(DeviceKind d);
HeraldPolicy parse_policy(std::string_view s);
DeviceKind parse_device(std::string_view s);

/// Knobs shared by every splitter in a device.
struct OpticsConfig {
    double reflection_phase = 0.0;
    double leak = 0.0;
};

/// Two-qubit device input. The parity check compares `target` (path 1, the
/// qubit passed through) against `control` (path 2, the qubit consumed at the
/// herald), which is the same geometric role the DCNOT assigns them.
struct DeviceInputs {
    QubitState control;
    QubitState target;
};

/// Detector on `path` in the basis rotated by `basis_angle_deg`. The pass-axis
/// outcome is the designated one; the orthogonal outcome, when accepted,
/// triggers `orthogonal_correction` on `corrected_path`.
struct HeraldStage {
    int path = 0;
    double basis_angle_deg = 0.0;
    int corrected_path = 0;
    Correction orthogonal_correction = Correction::none;
};

struct BellAncilla {
    int path_a = 0;
    int path_b = 0;
};

/// Linear-optical network with product-state inputs, an optional
/// (|HH> + |VV>)/sqrt(2) ancilla pair, heralds, and logical output paths.
struct Circuit {
    ModeLayout layout;
    std::vector<std::pair<int, QubitState>> photons;
    std::optional<BellAncilla> ancilla;
    SingleParticleUnitary unitary = SingleParticleUnitary::identity(0);
    std::vector<HeraldStage> heralds;
    std::vector<int> output_paths;

    PhotonicState prepare() const;
    int n_photons() const;
};

Circuit parity_circuit(const QubitState &q1, const QubitState &q2, const OpticsConfig &optics = {});
Circuit dcnot_circuit(const QubitState &target, const QubitState &control, const OpticsConfig &optics = {});
Circuit cnot_circuit(const QubitState &control, const QubitState &target, const OpticsConfig &optics = {});
Circuit build_circuit(DeviceKind kind, const DeviceInputs &inputs, const OpticsConfig &optics = {});

/// Outcome combinations accepted under `policy`, one entry per herald stage.
std::vector<std::vector<HeraldPol>> accepted_outcomes(const Circuit &circuit, HeraldPolicy policy);

Eigen::Matrix2cd correction_jones(Correction c);

struct HeraldBranch {
    std::vector<HeraldOutcome> outcomes;
    std::vector<Correction> corrections;
    double probability = 0.0;
    /// Unnormalized corrected logical amplitudes; empty when the branch is
    /// not a pure state (labeled-photon runs and mixtures).
    Eigen::VectorXcd logical;
    /// Unnormalized logical density matrix; its trace is the branch weight
    /// inside the one-photon-per-output-path subspace.
    Eigen::MatrixXcd density;

    std::string label() const;
};

struct DeviceOutcome {
    double success_probability = 0.0;
    std::string herald_label;
    /// Normalized output over the output paths when the run is pure.
    std::optional<PhotonicState> logical_output;
    std::vector<HeraldBranch> branches;
    int n_output_qubits = 0;
    /// Logical density matrix divided by the success probability.
    Eigen::MatrixXcd density;

    std::vector<double> output_distribution() const;
    /// <psi| rho |psi> for a normalized logical vector psi; 0 when nothing is accepted.
    double fidelity(const Eigen::VectorXcd &expected) const;
    std::vector<Correction> corrections_applied() const;
};

/// Assembles an outcome from per-branch data; fills success probability,
/// density and labels.
DeviceOutcome assemble_outcome(std::vector<HeraldBranch> branches, int n_output_qubits,
                               std::optional<PhotonicState> logical_output = std::nullopt);

/// Fock-space simulation of a circuit with two-photon interference.
DeviceOutcome evaluate_coherent(const Circuit &circuit, HeraldPolicy policy);

/// Amplitudes of a state with one photon per listed path, indexed with the
/// first path as the most significant bit. Components outside that subspace
/// are ignored.
Eigen::VectorXcd logical_amplitudes(const PhotonicState &state, std::span<const int> paths);
PhotonicState logical_state(const ModeLayout &layout, const Eigen::VectorXcd &amplitudes);

DeviceOutcome parity_check(const QubitState &q1, const QubitState &q2, HeraldPolicy policy,
                           const OpticsConfig &optics = {});
DeviceOutcome destructive_cnot(const QubitState &target, const QubitState &control, HeraldPolicy policy,
                               const OpticsConfig &optics = {});
DeviceOutcome full_cnot(const QubitState &control, const QubitState &target, HeraldPolicy policy,
                        const OpticsConfig &optics = {});
DeviceOutcome run_device(DeviceKind kind, const DeviceInputs &inputs, HeraldPolicy policy,
                         const OpticsConfig &optics = {});

/// Logical output the ideal gate should produce, or nullopt when the ideal
/// device rejects the input (parity mismatch).
std::optional<Eigen::VectorXcd> expected_logical_output(DeviceKind kind, const DeviceInputs &inputs);

struct TruthTableRow {
    int in_control = 0;
    int in_target = 0;
    std::vector<double> output_distribution;
    double success_probability = 0.0;
    std::optional<int> expected_output;
    double error = 0.0;
    std::vector<double> synthetic_counts;
};

inline constexpr double kDefaultPairRatePerMinute = 6000.0;

using DeviceRunner = std::function<DeviceOutcome(const DeviceInputs &)>;

std::vector<TruthTableRow> truth_table(DeviceKind kind, HeraldPolicy policy, const OpticsConfig &optics = {},
                                       double pair_rate_per_minute = kDefaultPairRatePerMinute);
/// Same table for an arbitrary runner, e.g. one with an imperfection model.
std::vector<TruthTableRow> truth_table(DeviceKind kind, const DeviceRunner &runner,
                                       double pair_rate_per_minute = kDefaultPairRatePerMinute);

struct ScanPoint {
    double angle_deg = 0.0;
    double coincidence_probability = 0.0;
};

/// Coincidence rate of the parity check versus the output analyzer angle,
/// with the herald analyzer fixed at the designated outcome (plus the
/// corrected orthogonal outcome under feedforward).
std::vector<ScanPoint> coherence_scan(const QubitState &q1, const QubitState &q2, std::span<const double> angles_deg,
                                      HeraldPolicy policy = HeraldPolicy::strict, const OpticsConfig &optics = {});

/// Least-squares fit y = a + b cos 2x + c sin 2x, reported as a Malus curve.
struct MalusFit {
    double peak_angle_deg = 0.0;  // in [0, 180)
    double zero_angle_deg = 0.0;  // peak + 90, wrapped
    double amplitude = 0.0;       // fitted maximum
    double floor = 0.0;           // fitted minimum
    double rms_residual = 0.0;
};

MalusFit fit_malus(std::span<const ScanPoint> points);

/// Sum over Kraus branches of |Tr(U^dagger K)|^2 / (d * sum Tr(K^dagger K)),
/// with K built column by column from basis-state runs.
double process_fidelity(DeviceKind kind, HeraldPolicy policy, const Eigen::MatrixXcd &ideal,
                        const OpticsConfig &optics = {});

Eigen::MatrixXcd cnot_matrix();

}  // namespace optiq

#endif
