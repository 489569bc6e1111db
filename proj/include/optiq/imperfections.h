#ifndef OPTIQ_IMPERFECTIONS_H
#define OPTIQ_IMPERFECTIONS_H

#include <cstdint>
#include <vector>

#include "optiq/devices.h"

namespace optiq {

/// Coherence length (micrometres) of a 10 nm band at 702 nm, lambda^2 / dlambda.
inline constexpr double kDefaultCoherenceLengthUm = 702.0 * 702.0 / 10.0 / 1000.0;

/// Wavepacket amplitude overlap of the interfering photons.
class VisibilityModel {
   public:
    VisibilityModel() = default;
    explicit VisibilityModel(double overlap);
    /// Gaussian overlap exp(-(delay/tau)^2) for a path-length mismatch.
    static VisibilityModel from_delay(double delay_um, double coherence_length_um = kDefaultCoherenceLengthUm);

    double overlap() const { return overlap_; }
    /// Weight of the indistinguishable component, v^2.
    double coherent_weight() const { return overlap_ * overlap_; }

   private:
    double overlap_ = 1.0;
};

struct ExtinctionSpec {
    double leak = 0.0;
};

/// Photons tagged with distinct internal labels: each keeps its own
/// single-particle amplitude vector and never interferes with the others.
class LabeledPhotons {
   public:
    LabeledPhotons(ModeLayout layout, std::vector<Eigen::VectorXcd> photons);
    static LabeledPhotons from_fock(const ModeLayout &layout, const FockVector &occupation);

    const ModeLayout &layout() const { return layout_; }
    const std::vector<Eigen::VectorXcd> &photons() const { return photons_; }
    LabeledPhotons apply(const SingleParticleUnitary &u) const;

    /// Probability of a label-blind detection pattern.
    double pattern_probability(const FockVector &pattern) const;

   private:
    ModeLayout layout_;
    std::vector<Eigen::VectorXcd> photons_;
};

/// Classical baseline: the circuit run with fully distinguishable photons.
/// Only product-input circuits (no ancilla pair) are supported.
DeviceOutcome evaluate_distinguishable(const Circuit &circuit, HeraldPolicy policy);

DeviceOutcome run_distinguishable(DeviceKind kind, const DeviceInputs &inputs, HeraldPolicy policy,
                                  const OpticsConfig &optics = {});

/// Mixture w * coherent + (1 - w) * distinguishable with w = v^2. At v = 1
/// the coherent run is returned unchanged.
DeviceOutcome run_with_visibility(DeviceKind kind, const DeviceInputs &inputs, const VisibilityModel &model,
                                  HeraldPolicy policy, const OpticsConfig &optics = {});

/// Branch-wise mixture of two outcomes with identical branch structure.
DeviceOutcome mix_outcomes(double coherent_weight, const DeviceOutcome &coherent, const DeviceOutcome &labeled);

struct InputGrid {
    int random_pairs = 100;
    std::uint64_t seed = 20011107;
};

std::vector<DeviceInputs> error_grid(const InputGrid &grid);

struct InputError {
    DeviceInputs inputs;
    bool basis_input = false;
    double success_probability = 0.0;
    double error = 0.0;
};

struct ErrorReport {
    double worst_case_error = 0.0;  // over the four basis inputs
    double mean_error = 0.0;        // over the whole grid
    std::vector<InputError> per_input;
};

/// Errors below this are rounding residue and are reported as zero.
inline constexpr double kErrorFloor = 1e-12;

/// 1 - fidelity with the ideal device output; zero when the ideal device or
/// the model accepts nothing.
double output_error(DeviceKind kind, const DeviceInputs &inputs, const DeviceOutcome &outcome, HeraldPolicy policy,
                    const OpticsConfig &ideal_optics = {});

ErrorReport error_report(DeviceKind kind, const VisibilityModel &model, HeraldPolicy policy,
                         const ExtinctionSpec &extinction = {}, const InputGrid &grid = {}, double reflection_phase = 0.0);

/// Bisection for the visibility whose worst-case basis error equals `target`.
double fit_visibility(DeviceKind kind, double target_worst_case_error, HeraldPolicy policy,
                      const ExtinctionSpec &extinction = {}, double tolerance = 1e-12);

}  // namespace optiq

#endif
