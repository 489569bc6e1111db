#ifndef OPTIQ_OPTICS_H
#define OPTIQ_OPTICS_H

#include <span>
#include <string>

#include "optiq/fock.h"

namespace optiq {

/// Polarizing beam splitter joining paths a and b. In the basis rotated by
/// `basis_angle_deg`, the pass-axis component is transmitted (a->a', b->b')
/// and the orthogonal component is reflected (a->b', b->a') with phase
/// exp(i*reflection_phase). `leak` is the amplitude routed to the wrong port,
/// applied as a path-mixing rotation after the ideal splitter.
struct PbsSpec {
    double basis_angle_deg = 0.0;
    int path_a = 0;
    int path_b = 1;
    double reflection_phase = 0.0;
    double leak = 0.0;
};

struct WavePlateSpec {
    double axis_angle_deg = 0.0;
    int path = 0;
};

struct AnalyzerSetting {
    int path = 0;
    double angle_deg = 0.0;
};

enum class HeraldPol { pass, orthogonal };

/// One outcome of a two-detector polarization-resolving measurement on `path`.
struct HeraldOutcome {
    int path = 0;
    double basis_angle_deg = 0.0;
    HeraldPol accepted = HeraldPol::pass;

    /// e.g. "2:+45" or "2:V".
    std::string label() const;
};

struct PostSelection {
    double probability = 0.0;
    /// Normalized state of the remaining paths; empty when probability is 0.
    PhotonicState conditional;
};

/// Jones matrix of a polarizer basis change: columns are the pass axis and
/// the orthogonal axis at `angle_deg`.
Eigen::Matrix2cd rotation_jones(double angle_deg);
Eigen::Matrix2cd hwp_jones(double axis_angle_deg);

/// Embeds a 2x2 Jones matrix on one path's (H, V) pair.
SingleParticleUnitary local_unitary(const ModeLayout &layout, int path, const Eigen::Matrix2cd &jones);

SingleParticleUnitary pbs_unitary(const PbsSpec &spec, const ModeLayout &layout);
SingleParticleUnitary hwp_unitary(const WavePlateSpec &spec, const ModeLayout &layout);
/// Maps H to the axis at `angle_deg` and V to its orthogonal partner on `path`.
SingleParticleUnitary rotation_unitary(const ModeLayout &layout, int path, double angle_deg);

/// Projects onto exactly one photon in the accepted mode of the herald and
/// none in its orthogonal partner; the herald path is removed.
PostSelection postselect_one_photon(const PhotonicState &state, const HeraldOutcome &herald);

/// Probability that every analyzed path holds exactly one photon, found
/// along the analyzer's pass axis.
double coincidence_probability(const PhotonicState &state, std::span<const AnalyzerSetting> analyzers);

}  // namespace optiq

#endif
