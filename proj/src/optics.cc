#include "optiq/optics.h"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace optiq {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void check_angle(double deg, const char *what) {
    if (!(deg >= 0.0 && deg < 180.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 180) degrees, got " + std::to_string(deg));
    }
}

std::string format_angle(double deg) {
    std::ostringstream os;
    os << deg;
    return os.str();
}

}  // namespace

std::string HeraldOutcome::label() const {
    double axis = accepted == HeraldPol::pass ? basis_angle_deg : basis_angle_deg + 90.0;
    std::string pol;
    if (axis == 0.0 || axis == 180.0) {
        pol = "H";
    } else if (axis == 90.0) {
        pol = "V";
    } else if (axis == 45.0) {
        pol = "+45";
    } else if (axis == 135.0) {
        pol = "-45";
    } else {
        pol = format_angle(axis);
    }
    return std::to_string(path) + ":" + pol;
}

Eigen::Matrix2cd rotation_jones(double angle_deg) {
    double c = std::cos(angle_deg * kDeg);
    double s = std::sin(angle_deg * kDeg);
    Eigen::Matrix2cd r;
    r << c, -s, s, c;
    return r;
}

Eigen::Matrix2cd hwp_jones(double axis_angle_deg) {
    double c = std::cos(2.0 * axis_angle_deg * kDeg);
    double s = std::sin(2.0 * axis_angle_deg * kDeg);
    Eigen::Matrix2cd j;
    j << c, s, s, -c;
    return j;
}

SingleParticleUnitary local_unitary(const ModeLayout &layout, int path, const Eigen::Matrix2cd &jones) {
    int mh = layout.mode(path, Pol::H);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(layout.n_modes(), layout.n_modes());
    m.block<2, 2>(mh, mh) = jones;
    return SingleParticleUnitary(std::move(m));
}

SingleParticleUnitary rotation_unitary(const ModeLayout &layout, int path, double angle_deg) {
    return local_unitary(layout, path, rotation_jones(angle_deg));
}

SingleParticleUnitary hwp_unitary(const WavePlateSpec &spec, const ModeLayout &layout) {
    check_angle(spec.axis_angle_deg, "wave plate axis");
    return local_unitary(layout, spec.path, hwp_jones(spec.axis_angle_deg));
}

SingleParticleUnitary pbs_unitary(const PbsSpec &spec, const ModeLayout &layout) {
    check_angle(spec.basis_angle_deg, "PBS basis angle");
    if (spec.path_a == spec.path_b) throw std::invalid_argument("PBS paths must be distinct");
    if (!(spec.leak >= 0.0 && spec.leak < 1.0)) throw std::invalid_argument("PBS leak must lie in [0, 1)");

    const int a = spec.path_a;
    const int b = spec.path_b;
    const int n = layout.n_modes();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n);
    // Clear the four modes touched by the splitter.
    for (int p : {a, b}) {
        for (Pol pol : {Pol::H, Pol::V}) {
            int k = layout.mode(p, pol);
            m(k, k) = 0.0;
        }
    }

    const Eigen::Matrix2cd r = rotation_jones(spec.basis_angle_deg);
    const Eigen::Vector2cd pass = r.col(0);
    const Eigen::Vector2cd orth = r.col(1);
    const cplx refl = std::polar(1.0, spec.reflection_phase);

    for (auto [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
        for (Pol pol : {Pol::H, Pol::V}) {
            const int col = layout.mode(from, pol);
            const int lab = static_cast<int>(pol);
            // Components of the lab polarization along the rotated axes (real basis).
            const cplx c_pass = std::conj(pass(lab));
            const cplx c_orth = std::conj(orth(lab));
            for (int out = 0; out < 2; ++out) {
                m(layout.mode(from, static_cast<Pol>(out)), col) += c_pass * pass(out);
                m(layout.mode(to, static_cast<Pol>(out)), col) += refl * c_orth * orth(out);
            }
        }
    }

    if (spec.leak != 0.0) {
        const double c = std::sqrt(1.0 - spec.leak * spec.leak);
        const double e = spec.leak;
        Eigen::MatrixXcd mix = Eigen::MatrixXcd::Identity(n, n);
        for (Pol pol : {Pol::H, Pol::V}) {
            int ka = layout.mode(a, pol);
            int kb = layout.mode(b, pol);
            mix(ka, ka) = c;
            mix(kb, kb) = c;
            mix(kb, ka) = e;
            mix(ka, kb) = -e;
        }
        m = mix * m;
    }
    return SingleParticleUnitary(std::move(m));
}

PostSelection postselect_one_photon(const PhotonicState &state, const HeraldOutcome &herald) {
    if (!state.layout().has_path(herald.path)) {
        throw std::invalid_argument("herald path " + std::to_string(herald.path) + " is not part of the state");
    }
    // Rotate the herald path so the measured basis coincides with the lab H/V modes.
    auto to_basis = rotation_unitary(state.layout(), herald.path, herald.basis_angle_deg).adjoint();
    PhotonicState rotated = apply_unitary(state, to_basis);
    PhotonicState kept = herald.accepted == HeraldPol::pass ? contract_path(rotated, herald.path, 1, 0)
                                                            : contract_path(rotated, herald.path, 0, 1);
    PostSelection out;
    out.probability = kept.norm_squared();
    if (out.probability > 0.0) {
        out.conditional = kept.normalized();
    } else {
        out.probability = 0.0;
        out.conditional = kept;
    }
    return out;
}

double coincidence_probability(const PhotonicState &state, std::span<const AnalyzerSetting> analyzers) {
    std::set<int> seen;
    PhotonicState s = state;
    for (const auto &an : analyzers) {
        if (!seen.insert(an.path).second) {
            throw std::invalid_argument("duplicate analyzer on path " + std::to_string(an.path));
        }
        check_angle(an.angle_deg, "analyzer angle");
        s = apply_unitary(s, rotation_unitary(s.layout(), an.path, an.angle_deg).adjoint());
    }
    double p = 0.0;
    for (const auto &[v, a] : s.amplitudes()) {
        bool ok = true;
        for (const auto &an : analyzers) {
            if (v[s.layout().mode(an.path, Pol::H)] != 1 || v[s.layout().mode(an.path, Pol::V)] != 0) {
                ok = false;
                break;
            }
        }
        if (ok) p += std::norm(a);
    }
    return p;
}

}  // namespace optiq
