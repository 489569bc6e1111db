#ifndef OPTIQ_FOCK_H
#define OPTIQ_FOCK_H

#include <compare>
#include <complex>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optiq/qubit.h"

namespace optiq {

using cplx = std::complex<double>;

inline constexpr int kMaxPhotons = 6;
inline constexpr int kMaxModes = 16;
// Amplitudes below this magnitude are dropped from sparse states.
inline constexpr double kPruneTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-12;

enum class Pol : int { H = 0, V = 1 };

struct ModeIndex {
    int path;
    Pol pol;
    auto operator<=>(const ModeIndex &) const = default;
};

/// Ordered set of spatial paths; every path carries an H and a V mode.
/// Mode numbering is path-major with H before V.
class ModeLayout {
   public:
    ModeLayout() = default;
    explicit ModeLayout(std::vector<int> paths);

    const std::vector<int> &paths() const { return paths_; }
    int n_paths() const { return static_cast<int>(paths_.size()); }
    int n_modes() const { return 2 * n_paths(); }
    bool has_path(int path) const;
    int path_slot(int path) const;
    int mode(int path, Pol pol) const { return 2 * path_slot(path) + static_cast<int>(pol); }
    ModeIndex mode_at(int index) const;
    ModeLayout without_path(int path) const;
    std::string describe() const;

    bool operator==(const ModeLayout &) const = default;

   private:
    std::vector<int> paths_;
};

/// Photon occupation numbers, one entry per mode of a layout.
class FockVector {
   public:
    FockVector() = default;
    explicit FockVector(std::vector<int> occupations);

    int size() const { return static_cast<int>(occ_.size()); }
    int total() const;
    int operator[](int mode) const { return occ_[mode]; }
    const std::vector<int> &occupations() const { return occ_; }
    std::string to_string() const;

    auto operator<=>(const FockVector &) const = default;
    bool operator==(const FockVector &) const = default;

   private:
    std::vector<int> occ_;
};

/// Complex n_modes x n_modes matrix checked for unitarity on construction.
/// Column i holds the image of the creation operator of mode i.
class SingleParticleUnitary {
   public:
    explicit SingleParticleUnitary(Eigen::MatrixXcd matrix);
    static SingleParticleUnitary identity(int n_modes);

    const Eigen::MatrixXcd &matrix() const { return m_; }
    int n_modes() const { return static_cast<int>(m_.rows()); }
    cplx operator()(int row, int col) const { return m_(row, col); }

    /// Returns `this` applied after `first`.
    SingleParticleUnitary then_after(const SingleParticleUnitary &first) const;
    SingleParticleUnitary adjoint() const;

   private:
    Eigen::MatrixXcd m_;
};

/// max |(U^dagger U - 1)_ij|
double unitarity_deviation(const Eigen::MatrixXcd &m);

/// Sparse superposition of Fock vectors with a fixed total photon number.
class PhotonicState {
   public:
    using Amplitudes = std::map<FockVector, cplx>;

    PhotonicState() = default;
    static PhotonicState vacuum(ModeLayout layout);
    /// Builds a state from explicit amplitudes; all Fock vectors must share
    /// one photon number. No normalization is applied.
    static PhotonicState from_amplitudes(ModeLayout layout, const Amplitudes &amplitudes);

    const ModeLayout &layout() const { return layout_; }
    int n_modes() const { return layout_.n_modes(); }
    int n_photons() const { return n_photons_; }
    const Amplitudes &amplitudes() const { return amps_; }
    cplx amplitude(const FockVector &v) const;
    bool empty() const { return amps_.empty(); }

    double norm_squared() const;
    PhotonicState normalized() const;
    PhotonicState scaled(cplx factor) const;
    std::string to_string() const;

   private:
    PhotonicState(ModeLayout layout, int n_photons) : layout_(std::move(layout)), n_photons_(n_photons) {}
    void prune();

    ModeLayout layout_;
    int n_photons_ = 0;
    Amplitudes amps_;

    friend PhotonicState inject_photon(const PhotonicState &, int, const QubitState &);
    friend PhotonicState apply_unitary(const PhotonicState &, const SingleParticleUnitary &);
    friend PhotonicState superpose(const PhotonicState &, cplx, const PhotonicState &, cplx);
    friend PhotonicState contract_path(const PhotonicState &, int, int, int);
};

/// Adds one photon in `path` with polarization alpha|H> + beta|V>.
PhotonicState inject_photon(const PhotonicState &state, int path, const QubitState &qubit);

/// Lifts a single-particle unitary to the multi-photon Fock space.
PhotonicState apply_unitary(const PhotonicState &state, const SingleParticleUnitary &u);

/// a * ca + b * cb over identical layouts and photon numbers.
PhotonicState superpose(const PhotonicState &a, cplx ca, const PhotonicState &b, cplx cb);

/// Keeps the components with exactly (n_h, n_v) photons in `path`, then
/// removes that path's modes. The result is not renormalized.
PhotonicState contract_path(const PhotonicState &state, int path, int n_h, int n_v);

/// Probability that `path` holds exactly `count` photons.
double path_count_probability(const PhotonicState &state, int path, int count);

/// <output| U |input> from the permanent of the occupation-repeated submatrix.
/// Independent of apply_unitary; used as a verification oracle.
cplx transition_amplitude_oracle(const SingleParticleUnitary &u, const FockVector &input, const FockVector &output);

/// Permanent by direct expansion over permutations.
cplx permanent(const Eigen::MatrixXcd &m);

/// All Fock vectors with `n_photons` photons over `n_modes` modes, in lexicographic order.
std::vector<FockVector> enumerate_fock_basis(int n_modes, int n_photons);

cplx inner_product(const PhotonicState &a, const PhotonicState &b);
double fidelity(const PhotonicState &a, const PhotonicState &b);

}  // namespace optiq

#endif
