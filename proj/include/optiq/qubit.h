#ifndef OPTIQ_QUBIT_H
#define OPTIQ_QUBIT_H

#include <complex>

namespace optiq {

inline constexpr double kQubitNormTolerance = 1e-10;

/// Polarization qubit alpha|H> + beta|V>; H is logical 0, V is logical 1.
class QubitState {
   public:
    QubitState() : alpha_(1.0), beta_(0.0) {}
    /// Throws std::invalid_argument unless |alpha|^2 + |beta|^2 = 1 within 1e-10.
    QubitState(std::complex<double> alpha, std::complex<double> beta);

    static QubitState basis(int bit);
    static QubitState zero() { return basis(0); }
    static QubitState one() { return basis(1); }
    static QubitState plus();
    /// Linear polarization at `angle_deg` from H, with `phase_deg` on the V component.
    static QubitState from_angle(double angle_deg, double phase_deg = 0.0);
    /// Rescales an arbitrary nonzero pair to unit norm.
    static QubitState normalize(std::complex<double> alpha, std::complex<double> beta);

    std::complex<double> alpha() const { return alpha_; }
    std::complex<double> beta() const { return beta_; }
    std::complex<double> amplitude(int bit) const { return bit == 0 ? alpha_ : beta_; }

    /// Orientation of the major axis of the polarization ellipse, in [0, 180).
    double polarization_angle_deg() const;

   private:
    std::complex<double> alpha_;
    std::complex<double> beta_;
};

}  // namespace optiq

#endif
