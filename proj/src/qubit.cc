#include "optiq/qubit.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace optiq {

QubitState::QubitState(std::complex<double> alpha, std::complex<double> beta) : alpha_(alpha), beta_(beta) {
    double n = std::norm(alpha) + std::norm(beta);
    if (!(std::abs(n - 1.0) <= kQubitNormTolerance)) {
        throw std::invalid_argument("qubit is not normalized: |alpha|^2+|beta|^2 = " + std::to_string(n));
    }
}

QubitState QubitState::basis(int bit) {
    if (bit != 0 && bit != 1) {
        throw std::invalid_argument("logical value must be 0 or 1");
    }
    return bit == 0 ? QubitState(1.0, 0.0) : QubitState(0.0, 1.0);
}

QubitState QubitState::plus() {
    return QubitState(std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2);
}

QubitState QubitState::from_angle(double angle_deg, double phase_deg) {
    double a = angle_deg * std::numbers::pi / 180.0;
    double phi = phase_deg * std::numbers::pi / 180.0;
    return QubitState(std::cos(a), std::polar(1.0, phi) * std::sin(a));
}

QubitState QubitState::normalize(std::complex<double> alpha, std::complex<double> beta) {
    double n = std::sqrt(std::norm(alpha) + std::norm(beta));
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::invalid_argument("cannot normalize a zero or non-finite qubit");
    }
    return QubitState(alpha / n, beta / n);
}

double QubitState::polarization_angle_deg() const {
    // Stokes parameters S1, S2 fix the ellipse orientation.
    double s1 = std::norm(alpha_) - std::norm(beta_);
    double s2 = 2.0 * std::real(std::conj(alpha_) * beta_);
    double deg = 0.5 * std::atan2(s2, s1) * 180.0 / std::numbers::pi;
    if (deg < 0) deg += 180.0;
    if (deg >= 180.0) deg -= 180.0;
    return deg;
}

}  // namespace optiq
