#include "optiq/oracle_check.h"

#include <algorithm>
#include <cmath>

namespace optiq {

SingleParticleUnitary random_unitary(int n_modes, std::mt19937_64 &rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd z(n_modes, n_modes);
    for (int r = 0; r < n_modes; ++r) {
        for (int c = 0; c < n_modes; ++c) z(r, c) = cplx(g(rng), g(rng));
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the column phases so the distribution is Haar.
    for (int k = 0; k < n_modes; ++k) {
        const cplx d = r(k, k);
        if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
    }
    return SingleParticleUnitary(std::move(q));
}

PhotonicState random_state(const ModeLayout &layout, int n_photons, std::mt19937_64 &rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    PhotonicState::Amplitudes amps;
    for (const auto &v : enumerate_fock_basis(layout.n_modes(), n_photons)) amps[v] = cplx(g(rng), g(rng));
    return PhotonicState::from_amplitudes(layout, amps).normalized();
}

PhotonicState oracle_evolve(const PhotonicState &state, const SingleParticleUnitary &u) {
    PhotonicState::Amplitudes out;
    for (const auto &t : enumerate_fock_basis(state.n_modes(), state.n_photons())) {
        cplx a = 0.0;
        for (const auto &[s, c] : state.amplitudes()) a += c * transition_amplitude_oracle(u, s, t);
        out[t] = a;
    }
    return PhotonicState::from_amplitudes(state.layout(), out);
}

OracleCheckResult run_oracle_check(int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> paths_dist(1, 2);
    std::uniform_int_distribution<int> photons_dist(1, 3);
    OracleCheckResult result;
    for (int k = 0; k < trials; ++k) {
        const int n_paths = paths_dist(rng);
        const int n_photons = photons_dist(rng);
        std::vector<int> paths(n_paths);
        for (int p = 0; p < n_paths; ++p) paths[p] = p + 1;
        const ModeLayout layout(paths);
        const SingleParticleUnitary u = random_unitary(layout.n_modes(), rng);
        const PhotonicState s = random_state(layout, n_photons, rng);
        const PhotonicState lifted = apply_unitary(s, u);
        const PhotonicState oracle = oracle_evolve(s, u);
        for (const auto &t : enumerate_fock_basis(layout.n_modes(), n_photons)) {
            result.max_deviation = std::max(result.max_deviation, std::abs(lifted.amplitude(t) - oracle.amplitude(t)));
            ++result.amplitudes_compared;
        }
        ++result.trials;
    }
    return result;
}

}  // namespace optiq
