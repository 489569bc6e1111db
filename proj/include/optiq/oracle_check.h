#ifndef OPTIQ_ORACLE_CHECK_H
#define OPTIQ_ORACLE_CHECK_H

#include <cstdint>
#include <random>

#include "optiq/fock.h"

namespace optiq {

/// Haar-random unitary from the QR decomposition of a complex Gaussian matrix.
SingleParticleUnitary random_unitary(int n_modes, std::mt19937_64 &rng);

/// Normalized random superposition over every Fock vector with `n_photons`.
PhotonicState random_state(const ModeLayout &layout, int n_photons, std::mt19937_64 &rng);

/// Evolves a state amplitude by amplitude with the permanent oracle.
PhotonicState oracle_evolve(const PhotonicState &state, const SingleParticleUnitary &u);

struct OracleCheckResult {
    int trials = 0;
    int amplitudes_compared = 0;
    double max_deviation = 0.0;
};

/// Random unitaries on up to 4 modes and random states of up to 3 photons;
/// compares every amplitude of apply_unitary against the oracle.
OracleCheckResult run_oracle_check(int trials, std::uint64_t seed);

}  // namespace optiq

#endif
