#include <cmath>
#include <random>

#include "doctest.h"
#include "optiq/fock.h"
#include "optiq/oracle_check.h"
#include "test_support.h"

using namespace optiq;
using optiq::testing::balanced_coupler;
using optiq::testing::embed_2x2;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

ModeLayout two_paths() {
    return ModeLayout({1, 2});
}

FockVector fv(std::vector<int> v) {
    return FockVector(std::move(v));
}

}  // namespace

TEST_SUITE("fock-core") {
    TEST_CASE("mode layout is path-major with H before V") {
        ModeLayout l({1, 2, 4});
        CHECK(l.n_modes() == 6);
        CHECK(l.mode(1, Pol::H) == 0);
        CHECK(l.mode(1, Pol::V) == 1);
        CHECK(l.mode(4, Pol::V) == 5);
        CHECK(l.mode_at(3) == ModeIndex{2, Pol::V});
        CHECK(l.without_path(2).paths() == std::vector<int>{1, 4});
        CHECK_THROWS_AS(l.mode(3, Pol::H), std::invalid_argument);
        CHECK_THROWS_AS(ModeLayout({2, 1}), std::invalid_argument);
        CHECK_THROWS_AS(ModeLayout({0, 1, 2, 3, 4, 5, 6, 7, 8}), std::invalid_argument);  // 18 modes
    }

    TEST_CASE("inject_photon builds polarization qubits") {
        auto vac = PhotonicState::vacuum(two_paths());
        auto h = inject_photon(vac, 1, QubitState::zero());
        CHECK(h.n_photons() == 1);
        CHECK(h.amplitudes().size() == 1);
        CHECK(std::abs(h.amplitude(fv({1, 0, 0, 0})) - 1.0) < 1e-15);

        auto plus = inject_photon(vac, 1, QubitState::plus());
        CHECK(std::abs(plus.amplitude(fv({1, 0, 0, 0})) - kInvSqrt2) < 1e-15);
        CHECK(std::abs(plus.amplitude(fv({0, 1, 0, 0})) - kInvSqrt2) < 1e-15);

        // 0.94|0> + 0.34|1> is not unit norm as written; the ratio is what carries the state.
        CHECK_THROWS_AS(QubitState(0.94, 0.34), std::invalid_argument);
        auto q = QubitState::normalize(0.94, 0.34);
        auto s = inject_photon(vac, 1, q);
        const double n = std::sqrt(0.94 * 0.94 + 0.34 * 0.34);
        CHECK(std::abs(s.amplitude(fv({1, 0, 0, 0})) - 0.94 / n) < 1e-15);
        CHECK(std::abs(s.amplitude(fv({0, 1, 0, 0})) - 0.34 / n) < 1e-15);
        CHECK(std::abs(s.norm_squared() - 1.0) < 1e-15);
    }

    TEST_CASE("inject_photon errors") {
        auto vac = PhotonicState::vacuum(two_paths());
        CHECK_THROWS_AS(inject_photon(vac, 7, QubitState::zero()), std::invalid_argument);
        auto one = inject_photon(vac, 1, QubitState::zero());
        CHECK_THROWS_AS(inject_photon(one, 1, QubitState::one()), std::invalid_argument);
    }

    TEST_CASE("apply_unitary: identity, HOM, permutation") {
        std::mt19937_64 rng(3);
        auto s = random_state(two_paths(), 2, rng);
        auto same = apply_unitary(s, SingleParticleUnitary::identity(4));
        CHECK(fidelity(s, same) == doctest::Approx(1.0).epsilon(1e-14));

        // Coupler between 1H and 2H.
        SingleParticleUnitary bs(embed_2x2(4, 0, 2, balanced_coupler()));
        auto in = inject_photon(inject_photon(PhotonicState::vacuum(two_paths()), 1, QubitState::zero()), 2,
                                QubitState::zero());
        auto out = apply_unitary(in, bs);
        CHECK(std::abs(out.amplitude(fv({2, 0, 0, 0})) - kInvSqrt2) < 1e-14);
        CHECK(std::abs(out.amplitude(fv({0, 0, 2, 0})) + kInvSqrt2) < 1e-14);
        CHECK(std::abs(out.amplitude(fv({1, 0, 1, 0}))) < 1e-14);
        CHECK(out.amplitudes().size() == 2);

        // Swap of 1V and 2V.
        Eigen::Matrix2cd swap;
        swap << 0, 1, 1, 0;
        SingleParticleUnitary sw(embed_2x2(4, 1, 3, swap));
        auto v1 = PhotonicState::from_amplitudes(two_paths(), {{fv({0, 1, 0, 0}), 1.0}});
        auto moved = apply_unitary(v1, sw);
        CHECK(std::abs(moved.amplitude(fv({0, 0, 0, 1})) - 1.0) < 1e-15);
    }

    TEST_CASE("apply_unitary errors") {
        auto s = PhotonicState::vacuum(two_paths());
        CHECK_THROWS_AS(apply_unitary(s, SingleParticleUnitary::identity(2)), std::invalid_argument);
        Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(4, 4);
        bad(0, 1) = 0.1;
        CHECK_THROWS_AS(SingleParticleUnitary{bad}, std::invalid_argument);
        CHECK_THROWS_AS(SingleParticleUnitary{Eigen::MatrixXcd::Identity(2, 3)}, std::invalid_argument);
    }

    TEST_CASE("transition_amplitude_oracle values") {
        auto id = SingleParticleUnitary::identity(2);
        SingleParticleUnitary bs(balanced_coupler());
        CHECK(std::abs(transition_amplitude_oracle(id, fv({1, 1}), fv({1, 1})) - 1.0) < 1e-15);
        // per([[1,1],[1,1]]/2) = 1, divided by sqrt(2!) for the doubly occupied output.
        CHECK(std::abs(transition_amplitude_oracle(bs, fv({1, 1}), fv({2, 0})) - kInvSqrt2) < 1e-15);
        CHECK(std::abs(transition_amplitude_oracle(bs, fv({1, 1}), fv({1, 1}))) < 1e-15);
        CHECK_THROWS_AS(transition_amplitude_oracle(bs, fv({1, 1}), fv({1, 0})), std::invalid_argument);
    }

    TEST_CASE("permanent by expansion") {
        Eigen::MatrixXcd m(3, 3);
        m << 1, 2, 3, 4, 5, 6, 7, 8, 9;
        // 1*(5*9+6*8) + 2*(4*9+6*7) + 3*(4*8+5*7)
        CHECK(std::abs(permanent(m) - cplx(450.0)) < 1e-12);
    }

    TEST_CASE("inner product and fidelity") {
        auto vac = PhotonicState::vacuum(ModeLayout({1}));
        auto h = inject_photon(vac, 1, QubitState::zero());
        auto v = inject_photon(vac, 1, QubitState::one());
        auto d = inject_photon(vac, 1, QubitState::plus());
        CHECK(std::abs(inner_product(d, d) - 1.0) < 1e-15);
        CHECK(fidelity(h, v) == 0.0);
        CHECK(fidelity(h, d) == doctest::Approx(0.5).epsilon(1e-15));
        auto other = PhotonicState::vacuum(two_paths());
        CHECK_THROWS_AS(inner_product(h, other), std::invalid_argument);
    }

    TEST_CASE("photon and mode caps") {
        auto s = PhotonicState::vacuum(ModeLayout({1, 2, 3, 4, 5, 6, 7}));
        for (int p = 1; p <= 6; ++p) s = inject_photon(s, p, QubitState::plus());
        CHECK(s.n_photons() == 6);
        CHECK_THROWS_AS(inject_photon(s, 7, QubitState::zero()), std::invalid_argument);
    }

    TEST_CASE("property: norm and photon number preserved (n <= 4, modes <= 8)") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 60; ++trial) {
            const int paths = 1 + trial % 4;
            const int photons = 1 + (trial / 4) % 4;
            std::vector<int> labels(paths);
            for (int k = 0; k < paths; ++k) labels[k] = k + 1;
            ModeLayout layout(labels);
            auto s = random_state(layout, photons, rng);
            auto u = random_unitary(layout.n_modes(), rng);
            auto out = apply_unitary(s, u);
            CHECK(std::abs(out.norm_squared() - 1.0) < 1e-12);
            for (const auto &[v, a] : out.amplitudes()) CHECK(v.total() == photons);
        }
    }

    TEST_CASE("property: homomorphism U then V equals VU") {
        std::mt19937_64 rng(12);
        for (int trial = 0; trial < 30; ++trial) {
            ModeLayout layout({1, 2, 3});
            auto s = random_state(layout, 1 + trial % 3, rng);
            auto u = random_unitary(6, rng);
            auto v = random_unitary(6, rng);
            auto two_step = apply_unitary(apply_unitary(s, u), v);
            auto one_step = apply_unitary(s, v.then_after(u));
            double dev = 0.0;
            for (const auto &b : enumerate_fock_basis(6, s.n_photons())) {
                dev = std::max(dev, std::abs(two_step.amplitude(b) - one_step.amplitude(b)));
            }
            CHECK(dev < 1e-10);
        }
    }

    TEST_CASE("property: lifted amplitudes match the permanent oracle") {
        auto r = run_oracle_check(80, 99);
        CHECK(r.trials == 80);
        CHECK(r.amplitudes_compared > 80);
        CHECK(r.max_deviation < 1e-10);
    }

    TEST_CASE("property: pruning never moves a probability by more than 1e-9") {
        std::mt19937_64 rng(13);
        for (int trial = 0; trial < 20; ++trial) {
            ModeLayout layout({1, 2});
            auto s = random_state(layout, 1 + trial % 3, rng);
            auto u = random_unitary(4, rng);
            auto pruned = apply_unitary(s, u);
            auto dense = optiq::testing::dense_oracle_amplitudes(s, u);
            auto basis = enumerate_fock_basis(4, s.n_photons());
            for (size_t k = 0; k < basis.size(); ++k) {
                CHECK(std::abs(std::norm(pruned.amplitude(basis[k])) - std::norm(dense[k])) < 1e-9);
            }
        }
    }

    TEST_CASE("contract_path and path counts") {
        auto s = inject_photon(inject_photon(PhotonicState::vacuum(two_paths()), 1, QubitState::zero()), 2,
                               QubitState::plus());
        CHECK(path_count_probability(s, 2, 1) == doctest::Approx(1.0));
        auto kept = contract_path(s, 2, 0, 1);
        CHECK(kept.layout().paths() == std::vector<int>{1});
        CHECK(kept.norm_squared() == doctest::Approx(0.5));
        CHECK(kept.n_photons() == 1);
    }

    TEST_CASE("enumerate_fock_basis counts") {
        // C(n + m - 1, n)
        CHECK(enumerate_fock_basis(4, 2).size() == 10);
        CHECK(enumerate_fock_basis(8, 4).size() == 330);
        CHECK(enumerate_fock_basis(0, 0).size() == 1);
    }
}
