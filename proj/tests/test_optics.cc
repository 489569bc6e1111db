#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "optiq/optics.h"
#include "optiq/oracle_check.h"
#include "test_support.h"

using namespace optiq;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const ModeLayout kLayout({1, 2});

PhotonicState photons(std::initializer_list<std::pair<int, QubitState>> list, const ModeLayout &layout = kLayout) {
    auto s = PhotonicState::vacuum(layout);
    for (const auto &[p, q] : list) s = inject_photon(s, p, q);
    return s;
}

FockVector fv(std::vector<int> v) {
    return FockVector(std::move(v));
}

}  // namespace

TEST_SUITE("optics-elements") {
    TEST_CASE("PBS in the HV basis transmits H and reflects V") {
        auto u = pbs_unitary(PbsSpec{0.0, 1, 2}, kLayout);
        auto h = apply_unitary(photons({{1, QubitState::zero()}}), u);
        CHECK(std::abs(h.amplitude(fv({1, 0, 0, 0})) - 1.0) < 1e-15);
        auto v = apply_unitary(photons({{1, QubitState::one()}}), u);
        CHECK(std::abs(v.amplitude(fv({0, 0, 0, 1})) - 1.0) < 1e-15);

        auto hh = apply_unitary(photons({{1, QubitState::zero()}, {2, QubitState::zero()}}), u);
        CHECK(std::abs(hh.amplitude(fv({1, 0, 1, 0})) - 1.0) < 1e-15);
    }

    TEST_CASE("PBS at 45 degrees transmits the +45 axis") {
        auto u = pbs_unitary(PbsSpec{45.0, 1, 2}, kLayout);
        auto d = apply_unitary(photons({{1, QubitState::plus()}}), u);
        CHECK(std::abs(d.amplitude(fv({1, 0, 0, 0})) - kInvSqrt2) < 1e-15);
        CHECK(std::abs(d.amplitude(fv({0, 1, 0, 0})) - kInvSqrt2) < 1e-15);
        CHECK(path_count_probability(d, 2, 0) == doctest::Approx(1.0));
    }

    TEST_CASE("rotated PBS equals the conjugated HV splitter") {
        const double a = 45.0;
        Eigen::MatrixXcd r = rotation_unitary(kLayout, 1, a).matrix() * rotation_unitary(kLayout, 2, a).matrix();
        Eigen::MatrixXcd expect = r * pbs_unitary(PbsSpec{0.0, 1, 2}, kLayout).matrix() * r.adjoint();
        Eigen::MatrixXcd got = pbs_unitary(PbsSpec{a, 1, 2}, kLayout).matrix();
        CHECK((expect - got).cwiseAbs().maxCoeff() < 1e-12);
    }

    TEST_CASE("element unitarity over random settings") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> angle(0.0, 180.0);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        ModeLayout layout({1, 2, 3});
        for (int k = 0; k < 200; ++k) {
            PbsSpec spec{angle(rng), 1, 3, 2 * std::numbers::pi * unit(rng), 0.99 * unit(rng)};
            CHECK(unitarity_deviation(pbs_unitary(spec, layout).matrix()) < 1e-12);
            CHECK(unitarity_deviation(hwp_unitary(WavePlateSpec{angle(rng), 2}, layout).matrix()) < 1e-12);
        }
    }

    TEST_CASE("PBS leak routes amplitude to the wrong port") {
        const double e = 0.1;
        auto u = pbs_unitary(PbsSpec{0.0, 1, 2, 0.0, e}, kLayout);
        auto h = apply_unitary(photons({{1, QubitState::zero()}}), u);
        CHECK(std::norm(h.amplitude(fv({0, 0, 1, 0}))) == doctest::Approx(e * e));
        CHECK(std::norm(h.amplitude(fv({1, 0, 0, 0}))) == doctest::Approx(1 - e * e));
        CHECK(pbs_unitary(PbsSpec{0.0, 1, 2, 0.0, 0.0}, kLayout).matrix() ==
              pbs_unitary(PbsSpec{0.0, 1, 2}, kLayout).matrix());
    }

    TEST_CASE("PBS errors") {
        CHECK_THROWS_AS(pbs_unitary(PbsSpec{0.0, 1, 1}, kLayout), std::invalid_argument);
        CHECK_THROWS_AS(pbs_unitary(PbsSpec{180.0, 1, 2}, kLayout), std::invalid_argument);
        CHECK_THROWS_AS(pbs_unitary(PbsSpec{0.0, 1, 5}, kLayout), std::invalid_argument);
        CHECK_THROWS_AS(pbs_unitary(PbsSpec{0.0, 1, 2, 0.0, 1.0}, kLayout), std::invalid_argument);
    }

    TEST_CASE("half-wave plate Jones convention") {
        Eigen::Matrix2cd j0 = hwp_jones(0.0);
        CHECK(std::abs(j0(0, 0) - 1.0) < 1e-15);
        CHECK(std::abs(j0(1, 1) + 1.0) < 1e-15);

        // 22.5 degrees: H -> cos45 H + sin45 V
        auto d = apply_unitary(photons({{1, QubitState::zero()}}), hwp_unitary(WavePlateSpec{22.5, 1}, kLayout));
        CHECK(std::abs(d.amplitude(fv({1, 0, 0, 0})) - kInvSqrt2) < 1e-15);
        CHECK(std::abs(d.amplitude(fv({0, 1, 0, 0})) - kInvSqrt2) < 1e-15);

        auto flipped = apply_unitary(photons({{1, QubitState::zero()}}), hwp_unitary(WavePlateSpec{45.0, 1}, kLayout));
        CHECK(std::abs(flipped.amplitude(fv({0, 1, 0, 0})) - 1.0) < 1e-15);
        auto back = apply_unitary(photons({{1, QubitState::one()}}), hwp_unitary(WavePlateSpec{45.0, 1}, kLayout));
        CHECK(std::abs(back.amplitude(fv({1, 0, 0, 0})) - 1.0) < 1e-15);
    }

    TEST_CASE("postselect_one_photon examples") {
        auto hh = photons({{1, QubitState::zero()}, {2, QubitState::zero()}});
        // H = (|+45> - |-45>)/sqrt(2)
        auto ps = postselect_one_photon(hh, HeraldOutcome{2, 45.0, HeraldPol::pass});
        CHECK(ps.probability == doctest::Approx(0.5).epsilon(1e-14));
        auto h1 = photons({{1, QubitState::zero()}}, ModeLayout({1}));
        CHECK(fidelity(ps.conditional, h1) == doctest::Approx(1.0).epsilon(1e-14));

        // Both photons in path 1: the herald sees nothing.
        auto both = PhotonicState::from_amplitudes(kLayout, {{fv({1, 1, 0, 0}), 1.0}});
        auto none = postselect_one_photon(both, HeraldOutcome{2, 45.0, HeraldPol::pass});
        CHECK(none.probability == 0.0);
        CHECK(none.conditional.empty());

        auto single = photons({{2, QubitState::zero()}}, ModeLayout({2}));
        auto sure = postselect_one_photon(single, HeraldOutcome{2, 0.0, HeraldPol::pass});
        CHECK(sure.probability == doctest::Approx(1.0));
        CHECK(sure.conditional.n_modes() == 0);
        CHECK(sure.conditional.n_photons() == 0);
        CHECK(std::abs(sure.conditional.norm_squared() - 1.0) < 1e-15);

        CHECK_THROWS_AS(postselect_one_photon(hh, HeraldOutcome{3, 0.0, HeraldPol::pass}), std::invalid_argument);
    }

    TEST_CASE("herald outcomes partition unity") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> angle(0.0, 180.0);
        for (int k = 0; k < 100; ++k) {
            auto s = random_state(kLayout, 1 + k % 3, rng);
            const double basis = angle(rng);
            double p = postselect_one_photon(s, HeraldOutcome{2, basis, HeraldPol::pass}).probability +
                       postselect_one_photon(s, HeraldOutcome{2, basis, HeraldPol::orthogonal}).probability;
            // The complement is every component without exactly one photon in path 2.
            p += 1.0 - path_count_probability(s, 2, 1);
            CHECK(std::abs(p - 1.0) < 1e-10);
        }
    }

    TEST_CASE("herald labels") {
        CHECK(HeraldOutcome{2, 45.0, HeraldPol::pass}.label() == "2:+45");
        CHECK(HeraldOutcome{2, 45.0, HeraldPol::orthogonal}.label() == "2:-45");
        CHECK(HeraldOutcome{2, 0.0, HeraldPol::pass}.label() == "2:H");
        CHECK(HeraldOutcome{2, 0.0, HeraldPol::orthogonal}.label() == "2:V");
    }

    TEST_CASE("coincidence_probability examples") {
        auto hh = photons({{1, QubitState::zero()}, {2, QubitState::zero()}});
        std::vector<AnalyzerSetting> both_h{{1, 0.0}, {2, 0.0}};
        CHECK(coincidence_probability(hh, both_h) == doctest::Approx(1.0));
        std::vector<AnalyzerSetting> crossed{{1, 90.0}, {2, 0.0}};
        CHECK(coincidence_probability(hh, crossed) == doctest::Approx(0.0));

        auto vv = photons({{1, QubitState::one()}, {2, QubitState::one()}});
        auto bell = superpose(hh, kInvSqrt2, vv, kInvSqrt2);
        std::vector<AnalyzerSetting> diag{{1, 45.0}, {2, 45.0}};
        CHECK(coincidence_probability(bell, diag) == doctest::Approx(0.5).epsilon(1e-14));

        std::vector<AnalyzerSetting> dup{{1, 0.0}, {1, 45.0}};
        CHECK_THROWS_AS(coincidence_probability(hh, dup), std::invalid_argument);
    }

    TEST_CASE("coincidence_probability ignores a global phase") {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> angle(0.0, 180.0);
        for (int k = 0; k < 50; ++k) {
            auto s = random_state(kLayout, 2, rng);
            auto phased = s.scaled(std::polar(1.0, angle(rng)));
            std::vector<AnalyzerSetting> an{{1, angle(rng)}, {2, angle(rng)}};
            CHECK(std::abs(coincidence_probability(s, an) - coincidence_probability(phased, an)) < 1e-14);
        }
    }
}
