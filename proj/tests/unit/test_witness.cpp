#include <gtest/gtest.h>

#include "fieldwit/witness.hpp"
#include "test_util.hpp"

using namespace fieldwit;
using namespace fieldwit::testing;

namespace {

PureState bell_plus() {
    CVector a = CVector::Zero(4);
    a(1) = a(2) = 1.0 / std::sqrt(2.0);
    return PureState(a, 2);
}

// Witnesses typed out from the moments, one line each.
std::array<double, 8> reference_witnesses(const OperatorMoments& m) {
    const double n = m.n_atoms;
    const double vx = m.second_x - m.mean_x * m.mean_x, vy = m.second_y - m.mean_y * m.mean_y,
                 vz = m.second_z - m.mean_z * m.mean_z;
    return {n * (n + 2) - m.second_x - m.second_y - m.second_z,
            vx + vy + vz - 2 * n,
            2 * n + (n - 1) * vx - m.second_y - m.second_z,
            2 * n + (n - 1) * vy - m.second_z - m.second_x,
            2 * n + (n - 1) * vz - m.second_x - m.second_y,
            (n - 1) * (vy + vz) - m.second_x - n * (n - 2),
            (n - 1) * (vz + vx) - m.second_y - n * (n - 2),
            (n - 1) * (vx + vy) - m.second_z - n * (n - 2)};
}

}  // namespace

TEST(Witness, GroundStateSaturatesEverything) {
    std::mt19937_64 rng(2);
    for (int n = 1; n <= 6; ++n) {
        const auto psi = product_state(std::vector<BlochAngles>(n, {M_PI, 0.0}));
        const auto config = random_config(n, rng);
        for (int i = 0; i < 5; ++i) {
            const auto r = witness_report(moments(psi, config, random_direction(rng, 1.3 * i)));
            for (double v : r.values()) EXPECT_NEAR(v, 0.0, 1e-12);
            EXPECT_NEAR(r.w_min, 0.0, 1e-12);
        }
    }
}

TEST(Witness, BellStateDetectedByW3Z) {
    const auto r = spin_squeezing_report(bell_plus(), chain(2, 1.0));
    EXPECT_NEAR(r.w1, 0.0, 1e-14);
    EXPECT_NEAR(r.w2, 4.0, 1e-14);
    EXPECT_NEAR(r.w3[2], -4.0, 1e-14);
    EXPECT_NEAR(r.w_min, -4.0, 1e-14);
    EXPECT_EQ(r.argmin, "w3_Z");
    EXPECT_TRUE(detects(r, detection_epsilon(2)));
}

TEST(Witness, MatchesTypedFormulasOnRandomMoments) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + trial % 5;
        const auto rho = random_mixed(n, rng);
        const auto m = moments(rho, random_config(n, rng), random_direction(rng));
        const auto r = witness_report(m);
        const auto ref = reference_witnesses(m);
        for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(r.values()[i], ref[i], 1e-11);
        EXPECT_EQ(r.w_min, *std::min_element(ref.begin(), ref.end()));
    }
}

TEST(Witness, ThreeAtomStateUndetectedAtZeroPhase) {
    const auto r = spin_squeezing_report(three_atom_state(M_PI / 3), chain(3, 0.3));
    EXPECT_GE(r.w_min, 0.0);
}

TEST(Witness, ThreeAtomStateDetectedSomewhere) {
    const auto psi = three_atom_state(M_PI / 3);
    const auto config = chain(3, 0.3);
    const auto reports = sweep(psi, config, sphere_grid(16, 32), {.workers = 1});
    EXPECT_LT(reports[argmin_report(reports)].w_min, -detection_epsilon(3));
}

TEST(Witness, SpinSqueezingEqualsPerpendicularDirection) {
    std::mt19937_64 rng(6);
    const auto config = chain(4, 0.3);
    const auto rho = random_mixed(4, rng);
    const auto a = spin_squeezing_report(rho, config);
    const auto b = witness_report(moments(rho, config, Direction::in_plane(M_PI / 2)));
    for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-12);
}

TEST(PhaseVector, MatchesOpticalPhasesAndZero) {
    std::mt19937_64 rng(12);
    const auto config = random_config(3, rng);
    const auto dir = random_direction(rng, 0.4);
    const auto psi = random_pure(3, rng);
    const auto ph = optical_phases(config, dir);
    EXPECT_LT(max_moment_diff(phase_vector_moments(psi, config, ph), moments(psi, config, dir)), 1e-14);
    const std::vector<double> zero(3, 0.0);
    const auto a = witness_report(phase_vector_moments(psi, config, zero));
    const auto b = spin_squeezing_report(psi, config);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-14);
}

TEST(PhaseVector, BellWithOppositePhasesEscapesW3Z) {
    const std::vector<double> ph{0.0, M_PI};
    const auto m = phase_vector_moments(bell_plus(), chain(2, 1.0), ph);
    EXPECT_NEAR(m.second_x, 0.0, 1e-14);
    EXPECT_NEAR(m.second_y, 0.0, 1e-14);
    const auto r = witness_report(m);
    EXPECT_NEAR(r.w3[2], 4.0, 1e-14);
    // The relative phase turns the triplet into a singlet-like pattern with
    // zero total variance, which w2 still flags.
    EXPECT_NEAR(r.w2, -4.0, 1e-14);
    EXPECT_EQ(r.argmin, "w2");
    const auto brute = brute_moments(DensityMatrix::from_pure(bell_plus()), ph);
    EXPECT_LT(max_moment_diff(m, brute), 1e-14);
}

TEST(Sweep, SingletonMatchesReport) {
    std::mt19937_64 rng(13);
    const auto config = random_config(3, rng);
    const auto rho = random_mixed(3, rng);
    const std::vector<Direction> d{random_direction(rng)};
    const auto s = sweep(rho, config, d);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].values(), witness_report(moments(rho, config, d[0])).values());
}

TEST(Sweep, IndependentOfWorkerCount) {
    std::mt19937_64 rng(14);
    const auto config = random_config(5, rng);
    const auto psi = random_pure(5, rng);
    const auto dirs = sphere_grid(10, 20);
    const auto a = sweep(psi, config, dirs, {.workers = 1});
    const auto b = sweep(psi, config, dirs, {.workers = 4});
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].values(), b[i].values());
}

TEST(Witness, TranslationInvariantWithCompensatingChi) {
    std::mt19937_64 rng(15);
    const auto config = random_config(4, rng);
    const auto psi = random_pure(4, rng);
    const Vec3 shift(1.0, 2.0, -0.5);
    for (int i = 0; i < 10; ++i) {
        auto dir = random_direction(rng);
        const auto a = witness_report(moments(psi, config, dir));
        dir.chi = -dir.khat.dot(shift);
        const auto b = witness_report(moments(psi, config.translated(shift), dir));
        for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(a.values()[k], b.values()[k], 1e-11);
    }
}

TEST(Witness, GlobalPhaseChiLeavesWitnessesUnchanged) {
    // chi multiplies E+ by a global phase; the quadratures rotate but the
    // combinations symmetric in X and Y are invariant.
    std::mt19937_64 rng(17);
    const auto config = random_config(4, rng);
    const auto rho = random_mixed(4, rng);
    auto dir = random_direction(rng);
    const auto a = witness_report(moments(rho, config, dir));
    dir.chi = 1.234;
    const auto b = witness_report(moments(rho, config, dir));
    EXPECT_NEAR(a.w1, b.w1, 1e-11);
    EXPECT_NEAR(a.w2, b.w2, 1e-11);
    EXPECT_NEAR(a.w4[2], b.w4[2], 1e-11);
}

TEST(Witness, PermutationInvariant) {
    std::mt19937_64 rng(16);
    const auto config = random_config(3, rng);
    const auto psi = random_pure(3, rng);
    // Relabel atoms 0 <-> 2 in both the configuration and the state.
    CVector b = CVector::Zero(8);
    for (int i = 0; i < 8; ++i) {
        const int s0 = (i >> 2) & 1, s1 = (i >> 1) & 1, s2 = i & 1;
        b((s2 << 2) | (s1 << 1) | s0) = psi.amplitudes()(i);
    }
    const PureState swapped(b, 3);
    const auto permuted = config.permuted({2, 1, 0});
    for (int i = 0; i < 10; ++i) {
        const auto d = random_direction(rng, 0.2 * i);
        const auto x = witness_report(moments(psi, config, d)), y = witness_report(moments(swapped, permuted, d));
        for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(x.values()[k], y.values()[k], 1e-11);
    }
}

TEST(ChiOptimized, NeverWorseThanChiZero) {
    std::mt19937_64 rng(18);
    const auto config = random_config(3, rng);
    const auto c = correlators(random_mixed(3, rng));
    const auto d = random_direction(rng);
    const auto best = chi_optimized_report(c, config, d, 16);
    EXPECT_LE(best.w_min, witness_report(moments(c, config, d)).w_min + 1e-14);
}
