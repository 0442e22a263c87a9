#include <gtest/gtest.h>

#include "fieldwit/dicke.hpp"
#include "fieldwit/witness.hpp"
#include "test_util.hpp"

using namespace fieldwit;
using namespace fieldwit::testing;

namespace {

// Plain double loop over ordered pairs.
double double_sum(const DickeSpec& spec, const AtomConfig& config, const Direction& dir) {
    double s = 0.0;
    const int n = spec.n_atoms();
    for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m)
            if (j != m)
                s += std::cos(spec.phases[m] - spec.phases[j] + dir.khat.dot(config.positions()[j] - config.positions()[m]));
    return s;
}

double zero_phase_sum(const std::vector<double>& phases) {
    double s = 0.0;
    for (std::size_t j = 0; j < phases.size(); ++j)
        for (std::size_t m = 0; m < phases.size(); ++m)
            if (j != m) s += std::cos(phases[j] - phases[m]);
    return s;
}

}  // namespace

TEST(DickeState, TwoAtomExamples) {
    const auto a = dicke_state({{0.0, 0.0}}).amplitudes();
    EXPECT_NEAR(a(1).real(), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(a(2).real(), 1.0 / std::sqrt(2.0), 1e-15);
    const auto b = dicke_state({{0.0, M_PI}}).amplitudes();
    EXPECT_NEAR(std::abs(b(1) + b(2)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(b(1)), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(DickeState, ThreeAtomPhases) {
    const auto a = dicke_state({{M_PI / 3, 2 * M_PI / 3, M_PI}}).amplitudes();
    const double r = 1.0 / std::sqrt(3.0);
    // Atom n excited, all others down.
    EXPECT_NEAR(std::abs(a(0b011) - r * std::polar(1.0, M_PI / 3)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(a(0b101) - r * std::polar(1.0, 2 * M_PI / 3)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(a(0b110) - r * std::polar(1.0, M_PI)), 0.0, 1e-15);
}

TEST(DickeMoments, FourAtomZeroPhaseValues) {
    const AtomConfig config({Vec3(0, 0, 0), Vec3(0, 0, 1), Vec3(0, 0, 2), Vec3(0, 0, 3)},
                            std::vector<Vec3>(4, Vec3::UnitX()));
    const DickeSpec spec{{0, 0, 0, 0}};
    const auto m = dicke_moments(spec, config, Direction::in_plane(0.0));
    EXPECT_NEAR(m.mean_x, 0.0, 1e-15);
    EXPECT_NEAR(m.mean_z, -2.0, 1e-15);
    EXPECT_NEAR(m.second_x, 10.0, 1e-13);
    EXPECT_NEAR(m.second_y, 10.0, 1e-13);
    EXPECT_NEAR(m.second_z, 4.0, 1e-13);
    EXPECT_LT(max_moment_diff(m, brute_moments(DensityMatrix::from_pure(dicke_state(spec)), config,
                                               Direction::in_plane(0.0))),
              1e-12);
}

TEST(DickeMoments, MatchBruteForce) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 2 * M_PI);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 1 + trial % 8;
        DickeSpec spec;
        for (int j = 0; j < n; ++j) spec.phases.push_back(u(rng));
        const auto config = random_config(n, rng);
        const auto dir = random_direction(rng, u(rng));
        const auto exact = moments(dicke_state(spec), config, dir);
        EXPECT_LT(max_moment_diff(dicke_moments(spec, config, dir), exact), 1e-10);
    }
}

TEST(SK, TwoAtomBell) {
    const auto config = chain(2, 1.0);
    const auto dir = Direction::in_plane(M_PI / 2);
    EXPECT_NEAR(s_k({{0.0, 0.0}}, config, dir), 4.0, 1e-14);
}

TEST(SK, EqualsW2AndMinusW3Z) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 2 * M_PI);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + trial % 20;
        DickeSpec spec;
        for (int j = 0; j < n; ++j) spec.phases.push_back(u(rng));
        const auto config = random_config(n, rng, 4.0);
        const auto dir = random_direction(rng);
        const auto r = witness_report(dicke_moments(spec, config, dir));
        const double s = s_k(spec, config, dir);
        EXPECT_NEAR(r.w2, s, 1e-10);
        EXPECT_NEAR(r.w2 + r.w3[2], 0.0, 1e-10);
        EXPECT_NEAR(dicke_phase_sum(spec, config, dir), double_sum(spec, config, dir), 1e-9);
    }
}

TEST(Chebyshev, PolynomialValues) {
    EXPECT_EQ(chebyshev_t(0, 0.3), 1.0);
    EXPECT_EQ(chebyshev_t(1, 0.3), 0.3);
    EXPECT_NEAR(chebyshev_t(3, 0.3), 4 * 0.027 - 0.9, 1e-15);
    for (double x : {-0.9, -0.2, 0.4, 0.77}) EXPECT_NEAR(chebyshev_t(7, x), std::cos(7 * std::acos(x)), 1e-13);
}

TEST(Chebyshev, TwoAtomRootIsZero) {
    EXPECT_NEAR(chebyshev_delta(2), 0.0, 1e-12);
    const auto spec = DickeSpec::chebyshev(2, 0.0);
    EXPECT_NEAR(spec.phases[0], M_PI / 2, 1e-15);
    EXPECT_NEAR(spec.phases[1], M_PI, 1e-15);
}

TEST(Chebyshev, RootsZeroThePhaseSum) {
    for (int n : {2, 3, 5, 10, 37, 100}) {
        const auto roots = chebyshev_interior_roots(n);
        ASSERT_FALSE(roots.empty()) << n;
        EXPECT_EQ(chebyshev_delta(n), roots.front());
        for (double d : roots) EXPECT_LT(std::abs(zero_phase_sum(DickeSpec::chebyshev(n, d).phases)), 1e-6) << n;
        for (std::size_t i = 1; i < roots.size(); ++i) EXPECT_LT(roots[i], roots[i - 1]);
    }
}

TEST(Chebyshev, HundredAtomRootRange) {
    const double d = chebyshev_delta(100);
    EXPECT_GE(d, 0.996);
    EXPECT_LE(d, 0.999);
}

TEST(Chebyshev, HundredAtomChainBroadside) {
    const auto spec = DickeSpec::chebyshev(100, chebyshev_delta(100));
    const auto config = chain(100, M_PI / 2);
    const auto m = dicke_moments(spec, config, Direction::in_plane(M_PI / 2));
    EXPECT_NEAR(m.second_x, 100.0, 1e-6);
    EXPECT_LT(std::abs(s_k(spec, config, Direction::in_plane(M_PI / 2))), 1e-6);
}

TEST(Chebyshev, RejectsOutOfRangeDelta) {
    EXPECT_THROW(DickeSpec::chebyshev(4, 1.5), std::invalid_argument);
}
