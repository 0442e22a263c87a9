#include <gtest/gtest.h>

#include "fieldwit/concurrence.hpp"
#include "fieldwit/dicke.hpp"
#include "test_util.hpp"

using namespace fieldwit;
using namespace fieldwit::testing;

namespace {

PairReduction from_matrix(const Eigen::Matrix4cd& m) { return {m, {0, 1}}; }

}  // namespace

TEST(ReducePair, ProductStateFactorizes) {
    const std::vector<BlochAngles> a{{0.3, 0.1}, {1.2, -0.4}, {2.0, 2.0}};
    const auto r = reduce_pair(product_state(a), 0, 2);
    const Eigen::Vector2cd s0 = bloch_spinor(a[0]), s2 = bloch_spinor(a[2]);
    Eigen::Vector4cd v;
    v << s0(0) * s2(0), s0(0) * s2(1), s0(1) * s2(0), s0(1) * s2(1);
    EXPECT_LT((r.rho_pair - v * v.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(wootters_concurrence(r), 0.0, 1e-7);
}

TEST(ReducePair, WStateWeights) {
    const auto r = reduce_pair(dicke_state({{0, 0, 0}}), 0, 1);
    EXPECT_NEAR(r.rho_pair(3, 3).real(), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(r.rho_pair(1, 1).real() + r.rho_pair(2, 2).real(), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(r.rho_pair(0, 0).real(), 0.0, 1e-15);
    EXPECT_NEAR(wootters_concurrence(r), 2.0 / 3.0, 1e-12);
}

TEST(ReducePair, UnitTraceAndPureDensityAgree) {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + trial % 4;
        const auto psi = random_pure(n, rng);
        const int j = trial % n, s = (trial + 1) % n;
        const auto a = reduce_pair(psi, j, s), b = reduce_pair(DensityMatrix::from_pure(psi), j, s);
        EXPECT_NEAR(a.rho_pair.trace().real(), 1.0, 1e-13);
        EXPECT_LT((a.rho_pair - b.rho_pair).cwiseAbs().maxCoeff(), 1e-14);
    }
    EXPECT_THROW(reduce_pair(random_pure(3, rng), 1, 1), std::invalid_argument);
}

TEST(ReducePair, SiteOrderSwapsQubits) {
    std::mt19937_64 rng(62);
    const auto rho = random_mixed(3, rng);
    const auto a = reduce_pair(rho, 0, 2), b = reduce_pair(rho, 2, 0);
    const int swap[4] = {0, 2, 1, 3};
    for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) EXPECT_NEAR(std::abs(a.rho_pair(p, q) - b.rho_pair(swap[p], swap[q])), 0.0, 1e-15);
}

TEST(Concurrence, BellIsOne) {
    EXPECT_NEAR(global_concurrence(dicke_state({{0.0, 0.0}})), 1.0, 1e-12);
    EXPECT_NEAR(global_concurrence(dicke_state({{0.0, 1.3}})), 1.0, 1e-12);
}

TEST(Concurrence, WernerState) {
    Eigen::Vector4cd phi;
    phi << 1, 0, 0, 1;
    phi /= std::sqrt(2.0);
    for (double p : {0.2, 1.0 / 3.0, 0.5, 0.8}) {
        const Eigen::Matrix4cd m = p * phi * phi.adjoint() + (1 - p) * Eigen::Matrix4cd::Identity() / 4.0;
        EXPECT_NEAR(wootters_concurrence(from_matrix(m)), std::max(0.0, (3 * p - 1) / 2), 1e-12) << p;
    }
}

TEST(Concurrence, FourAtomDicke) {
    EXPECT_NEAR(global_concurrence(dicke_state({{0, 0, 0, 0}})), 0.5, 1e-12);
    EXPECT_NEAR(global_concurrence(DensityMatrix::from_pure(dicke_state({{0, 0, 0, 0}}))), 0.5, 1e-12);
}

TEST(Concurrence, ProductAndMixedAreZero) {
    EXPECT_NEAR(global_concurrence(product_state(antisymmetric_angles(4))), 0.0, 1e-7);
    EXPECT_NEAR(global_concurrence(DensityMatrix::maximally_mixed(3)), 0.0, 1e-12);
}

TEST(Concurrence, BoundedOnRandomStates) {
    std::mt19937_64 rng(63);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rho = random_mixed(2, rng);
        const double c = wootters_concurrence(reduce_pair(rho, 0, 1));
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, 1.0);
    }
}
