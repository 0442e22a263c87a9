#include <gtest/gtest.h>

#include "fieldwit/oracle.hpp"
#include "fieldwit/witness.hpp"
#include "test_util.hpp"

using namespace fieldwit;
using namespace fieldwit::testing;

TEST(Separable, SingleTermIsPure) {
    const auto s = random_separable(4, 1, 3);
    EXPECT_NEAR((s.rho.matrix() * s.rho.matrix()).trace().real(), 1.0, 1e-13);
    EXPECT_NEAR(s.spec.weights[0], 1.0, 1e-15);
}

TEST(Separable, Deterministic) {
    const auto a = random_separable(3, 3, 99), b = random_separable(3, 3, 99), c = random_separable(3, 3, 100);
    EXPECT_EQ(a.rho.matrix(), b.rho.matrix());
    EXPECT_NE(a.rho.matrix(), c.rho.matrix());
}

TEST(Separable, ValidDensityMatrices) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = random_separable(2 + seed % 4, 1 + seed % 4, seed);
        EXPECT_NO_THROW(s.rho.validate());
        double w = 0.0;
        for (double x : s.spec.weights) {
            EXPECT_GE(x, 0.0);
            w += x;
        }
        EXPECT_NEAR(w, 1.0, 1e-12);
    }
}

TEST(Separable, UpUpDownDownMixture) {
    SeparableSpec spec{2, {0.5, 0.5}, {{{0.0, 0.0}, {0.0, 0.0}}, {{M_PI, 0.0}, {M_PI, 0.0}}}};
    const CMatrix m = spec.density_matrix().matrix();
    CMatrix ref = CMatrix::Zero(4, 4);
    ref(0, 0) = ref(3, 3) = 0.5;
    EXPECT_LT((m - ref).cwiseAbs().maxCoeff(), 1e-15);
    spec.weights = {0.7, 0.7};
    EXPECT_THROW(spec.validate(), std::invalid_argument);
}

TEST(TrialSeed, DistinctAndStable) {
    EXPECT_EQ(trial_seed(1, 5), trial_seed(1, 5));
    EXPECT_NE(trial_seed(1, 5), trial_seed(1, 6));
    EXPECT_NE(trial_seed(1, 5), trial_seed(2, 5));
}

TEST(Fuzz, SmallRunHasNoViolations) {
    FuzzOptions o;
    o.trials = 300;
    o.workers = 2;
    const auto r = fuzz_witnesses(o);
    EXPECT_EQ(r.trials, 300);
    EXPECT_EQ(r.evaluations, 300L * 4 * 4);
    EXPECT_TRUE(r.violations.empty());
    EXPECT_GE(r.min_value, -1e-9);
    long total = 0;
    for (long c : r.histogram_counts) total += c;
    EXPECT_EQ(total, 300);
}

TEST(Fuzz, ReproducibleAcrossWorkers) {
    FuzzOptions o;
    o.trials = 100;
    o.workers = 1;
    const auto a = fuzz_witnesses(o);
    o.workers = 3;
    const auto b = fuzz_witnesses(o);
    EXPECT_EQ(a.min_value, b.min_value);
    EXPECT_EQ(a.argmin.trial, b.argmin.trial);
    EXPECT_EQ(a.histogram_counts, b.histogram_counts);
}

TEST(Fuzz, BellControlIsReported) {
    CVector bell = CVector::Zero(4);
    bell(1) = bell(2) = 1.0 / std::sqrt(2.0);
    FuzzOptions o;
    o.trials = 10;
    o.controls.push_back({"bell", DensityMatrix::from_pure(PureState(bell, 2)), chain(2, 1.0),
                          {Direction::in_plane(M_PI / 2)}});
    const auto r = fuzz_witnesses(o);
    ASSERT_FALSE(r.control_violations.empty());
    EXPECT_NEAR(r.min_value, -4.0, 1e-12);
    EXPECT_EQ(r.argmin.source, "bell");
    EXPECT_EQ(r.argmin.witness, "w3_Z");
    EXPECT_TRUE(r.violations.empty());
    EXPECT_GE(r.random_min, -1e-9);
}

TEST(Fuzz, GroundControlGivesExactZero) {
    FuzzOptions o;
    o.trials = 5;
    o.controls.push_back({"ground", DensityMatrix::from_pure(product_state(std::vector<BlochAngles>(3, {M_PI, 0.0}))),
                          chain(3, 0.5), plane_sweep(5)});
    const auto r = fuzz_witnesses(o);
    EXPECT_TRUE(r.control_violations.empty());
    EXPECT_LE(r.min_value, 1e-12);
}

TEST(Fuzz, JsonReport) {
    FuzzOptions o;
    o.trials = 5;
    const auto j = to_json(fuzz_witnesses(o));
    EXPECT_TRUE(j.contains("min"));
    EXPECT_TRUE(j.contains("argmin"));
    EXPECT_TRUE(j["violations"].is_array());
}
