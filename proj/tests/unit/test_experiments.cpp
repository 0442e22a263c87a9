#include <gtest/gtest.h>

#include <sstream>

#include "fieldwit/cumulant.hpp"
#include "fieldwit/experiments.hpp"

using namespace fieldwit;

namespace {

double number(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* l = std::get_if<long>(&c)) return static_cast<double>(*l);
    return std::nan("");
}

}  // namespace

TEST(Config, DefaultsExistForEverySubcommand) {
    for (const auto& name : experiment_names()) EXPECT_TRUE(default_config(name).is_object()) << name;
    EXPECT_THROW(default_config("nope"), ConfigError);
}

TEST(Config, UnknownKeysRejected) {
    EXPECT_THROW(resolve_config("decay", Json{{"bogus", 1}}, {}), ConfigError);
    EXPECT_THROW(resolve_config("decay", Json{{"geometry", {{"nn", 3}}}}, {}), ConfigError);
    EXPECT_THROW(resolve_config("decay", nullptr, {"integrator.tmax=3"}), ConfigError);
}

TEST(Config, WrongKindRejected) {
    EXPECT_THROW(resolve_config("decay", Json{{"geometry", {{"n", "eight"}}}}, {}), ConfigError);
    EXPECT_THROW(resolve_config("decay", Json{{"geometry", 3}}, {}), ConfigError);
}

TEST(Config, OverridesApplyInOrderAfterFile) {
    const auto c = resolve_config("decay", Json{{"geometry", {{"n", 4}}}},
                                  {"geometry.n=5", "convention=literal", "directions.angles=[0.1,0.2]", "geometry.n=6"});
    EXPECT_EQ(c["geometry"]["n"], 6);
    EXPECT_EQ(c["convention"], "literal");
    EXPECT_EQ(c["directions"]["angles"].size(), 2u);
    EXPECT_EQ(c["geometry"]["spacing"], 0.3);
    EXPECT_THROW(apply_overrides(c, {"geometry.n"}), ConfigError);
    EXPECT_THROW(apply_overrides(c, {"geometry..n=3"}), ConfigError);
}

TEST(Config, BuildersValidate) {
    auto c = resolve_config("decay", nullptr, {"geometry.type=ring"});
    EXPECT_THROW(build_geometry(c), ConfigError);
    c = resolve_config("decay", nullptr, {"geometry.n=0"});
    EXPECT_THROW(build_geometry(c), ConfigError);
    c = resolve_config("decay", nullptr, {"directions.grid=plane-angles"});
    EXPECT_THROW(build_directions(c), ConfigError);
    c = resolve_config("decay", nullptr, {"state.kind=weird"});
    EXPECT_THROW(build_density(c, 3), ConfigError);
    c = resolve_config("decay", nullptr, {"geometry.type=cloud", "geometry.n=40", "geometry.radius=0.1",
                                          "geometry.min_separation=0.2"});
    EXPECT_THROW(build_geometry(c), ConfigError);
}

TEST(Format, SeventeenSignificantDigits) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(std::stod(format_double(M_PI)), M_PI);
    EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Csv, ConfigEmbeddedAsComments) {
    const auto config = resolve_config("fig1-sphere", nullptr, {"directions.n_theta=2", "directions.n_phi=3"});
    const auto r = run_fig1_sphere(config);
    std::stringstream out;
    write_csv(out, "fig1-sphere", config, r);
    std::string line;
    std::vector<std::string> comments, data;
    while (std::getline(out, line)) (line.rfind('#', 0) == 0 ? comments : data).push_back(line);
    ASSERT_EQ(data.size(), 7u);
    EXPECT_EQ(data[0], "theta,phi,chi,w1,w2,w3_X,w3_Y,w3_Z,w4_X,w4_Y,w4_Z,W");
    std::string cfg;
    bool in_config = false;
    for (const auto& c : comments) {
        if (c == "# config:") in_config = true;
        else if (c == "# summary:") in_config = false;
        else if (in_config) cfg += c.substr(4) + "\n";
    }
    EXPECT_EQ(Json::parse(cfg), config);
}

TEST(Fig1, PerpendicularSingleDirectionIsSpinSqueezing) {
    const auto config = resolve_config("fig1-sphere", nullptr, {"directions.grid=sphere-points",
                                                                "directions.points=[[1.5707963267948966,1.5707963267948966]]"});
    const auto r = run_fig1_sphere(config);
    ASSERT_EQ(r.table.rows.size(), 1u);
    EXPECT_NEAR(number(r.table.rows[0][r.table.column("W")]), r.summary["W_0"].get<double>(), 1e-12);
}

TEST(Fig1, DefaultsDetectOnlySomewhere) {
    const auto r = run_fig1_sphere(resolve_config("fig1-sphere", nullptr, {"directions.n_theta=16", "directions.n_phi=32"}));
    EXPECT_GE(r.summary["W_0"].get<double>(), 0.0);
    EXPECT_GT(r.summary["detected"].get<long>(), 0);
    EXPECT_LT(r.summary["detected"].get<long>(), 16 * 32);
}

TEST(DickeSweep, BroadsideRowVanishes) {
    const auto r = run_dicke_sweep(resolve_config("dicke-sweep", nullptr, {"directions.n=3"}));
    ASSERT_EQ(r.table.rows.size(), 3u);
    EXPECT_LT(std::abs(number(r.table.rows[1][r.table.column("w2")])), 1e-6);
    EXPECT_LT(std::abs(r.summary["w2_at_reference"].get<double>()), 1e-6);
}

TEST(DickeSweep, ExplicitPhases) {
    const auto r = run_dicke_sweep(resolve_config(
        "dicke-sweep", nullptr, {"geometry.n=2", "geometry.spacing=1.0", "state.phases=[0,0]", "directions.n=3"}));
    EXPECT_NEAR(number(r.table.rows[1][r.table.column("S_k")]), 4.0, 1e-12);
    EXPECT_TRUE(r.summary["delta"].is_null());
}

TEST(Decay, SmallRunColumnsAndInvariants) {
    const auto r = run_decay(resolve_config(
        "decay", nullptr, {"geometry.n=3", "integrator.t_max=2", "integrator.samples=11", "directions.n=8"}));
    EXPECT_EQ(r.table.header,
              (std::vector<std::string>{"t", "W_min_over_dirs", "theta_argmin", "C_glob", "trace_drift", "min_eig"}));
    EXPECT_EQ(r.table.rows.size(), 11u);
    EXPECT_LE(r.summary["max_trace_drift"].get<double>(), 1e-10);
    EXPECT_GE(r.summary["min_eigenvalue"].get<double>(), -1e-8);
}

TEST(Decay, LooseToleranceIsNumericalFailure) {
    const auto c = resolve_config("decay", nullptr,
                                  {"geometry.n=3", "integrator.rtol=1", "integrator.atol=1", "integrator.t_max=5",
                                   "integrator.samples=3"});
    EXPECT_THROW(run_decay(c), NumericalError);
}

TEST(CumulantTent, TwoAtomColumnMatchesExactSolver) {
    // Two-atom cumulant dynamics are exact, so t_ent must agree with the
    // exact solver on the same grid.
    const auto config = resolve_config("cumulant-tent", nullptr,
                                       {"cumulant.n_list=[2]", "cumulant.kd_list=[0.5,0.8]", "integrator.t_max=2"});
    const auto r = run_cumulant_tent(config);
    ASSERT_EQ(r.table.rows.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        const double kd = number(r.table.rows[i][1]);
        const auto geo = chain(2, kd);
        const auto c = couplings(geo);
        const auto grid = linear_time_grid(2.0, 201);
        const auto traj = integrate(DensityMatrix::from_pure(product_state(antisymmetric_angles(2))), c, grid);
        const std::vector<Direction> dirs{Direction::in_plane(0.45 * M_PI)};
        const auto exact = detect_t_ent(traj, geo, dirs, detection_epsilon(2));
        const double cum = number(r.table.rows[i][2]);
        if (!exact) {
            EXPECT_TRUE(std::isnan(cum));
        } else {
            EXPECT_NEAR(cum, *exact, 1e-3 * *exact) << kd;
        }
    }
}

TEST(Fuzz, ControlsAndReport) {
    const auto r = run_fuzz(resolve_config("fuzz", nullptr, {"fuzz.trials=20", "fuzz.controls=[\"bell\"]"}));
    EXPECT_NEAR(r.summary["min"].get<double>(), -4.0, 1e-12);
    EXPECT_TRUE(r.summary["violations"].empty());
    EXPECT_THROW(run_fuzz(resolve_config("fuzz", nullptr, {"fuzz.controls=[\"nope\"]"})), ConfigError);
}
