#pragma once

// Random separable states and a fuzz harness that checks the witnesses stay
// nonnegative on them.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fieldwit/geometry.hpp"
#include "fieldwit/qstate.hpp"
#include "fieldwit/witness.hpp"

namespace fieldwit {

/// rho = sum_l p_l  (x)_j |psi_lj><psi_lj| with |psi_lj> given by Bloch angles.
struct SeparableSpec {
    int n_atoms = 0;
    std::vector<double> weights;
    /// angles[l][j]: term l, atom j.
    std::vector<std::vector<BlochAngles>> angles;

    /// Throws std::invalid_argument unless the weights lie on the simplex (1e-12).
    void validate() const;
    DensityMatrix density_matrix() const;
};

struct SeparableSample {
    SeparableSpec spec;
    DensityMatrix rho;
};

/// Symmetric Dirichlet(1) weights over `n_terms` Haar-random pure products.
SeparableSample random_separable(int n_atoms, int n_terms, std::uint64_t seed);

/// Seed for trial `index` of a run seeded with `seed`; independent of thread count.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index);

/// A fixed state evaluated alongside the random trials (e.g. a known
/// entangled control).
struct FuzzControl {
    std::string label;
    DensityMatrix rho;
    AtomConfig config;
    std::vector<Direction> directions;
};

struct FuzzOptions {
    int n_min = 2;
    int n_max = 6;
    int l_min = 1;
    int l_max = 4;
    long trials = 10000;
    int dirs_per_trial = 4;
    int chi_per_trial = 4;
    std::uint64_t seed = 1;
    /// Random clouds use a radius drawn uniformly from this range.
    double radius_min = 0.5;
    double radius_max = 3.0;
    double violation_threshold = -1e-9;
    int workers = 0;
    std::vector<FuzzControl> controls;
};

/// Where a witness value came from, enough to regenerate it.
struct FuzzSample {
    std::string source;  // "random" or the control label
    long trial = -1;
    int n_atoms = 0;
    int n_terms = 0;
    std::uint64_t state_seed = 0;
    std::uint64_t geometry_seed = 0;
    double radius = 0.0;
    Direction direction;
    std::string witness;
    double value = 0.0;
};

struct FuzzReport {
    double min_value = 0.0;
    FuzzSample argmin;
    long trials = 0;
    long evaluations = 0;
    /// Random-trial evaluations below the violation threshold (should be empty).
    std::vector<FuzzSample> violations;
    /// Control evaluations below the violation threshold.
    std::vector<FuzzSample> control_violations;
    /// Smallest witness over the random trials only.
    double random_min = 0.0;
    /// Histogram of per-trial minima; bin i covers [edges[i], edges[i+1]).
    std::vector<double> histogram_edges;
    std::vector<long> histogram_counts;
};

FuzzReport fuzz_witnesses(const FuzzOptions& opts);

nlohmann::json to_json(const FuzzSample& s);
nlohmann::json to_json(const FuzzReport& r);

}  // namespace fieldwit
