#include "fieldwit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fieldwit/parallel.hpp"

namespace fieldwit {

namespace {

BlochAngles haar_bloch(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double cos_theta = 1.0 - 2.0 * uni(rng);
    return {std::acos(std::clamp(cos_theta, -1.0, 1.0)), 2.0 * M_PI * uni(rng)};
}

Direction random_direction(std::mt19937_64& rng, double chi) {
    const BlochAngles a = haar_bloch(rng);
    return Direction::spherical(a.theta, a.phi, chi);
}

// Per-trial minima are binned on a signed log-like scale.
std::vector<double> default_edges() {
    const double inf = std::numeric_limits<double>::infinity();
    return {-inf, -1e-9, 1e-9, 1e-6, 1e-3, 1e-1, 1.0, 10.0, inf};
}

struct TrialResult {
    FuzzSample best;
    long evaluations = 0;
    std::vector<FuzzSample> violations;
};

std::array<const char*, 8> witness_labels() {
    return {"w1", "w2", "w3_X", "w3_Y", "w3_Z", "w4_X", "w4_Y", "w4_Z"};
}

// Evaluates every witness value for each direction, keeping the smallest
// and every value below the threshold.
void evaluate(const SpinCorrelators& corr, const AtomConfig& config, const std::vector<Direction>& dirs,
              const FuzzSample& proto, double threshold, TrialResult& out) {
    const auto labels = witness_labels();
    for (const auto& d : dirs) {
        const WitnessReport r = witness_report(moments(corr, config, d));
        const auto values = r.values();
        ++out.evaluations;
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (values[k] < out.best.value || out.best.witness.empty()) {
                out.best = proto;
                out.best.direction = d;
                out.best.witness = labels[k];
                out.best.value = values[k];
            }
            if (values[k] < threshold) {
                FuzzSample v = proto;
                v.direction = d;
                v.witness = labels[k];
                v.value = values[k];
                out.violations.push_back(std::move(v));
            }
        }
    }
}

}  // namespace

void SeparableSpec::validate() const {
    if (n_atoms < 1) throw std::invalid_argument("separable state needs at least one atom");
    if (weights.empty() || weights.size() != angles.size()) {
        throw std::invalid_argument("separable state needs one weight per term");
    }
    double total = 0.0;
    for (double p : weights) {
        if (p < 0.0) throw std::invalid_argument("separable weights must be nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("separable weights must sum to 1");
    for (const auto& term : angles) {
        if (static_cast<int>(term.size()) != n_atoms) throw std::invalid_argument("term has the wrong atom count");
    }
}

DensityMatrix SeparableSpec::density_matrix() const {
    validate();
    check_exact_size(n_atoms);
    const auto dim = static_cast<Eigen::Index>(hilbert_dim(n_atoms));
    CMatrix rho = CMatrix::Zero(dim, dim);
    for (std::size_t l = 0; l < weights.size(); ++l) {
        const CVector psi = product_state(angles[l]).amplitudes();
        rho.noalias() += weights[l] * psi * psi.adjoint();
    }
    return DensityMatrix(std::move(rho), n_atoms);
}

SeparableSample random_separable(int n_atoms, int n_terms, std::uint64_t seed) {
    check_exact_size(n_atoms);
    if (n_terms < 1) throw std::invalid_argument("separable state needs at least one term");
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> gamma(1.0, 1.0);
    SeparableSpec spec;
    spec.n_atoms = n_atoms;
    double total = 0.0;
    for (int l = 0; l < n_terms; ++l) {
        spec.weights.push_back(gamma(rng));
        total += spec.weights.back();
    }
    for (double& p : spec.weights) p /= total;
    for (int l = 0; l < n_terms; ++l) {
        std::vector<BlochAngles> term;
        for (int j = 0; j < n_atoms; ++j) term.push_back(haar_bloch(rng));
        spec.angles.push_back(std::move(term));
    }
    DensityMatrix rho = spec.density_matrix();
    return {std::move(spec), std::move(rho)};
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

FuzzReport fuzz_witnesses(const FuzzOptions& opts) {
    if (opts.trials < 1) throw std::invalid_argument("fuzz needs at least one trial");
    if (opts.n_min < 1 || opts.n_max < opts.n_min) throw std::invalid_argument("invalid atom-count range");
    if (opts.l_min < 1 || opts.l_max < opts.l_min) throw std::invalid_argument("invalid term-count range");
    if (opts.dirs_per_trial < 1 || opts.chi_per_trial < 1) {
        throw std::invalid_argument("need at least one direction and one chi per trial");
    }
    check_exact_size(opts.n_max);

    std::vector<TrialResult> results(static_cast<std::size_t>(opts.trials));
    parallel_for(
        results.size(),
        [&](std::size_t i) {
            std::mt19937_64 rng(trial_seed(opts.seed, i));
            std::uniform_int_distribution<int> pick_n(opts.n_min, opts.n_max);
            std::uniform_int_distribution<int> pick_l(opts.l_min, opts.l_max);
            std::uniform_real_distribution<double> pick_r(opts.radius_min, opts.radius_max);
            std::uniform_real_distribution<double> pick_chi(0.0, 2.0 * M_PI);

            FuzzSample proto;
            proto.source = "random";
            proto.trial = static_cast<long>(i);
            proto.n_atoms = pick_n(rng);
            proto.n_terms = pick_l(rng);
            proto.state_seed = rng();
            proto.geometry_seed = rng();
            proto.radius = pick_r(rng);
            proto.value = std::numeric_limits<double>::infinity();

            const auto sample = random_separable(proto.n_atoms, proto.n_terms, proto.state_seed);
            const AtomConfig config = spherical_cloud(proto.n_atoms, proto.radius, proto.geometry_seed);

            std::vector<Direction> dirs;
            for (int d = 0; d < opts.dirs_per_trial; ++d) {
                const Direction base = random_direction(rng, 0.0);
                for (int c = 0; c < opts.chi_per_trial; ++c) {
                    Direction dir = base;
                    dir.chi = pick_chi(rng);
                    dirs.push_back(dir);
                }
            }
            auto& res = results[i];
            res.best.value = std::numeric_limits<double>::infinity();
            evaluate(correlators(sample.rho), config, dirs, proto, opts.violation_threshold, res);
        },
        opts.workers);

    FuzzReport report;
    report.trials = opts.trials;
    report.histogram_edges = default_edges();
    report.histogram_counts.assign(report.histogram_edges.size() - 1, 0);
    report.min_value = std::numeric_limits<double>::infinity();
    for (const auto& r : results) {
        report.evaluations += r.evaluations;
        if (r.best.value < report.min_value) {
            report.min_value = r.best.value;
            report.argmin = r.best;
        }
        for (const auto& v : r.violations) report.violations.push_back(v);
        for (std::size_t b = 0; b + 1 < report.histogram_edges.size(); ++b) {
            if (r.best.value >= report.histogram_edges[b] && r.best.value < report.histogram_edges[b + 1]) {
                ++report.histogram_counts[b];
                break;
            }
        }
    }
    report.random_min = report.min_value;

    for (const auto& ctl : opts.controls) {
        if (ctl.rho.n_atoms() != ctl.config.n_atoms()) throw std::invalid_argument("control state/config mismatch");
        FuzzSample proto;
        proto.source = ctl.label;
        proto.n_atoms = ctl.config.n_atoms();
        TrialResult res;
        res.best.value = std::numeric_limits<double>::infinity();
        evaluate(correlators(ctl.rho), ctl.config, ctl.directions, proto, opts.violation_threshold, res);
        report.evaluations += res.evaluations;
        if (res.best.value < report.min_value) {
            report.min_value = res.best.value;
            report.argmin = res.best;
        }
        for (auto& v : res.violations) report.control_violations.push_back(std::move(v));
    }
    return report;
}

nlohmann::json to_json(const FuzzSample& s) {
    return {{"source", s.source},
            {"trial", s.trial},
            {"n_atoms", s.n_atoms},
            {"n_terms", s.n_terms},
            {"state_seed", s.state_seed},
            {"geometry_seed", s.geometry_seed},
            {"radius", s.radius},
            {"khat", {s.direction.khat.x(), s.direction.khat.y(), s.direction.khat.z()}},
            {"chi", s.direction.chi},
            {"witness", s.witness},
            {"value", s.value}};
}

nlohmann::json to_json(const FuzzReport& r) {
    nlohmann::json edges = nlohmann::json::array();
    for (double e : r.histogram_edges) {
        if (std::isinf(e)) {
            edges.push_back(e < 0 ? "-inf" : "inf");
        } else {
            edges.push_back(e);
        }
    }
    nlohmann::json viol = nlohmann::json::array();
    for (const auto& v : r.violations) viol.push_back(to_json(v));
    nlohmann::json cviol = nlohmann::json::array();
    for (const auto& v : r.control_violations) cviol.push_back(to_json(v));
    return {{"min", r.min_value},
            {"random_min", r.random_min},
            {"argmin", to_json(r.argmin)},
            {"trials", r.trials},
            {"evaluations", r.evaluations},
            {"violations", viol},
            {"control_violations", cviol},
            {"histogram", {{"edges", edges}, {"counts", r.histogram_counts}}}};
}

}  // namespace fieldwit
