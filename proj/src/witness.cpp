#include "fieldwit/witness.hpp"

#include <cmath>

#include "fieldwit/parallel.hpp"

namespace fieldwit {

namespace {

constexpr std::array<const char*, 8> kLabels = {"w1", "w2", "w3_X", "w3_Y", "w3_Z", "w4_X", "w4_Y", "w4_Z"};

}  // namespace

std::array<double, 8> WitnessReport::values() const {
    return {w1, w2, w3[0], w3[1], w3[2], w4[0], w4[1], w4[2]};
}

WitnessReport witness_report(const OperatorMoments& m) {
    const double n = m.n_atoms;
    if (m.n_atoms < 1) throw std::invalid_argument("moments need N >= 1");
    const std::array<double, 3> second = {m.second_x, m.second_y, m.second_z};
    const std::array<double, 3> var = {m.variance_x(), m.variance_y(), m.variance_z()};

    WitnessReport r;
    r.direction = m.direction;
    r.w1 = n * (2.0 + n) - second[0] - second[1] - second[2];
    r.w2 = var[0] + var[1] + var[2] - 2.0 * n;
    // Cyclic (A, B, C): A = a, B = a + 1, C = a + 2 (mod 3).
    for (std::size_t a = 0; a < 3; ++a) {
        const std::size_t b = (a + 1) % 3, c = (a + 2) % 3;
        r.w3[a] = 2.0 * n + (n - 1.0) * var[a] - second[b] - second[c];
        r.w4[c] = (n - 1.0) * (var[a] + var[b]) - second[c] - n * (n - 2.0);
    }
    const auto vals = r.values();
    std::size_t best = 0;
    for (std::size_t i = 1; i < vals.size(); ++i) {
        if (vals[i] < vals[best]) best = i;
    }
    r.w_min = vals[best];
    r.argmin = kLabels[best];
    return r;
}

OperatorMoments phase_vector_moments(const SpinCorrelators& c, std::span<const double> phases) {
    if (static_cast<int>(phases.size()) != c.n_atoms) throw std::invalid_argument("need one phase per atom");
    return moments_from_correlators(c, phases);
}

OperatorMoments phase_vector_moments(const PureState& psi, const AtomConfig& config, std::span<const double> phases) {
    if (psi.n_atoms() != config.n_atoms()) throw std::invalid_argument("state/config size mismatch");
    return phase_vector_moments(correlators(psi), phases);
}

OperatorMoments phase_vector_moments(const DensityMatrix& rho, const AtomConfig& config,
                                     std::span<const double> phases) {
    if (rho.n_atoms() != config.n_atoms()) throw std::invalid_argument("state/config size mismatch");
    return phase_vector_moments(correlators(rho), phases);
}

WitnessReport spin_squeezing_report(const SpinCorrelators& c) {
    const std::vector<double> zero(static_cast<std::size_t>(c.n_atoms), 0.0);
    return witness_report(moments_from_correlators(c, zero));
}

WitnessReport spin_squeezing_report(const PureState& psi, const AtomConfig& config) {
    if (psi.n_atoms() != config.n_atoms()) throw std::invalid_argument("state/config size mismatch");
    return spin_squeezing_report(correlators(psi));
}

WitnessReport spin_squeezing_report(const DensityMatrix& rho, const AtomConfig& config) {
    if (rho.n_atoms() != config.n_atoms()) throw std::invalid_argument("state/config size mismatch");
    return spin_squeezing_report(correlators(rho));
}

WitnessReport chi_optimized_report(const SpinCorrelators& c, const AtomConfig& config, const Direction& dir,
                                   int n_chi) {
    if (n_chi < 1) throw std::invalid_argument("chi grid needs at least one point");
    WitnessReport best;
    for (int i = 0; i < n_chi; ++i) {
        Direction d = dir;
        d.chi = 2.0 * M_PI * i / n_chi;
        WitnessReport r = witness_report(moments(c, config, d));
        if (i == 0 || r.w_min < best.w_min) best = std::move(r);
    }
    return best;
}

std::vector<WitnessReport> sweep(const SpinCorrelators& c, const AtomConfig& config,
                                 std::span<const Direction> directions, const SweepOptions& opts) {
    if (directions.empty()) throw std::invalid_argument("sweep needs at least one direction");
    std::vector<WitnessReport> out(directions.size());
    parallel_for(
        directions.size(),
        [&](std::size_t i) {
            out[i] = opts.optimize_chi ? chi_optimized_report(c, config, directions[i], opts.n_chi)
                                       : witness_report(moments(c, config, directions[i]));
        },
        opts.workers);
    return out;
}

std::vector<WitnessReport> sweep(const PureState& psi, const AtomConfig& config,
                                 std::span<const Direction> directions, const SweepOptions& opts) {
    if (psi.n_atoms() != config.n_atoms()) throw std::invalid_argument("state/config size mismatch");
    return sweep(correlators(psi), config, directions, opts);
}

std::vector<WitnessReport> sweep(const DensityMatrix& rho, const AtomConfig& config,
                                 std::span<const Direction> directions, const SweepOptions& opts) {
    if (rho.n_atoms() != config.n_atoms()) throw std::invalid_argument("state/config size mismatch");
    return sweep(correlators(rho), config, directions, opts);
}

std::size_t argmin_report(std::span<const WitnessReport> reports) {
    if (reports.empty()) throw std::invalid_argument("no reports");
    std::size_t best = 0;
    for (std::size_t i = 1; i < reports.size(); ++i) {
        if (reports[i].w_min < reports[best].w_min) best = i;
    }
    return best;
}

}  // namespace fieldwit
