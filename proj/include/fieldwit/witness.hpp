#pragma once

// Electric-field entanglement witnesses. All eight values are nonnegative on
// every separable state, so a negative minimum certifies entanglement.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fieldwit/field.hpp"

namespace fieldwit {

enum class Quadrature { X = 0, Y = 1, Z = 2 };

struct WitnessReport {
    double w1 = 0.0;
    double w2 = 0.0;
    /// Indexed by the A label of (A, B, C) in {(X,Y,Z), (Y,Z,X), (Z,X,Y)}.
    std::array<double, 3> w3{};
    /// Indexed by the C label.
    std::array<double, 3> w4{};
    double w_min = 0.0;
    /// One of "w1", "w2", "w3_X", ..., "w4_Z".
    std::string argmin;
    std::optional<Direction> direction;

    /// The eight values in column order w1, w2, w3_X, w3_Y, w3_Z, w4_X, w4_Y, w4_Z.
    std::array<double, 8> values() const;
};

/// Detection threshold: 1e-6 N.
inline double detection_epsilon(int n_atoms) { return 1e-6 * n_atoms; }

inline bool detects(const WitnessReport& r, double epsilon) { return r.w_min < -epsilon; }

WitnessReport witness_report(const OperatorMoments& m);

/// Witnesses with every optical phase set to zero (the spin-squeezing case).
WitnessReport spin_squeezing_report(const SpinCorrelators& c);
WitnessReport spin_squeezing_report(const PureState& psi, const AtomConfig& config);
WitnessReport spin_squeezing_report(const DensityMatrix& rho, const AtomConfig& config);

/// Moments with atom j's optical phase replaced by phases[j].
OperatorMoments phase_vector_moments(const SpinCorrelators& c, std::span<const double> phases);
OperatorMoments phase_vector_moments(const PureState& psi, const AtomConfig& config, std::span<const double> phases);
OperatorMoments phase_vector_moments(const DensityMatrix& rho, const AtomConfig& config,
                                     std::span<const double> phases);

/// Reports at the chi in {2 pi i / n_chi} that minimizes w_min. The
/// direction's own chi is replaced.
WitnessReport chi_optimized_report(const SpinCorrelators& c, const AtomConfig& config, const Direction& dir,
                                   int n_chi = 64);

struct SweepOptions {
    /// 0 means the worker count from the environment.
    int workers = 0;
    bool optimize_chi = false;
    int n_chi = 64;
};

/// One report per direction, in input order.
std::vector<WitnessReport> sweep(const SpinCorrelators& c, const AtomConfig& config,
                                 std::span<const Direction> directions, const SweepOptions& opts = {});
std::vector<WitnessReport> sweep(const PureState& psi, const AtomConfig& config,
                                 std::span<const Direction> directions, const SweepOptions& opts = {});
std::vector<WitnessReport> sweep(const DensityMatrix& rho, const AtomConfig& config,
                                 std::span<const Direction> directions, const SweepOptions& opts = {});

/// Index of the report with the smallest w_min (first one on ties).
std::size_t argmin_report(std::span<const WitnessReport> reports);

}  // namespace fieldwit
