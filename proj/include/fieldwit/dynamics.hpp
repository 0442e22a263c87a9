#pragma once

// Free-space dipole-dipole couplings and exact Lindblad evolution:
//
//   d rho/dt = sum_{j != m} i Delta_jm [s+_j s-_m, rho]
//            + sum_{j,m} Gamma_jm (s-_j rho s+_m - 1/2 {s+_m s-_j, rho})
//
// with Delta_jm = -e_j . Re G(r_jm) . e_m and Gamma_jm = e_j . Im G(r_jm) . e_m.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "fieldwit/field.hpp"
#include "fieldwit/ode.hpp"
#include "fieldwit/witness.hpp"

namespace fieldwit {

/// literal: Gamma_jm = e.Im G.e as printed, so Gamma_jj = 1/2 and a single
///          atom decays as e^{-t/2}.
/// standard: every Gamma_jm doubled, Gamma_jj = 1 (population decays as
///          e^{-t}); Delta is unchanged.
enum class DecayConvention { literal, standard };

struct GreensCouplings {
    Eigen::MatrixXd delta;  // symmetric, zero diagonal
    Eigen::MatrixXd gamma;  // symmetric PSD
    DecayConvention convention = DecayConvention::standard;

    int n_atoms() const { return static_cast<int>(gamma.rows()); }
    /// Throws NumericalError unless gamma is symmetric PSD (1e-9) and delta symmetric (1e-10).
    void validate() const;
};

/// (3/4) e^{ikr}/(kr)^3 [(k^2r^2 + ikr - 1) 1 - (k^2r^2 + 3ikr - 3) rr^T/r^2], k = Gamma = 1.
Eigen::Matrix3cd greens_tensor(const Vec3& r);

GreensCouplings couplings(const AtomConfig& config, DecayConvention convention = DecayConvention::standard);

/// Precomputed generator for repeated right-hand-side evaluations.
class Liouvillian {
  public:
    explicit Liouvillian(const GreensCouplings& c);

    int n_atoms() const { return n_; }
    /// out = L(rho). `rho` and `out` are 2^N x 2^N and must not alias. With
    /// `hermitian` set, rho is assumed Hermitian and one sparse product is saved.
    void apply(const Eigen::Ref<const CMatrix>& rho, Eigen::Ref<CMatrix> out, bool hermitian = false) const;

  private:
    int n_;
    Eigen::MatrixXd gamma_;
    // Non-Hermitian generator K with rho' = -i (K rho - rho K^dag) + jumps.
    Eigen::SparseMatrix<cplx, Eigen::RowMajor> k_;
    // Basis indices with site j down.
    std::vector<std::vector<Eigen::Index>> down_rows_;
};

CMatrix lindblad_rhs(const DensityMatrix& rho, const GreensCouplings& c);

struct IntegrateOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    /// Abort when a sampled state has an eigenvalue below this.
    double positivity_floor = -1e-6;
    bool check_positivity = true;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    /// |Tr rho(t) - Tr rho(0)| per sample.
    std::vector<double> trace_drift;
    /// Smallest eigenvalue per sample (NaN when not checked).
    std::vector<double> min_eigenvalue;
    OdeStats stats;
};

struct TrajectoryDiagnostics {
    std::vector<double> times;
    std::vector<double> trace_drift;
    std::vector<double> min_eigenvalue;
    std::vector<double> hermiticity_error;
    OdeStats stats;
};

using DensityObserver = std::function<void(std::size_t i, double t, const DensityMatrix& rho)>;

/// Streams every sample to `observe` instead of storing the states.
TrajectoryDiagnostics integrate_observed(const DensityMatrix& rho0, const GreensCouplings& c,
                                         std::span<const double> t_grid, const IntegrateOptions& opts,
                                         const DensityObserver& observe);

Trajectory integrate(const DensityMatrix& rho0, const GreensCouplings& c, std::span<const double> t_grid,
                     const IntegrateOptions& opts = {});

/// First time the series drops below -epsilon, linearly interpolated between
/// the bracketing samples; empty if it never does.
std::optional<double> detect_t_ent(std::span<const double> times, std::span<const double> w_min, double epsilon);

std::optional<double> detect_t_ent(const Trajectory& traj, const AtomConfig& config,
                                   std::span<const Direction> directions, double epsilon,
                                   const SweepOptions& opts = {});

/// Evenly spaced grid of `samples` points on [0, t_max].
std::vector<double> linear_time_grid(double t_max, int samples);

}  // namespace fieldwit
