#pragma once

// Far-field electric-field operators, their quadratures and the six moments
// that enter the witnesses.
//
// The optical phase of atom j at direction (khat, chi) is
//   theta_j = khat . r_j + chi,
// and the field parts are E+ = sum_j e^{-i theta_j} sigma_j^-,
// E- = sum_j e^{+i theta_j} sigma_j^+. The quadratures are X = E+ + E-,
// Y = i (E+ - E-) and Z = sum_j sigma_j^z. Note Y = -sum_j phase_pauli(j, y).

#include <optional>
#include <span>
#include <vector>

#include "fieldwit/geometry.hpp"
#include "fieldwit/qstate.hpp"

namespace fieldwit {

struct OperatorMoments {
    double mean_x = 0.0;
    double mean_y = 0.0;
    double mean_z = 0.0;
    double second_x = 0.0;
    double second_y = 0.0;
    double second_z = 0.0;
    int n_atoms = 0;
    /// Empty when the moments were built from an explicit phase vector.
    std::optional<Direction> direction;

    double variance_x() const { return second_x - mean_x * mean_x; }
    double variance_y() const { return second_y - mean_y * mean_y; }
    double variance_z() const { return second_z - mean_z * mean_z; }
};

/// One- and two-point spin correlators on distinct sites. Diagonal entries of
/// the pair blocks are unused and kept at zero.
///   c_pm(j,m) = <s+_j s-_m>   (Hermitian)
///   c_pp(j,m) = <s+_j s+_m>   (symmetric)
///   c_zz(j,m) = <sz_j sz_m>   (real symmetric)
///   c_zp(j,m) = <sz_j s+_m>
/// The cumulant integrator uses the same container as its state.
struct SpinCorrelators {
    int n_atoms = 0;
    CVector s_plus;
    Eigen::VectorXd s_z;
    CMatrix c_pm;
    CMatrix c_pp;
    Eigen::MatrixXd c_zz;
    CMatrix c_zp;

    static SpinCorrelators zeros(int n_atoms);
};

enum class FieldPart { positive, negative };

std::vector<double> optical_phases(const AtomConfig& config, const Direction& dir);

Operator field_operator(const AtomConfig& config, const Direction& dir, FieldPart part);

struct Quadratures {
    Operator x;
    Operator y;
    Operator z;
};

Quadratures quadrature_operators(const AtomConfig& config, const Direction& dir);
/// Quadratures built with arbitrary per-atom phases.
Quadratures quadrature_operators(std::span<const double> phases);

SpinCorrelators correlators(const PureState& psi);
SpinCorrelators correlators(const DensityMatrix& rho);

/// O(N^2) assembly of the moments from correlators and per-atom phases.
OperatorMoments moments_from_correlators(const SpinCorrelators& c, std::span<const double> phases);

OperatorMoments moments(const SpinCorrelators& c, const AtomConfig& config, const Direction& dir);
OperatorMoments moments(const PureState& psi, const AtomConfig& config, const Direction& dir);
OperatorMoments moments(const DensityMatrix& rho, const AtomConfig& config, const Direction& dir);

}  // namespace fieldwit
