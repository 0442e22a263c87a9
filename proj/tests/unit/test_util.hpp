#pragma once

// Shared generators and dense brute-force oracles for the unit tests.

#include <random>

#include "fieldwit/field.hpp"
#include "fieldwit/geometry.hpp"
#include "fieldwit/qstate.hpp"

namespace fieldwit::testing {

inline PureState random_pure(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CVector a(static_cast<Eigen::Index>(hilbert_dim(n)));
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = cplx(g(rng), g(rng));
    return PureState::normalized(std::move(a), n);
}

/// Random full-rank mixed state A A^dag / Tr.
inline DensityMatrix random_mixed(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    const auto d = static_cast<Eigen::Index>(hilbert_dim(n));
    CMatrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
    CMatrix rho = a * a.adjoint();
    rho /= rho.trace();
    return DensityMatrix(rho, n);
}

inline AtomConfig random_config(int n, std::mt19937_64& rng, double radius = 2.0) {
    return spherical_cloud(n, radius, rng());
}

inline Direction random_direction(std::mt19937_64& rng, double chi = 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return Direction::spherical(std::acos(1.0 - 2.0 * u(rng)), 2.0 * M_PI * u(rng), chi);
}

/// Moments from explicit quadrature matrices: the reference every fast path
/// is compared against.
inline OperatorMoments brute_moments(const DensityMatrix& rho, std::span<const double> phases) {
    const Quadratures q = quadrature_operators(phases);
    OperatorMoments m;
    m.n_atoms = rho.n_atoms();
    m.mean_x = expectation(q.x, rho).real();
    m.mean_y = expectation(q.y, rho).real();
    m.mean_z = expectation(q.z, rho).real();
    m.second_x = expectation(q.x * q.x, rho).real();
    m.second_y = expectation(q.y * q.y, rho).real();
    m.second_z = expectation(q.z * q.z, rho).real();
    return m;
}

inline OperatorMoments brute_moments(const DensityMatrix& rho, const AtomConfig& config, const Direction& dir) {
    const auto phases = optical_phases(config, dir);
    return brute_moments(rho, phases);
}

inline double max_moment_diff(const OperatorMoments& a, const OperatorMoments& b) {
    return std::max({std::abs(a.mean_x - b.mean_x), std::abs(a.mean_y - b.mean_y), std::abs(a.mean_z - b.mean_z),
                     std::abs(a.second_x - b.second_x), std::abs(a.second_y - b.second_y),
                     std::abs(a.second_z - b.second_z)});
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline CMatrix pauli2(char axis) {
    CMatrix m = CMatrix::Zero(2, 2);
    switch (axis) {
        case 'x': m << 0, 1, 1, 0; break;
        case 'y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
        case 'z': m << 1, 0, 0, -1; break;
        case '+': m << 0, 1, 0, 0; break;
        case '-': m << 0, 0, 1, 0; break;
        default: m = CMatrix::Identity(2, 2);
    }
    return m;
}

}  // namespace fieldwit::testing
