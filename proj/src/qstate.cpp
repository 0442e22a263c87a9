#include "fieldwit/qstate.hpp"

#include <cmath>
#include <string>

namespace fieldwit {

namespace {

constexpr double kNormTol = 1e-12;

Eigen::Matrix2cd local_pauli(PauliAxis axis) {
    const cplx i(0.0, 1.0);
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    switch (axis) {
        case PauliAxis::x:
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            break;
        case PauliAxis::y:
            m(0, 1) = -i;
            m(1, 0) = i;
            break;
        case PauliAxis::z:
            m(0, 0) = 1.0;
            m(1, 1) = -1.0;
            break;
        case PauliAxis::plus:  // |up><down|
            m(0, 1) = 1.0;
            break;
        case PauliAxis::minus:  // |down><up|
            m(1, 0) = 1.0;
            break;
    }
    return m;
}

void check_site(int site, int n_atoms) {
    if (site < 0 || site >= n_atoms) {
        throw std::out_of_range("site index " + std::to_string(site) + " outside [0, " +
                                std::to_string(n_atoms) + ")");
    }
}

// Embeds a 2x2 matrix on `site` without forming Kronecker products.
CMatrix embed_local(const Eigen::Matrix2cd& local, int site, int n_atoms) {
    const std::size_t dim = hilbert_dim(n_atoms);
    const std::uint64_t mask = site_mask(site, n_atoms);
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::uint64_t col = 0; col < dim; ++col) {
        const int cbit = (col & mask) ? 1 : 0;
        for (int rbit = 0; rbit < 2; ++rbit) {
            const cplx v = local(rbit, cbit);
            if (v == cplx{}) continue;
            const std::uint64_t row = rbit ? (col | mask) : (col & ~mask);
            out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = v;
        }
    }
    return out;
}

}  // namespace

void check_exact_size(int n_atoms) {
    if (n_atoms < 1 || n_atoms > kMaxExactAtoms) {
        throw std::invalid_argument("exact-state operations need 1 <= N <= " +
                                    std::to_string(kMaxExactAtoms) + ", got " +
                                    std::to_string(n_atoms));
    }
}

Operator::Operator(CMatrix entries, int n_atoms) : entries_(std::move(entries)), n_atoms_(n_atoms) {
    check_exact_size(n_atoms);
    const auto dim = static_cast<Eigen::Index>(hilbert_dim(n_atoms));
    if (entries_.rows() != dim || entries_.cols() != dim) {
        throw std::invalid_argument("operator must be 2^N x 2^N");
    }
}

Operator operator+(const Operator& a, const Operator& b) {
    if (a.n_atoms_ != b.n_atoms_) throw std::invalid_argument("operator size mismatch");
    return Operator(a.entries_ + b.entries_, a.n_atoms_);
}

Operator operator-(const Operator& a, const Operator& b) {
    if (a.n_atoms_ != b.n_atoms_) throw std::invalid_argument("operator size mismatch");
    return Operator(a.entries_ - b.entries_, a.n_atoms_);
}

Operator operator*(const Operator& a, const Operator& b) {
    if (a.n_atoms_ != b.n_atoms_) throw std::invalid_argument("operator size mismatch");
    return Operator(a.entries_ * b.entries_, a.n_atoms_);
}

Operator operator*(cplx s, const Operator& a) { return Operator(s * a.entries_, a.n_atoms_); }

PureState::PureState(CVector amplitudes, int n_atoms) : amps_(std::move(amplitudes)), n_atoms_(n_atoms) {
    check_exact_size(n_atoms);
    if (static_cast<std::size_t>(amps_.size()) != hilbert_dim(n_atoms)) {
        throw std::invalid_argument("state vector length must be 2^N");
    }
    if (std::abs(amps_.norm() - 1.0) > kNormTol) {
        throw std::invalid_argument("state vector is not normalized");
    }
}

PureState PureState::normalized(CVector amplitudes, int n_atoms) {
    const double norm = amplitudes.norm();
    if (norm == 0.0 || !std::isfinite(norm)) throw std::invalid_argument("cannot normalize zero vector");
    amplitudes /= norm;
    return PureState(std::move(amplitudes), n_atoms);
}

DensityMatrix::DensityMatrix(CMatrix entries, int n_atoms) : entries_(std::move(entries)), n_atoms_(n_atoms) {
    check_exact_size(n_atoms);
    const auto dim = static_cast<Eigen::Index>(hilbert_dim(n_atoms));
    if (entries_.rows() != dim || entries_.cols() != dim) {
        throw std::invalid_argument("density matrix must be 2^N x 2^N");
    }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(), psi.n_atoms());
}

DensityMatrix DensityMatrix::maximally_mixed(int n_atoms) {
    check_exact_size(n_atoms);
    const auto dim = static_cast<Eigen::Index>(hilbert_dim(n_atoms));
    return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim), n_atoms);
}

double DensityMatrix::hermiticity_error() const {
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    const CMatrix herm = 0.5 * (entries_ + entries_.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void DensityMatrix::validate() const {
    if (const double h = hermiticity_error(); h > 1e-10) {
        throw NumericalError("density matrix not Hermitian (deviation " + std::to_string(h) + ")");
    }
    if (const double t = std::abs(trace() - 1.0); t > 1e-10) {
        throw NumericalError("density matrix trace deviates from 1 by " + std::to_string(t));
    }
    if (const double e = min_eigenvalue(); e < -1e-8) {
        throw NumericalError("density matrix has negative eigenvalue " + std::to_string(e));
    }
}

Operator pauli_embed(int site, PauliAxis axis, int n_atoms) {
    check_exact_size(n_atoms);
    check_site(site, n_atoms);
    return Operator(embed_local(local_pauli(axis), site, n_atoms), n_atoms);
}

Operator phase_pauli(int site, PauliAxis axis, double theta, int n_atoms) {
    check_exact_size(n_atoms);
    check_site(site, n_atoms);
    if (!std::isfinite(theta)) throw std::invalid_argument("phase must be finite");
    const cplx ep = std::polar(1.0, theta);
    const cplx em = std::conj(ep);
    const Eigen::Matrix2cd sp = local_pauli(PauliAxis::plus);
    const Eigen::Matrix2cd sm = local_pauli(PauliAxis::minus);
    Eigen::Matrix2cd local;
    switch (axis) {
        case PauliAxis::x:
            local = em * sm + ep * sp;
            break;
        case PauliAxis::y:
            local = cplx(0.0, 1.0) * (ep * sp - em * sm);
            break;
        default:
            throw std::invalid_argument("phase_pauli supports the x and y axes only");
    }
    return Operator(embed_local(local, site, n_atoms), n_atoms);
}

cplx expectation(const Operator& op, const PureState& psi) {
    if (op.dim() != psi.dim()) throw std::invalid_argument("operator/state dimension mismatch");
    return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

cplx expectation(const Operator& op, const DensityMatrix& rho) {
    if (op.dim() != rho.dim()) throw std::invalid_argument("operator/state dimension mismatch");
    // Tr(O rho) = sum_ab O_ab rho_ba
    return (op.matrix().transpose().cwiseProduct(rho.matrix())).sum();
}

Eigen::Vector2cd bloch_spinor(const BlochAngles& a) {
    return {cplx(std::cos(0.5 * a.theta), 0.0), std::polar(std::sin(0.5 * a.theta), a.phi)};
}

PureState product_state(std::span<const BlochAngles> angles) {
    const int n = static_cast<int>(angles.size());
    check_exact_size(n);
    CVector amps = CVector::Ones(1);
    for (const auto& a : angles) {
        const Eigen::Vector2cd s = bloch_spinor(a);
        CVector next(amps.size() * 2);
        for (Eigen::Index i = 0; i < amps.size(); ++i) {
            next(2 * i) = amps(i) * s(0);
            next(2 * i + 1) = amps(i) * s(1);
        }
        amps = std::move(next);
    }
    return PureState::normalized(std::move(amps), n);
}

PureState three_atom_state(double lambda) {
    CVector a = CVector::Zero(8);
    const double norm = 1.0 / std::sqrt(3.0);
    a(0b001) = norm;
    a(0b100) = norm * std::polar(1.0, lambda);
    a(0b110) = norm * std::polar(1.0, 2.0 * lambda);
    return PureState(std::move(a), 3);
}

std::vector<BlochAngles> antisymmetric_angles(int n_atoms) {
    std::vector<BlochAngles> out;
    out.reserve(static_cast<std::size_t>(n_atoms));
    for (int j = 0; j < n_atoms; ++j) out.push_back({M_PI / 2, j % 2 == 0 ? 0.0 : M_PI});
    return out;
}

}  // namespace fieldwit
