#pragma once

// Dense N-qubit states and operators.
//
// Basis ordering: site 0 is the most significant bit of the basis index and,
// per site, |up> has bit value 0 and |down> has bit value 1. So for N = 2 the
// basis is (|uu>, |ud>, |du>, |dd>). All CSV dumps and oracle comparisons rely
// on this ordering.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fieldwit {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Largest ensemble for which exact (2^N dimensional) objects are built.
inline constexpr int kMaxExactAtoms = 14;

class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument unless 1 <= n <= kMaxExactAtoms.
void check_exact_size(int n_atoms);

inline std::size_t hilbert_dim(int n_atoms) { return std::size_t{1} << n_atoms; }

/// Bit mask of `site` inside a basis index.
inline std::uint64_t site_mask(int site, int n_atoms) {
    return std::uint64_t{1} << (n_atoms - 1 - site);
}

inline bool is_down(std::uint64_t index, int site, int n_atoms) {
    return (index & site_mask(site, n_atoms)) != 0;
}

enum class PauliAxis { x, y, z, plus, minus };

class Operator {
  public:
    Operator(CMatrix entries, int n_atoms);

    const CMatrix& matrix() const { return entries_; }
    int n_atoms() const { return n_atoms_; }
    std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }

    Operator adjoint() const { return Operator(entries_.adjoint(), n_atoms_); }

    friend Operator operator+(const Operator& a, const Operator& b);
    friend Operator operator-(const Operator& a, const Operator& b);
    friend Operator operator*(const Operator& a, const Operator& b);
    friend Operator operator*(cplx s, const Operator& a);

  private:
    CMatrix entries_;
    int n_atoms_;
};

class PureState {
  public:
    /// Takes ownership of `amplitudes`; throws unless the length is 2^N and
    /// the norm is 1 within 1e-12.
    PureState(CVector amplitudes, int n_atoms);

    /// Rescales `amplitudes` to unit norm first.
    static PureState normalized(CVector amplitudes, int n_atoms);

    const CVector& amplitudes() const { return amps_; }
    int n_atoms() const { return n_atoms_; }
    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }

  private:
    CVector amps_;
    int n_atoms_;
};

class DensityMatrix {
  public:
    /// Only the shape is checked here; call validate() for the physical
    /// invariants (kept out of inner loops).
    DensityMatrix(CMatrix entries, int n_atoms);

    static DensityMatrix from_pure(const PureState& psi);
    static DensityMatrix maximally_mixed(int n_atoms);

    const CMatrix& matrix() const { return entries_; }
    int n_atoms() const { return n_atoms_; }
    std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }

    cplx trace() const { return entries_.trace(); }
    /// Largest elementwise |rho - rho^dagger|.
    double hermiticity_error() const;
    double min_eigenvalue() const;

    /// Throws NumericalError when Hermiticity (1e-10), unit trace (1e-10) or
    /// positivity (min eigenvalue >= -1e-8) is violated.
    void validate() const;

  private:
    CMatrix entries_;
    int n_atoms_;
};

/// Single-qubit operator on `site` (0-based), identity elsewhere.
Operator pauli_embed(int site, PauliAxis axis, int n_atoms);

/// Phase-rotated Pauli operators:
///   x: e^{-i theta} sigma^- + e^{i theta} sigma^+
///   y: i (e^{i theta} sigma^+ - e^{-i theta} sigma^-)
Operator phase_pauli(int site, PauliAxis axis, double theta, int n_atoms);

cplx expectation(const Operator& op, const PureState& psi);
cplx expectation(const Operator& op, const DensityMatrix& rho);

struct BlochAngles {
    double theta = 0.0;
    double phi = 0.0;
};

/// Tensor product of cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>.
PureState product_state(std::span<const BlochAngles> angles);

/// Single-qubit state for the Bloch angles, as (up, down) amplitudes.
Eigen::Vector2cd bloch_spinor(const BlochAngles& a);

/// (|up up down> + e^{i L} |down up up> + e^{2 i L} |down down up>) / sqrt(3).
PureState three_atom_state(double lambda);

/// Alternating |+>|->|+>... with |+-> = (|up> +- |down>)/sqrt(2).
std::vector<BlochAngles> antisymmetric_angles(int n_atoms);

}  // namespace fieldwit
