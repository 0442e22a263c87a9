#pragma once

// Second-order cumulant dynamics: one- and two-point spin correlators evolved
// under the dipole-dipole master equation, with three-point moments closed as
//   <ABC> ~ <AB><C> + <AC><B> + <BC><A> - 2 <A><B><C>.

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "fieldwit/dynamics.hpp"
#include "fieldwit/field.hpp"

namespace fieldwit {

/// s_plus, s_z and the pair blocks c_pm, c_pp, c_zz, c_zp on distinct sites.
using CumulantState = SpinCorrelators;

/// Exact one- and two-point moments of a product state.
CumulantState init_from_product(std::span<const BlochAngles> angles);

/// Packs the independent entries: s_plus, s_z, upper triangles of c_pm, c_pp,
/// c_zz, and every off-diagonal c_zp.
CVector pack(const CumulantState& s);
CumulantState unpack(const CVector& v, int n_atoms);

/// Heisenberg equations for every tracked moment, generated from the local
/// Pauli algebra and closed at second order.
class CumulantGenerator {
  public:
    explicit CumulantGenerator(const GreensCouplings& c);

    int n_atoms() const { return n_; }
    CumulantState derivative(const CumulantState& s) const;

  private:
    struct Term {
        int slot_j;
        int slot_m;
        bool dissipative;
        cplx coeff;
        std::array<unsigned char, 3> basis;
    };
    enum Kind { plus = 0, z, pm, pp, zz, zp, n_kinds };

    cplx rate(const std::vector<Term>& terms, const CumulantState& s, int p, int q) const;

    int n_;
    Eigen::MatrixXd delta_;
    Eigen::MatrixXd gamma_;
    std::array<std::vector<Term>, n_kinds> terms_;
};

CumulantState cumulant_rhs(const CumulantState& s, const GreensCouplings& c);

struct CumulantOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    /// Abort when any correlator magnitude exceeds this.
    double blowup_limit = 10.0;
};

std::vector<CumulantState> integrate_cumulant(const CumulantState& s0, const GreensCouplings& c,
                                              std::span<const double> t_grid, const CumulantOptions& opts = {});

/// Streaming variant; returns solver statistics.
OdeStats integrate_cumulant_observed(const CumulantState& s0, const GreensCouplings& c,
                                     std::span<const double> t_grid, const CumulantOptions& opts,
                                     const std::function<void(std::size_t, double, const CumulantState&)>& observe);

OperatorMoments moments_from_cumulant(const CumulantState& s, const AtomConfig& config, const Direction& dir);

}  // namespace fieldwit
