#pragma once

// Single-excitation Dicke states (1/sqrt N) sum_n e^{i phi_n} |up_n> and their
// closed-form witness moments, valid for any N.

#include <span>
#include <vector>

#include "fieldwit/field.hpp"

namespace fieldwit {

struct DickeSpec {
    std::vector<double> phases;

    int n_atoms() const { return static_cast<int>(phases.size()); }

    /// phi_n = n arccos(delta), n = 1..N.
    static DickeSpec chebyshev(int n_atoms, double delta);
};

PureState dicke_state(const DickeSpec& spec);

/// sum_{j != s} cos[(phi_s - phi_j) + k.(r_j - r_s)].
double dicke_phase_sum(const DickeSpec& spec, const AtomConfig& config, const Direction& dir);

/// <X^2> = <Y^2> = N + (2/N) sum, <Z^2> = N + (N-4)(N-1), <X> = <Y> = 0 and
/// <Z> = -(N-2) with sigma^z = |up><up| - |down><down|.
OperatorMoments dicke_moments(const DickeSpec& spec, const AtomConfig& config, const Direction& dir);

/// S_k = (4/N) sum_{j != s} cos[...]; equals w2 and -w3[Z] for Dicke states.
double s_k(const DickeSpec& spec, const AtomConfig& config, const Direction& dir);

/// T_N(x) by the three-term recurrence.
double chebyshev_t(int n, double x);

/// All roots of T_N(d) - N d + (N - 1) in (-1, 1), descending.
std::vector<double> chebyshev_interior_roots(int n_atoms);

/// Largest interior root: the phases n arccos(delta) make
/// sum_{j != s} cos(phi_j - phi_s) vanish.
double chebyshev_delta(int n_atoms);

}  // namespace fieldwit
