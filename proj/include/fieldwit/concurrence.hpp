#pragma once

// Two-qubit reductions and Wootters concurrence.

#include <utility>

#include "fieldwit/qstate.hpp"

namespace fieldwit {

struct PairReduction {
    /// Basis (|uu>, |ud>, |du>, |dd>) with `pair.first` as the first qubit.
    Eigen::Matrix4cd rho_pair;
    std::pair<int, int> pair;
};

PairReduction reduce_pair(const PureState& psi, int j, int s);
PairReduction reduce_pair(const DensityMatrix& rho, int j, int s);

/// max(0, l1 - l2 - l3 - l4) over the decreasing square roots of the
/// eigenvalues of rho (sy x sy) rho* (sy x sy); clamped to [0, 1].
double wootters_concurrence(const PairReduction& p);

/// Same quantity before clamping (may be slightly negative or above 1).
double wootters_concurrence_unclamped(const PairReduction& p);

/// Average concurrence over all pairs, sum_{j != s} C(rho_js) / (N (N-1)).
double global_concurrence(const PureState& psi);
double global_concurrence(const DensityMatrix& rho);

}  // namespace fieldwit
