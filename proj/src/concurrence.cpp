#include "fieldwit/concurrence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace fieldwit {

namespace {

void check_pair(int j, int s, int n) {
    if (j < 0 || s < 0 || j >= n || s >= n) throw std::out_of_range("pair index outside the ensemble");
    if (j == s) throw std::invalid_argument("pair needs two distinct sites");
}

// Inserts the two pair bits (first = j's bit, second = s's bit) into `rest`,
// an index over the remaining N - 2 sites in order.
std::uint64_t compose(std::uint64_t rest, int bj, int bs, int j, int s, int n) {
    std::uint64_t idx = 0;
    int rest_pos = n - 3;  // most significant remaining bit
    for (int site = 0; site < n; ++site) {
        int bit;
        if (site == j) {
            bit = bj;
        } else if (site == s) {
            bit = bs;
        } else {
            bit = static_cast<int>((rest >> rest_pos) & 1u);
            --rest_pos;
        }
        idx = (idx << 1) | static_cast<std::uint64_t>(bit);
    }
    return idx;
}

template <class Element>
PairReduction reduce(int n, int j, int s, Element&& elem) {
    check_pair(j, s, n);
    PairReduction p;
    p.pair = {j, s};
    p.rho_pair.setZero();
    const std::uint64_t n_rest = std::uint64_t{1} << (n - 2);
    for (std::uint64_t rest = 0; rest < n_rest; ++rest) {
        std::array<std::uint64_t, 4> idx{};
        for (int k = 0; k < 4; ++k) idx[static_cast<std::size_t>(k)] = compose(rest, k >> 1, k & 1, j, s, n);
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                p.rho_pair(a, b) += elem(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
            }
        }
    }
    return p;
}

template <class State>
double average_concurrence(const State& state) {
    const int n = state.n_atoms();
    if (n < 2) throw std::invalid_argument("global concurrence needs N >= 2");
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int s = j + 1; s < n; ++s) sum += wootters_concurrence(reduce_pair(state, j, s));
    }
    return 2.0 * sum / (static_cast<double>(n) * (n - 1));
}

}  // namespace

PairReduction reduce_pair(const PureState& psi, int j, int s) {
    const CVector& a = psi.amplitudes();
    return reduce(psi.n_atoms(), j, s, [&a](std::uint64_t r, std::uint64_t c) {
        return a(static_cast<Eigen::Index>(r)) * std::conj(a(static_cast<Eigen::Index>(c)));
    });
}

PairReduction reduce_pair(const DensityMatrix& rho, int j, int s) {
    const CMatrix& m = rho.matrix();
    return reduce(rho.n_atoms(), j, s, [&m](std::uint64_t r, std::uint64_t c) {
        return m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    });
}

double wootters_concurrence_unclamped(const PairReduction& p) {
    Eigen::Matrix4cd flip = Eigen::Matrix4cd::Zero();
    // sy x sy in the (uu, ud, du, dd) basis
    flip(0, 3) = -1.0;
    flip(1, 2) = 1.0;
    flip(2, 1) = 1.0;
    flip(3, 0) = -1.0;
    // With rho = W W^dag the square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy)
    // are the singular values of W^T (sy x sy) W, which avoids square roots of round-off.
    const Eigen::Matrix4cd herm = 0.5 * (p.rho_pair + p.rho_pair.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(herm);
    Eigen::Matrix4cd w = es.eigenvectors();
    for (int k = 0; k < 4; ++k) w.col(k) *= std::sqrt(std::max(0.0, es.eigenvalues()(k)));
    const Eigen::Matrix4cd tau = w.transpose() * flip * w;
    const Eigen::Vector4d lam = Eigen::JacobiSVD<Eigen::Matrix4cd>(tau).singularValues();  // descending
    return lam(0) - lam(1) - lam(2) - lam(3);
}

double wootters_concurrence(const PairReduction& p) {
    return std::clamp(wootters_concurrence_unclamped(p), 0.0, 1.0);
}

double global_concurrence(const PureState& psi) { return average_concurrence(psi); }
double global_concurrence(const DensityMatrix& rho) { return average_concurrence(rho); }

}  // namespace fieldwit
