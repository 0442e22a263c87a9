#include "fieldwit/dicke.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace fieldwit {

namespace {

// Deflated Chebyshev condition in the angle variable, delta = cos(nu):
// (1 - cos N nu) / (1 - cos nu) - N = sin^2(N nu / 2) / sin^2(nu / 2) - N.
double deflated_condition(int n, double nu) {
    const double num = std::sin(0.5 * n * nu);
    const double den = std::sin(0.5 * nu);
    return (num * num) / (den * den) - n;
}

double chebyshev_residual(int n, double delta) { return chebyshev_t(n, delta) - n * delta + (n - 1); }

}  // namespace

DickeSpec DickeSpec::chebyshev(int n_atoms, double delta) {
    if (n_atoms < 1) throw std::invalid_argument("Dicke state needs N >= 1");
    if (!(delta > -1.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (-1, 1)");
    const double nu = std::acos(delta);
    DickeSpec spec;
    for (int k = 1; k <= n_atoms; ++k) spec.phases.push_back(k * nu);
    return spec;
}

PureState dicke_state(const DickeSpec& spec) {
    const int n = spec.n_atoms();
    check_exact_size(n);
    const std::size_t dim = hilbert_dim(n);
    CVector amps = CVector::Zero(static_cast<Eigen::Index>(dim));
    const std::uint64_t all_down = dim - 1;
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (int j = 0; j < n; ++j) {
        const std::uint64_t idx = all_down & ~site_mask(j, n);
        amps(static_cast<Eigen::Index>(idx)) = std::polar(norm, spec.phases[static_cast<std::size_t>(j)]);
    }
    return PureState::normalized(std::move(amps), n);
}

double dicke_phase_sum(const DickeSpec& spec, const AtomConfig& config, const Direction& dir) {
    const int n = spec.n_atoms();
    if (n != config.n_atoms()) throw std::invalid_argument("Dicke spec/config size mismatch");
    // cos[(phi_s - phi_j) + k.(r_j - r_s)] = cos(beta_s - beta_j) with
    // beta = phi - k.r, so the double sum is |sum_j e^{i beta_j}|^2 - N.
    // Neumaier-compensated accumulation of the two components.
    double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;
    auto add = [](double& sum, double& comp, double v) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    };
    for (int j = 0; j < n; ++j) {
        const double beta = spec.phases[static_cast<std::size_t>(j)] -
                            dir.khat.dot(config.positions()[static_cast<std::size_t>(j)]);
        add(re, cre, std::cos(beta));
        add(im, cim, std::sin(beta));
    }
    re += cre;
    im += cim;
    return re * re + im * im - n;
}

OperatorMoments dicke_moments(const DickeSpec& spec, const AtomConfig& config, const Direction& dir) {
    const int n = spec.n_atoms();
    if (n < 1) throw std::invalid_argument("Dicke state needs N >= 1");
    const double sum = dicke_phase_sum(spec, config, dir);
    OperatorMoments m;
    m.n_atoms = n;
    m.direction = dir;
    m.mean_x = 0.0;
    m.mean_y = 0.0;
    m.mean_z = -(n - 2.0);
    m.second_x = n + 2.0 * sum / n;
    m.second_y = m.second_x;
    m.second_z = n + (n - 4.0) * (n - 1.0);
    return m;
}

double s_k(const DickeSpec& spec, const AtomConfig& config, const Direction& dir) {
    return 4.0 * dicke_phase_sum(spec, config, dir) / spec.n_atoms();
}

double chebyshev_t(int n, double x) {
    if (n < 0) throw std::invalid_argument("Chebyshev degree must be nonnegative");
    if (n == 0) return 1.0;
    double prev = 1.0, cur = x;
    for (int k = 1; k < n; ++k) {
        const double next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

std::vector<double> chebyshev_interior_roots(int n_atoms) {
    if (n_atoms < 2) throw std::invalid_argument("Chebyshev condition needs N >= 2");
    // Bracket sign changes on a fine grid in nu in (0, pi), refine by
    // bisection on the angle form, then polish in delta on the polynomial.
    const int samples = 256 * n_atoms;
    std::vector<double> roots;
    double a = M_PI / samples * 1e-3;
    double fa = deflated_condition(n_atoms, a);
    for (int i = 1; i <= samples; ++i) {
        const double b = i == samples ? M_PI : M_PI * i / samples;
        const double fb = deflated_condition(n_atoms, b);
        if (fb == 0.0) {
            roots.push_back(std::cos(b));
        } else if ((fa < 0.0) != (fb < 0.0) && fa != 0.0) {
            double lo = a, hi = b, flo = fa;
            for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const double fm = deflated_condition(n_atoms, mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            // Polish on the polynomial in delta: pick the representable
            // delta in the bracket with the smallest residual.
            double dlo = std::cos(hi), dhi = std::cos(lo);
            double rlo = chebyshev_residual(n_atoms, dlo);
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (dlo + dhi);
                if (mid <= dlo || mid >= dhi) break;
                const double rm = chebyshev_residual(n_atoms, mid);
                if ((rm < 0.0) == (rlo < 0.0)) {
                    dlo = mid;
                    rlo = rm;
                } else {
                    dhi = mid;
                }
            }
            const double rhi = chebyshev_residual(n_atoms, dhi);
            roots.push_back(std::abs(rlo) <= std::abs(rhi) ? dlo : dhi);
        }
        a = b;
        fa = fb;
    }
    std::erase_if(roots, [](double d) { return !(d > -1.0 && d < 1.0); });
    std::sort(roots.begin(), roots.end(), std::greater<>());
    return roots;
}

double chebyshev_delta(int n_atoms) {
    const auto roots = chebyshev_interior_roots(n_atoms);
    if (roots.empty()) {
        throw NumericalError("no interior Chebyshev root found for N = " + std::to_string(n_atoms));
    }
    return roots.front();
}

}  // namespace fieldwit
