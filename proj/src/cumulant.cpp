#include "fieldwit/cumulant.hpp"

#include <cmath>
#include <map>
#include <string>

namespace fieldwit {

namespace {

using Mat2 = Eigen::Matrix2cd;

// Local basis: identity, s+, s-, sz.
enum Basis : unsigned char { kI = 0, kP = 1, kM = 2, kZ = 3 };

// Site basis is |up> = 0, |down> = 1, so s+ = |0><1|.
Mat2 local(Basis b) {
    Mat2 m = Mat2::Zero();
    switch (b) {
        case kI: m(0, 0) = 1.0; m(1, 1) = 1.0; break;
        case kP: m(0, 1) = 1.0; break;
        case kM: m(1, 0) = 1.0; break;
        case kZ: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    }
    return m;
}

// M = a I + b s+ + c s- + d sz.
std::array<cplx, 4> decompose(const Mat2& m) {
    return {0.5 * (m(0, 0) + m(1, 1)), m(0, 1), m(1, 0), 0.5 * (m(0, 0) - m(1, 1))};
}

cplx one_point(const CumulantState& s, int x, unsigned char b) {
    switch (b) {
        case kP: return s.s_plus(x);
        case kM: return std::conj(s.s_plus(x));
        case kZ: return s.s_z(x);
        default: return 1.0;
    }
}

cplx two_point(const CumulantState& s, int x, unsigned char bx, int y, unsigned char by) {
    switch (bx * 4 + by) {
        case kP * 4 + kM: return s.c_pm(x, y);
        case kM * 4 + kP: return s.c_pm(y, x);
        case kP * 4 + kP: return s.c_pp(x, y);
        case kM * 4 + kM: return std::conj(s.c_pp(x, y));
        case kZ * 4 + kZ: return s.c_zz(x, y);
        case kZ * 4 + kP: return s.c_zp(x, y);
        case kP * 4 + kZ: return s.c_zp(y, x);
        case kZ * 4 + kM: return std::conj(s.c_zp(x, y));
        case kM * 4 + kZ: return std::conj(s.c_zp(y, x));
        default: return 0.0;
    }
}

// Expectation of a product of basis operators on distinct sites, with the
// three-point moment closed at second order.
cplx expect(const CumulantState& s, const std::array<int, 3>& site, const std::array<unsigned char, 3>& b) {
    int idx[3];
    int k = 0;
    for (int i = 0; i < 3; ++i) {
        if (b[static_cast<std::size_t>(i)] != kI) idx[k++] = i;
    }
    auto st = [&](int i) { return site[static_cast<std::size_t>(i)]; };
    auto bs = [&](int i) { return b[static_cast<std::size_t>(i)]; };
    switch (k) {
        case 0: return 1.0;
        case 1: return one_point(s, st(idx[0]), bs(idx[0]));
        case 2: return two_point(s, st(idx[0]), bs(idx[0]), st(idx[1]), bs(idx[1]));
        default: {
            const cplx a = one_point(s, st(0), bs(0));
            const cplx bb = one_point(s, st(1), bs(1));
            const cplx c = one_point(s, st(2), bs(2));
            const cplx ab = two_point(s, st(0), bs(0), st(1), bs(1));
            const cplx ac = two_point(s, st(0), bs(0), st(2), bs(2));
            const cplx bc = two_point(s, st(1), bs(1), st(2), bs(2));
            return ab * c + ac * bb + bc * a - 2.0 * a * bb * c;
        }
    }
}

std::size_t n_pairs(int n) { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2; }

}  // namespace

CumulantState init_from_product(std::span<const BlochAngles> angles) {
    const int n = static_cast<int>(angles.size());
    if (n < 1) throw std::invalid_argument("product state needs at least one atom");
    CumulantState s = CumulantState::zeros(n);
    for (int j = 0; j < n; ++j) {
        const auto& a = angles[static_cast<std::size_t>(j)];
        s.s_plus(j) = 0.5 * std::sin(a.theta) * std::polar(1.0, a.phi);
        s.s_z(j) = std::cos(a.theta);
    }
    for (int j = 0; j < n; ++j) {
        for (int m = 0; m < n; ++m) {
            if (m == j) continue;
            s.c_pm(j, m) = s.s_plus(j) * std::conj(s.s_plus(m));
            s.c_pp(j, m) = s.s_plus(j) * s.s_plus(m);
            s.c_zz(j, m) = s.s_z(j) * s.s_z(m);
            s.c_zp(j, m) = s.s_z(j) * s.s_plus(m);
        }
    }
    return s;
}

CVector pack(const CumulantState& s) {
    const int n = s.n_atoms;
    const std::size_t p = n_pairs(n);
    CVector v(static_cast<Eigen::Index>(2 * static_cast<std::size_t>(n) + 5 * p));
    Eigen::Index k = 0;
    for (int j = 0; j < n; ++j) v(k++) = s.s_plus(j);
    for (int j = 0; j < n; ++j) v(k++) = s.s_z(j);
    for (int j = 0; j < n; ++j)
        for (int m = j + 1; m < n; ++m) v(k++) = s.c_pm(j, m);
    for (int j = 0; j < n; ++j)
        for (int m = j + 1; m < n; ++m) v(k++) = s.c_pp(j, m);
    for (int j = 0; j < n; ++j)
        for (int m = j + 1; m < n; ++m) v(k++) = s.c_zz(j, m);
    for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m)
            if (m != j) v(k++) = s.c_zp(j, m);
    return v;
}

CumulantState unpack(const CVector& v, int n) {
    const std::size_t p = n_pairs(n);
    if (static_cast<std::size_t>(v.size()) != 2 * static_cast<std::size_t>(n) + 5 * p) {
        throw std::invalid_argument("packed cumulant state has the wrong length");
    }
    CumulantState s = CumulantState::zeros(n);
    Eigen::Index k = 0;
    for (int j = 0; j < n; ++j) s.s_plus(j) = v(k++);
    for (int j = 0; j < n; ++j) s.s_z(j) = v(k++).real();
    for (int j = 0; j < n; ++j) {
        for (int m = j + 1; m < n; ++m) {
            s.c_pm(j, m) = v(k++);
            s.c_pm(m, j) = std::conj(s.c_pm(j, m));
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int m = j + 1; m < n; ++m) {
            s.c_pp(j, m) = v(k++);
            s.c_pp(m, j) = s.c_pp(j, m);
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int m = j + 1; m < n; ++m) {
            s.c_zz(j, m) = v(k++).real();
            s.c_zz(m, j) = s.c_zz(j, m);
        }
    }
    for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m)
            if (m != j) s.c_zp(j, m) = v(k++);
    return s;
}

// Each tracked moment is O = O_0 (x) O_1 on sites (p, q); single-site moments
// have O_1 = I. Slot 2 stands for any third site l. For every placement of
// the coupled pair (j, m) on the slots, the Heisenberg derivative
//   i Delta_jm [O, s+_j s-_m] + Gamma_jm (s+_m O s-_j - 1/2 {s+_m s-_j, O})
// is expanded into products of basis operators, one per slot.
CumulantGenerator::CumulantGenerator(const GreensCouplings& c)
    : n_(c.n_atoms()), delta_(c.delta), gamma_(c.gamma) {
    if (n_ < 1) throw std::invalid_argument("couplings describe no atoms");
    const std::array<std::array<Basis, 2>, n_kinds> kinds{{
        {kP, kI}, {kZ, kI}, {kP, kM}, {kP, kP}, {kZ, kZ}, {kZ, kP}}};

    for (int kind = 0; kind < n_kinds; ++kind) {
        const bool single = kinds[static_cast<std::size_t>(kind)][1] == kI;
        const std::array<Mat2, 3> o{local(kinds[static_cast<std::size_t>(kind)][0]),
                                    local(kinds[static_cast<std::size_t>(kind)][1]), local(kI)};
        std::vector<int> slots = single ? std::vector<int>{0, 2} : std::vector<int>{0, 1, 2};
        auto& out = terms_[static_cast<std::size_t>(kind)];

        for (int sj : slots) {
            for (int sm : slots) {
                if (sj == 2 && sm == 2) continue;  // pair outside the moment's support
                for (int dissipative = 0; dissipative < 2; ++dissipative) {
                    if (!dissipative && sj == sm) continue;
                    // Products of per-slot local factors with a prefactor.
                    std::vector<std::pair<cplx, std::array<Mat2, 3>>> products;
                    std::array<Mat2, 3> up, dn;
                    for (int s = 0; s < 3; ++s) {
                        up[static_cast<std::size_t>(s)] = local(s == sm ? kP : kI);
                        dn[static_cast<std::size_t>(s)] = local(s == sj ? kM : kI);
                    }
                    std::array<Mat2, 3> a, b, d;
                    if (!dissipative) {
                        // [O, P] with P = s+_j s-_m.
                        for (int s = 0; s < 3; ++s) {
                            const auto u = static_cast<std::size_t>(s);
                            Mat2 p = local(s == sj ? kP : (s == sm ? kM : kI));
                            a[u] = o[u] * p;
                            b[u] = p * o[u];
                        }
                        products.emplace_back(cplx(0.0, 1.0), a);
                        products.emplace_back(cplx(0.0, -1.0), b);
                    } else {
                        for (int s = 0; s < 3; ++s) {
                            const auto u = static_cast<std::size_t>(s);
                            a[u] = up[u] * o[u] * dn[u];
                            b[u] = up[u] * dn[u] * o[u];
                            d[u] = o[u] * up[u] * dn[u];
                        }
                        products.emplace_back(1.0, a);
                        products.emplace_back(-0.5, b);
                        products.emplace_back(-0.5, d);
                    }

                    std::map<std::array<unsigned char, 3>, cplx> acc;
                    for (const auto& [pref, f] : products) {
                        std::array<std::array<cplx, 4>, 3> coef;
                        for (int s = 0; s < 3; ++s) coef[static_cast<std::size_t>(s)] = decompose(f[static_cast<std::size_t>(s)]);
                        for (unsigned char b0 = 0; b0 < 4; ++b0)
                            for (unsigned char b1 = 0; b1 < 4; ++b1)
                                for (unsigned char b2 = 0; b2 < 4; ++b2) {
                                    const cplx w = pref * coef[0][b0] * coef[1][b1] * coef[2][b2];
                                    if (w != 0.0) acc[{b0, b1, b2}] += w;
                                }
                    }
                    for (const auto& [basis, w] : acc) {
                        if (std::abs(w) > 1e-14) out.push_back({sj, sm, dissipative != 0, w, basis});
                    }
                }
            }
        }
    }
}

cplx CumulantGenerator::rate(const std::vector<Term>& terms, const CumulantState& s, int p, int q) const {
    cplx total = 0.0;
    std::array<int, 3> site{p, q < 0 ? p : q, 0};
    for (const auto& t : terms) {
        const bool third = t.slot_j == 2 || t.slot_m == 2;
        if (!third) {
            const int j = site[static_cast<std::size_t>(t.slot_j)];
            const int m = site[static_cast<std::size_t>(t.slot_m)];
            const double g = t.dissipative ? gamma_(j, m) : delta_(j, m);
            if (g != 0.0) total += g * t.coeff * expect(s, site, t.basis);
            continue;
        }
        for (int l = 0; l < n_; ++l) {
            if (l == p || l == q) continue;
            site[2] = l;
            const int j = site[static_cast<std::size_t>(t.slot_j)];
            const int m = site[static_cast<std::size_t>(t.slot_m)];
            const double g = t.dissipative ? gamma_(j, m) : delta_(j, m);
            if (g != 0.0) total += g * t.coeff * expect(s, site, t.basis);
        }
    }
    return total;
}

CumulantState CumulantGenerator::derivative(const CumulantState& s) const {
    if (s.n_atoms != n_) throw std::invalid_argument("cumulant state/couplings size mismatch");
    CumulantState d = CumulantState::zeros(n_);
    for (int j = 0; j < n_; ++j) {
        d.s_plus(j) = rate(terms_[plus], s, j, -1);
        d.s_z(j) = rate(terms_[z], s, j, -1).real();
    }
    for (int j = 0; j < n_; ++j) {
        for (int m = 0; m < n_; ++m) {
            if (m == j) continue;
            if (m > j) {
                d.c_pm(j, m) = rate(terms_[pm], s, j, m);
                d.c_pm(m, j) = std::conj(d.c_pm(j, m));
                d.c_pp(j, m) = rate(terms_[pp], s, j, m);
                d.c_pp(m, j) = d.c_pp(j, m);
                d.c_zz(j, m) = rate(terms_[zz], s, j, m).real();
                d.c_zz(m, j) = d.c_zz(j, m);
            }
            d.c_zp(j, m) = rate(terms_[zp], s, j, m);
        }
    }
    return d;
}

CumulantState cumulant_rhs(const CumulantState& s, const GreensCouplings& c) {
    return CumulantGenerator(c).derivative(s);
}

OdeStats integrate_cumulant_observed(const CumulantState& s0, const GreensCouplings& c,
                                     std::span<const double> t_grid, const CumulantOptions& opts,
                                     const std::function<void(std::size_t, double, const CumulantState&)>& observe) {
    c.validate();
    const int n = s0.n_atoms;
    if (n != c.n_atoms()) throw std::invalid_argument("cumulant state/couplings size mismatch");
    const CumulantGenerator gen(c);

    OdeRhs f = [&](double, const CVector& y, CVector& dy) { dy = pack(gen.derivative(unpack(y, n))); };
    OdeStepHook hook = [&](double t, CVector& y) {
        const double peak = y.cwiseAbs().maxCoeff();
        if (!std::isfinite(peak) || peak > opts.blowup_limit) {
            throw NumericalError("cumulant moments blew up (|c| = " + std::to_string(peak) +
                                 ") at t = " + std::to_string(t));
        }
    };
    OdeOptions o;
    o.rtol = opts.rtol;
    o.atol = opts.atol;
    o.initial_step = 1e-4;
    return integrate_dopri5(
        f, pack(s0), t_grid, o,
        [&](std::size_t i, double t, const CVector& y) {
            if (observe) observe(i, t, unpack(y, n));
        },
        hook);
}

std::vector<CumulantState> integrate_cumulant(const CumulantState& s0, const GreensCouplings& c,
                                              std::span<const double> t_grid, const CumulantOptions& opts) {
    std::vector<CumulantState> out;
    out.reserve(t_grid.size());
    integrate_cumulant_observed(s0, c, t_grid, opts,
                                [&](std::size_t, double, const CumulantState& s) { out.push_back(s); });
    return out;
}

OperatorMoments moments_from_cumulant(const CumulantState& s, const AtomConfig& config, const Direction& dir) {
    return moments(s, config, dir);
}

}  // namespace fieldwit
