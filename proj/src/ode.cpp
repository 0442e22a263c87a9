#include "fieldwit/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fieldwit {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Error coefficients: b - b* (fifth minus fourth order weights).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

OdeStats integrate_dopri5(const OdeRhs& f, CVector y, std::span<const double> t_grid, const OdeOptions& opts,
                          const OdeObserver& observe, const OdeStepHook& on_step) {
    if (t_grid.empty()) throw std::invalid_argument("time grid is empty");
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("time grid must be strictly increasing");
    }
    OdeStats stats;
    const Eigen::Index n = y.size();
    CVector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y5(n);

    double t = t_grid[0];
    observe(0, t, y);
    f(t, y, k1);
    ++stats.rhs_calls;
    double h = opts.initial_step;

    for (std::size_t next = 1; next < t_grid.size(); ++next) {
        const double target = t_grid[next];
        while (t < target) {
            if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
            // Clip to the next output time without forgetting the proposed step.
            double hs = h;
            bool hits_target = false;
            if (t + hs >= target || target - (t + hs) < 1e-12 * std::max(1.0, std::abs(target))) {
                hs = target - t;
                hits_target = true;
            }
            tmp = y + hs * a21 * k1;
            f(t + c2 * hs, tmp, k2);
            tmp = y + hs * (a31 * k1 + a32 * k2);
            f(t + c3 * hs, tmp, k3);
            tmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
            f(t + c4 * hs, tmp, k4);
            tmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            f(t + c5 * hs, tmp, k5);
            tmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            f(t + hs, tmp, k6);
            y5 = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            f(t + hs, y5, k7);
            stats.rhs_calls += 6;

            tmp = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double err2 = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double scale = opts.atol + opts.rtol * std::max(std::abs(y(i)), std::abs(y5(i)));
                const double r = std::abs(tmp(i)) / scale;
                err2 += r * r;
            }
            const double err = std::sqrt(err2 / static_cast<double>(std::max<Eigen::Index>(n, 1)));
            if (!std::isfinite(err)) {
                throw NumericalError("non-finite error estimate at t = " + std::to_string(t));
            }

            if (err <= 1.0) {
                t = hits_target ? target : t + hs;
                y.swap(y5);
                if (on_step) {
                    on_step(t, y);
                    f(t, y, k1);
                    ++stats.rhs_calls;
                } else {
                    k1.swap(k7);
                }
                ++stats.accepted;
                const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                h = hits_target ? std::max(h, hs * factor) : hs * factor;
            } else {
                ++stats.rejected;
                h = hs * std::max(0.2, 0.9 * std::pow(err, -0.25));
                if (h < opts.min_step * std::max(1.0, std::abs(t))) {
                    std::ostringstream msg;
                    msg << "step size underflow at t = " << t << " (h = " << h << ", error ratio " << err << ")";
                    throw NumericalError(msg.str());
                }
            }
        }
        observe(next, t, y);
    }
    return stats;
}

}  // namespace fieldwit
