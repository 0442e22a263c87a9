#pragma once

// Adaptive Dormand-Prince 5(4) integrator over complex vectors.

#include <functional>
#include <span>
#include <string>

#include "fieldwit/qstate.hpp"

namespace fieldwit {

struct OdeOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double initial_step = 1e-3;
    double max_step = 0.0;  // 0: unbounded
    double min_step = 1e-13;
};

struct OdeStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_calls = 0;
};

using OdeRhs = std::function<void(double t, const CVector& y, CVector& dydt)>;
/// Called after every accepted step with the new state, which it may modify
/// in place (projection back onto a constraint manifold).
using OdeStepHook = std::function<void(double t, CVector& y)>;
/// Called at each requested output time. Output index i corresponds to t_grid[i].
using OdeObserver = std::function<void(std::size_t i, double t, const CVector& y)>;

/// Integrates y' = f(t, y) from t_grid[0], reporting at every grid time.
/// Steps are clipped to land on grid times exactly, so no interpolation
/// error enters the samples. Throws NumericalError on step-size underflow.
OdeStats integrate_dopri5(const OdeRhs& f, CVector y, std::span<const double> t_grid, const OdeOptions& opts,
                          const OdeObserver& observe, const OdeStepHook& on_step = {});

}  // namespace fieldwit
