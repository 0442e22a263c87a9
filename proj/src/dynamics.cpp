#include "fieldwit/dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fieldwit {

void GreensCouplings::validate() const {
    if (gamma.rows() != gamma.cols() || delta.rows() != gamma.rows() || delta.cols() != gamma.cols()) {
        throw NumericalError("coupling matrices must be square and of equal size");
    }
    if ((gamma - gamma.transpose()).cwiseAbs().maxCoeff() > 1e-9) throw NumericalError("gamma is not symmetric");
    if ((delta - delta.transpose()).cwiseAbs().maxCoeff() > 1e-10) throw NumericalError("delta is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (gamma + gamma.transpose()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9) {
        throw NumericalError("gamma is not positive semidefinite (min eigenvalue " +
                             std::to_string(es.eigenvalues().minCoeff()) + ")");
    }
}

Eigen::Matrix3cd greens_tensor(const Vec3& r) {
    const double kr = r.norm();
    if (!(kr > 0.0)) throw std::invalid_argument("Green's tensor is singular at r = 0");
    const cplx i(0.0, 1.0);
    const Eigen::Matrix3d rr = r * r.transpose() / (kr * kr);
    const cplx pref = 0.75 * std::exp(i * kr) / (kr * kr * kr);
    const cplx iso = kr * kr + i * kr - 1.0;
    const cplx lon = kr * kr + 3.0 * i * kr - 3.0;
    return pref * (iso * Eigen::Matrix3cd::Identity() - lon * rr.cast<cplx>());
}

GreensCouplings couplings(const AtomConfig& config, DecayConvention convention) {
    const int n = config.n_atoms();
    GreensCouplings c;
    c.convention = convention;
    c.delta = Eigen::MatrixXd::Zero(n, n);
    c.gamma = Eigen::MatrixXd::Zero(n, n);
    const double scale = convention == DecayConvention::standard ? 2.0 : 1.0;
    const auto& pos = config.positions();
    const auto& pol = config.polarizations();
    for (int j = 0; j < n; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        c.gamma(j, j) = scale * 0.5 * pol[uj].squaredNorm();
        for (int m = j + 1; m < n; ++m) {
            const auto um = static_cast<std::size_t>(m);
            const Eigen::Matrix3cd g = greens_tensor(pos[uj] - pos[um]);
            const double re = pol[uj].dot(g.real() * pol[um]);
            const double im = pol[uj].dot(g.imag() * pol[um]);
            c.delta(j, m) = c.delta(m, j) = -re;
            c.gamma(j, m) = c.gamma(m, j) = scale * im;
        }
    }
    return c;
}

Liouvillian::Liouvillian(const GreensCouplings& c) : n_(c.n_atoms()), gamma_(c.gamma) {
    check_exact_size(n_);
    const std::size_t dim = hilbert_dim(n_);
    const cplx half_i(0.0, 0.5);
    std::vector<Eigen::Triplet<cplx>> trip;
    for (std::uint64_t b = 0; b < dim; ++b) {
        cplx diag = 0.0;
        for (int j = 0; j < n_; ++j) {
            const auto mj = site_mask(j, n_);
            if (!(b & mj)) diag -= half_i * c.gamma(j, j);  // s+_j s-_j projects on up
            for (int m = 0; m < n_; ++m) {
                if (m == j) continue;
                const auto mm = site_mask(m, n_);
                // s+_j s-_m: b (j down, m up) -> a (j up, m down)
                if ((b & mj) && !(b & mm)) {
                    const std::uint64_t a = (b & ~mj) | mm;
                    const cplx v = -c.delta(j, m) - half_i * c.gamma(m, j);
                    trip.emplace_back(static_cast<int>(a), static_cast<int>(b), v);
                }
            }
        }
        if (diag != cplx{}) trip.emplace_back(static_cast<int>(b), static_cast<int>(b), diag);
    }
    k_.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    k_.setFromTriplets(trip.begin(), trip.end());
    k_.makeCompressed();
    down_rows_.resize(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) {
        for (std::uint64_t b = 0; b < dim; ++b) {
            if (b & site_mask(j, n_)) down_rows_[static_cast<std::size_t>(j)].push_back(static_cast<Eigen::Index>(b));
        }
    }
}

void Liouvillian::apply(const Eigen::Ref<const CMatrix>& rho, Eigen::Ref<CMatrix> out, bool hermitian) const {
    const auto dim = static_cast<Eigen::Index>(hilbert_dim(n_));
    if (rho.rows() != dim || rho.cols() != dim || out.rows() != dim || out.cols() != dim) {
        throw std::invalid_argument("density matrix dimension mismatch");
    }
    const cplx i(0.0, 1.0);
    // -i K rho + i rho K^dag = -i (K rho) + i (K rho^dag)^dag
    const CMatrix a = k_ * rho;
    if (hermitian) {
        out.noalias() = -i * a;
        out.noalias() += i * a.adjoint();
    } else {
        const CMatrix b = k_ * rho.adjoint();
        out.noalias() = -i * a;
        out.noalias() += i * b.adjoint();
    }
    // Jumps, column by column: out(:, s) += sum_j s-_j w_j with
    // w_j = sum_{m: s_m down} Gamma_jm rho(:, s with m up).
    CMatrix w(dim, n_);
    for (Eigen::Index s = 0; s < dim; ++s) {
        const auto us = static_cast<std::uint64_t>(s);
        if (us == 0) continue;  // no site down in this column
        w.setZero();
        for (int m = 0; m < n_; ++m) {
            const auto mm = site_mask(m, n_);
            if (!(us & mm)) continue;
            const cplx* src = rho.col(static_cast<Eigen::Index>(us & ~mm)).data();
            for (int j = 0; j < n_; ++j) {
                const double g = gamma_(j, m);
                if (g == 0.0) continue;
                cplx* dst = w.col(j).data();
                for (Eigen::Index r = 0; r < dim; ++r) dst[r] += g * src[r];
            }
        }
        cplx* col = out.col(s).data();
        for (int j = 0; j < n_; ++j) {
            const auto mj = site_mask(j, n_);
            const cplx* wj = w.col(j).data();
            for (const auto r : down_rows_[static_cast<std::size_t>(j)]) {
                col[r] += wj[static_cast<std::uint64_t>(r) & ~mj];
            }
        }
    }
}

CMatrix lindblad_rhs(const DensityMatrix& rho, const GreensCouplings& c) {
    if (rho.n_atoms() != c.n_atoms()) throw std::invalid_argument("state/couplings size mismatch");
    Liouvillian l(c);
    CMatrix out(rho.matrix().rows(), rho.matrix().cols());
    l.apply(rho.matrix(), out);
    return out;
}

TrajectoryDiagnostics integrate_observed(const DensityMatrix& rho0, const GreensCouplings& c,
                                         std::span<const double> t_grid, const IntegrateOptions& opts,
                                         const DensityObserver& observe) {
    const int n = rho0.n_atoms();
    if (n != c.n_atoms()) throw std::invalid_argument("state/couplings size mismatch");
    const auto dim = static_cast<Eigen::Index>(hilbert_dim(n));
    const Liouvillian liou(c);

    OdeOptions ode;
    ode.rtol = opts.rtol;
    ode.atol = opts.atol;
    ode.initial_step = 1e-4;

    auto rhs = [&](double, const CVector& y, CVector& dy) {
        dy.resize(y.size());
        Eigen::Map<const CMatrix> rho(y.data(), dim, dim);
        Eigen::Map<CMatrix> out(dy.data(), dim, dim);
        liou.apply(rho, out, true);
    };
    auto hermitize = [&](double, CVector& y) {
        Eigen::Map<CMatrix> rho(y.data(), dim, dim);
        const CMatrix h = 0.5 * (rho + rho.adjoint());
        rho = h;
    };

    TrajectoryDiagnostics diag;
    const cplx trace0 = rho0.trace();
    auto sample = [&](std::size_t i, double t, const CVector& y) {
        DensityMatrix rho(Eigen::Map<const CMatrix>(y.data(), dim, dim), n);
        diag.times.push_back(t);
        diag.trace_drift.push_back(std::abs(rho.trace() - trace0));
        diag.hermiticity_error.push_back(rho.hermiticity_error());
        double emin = std::numeric_limits<double>::quiet_NaN();
        if (opts.check_positivity) {
            emin = rho.min_eigenvalue();
            if (emin < opts.positivity_floor) {
                std::ostringstream msg;
                msg << "density matrix lost positivity at t = " << t << ": min eigenvalue " << emin
                    << ", trace drift " << diag.trace_drift.back();
                throw NumericalError(msg.str());
            }
        }
        diag.min_eigenvalue.push_back(emin);
        if (observe) observe(i, t, rho);
    };

    CVector y = Eigen::Map<const CVector>(rho0.matrix().data(), dim * dim);
    diag.stats = integrate_dopri5(rhs, std::move(y), t_grid, ode, sample, hermitize);
    return diag;
}

Trajectory integrate(const DensityMatrix& rho0, const GreensCouplings& c, std::span<const double> t_grid,
                     const IntegrateOptions& opts) {
    Trajectory traj;
    auto keep = [&](std::size_t, double, const DensityMatrix& rho) { traj.states.push_back(rho); };
    TrajectoryDiagnostics d = integrate_observed(rho0, c, t_grid, opts, keep);
    traj.times = std::move(d.times);
    traj.trace_drift = std::move(d.trace_drift);
    traj.min_eigenvalue = std::move(d.min_eigenvalue);
    traj.stats = d.stats;
    return traj;
}

std::optional<double> detect_t_ent(std::span<const double> times, std::span<const double> w_min, double epsilon) {
    if (times.size() != w_min.size()) throw std::invalid_argument("times/witness length mismatch");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (w_min[i] < -epsilon) {
            if (i == 0) return times[0];
            const double w0 = w_min[i - 1], w1 = w_min[i];
            const double frac = (-epsilon - w0) / (w1 - w0);
            return times[i - 1] + frac * (times[i] - times[i - 1]);
        }
    }
    return std::nullopt;
}

std::optional<double> detect_t_ent(const Trajectory& traj, const AtomConfig& config,
                                   std::span<const Direction> directions, double epsilon,
                                   const SweepOptions& opts) {
    if (traj.states.empty()) throw std::invalid_argument("empty trajectory");
    std::vector<double> w;
    w.reserve(traj.states.size());
    for (const auto& rho : traj.states) {
        const auto reports = sweep(rho, config, directions, opts);
        w.push_back(reports[argmin_report(reports)].w_min);
    }
    return detect_t_ent(traj.times, w, epsilon);
}

std::vector<double> linear_time_grid(double t_max, int samples) {
    if (samples < 2 || !(t_max > 0.0)) throw std::invalid_argument("time grid needs t_max > 0 and >= 2 samples");
    std::vector<double> t(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) t[static_cast<std::size_t>(i)] = t_max * i / (samples - 1);
    return t;
}

}  // namespace fieldwit
