#include "fieldwit/field.hpp"

#include <cmath>

namespace fieldwit {

namespace {

// Accumulates sum_{a,b} O_ab S(a, b) for every tracked correlator, where
// S(a, b) is the matrix element that turns O_ab into <O>: conj(psi_a) psi_b
// for a pure state, rho_ba for a density matrix.
template <class Element>
SpinCorrelators accumulate(int n, Element&& elem) {
    SpinCorrelators c = SpinCorrelators::zeros(n);
    const std::size_t dim = hilbert_dim(n);
    std::vector<std::uint64_t> mask(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) mask[static_cast<std::size_t>(j)] = site_mask(j, n);

    for (std::uint64_t b = 0; b < dim; ++b) {
        const double pop = std::real(elem(b, b));
        for (int j = 0; j < n; ++j) {
            const auto mj = mask[static_cast<std::size_t>(j)];
            const bool jdown = (b & mj) != 0;
            const double zj = jdown ? -1.0 : 1.0;
            c.s_z(j) += zj * pop;
            if (jdown) c.s_plus(j) += elem(b & ~mj, b);
            for (int m = 0; m < n; ++m) {
                if (m == j) continue;
                const auto mm = mask[static_cast<std::size_t>(m)];
                const bool mdown = (b & mm) != 0;
                if (m > j) c.c_zz(j, m) += zj * (mdown ? -1.0 : 1.0) * pop;
                if (mdown) {
                    c.c_zp(j, m) += zj * elem(b & ~mm, b);
                    if (jdown && m > j) c.c_pp(j, m) += elem(b & ~mj & ~mm, b);
                } else if (jdown) {
                    // b: j down, m up  ->  a: j up, m down
                    c.c_pm(j, m) += elem((b & ~mj) | mm, b);
                }
            }
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int m = j + 1; m < n; ++m) {
            c.c_zz(m, j) = c.c_zz(j, m);
            c.c_pp(m, j) = c.c_pp(j, m);
        }
    }
    return c;
}

}  // namespace

SpinCorrelators SpinCorrelators::zeros(int n_atoms) {
    SpinCorrelators c;
    c.n_atoms = n_atoms;
    c.s_plus = CVector::Zero(n_atoms);
    c.s_z = Eigen::VectorXd::Zero(n_atoms);
    c.c_pm = CMatrix::Zero(n_atoms, n_atoms);
    c.c_pp = CMatrix::Zero(n_atoms, n_atoms);
    c.c_zz = Eigen::MatrixXd::Zero(n_atoms, n_atoms);
    c.c_zp = CMatrix::Zero(n_atoms, n_atoms);
    return c;
}

std::vector<double> optical_phases(const AtomConfig& config, const Direction& dir) {
    std::vector<double> phases;
    phases.reserve(static_cast<std::size_t>(config.n_atoms()));
    for (const auto& r : config.positions()) phases.push_back(dir.khat.dot(r) + dir.chi);
    return phases;
}

Operator field_operator(const AtomConfig& config, const Direction& dir, FieldPart part) {
    const int n = config.n_atoms();
    check_exact_size(n);
    const auto phases = optical_phases(config, dir);
    const auto dim = static_cast<Eigen::Index>(hilbert_dim(n));
    Operator out(CMatrix::Zero(dim, dim), n);
    for (int j = 0; j < n; ++j) {
        const double th = phases[static_cast<std::size_t>(j)];
        if (part == FieldPart::positive) {
            out = out + std::polar(1.0, -th) * pauli_embed(j, PauliAxis::minus, n);
        } else {
            out = out + std::polar(1.0, th) * pauli_embed(j, PauliAxis::plus, n);
        }
    }
    return out;
}

Quadratures quadrature_operators(std::span<const double> phases) {
    const int n = static_cast<int>(phases.size());
    check_exact_size(n);
    const auto dim = static_cast<Eigen::Index>(hilbert_dim(n));
    CMatrix x = CMatrix::Zero(dim, dim), y = CMatrix::Zero(dim, dim), z = CMatrix::Zero(dim, dim);
    for (int j = 0; j < n; ++j) {
        x += phase_pauli(j, PauliAxis::x, phases[static_cast<std::size_t>(j)], n).matrix();
        y -= phase_pauli(j, PauliAxis::y, phases[static_cast<std::size_t>(j)], n).matrix();
        z += pauli_embed(j, PauliAxis::z, n).matrix();
    }
    return {Operator(std::move(x), n), Operator(std::move(y), n), Operator(std::move(z), n)};
}

Quadratures quadrature_operators(const AtomConfig& config, const Direction& dir) {
    const auto phases = optical_phases(config, dir);
    return quadrature_operators(phases);
}

SpinCorrelators correlators(const PureState& psi) {
    const CVector& a = psi.amplitudes();
    return accumulate(psi.n_atoms(), [&a](std::uint64_t row, std::uint64_t col) {
        return std::conj(a(static_cast<Eigen::Index>(row))) * a(static_cast<Eigen::Index>(col));
    });
}

SpinCorrelators correlators(const DensityMatrix& rho) {
    const CMatrix& m = rho.matrix();
    return accumulate(rho.n_atoms(), [&m](std::uint64_t row, std::uint64_t col) {
        return m(static_cast<Eigen::Index>(col), static_cast<Eigen::Index>(row));
    });
}

OperatorMoments moments_from_correlators(const SpinCorrelators& c, std::span<const double> phases) {
    const int n = c.n_atoms;
    if (static_cast<int>(phases.size()) != n) throw std::invalid_argument("phase vector length mismatch");
    std::vector<cplx> e(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) e[static_cast<std::size_t>(j)] = std::polar(1.0, phases[static_cast<std::size_t>(j)]);

    OperatorMoments m;
    m.n_atoms = n;
    double pair_x = 0.0, pair_y = 0.0, pair_z = 0.0;
    for (int j = 0; j < n; ++j) {
        const cplx ej = e[static_cast<std::size_t>(j)];
        const cplx es = ej * c.s_plus(j);
        m.mean_x += 2.0 * es.real();
        m.mean_y += 2.0 * es.imag();
        m.mean_z += c.s_z(j);
        for (int k = j + 1; k < n; ++k) {
            const cplx ek = e[static_cast<std::size_t>(k)];
            const double pp = (ej * ek * c.c_pp(j, k)).real();
            const double pm = (ej * std::conj(ek) * c.c_pm(j, k)).real();
            pair_x += pp + pm;
            pair_y += pm - pp;
            pair_z += c.c_zz(j, k);
        }
    }
    // Each unordered pair appears twice in sum_{j != k}, and each term is 2 Re(...).
    m.second_x = n + 4.0 * pair_x;
    m.second_y = n + 4.0 * pair_y;
    m.second_z = n + 2.0 * pair_z;
    return m;
}

OperatorMoments moments(const SpinCorrelators& c, const AtomConfig& config, const Direction& dir) {
    if (c.n_atoms != config.n_atoms()) throw std::invalid_argument("state/config size mismatch");
    const auto phases = optical_phases(config, dir);
    OperatorMoments m = moments_from_correlators(c, phases);
    m.direction = dir;
    return m;
}

OperatorMoments moments(const PureState& psi, const AtomConfig& config, const Direction& dir) {
    return moments(correlators(psi), config, dir);
}

OperatorMoments moments(const DensityMatrix& rho, const AtomConfig& config, const Direction& dir) {
    return moments(correlators(rho), config, dir);
}

}  // namespace fieldwit
