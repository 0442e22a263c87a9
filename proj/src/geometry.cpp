#include "fieldwit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace fieldwit {

AtomConfig::AtomConfig(std::vector<Vec3> positions, std::vector<Vec3> polarizations)
    : positions_(std::move(positions)), polarizations_(std::move(polarizations)) {
    if (positions_.empty()) throw GeometryError("configuration needs at least one atom");
    if (positions_.size() != polarizations_.size()) {
        throw GeometryError("positions and polarizations differ in length");
    }
    for (const auto& e : polarizations_) {
        if (std::abs(e.norm() - 1.0) > 1e-12) throw GeometryError("polarization vectors must be unit norm");
    }
    for (std::size_t j = 0; j < positions_.size(); ++j) {
        for (std::size_t m = j + 1; m < positions_.size(); ++m) {
            if (!((positions_[j] - positions_[m]).norm() > 0.0)) {
                throw GeometryError("atoms " + std::to_string(j) + " and " + std::to_string(m) + " coincide");
            }
        }
    }
}

AtomConfig AtomConfig::translated(const Vec3& offset) const {
    std::vector<Vec3> pos = positions_;
    for (auto& p : pos) p += offset;
    return AtomConfig(std::move(pos), polarizations_);
}

AtomConfig AtomConfig::permuted(const std::vector<int>& perm) const {
    if (perm.size() != positions_.size()) throw std::invalid_argument("permutation length mismatch");
    std::vector<Vec3> pos, pol;
    for (int i : perm) {
        pos.push_back(positions_.at(static_cast<std::size_t>(i)));
        pol.push_back(polarizations_.at(static_cast<std::size_t>(i)));
    }
    return AtomConfig(std::move(pos), std::move(pol));
}

Direction Direction::spherical(double theta, double phi, double chi) {
    Direction d;
    d.khat = Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
    d.chi = chi;
    d.theta = theta;
    d.phi = phi;
    return d;
}

Direction Direction::in_plane(double theta, double chi) {
    Direction d;
    d.khat = Vec3(std::cos(theta), std::sin(theta), 0.0);
    d.chi = chi;
    d.theta = theta;
    d.phi = 0.0;
    return d;
}

Direction Direction::from_vector(const Vec3& k, double chi) {
    const double n = k.norm();
    if (!(n > 0.0)) throw std::invalid_argument("direction vector must be nonzero");
    Direction d;
    d.khat = k / n;
    d.chi = chi;
    d.theta = std::acos(std::clamp(d.khat.z(), -1.0, 1.0));
    d.phi = std::atan2(d.khat.y(), d.khat.x());
    return d;
}

AtomConfig chain(int n_atoms, double spacing, const Vec3& polarization) {
    if (n_atoms < 1) throw std::invalid_argument("chain needs at least one atom");
    if (!(spacing > 0.0)) throw std::invalid_argument("chain spacing must be positive");
    std::vector<Vec3> pos;
    const double center = 0.5 * (n_atoms - 1);
    for (int j = 0; j < n_atoms; ++j) pos.emplace_back((j - center) * spacing, 0.0, 0.0);
    return AtomConfig(std::move(pos), std::vector<Vec3>(static_cast<std::size_t>(n_atoms), polarization.normalized()));
}

AtomConfig spherical_cloud(int n_atoms, double radius, std::uint64_t seed, const CloudOptions& opts) {
    if (n_atoms < 1) throw std::invalid_argument("cloud needs at least one atom");
    if (!(radius > 0.0)) throw std::invalid_argument("cloud radius must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<Vec3> pos;
    long attempts = 0;
    const long budget = static_cast<long>(opts.max_attempts_per_atom) * n_atoms;
    while (static_cast<int>(pos.size()) < n_atoms) {
        if (++attempts > budget) {
            throw GeometryError("could not pack " + std::to_string(n_atoms) + " atoms in radius " +
                                std::to_string(radius) + " after " + std::to_string(attempts - 1) + " attempts");
        }
        const Vec3 p(uni(rng), uni(rng), uni(rng));
        if (p.squaredNorm() > 1.0) continue;
        const Vec3 candidate = radius * p;
        bool ok = true;
        for (const auto& q : pos) {
            if ((candidate - q).norm() < opts.min_separation) {
                ok = false;
                break;
            }
        }
        if (ok) pos.push_back(candidate);
    }
    return AtomConfig(std::move(pos),
                      std::vector<Vec3>(static_cast<std::size_t>(n_atoms), opts.polarization.normalized()));
}

std::vector<Direction> sphere_grid(int n_theta, int n_phi) {
    if (n_theta < 1 || n_phi < 1) throw std::invalid_argument("grid counts must be positive");
    std::vector<Direction> out;
    out.reserve(static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(n_phi));
    for (int i = 0; i < n_theta; ++i) {
        const double theta = (i + 0.5) * M_PI / n_theta;
        for (int j = 0; j < n_phi; ++j) out.push_back(Direction::spherical(theta, 2.0 * M_PI * j / n_phi));
    }
    return out;
}

std::vector<Direction> plane_sweep(int n_angles) {
    if (n_angles < 1) throw std::invalid_argument("sweep needs at least one angle");
    std::vector<Direction> out;
    out.reserve(static_cast<std::size_t>(n_angles));
    for (int i = 0; i < n_angles; ++i) {
        const double theta = n_angles == 1 ? 0.0 : i * M_PI / (n_angles - 1);
        out.push_back(Direction::in_plane(theta));
    }
    return out;
}

}  // namespace fieldwit
