#pragma once

// Emitter arrangements and observation directions. Natural units: lengths in
// 1/k, times in 1/Gamma.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace fieldwit {

using Vec3 = Eigen::Vector3d;

class GeometryError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class AtomConfig {
  public:
    /// Throws GeometryError for coincident atoms or non-unit polarizations.
    AtomConfig(std::vector<Vec3> positions, std::vector<Vec3> polarizations);

    const std::vector<Vec3>& positions() const { return positions_; }
    const std::vector<Vec3>& polarizations() const { return polarizations_; }
    int n_atoms() const { return static_cast<int>(positions_.size()); }

    AtomConfig translated(const Vec3& offset) const;
    /// Reorders atoms: new atom i is old atom perm[i].
    AtomConfig permuted(const std::vector<int>& perm) const;

  private:
    std::vector<Vec3> positions_;
    std::vector<Vec3> polarizations_;
};

/// Observation direction. `theta`/`phi` are the grid angles that generated
/// `khat` (for in-plane sweeps theta is the angle from x in the xy-plane and
/// phi is 0); they label CSV rows only.
struct Direction {
    Vec3 khat = Vec3::UnitX();
    double chi = 0.0;
    double theta = 0.0;
    double phi = 0.0;

    /// khat = (sin t cos p, sin t sin p, cos t).
    static Direction spherical(double theta, double phi, double chi = 0.0);
    /// khat = (cos t, sin t, 0).
    static Direction in_plane(double theta, double chi = 0.0);
    static Direction from_vector(const Vec3& k, double chi = 0.0);
};

/// Atoms on the x axis at x_j = (j - (N-1)/2) d, centered at the origin.
AtomConfig chain(int n_atoms, double spacing, const Vec3& polarization = Vec3::UnitZ());

struct CloudOptions {
    double min_separation = 0.05;
    int max_attempts_per_atom = 100000;
    Vec3 polarization = Vec3::UnitZ();
};

/// Uniform positions in a ball of radius R, every pair at least
/// min_separation apart. Deterministic for a given seed.
AtomConfig spherical_cloud(int n_atoms, double radius, std::uint64_t seed, const CloudOptions& opts = {});

/// Polar/azimuthal grid: theta_i = (i + 1/2) pi / n_theta, phi_j = 2 pi j / n_phi.
/// No poles are emitted, so there are no duplicate directions.
std::vector<Direction> sphere_grid(int n_theta, int n_phi);

/// theta_i = i pi / (n - 1) in the xy-plane (theta = 0 for n = 1).
std::vector<Direction> plane_sweep(int n_angles);

}  // namespace fieldwit
