// geometry.hpp: site positions and the dipolar coupling rule

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "exnet/config.hpp"
#include "exnet/errors.hpp"

namespace exnet {

using Vec3 = Eigen::Vector3d;

inline Vec3 to_cartesian(const SphericalPosition& p) {
    const double s = std::sin(p.theta);
    return {p.r * s * std::cos(p.phi), p.r * s * std::sin(p.phi), p.r * std::cos(p.theta)};
}

inline Vec3 to_cartesian(const SiteSpec& site) { return to_cartesian(site.position); }

// Inverse map with theta in [0, pi] and phi in (-pi, pi]. The origin maps to (0, 0, 0).
inline SphericalPosition to_spherical(const Vec3& x) {
    const double r = x.norm();
    if (r == 0.0) return {};
    return {r, std::acos(std::clamp(x.z() / r, -1.0, 1.0)), std::atan2(x.y(), x.x())};
}

inline std::vector<Vec3> site_positions(const NetworkConfig& cfg) {
    std::vector<Vec3> out;
    out.reserve(cfg.size());
    for (const auto& s : cfg.sites) out.push_back(to_cartesian(s));
    return out;
}

// V = J / |r_i - r_j|^3 with distances in nm.
inline double dipole_coupling(const Vec3& a, const Vec3& b, double J) {
    const double dist = (a - b).norm();
    if (!(dist > 0.0)) throw ConfigError("degenerate geometry: coincident site positions");
    return J / (dist * dist * dist);
}

struct CouplingStats {
    double mean{0.0};
    double max{0.0};
    std::size_t pairs{0};
};

// Each site is paired with its nearest neighbour by Euclidean distance;
// the resulting pair set is deduplicated before averaging |V|.
inline CouplingStats nn_coupling_stats(const NetworkConfig& cfg) {
    const auto pos = site_positions(cfg);
    const std::size_t n = pos.size();
    if (n < 2) throw ConfigError("nearest-neighbour statistics need at least two sites");

    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = n;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = (pos[i] - pos[j]).norm();
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        pairs.emplace(std::min(i, best), std::max(i, best));
    }

    CouplingStats stats;
    for (const auto& [i, j] : pairs) {
        const double v = std::abs(dipole_coupling(pos[i], pos[j], cfg.J));
        stats.mean += v;
        stats.max = std::max(stats.max, v);
    }
    stats.pairs = pairs.size();
    stats.mean /= static_cast<double>(pairs.size());
    return stats;
}

// Overwrite site positions from Cartesian coordinates, translating so that
// site 1 sits at the origin.
inline void set_positions(NetworkConfig& cfg, const std::vector<Vec3>& cartesian) {
    if (cartesian.size() != cfg.size()) throw ConfigError("position count does not match site count");
    const Vec3 origin = cartesian.front();
    for (std::size_t i = 0; i < cfg.size(); ++i)
        cfg.sites[i].position = i == 0 ? SphericalPosition{} : to_spherical(cartesian[i] - origin);
}

} // namespace exnet
