#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "bspline.hpp"
#include "error.hpp"
#include "vec3.hpp"

namespace tpms_scaffold {

/// Cubic solid whose control points are fn evaluated at the Greville abscissae.
/// Affine maps are reproduced exactly; smooth maps are approximated.
inline TrivariateBSplineSolid solid_from_map(std::array<int, 3> control_counts, const std::function<Vec3(double, double, double)>& fn) {
    for (int n : control_counts)
        if (n < 4) throw InvalidArgument("a cubic solid needs at least 4 control points per direction");
    std::array<KnotVector, 3> kv{KnotVector::uniform_clamped(control_counts[0], 3), KnotVector::uniform_clamped(control_counts[1], 3),
                                 KnotVector::uniform_clamped(control_counts[2], 3)};
    std::vector<Vec3> pts;
    for (int i = 0; i < control_counts[0]; ++i)
        for (int j = 0; j < control_counts[1]; ++j)
            for (int k = 0; k < control_counts[2]; ++k) pts.push_back(fn(kv[0].greville(i), kv[1].greville(j), kv[2].greville(k)));
    return TrivariateBSplineSolid(std::move(kv), std::move(pts));
}

inline TrivariateBSplineSolid box_solid(const Vec3& size, std::array<int, 3> control_counts = {4, 4, 4}) {
    if (!(size.x > 0 && size.y > 0 && size.z > 0)) throw InvalidArgument("box size must be positive");
    return solid_from_map(control_counts, [&](double u, double v, double w) { return Vec3{size.x * u, size.y * v, size.z * w}; });
}

/// Ball of the given radius centred at the origin, from the smooth cube-to-sphere map
/// x' = x sqrt(1 - y^2/2 - z^2/2 + y^2 z^2 / 3) (and cyclic).
inline TrivariateBSplineSolid ball_solid(double radius, int control_count = 8) {
    if (!(radius > 0)) throw InvalidArgument("ball radius must be positive");
    return solid_from_map({control_count, control_count, control_count}, [&](double u, double v, double w) {
        const double x = 2 * u - 1, y = 2 * v - 1, z = 2 * w - 1;
        const double x2 = x * x, y2 = y * y, z2 = z * z;
        return Vec3{x * std::sqrt(1 - y2 / 2 - z2 / 2 + y2 * z2 / 3), y * std::sqrt(1 - z2 / 2 - x2 / 2 + z2 * x2 / 3),
                    z * std::sqrt(1 - x2 / 2 - y2 / 2 + x2 * y2 / 3)} *
               radius;
    });
}

/// Sector of a thick cylindrical shell: u runs radially, v around the axis, w along it.
inline TrivariateBSplineSolid cylinder_sector_solid(double inner, double outer, double height, double angle_degrees,
                                                    std::array<int, 3> control_counts = {4, 8, 4}) {
    if (!(inner >= 0 && outer > inner && height > 0 && angle_degrees > 0 && angle_degrees <= 360))
        throw InvalidArgument("cylinder sector needs 0 <= inner < outer, height > 0 and 0 < angle <= 360");
    const double theta = angle_degrees * std::numbers::pi / 180.0;
    return solid_from_map(control_counts, [&](double u, double v, double w) {
        const double r = inner + (outer - inner) * u, a = theta * v;
        return Vec3{r * std::cos(a), r * std::sin(a), height * w};
    });
}

} // namespace tpms_scaffold
