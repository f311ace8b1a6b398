#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <vector>

#include "bspline.hpp"
#include "error.hpp"
#include "mesh.hpp"
#include "parallel.hpp"

namespace tpms_scaffold {

/// Pushes every vertex of a parametric mesh through the solid's geometry map.
/// Connectivity is untouched, so closedness and orientation carry over where
/// the Jacobian is positive.
inline TriangleMesh map_mesh(const TrivariateBSplineSolid& solid, const TriangleMesh& mesh) {
    if (mesh.space != MeshSpace::Parametric) throw InvalidArgument("map_mesh expects a parametric-space mesh");
    TriangleMesh out;
    out.triangles = mesh.triangles;
    out.closed = mesh.closed;
    out.space = MeshSpace::Physical;
    out.vertices.resize(mesh.vertices.size());
    parallel_for(0, static_cast<std::ptrdiff_t>(mesh.vertices.size()), [&](std::ptrdiff_t n) {
        const Vec3& p = mesh.vertices[static_cast<std::size_t>(n)];
        out.vertices[static_cast<std::size_t>(n)] = solid.evaluate(p.x, p.y, p.z);
    });
    return out;
}

struct JacobianReport {
    double min_det = std::numeric_limits<double>::infinity();
    Vec3 location{}; // parameters of the minimum
    bool positive = false;
};

/// Samples det J on a uniform grid, then refines around the worst sample with
/// three halvings of the sample spacing.
inline JacobianReport validate_jacobian(const TrivariateBSplineSolid& solid, int samples_per_axis = 21) {
    if (samples_per_axis < 2) throw InvalidArgument("validate_jacobian needs at least 2 samples per axis");
    const int n = samples_per_axis;
    const double h = 1.0 / (n - 1);
    std::vector<JacobianReport> slab(static_cast<std::size_t>(n));
    parallel_for(0, n, [&](std::ptrdiff_t ii) {
        JacobianReport r;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const Vec3 t(static_cast<double>(ii) * h, j * h, k * h);
                const double d = jacobian_det(solid, t.x, t.y, t.z);
                if (d < r.min_det) r = {d, t, false};
            }
        slab[static_cast<std::size_t>(ii)] = r;
    });
    JacobianReport best;
    for (const auto& r : slab)
        if (r.min_det < best.min_det) best = r;

    double step = h;
    for (int level = 0; level < 3; ++level) {
        step *= 0.5;
        const Vec3 c = best.location;
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                for (int d = -1; d <= 1; ++d) {
                    const Vec3 t(std::clamp(c.x + a * step, 0.0, 1.0), std::clamp(c.y + b * step, 0.0, 1.0),
                                 std::clamp(c.z + d * step, 0.0, 1.0));
                    const double det = jacobian_det(solid, t.x, t.y, t.z);
                    if (det < best.min_det) best = {det, t, false};
                }
    }
    best.positive = best.min_det > 0.0;
    return best;
}

} // namespace tpms_scaffold
