#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bspline.hpp"
#include "error.hpp"
#include "mesh.hpp"
#include "parallel.hpp"
#include "tensor_grid.hpp"
#include "tpms.hpp"

namespace tpms_scaffold {

inline constexpr int kDefaultSweepResolution = 128;

namespace detail {

/// psi at the centres of an n^3 voxel grid, u-major.
inline std::vector<double> psi_at_voxel_centres(TpmsType type, const PeriodCoefficients& w, int n) {
    const auto t = cell_center_parameters(n);
    std::vector<AxisTrig> tx, ty, tz;
    for (double x : t) {
        tx.push_back(axis_trig(w.x, x));
        ty.push_back(axis_trig(w.y, x));
        tz.push_back(axis_trig(w.z, x));
    }
    const auto N = static_cast<std::size_t>(n);
    std::vector<double> out(N * N * N);
    parallel_for(0, n, [&](std::ptrdiff_t ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < N; ++j)
            for (std::size_t k = 0; k < N; ++k) out[(i * N + j) * N + k] = psi_from_trig(type, tx[i], ty[j], tz[k]);
    });
    return out;
}

inline std::uint64_t count_inside(const ImplicitFieldSpec& spec, std::span<const double> psi, std::span<const double> c, int n) {
    const auto N = static_cast<std::size_t>(n);
    std::vector<std::uint64_t> slab(N, 0);
    parallel_for(0, n, [&](std::ptrdiff_t ii) {
        std::uint64_t cnt = 0;
        const std::size_t base = static_cast<std::size_t>(ii) * N * N;
        for (std::size_t m = 0; m < N * N; ++m) cnt += inside_for_value(spec, psi[base + m] - c[base + m]);
        slab[static_cast<std::size_t>(ii)] = cnt;
    });
    std::uint64_t total = 0;
    for (auto s : slab) total += s;
    return total;
}

} // namespace detail

/// Void fraction of the unit parameter cube: 1 - (fraction of voxel centres inside the structure).
inline double voxel_porosity(const ImplicitFieldSpec& spec, const TrivariateScalarField& tdf, int resolution) {
    if (resolution < 16) throw InvalidArgument("voxel porosity needs resolution >= 16");
    spec.validate();
    const auto t = cell_center_parameters(resolution);
    const auto c = evaluate_on_grid(tdf, t, t, t);
    const auto psi = detail::psi_at_voxel_centres(spec.tpms, spec.periods, resolution);
    const double total = static_cast<double>(c.size());
    return 1.0 - static_cast<double>(detail::count_inside(spec, psi, c, resolution)) / total;
}

struct PorositySample {
    double c;
    double porosity;
};

/// Porosity of constant-threshold structures for each c.
inline std::vector<PorositySample> porosity_sweep(TpmsType type, StructureKind structure, const PeriodCoefficients& periods,
                                                  std::span<const double> c_values, int resolution = kDefaultSweepResolution,
                                                  double epsilon = kDefaultSheetThickness) {
    if (resolution < 16) throw InvalidArgument("porosity sweep needs resolution >= 16");
    const ThresholdRange r = valid_range(type);
    for (double c : c_values)
        if (!r.contains(c))
            throw InvalidArgument("threshold " + std::to_string(c) + " outside the valid range of type " + std::string(to_string(type)));
    const ImplicitFieldSpec spec{type, periods, structure, epsilon};
    spec.validate();
    const auto psi = detail::psi_at_voxel_centres(type, periods, resolution);
    std::vector<double> c_grid(psi.size());
    std::vector<PorositySample> out;
    for (double c : c_values) {
        std::fill(c_grid.begin(), c_grid.end(), c);
        const auto inside = detail::count_inside(spec, psi, c_grid, resolution);
        out.push_back({c, 1.0 - static_cast<double>(inside) / static_cast<double>(psi.size())});
    }
    return out;
}

/// `steps` evenly spaced thresholds covering the valid range of the type, ends included.
inline std::vector<double> threshold_steps(TpmsType type, int steps) {
    if (steps < 2) throw InvalidArgument("need at least 2 threshold steps");
    const ThresholdRange r = valid_range(type);
    std::vector<double> c(static_cast<std::size_t>(steps));
    for (int s = 0; s < steps; ++s) c[static_cast<std::size_t>(s)] = r.lo + (r.hi - r.lo) * s / (steps - 1);
    c.back() = r.hi;
    return c;
}

struct MeshStatistics {
    std::size_t triangle_count = 0;
    std::size_t vertex_count = 0;
    bool closed = false;
    std::optional<double> volume; // only for closed meshes
    double area = 0.0;
    Vec3 bbox_min{}, bbox_max{};
};

inline MeshStatistics mesh_statistics(const TriangleMesh& mesh) {
    MeshStatistics s;
    s.triangle_count = mesh.triangles.size();
    s.vertex_count = mesh.vertices.size();
    s.closed = is_closed(mesh);
    if (s.closed) s.volume = mesh_volume(mesh);
    s.area = mesh_area(mesh);
    if (!mesh.vertices.empty()) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        s.bbox_min = {inf, inf, inf};
        s.bbox_max = {-inf, -inf, -inf};
        for (const auto& t : mesh.triangles)
            for (int v : t) {
                const Vec3& p = mesh.vertices[static_cast<std::size_t>(v)];
                for (int d = 0; d < 3; ++d) {
                    s.bbox_min[d] = std::min(s.bbox_min[d], p[d]);
                    s.bbox_max[d] = std::max(s.bbox_max[d], p[d]);
                }
            }
    }
    return s;
}

} // namespace tpms_scaffold
