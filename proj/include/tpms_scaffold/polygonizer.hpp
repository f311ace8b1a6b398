#pragma once

// Marching tetrahedra over a regular sample grid in the unit parameter cube,
// and closure of the resulting open surfaces into solids with triangles on the
// six faces of the domain.
//
// Every cube is split into the same six tetrahedra around its (0,0,0)-(1,1,1)
// diagonal, so the face diagonals agree between neighbouring cubes and on the
// domain boundary. Surface vertices are keyed by the grid edge they lie on
// (lower endpoint index * 8 + offset bits), which welds the surface without
// any floating-point position matching.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bspline.hpp"
#include "error.hpp"
#include "mesh.hpp"
#include "parallel.hpp"
#include "tensor_grid.hpp"
#include "tpms.hpp"

namespace tpms_scaffold {

inline constexpr int kDefaultPolygonizationResolution = 100;

/// Field samples at the vertices of a regular grid over [0,1]^3, stored at
/// index (i*Ny + j)*Nz + k with i along u.
struct SampleGrid {
    static constexpr std::string_view decomposition = "freudenthal-6";

    std::array<int, 3> resolution{};
    std::vector<double> values;
    StructureKind structure = StructureKind::Pore;
    double epsilon = kDefaultSheetThickness;

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * static_cast<std::size_t>(resolution[1]) + static_cast<std::size_t>(j)) *
                   static_cast<std::size_t>(resolution[2]) +
               static_cast<std::size_t>(k);
    }
    std::array<int, 3> unindex(std::size_t n) const {
        const auto nz = static_cast<std::size_t>(resolution[2]), ny = static_cast<std::size_t>(resolution[1]);
        return {static_cast<int>(n / (ny * nz)), static_cast<int>((n / nz) % ny), static_cast<int>(n % nz)};
    }
    double at(int i, int j, int k) const { return values[index(i, j, k)]; }
    Vec3 position(int i, int j, int k) const {
        return {static_cast<double>(i) / (resolution[0] - 1), static_cast<double>(j) / (resolution[1] - 1),
                static_cast<double>(k) / (resolution[2] - 1)};
    }
    Vec3 position(std::size_t n) const {
        const auto g = unindex(n);
        return position(g[0], g[1], g[2]);
    }
};

inline void check_resolution(const std::array<int, 3>& res) {
    for (int r : res)
        if (r < 2) throw InvalidArgument("sample resolution must be >= 2 per direction, got " + std::to_string(r));
}

/// Samples an arbitrary function of (u,v,w) at the grid vertices.
inline SampleGrid sample_function(std::array<int, 3> resolution, const std::function<double(double, double, double)>& fn) {
    check_resolution(resolution);
    SampleGrid s;
    s.resolution = resolution;
    s.values.resize(static_cast<std::size_t>(resolution[0]) * static_cast<std::size_t>(resolution[1]) *
                    static_cast<std::size_t>(resolution[2]));
    parallel_for(0, resolution[0], [&](std::ptrdiff_t ii) {
        const int i = static_cast<int>(ii);
        for (int j = 0; j < resolution[1]; ++j)
            for (int k = 0; k < resolution[2]; ++k) {
                const Vec3 p = s.position(i, j, k);
                s.values[s.index(i, j, k)] = fn(p.x, p.y, p.z);
            }
    });
    return s;
}

/// Samples f = psi - C at every grid vertex (resolution counts vertices per direction).
inline SampleGrid sample_field(const ImplicitFieldSpec& spec, const TrivariateScalarField& tdf, std::array<int, 3> resolution) {
    check_resolution(resolution);
    spec.validate();
    SampleGrid s;
    s.resolution = resolution;
    s.structure = spec.structure;
    s.epsilon = spec.epsilon;
    const auto us = grid_parameters(resolution[0]), vs = grid_parameters(resolution[1]), ws = grid_parameters(resolution[2]);
    s.values = evaluate_on_grid(tdf, us, vs, ws);
    std::vector<AxisTrig> tu, tv, tw;
    for (double u : us) tu.push_back(axis_trig(spec.periods.x, u));
    for (double v : vs) tv.push_back(axis_trig(spec.periods.y, v));
    for (double w : ws) tw.push_back(axis_trig(spec.periods.z, w));
    parallel_for(0, resolution[0], [&](std::ptrdiff_t ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < tv.size(); ++j)
            for (std::size_t k = 0; k < tw.size(); ++k) {
                double& f = s.values[(i * tv.size() + j) * tw.size() + k];
                f = psi_from_trig(spec.tpms, tu[i], tv[j], tw[k]) - f;
            }
    });
    return s;
}

inline SampleGrid sample_field(const ImplicitFieldSpec& spec, const TrivariateScalarField& tdf, int resolution) {
    return sample_field(spec, tdf, {resolution, resolution, resolution});
}

/// Open iso-surface with the grid-edge key of every vertex.
struct IsoSurface {
    TriangleMesh mesh;
    std::vector<std::uint64_t> keys;
    double iso = 0.0;
};

namespace detail {

/// Relative width of the band around the iso value that samples are pushed out of.
inline constexpr double kIsoBand = 1e-4;

/// Samples within kIsoBand x (value range) of the iso value are moved to the
/// nearer edge of that band, ties going up. No sample then lies on the
/// surface, every sign test is strict, and each edge crossing keeps a
/// fraction of at least kIsoBand from both grid vertices, which keeps
/// triangles away from zero area.
struct Perturbation {
    double iso;
    double delta;
    double operator()(double v) const {
        if (std::abs(v - iso) >= delta) return v;
        return v >= iso ? iso + delta : iso - delta;
    }
};

inline Perturbation make_perturbation(const SampleGrid& s, double iso) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : s.values) {
        if (!std::isfinite(v)) throw InvalidArgument("sample grid contains a non-finite value");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double range = hi - lo;
    double delta = range > 0 ? kIsoBand * range : kIsoBand;
    delta = std::max(delta, 4 * std::numeric_limits<double>::epsilon() * std::abs(iso));
    return {iso, delta};
}

struct Tet {
    std::array<int, 4> corner; // cube corners (bit0 = +u, bit1 = +v, bit2 = +w), positively oriented
};

inline std::array<Tet, 6> freudenthal_tets() {
    static constexpr std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    std::array<Tet, 6> tets{};
    auto pt = [](int c) { return Vec3(c & 1, (c >> 1) & 1, (c >> 2) & 1); };
    for (std::size_t n = 0; n < 6; ++n) {
        const int v1 = 1 << perms[n][0];
        const int v2 = v1 | (1 << perms[n][1]);
        Tet t{{0, v1, v2, 7}};
        if (det3(pt(t.corner[1]) - pt(t.corner[0]), pt(t.corner[2]) - pt(t.corner[0]), pt(t.corner[3]) - pt(t.corner[0])) < 0)
            std::swap(t.corner[1], t.corner[2]);
        tets[n] = t;
    }
    return tets;
}

// Even permutations of the tetrahedron slots that bring a given slot (or pair
// of slots) to the front; they keep the positive orientation.
inline constexpr std::array<std::array<int, 4>, 4> kIsolatedFirst{{{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 0, 1, 3}, {3, 0, 2, 1}}};

inline constexpr std::array<int, 4> pair_first(int a, int b) {
    if (a == 0 && b == 1) return {0, 1, 2, 3};
    if (a == 0 && b == 2) return {0, 2, 3, 1};
    if (a == 0 && b == 3) return {0, 3, 1, 2};
    if (a == 1 && b == 2) return {1, 2, 0, 3};
    if (a == 1 && b == 3) return {1, 3, 2, 0};
    return {2, 3, 0, 1};
}

inline std::uint64_t edge_key(std::size_t low_index, int offset_bits) {
    return static_cast<std::uint64_t>(low_index) * 8u + static_cast<std::uint64_t>(offset_bits);
}

} // namespace detail

/// Polygonizes {f = iso}. Triangle normals point toward f > iso.
inline IsoSurface marching_tetrahedra(const SampleGrid& samples, double iso = 0.0) {
    check_resolution(samples.resolution);
    const auto perturb = detail::make_perturbation(samples, iso);
    const auto [nx, ny, nz] = samples.resolution;
    const auto tets = detail::freudenthal_tets();
    const std::array<std::size_t, 3> stride{static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz),
                                            static_cast<std::size_t>(nz), 1};
    std::array<std::size_t, 8> corner_offset{};
    for (int c = 0; c < 8; ++c)
        corner_offset[static_cast<std::size_t>(c)] = (c & 1) * stride[0] + ((c >> 1) & 1) * stride[1] + ((c >> 2) & 1) * stride[2];

    IsoSurface out;
    out.iso = iso;
    out.mesh.space = MeshSpace::Parametric;
    std::unordered_map<std::uint64_t, int> vertex_of;

    auto vertex = [&](std::size_t base, int ca, int cb) {
        const int lo = (ca & cb) == ca ? ca : cb; // corners of a tet edge are nested
        const int hi = lo == ca ? cb : ca;
        const std::size_t low = base + corner_offset[static_cast<std::size_t>(lo)];
        const std::uint64_t key = detail::edge_key(low, lo ^ hi);
        auto [it, inserted] = vertex_of.try_emplace(key, static_cast<int>(out.mesh.vertices.size()));
        if (inserted) {
            const std::size_t high = base + corner_offset[static_cast<std::size_t>(hi)];
            const double fa = perturb(samples.values[low]), fb = perturb(samples.values[high]);
            const double t = (iso - fa) / (fb - fa);
            const Vec3 pa = samples.position(low), pb = samples.position(high);
            out.mesh.vertices.push_back(pa + (pb - pa) * t);
            out.keys.push_back(key);
        }
        return it->second;
    };

    for (int i = 0; i + 1 < nx; ++i)
        for (int j = 0; j + 1 < ny; ++j)
            for (int k = 0; k + 1 < nz; ++k) {
                const std::size_t base = samples.index(i, j, k);
                std::array<bool, 8> pos{};
                int npos = 0;
                for (std::size_t c = 0; c < 8; ++c) {
                    pos[c] = perturb(samples.values[base + corner_offset[c]]) > iso;
                    npos += pos[c];
                }
                if (npos == 0 || npos == 8) continue;
                for (const auto& tet : tets) {
                    std::array<int, 4> slot_pos{};
                    int n = 0;
                    for (std::size_t s = 0; s < 4; ++s) {
                        slot_pos[s] = pos[static_cast<std::size_t>(tet.corner[s])];
                        n += slot_pos[s];
                    }
                    if (n == 0 || n == 4) continue;
                    auto c = [&](int slot) { return tet.corner[static_cast<std::size_t>(slot)]; };
                    if (n == 1 || n == 3) {
                        int a = 0;
                        while (slot_pos[static_cast<std::size_t>(a)] != (n == 1 ? 1 : 0)) ++a;
                        const auto& p = detail::kIsolatedFirst[static_cast<std::size_t>(a)];
                        const int eab = vertex(base, c(p[0]), c(p[1]));
                        const int eac = vertex(base, c(p[0]), c(p[2]));
                        const int ead = vertex(base, c(p[0]), c(p[3]));
                        // (ab, ad, ac) faces the isolated corner.
                        if (n == 1) out.mesh.triangles.push_back({eab, ead, eac});
                        else out.mesh.triangles.push_back({eab, eac, ead});
                    } else {
                        int a = -1, b = -1;
                        for (int s = 0; s < 4; ++s)
                            if (slot_pos[static_cast<std::size_t>(s)]) (a < 0 ? a : b) = s;
                        const auto p = detail::pair_first(a, b);
                        const int eac = vertex(base, c(p[0]), c(p[2]));
                        const int ead = vertex(base, c(p[0]), c(p[3]));
                        const int ebc = vertex(base, c(p[1]), c(p[2]));
                        const int ebd = vertex(base, c(p[1]), c(p[3]));
                        out.mesh.triangles.push_back({eac, ebc, ebd});
                        out.mesh.triangles.push_back({eac, ebd, ead});
                    }
                }
            }
    return out;
}

namespace detail {

/// One half-space {f >= iso} (keep_positive) or {f <= iso} of the solid.
struct Constraint {
    const IsoSurface* surface;
    Perturbation perturb;
    bool keep_positive;
};

struct PolyVertex {
    std::size_t a, b; // grid vertices; a == b for a grid vertex, else a < b is the supporting edge
    int level;        // -1 for a grid vertex, else index of the constraint it crosses
    double t;         // position along a -> b
};

} // namespace detail

/// Closes an open iso-surface into the boundary of the volume structure:
/// pore {f >= 0}, rod {f <= 0}, sheet {-epsilon <= f <= 0}. The triangles of
/// each domain face (split along the same diagonal as the tetrahedra) are
/// clipped to the structure and added. The result is oriented outward.
inline TriangleMesh close_structure(const IsoSurface& surface, const SampleGrid& samples, StructureKind structure) {
    IsoSurface inner;
    std::vector<detail::Constraint> cons;
    switch (structure) {
    case StructureKind::Pore: cons.push_back({&surface, detail::make_perturbation(samples, surface.iso), true}); break;
    case StructureKind::Rod: cons.push_back({&surface, detail::make_perturbation(samples, surface.iso), false}); break;
    case StructureKind::Sheet:
        if (!(samples.epsilon > 0)) throw InvalidArgument("sheet structure needs a positive epsilon");
        inner = marching_tetrahedra(samples, surface.iso - samples.epsilon);
        cons.push_back({&surface, detail::make_perturbation(samples, surface.iso), false});
        cons.push_back({&inner, detail::make_perturbation(samples, inner.iso), true});
        break;
    }

    TriangleMesh out;
    out.space = MeshSpace::Parametric;
    std::vector<std::unordered_map<std::uint64_t, int>> vertex_of(cons.size());
    for (std::size_t c = 0; c < cons.size(); ++c) {
        const TriangleMesh& m = cons[c].surface->mesh;
        const int offset = static_cast<int>(out.vertices.size());
        out.vertices.insert(out.vertices.end(), m.vertices.begin(), m.vertices.end());
        for (std::size_t v = 0; v < cons[c].surface->keys.size(); ++v)
            vertex_of[c].emplace(cons[c].surface->keys[v], offset + static_cast<int>(v));
        for (const auto& t : m.triangles) {
            // Surface normals face f > iso; the solid must face outward.
            if (cons[c].keep_positive) out.triangles.push_back({offset + t[0], offset + t[2], offset + t[1]});
            else out.triangles.push_back({offset + t[0], offset + t[1], offset + t[2]});
        }
    }

    std::unordered_map<std::size_t, int> grid_vertex;
    auto value = [&](const detail::PolyVertex& p, const detail::Constraint& c) {
        const double fa = c.perturb(samples.values[p.a]);
        if (p.a == p.b) return fa;
        return fa + (c.perturb(samples.values[p.b]) - fa) * p.t;
    };
    auto offset_bits = [&](std::size_t lo, std::size_t hi) {
        const auto a = samples.unindex(lo), b = samples.unindex(hi);
        return (b[0] - a[0]) | ((b[1] - a[1]) << 1) | ((b[2] - a[2]) << 2);
    };
    auto mesh_vertex = [&](const detail::PolyVertex& p) {
        if (p.level < 0) {
            auto [it, inserted] = grid_vertex.try_emplace(p.a, static_cast<int>(out.vertices.size()));
            if (inserted) out.vertices.push_back(samples.position(p.a));
            return it->second;
        }
        const auto key = detail::edge_key(p.a, offset_bits(p.a, p.b));
        auto& map = vertex_of[static_cast<std::size_t>(p.level)];
        auto [it, inserted] = map.try_emplace(key, static_cast<int>(out.vertices.size()));
        if (inserted) {
            // Not produced by the surface; closure validation will report the open edge.
            const Vec3 pa = samples.position(p.a), pb = samples.position(p.b);
            out.vertices.push_back(pa + (pb - pa) * p.t);
        }
        return it->second;
    };

    std::vector<detail::PolyVertex> poly, next;
    auto emit_clipped = [&](std::array<std::size_t, 3> tri) {
        poly.clear();
        for (std::size_t g : tri) poly.push_back({g, g, -1, 0.0});
        for (std::size_t ci = 0; ci < cons.size() && !poly.empty(); ++ci) {
            const auto& c = cons[ci];
            auto inside = [&](const detail::PolyVertex& p) {
                if (p.level == static_cast<int>(ci)) return true;
                const double f = value(p, c);
                return c.keep_positive ? f > c.perturb.iso : f < c.perturb.iso;
            };
            next.clear();
            for (std::size_t n = 0; n < poly.size(); ++n) {
                const auto& P = poly[n];
                const auto& Q = poly[(n + 1) % poly.size()];
                const bool inP = inside(P), inQ = inside(Q);
                if (inP) next.push_back(P);
                if (inP == inQ) continue;
                std::array<std::size_t, 4> ends{P.a, P.b, Q.a, Q.b};
                std::sort(ends.begin(), ends.end());
                const auto last = std::unique(ends.begin(), ends.end());
                if (last - ends.begin() != 2)
                    throw Error("structure band too thin to resolve on the sample grid");
                const std::size_t lo = ends[0], hi = ends[1];
                const double fa = c.perturb(samples.values[lo]), fb = c.perturb(samples.values[hi]);
                next.push_back({lo, hi, static_cast<int>(ci), (c.perturb.iso - fa) / (fb - fa)});
            }
            std::swap(poly, next);
        }
        if (poly.size() < 3) return;
        std::vector<int> ids;
        ids.reserve(poly.size());
        for (const auto& p : poly) ids.push_back(mesh_vertex(p));
        for (std::size_t n = 1; n + 1 < ids.size(); ++n) out.triangles.push_back({ids[0], ids[n], ids[n + 1]});
    };

    for (int axis = 0; axis < 3; ++axis) {
        const int s_axis = axis == 0 ? 1 : 0;
        const int t_axis = axis == 2 ? 1 : 2;
        // (c00, c10, c11) has normal e_s x e_t, which is +x, -y, +z for axis 0, 1, 2.
        const double base_sign = axis == 1 ? -1.0 : 1.0;
        const int n_axis = samples.resolution[static_cast<std::size_t>(axis)];
        const int ns = samples.resolution[static_cast<std::size_t>(s_axis)];
        const int nt = samples.resolution[static_cast<std::size_t>(t_axis)];
        for (int side = 0; side < 2; ++side) {
            const double outward = side == 0 ? -1.0 : 1.0;
            const bool flip = outward != base_sign;
            const int fixed = side == 0 ? 0 : n_axis - 1;
            auto gidx = [&](int s, int t) {
                std::array<int, 3> g{};
                g[static_cast<std::size_t>(axis)] = fixed;
                g[static_cast<std::size_t>(s_axis)] = s;
                g[static_cast<std::size_t>(t_axis)] = t;
                return samples.index(g[0], g[1], g[2]);
            };
            for (int s = 0; s + 1 < ns; ++s)
                for (int t = 0; t + 1 < nt; ++t) {
                    const std::size_t c00 = gidx(s, t), c10 = gidx(s + 1, t), c01 = gidx(s, t + 1), c11 = gidx(s + 1, t + 1);
                    if (!flip) {
                        emit_clipped({c00, c10, c11});
                        emit_clipped({c00, c11, c01});
                    } else {
                        emit_clipped({c00, c11, c10});
                        emit_clipped({c00, c01, c11});
                    }
                }
        }
    }
    const auto rep = analyze_edges(out);
    if (!rep.unpaired.empty() || !rep.misoriented.empty()) {
        auto bad = rep.unpaired;
        bad.insert(bad.end(), rep.misoriented.begin(), rep.misoriented.end());
        throw ClosureError("closed mesh has " + std::to_string(rep.unpaired.size()) + " unpaired and " +
                               std::to_string(rep.misoriented.size()) + " misoriented edges",
                           std::move(bad));
    }
    out.closed = true;
    return out;
}

/// Samples already carry the structure kind and epsilon.
inline TriangleMesh polygonize(const SampleGrid& samples) {
    return close_structure(marching_tetrahedra(samples, 0.0), samples, samples.structure);
}

} // namespace tpms_scaffold
