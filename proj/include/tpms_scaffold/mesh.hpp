#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <tuple>
#include <utility>
#include <vector>

#include "error.hpp"
#include "vec3.hpp"

namespace tpms_scaffold {

enum class MeshSpace { Parametric, Physical };

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    MeshSpace space = MeshSpace::Parametric;
    bool closed = false;

    bool empty() const noexcept { return triangles.empty(); }
};

inline Vec3 triangle_normal(const TriangleMesh& m, const std::array<int, 3>& t) {
    const Vec3& a = m.vertices[static_cast<std::size_t>(t[0])];
    return cross(m.vertices[static_cast<std::size_t>(t[1])] - a, m.vertices[static_cast<std::size_t>(t[2])] - a);
}

struct EdgeReport {
    std::size_t edge_count = 0;                     // undirected
    std::vector<std::pair<int, int>> unpaired;      // edges not used by exactly two triangles
    std::vector<std::pair<int, int>> misoriented;   // edges traversed twice in the same direction
};

/// Classifies every undirected edge by how many triangles use it and in which directions.
inline EdgeReport analyze_edges(const TriangleMesh& m) {
    // (lo, hi, +1 if traversed lo->hi else -1)
    std::vector<std::tuple<int, int, int>> e;
    e.reserve(m.triangles.size() * 3);
    for (const auto& t : m.triangles)
        for (int c = 0; c < 3; ++c) {
            const int a = t[static_cast<std::size_t>(c)], b = t[static_cast<std::size_t>((c + 1) % 3)];
            e.emplace_back(std::min(a, b), std::max(a, b), a < b ? 1 : -1);
        }
    std::sort(e.begin(), e.end());
    EdgeReport rep;
    for (std::size_t i = 0; i < e.size();) {
        std::size_t j = i;
        int dir_sum = 0;
        while (j < e.size() && std::get<0>(e[j]) == std::get<0>(e[i]) && std::get<1>(e[j]) == std::get<1>(e[i])) {
            dir_sum += std::get<2>(e[j]);
            ++j;
        }
        ++rep.edge_count;
        const std::pair<int, int> edge{std::get<0>(e[i]), std::get<1>(e[i])};
        if (j - i != 2) rep.unpaired.push_back(edge);
        else if (dir_sum != 0) rep.misoriented.push_back(edge);
        i = j;
    }
    return rep;
}

inline bool is_closed(const TriangleMesh& m) {
    const auto rep = analyze_edges(m);
    return rep.unpaired.empty() && rep.misoriented.empty();
}

/// V - E + F.
inline long euler_characteristic(const TriangleMesh& m) {
    std::vector<char> used(m.vertices.size(), 0);
    for (const auto& t : m.triangles)
        for (int v : t) used[static_cast<std::size_t>(v)] = 1;
    const long V = static_cast<long>(std::count(used.begin(), used.end(), 1));
    return V - static_cast<long>(analyze_edges(m).edge_count) + static_cast<long>(m.triangles.size());
}

inline double mesh_area(const TriangleMesh& m) {
    double a = 0.0;
    for (const auto& t : m.triangles) a += 0.5 * norm(triangle_normal(m, t));
    return a;
}

/// Signed enclosed volume by the divergence theorem; positive for outward orientation.
inline double mesh_volume(const TriangleMesh& m) {
    const auto rep = analyze_edges(m);
    if (!rep.unpaired.empty() || !rep.misoriented.empty()) throw InvalidArgument("volume requested on an open mesh");
    double v = 0.0;
    for (const auto& t : m.triangles)
        v += det3(m.vertices[static_cast<std::size_t>(t[0])], m.vertices[static_cast<std::size_t>(t[1])],
                  m.vertices[static_cast<std::size_t>(t[2])]);
    return v / 6.0;
}

} // namespace tpms_scaffold
