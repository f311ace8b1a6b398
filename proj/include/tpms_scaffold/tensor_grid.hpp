#pragma once

// Separable evaluation of tensor-product B-splines on rectilinear parameter
// grids. A collocation matrix B (rows = parameters, cols = coefficients) is
// applied one axis at a time, so a full-grid evaluation costs
// O(grid * (p+1)) per axis instead of O(grid * (p+1)^3).

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "bspline.hpp"
#include "parallel.hpp"

namespace tpms_scaffold {

/// Sparse matrix stored by rows: row r holds (column, weight) pairs.
struct SparseRows {
    int columns = 0;
    std::vector<std::vector<std::pair<int, double>>> rows;

    int row_count() const { return static_cast<int>(rows.size()); }

    SparseRows transposed() const {
        SparseRows t;
        t.columns = row_count();
        t.rows.resize(static_cast<std::size_t>(columns));
        for (int r = 0; r < row_count(); ++r)
            for (const auto& [c, w] : rows[static_cast<std::size_t>(r)])
                t.rows[static_cast<std::size_t>(c)].emplace_back(r, w);
        return t;
    }

    std::vector<double> row_sums() const {
        std::vector<double> s(rows.size(), 0.0);
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (const auto& e : rows[r]) s[r] += e.second;
        return s;
    }
};

/// B[a][i] = N_i(params[a]); only the non-zero entries are kept.
inline SparseRows collocation_matrix(const KnotVector& kv, std::span<const double> params) {
    SparseRows m;
    m.columns = kv.control_count();
    m.rows.resize(params.size());
    const int p = kv.degree();
    for (std::size_t a = 0; a < params.size(); ++a) {
        const double u = kv.checked_parameter(params[a]);
        const int span = kv.find_span(u);
        const BasisArray b = kv.basis(span, u);
        for (int r = 0; r <= p; ++r)
            if (b[static_cast<std::size_t>(r)] != 0.0) m.rows[a].emplace_back(span - p + r, b[static_cast<std::size_t>(r)]);
    }
    return m;
}

/// Vertex parameters a / (n - 1) for a = 0..n-1.
inline std::vector<double> grid_parameters(int n) {
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) t[static_cast<std::size_t>(a)] = n == 1 ? 0.0 : static_cast<double>(a) / (n - 1);
    return t;
}

/// Cell-center parameters (a + 0.5) / n.
inline std::vector<double> cell_center_parameters(int n) {
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) t[static_cast<std::size_t>(a)] = (a + 0.5) / n;
    return t;
}

/// Applies `m` along `axis` of a 3D array `in` with extents `dims` (last index fastest).
/// The output has dims[axis] replaced by m.row_count().
template <class T>
std::vector<T> apply_along_axis(const SparseRows& m, std::span<const T> in, std::array<int, 3> dims, int axis) {
    std::array<int, 3> out_dims = dims;
    out_dims[static_cast<std::size_t>(axis)] = m.row_count();
    const std::size_t n0 = static_cast<std::size_t>(out_dims[0]);
    const std::size_t n1 = static_cast<std::size_t>(out_dims[1]);
    const std::size_t n2 = static_cast<std::size_t>(out_dims[2]);
    std::vector<T> out(n0 * n1 * n2, T{});
    const std::array<std::size_t, 3> in_stride{static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(dims[2]),
                                               static_cast<std::size_t>(dims[2]), 1};
    const std::size_t s = in_stride[static_cast<std::size_t>(axis)];
    parallel_for(0, static_cast<std::ptrdiff_t>(n0), [&](std::ptrdiff_t ii) {
        const auto i0 = static_cast<std::size_t>(ii);
        for (std::size_t i1 = 0; i1 < n1; ++i1) {
            for (std::size_t i2 = 0; i2 < n2; ++i2) {
                std::array<std::size_t, 3> idx{i0, i1, i2};
                const std::size_t r = idx[static_cast<std::size_t>(axis)];
                idx[static_cast<std::size_t>(axis)] = 0;
                const std::size_t base = idx[0] * in_stride[0] + idx[1] * in_stride[1] + idx[2] * in_stride[2];
                T acc{};
                for (const auto& [c, w] : m.rows[r]) acc += in[base + static_cast<std::size_t>(c) * s] * w;
                out[(i0 * n1 + i1) * n2 + i2] = acc;
            }
        }
    });
    return out;
}

/// Evaluates a tensor-product B-spline at every point of the grid us x vs x ws.
template <class T>
std::vector<T> evaluate_on_grid(const TensorBSpline<T>& f, std::span<const double> us, std::span<const double> vs,
                                std::span<const double> ws) {
    const std::array<SparseRows, 3> B{collocation_matrix(f.knots(0), us), collocation_matrix(f.knots(1), vs),
                                      collocation_matrix(f.knots(2), ws)};
    std::array<int, 3> dims = f.dims();
    std::vector<T> cur(f.coefficients().begin(), f.coefficients().end());
    for (int axis = 2; axis >= 0; --axis) {
        cur = apply_along_axis<T>(B[static_cast<std::size_t>(axis)], cur, dims, axis);
        dims[static_cast<std::size_t>(axis)] = B[static_cast<std::size_t>(axis)].row_count();
    }
    return cur;
}

} // namespace tpms_scaffold
