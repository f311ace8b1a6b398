#pragma once

// Construction of the threshold distribution field (TDF).
//
// A discrete TDF lives on a regular parametric grid over [0,1]^3. It is
// designed by one of three methods (boundary curvature diffused inward,
// layers, or a user function), mapped affinely into the valid threshold
// range of a TPMS type, and fitted by a cubic trivariate B-spline with the
// least-squares progressive-iteration approximation (LSPIA).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bspline.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "tensor_grid.hpp"
#include "tpms.hpp"

namespace tpms_scaffold {

using GridIndex = std::array<int, 3>;

/// Scalar values on the vertices of a regular grid; vertex (a,b,c) sits at
/// parameters (a/(Ru-1), b/(Rv-1), c/(Rw-1)). Storage is c-fastest.
class ParametricGrid {
public:
    ParametricGrid() : ParametricGrid({50, 50, 50}) {}

    explicit ParametricGrid(std::array<int, 3> resolution, double fill = 0.0) : res_(resolution) {
        for (int r : res_)
            if (r < 2) throw InvalidArgument("parametric grid resolution must be >= 2 per direction");
        values_.assign(static_cast<std::size_t>(res_[0]) * static_cast<std::size_t>(res_[1]) *
                           static_cast<std::size_t>(res_[2]),
                       fill);
    }

    ParametricGrid(std::array<int, 3> resolution, std::vector<double> values) : ParametricGrid(resolution) {
        if (values.size() != values_.size()) throw InvalidArgument("grid value count does not match resolution");
        values_ = std::move(values);
    }

    const std::array<int, 3>& resolution() const noexcept { return res_; }
    std::size_t size() const noexcept { return values_.size(); }

    std::size_t index(int a, int b, int c) const {
        return (static_cast<std::size_t>(a) * static_cast<std::size_t>(res_[1]) + static_cast<std::size_t>(b)) *
                   static_cast<std::size_t>(res_[2]) +
               static_cast<std::size_t>(c);
    }
    bool contains(const GridIndex& g) const {
        return g[0] >= 0 && g[1] >= 0 && g[2] >= 0 && g[0] < res_[0] && g[1] < res_[1] && g[2] < res_[2];
    }

    double& at(int a, int b, int c) { return values_[index(a, b, c)]; }
    double at(int a, int b, int c) const { return values_[index(a, b, c)]; }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    double parameter(int axis, int i) const {
        return static_cast<double>(i) / (res_[static_cast<std::size_t>(axis)] - 1);
    }
    std::array<double, 3> parameters(int a, int b, int c) const { return {parameter(0, a), parameter(1, b), parameter(2, c)}; }

    bool on_boundary(int a, int b, int c) const {
        return a == 0 || b == 0 || c == 0 || a == res_[0] - 1 || b == res_[1] - 1 || c == res_[2] - 1;
    }

    double min_value() const { return *std::min_element(values_.begin(), values_.end()); }
    double max_value() const { return *std::max_element(values_.begin(), values_.end()); }

    /// Trilinear interpolation at a parameter point in [0,1]^3.
    double interpolate(double u, double v, double w) const {
        const std::array<double, 3> t{u, v, w};
        std::array<int, 3> i0{};
        std::array<double, 3> fr{};
        for (std::size_t d = 0; d < 3; ++d) {
            const double x = std::clamp(t[d], 0.0, 1.0) * (res_[d] - 1);
            i0[d] = std::min(static_cast<int>(std::floor(x)), res_[d] - 2);
            fr[d] = x - i0[d];
        }
        double acc = 0.0;
        for (int da = 0; da < 2; ++da)
            for (int db = 0; db < 2; ++db)
                for (int dc = 0; dc < 2; ++dc) {
                    const double wgt = (da ? fr[0] : 1 - fr[0]) * (db ? fr[1] : 1 - fr[1]) * (dc ? fr[2] : 1 - fr[2]);
                    acc += wgt * at(i0[0] + da, i0[1] + db, i0[2] + dc);
                }
        return acc;
    }

    friend bool operator==(const ParametricGrid&, const ParametricGrid&) = default;

private:
    std::array<int, 3> res_;
    std::vector<double> values_;
};

struct Edit {
    GridIndex vertex;
    double value;
};
using EditSet = std::vector<Edit>;

// ---------------------------------------------------------------------------
// Filling method

struct LaplaceOptions {
    double tol = -1.0;     // absolute; negative selects 1e-6 x boundary value range
    int max_iters = 10000;
};

struct LaplaceReport {
    int iterations = 0;
    double last_change = 0.0;
    bool converged = false;
};

/// Jacobi iteration of the 6-neighbour discrete Laplace equation on the
/// interior vertices; boundary vertices are Dirichlet data and stay fixed.
/// Stops when the largest per-vertex change drops below tol.
inline LaplaceReport laplace_fill(ParametricGrid& grid, const LaplaceOptions& opt = {}) {
    const auto [R0, R1, R2] = grid.resolution();
    double bmin = std::numeric_limits<double>::infinity(), bmax = -bmin;
    for (int a = 0; a < R0; ++a)
        for (int b = 0; b < R1; ++b)
            for (int c = 0; c < R2; ++c)
                if (grid.on_boundary(a, b, c)) {
                    bmin = std::min(bmin, grid.at(a, b, c));
                    bmax = std::max(bmax, grid.at(a, b, c));
                }
    const double tol = opt.tol >= 0.0 ? opt.tol : 1e-6 * (bmax - bmin);
    LaplaceReport rep;
    if (R0 < 3 || R1 < 3 || R2 < 3) {
        rep.converged = true;
        return rep;
    }
    if (bmax == bmin) {
        for (int a = 1; a + 1 < R0; ++a)
            for (int b = 1; b + 1 < R1; ++b)
                for (int c = 1; c + 1 < R2; ++c) grid.at(a, b, c) = bmin;
        rep.converged = true;
        return rep;
    }
    std::vector<double> cur(grid.values().begin(), grid.values().end());
    std::vector<double> next = cur;
    std::vector<double> slab_change(static_cast<std::size_t>(R0), 0.0);
    const std::size_t s0 = static_cast<std::size_t>(R1) * static_cast<std::size_t>(R2), s1 = static_cast<std::size_t>(R2);
    for (rep.iterations = 0; rep.iterations < opt.max_iters;) {
        parallel_for(1, R0 - 1, [&](std::ptrdiff_t aa) {
            const auto a = static_cast<std::size_t>(aa);
            double change = 0.0;
            for (std::size_t b = 1; b + 1 < static_cast<std::size_t>(R1); ++b)
                for (std::size_t c = 1; c + 1 < static_cast<std::size_t>(R2); ++c) {
                    const std::size_t i = a * s0 + b * s1 + c;
                    const double v = (cur[i - s0] + cur[i + s0] + cur[i - s1] + cur[i + s1] + cur[i - 1] + cur[i + 1]) / 6.0;
                    change = std::max(change, std::abs(v - cur[i]));
                    next[i] = v;
                }
            slab_change[a] = change;
        });
        std::swap(cur, next);
        ++rep.iterations;
        rep.last_change = *std::max_element(slab_change.begin(), slab_change.end());
        if (rep.last_change < tol) {
            rep.converged = true;
            break;
        }
    }
    std::copy(cur.begin(), cur.end(), grid.values().begin());
    return rep;
}

struct FillingResult {
    ParametricGrid grid;
    LaplaceReport laplace;
    int degenerate_samples = 0; // boundary vertices filled by neighbour averaging
};

/// Boundary vertices take the boundary-surface curvature of the solid (averaged
/// over the faces meeting at edge/corner vertices); the interior is filled by
/// Laplace smoothing.
inline FillingResult filling_method(const TrivariateBSplineSolid& solid, std::array<int, 3> resolution,
                                    CurvatureKind quantity, const LaplaceOptions& opt = {}) {
    FillingResult out{ParametricGrid(resolution, 0.0), {}, 0};
    ParametricGrid& g = out.grid;
    const auto [R0, R1, R2] = resolution;
    const std::size_t n = g.size();
    std::vector<char> known(n, 0);
    std::vector<GridIndex> boundary;
    for (int a = 0; a < R0; ++a)
        for (int b = 0; b < R1; ++b)
            for (int c = 0; c < R2; ++c)
                if (g.on_boundary(a, b, c)) boundary.push_back({a, b, c});

    std::vector<double> sample(boundary.size(), 0.0);
    std::vector<char> valid(boundary.size(), 0);
    parallel_for(0, static_cast<std::ptrdiff_t>(boundary.size()), [&](std::ptrdiff_t bi) {
        const auto& v = boundary[static_cast<std::size_t>(bi)];
        const auto t = g.parameters(v[0], v[1], v[2]);
        double sum = 0.0;
        int count = 0;
        for (Face f : kAllFaces) {
            const FaceFrame fr = face_frame(f);
            const int fixed_index = fr.fixed_value == 0.0 ? 0 : resolution[static_cast<std::size_t>(fr.normal_axis)] - 1;
            if (v[static_cast<std::size_t>(fr.normal_axis)] != fixed_index) continue;
            try {
                sum += boundary_curvature(solid, f, t[static_cast<std::size_t>(fr.s_axis)],
                                          t[static_cast<std::size_t>(fr.t_axis)], quantity);
                ++count;
            } catch (const DegenerateGeometry&) {
            }
        }
        if (count > 0) {
            sample[static_cast<std::size_t>(bi)] = sum / count;
            valid[static_cast<std::size_t>(bi)] = 1;
        }
    });
    int good = 0;
    for (std::size_t bi = 0; bi < boundary.size(); ++bi) {
        const auto& v = boundary[bi];
        if (valid[bi]) {
            g.at(v[0], v[1], v[2]) = sample[bi];
            known[g.index(v[0], v[1], v[2])] = 1;
            ++good;
        } else {
            ++out.degenerate_samples;
        }
    }
    if (good == 0) throw DegenerateGeometry("no non-degenerate boundary curvature sample");

    // Degenerate samples: repeatedly average the already-known boundary neighbours.
    static constexpr std::array<GridIndex, 6> kNbr{{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
    for (int pending = out.degenerate_samples; pending > 0;) {
        std::vector<std::pair<std::size_t, double>> updates;
        for (const auto& v : boundary) {
            if (known[g.index(v[0], v[1], v[2])]) continue;
            double sum = 0.0;
            int count = 0;
            for (const auto& d : kNbr) {
                const GridIndex w{v[0] + d[0], v[1] + d[1], v[2] + d[2]};
                if (!g.contains(w) || !g.on_boundary(w[0], w[1], w[2])) continue;
                if (!known[g.index(w[0], w[1], w[2])]) continue;
                sum += g.at(w[0], w[1], w[2]);
                ++count;
            }
            if (count > 0) updates.emplace_back(g.index(v[0], v[1], v[2]), sum / count);
        }
        if (updates.empty()) throw DegenerateGeometry("degenerate boundary samples could not be filled");
        for (const auto& [i, val] : updates) {
            g.values()[i] = val;
            known[i] = 1;
        }
        pending -= static_cast<int>(updates.size());
    }
    out.laplace = laplace_fill(g, opt);
    return out;
}

// ---------------------------------------------------------------------------
// Layer and prescribed-function methods

enum class LayerMode { AxisU, AxisV, AxisW, Sides };

inline int layer_count(const std::array<int, 3>& res, LayerMode mode) {
    switch (mode) {
    case LayerMode::AxisU: return res[0];
    case LayerMode::AxisV: return res[1];
    case LayerMode::AxisW: return res[2];
    case LayerMode::Sides: return (std::min(res[0], res[1]) + 1) / 2;
    }
    return 0;
}

/// Layer index of a vertex. Sides: Chebyshev grid distance to the four side
/// faces u=0, u=1, v=0, v=1 (the side faces themselves are layer 0).
inline int layer_of(const std::array<int, 3>& res, LayerMode mode, int a, int b, int c) {
    switch (mode) {
    case LayerMode::AxisU: return a;
    case LayerMode::AxisV: return b;
    case LayerMode::AxisW: return c;
    case LayerMode::Sides: return std::min({a, res[0] - 1 - a, b, res[1] - 1 - b});
    }
    return 0;
}

inline ParametricGrid layer_method(std::array<int, 3> resolution, LayerMode mode, std::span<const double> layer_values) {
    ParametricGrid g(resolution);
    const int expected = layer_count(resolution, mode);
    if (static_cast<int>(layer_values.size()) != expected)
        throw InvalidArgument("layer method expects " + std::to_string(expected) + " layer values, got " +
                              std::to_string(layer_values.size()));
    for (int a = 0; a < resolution[0]; ++a)
        for (int b = 0; b < resolution[1]; ++b)
            for (int c = 0; c < resolution[2]; ++c)
                g.at(a, b, c) = layer_values[static_cast<std::size_t>(layer_of(resolution, mode, a, b, c))];
    return g;
}

using GridFunction = std::function<double(double, double, double)>;

inline ParametricGrid prescribed_function(std::array<int, 3> resolution, const GridFunction& fn) {
    ParametricGrid g(resolution);
    for (int a = 0; a < resolution[0]; ++a)
        for (int b = 0; b < resolution[1]; ++b)
            for (int c = 0; c < resolution[2]; ++c) {
                const auto t = g.parameters(a, b, c);
                const double v = fn(t[0], t[1], t[2]);
                if (!std::isfinite(v))
                    throw InvalidArgument("prescribed function is not finite at vertex (" + std::to_string(a) + ", " +
                                          std::to_string(b) + ", " + std::to_string(c) + ")");
                g.at(a, b, c) = v;
            }
    return g;
}

/// |u-v| + |v-w| + |u-w|
inline double symmetric_difference_function(double u, double v, double w) {
    return std::abs(u - v) + std::abs(v - w) + std::abs(u - w);
}

// ---------------------------------------------------------------------------
// Normalization

/// Affine map of [min, max] of the grid onto the target interval (default: the
/// full valid range of the type). A constant grid maps to the interval midpoint.
inline ParametricGrid normalize_to_range(const ParametricGrid& grid, TpmsType type,
                                         std::optional<ThresholdRange> sub_interval = std::nullopt) {
    const ThresholdRange valid = valid_range(type);
    ThresholdRange target = valid;
    if (sub_interval) {
        if (!(sub_interval->lo <= sub_interval->hi) || !valid.contains(sub_interval->lo) || !valid.contains(sub_interval->hi))
            throw InvalidArgument("target interval [" + std::to_string(sub_interval->lo) + ", " +
                                  std::to_string(sub_interval->hi) + "] is not inside the valid range of type " +
                                  std::string(to_string(type)));
        target = *sub_interval;
    }
    ParametricGrid out = grid;
    const double lo = grid.min_value(), hi = grid.max_value();
    if (!(hi > lo)) {
        std::fill(out.values().begin(), out.values().end(), target.mid());
        return out;
    }
    for (double& v : out.values()) {
        const double t = (v - lo) / (hi - lo);
        v = std::clamp((1.0 - t) * target.lo + t * target.hi, target.lo, target.hi);
    }
    return out;
}

// ---------------------------------------------------------------------------
// LSPIA fitting

struct LspiaOptions {
    std::array<int, 3> control_resolution{20, 20, 20};
    double tol = -1.0; // absolute; negative selects 1e-4 x value range
    int max_iters = 200;
};

struct LspiaResult {
    TrivariateScalarField field;
    int iterations = 0;                  // coefficient updates performed
    std::vector<double> residual_history;    // max |delta| before each update, plus the final one
    std::vector<double> residual_l2_history; // sum of delta^2 at the same points
    bool converged = false;

    double final_residual() const { return residual_history.back(); }
};

namespace detail {

struct LspiaSystem {
    std::array<KnotVector, 3> knots;
    std::array<SparseRows, 3> collocation; // grid vertex -> coefficient
    std::array<SparseRows, 3> transposed;
    std::vector<double> weight; // sum over grid vertices of the basis product, per coefficient
};

inline LspiaSystem make_lspia_system(const std::array<int, 3>& grid_res, const std::array<int, 3>& ctrl) {
    LspiaSystem s;
    std::array<std::vector<double>, 3> axis_weight;
    for (std::size_t d = 0; d < 3; ++d) {
        if (ctrl[d] < 4) throw InvalidArgument("cubic TDF needs at least 4 control coefficients per direction");
        if (ctrl[d] > grid_res[d])
            throw InvalidArgument("control resolution exceeds parametric grid resolution in direction " + std::to_string(d));
        s.knots[d] = KnotVector::uniform_clamped(ctrl[d], 3);
        const auto params = grid_parameters(grid_res[d]);
        s.collocation[d] = collocation_matrix(s.knots[d], params);
        s.transposed[d] = s.collocation[d].transposed();
        axis_weight[d] = s.transposed[d].row_sums();
    }
    s.weight.resize(static_cast<std::size_t>(ctrl[0]) * static_cast<std::size_t>(ctrl[1]) * static_cast<std::size_t>(ctrl[2]));
    std::size_t n = 0;
    for (double wu : axis_weight[0])
        for (double wv : axis_weight[1])
            for (double ww : axis_weight[2]) {
                const double wgt = wu * wv * ww;
                if (!(wgt > 0.0)) throw InvalidArgument("control coefficient " + std::to_string(n) + " receives zero total weight");
                s.weight[n++] = wgt;
            }
    return s;
}

inline std::vector<double> contract(const std::array<SparseRows, 3>& m, std::vector<double> cur, std::array<int, 3> dims) {
    for (int axis = 2; axis >= 0; --axis) {
        cur = apply_along_axis<double>(m[static_cast<std::size_t>(axis)], cur, dims, axis);
        dims[static_cast<std::size_t>(axis)] = m[static_cast<std::size_t>(axis)].row_count();
    }
    return cur;
}

} // namespace detail

/// Fits the discrete TDF with a cubic trivariate B-spline on uniform clamped
/// knots. Each iteration computes the residual at every grid vertex, gives each
/// coefficient the basis-weighted average of the residuals in its support, and
/// adds it. Starts from trilinear interpolation of the grid at the Greville
/// parameters of the coefficients.
inline LspiaResult lspia_fit(const ParametricGrid& grid, const LspiaOptions& opt = {}) {
    const auto& res = grid.resolution();
    const auto& ctrl = opt.control_resolution;
    auto sys = detail::make_lspia_system(res, ctrl);

    std::vector<double> coeff;
    coeff.reserve(sys.weight.size());
    for (int i = 0; i < ctrl[0]; ++i)
        for (int j = 0; j < ctrl[1]; ++j)
            for (int k = 0; k < ctrl[2]; ++k)
                coeff.push_back(grid.interpolate(sys.knots[0].greville(i), sys.knots[1].greville(j), sys.knots[2].greville(k)));

    const double range = grid.max_value() - grid.min_value();
    const double tol = opt.tol >= 0.0 ? opt.tol : range > 0.0 ? 1e-4 * range : 1e-12 * std::max(1.0, std::abs(grid.max_value()));
    const std::span<const double> target = grid.values();

    LspiaResult out;
    std::vector<double> delta(grid.size());
    for (;;) {
        const auto fitted = detail::contract(sys.collocation, coeff, ctrl);
        double max_delta = 0.0, sum_sq = 0.0;
        for (std::size_t n = 0; n < delta.size(); ++n) {
            delta[n] = target[n] - fitted[n];
            max_delta = std::max(max_delta, std::abs(delta[n]));
            sum_sq += delta[n] * delta[n];
        }
        out.residual_history.push_back(max_delta);
        out.residual_l2_history.push_back(sum_sq);
        if (max_delta <= tol) {
            out.converged = true;
            break;
        }
        if (out.iterations >= opt.max_iters) break;
        const auto distributed = detail::contract(sys.transposed, delta, res);
        for (std::size_t n = 0; n < coeff.size(); ++n) coeff[n] += distributed[n] / sys.weight[n];
        ++out.iterations;
    }
    out.field = TrivariateScalarField(sys.knots, std::move(coeff));
    return out;
}

// ---------------------------------------------------------------------------
// Local modification

struct LocalModifyOptions {
    double tol = 1e-6;
    int max_iters = 200;
    std::optional<ThresholdRange> clamp_range; // edit targets are clamped into this range when set
};

struct LocalModifyResult {
    TrivariateScalarField field;
    int iterations = 0;
    std::vector<double> residual_history; // max |delta| over edited vertices
    int clamped_edits = 0;
    std::vector<std::size_t> touched; // indices of coefficients that may have changed, ascending
};

/// Refits only near edited vertices: residuals are computed at the edited
/// vertices alone and distributed to the coefficients whose basis product is
/// non-zero there. Every other coefficient is left bit-identical.
inline LocalModifyResult lspia_local_modify(const TrivariateScalarField& field, const std::array<int, 3>& grid_res,
                                            const EditSet& edits, const LocalModifyOptions& opt = {}) {
    LocalModifyResult out{field, 0, {}, 0, {}};
    if (edits.empty()) return out;
    const ParametricGrid shape(grid_res, 0.0);

    // Later edits of the same vertex override earlier ones.
    std::map<std::size_t, Edit> unique;
    for (const Edit& e : edits) {
        if (!shape.contains(e.vertex))
            throw InvalidArgument("edit vertex (" + std::to_string(e.vertex[0]) + ", " + std::to_string(e.vertex[1]) + ", " +
                                  std::to_string(e.vertex[2]) + ") outside grid");
        if (!std::isfinite(e.value)) throw InvalidArgument("edit value is not finite");
        Edit c = e;
        if (opt.clamp_range) {
            const double v = std::clamp(c.value, opt.clamp_range->lo, opt.clamp_range->hi);
            if (v != c.value) ++out.clamped_edits;
            c.value = v;
        }
        unique[shape.index(e.vertex[0], e.vertex[1], e.vertex[2])] = c;
    }

    struct Support {
        std::array<double, 3> t;
        double target;
        std::array<int, 3> first;
        std::array<BasisArray, 3> basis;
    };
    std::vector<Support> sup;
    std::map<std::size_t, std::pair<double, double>> accum; // coefficient -> (numerator, denominator)
    for (const auto& [key, e] : unique) {
        Support s{shape.parameters(e.vertex[0], e.vertex[1], e.vertex[2]), e.value, {}, {}};
        for (std::size_t d = 0; d < 3; ++d) {
            const KnotVector& kv = field.knots(static_cast<int>(d));
            const int span = kv.find_span(s.t[d]);
            s.first[d] = span - kv.degree();
            s.basis[d] = kv.basis(span, s.t[d]);
        }
        sup.push_back(s);
    }
    const auto deg = field.degrees();
    auto for_support = [&](const Support& s, auto&& fn) {
        for (int i = 0; i <= deg[0]; ++i)
            for (int j = 0; j <= deg[1]; ++j)
                for (int k = 0; k <= deg[2]; ++k) {
                    const double w = s.basis[0][static_cast<std::size_t>(i)] * s.basis[1][static_cast<std::size_t>(j)] *
                                     s.basis[2][static_cast<std::size_t>(k)];
                    if (w != 0.0) fn(field.index(s.first[0] + i, s.first[1] + j, s.first[2] + k), w);
                }
    };
    for (const auto& s : sup) for_support(s, [&](std::size_t idx, double) { accum[idx]; });
    for (const auto& kv : accum) out.touched.push_back(kv.first);

    std::vector<double> coeff(field.coefficients().begin(), field.coefficients().end());
    for (;;) {
        double max_delta = 0.0;
        for (auto& [idx, nd] : accum) nd = {0.0, 0.0};
        for (const auto& s : sup) {
            double value = 0.0;
            for_support(s, [&](std::size_t idx, double w) { value += coeff[idx] * w; });
            const double delta = s.target - value;
            max_delta = std::max(max_delta, std::abs(delta));
            for_support(s, [&](std::size_t idx, double w) {
                auto& nd = accum[idx];
                nd.first += w * delta;
                nd.second += w;
            });
        }
        out.residual_history.push_back(max_delta);
        if (max_delta <= opt.tol || out.iterations >= opt.max_iters) break;
        for (const auto& [idx, nd] : accum) coeff[idx] += nd.first / nd.second;
        ++out.iterations;
    }
    out.field = field.with_coefficients(std::move(coeff));
    return out;
}

} // namespace tpms_scaffold
