#pragma once

// Tensor-product B-spline volumes over the unit parameter cube.
//
// A TensorBSpline<T> is a trivariate B-spline with coefficients of type T:
// Vec3 control points give the geometry map of a solid, scalar coefficients
// give the threshold field. Knot vectors are clamped and normalized to [0,1]
// at construction; coefficients are stored (i, j, k) lexicographically with
// k varying fastest.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "vec3.hpp"

namespace tpms_scaffold {

inline constexpr int kMaxDegree = 5;
inline constexpr double kParamSlack = 1e-12;

using BasisArray = std::array<double, kMaxDegree + 1>;

class KnotVector {
public:
    KnotVector() = default;

    KnotVector(std::vector<double> knots, int degree) : knots_(std::move(knots)), degree_(degree) {
        if (degree_ < 0 || degree_ > kMaxDegree)
            throw InvalidArgument("unsupported B-spline degree " + std::to_string(degree_));
        const auto p = static_cast<std::size_t>(degree_);
        if (knots_.size() < 2 * (p + 1))
            throw InvalidArgument("knot vector of degree " + std::to_string(degree_) + " needs at least " +
                                  std::to_string(2 * (p + 1)) + " knots, got " + std::to_string(knots_.size()));
        for (std::size_t i = 1; i < knots_.size(); ++i) {
            if (!std::isfinite(knots_[i]) || !(knots_[i] >= knots_[i - 1]))
                throw InvalidArgument("knot vector is not non-decreasing at position " + std::to_string(i));
        }
        for (std::size_t i = 1; i <= p; ++i) {
            if (knots_[i] != knots_[0] || knots_[knots_.size() - 1 - i] != knots_.back())
                throw InvalidArgument("knot vector is not clamped (end multiplicity must be degree+1)");
        }
        if (!(knots_.back() > knots_.front())) throw InvalidArgument("knot vector has an empty parameter range");
    }

    /// Uniform interior knots with (degree+1)-fold end knots on [0,1].
    static KnotVector uniform_clamped(int control_count, int degree) {
        if (control_count < degree + 1)
            throw InvalidArgument("need at least degree+1 control points for a clamped knot vector");
        const int segments = control_count - degree;
        std::vector<double> k;
        k.reserve(static_cast<std::size_t>(control_count + degree + 1));
        for (int i = 0; i <= degree; ++i) k.push_back(0.0);
        for (int i = 1; i < segments; ++i) k.push_back(static_cast<double>(i) / segments);
        for (int i = 0; i <= degree; ++i) k.push_back(1.0);
        return KnotVector(std::move(k), degree);
    }

    int degree() const noexcept { return degree_; }
    std::size_t size() const noexcept { return knots_.size(); }
    int control_count() const noexcept { return static_cast<int>(knots_.size()) - degree_ - 1; }
    const std::vector<double>& knots() const noexcept { return knots_; }
    double operator[](std::size_t i) const { return knots_[i]; }
    double front() const { return knots_.front(); }
    double back() const { return knots_.back(); }

    KnotVector normalized() const {
        const double a = front();
        const double len = back() - a;
        std::vector<double> k(knots_.size());
        for (std::size_t i = 0; i < k.size(); ++i) k[i] = (knots_[i] - a) / len;
        // Exact ends regardless of rounding.
        for (int i = 0; i <= degree_; ++i) {
            k[static_cast<std::size_t>(i)] = 0.0;
            k[k.size() - 1 - static_cast<std::size_t>(i)] = 1.0;
        }
        return KnotVector(std::move(k), degree_);
    }

    /// Checks u against the knot range, snapping values within kParamSlack of an end.
    double checked_parameter(double u) const {
        if (!(u >= front() - kParamSlack && u <= back() + kParamSlack))
            throw DomainError("parameter " + std::to_string(u) + " outside knot range [" + std::to_string(front()) +
                              ", " + std::to_string(back()) + "]");
        return std::clamp(u, front(), back());
    }

    /// Index of the knot span [u_s, u_{s+1}) containing u; u == back() maps to the last non-empty span.
    int find_span(double u) const {
        const int n = control_count() - 1;
        if (u >= knots_[static_cast<std::size_t>(n + 1)]) return n;
        if (u <= knots_[static_cast<std::size_t>(degree_)]) return degree_;
        const auto first = knots_.begin() + degree_;
        const auto last = knots_.begin() + n + 1;
        const auto it = std::upper_bound(first, last, u);
        return static_cast<int>(it - knots_.begin()) - 1;
    }

    /// The degree+1 non-zero basis values N_{span-p..span,p}(u).
    BasisArray basis(int span, double u) const {
        BasisArray out{};
        // Exact end interpolation; the recurrence below may be off by an ulp there.
        if (u <= knots_.front()) {
            out[0] = 1.0;
            return out;
        }
        if (u >= knots_.back()) {
            out[static_cast<std::size_t>(degree_)] = 1.0;
            return out;
        }
        std::array<double, kMaxDegree + 1> left{}, right{};
        out[0] = 1.0;
        for (int j = 1; j <= degree_; ++j) {
            left[static_cast<std::size_t>(j)] = u - knots_[static_cast<std::size_t>(span + 1 - j)];
            right[static_cast<std::size_t>(j)] = knots_[static_cast<std::size_t>(span + j)] - u;
            double saved = 0.0;
            for (int r = 0; r < j; ++r) {
                const double denom = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
                const double tmp = out[static_cast<std::size_t>(r)] / denom;
                out[static_cast<std::size_t>(r)] = saved + right[static_cast<std::size_t>(r + 1)] * tmp;
                saved = left[static_cast<std::size_t>(j - r)] * tmp;
            }
            out[static_cast<std::size_t>(j)] = saved;
        }
        return out;
    }

    /// Basis values and derivatives up to order `order` (<= 2) on the span: result[d][r].
    std::array<BasisArray, 3> basis_derivatives(int span, double u, int order) const {
        const int p = degree_;
        const auto P = static_cast<std::size_t>(p);
        std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1> ndu{};
        std::array<double, kMaxDegree + 1> left{}, right{};
        ndu[0][0] = 1.0;
        for (std::size_t j = 1; j <= P; ++j) {
            left[j] = u - knots_[static_cast<std::size_t>(span) + 1 - j];
            right[j] = knots_[static_cast<std::size_t>(span) + j] - u;
            double saved = 0.0;
            for (std::size_t r = 0; r < j; ++r) {
                ndu[j][r] = right[r + 1] + left[j - r];
                const double tmp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * tmp;
                saved = left[j - r] * tmp;
            }
            ndu[j][j] = saved;
        }
        std::array<BasisArray, 3> ders{};
        for (std::size_t j = 0; j <= P; ++j) ders[0][j] = ndu[j][P];
        const int n = std::min(order, p);
        std::array<std::array<double, kMaxDegree + 1>, 2> a{};
        for (int r = 0; r <= p; ++r) {
            std::size_t s1 = 0, s2 = 1;
            a[0][0] = 1.0;
            for (int k = 1; k <= n; ++k) {
                double d = 0.0;
                const int rk = r - k, pk = p - k;
                if (r >= k) {
                    a[s2][0] = a[s1][0] / ndu[static_cast<std::size_t>(pk + 1)][static_cast<std::size_t>(rk)];
                    d = a[s2][0] * ndu[static_cast<std::size_t>(rk)][static_cast<std::size_t>(pk)];
                }
                const int j1 = rk >= -1 ? 1 : -rk;
                const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
                for (int j = j1; j <= j2; ++j) {
                    const auto J = static_cast<std::size_t>(j);
                    a[s2][J] = (a[s1][J] - a[s1][J - 1]) /
                               ndu[static_cast<std::size_t>(pk + 1)][static_cast<std::size_t>(rk + j)];
                    d += a[s2][J] * ndu[static_cast<std::size_t>(rk + j)][static_cast<std::size_t>(pk)];
                }
                if (r <= pk) {
                    a[s2][static_cast<std::size_t>(k)] =
                        -a[s1][static_cast<std::size_t>(k - 1)] / ndu[static_cast<std::size_t>(pk + 1)][static_cast<std::size_t>(r)];
                    d += a[s2][static_cast<std::size_t>(k)] * ndu[static_cast<std::size_t>(r)][static_cast<std::size_t>(pk)];
                }
                ders[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] = d;
                std::swap(s1, s2);
            }
        }
        double factor = p;
        for (int k = 1; k <= n; ++k) {
            for (std::size_t j = 0; j <= P; ++j) ders[static_cast<std::size_t>(k)][j] *= factor;
            factor *= (p - k);
        }
        return ders;
    }

    /// Average of the degree knots following knot i: the natural parameter of coefficient i.
    double greville(int i) const {
        if (i < 0 || i >= control_count()) throw InvalidArgument("greville index out of range");
        if (degree_ == 0) return 0.5 * (knots_[static_cast<std::size_t>(i)] + knots_[static_cast<std::size_t>(i + 1)]);
        double s = 0.0;
        for (int j = 1; j <= degree_; ++j) s += knots_[static_cast<std::size_t>(i + j)];
        return s / degree_;
    }

    friend bool operator==(const KnotVector&, const KnotVector&) = default;

private:
    std::vector<double> knots_;
    int degree_ = 0;
};

namespace detail {

inline double cox_de_boor(const std::vector<double>& k, int i, int p, double u, int last_span) {
    const auto I = static_cast<std::size_t>(i);
    if (p == 0) {
        if (k[I] <= u && u < k[I + 1]) return 1.0;
        // Closed right end: u == last knot belongs to the last non-empty span.
        return (i == last_span && u == k[I + 1]) ? 1.0 : 0.0;
    }
    const auto P = static_cast<std::size_t>(p);
    double value = 0.0;
    const double d1 = k[I + P] - k[I];
    if (d1 != 0.0) value += (u - k[I]) / d1 * cox_de_boor(k, i, p - 1, u, last_span);
    const double d2 = k[I + P + 1] - k[I + 1];
    if (d2 != 0.0) value += (k[I + P + 1] - u) / d2 * cox_de_boor(k, i + 1, p - 1, u, last_span);
    return value;
}

} // namespace detail

/// N_{i,p}(u) by the Cox-de Boor recursion (0/0 := 0), p = kv.degree().
inline double basis_value(const KnotVector& kv, int i, double u) {
    if (i < 0 || i >= kv.control_count())
        throw InvalidArgument("basis index " + std::to_string(i) + " out of range [0, " +
                              std::to_string(kv.control_count() - 1) + "]");
    if (!(u >= kv.front() && u <= kv.back()))
        throw DomainError("parameter " + std::to_string(u) + " outside knot span");
    const int last_span = kv.find_span(kv.back());
    return detail::cox_de_boor(kv.knots(), i, kv.degree(), u, last_span);
}

/// Trivariate tensor-product B-spline with coefficients of type T.
template <class T>
class TensorBSpline {
public:
    TensorBSpline() = default;

    TensorBSpline(std::array<KnotVector, 3> knots, std::vector<T> coefficients)
        : coefficients_(std::move(coefficients)) {
        std::size_t expected = 1;
        for (std::size_t d = 0; d < 3; ++d) {
            knots_[d] = knots[d].normalized();
            dims_[d] = knots_[d].control_count();
            expected *= static_cast<std::size_t>(dims_[d]);
        }
        if (coefficients_.size() != expected)
            throw InvalidArgument("coefficient count " + std::to_string(coefficients_.size()) +
                                  " does not match knot vectors (" + std::to_string(dims_[0]) + "x" +
                                  std::to_string(dims_[1]) + "x" + std::to_string(dims_[2]) + ")");
    }

    const std::array<int, 3>& dims() const noexcept { return dims_; }
    const KnotVector& knots(int axis) const { return knots_[static_cast<std::size_t>(axis)]; }
    const std::array<KnotVector, 3>& knot_vectors() const noexcept { return knots_; }
    std::array<int, 3> degrees() const { return {knots_[0].degree(), knots_[1].degree(), knots_[2].degree()}; }

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * static_cast<std::size_t>(dims_[1]) + static_cast<std::size_t>(j)) *
                   static_cast<std::size_t>(dims_[2]) +
               static_cast<std::size_t>(k);
    }
    const T& coefficient(int i, int j, int k) const { return coefficients_[index(i, j, k)]; }
    std::span<const T> coefficients() const noexcept { return coefficients_; }

    TensorBSpline with_coefficients(std::vector<T> c) const { return TensorBSpline(knots_, std::move(c)); }

    T evaluate(double u, double v, double w) const { return derivative(u, v, w, 0, 0, 0); }

    /// Partial derivative d^(a+b+c) / du^a dv^b dw^c, each order <= 2.
    T derivative(double u, double v, double w, int a, int b, int c) const {
        const std::array<double, 3> t{knots_[0].checked_parameter(u), knots_[1].checked_parameter(v),
                                      knots_[2].checked_parameter(w)};
        const std::array<int, 3> order{a, b, c};
        std::array<int, 3> span{};
        std::array<BasisArray, 3> basis{};
        for (std::size_t d = 0; d < 3; ++d) {
            span[d] = knots_[d].find_span(t[d]);
            if (order[d] == 0) {
                basis[d] = knots_[d].basis(span[d], t[d]);
            } else if (order[d] > knots_[d].degree()) {
                return T{};
            } else {
                basis[d] = knots_[d].basis_derivatives(span[d], t[d], order[d])[static_cast<std::size_t>(order[d])];
            }
        }
        const int p = knots_[0].degree(), q = knots_[1].degree(), r = knots_[2].degree();
        T acc{};
        for (int i = 0; i <= p; ++i) {
            const double bu = basis[0][static_cast<std::size_t>(i)];
            if (bu == 0.0) continue;
            for (int j = 0; j <= q; ++j) {
                const double buv = bu * basis[1][static_cast<std::size_t>(j)];
                if (buv == 0.0) continue;
                const std::size_t row = index(span[0] - p + i, span[1] - q + j, span[2] - r);
                for (int k = 0; k <= r; ++k)
                    acc += coefficients_[row + static_cast<std::size_t>(k)] * (buv * basis[2][static_cast<std::size_t>(k)]);
            }
        }
        return acc;
    }

    friend bool operator==(const TensorBSpline&, const TensorBSpline&) = default;

private:
    std::array<KnotVector, 3> knots_{};
    std::array<int, 3> dims_{};
    std::vector<T> coefficients_;
};

using TrivariateBSplineSolid = TensorBSpline<Vec3>;
using TrivariateScalarField = TensorBSpline<double>;

inline Vec3 eval_solid(const TrivariateBSplineSolid& solid, double u, double v, double w) {
    return solid.evaluate(u, v, w);
}

inline double eval_scalar(const TrivariateScalarField& field, double u, double v, double w) {
    return field.evaluate(u, v, w);
}

/// Columns are dP/du, dP/dv, dP/dw.
inline std::array<Vec3, 3> jacobian(const TrivariateBSplineSolid& solid, double u, double v, double w) {
    return {solid.derivative(u, v, w, 1, 0, 0), solid.derivative(u, v, w, 0, 1, 0), solid.derivative(u, v, w, 0, 0, 1)};
}

inline double jacobian_det(const TrivariateBSplineSolid& solid, double u, double v, double w) {
    const auto J = jacobian(solid, u, v, w);
    return det3(J[0], J[1], J[2]);
}

/// Solid with control points at the Greville abscissae; reproduces P(u,v,w) = (u,v,w).
inline TrivariateBSplineSolid identity_solid(std::array<int, 3> control_counts, int degree = 3) {
    std::array<KnotVector, 3> kv{KnotVector::uniform_clamped(control_counts[0], degree),
                                 KnotVector::uniform_clamped(control_counts[1], degree),
                                 KnotVector::uniform_clamped(control_counts[2], degree)};
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(control_counts[0] * control_counts[1] * control_counts[2]));
    for (int i = 0; i < control_counts[0]; ++i)
        for (int j = 0; j < control_counts[1]; ++j)
            for (int k = 0; k < control_counts[2]; ++k)
                pts.emplace_back(kv[0].greville(i), kv[1].greville(j), kv[2].greville(k));
    return TrivariateBSplineSolid(std::move(kv), std::move(pts));
}

// ---------------------------------------------------------------------------
// Boundary surfaces

enum class Face { UMin, UMax, VMin, VMax, WMin, WMax };
enum class CurvatureKind { Mean, Gauss };

inline constexpr std::array<Face, 6> kAllFaces{Face::UMin, Face::UMax, Face::VMin, Face::VMax, Face::WMin, Face::WMax};

struct FaceFrame {
    int normal_axis;        // parameter fixed on the face
    double fixed_value;     // 0 or 1
    int s_axis, t_axis;     // face parameters (s, t) in increasing axis order
    double outward_sign;    // sign making (dP/ds x dP/dt) outward for a positive-Jacobian solid
};

constexpr FaceFrame face_frame(Face f) {
    switch (f) {
    case Face::UMin: return {0, 0.0, 1, 2, -1.0};
    case Face::UMax: return {0, 1.0, 1, 2, +1.0};
    case Face::VMin: return {1, 0.0, 0, 2, +1.0};
    case Face::VMax: return {1, 1.0, 0, 2, -1.0};
    case Face::WMin: return {2, 0.0, 0, 1, -1.0};
    case Face::WMax: return {2, 1.0, 0, 1, +1.0};
    }
    return {0, 0.0, 1, 2, 1.0};
}

/// Curvature of a boundary surface of the solid at face parameters (s, t).
/// The normal is oriented outward (assuming positive Jacobian) and mean
/// curvature is positive where the solid is locally convex, e.g. +1/r on a sphere.
inline double boundary_curvature(const TrivariateBSplineSolid& solid, Face face, double s, double t, CurvatureKind kind) {
    if (!(s >= -kParamSlack && s <= 1 + kParamSlack && t >= -kParamSlack && t <= 1 + kParamSlack))
        throw DomainError("face parameter outside [0,1]^2");
    const FaceFrame fr = face_frame(face);
    std::array<double, 3> uvw{};
    uvw[static_cast<std::size_t>(fr.normal_axis)] = fr.fixed_value;
    uvw[static_cast<std::size_t>(fr.s_axis)] = std::clamp(s, 0.0, 1.0);
    uvw[static_cast<std::size_t>(fr.t_axis)] = std::clamp(t, 0.0, 1.0);
    auto der = [&](int ds, int dt) {
        std::array<int, 3> o{};
        o[static_cast<std::size_t>(fr.s_axis)] = ds;
        o[static_cast<std::size_t>(fr.t_axis)] = dt;
        return solid.derivative(uvw[0], uvw[1], uvw[2], o[0], o[1], o[2]);
    };
    const Vec3 Ss = der(1, 0), St = der(0, 1);
    const Vec3 Sss = der(2, 0), Sst = der(1, 1), Stt = der(0, 2);
    const Vec3 nraw = cross(Ss, St);
    const double nlen = norm(nraw);
    if (!(nlen > 1e-12 * norm(Ss) * norm(St)) || nlen == 0.0)
        throw DegenerateGeometry("boundary surface normal vanishes at (" + std::to_string(s) + ", " + std::to_string(t) + ")");
    const Vec3 n = nraw * (fr.outward_sign / nlen);
    const double E = dot(Ss, Ss), F = dot(Ss, St), G = dot(St, St);
    const double L = dot(Sss, n), M = dot(Sst, n), N = dot(Stt, n);
    const double area2 = E * G - F * F;
    if (kind == CurvatureKind::Gauss) return (L * N - M * M) / area2;
    return -(E * N - 2.0 * F * M + G * L) / (2.0 * area2);
}

} // namespace tpms_scaffold
