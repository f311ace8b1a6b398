#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "bspline.hpp"
#include "error.hpp"

namespace tpms_scaffold {

enum class TpmsType { P, D, G, IWP };

inline constexpr std::array<TpmsType, 4> kAllTpmsTypes{TpmsType::P, TpmsType::D, TpmsType::G, TpmsType::IWP};

struct ThresholdRange {
    double lo;
    double hi;
    constexpr double mid() const { return 0.5 * (lo + hi); }
    constexpr bool contains(double c) const { return c >= lo && c <= hi; }
};

/// Interval of thresholds for which the nodal surface stays complete.
constexpr ThresholdRange valid_range(TpmsType t) {
    switch (t) {
    case TpmsType::P: return {-0.8, 0.8};
    case TpmsType::D: return {-0.6, 0.6};
    case TpmsType::G: return {-0.8, 0.8};
    case TpmsType::IWP: return {-2.0, 2.0};
    }
    return {0.0, 0.0};
}

inline std::string_view to_string(TpmsType t) {
    switch (t) {
    case TpmsType::P: return "P";
    case TpmsType::D: return "D";
    case TpmsType::G: return "G";
    case TpmsType::IWP: return "IWP";
    }
    return "?";
}

inline std::optional<TpmsType> parse_tpms_type(std::string_view s) {
    if (s == "P" || s == "p") return TpmsType::P;
    if (s == "D" || s == "d") return TpmsType::D;
    if (s == "G" || s == "g") return TpmsType::G;
    if (s == "IWP" || s == "iwp" || s == "I-WP" || s == "i-wp") return TpmsType::IWP;
    return std::nullopt;
}

/// Angular frequencies (omega_x, omega_y, omega_z) applied to the parameters.
struct PeriodCoefficients {
    double x = 2 * std::numbers::pi;
    double y = 2 * std::numbers::pi;
    double z = 2 * std::numbers::pi;

    PeriodCoefficients() = default;
    PeriodCoefficients(double wx, double wy, double wz) : x(wx), y(wy), z(wz) {
        if (!(wx > 0 && wy > 0 && wz > 0) || !std::isfinite(wx) || !std::isfinite(wy) || !std::isfinite(wz))
            throw InvalidArgument("period coefficients must be finite and strictly positive");
    }

    /// k cells per unit parameter: omega = 2 pi k.
    static PeriodCoefficients from_cells(double kx, double ky, double kz) {
        constexpr double tau = 2 * std::numbers::pi;
        return {tau * kx, tau * ky, tau * kz};
    }

    friend bool operator==(const PeriodCoefficients&, const PeriodCoefficients&) = default;
};

enum class StructureKind { Pore, Rod, Sheet };

inline std::optional<StructureKind> parse_structure(std::string_view s) {
    if (s == "pore") return StructureKind::Pore;
    if (s == "rod") return StructureKind::Rod;
    if (s == "sheet") return StructureKind::Sheet;
    return std::nullopt;
}

inline std::string_view to_string(StructureKind k) {
    switch (k) {
    case StructureKind::Pore: return "pore";
    case StructureKind::Rod: return "rod";
    case StructureKind::Sheet: return "sheet";
    }
    return "?";
}

inline constexpr double kDefaultSheetThickness = 0.3;

struct ImplicitFieldSpec {
    TpmsType tpms = TpmsType::P;
    PeriodCoefficients periods{};
    StructureKind structure = StructureKind::Pore;
    double epsilon = kDefaultSheetThickness; // sheet thickness in field units; ignored for pore/rod

    void validate() const {
        if (structure == StructureKind::Sheet && !(epsilon > 0.0 && std::isfinite(epsilon)))
            throw InvalidArgument("sheet thickness epsilon must be positive");
    }
};

/// Per-axis trigonometric terms; psi only combines them, so grid sampling can
/// precompute them per axis and still agree bit-for-bit with pointwise evaluation.
struct AxisTrig {
    double c, s, c2;
};

inline AxisTrig axis_trig(double omega, double t) {
    const double a = omega * t;
    return {std::cos(a), std::sin(a), std::cos(2.0 * a)};
}

inline double psi_from_trig(TpmsType type, const AxisTrig& x, const AxisTrig& y, const AxisTrig& z) {
    switch (type) {
    case TpmsType::P: return x.c + y.c + z.c;
    case TpmsType::D: return x.c * y.c * z.c - x.s * y.s * z.s;
    case TpmsType::G: return x.s * y.c + y.s * z.c + z.s * x.c;
    case TpmsType::IWP: return 2.0 * (x.c * y.c + y.c * z.c + z.c * x.c) - (x.c2 + y.c2 + z.c2);
    }
    return 0.0;
}

/// Nodal approximation psi(omega_x u, omega_y v, omega_z w).
inline double psi(TpmsType type, const PeriodCoefficients& w, double u, double v, double t) {
    return psi_from_trig(type, axis_trig(w.x, u), axis_trig(w.y, v), axis_trig(w.z, t));
}

/// f = psi - C; the scaffold surface is its zero set.
inline double scaffold_field(const ImplicitFieldSpec& spec, const TrivariateScalarField& tdf, double u, double v, double w) {
    const double c = tdf.evaluate(u, v, w);
    return psi(spec.tpms, spec.periods, u, v, w) - c;
}

/// Membership of a field value f = psi - C in the closed solid of the structure.
inline bool inside_for_value(const ImplicitFieldSpec& spec, double f) {
    switch (spec.structure) {
    case StructureKind::Pore: return f >= 0.0;
    case StructureKind::Rod: return f <= 0.0;
    case StructureKind::Sheet: return f >= -spec.epsilon && f <= 0.0;
    }
    return false;
}

inline bool inside_structure(const ImplicitFieldSpec& spec, const TrivariateScalarField& tdf, double u, double v, double w) {
    return inside_for_value(spec, scaffold_field(spec, tdf, u, v, w));
}

struct ClampResult {
    double value;
    bool clamped;
};

inline ClampResult clamp_to_valid_range(TpmsType type, double c) {
    const ThresholdRange r = valid_range(type);
    const double v = std::clamp(c, r.lo, r.hi);
    return {v, v != c};
}

/// A field with every coefficient equal to c; evaluates to c everywhere.
inline TrivariateScalarField constant_field(double c, int control_count = 4) {
    const auto kv = KnotVector::uniform_clamped(control_count, 3);
    const auto n = static_cast<std::size_t>(control_count);
    return TrivariateScalarField({kv, kv, kv}, std::vector<double>(n * n * n, c));
}

} // namespace tpms_scaffold
