#pragma once

// File formats.
//
// TDF document (plain ASCII text, LF line ends, '#' comment lines):
//
//   #period coefficients(omega_x,omega_y,omega_z)
//   wx wy wz
//   #resolution of control grid of TDF
//   nu nv nw
//   #control points of TDF
//   C_000              one scalar per line, (i,j,k) order with k fastest
//   ...
//   #knot vector in u-direction of TDF
//   u_0 ... u_{nu+3}   (v and w follow in their own sections)
//   #resolution of control grid of TBSS
//   m n l
//   #control points of TBSS
//   x y z              one point per line, same order
//   #knot vector in u-direction of TBSS   (then v, w)
//
// Both splines are cubic, so every knot vector holds (control count + 4)
// values. Numbers are written with 17 significant digits. A TBSS file is the
// TBSS half of the layout on its own.

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "bspline.hpp"
#include "error.hpp"
#include "mesh.hpp"
#include "tdf_builder.hpp"
#include "tpms.hpp"

namespace tpms_scaffold {

struct TdfDocument {
    PeriodCoefficients periods;
    TrivariateScalarField tdf;
    TrivariateBSplineSolid solid;

    friend bool operator==(const TdfDocument&, const TdfDocument&) = default;
};

inline constexpr int kFileDegree = 3;

namespace detail {

inline constexpr std::array<std::string_view, 3> kAxisName{"u", "v", "w"};

inline std::string section_periods() { return "period coefficients(omega_x,omega_y,omega_z)"; }
inline std::string section_resolution(std::string_view what) { return "resolution of control grid of " + std::string(what); }
inline std::string section_points(std::string_view what) { return "control points of " + std::string(what); }
inline std::string section_knots(int axis, std::string_view what) {
    return "knot vector in " + std::string(kAxisName[static_cast<std::size_t>(axis)]) + "-direction of " + std::string(what);
}

inline std::string format_number(double v) {
    char buf[40];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

inline void write_knots(std::ostream& os, const KnotVector& kv) {
    const auto& k = kv.knots();
    for (std::size_t i = 0; i < k.size(); ++i) os << (i ? " " : "") << format_number(k[i]);
    os << '\n';
}

inline void check_cubic(const std::array<KnotVector, 3>& kv, std::string_view what) {
    for (const auto& k : kv)
        if (k.degree() != kFileDegree)
            throw InvalidArgument(std::string(what) + " must be cubic in every direction to be stored");
}

inline void write_tbss_sections(std::ostream& os, const TrivariateBSplineSolid& solid) {
    check_cubic(solid.knot_vectors(), "TBSS");
    const auto& d = solid.dims();
    os << '#' << section_resolution("TBSS") << '\n' << d[0] << ' ' << d[1] << ' ' << d[2] << '\n';
    os << '#' << section_points("TBSS") << '\n';
    for (const Vec3& p : solid.coefficients())
        os << format_number(p.x) << ' ' << format_number(p.y) << ' ' << format_number(p.z) << '\n';
    for (int a = 0; a < 3; ++a) {
        os << '#' << section_knots(a, "TBSS") << '\n';
        write_knots(os, solid.knots(a));
    }
}

/// Token stream over a TDF-style file; known section headers are kept as markers.
class SectionReader {
public:
    struct Header {
        std::string name;
        std::size_t line;
    };
    struct Token {
        std::string text;
        std::size_t line;
    };

    SectionReader(std::istream& is, std::vector<std::string> known) : known_(std::move(known)) {
        std::string line;
        std::size_t no = 0;
        while (std::getline(is, line)) {
            ++no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos) continue;
            if (line[first] == '#') {
                if (auto h = match_header(line.substr(first + 1))) {
                    items_.emplace_back(Header{*h, no});
                    has_headers_ = true;
                }
                continue;
            }
            std::istringstream ss(line);
            std::string tok;
            while (ss >> tok) items_.emplace_back(Token{tok, no});
        }
        last_line_ = no;
    }

    /// Enters section `name`. Files carrying headers must give every one of
    /// them in order; header-less files are read positionally.
    void begin_section(const std::string& name) {
        if (pos_ < items_.size()) {
            if (const auto* h = std::get_if<Header>(&items_[pos_])) {
                if (h->name != name) throw ParseError(h->line, "unexpected section '" + h->name + "' (expected '" + name + "')");
                ++pos_;
            } else if (has_headers_) {
                throw ParseError(line(), "section '" + current_ + "' has too many values (dimension mismatch)");
            }
        } else if (has_headers_) {
            throw ParseError(last_line_, "file truncated: missing section '" + name + "'");
        }
        current_ = name;
    }

    double number() {
        const Token& t = next_token();
        double v = 0.0;
        const char* b = t.text.data();
        const char* e = b + t.text.size();
        auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || p != e || !std::isfinite(v))
            throw ParseError(t.line, "non-numeric or non-finite token '" + t.text + "' in section '" + current_ + "'");
        return v;
    }

    /// Files with headers must have consumed every value of the current section.
    void end_section() {
        if (has_headers_ && pos_ < items_.size() && std::holds_alternative<Token>(items_[pos_]))
            throw ParseError(line(), "section '" + current_ + "' has too many values (dimension mismatch)");
    }

    int integer() {
        const Token& t = next_token();
        int v = 0;
        const char* b = t.text.data();
        const char* e = b + t.text.size();
        auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || p != e) throw ParseError(t.line, "expected an integer in section '" + current_ + "', got '" + t.text + "'");
        return v;
    }

    std::size_t line() const {
        if (pos_ < items_.size()) return std::visit([](const auto& x) { return x.line; }, items_[pos_]);
        return last_line_;
    }

    void expect_end() {
        if (pos_ < items_.size()) {
            if (const auto* h = std::get_if<Header>(&items_[pos_]))
                throw ParseError(h->line, "unexpected section '" + h->name + "' after the last section");
            throw ParseError(line(), "trailing data after section '" + current_ + "'");
        }
    }

private:
    const Token& next_token() {
        if (pos_ >= items_.size()) throw ParseError(last_line_, "file truncated in section '" + current_ + "'");
        if (const auto* h = std::get_if<Header>(&items_[pos_]))
            throw ParseError(h->line, "section '" + current_ + "' has too few values (dimension mismatch) before '" + h->name + "'");
        return std::get<Token>(items_[pos_++]);
    }

    std::optional<std::string> match_header(std::string_view text) const {
        std::string norm;
        for (char c : text)
            if (c != ' ' && c != '\t') norm += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        for (const auto& k : known_) {
            std::string kn;
            for (char c : k)
                if (c != ' ') kn += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            // The period header is matched by prefix so the symbol spelling may vary.
            const bool period = k == section_periods();
            if (period ? norm.rfind("periodcoefficients", 0) == 0 : norm == kn) return k;
        }
        return std::nullopt;
    }

    std::vector<std::string> known_;
    std::vector<std::variant<Header, Token>> items_;
    std::size_t pos_ = 0;
    std::size_t last_line_ = 0;
    bool has_headers_ = false;
    std::string current_ = "start";
};

inline std::vector<std::string> tbss_sections() {
    std::vector<std::string> s{section_resolution("TBSS"), section_points("TBSS")};
    for (int a = 0; a < 3; ++a) s.push_back(section_knots(a, "TBSS"));
    return s;
}

inline std::vector<std::string> tdf_sections() {
    std::vector<std::string> s{section_periods(), section_resolution("TDF"), section_points("TDF")};
    for (int a = 0; a < 3; ++a) s.push_back(section_knots(a, "TDF"));
    for (auto& t : tbss_sections()) s.push_back(t);
    return s;
}

inline std::array<int, 3> read_resolution(SectionReader& r, std::string_view what) {
    r.begin_section(section_resolution(what));
    const std::size_t line = r.line();
    std::array<int, 3> d{r.integer(), r.integer(), r.integer()};
    r.end_section();
    for (int n : d)
        if (n < kFileDegree + 1)
            throw ParseError(line, "section '" + section_resolution(what) + "': control grid " + std::to_string(d[0]) + "x" +
                                       std::to_string(d[1]) + "x" + std::to_string(d[2]) +
                                       " is too small: a cubic needs at least 4 control points per direction (dimension mismatch)");
    return d;
}

inline std::array<KnotVector, 3> read_knots(SectionReader& r, const std::array<int, 3>& dims, std::string_view what) {
    std::array<KnotVector, 3> kv;
    for (int a = 0; a < 3; ++a) {
        r.begin_section(section_knots(a, what));
        const std::size_t line = r.line();
        std::vector<double> k(static_cast<std::size_t>(dims[static_cast<std::size_t>(a)] + kFileDegree + 1));
        for (double& x : k) x = r.number();
        r.end_section();
        try {
            kv[static_cast<std::size_t>(a)] = KnotVector(std::move(k), kFileDegree);
        } catch (const InvalidArgument& e) {
            throw ParseError(line, "section '" + section_knots(a, what) + "': " + e.what());
        }
    }
    return kv;
}

inline TrivariateBSplineSolid read_tbss_sections(SectionReader& r) {
    const auto dims = read_resolution(r, "TBSS");
    r.begin_section(section_points("TBSS"));
    std::vector<Vec3> pts(static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(dims[2]));
    for (Vec3& p : pts) {
        p.x = r.number();
        p.y = r.number();
        p.z = r.number();
    }
    auto kv = read_knots(r, dims, "TBSS");
    return TrivariateBSplineSolid(std::move(kv), std::move(pts));
}

} // namespace detail

inline void write_tdf(const TdfDocument& doc, std::ostream& os) {
    detail::check_cubic(doc.tdf.knot_vectors(), "TDF");
    os << '#' << detail::section_periods() << '\n'
       << detail::format_number(doc.periods.x) << ' ' << detail::format_number(doc.periods.y) << ' '
       << detail::format_number(doc.periods.z) << '\n';
    const auto& d = doc.tdf.dims();
    os << '#' << detail::section_resolution("TDF") << '\n' << d[0] << ' ' << d[1] << ' ' << d[2] << '\n';
    os << '#' << detail::section_points("TDF") << '\n';
    for (double c : doc.tdf.coefficients()) os << detail::format_number(c) << '\n';
    for (int a = 0; a < 3; ++a) {
        os << '#' << detail::section_knots(a, "TDF") << '\n';
        detail::write_knots(os, doc.tdf.knots(a));
    }
    detail::write_tbss_sections(os, doc.solid);
}

inline std::string to_tdf_string(const TdfDocument& doc) {
    std::ostringstream os;
    write_tdf(doc, os);
    return os.str();
}

inline TdfDocument read_tdf(std::istream& is) {
    detail::SectionReader r(is, detail::tdf_sections());
    r.begin_section(detail::section_periods());
    const std::size_t line = r.line();
    const double wx = r.number(), wy = r.number(), wz = r.number();
    PeriodCoefficients periods;
    try {
        periods = PeriodCoefficients(wx, wy, wz);
    } catch (const InvalidArgument& e) {
        throw ParseError(line, e.what());
    }
    const auto dims = detail::read_resolution(r, "TDF");
    r.begin_section(detail::section_points("TDF"));
    std::vector<double> c(static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(dims[2]));
    for (double& x : c) x = r.number();
    auto kv = detail::read_knots(r, dims, "TDF");
    TrivariateScalarField tdf(std::move(kv), std::move(c));
    auto solid = detail::read_tbss_sections(r);
    r.expect_end();
    return {periods, std::move(tdf), std::move(solid)};
}

inline TdfDocument read_tdf_string(const std::string& text) {
    std::istringstream is(text);
    return read_tdf(is);
}

inline void write_tbss(const TrivariateBSplineSolid& solid, std::ostream& os) { detail::write_tbss_sections(os, solid); }

inline TrivariateBSplineSolid read_tbss(std::istream& is) {
    detail::SectionReader r(is, detail::tbss_sections());
    auto solid = detail::read_tbss_sections(r);
    r.expect_end();
    return solid;
}

// ---------------------------------------------------------------------------
// Files

inline std::ifstream open_input(const std::string& path, bool binary = false) {
    std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
    if (!is) throw Error("cannot open '" + path + "' for reading");
    return is;
}

inline std::ofstream open_output(const std::string& path, bool binary = false) {
    std::ofstream os(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    return os;
}

inline void write_tdf_file(const TdfDocument& doc, const std::string& path) {
    auto os = open_output(path, true);
    write_tdf(doc, os);
    if (!os) throw Error("failed writing '" + path + "'");
}

inline TdfDocument read_tdf_file(const std::string& path) {
    auto is = open_input(path, true);
    return read_tdf(is);
}

inline void write_tbss_file(const TrivariateBSplineSolid& solid, const std::string& path) {
    auto os = open_output(path, true);
    write_tbss(solid, os);
    if (!os) throw Error("failed writing '" + path + "'");
}

inline TrivariateBSplineSolid read_tbss_file(const std::string& path) {
    auto is = open_input(path, true);
    return read_tbss(is);
}

// ---------------------------------------------------------------------------
// Edit sets: one "a b c value" per line, '#' comments.

inline EditSet read_edit_set(std::istream& is) {
    EditSet edits;
    std::string line;
    std::size_t no = 0;
    while (std::getline(is, line)) {
        ++no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::vector<std::string> tok;
        std::string t;
        while (ss >> t) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok.size() != 4) throw ParseError(no, "edit line needs 'a b c value', got " + std::to_string(tok.size()) + " fields");
        Edit e{};
        for (std::size_t d = 0; d < 3; ++d) {
            auto [p, ec] = std::from_chars(tok[d].data(), tok[d].data() + tok[d].size(), e.vertex[d]);
            if (ec != std::errc() || p != tok[d].data() + tok[d].size()) throw ParseError(no, "bad vertex index '" + tok[d] + "'");
        }
        auto [p, ec] = std::from_chars(tok[3].data(), tok[3].data() + tok[3].size(), e.value);
        if (ec != std::errc() || p != tok[3].data() + tok[3].size() || !std::isfinite(e.value))
            throw ParseError(no, "bad edit value '" + tok[3] + "'");
        edits.push_back(e);
    }
    return edits;
}

// ---------------------------------------------------------------------------
// STL

enum class StlMode { Binary, Ascii };

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff), static_cast<char>((v >> 16) & 0xff),
                       static_cast<char>((v >> 24) & 0xff)};
    os.write(b, 4);
}

inline void put_f32(std::ostream& os, double v) {
    const float f = static_cast<float>(v);
    std::uint32_t bits = 0;
    std::memcpy(&bits, &f, 4);
    put_u32(os, bits);
}

inline std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) | (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

inline float get_f32(const unsigned char* p) {
    const std::uint32_t bits = get_u32(p);
    float f = 0;
    std::memcpy(&f, &bits, 4);
    return f;
}

inline Vec3 unit_normal(const TriangleMesh& m, const std::array<int, 3>& t) {
    const Vec3 n = triangle_normal(m, t);
    const double len = norm(n);
    return len > 0 ? n * (1.0 / len) : Vec3{};
}

inline std::string format_float(double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(static_cast<float>(v)));
    return std::string(buf, static_cast<std::size_t>(n));
}

} // namespace detail

inline void write_stl(const TriangleMesh& mesh, StlMode mode, std::ostream& os) {
    if (mode == StlMode::Binary) {
        char header[80] = {};
        const char tag[] = "tpms-scaffold binary STL";
        std::memcpy(header, tag, sizeof tag - 1);
        os.write(header, 80);
        detail::put_u32(os, static_cast<std::uint32_t>(mesh.triangles.size()));
        for (const auto& t : mesh.triangles) {
            const Vec3 n = detail::unit_normal(mesh, t);
            for (int d = 0; d < 3; ++d) detail::put_f32(os, n[d]);
            for (int v : t)
                for (int d = 0; d < 3; ++d) detail::put_f32(os, mesh.vertices[static_cast<std::size_t>(v)][d]);
            os.write("\0\0", 2);
        }
        return;
    }
    os << "solid scaffold\n";
    for (const auto& t : mesh.triangles) {
        const Vec3 n = detail::unit_normal(mesh, t);
        os << "  facet normal " << detail::format_float(n.x) << ' ' << detail::format_float(n.y) << ' ' << detail::format_float(n.z)
           << "\n    outer loop\n";
        for (int v : t) {
            const Vec3& p = mesh.vertices[static_cast<std::size_t>(v)];
            os << "      vertex " << detail::format_float(p.x) << ' ' << detail::format_float(p.y) << ' ' << detail::format_float(p.z)
               << '\n';
        }
        os << "    endloop\n  endfacet\n";
    }
    os << "endsolid scaffold\n";
}

inline void write_stl_file(const TriangleMesh& mesh, StlMode mode, const std::string& path) {
    auto os = open_output(path, true);
    write_stl(mesh, mode, os);
    if (!os) throw Error("failed writing '" + path + "'");
}

/// Reads binary or ASCII STL; coincident vertices (exact float equality) are merged.
inline TriangleMesh read_stl(std::istream& is) {
    const std::string data((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    std::vector<std::array<float, 3>> soup;
    const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
    const bool binary = data.size() >= 84 && data.size() == 84 + 50 * static_cast<std::size_t>(detail::get_u32(bytes + 80));
    if (binary) {
        const std::uint32_t n = detail::get_u32(bytes + 80);
        for (std::uint32_t t = 0; t < n; ++t) {
            const unsigned char* p = bytes + 84 + 50 * static_cast<std::size_t>(t) + 12;
            for (int v = 0; v < 3; ++v)
                soup.push_back({detail::get_f32(p + 12 * v), detail::get_f32(p + 12 * v + 4), detail::get_f32(p + 12 * v + 8)});
        }
    } else {
        std::istringstream ss(data);
        std::string word;
        if (!(ss >> word) || word != "solid") throw Error("not an STL file");
        while (ss >> word) {
            if (word != "vertex") continue;
            std::array<float, 3> p{};
            if (!(ss >> p[0] >> p[1] >> p[2])) throw Error("malformed ASCII STL vertex");
            soup.push_back(p);
        }
        if (soup.size() % 3 != 0) throw Error("ASCII STL vertex count is not a multiple of 3");
    }
    TriangleMesh m;
    m.space = MeshSpace::Physical;
    std::map<std::array<float, 3>, int> index;
    for (std::size_t n = 0; n < soup.size(); n += 3) {
        std::array<int, 3> tri{};
        for (std::size_t c = 0; c < 3; ++c) {
            auto [it, inserted] = index.try_emplace(soup[n + c], static_cast<int>(m.vertices.size()));
            if (inserted) m.vertices.emplace_back(soup[n + c][0], soup[n + c][1], soup[n + c][2]);
            tri[c] = it->second;
        }
        m.triangles.push_back(tri);
    }
    m.closed = is_closed(m);
    return m;
}

inline TriangleMesh read_stl_file(const std::string& path) {
    auto is = open_input(path, true);
    return read_stl(is);
}

} // namespace tpms_scaffold
