#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "tpms_scaffold/io.hpp"
#include "tpms_scaffold/polygonizer.hpp"
#include "tpms_scaffold/shapes.hpp"

using namespace tpms_scaffold;

namespace {

TdfDocument minimal_document() {
    return {PeriodCoefficients::from_cells(1, 1, 1), constant_field(0.0), identity_solid({4, 4, 4})};
}

/// Identity solid on non-uniform knots with awkward coefficient values.
TdfDocument identity_document() {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> U(-0.8, 0.8);
    const KnotVector ku({0, 0, 0, 0, 0.1, 0.55, 0.7, 1, 1, 1, 1}, 3);
    const KnotVector kv({0, 0, 0, 0, 0.3, 1, 1, 1, 1}, 3);
    const KnotVector kw = KnotVector::uniform_clamped(6, 3);
    std::vector<double> c(7 * 5 * 6);
    for (double& x : c) x = U(rng);
    c[0] = 1.0 / 3.0;
    c[1] = -0.0;
    c[2] = 1e-300;
    c[3] = std::numeric_limits<double>::denorm_min();
    c[4] = 0.1 + 0.2;
    return {PeriodCoefficients(7.5, 9.25, std::sqrt(2.0) * 10), TrivariateScalarField({ku, kv, kw}, c), identity_solid({5, 6, 4})};
}

TdfDocument benchmark_document() {
    return {PeriodCoefficients::from_cells(2, 2, 2), constant_field(0.0, 20), identity_solid({4, 4, 4})};
}

std::vector<TdfDocument> corpus() { return {minimal_document(), identity_document(), benchmark_document()}; }

bool bit_equal(std::span<const double> a, std::span<const double> b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool bit_equal(const KnotVector& a, const KnotVector& b) { return bit_equal(a.knots(), b.knots()); }

void expect_bit_equal(const TdfDocument& a, const TdfDocument& b) {
    EXPECT_EQ(std::memcmp(&a.periods, &b.periods, sizeof a.periods), 0);
    EXPECT_TRUE(bit_equal(a.tdf.coefficients(), b.tdf.coefficients()));
    const auto pa = a.solid.coefficients(), pb = b.solid.coefficients();
    ASSERT_EQ(pa.size(), pb.size());
    EXPECT_EQ(std::memcmp(pa.data(), pb.data(), pa.size() * sizeof(Vec3)), 0);
    for (int d = 0; d < 3; ++d) {
        EXPECT_TRUE(bit_equal(a.tdf.knots(d), b.tdf.knots(d)));
        EXPECT_TRUE(bit_equal(a.solid.knots(d), b.solid.knots(d)));
    }
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string l;
    while (std::getline(is, l)) out.push_back(l);
    return out;
}

std::string join(const std::vector<std::string>& lines) {
    std::string s;
    for (const auto& l : lines) s += l + "\n";
    return s;
}

std::size_t line_index(const std::vector<std::string>& lines, const std::string& exact) {
    for (std::size_t i = 0; i < lines.size(); ++i)
        if (lines[i] == exact) return i;
    ADD_FAILURE() << "line not found: " << exact;
    return 0;
}

std::string parse_error_of(const std::string& text) {
    try {
        read_tdf_string(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    return "<no error>";
}

TriangleMesh single_triangle() {
    TriangleMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 2, 0}};
    m.triangles = {{0, 1, 2}};
    return m;
}

TriangleMesh small_closed_mesh() {
    const ImplicitFieldSpec spec{TpmsType::G, PeriodCoefficients::from_cells(1, 1, 1), StructureKind::Rod, 0.3};
    return polygonize(sample_field(spec, constant_field(0.2), 14));
}

std::filesystem::path temp_dir() {
    auto p = std::filesystem::temp_directory_path() / "tpms_scaffold_io_test";
    std::filesystem::create_directories(p);
    return p;
}

} // namespace

TEST(TdfFormat, DocumentRoundTripIsBitExact) {
    for (const auto& doc : corpus()) {
        const auto back = read_tdf_string(to_tdf_string(doc));
        EXPECT_EQ(back, doc);
        expect_bit_equal(back, doc);
    }
}

TEST(TdfFormat, RewriteIsByteIdentical) {
    for (const auto& doc : corpus()) {
        const std::string once = to_tdf_string(doc);
        const std::string twice = to_tdf_string(read_tdf_string(once));
        EXPECT_EQ(once, twice);
    }
}

TEST(TdfFormat, FileRoundTrip) {
    const auto path = (temp_dir() / "doc.tdf").string();
    const auto doc = identity_document();
    write_tdf_file(doc, path);
    std::ifstream is(path, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    EXPECT_EQ(bytes, to_tdf_string(doc));
    EXPECT_EQ(bytes.find('\r'), std::string::npos);
    expect_bit_equal(read_tdf_file(path), doc);
    EXPECT_THROW(write_tdf_file(doc, "/nonexistent-dir/x.tdf"), Error);
    EXPECT_THROW(read_tdf_file("/nonexistent-dir/x.tdf"), Error);
}

TEST(TdfFormat, SectionOrderAndFirstDataLine) {
    const auto lines = lines_of(to_tdf_string(identity_document()));
    std::vector<std::string> headers;
    std::string first_data;
    for (const auto& l : lines) {
        if (l.starts_with("#")) headers.push_back(l);
        else if (first_data.empty()) first_data = l;
    }
    EXPECT_EQ(first_data, "7.5 9.25 14.142135623730951");
    const std::vector<std::string> expected{"#period coefficients(omega_x,omega_y,omega_z)",
                                            "#resolution of control grid of TDF",
                                            "#control points of TDF",
                                            "#knot vector in u-direction of TDF",
                                            "#knot vector in v-direction of TDF",
                                            "#knot vector in w-direction of TDF",
                                            "#resolution of control grid of TBSS",
                                            "#control points of TBSS",
                                            "#knot vector in u-direction of TBSS",
                                            "#knot vector in v-direction of TBSS",
                                            "#knot vector in w-direction of TBSS"};
    EXPECT_EQ(headers, expected);
    // Scalar coefficients one per line in (i,j,k) order, k fastest.
    const auto doc = identity_document();
    const std::size_t p = line_index(lines, "#control points of TDF");
    EXPECT_EQ(lines[p + 1], "0.33333333333333331");
    EXPECT_EQ(lines[p + 2], "-0");
    EXPECT_EQ(std::stod(lines[p + 6 + 1]), doc.tdf.coefficient(0, 1, 0));
    EXPECT_EQ(lines[line_index(lines, "#resolution of control grid of TDF") + 1], "7 5 6");
    EXPECT_EQ(lines[line_index(lines, "#knot vector in v-direction of TDF") + 1], "0 0 0 0 0.29999999999999999 1 1 1 1");
    // Solid points are "x y z" rows.
    const std::size_t q = line_index(lines, "#control points of TBSS");
    EXPECT_EQ(lines[q + 1], "0 0 0");
    EXPECT_EQ(lines[q + 2], "0 0 0.33333333333333331");
}

TEST(TdfFormat, MinimalDocument) {
    const auto text = to_tdf_string(minimal_document());
    const auto lines = lines_of(text);
    EXPECT_EQ(lines[0], "#period coefficients(omega_x,omega_y,omega_z)");
    EXPECT_EQ(lines[1], "6.2831853071795862 6.2831853071795862 6.2831853071795862");
    EXPECT_EQ(lines.size(), 11u + 1 + 1 + 64 + 3 + 1 + 64 + 3);
}

TEST(TdfFormat, AcceptsCrlfCommentsAndLooseWhitespace) {
    const auto doc = identity_document();
    std::string crlf;
    for (const auto& l : lines_of(to_tdf_string(doc))) crlf += l + "\r\n";
    expect_bit_equal(read_tdf_string(crlf), doc);

    auto lines = lines_of(to_tdf_string(doc));
    std::vector<std::string> loose{"# written by hand", ""};
    for (const auto& l : lines) {
        if (l.starts_with("#")) {
            loose.push_back("  " + l);
            loose.push_back("# free comment");
        } else {
            loose.push_back("\t" + std::regex_replace(l, std::regex(" "), "   ") + "  ");
            loose.push_back("");
        }
    }
    expect_bit_equal(read_tdf_string(join(loose)), doc);

    // Header-less files are read positionally.
    std::vector<std::string> bare;
    for (const auto& l : lines)
        if (!l.starts_with("#")) bare.push_back(l);
    expect_bit_equal(read_tdf_string(join(bare)), doc);

    // Omega spelled as a symbol.
    lines[0] = "#period coefficients(ω_x,ω_y,ω_z)";
    expect_bit_equal(read_tdf_string(join(lines)), doc);
}

TEST(TdfFormat, KnotCountMismatchNamesSection) {
    const auto doc = minimal_document();
    auto lines = lines_of(to_tdf_string(doc));
    const std::size_t k = line_index(lines, "#knot vector in v-direction of TDF") + 1;
    auto few = lines;
    few[k] = "0 0 0 0 1 1 1"; // n + 3 values
    const std::string e1 = parse_error_of(join(few));
    EXPECT_NE(e1.find("knot vector in v-direction of TDF"), std::string::npos) << e1;
    EXPECT_NE(e1.find("dimension mismatch"), std::string::npos) << e1;
    EXPECT_NE(e1.find("line " + std::to_string(k + 2)), std::string::npos) << e1;

    auto many = lines;
    many[k] = "0 0 0 0 0.5 1 1 1 1"; // n + 5 values
    const std::string e2 = parse_error_of(join(many));
    EXPECT_NE(e2.find("knot vector in v-direction of TDF"), std::string::npos) << e2;
    EXPECT_NE(e2.find("dimension mismatch"), std::string::npos) << e2;
}

TEST(TdfFormat, ControlCountMismatch) {
    auto lines = lines_of(to_tdf_string(minimal_document()));
    lines[line_index(lines, "#resolution of control grid of TDF") + 1] = "4 4 5";
    const std::string e = parse_error_of(join(lines));
    EXPECT_NE(e.find("dimension mismatch"), std::string::npos) << e;
}

TEST(TdfFormat, ReorderedSectionsRejectedAtFirstUnexpected) {
    auto lines = lines_of(to_tdf_string(minimal_document()));
    const std::size_t u = line_index(lines, "#knot vector in u-direction of TDF");
    const std::size_t v = line_index(lines, "#knot vector in v-direction of TDF");
    std::swap(lines[u], lines[v]);
    std::swap(lines[u + 1], lines[v + 1]);
    const std::string e = parse_error_of(join(lines));
    EXPECT_NE(e.find("line " + std::to_string(u + 1)), std::string::npos) << e;
    EXPECT_NE(e.find("unexpected section 'knot vector in v-direction of TDF'"), std::string::npos) << e;
}

TEST(TdfFormat, NonNumericTokenReportsLine) {
    auto lines = lines_of(to_tdf_string(minimal_document()));
    const std::size_t p = line_index(lines, "#control points of TDF") + 5;
    lines[p] = "0.2x";
    const std::string e = parse_error_of(join(lines));
    EXPECT_NE(e.find("line " + std::to_string(p + 1)), std::string::npos) << e;
    EXPECT_NE(e.find("non-numeric"), std::string::npos) << e;
    lines[p] = "nan";
    EXPECT_NE(parse_error_of(join(lines)).find("non-finite"), std::string::npos);
}

TEST(TdfFormat, TruncatedFile) {
    const auto text = to_tdf_string(minimal_document());
    const std::string cut = text.substr(0, text.size() / 2);
    EXPECT_NE(parse_error_of(cut).find("truncated"), std::string::npos);
    auto lines = lines_of(text);
    lines.resize(lines.size() - 2);
    EXPECT_NE(parse_error_of(join(lines)).find("truncated"), std::string::npos);
    EXPECT_NE(parse_error_of("").find("truncated"), std::string::npos);
    EXPECT_NE(parse_error_of(text + "0.5\n").find("too many values"), std::string::npos);
}

TEST(TdfFormat, WriterRejectsNonCubic) {
    auto doc = minimal_document();
    doc.solid = identity_solid({4, 4, 4}, 2);
    std::ostringstream os;
    EXPECT_THROW(write_tdf(doc, os), InvalidArgument);
}

TEST(TdfFormat, IsisScaleDocumentSize) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-0.8, 0.8);
    std::vector<double> c(20 * 20 * 20);
    for (double& x : c) x = U(rng);
    const auto kv = KnotVector::uniform_clamped(20, 3);
    const TdfDocument doc{PeriodCoefficients::from_cells(4, 4, 4), TrivariateScalarField({kv, kv, kv}, c),
                          cylinder_sector_solid(3.0, 5.0, 4.0, 120.0, {20, 20, 20})};
    const auto bytes = to_tdf_string(doc).size();
    EXPECT_GE(bytes, 500'000u);
    EXPECT_LE(bytes, 1'500'000u);
}

TEST(TbssFormat, IdentityFileHasLinearPrecision) {
    std::stringstream ss;
    write_tbss(identity_solid({6, 5, 4}), ss);
    const auto solid = read_tbss(ss);
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int n = 0; n < 500; ++n) {
        const double u = U(rng), v = U(rng), w = U(rng);
        const Vec3 p = eval_solid(solid, u, v, w);
        EXPECT_NEAR(p.x, u, 1e-14);
        EXPECT_NEAR(p.y, v, 1e-14);
        EXPECT_NEAR(p.z, w, 1e-14);
    }
}

TEST(TbssFormat, RoundTripAndRejectsTinyNet) {
    const auto solid = ball_solid(2.0, 6);
    std::ostringstream os;
    write_tbss(solid, os);
    std::istringstream is(os.str());
    const auto back = read_tbss(is);
    EXPECT_EQ(back, solid);
    std::ostringstream again;
    write_tbss(back, again);
    EXPECT_EQ(again.str(), os.str());

    std::string tiny = "#resolution of control grid of TBSS\n2 2 2\n#control points of TBSS\n";
    for (int i = 0; i < 8; ++i) tiny += std::to_string(i & 1) + " " + std::to_string(i >> 1 & 1) + " " + std::to_string(i >> 2) + "\n";
    for (char a : {'u', 'v', 'w'}) tiny += std::string("#knot vector in ") + a + "-direction of TBSS\n0 0 0 0 1 1 1 1\n";
    std::istringstream tis(tiny);
    try {
        read_tbss(tis);
        ADD_FAILURE() << "2x2x2 cubic net accepted";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("dimension"), std::string::npos) << e.what();
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(EditSet, Parsing) {
    std::istringstream is("# a b c value\n\n1 2 3 0.5\n  4 5 6   -0.25  # trailing comment\n");
    const auto e = read_edit_set(is);
    ASSERT_EQ(e.size(), 2u);
    EXPECT_EQ(e[0].vertex, (GridIndex{1, 2, 3}));
    EXPECT_EQ(e[0].value, 0.5);
    EXPECT_EQ(e[1].vertex, (GridIndex{4, 5, 6}));
    EXPECT_EQ(e[1].value, -0.25);
    std::istringstream empty("# nothing\n");
    EXPECT_TRUE(read_edit_set(empty).empty());
    for (const char* bad : {"1 2 0.5\n", "1 2 3 x\n", "1 2.5 3 0.1\n", "1 2 3 inf\n"}) {
        std::istringstream b(std::string("# header\n") + bad);
        try {
            read_edit_set(b);
            ADD_FAILURE() << "accepted: " << bad;
        } catch (const ParseError& err) {
            EXPECT_EQ(err.line(), 2u);
        }
    }
}

TEST(Stl, BinarySizeFormula) {
    std::ostringstream one;
    write_stl(single_triangle(), StlMode::Binary, one);
    EXPECT_EQ(one.str().size(), 134u);
    const auto mesh = small_closed_mesh();
    std::ostringstream many;
    write_stl(mesh, StlMode::Binary, many);
    EXPECT_EQ(many.str().size(), 84u + 50u * mesh.triangles.size());
}

TEST(Stl, BinaryLayout) {
    std::ostringstream os;
    write_stl(single_triangle(), StlMode::Binary, os);
    const std::string s = os.str();
    const auto* b = reinterpret_cast<const unsigned char*>(s.data());
    EXPECT_EQ(b[80] | b[81] << 8 | b[82] << 16 | b[83] << 24, 1);
    float f[12];
    std::memcpy(f, s.data() + 84, sizeof f);
    EXPECT_EQ(f[0], 0.0f);
    EXPECT_EQ(f[1], 0.0f);
    EXPECT_EQ(f[2], 1.0f); // unit normal of the counter-clockwise triangle
    EXPECT_EQ(f[6], 1.0f);
    EXPECT_EQ(f[10], 2.0f);
    EXPECT_EQ(b[132], 0);
    EXPECT_EQ(b[133], 0);
}

TEST(Stl, AsciiGrammar) {
    const auto mesh = small_closed_mesh();
    std::ostringstream os;
    write_stl(mesh, StlMode::Ascii, os);
    const auto lines = lines_of(os.str());
    const std::string num = R"([-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?)";
    const std::regex facet("  facet normal " + num + " " + num + " " + num);
    const std::regex vertex("      vertex " + num + " " + num + " " + num);
    ASSERT_EQ(lines.size(), 2 + 7 * mesh.triangles.size());
    EXPECT_EQ(lines.front(), "solid scaffold");
    EXPECT_EQ(lines.back(), "endsolid scaffold");
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const std::size_t o = 1 + 7 * t;
        EXPECT_TRUE(std::regex_match(lines[o], facet)) << lines[o];
        EXPECT_EQ(lines[o + 1], "    outer loop");
        for (int v = 0; v < 3; ++v) EXPECT_TRUE(std::regex_match(lines[o + 2 + v], vertex)) << lines[o + 2 + v];
        EXPECT_EQ(lines[o + 5], "    endloop");
        EXPECT_EQ(lines[o + 6], "  endfacet");
    }
}

TEST(Stl, ReadBackBothModes) {
    const auto mesh = small_closed_mesh();
    for (StlMode mode : {StlMode::Binary, StlMode::Ascii}) {
        std::stringstream ss;
        write_stl(mesh, mode, ss);
        const auto back = read_stl(ss);
        ASSERT_EQ(back.triangles.size(), mesh.triangles.size());
        ASSERT_EQ(back.vertices.size(), mesh.vertices.size());
        EXPECT_TRUE(back.closed);
        EXPECT_EQ(euler_characteristic(back), euler_characteristic(mesh));
        EXPECT_NEAR(mesh_volume(back), mesh_volume(mesh), 1e-6);
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
            for (int c = 0; c < 3; ++c) {
                const Vec3& a = back.vertices[static_cast<std::size_t>(back.triangles[t][c])];
                const Vec3& b = mesh.vertices[static_cast<std::size_t>(mesh.triangles[t][c])];
                for (int d = 0; d < 3; ++d) EXPECT_EQ(a[d], static_cast<double>(static_cast<float>(b[d])));
            }
    }
    std::istringstream junk("hello world");
    EXPECT_THROW(read_stl(junk), Error);
}

TEST(DataCorpus, SampleFilesParseAndAreCanonical) {
    const std::filesystem::path dir = TPMS_TEST_DATA_DIR;
    int seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto path = entry.path().string();
        std::ifstream is(path, std::ios::binary);
        const std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
        if (entry.path().extension() == ".tdf") {
            EXPECT_EQ(to_tdf_string(read_tdf_string(bytes)), bytes) << path;
            ++seen;
        } else if (entry.path().extension() == ".tbss") {
            std::istringstream in(bytes);
            std::ostringstream out;
            write_tbss(read_tbss(in), out);
            EXPECT_EQ(out.str(), bytes) << path;
            ++seen;
        }
    }
    EXPECT_GE(seen, 3);
}
