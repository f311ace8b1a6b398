#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tpms_scaffold/scaffold.hpp"

namespace ts = tpms_scaffold;

namespace {

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

std::string fmt(double v, int digits = 10) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

class Stopwatch {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw CLI::ValidationError(what, "'" + s + "' is not a number");
    return v;
}

int to_int(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw CLI::ValidationError(what, "'" + s + "' is not an integer");
    return v;
}

/// "n" or "a,b,c".
std::array<int, 3> int_triple(const std::string& s, const std::string& what) {
    const auto parts = split(s, ',');
    if (parts.size() == 1) {
        const int n = to_int(parts[0], what);
        return {n, n, n};
    }
    if (parts.size() != 3) throw CLI::ValidationError(what, "expected n or a,b,c");
    return {to_int(parts[0], what), to_int(parts[1], what), to_int(parts[2], what)};
}

ts::Vec3 double_triple(const std::string& s, const std::string& what) {
    const auto parts = split(s, ',');
    if (parts.size() == 1) {
        const double x = to_double(parts[0], what);
        return {x, x, x};
    }
    if (parts.size() != 3) throw CLI::ValidationError(what, "expected x or x,y,z");
    return {to_double(parts[0], what), to_double(parts[1], what), to_double(parts[2], what)};
}

/// "ramp:a:b:n" (n evenly spaced values from a to b) or a comma-separated list.
std::vector<double> value_list(const std::string& s) {
    if (s.rfind("ramp:", 0) == 0) {
        const auto parts = split(s.substr(5), ':');
        if (parts.size() != 3) throw CLI::ValidationError("--values", "ramp needs the form ramp:a:b:n");
        const double a = to_double(parts[0], "--values"), b = to_double(parts[1], "--values");
        const int n = to_int(parts[2], "--values");
        if (n < 1) throw CLI::ValidationError("--values", "ramp needs at least one value");
        std::vector<double> v(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
        return v;
    }
    std::vector<double> v;
    for (const auto& p : split(s, ',')) v.push_back(to_double(p, "--values"));
    return v;
}

const std::vector<std::string> kTpmsNames{"P", "D", "G", "IWP"};
const std::vector<std::string> kStructureNames{"pore", "rod", "sheet"};

ts::TpmsType tpms_of(const std::string& s) { return *ts::parse_tpms_type(s); }
ts::StructureKind structure_of(const std::string& s) { return *ts::parse_structure(s); }

/// --cells k or kx,ky,kz sets omega = 2 pi k; --periods sets omega directly.
struct PeriodFlags {
    std::string cells, periods;

    void add(CLI::App* cmd, const std::string& cells_help) {
        auto* c = cmd->add_option("--cells", cells, cells_help);
        cmd->add_option("--periods", periods, "Period coefficients omega_x,omega_y,omega_z (alternative to --cells)")->excludes(c);
    }
    std::optional<ts::PeriodCoefficients> get() const {
        if (!periods.empty()) {
            const auto w = double_triple(periods, "--periods");
            return ts::PeriodCoefficients(w.x, w.y, w.z);
        }
        if (!cells.empty()) {
            const auto k = double_triple(cells, "--cells");
            return ts::PeriodCoefficients::from_cells(k.x, k.y, k.z);
        }
        return std::nullopt;
    }
};

void print_statistics(const ts::TriangleMesh& mesh) {
    const auto s = ts::mesh_statistics(mesh);
    std::cout << "triangles: " << s.triangle_count << "\nvertices: " << s.vertex_count << "\nclosed: " << (s.closed ? "yes" : "no")
              << '\n';
    if (s.volume) std::cout << "volume: " << fmt(*s.volume) << '\n';
    std::cout << "area: " << fmt(s.area) << "\nbbox: " << fmt(s.bbox_min.x) << ' ' << fmt(s.bbox_min.y) << ' ' << fmt(s.bbox_min.z)
              << " .. " << fmt(s.bbox_max.x) << ' ' << fmt(s.bbox_max.y) << ' ' << fmt(s.bbox_max.z) << '\n';
}

std::string extension(const std::string& path) {
    auto e = std::filesystem::path(path).extension().string();
    for (char& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return e;
}

// ---------------------------------------------------------------------------

struct MakeTbss {
    std::string shape = "box", size = "1", controls, out;
    double radius = 1.0, inner = 0.5, outer = 1.0, height = 1.0, angle = 90.0;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("make-tbss", "Write a TBSS file for a simple solid");
        cmd->add_option("--shape", shape, "box, ball or cylinder (a thick cylindrical shell sector)")
            ->check(CLI::IsMember({"box", "ball", "cylinder"}))
            ->capture_default_str();
        cmd->add_option("--size", size, "Box edge lengths x or x,y,z")->capture_default_str();
        cmd->add_option("--radius", radius, "Ball radius")->capture_default_str();
        cmd->add_option("--inner", inner, "Cylinder inner radius")->capture_default_str();
        cmd->add_option("--outer", outer, "Cylinder outer radius")->capture_default_str();
        cmd->add_option("--height", height, "Cylinder height")->capture_default_str();
        cmd->add_option("--angle", angle, "Cylinder sector angle in degrees")->capture_default_str();
        cmd->add_option("--controls", controls, "Control points per direction, n or a,b,c (default 4 for box, 8 otherwise)");
        cmd->add_option("--out", out, "Output TBSS file")->required();
        cmd->callback([this] { run(); });
    }

    void run() const {
        ts::TrivariateBSplineSolid solid;
        if (shape == "box") {
            solid = ts::box_solid(double_triple(size, "--size"), controls.empty() ? std::array<int, 3>{4, 4, 4} : int_triple(controls, "--controls"));
        } else if (shape == "ball") {
            const auto c = controls.empty() ? std::array<int, 3>{8, 8, 8} : int_triple(controls, "--controls");
            if (c[0] != c[1] || c[1] != c[2]) throw CLI::ValidationError("--controls", "a ball needs the same count in every direction");
            solid = ts::ball_solid(radius, c[0]);
        } else {
            solid = ts::cylinder_sector_solid(inner, outer, height, angle,
                                              controls.empty() ? std::array<int, 3>{4, 8, 4} : int_triple(controls, "--controls"));
        }
        const auto jac = ts::validate_jacobian(solid);
        if (!jac.positive) warn("Jacobian determinant not positive (min " + fmt(jac.min_det) + ")");
        ts::write_tbss_file(solid, out);
        const auto& d = solid.dims();
        std::cout << "wrote " << out << " (" << d[0] << "x" << d[1] << "x" << d[2] << " control points)\n";
    }
};

struct TdfBuild {
    std::string tbss, method, tpms = "P", quantity = "mean", fn = "sym3", axis = "w", values, grid = "50", controls = "20", range, out;
    PeriodFlags periods;
    bool no_normalize = false;
    double tol = -1.0;
    int max_iters = 200;
    CLI::Option* values_opt = nullptr;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("tdf-build", "Build a threshold distribution field for a TBSS and write a TDF file");
        cmd->add_option("--tbss", tbss, "Input TBSS file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--method", method, "filling, layer or function")->required()->check(CLI::IsMember({"filling", "layer", "function"}));
        cmd->add_option("--tpms", tpms, "TPMS type the field is normalized for: P, D, G or IWP")
            ->check(CLI::IsMember(kTpmsNames))
            ->capture_default_str();
        cmd->add_option("--quantity", quantity, "filling: boundary curvature, mean or gauss")
            ->check(CLI::IsMember({"mean", "gauss"}))
            ->capture_default_str();
        cmd->add_option("--fn", fn, "function: sym3 (|u-v|+|v-w|+|u-w|), u, v, w, radial or constant")
            ->check(CLI::IsMember({"sym3", "u", "v", "w", "radial", "constant"}))
            ->capture_default_str();
        cmd->add_option("--axis", axis, "layer: u, v, w or sides")->check(CLI::IsMember({"u", "v", "w", "sides"}))->capture_default_str();
        values_opt = cmd->add_option("--values", values, "layer: one value per layer, ramp:a:b:n or v1,v2,...");
        cmd->add_option("--grid", grid, "Parametric grid vertices, n or a,b,c")->capture_default_str();
        cmd->add_option("--controls", controls, "TDF control coefficients, n or a,b,c")->capture_default_str();
        cmd->add_option("--range", range, "Normalize into lo,hi inside the valid range instead of the full range");
        cmd->add_flag("--no-normalize", no_normalize, "Fit the raw grid values");
        cmd->add_option("--tol", tol, "LSPIA tolerance on the max residual (default 1e-4 x value range)");
        cmd->add_option("--max-iters", max_iters, "LSPIA iteration cap")->check(CLI::NonNegativeNumber)->capture_default_str();
        periods.add(cmd, "Unit cells per direction, k or kx,ky,kz; omega = 2 pi k (default 4)");
        cmd->add_option("--out", out, "Output TDF file")->required();
        cmd->callback([this] { run(); });
    }

    ts::ParametricGrid discrete_field(const ts::TrivariateBSplineSolid& solid, const std::array<int, 3>& res) const {
        if (method == "filling") {
            const auto r = ts::filling_method(solid, res, quantity == "mean" ? ts::CurvatureKind::Mean : ts::CurvatureKind::Gauss);
            if (r.degenerate_samples > 0) warn(std::to_string(r.degenerate_samples) + " degenerate boundary samples filled from neighbours");
            if (!r.laplace.converged) warn("Laplace filling stopped before converging");
            return r.grid;
        }
        if (method == "layer") {
            if (values_opt->count() == 0) throw CLI::RequiredError("--values (needed by --method layer)");
            const ts::LayerMode mode = axis == "u"   ? ts::LayerMode::AxisU
                                       : axis == "v" ? ts::LayerMode::AxisV
                                       : axis == "w" ? ts::LayerMode::AxisW
                                                     : ts::LayerMode::Sides;
            const auto v = value_list(values);
            const int expected = ts::layer_count(res, mode);
            if (static_cast<int>(v.size()) != expected)
                throw CLI::ValidationError("--values", "expected " + std::to_string(expected) + " layer values, got " + std::to_string(v.size()));
            return ts::layer_method(res, mode, v);
        }
        ts::GridFunction f;
        if (fn == "sym3") f = ts::symmetric_difference_function;
        else if (fn == "u") f = [](double u, double, double) { return u; };
        else if (fn == "v") f = [](double, double v, double) { return v; };
        else if (fn == "w") f = [](double, double, double w) { return w; };
        else if (fn == "radial") f = [](double u, double v, double w) { return std::hypot(u - 0.5, v - 0.5, w - 0.5); };
        else f = [](double, double, double) { return 0.0; };
        return ts::prescribed_function(res, f);
    }

    void run() const {
        Stopwatch clock;
        const auto solid = ts::read_tbss_file(tbss);
        const auto res = int_triple(grid, "--grid");
        const ts::TpmsType type = tpms_of(tpms);
        auto field = discrete_field(solid, res);
        if (!no_normalize) {
            std::optional<ts::ThresholdRange> sub;
            if (!range.empty()) {
                const auto parts = split(range, ',');
                if (parts.size() != 2) throw CLI::ValidationError("--range", "expected lo,hi");
                sub = ts::ThresholdRange{to_double(parts[0], "--range"), to_double(parts[1], "--range")};
            }
            field = ts::normalize_to_range(field, type, sub);
        } else {
            const auto vr = ts::valid_range(type);
            if (field.min_value() < vr.lo || field.max_value() > vr.hi) warn("grid values leave the valid range of type " + tpms);
        }
        ts::LspiaOptions opt;
        opt.control_resolution = int_triple(controls, "--controls");
        opt.tol = tol;
        opt.max_iters = max_iters;
        const auto fit = ts::lspia_fit(field, opt);
        if (!fit.converged) warn("LSPIA stopped after " + std::to_string(fit.iterations) + " iterations without reaching the tolerance");
        const ts::TdfDocument doc{periods.get().value_or(ts::PeriodCoefficients::from_cells(4, 4, 4)), fit.field, solid};
        ts::write_tdf_file(doc, out);
        std::cout << "wrote " << out << "\nlspia iterations: " << fit.iterations << "\nmax residual: " << fmt(fit.final_residual())
                  << "\ntime: " << fmt(clock.seconds(), 4) << " s\n";
    }
};

/// Flags shared by generate and convert (tdf -> stl).
struct MeshFlags {
    std::string tpms = "P", structure = "pore";
    double epsilon = ts::kDefaultSheetThickness;
    int resolution = ts::kDefaultPolygonizationResolution;
    bool ascii = false, parametric = false;
    PeriodFlags periods;

    void add(CLI::App* cmd) {
        cmd->add_option("--tpms", tpms, "TPMS type: P, D, G or IWP")->check(CLI::IsMember(kTpmsNames))->capture_default_str();
        cmd->add_option("--structure", structure, "pore, rod or sheet")->check(CLI::IsMember(kStructureNames))->capture_default_str();
        cmd->add_option("--epsilon", epsilon, "Sheet thickness in field units")->check(CLI::PositiveNumber)->capture_default_str();
        cmd->add_option("--resolution", resolution, "Sample grid vertices per direction (>= 2)")->check(CLI::Range(2, 4096))->capture_default_str();
        cmd->add_flag("--ascii", ascii, "Write ASCII STL instead of binary");
        cmd->add_flag("--parametric", parametric, "Skip the mapping and write the mesh in the unit parameter cube");
        periods.add(cmd, "Override the file's periods with k unit cells per direction (omega = 2 pi k)");
    }

    void run(const std::string& tdf, const std::string& out) const {
        Stopwatch clock;
        const auto doc = ts::read_tdf_file(tdf);
        const ts::ImplicitFieldSpec spec{tpms_of(tpms), periods.get().value_or(doc.periods), structure_of(structure), epsilon};
        spec.validate();
        const auto samples = ts::sample_field(spec, doc.tdf, resolution);
        auto mesh = ts::polygonize(samples);
        if (!parametric) {
            const auto jac = ts::validate_jacobian(doc.solid);
            if (!jac.positive)
                warn("Jacobian determinant of the TBSS reaches " + fmt(jac.min_det) + " at (" + fmt(jac.location.x, 4) + ", " +
                     fmt(jac.location.y, 4) + ", " + fmt(jac.location.z, 4) + "); the mapped mesh may fold");
            mesh = ts::map_mesh(doc.solid, mesh);
        }
        ts::write_stl_file(mesh, ascii ? ts::StlMode::Ascii : ts::StlMode::Binary, out);
        std::cout << "wrote " << out << '\n';
        print_statistics(mesh);
        std::cout << "time: " << fmt(clock.seconds(), 4) << " s\n";
    }
};

struct Generate {
    std::string tdf, out;
    MeshFlags mesh;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("generate", "Polygonize a TDF document into a scaffold STL");
        cmd->add_option("--tdf", tdf, "Input TDF file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", out, "Output STL file")->required();
        mesh.add(cmd);
        cmd->callback([this] { mesh.run(tdf, out); });
    }
};

struct Modify {
    std::string tdf, edits, out, tpms = "P", grid = "50";
    double tol = 1e-6;
    int max_iters = 200;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("modify", "Locally modify a TDF at parametric grid vertices");
        cmd->add_option("--tdf", tdf, "Input TDF file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--edits", edits, "Edit file, one 'a b c value' line per vertex")->required()->check(CLI::ExistingFile);
        cmd->add_option("--tpms", tpms, "TPMS type whose valid range clamps the edit values")->check(CLI::IsMember(kTpmsNames))->capture_default_str();
        cmd->add_option("--grid", grid, "Parametric grid vertices the edit indices refer to, n or a,b,c")->capture_default_str();
        cmd->add_option("--tol", tol, "Tolerance on the residual at the edited vertices")->capture_default_str();
        cmd->add_option("--max-iters", max_iters, "Iteration cap")->check(CLI::NonNegativeNumber)->capture_default_str();
        cmd->add_option("--out", out, "Output TDF file (default: rewrite the input)");
        cmd->callback([this] { run(); });
    }

    void run() const {
        auto doc = ts::read_tdf_file(tdf);
        auto in = ts::open_input(edits);
        const auto set = ts::read_edit_set(in);
        ts::LocalModifyOptions opt;
        opt.tol = tol;
        opt.max_iters = max_iters;
        opt.clamp_range = ts::valid_range(tpms_of(tpms));
        const auto r = ts::lspia_local_modify(doc.tdf, int_triple(grid, "--grid"), set, opt);
        if (r.clamped_edits > 0)
            warn(std::to_string(r.clamped_edits) + " edit value(s) clamped into [" + fmt(opt.clamp_range->lo) + ", " +
                 fmt(opt.clamp_range->hi) + "]");
        doc.tdf = r.field;
        const std::string dest = out.empty() ? tdf : out;
        ts::write_tdf_file(doc, dest);
        std::cout << "wrote " << dest << "\nedits: " << set.size() << "\niterations: " << r.iterations
                  << "\ncoefficients touched: " << r.touched.size() << '\n';
        if (!r.residual_history.empty()) std::cout << "max residual: " << fmt(r.residual_history.back()) << '\n';
    }
};

struct Analyze {
    std::string tpms = "P", structure = "pore", tdf, out;
    int steps = 17, resolution = ts::kDefaultSweepResolution;
    double epsilon = ts::kDefaultSheetThickness;
    PeriodFlags sweep_periods, porosity_periods;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("analyze", "Porosity analysis");
        cmd->require_subcommand(1);
        auto* sweep = cmd->add_subcommand("sweep", "Porosity of constant-threshold structures over the valid threshold range (CSV)");
        auto* por = cmd->add_subcommand("porosity", "Porosity of the structure defined by a TDF file");
        for (auto* c : {sweep, por}) {
            c->add_option("--tpms", tpms, "TPMS type: P, D, G or IWP")->check(CLI::IsMember(kTpmsNames))->capture_default_str();
            c->add_option("--structure", structure, "pore, rod or sheet")->check(CLI::IsMember(kStructureNames))->capture_default_str();
            c->add_option("--epsilon", epsilon, "Sheet thickness")->check(CLI::PositiveNumber)->capture_default_str();
            c->add_option("--resolution", resolution, "Voxels per direction (>= 16)")->check(CLI::Range(16, 4096))->capture_default_str();
        }
        sweep->add_option("--steps", steps, "Number of evenly spaced thresholds, ends included")->check(CLI::Range(2, 100000))->capture_default_str();
        sweep->add_option("--out", out, "CSV file (default: standard output)");
        sweep_periods.add(sweep, "Unit cells per direction, k or kx,ky,kz (default 2)");
        por->add_option("--tdf", tdf, "Input TDF file")->required()->check(CLI::ExistingFile);
        porosity_periods.add(por, "Override the file's periods with k unit cells per direction");
        sweep->callback([this] { run_sweep(); });
        por->callback([this] { run_porosity(); });
    }

    void run_sweep() const {
        const ts::TpmsType type = tpms_of(tpms);
        const auto cs = ts::threshold_steps(type, steps);
        const auto rows = ts::porosity_sweep(type, structure_of(structure), sweep_periods.get().value_or(ts::PeriodCoefficients::from_cells(2, 2, 2)),
                                             cs, resolution, epsilon);
        std::ostringstream csv;
        csv << "c,porosity\n";
        for (const auto& r : rows) csv << fmt(r.c) << ',' << fmt(r.porosity, 17) << '\n';
        if (out.empty()) {
            std::cout << csv.str();
        } else {
            auto os = ts::open_output(out, true);
            os << csv.str();
        }
    }

    void run_porosity() const {
        const auto doc = ts::read_tdf_file(tdf);
        const ts::ImplicitFieldSpec spec{tpms_of(tpms), porosity_periods.get().value_or(doc.periods), structure_of(structure), epsilon};
        std::cout << fmt(ts::voxel_porosity(spec, doc.tdf, resolution), 17) << '\n';
    }
};

struct Convert {
    std::string in, out;
    MeshFlags mesh;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("convert",
                                       "Convert by file extension: .tdf -> .stl (expand to a mesh; takes the generate flags), "
                                       ".tdf -> .tdf and .tbss -> .tbss (canonical rewrite), .stl -> .stl (binary/ASCII)");
        cmd->add_option("--in", in, "Input file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", out, "Output file")->required();
        mesh.add(cmd);
        cmd->callback([this] { run(); });
    }

    void run() const {
        const auto a = extension(in), b = extension(out);
        if (a == ".tdf" && b == ".stl") {
            mesh.run(in, out);
        } else if (a == ".tdf" && b == ".tdf") {
            ts::write_tdf_file(ts::read_tdf_file(in), out);
        } else if (a == ".tbss" && b == ".tbss") {
            ts::write_tbss_file(ts::read_tbss_file(in), out);
        } else if (a == ".stl" && b == ".stl") {
            auto is = ts::open_input(in, true);
            ts::write_stl_file(ts::read_stl(is), mesh.ascii ? ts::StlMode::Ascii : ts::StlMode::Binary, out);
        } else {
            throw CLI::ValidationError("--out", "no conversion from '" + a + "' to '" + b + "'");
        }
    }
};

struct Validate {
    std::string file;
    int samples = 21;

    void add(CLI::App& app) {
        auto* cmd = app.add_subcommand("validate", "Check a .tdf, .tbss or .stl file");
        cmd->add_option("file", file, "File to check")->required()->check(CLI::ExistingFile);
        cmd->add_option("--samples", samples, "Jacobian samples per direction")->check(CLI::Range(2, 1000))->capture_default_str();
        cmd->callback([this] { run(); });
    }

    void check_solid(const ts::TrivariateBSplineSolid& solid) const {
        const auto& d = solid.dims();
        std::cout << "tbss control grid: " << d[0] << "x" << d[1] << "x" << d[2] << '\n';
        const auto jac = ts::validate_jacobian(solid, samples);
        std::cout << "min jacobian: " << fmt(jac.min_det) << '\n';
        if (!jac.positive) warn("Jacobian determinant not positive; mapped scaffolds may fold");
    }

    void run() const {
        const auto e = extension(file);
        if (e == ".tdf") {
            const auto doc = ts::read_tdf_file(file);
            const auto& d = doc.tdf.dims();
            std::cout << "periods: " << fmt(doc.periods.x) << ' ' << fmt(doc.periods.y) << ' ' << fmt(doc.periods.z) << '\n'
                      << "tdf control grid: " << d[0] << "x" << d[1] << "x" << d[2] << '\n';
            const auto c = doc.tdf.coefficients();
            std::cout << "tdf coefficient range: " << fmt(*std::min_element(c.begin(), c.end())) << " .. "
                      << fmt(*std::max_element(c.begin(), c.end())) << '\n';
            check_solid(doc.solid);
        } else if (e == ".tbss") {
            check_solid(ts::read_tbss_file(file));
        } else if (e == ".stl") {
            auto is = ts::open_input(file, true);
            const auto mesh = ts::read_stl(is);
            print_statistics(mesh);
            if (!ts::is_closed(mesh)) warn("mesh is not closed");
        } else {
            throw CLI::ValidationError("file", "unknown file type '" + e + "' (expected .tdf, .tbss or .stl)");
        }
        std::cout << "ok\n";
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heterogeneous porous scaffold generation from TPMS and trivariate B-spline solids"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads for parallel kernels (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.parse_complete_callback([&] { ts::set_thread_count(threads); });

    MakeTbss make_tbss;
    TdfBuild tdf_build;
    Generate generate;
    Modify modify;
    Analyze analyze;
    Convert convert;
    Validate validate;
    make_tbss.add(app);
    tdf_build.add(app);
    generate.add(app);
    modify.add(app);
    analyze.add(app);
    convert.add(app);
    validate.add(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ts::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
