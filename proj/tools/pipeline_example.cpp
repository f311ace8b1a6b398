// Builds a graded P-pore scaffold inside a ball: porosity grows from the centre outwards.
#include <cmath>
#include <iostream>

#include "tpms_scaffold/scaffold.hpp"

namespace ts = tpms_scaffold;

int main(int argc, char** argv) {
    const std::string prefix = argc > 1 ? argv[1] : "graded_ball";
    try {
        const auto solid = ts::ball_solid(10.0);

        auto grid = ts::prescribed_function({30, 30, 30}, [](double u, double v, double w) {
            const double r = std::hypot(u - 0.5, v - 0.5, w - 0.5);
            return r * r;
        });
        grid = ts::normalize_to_range(grid, ts::TpmsType::P, ts::ThresholdRange{-0.6, 0.6});

        ts::LspiaOptions opt;
        opt.control_resolution = {12, 12, 12};
        const auto fit = ts::lspia_fit(grid, opt);
        std::cout << "lspia: " << fit.iterations << " iterations, residual " << fit.final_residual() << '\n';

        const ts::TdfDocument doc{ts::PeriodCoefficients::from_cells(3, 3, 3), fit.field, solid};
        ts::write_tdf_file(doc, prefix + ".tdf");

        const ts::ImplicitFieldSpec spec{ts::TpmsType::P, doc.periods, ts::StructureKind::Pore};
        const auto mesh = ts::map_mesh(solid, ts::polygonize(ts::sample_field(spec, doc.tdf, 80)));
        ts::write_stl_file(mesh, ts::StlMode::Binary, prefix + ".stl");

        const auto stats = ts::mesh_statistics(mesh);
        std::cout << "triangles: " << stats.triangle_count << "\nclosed: " << (stats.closed ? "yes" : "no") << '\n';
        if (stats.volume) std::cout << "volume: " << *stats.volume << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
