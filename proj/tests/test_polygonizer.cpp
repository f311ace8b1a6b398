#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tpms_scaffold/analysis.hpp"
#include "tpms_scaffold/polygonizer.hpp"

using namespace tpms_scaffold;

namespace {

SampleGrid with_structure(SampleGrid s, StructureKind k, double eps = kDefaultSheetThickness) {
    s.structure = k;
    s.epsilon = eps;
    return s;
}

// Independent voxel estimate of the fraction of [0,1]^3 where pred(u,v,w) holds.
template <class F>
double voxel_fraction(int n, F&& pred) {
    long count = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) count += pred((a + 0.5) / n, (b + 0.5) / n, (c + 0.5) / n);
    return static_cast<double>(count) / (static_cast<double>(n) * n * n);
}

SampleGrid p_benchmark(int res, StructureKind k) {
    const ImplicitFieldSpec spec{TpmsType::P, PeriodCoefficients::from_cells(2, 2, 2), k, kDefaultSheetThickness};
    return sample_field(spec, constant_field(0.0), res);
}

} // namespace

TEST(Sampling, ConstantTdfAtOrigin) {
    const ImplicitFieldSpec spec{TpmsType::P, PeriodCoefficients(3, 5, 7), StructureKind::Pore, 0.3};
    const auto s = sample_field(spec, constant_field(0.25), 6);
    EXPECT_NEAR(s.at(0, 0, 0), 3 - 0.25, 1e-15);
    const auto t = sample_field(spec, constant_field(0.25), 2);
    EXPECT_EQ(t.values.size(), 8u);
    EXPECT_THROW(sample_field(spec, constant_field(0.25), 1), InvalidArgument);
}

TEST(Sampling, AgreesWithPointwiseField) {
    const ImplicitFieldSpec spec{TpmsType::G, PeriodCoefficients(9, 11, 13), StructureKind::Rod, 0.3};
    const auto kv = KnotVector::uniform_clamped(6, 3);
    std::vector<double> c(216);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    for (double& x : c) x = U(rng);
    const TrivariateScalarField tdf({kv, kv, kv}, c);
    const auto s = sample_field(spec, tdf, {7, 9, 5});
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 9; ++j)
            for (int k = 0; k < 5; ++k) {
                const Vec3 p = s.position(i, j, k);
                EXPECT_NEAR(s.at(i, j, k), scaffold_field(spec, tdf, p.x, p.y, p.z), 1e-13);
            }
}

TEST(Sampling, NegatedFunctionNegatesSamples) {
    auto f = [](double u, double v, double w) { return std::sin(3 * u) * v - w; };
    const auto a = sample_function({5, 6, 7}, f);
    const auto b = sample_function({5, 6, 7}, [&](double u, double v, double w) { return -f(u, v, w); });
    for (std::size_t n = 0; n < a.values.size(); ++n) EXPECT_EQ(a.values[n], -b.values[n]);
}

TEST(MarchingTetrahedra, AllPositiveIsEmpty) {
    const auto s = sample_function({6, 6, 6}, [](double, double, double) { return 1.0; });
    EXPECT_TRUE(marching_tetrahedra(s).mesh.empty());
}

TEST(MarchingTetrahedra, LinearFieldGivesUnitPlane) {
    const auto s = sample_function({100, 100, 100}, [](double u, double, double) { return u - 0.5; });
    const auto surf = marching_tetrahedra(s);
    EXPECT_NEAR(mesh_area(surf.mesh), 1.0, 1e-9);
    for (const Vec3& v : surf.mesh.vertices) EXPECT_NEAR(v.x, 0.5, 1e-12);
    // Normals point toward f > 0, i.e. +u.
    for (const auto& t : surf.mesh.triangles) EXPECT_GT(triangle_normal(surf.mesh, t).x, 0.0);
}

TEST(MarchingTetrahedra, ObliquePlaneArea) {
    // The cut u + v = 0.83 is a rectangle: 0.83*sqrt(2) across the uv square, 1 along w.
    const auto s = sample_function({41, 37, 29}, [](double u, double v, double) { return u + v - 0.83; });
    const auto surf = marching_tetrahedra(s);
    EXPECT_NEAR(mesh_area(surf.mesh), 0.83 * std::sqrt(2.0), 1e-10);
}

TEST(MarchingTetrahedra, NearIsoSamplesMoveSurfaceByAtMostTheBand) {
    // u + v = 0.8 passes exactly through grid vertices; those samples leave the band.
    const auto s = sample_function({41, 37, 29}, [](double u, double v, double) { return u + v - 0.8; });
    const auto surf = marching_tetrahedra(s);
    const double band = detail::kIsoBand * 2.0; // value range of u + v - 0.8 is 2
    for (const Vec3& p : surf.mesh.vertices) EXPECT_LE(std::abs(p.x + p.y - 0.8), band + 1e-15);
    EXPECT_NEAR(mesh_area(surf.mesh), 0.8 * std::sqrt(2.0), 4 * band);
}

TEST(MarchingTetrahedra, SphereIsClosedWithEulerTwo) {
    const auto s = sample_function({100, 100, 100}, [](double u, double v, double w) {
        return 0.4 - std::sqrt((u - 0.5) * (u - 0.5) + (v - 0.5) * (v - 0.5) + (w - 0.5) * (w - 0.5));
    });
    const auto surf = marching_tetrahedra(s);
    EXPECT_TRUE(is_closed(surf.mesh));
    EXPECT_EQ(euler_characteristic(surf.mesh), 2);
    // Normals toward f > 0 point inward, so the divergence-theorem volume is negative.
    EXPECT_NEAR(-mesh_volume(surf.mesh), 4.0 / 3.0 * std::numbers::pi * 0.064, 2e-3);
}

TEST(MarchingTetrahedra, ExactIsoValuesAreTieBroken) {
    // Integer-valued samples hit the iso value exactly on whole grid planes.
    const auto s = sample_function({9, 9, 9}, [](double u, double v, double) { return std::round(8 * u) - 4 + 0 * v; });
    const auto surf = marching_tetrahedra(s);
    EXPECT_FALSE(surf.mesh.empty());
    const auto rep = analyze_edges(surf.mesh);
    EXPECT_TRUE(rep.misoriented.empty());
    for (const auto& t : surf.mesh.triangles) EXPECT_TRUE(t[0] != t[1] && t[1] != t[2] && t[0] != t[2]);
}

TEST(MarchingTetrahedra, CrackFreeSurfaceBoundaryOnDomainFaces) {
    const auto s = p_benchmark(40, StructureKind::Pore);
    const auto surf = marching_tetrahedra(s);
    const auto rep = analyze_edges(surf.mesh);
    EXPECT_TRUE(rep.misoriented.empty());
    auto on_face = [](const Vec3& p) {
        for (int d = 0; d < 3; ++d)
            if (p[d] == 0.0 || p[d] == 1.0) return true;
        return false;
    };
    ASSERT_FALSE(rep.unpaired.empty());
    for (const auto& [a, b] : rep.unpaired) {
        EXPECT_TRUE(on_face(surf.mesh.vertices[static_cast<std::size_t>(a)]));
        EXPECT_TRUE(on_face(surf.mesh.vertices[static_cast<std::size_t>(b)]));
    }
}

TEST(Closure, WholeDomainRodIsCube) {
    const auto s = with_structure(sample_function({5, 6, 7}, [](double, double, double) { return -1.0; }), StructureKind::Rod);
    const auto m = polygonize(s);
    EXPECT_TRUE(m.closed);
    EXPECT_NEAR(mesh_volume(m), 1.0, 1e-9);
    EXPECT_NEAR(mesh_area(m), 6.0, 1e-9);
    const auto pore = polygonize(with_structure(s, StructureKind::Pore));
    EXPECT_TRUE(pore.empty());
}

TEST(Closure, PRodBenchmarkVolume) {
    const auto s = p_benchmark(100, StructureKind::Rod);
    const auto m = polygonize(s);
    EXPECT_TRUE(is_closed(m));
    const double oracle = voxel_fraction(200, [](double u, double v, double w) {
        return psi(TpmsType::P, PeriodCoefficients::from_cells(2, 2, 2), u, v, w) <= 0.0;
    });
    EXPECT_NEAR(oracle, 0.5, 0.01);
    EXPECT_NEAR(mesh_volume(m), 0.5, 0.02);
    EXPECT_NEAR(mesh_volume(m), oracle, 0.02);
}

TEST(Closure, PoreAndRodVolumesComplement) {
    const ImplicitFieldSpec spec{TpmsType::G, PeriodCoefficients(10, 12, 14), StructureKind::Pore, 0.3};
    const auto kv = KnotVector::uniform_clamped(5, 3);
    std::vector<double> c(125);
    for (std::size_t n = 0; n < c.size(); ++n) c[n] = 0.5 * std::sin(0.7 * static_cast<double>(n));
    const TrivariateScalarField tdf({kv, kv, kv}, c);
    const auto s = sample_field(spec, tdf, 60);
    const double pore = mesh_volume(polygonize(with_structure(s, StructureKind::Pore)));
    const double rod = mesh_volume(polygonize(with_structure(s, StructureKind::Rod)));
    EXPECT_NEAR(pore + rod, 1.0, 0.01);
    EXPECT_NEAR(pore + rod, 1.0, 1e-9); // both solids share the same interpolated surface
}

TEST(Closure, SheetIsClosedAndMatchesVoxelFraction) {
    for (TpmsType t : kAllTpmsTypes) {
        const ImplicitFieldSpec spec{t, PeriodCoefficients::from_cells(2, 2, 2), StructureKind::Sheet, 0.3};
        const auto s = sample_field(spec, constant_field(valid_range(t).mid()), 64);
        const auto m = polygonize(s);
        EXPECT_TRUE(is_closed(m)) << to_string(t);
        const double voxels = 1.0 - voxel_porosity(spec, constant_field(valid_range(t).mid()), 128);
        EXPECT_NEAR(mesh_volume(m), voxels, 0.02) << to_string(t);
    }
}

TEST(Closure, SheetVolumeIsDifferenceOfRods) {
    const auto base = p_benchmark(48, StructureKind::Sheet);
    const double sheet = mesh_volume(polygonize(base));
    const double rod0 = mesh_volume(polygonize(with_structure(base, StructureKind::Rod)));
    auto shifted = base;
    for (double& v : shifted.values) v += 0.3;
    const double rod_eps = mesh_volume(polygonize(with_structure(shifted, StructureKind::Rod)));
    EXPECT_NEAR(sheet, rod0 - rod_eps, 1e-9);
}

TEST(Closure, ResolutionConvergence) {
    const double v50 = mesh_volume(polygonize(p_benchmark(50, StructureKind::Rod)));
    const double v100 = mesh_volume(polygonize(p_benchmark(100, StructureKind::Rod)));
    EXPECT_LT(std::abs(v50 - v100) / v100, 0.02);
}

TEST(Closure, AllTypesAndStructuresWatertight) {
    for (TpmsType t : kAllTpmsTypes)
        for (StructureKind k : {StructureKind::Pore, StructureKind::Rod, StructureKind::Sheet}) {
            const ImplicitFieldSpec spec{t, PeriodCoefficients(13, 8, 10), k, 0.3};
            const auto s = sample_field(spec, constant_field(0.6 * valid_range(t).hi), {31, 27, 23});
            const auto m = polygonize(s);
            const auto rep = analyze_edges(m);
            EXPECT_TRUE(rep.unpaired.empty() && rep.misoriented.empty()) << to_string(t) << " " << to_string(k);
        }
}

TEST(Closure, NoZeroAreaTriangles) {
    const auto m = polygonize(p_benchmark(100, StructureKind::Rod));
    std::size_t tiny = 0;
    for (const auto& t : m.triangles) tiny += 0.5 * norm(triangle_normal(m, t)) <= 1e-12;
    EXPECT_EQ(tiny, 0u);
}

TEST(Closure, FailureReportsEdges) {
    const auto s = with_structure(p_benchmark(12, StructureKind::Pore), StructureKind::Pore);
    auto surf = marching_tetrahedra(s);
    surf.mesh.triangles.pop_back();
    try {
        close_structure(surf, s, StructureKind::Pore);
        FAIL();
    } catch (const ClosureError& e) {
        EXPECT_FALSE(e.edges().empty());
    }
}

TEST(MeshVolume, UnitTetrahedronAndOpenMesh) {
    TriangleMesh tet;
    tet.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    tet.triangles = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
    EXPECT_NEAR(mesh_volume(tet), 1.0 / 6.0, 1e-15);
    tet.triangles.pop_back();
    EXPECT_THROW(mesh_volume(tet), InvalidArgument);
}
