#include "fibcon/mesh_fixtures.hpp"
#include "fibcon/random.hpp"
#include "fibcon/surface_morse.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace fibcon::morse;
namespace fx = fibcon::morse::fixtures;

namespace {

ScalarMesh with_values(std::size_t n, std::vector<std::array<std::size_t, 3>> faces)
{
    ScalarMesh m;
    m.vertex_count = n;
    m.faces = std::move(faces);
    for (std::size_t i = 0; i < n; ++i)
        m.values.push_back(static_cast<double>(i));
    return m;
}

MeshError::Kind error_kind(const ScalarMesh& m)
{
    try {
        validate_mesh(m);
    } catch (const MeshError& e) {
        return e.kind;
    }
    ADD_FAILURE() << "mesh validated";
    return MeshError::Kind::Parse;
}

// Random smooth field on the sphere: a tilted height plus gaussian bumps.
fx::PointField random_sphere_field(fibcon::Rng& rng)
{
    std::array<double, 3> tilt{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const int bumps = static_cast<int>(rng.integer(0, 4));
    std::vector<std::array<double, 5>> b; // centre, amplitude, width
    for (int i = 0; i < bumps; ++i) {
        const double z = rng.uniform(-1, 1), phi = rng.uniform(0, 2 * std::numbers::pi);
        const double r = std::sqrt(1 - z * z);
        b.push_back({r * std::cos(phi), r * std::sin(phi), z, rng.uniform(-2.5, 2.5), rng.uniform(0.15, 0.6)});
    }
    return [tilt, b](const std::array<double, 3>& p) {
        double v = tilt[0] * p[0] + tilt[1] * p[1] + tilt[2] * p[2];
        for (const auto& q : b) {
            const double d2 = (p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]) + (p[2] - q[2]) * (p[2] - q[2]);
            v += q[3] * std::exp(-d2 / (q[4] * q[4]));
        }
        return v;
    };
}

std::vector<double> critical_values(const SurfaceMesh& m, const CriticalReport& r)
{
    std::vector<double> v;
    for (auto i : r.minima)
        v.push_back(m.value(i));
    for (auto i : r.maxima)
        v.push_back(m.value(i));
    for (const auto& s : r.saddles)
        v.push_back(m.value(s.vertex));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

} // namespace

TEST(Validation, Octahedron)
{
    const auto m = validate_mesh(fx::octahedron());
    EXPECT_EQ(m.euler_characteristic(), 2);
    EXPECT_EQ(m.genus(), 0);
    EXPECT_EQ(m.component_count(), 1u);
    EXPECT_EQ(m.edges().size(), 12u);
    for (std::size_t v = 0; v < m.vertex_count(); ++v)
        EXPECT_EQ(m.link(v).size(), 4u);
}

TEST(Validation, Errors)
{
    EXPECT_EQ(error_kind(fx::grid_patch(4)), MeshError::Kind::NotClosed);
    // Two tetrahedra sharing an edge, and two sharing a vertex.
    EXPECT_EQ(error_kind(with_values(6, {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2},
                                         {0, 1, 4}, {0, 4, 5}, {0, 5, 1}, {1, 5, 4}})),
              MeshError::Kind::NonManifoldEdge);
    EXPECT_EQ(error_kind(with_values(7, {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2},
                                         {0, 4, 5}, {0, 5, 6}, {0, 6, 4}, {4, 6, 5}})),
              MeshError::Kind::NonManifoldVertex);
    // Six-vertex projective plane.
    EXPECT_EQ(error_kind(with_values(6, {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 5, 1},
                                         {1, 2, 4}, {2, 3, 5}, {3, 4, 1}, {4, 5, 2}, {5, 1, 3}})),
              MeshError::Kind::NotOrientable);
    EXPECT_EQ(error_kind(with_values(3, {{0, 1, 7}})), MeshError::Kind::InvalidFace);
    EXPECT_EQ(error_kind(with_values(3, {{0, 1, 1}})), MeshError::Kind::InvalidFace);
    auto bad = fx::octahedron();
    bad.values[2] = NAN;
    EXPECT_EQ(error_kind(bad), MeshError::Kind::InvalidValue);
}

TEST(Validation, ReorientsFlippedFaces)
{
    auto m = fx::octahedron();
    std::swap(m.faces[3][1], m.faces[3][2]);
    EXPECT_NO_THROW(validate_mesh(m));
}

TEST(Soff, RoundTrip)
{
    const auto src = fx::cos_cos_torus(8);
    std::stringstream ss;
    write_soff(ss, src);
    const auto back = read_soff(ss);
    EXPECT_EQ(back.vertex_count, src.vertex_count);
    EXPECT_EQ(back.faces, src.faces);
    EXPECT_EQ(back.values, src.values);
}

TEST(Soff, ParseErrors)
{
    std::istringstream a("OFF\n3 1\n");
    EXPECT_THROW(read_soff(a), MeshError);
    std::istringstream b("SOFF\n3 1\n0 0 0 1\n0 0 0 2\n");
    EXPECT_THROW(read_soff(b), MeshError);
    std::istringstream c("SOFF # comment\n3 1\n0 0 0 1\n0 0 0 2\n0 0 0 3\n4 0 1 2\n");
    EXPECT_THROW(read_soff(c), MeshError);
}

TEST(Critical, Octahedron)
{
    const auto r = pl_critical_points(validate_mesh(fx::octahedron()));
    EXPECT_EQ(r.minima.size(), 1u);
    EXPECT_EQ(r.maxima.size(), 1u);
    EXPECT_EQ(r.saddle_count(), 0);
}

TEST(Critical, CosCosTorus)
{
    for (std::size_t n : {16u, 32u, 64u}) {
        const auto m = validate_mesh(fx::cos_cos_torus(n));
        const auto r = pl_critical_points(m);
        ASSERT_EQ(r.minima.size(), 1u);
        ASSERT_EQ(r.maxima.size(), 1u);
        EXPECT_NEAR(m.value(r.minima[0]), -2.0, 1e-12);
        EXPECT_NEAR(m.value(r.maxima[0]), 2.0, 1e-12);
        EXPECT_EQ(r.saddle_count(), 2);
        for (const auto& s : r.saddles)
            EXPECT_NEAR(m.value(s.vertex), 0.0, 1e-12);
        EXPECT_EQ(r.genus, 1);
    }
}

TEST(Critical, EulerRelationOnRandomFields)
{
    fibcon::Rng rng(8);
    for (int t = 0; t < 40; ++t) {
        const auto m = validate_mesh(fx::icosphere(2 + t % 2, random_sphere_field(rng)));
        const auto r = pl_critical_points(m);
        EXPECT_EQ(static_cast<std::int64_t>(r.minima.size() + r.maxima.size()) - r.saddle_count(), 2);
    }
}

TEST(Levels, StandingTorus)
{
    const auto m = validate_mesh(fx::standing_torus(16));
    EXPECT_EQ(level_components(m, 0.0), 2u);
    EXPECT_EQ(level_components(m, -1.9), 1u);
    EXPECT_EQ(level_components(m, 5.0), 0u);
}

TEST(Levels, DoubleBump)
{
    const auto m = validate_mesh(fx::double_bump_sphere(3));
    const auto r = pl_critical_points(m);
    ASSERT_EQ(r.saddle_count(), 1);
    const double s = m.value(r.saddles[0].vertex);
    EXPECT_EQ(level_components(m, 0.5 * (s + m.max_value())), 2u);
    EXPECT_EQ(level_components(m, 0.5 * (s + m.min_value())), 1u);
}

TEST(Reeb, LoopsMatchGenus)
{
    for (const auto& mesh : {fx::octahedron(), fx::cos_cos_torus(32), fx::standing_torus(16), fx::four_saddle_torus(32),
                             fx::double_bump_sphere(2)}) {
        const auto m = validate_mesh(mesh);
        const auto g = reeb_graph(m);
        EXPECT_EQ(g.loop_count, m.genus());
        EXPECT_EQ(g.components, 1u);
        const auto deg = g.degrees();
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            if (g.nodes[i].type == ReebNode::Type::Saddle)
                EXPECT_EQ(deg[i], g.nodes[i].multiplicity + 2);
            else
                EXPECT_EQ(deg[i], 1);
        }
        for (const auto& a : g.arcs)
            EXPECT_LT(g.nodes[a.lower].value, g.nodes[a.upper].value + 1e-15);
    }
}

TEST(Reeb, RandomTorusFields)
{
    fibcon::Rng rng(21);
    for (int t = 0; t < 30; ++t) {
        const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1), c = rng.uniform(0.2, 1), ph = rng.uniform(0, 6);
        const auto m = validate_mesh(fx::torus_grid(24, [=](double x, double y) {
            return std::cos(2 * std::numbers::pi * x) + c * std::cos(2 * std::numbers::pi * y + ph) +
                   a * std::sin(2 * std::numbers::pi * (x + y)) + b * std::cos(4 * std::numbers::pi * x);
        }));
        const auto g = reeb_graph(m);
        EXPECT_EQ(g.loop_count, 1);
        EXPECT_GE(pl_critical_points(m).saddle_count(), 2);
    }
}

TEST(Reeb, DotOutput)
{
    std::ostringstream os;
    write_dot(os, reeb_graph(validate_mesh(fx::octahedron())));
    const auto s = os.str();
    EXPECT_EQ(s.rfind("graph reeb {", 0), 0u);
    EXPECT_NE(s.find(" -- "), std::string::npos);
    EXPECT_EQ(s.back(), '\n');
}

TEST(Connectedness, Fixtures)
{
    const auto oct = connectedness_report(validate_mesh(fx::octahedron()));
    EXPECT_TRUE(oct.all_levels_connected);
    const auto cc = connectedness_report(validate_mesh(fx::cos_cos_torus(64)));
    EXPECT_TRUE(cc.all_levels_connected);
    ASSERT_EQ(cc.parity_per_level.size(), 1u);
    EXPECT_EQ(cc.parity_per_level[0].saddles, 2);
    EXPECT_TRUE(cc.genus_bound_ok);
    EXPECT_FALSE(connectedness_report(validate_mesh(fx::standing_torus(16))).all_levels_connected);
    EXPECT_FALSE(connectedness_report(validate_mesh(fx::double_bump_sphere(3))).all_levels_connected);
}

TEST(GenusBound, GenusOneFixturesHaveTwoSaddles)
{
    for (const auto& mesh : {fx::cos_cos_torus(16), fx::cos_cos_torus(64), fx::standing_torus(16),
                             fx::standing_torus(32), fx::four_saddle_torus(32)}) {
        const auto m = validate_mesh(mesh);
        ASSERT_EQ(m.genus(), 1);
        const auto rep = connectedness_report(m);
        EXPECT_GE(rep.saddle_count, 2);
        EXPECT_TRUE(rep.genus_bound_ok);
    }
    const auto four = connectedness_report(validate_mesh(fx::four_saddle_torus(32)));
    EXPECT_EQ(four.saddle_count, 4);
    EXPECT_FALSE(four.all_levels_connected);
}

TEST(Morse2, SaddleFreeIffAllLevelsConnected)
{
    fibcon::Rng rng(2718);
    int violations = 0, with_saddles = 0, without = 0;
    for (int t = 0; t < 200; ++t) {
        const auto m = validate_mesh(fx::icosphere(2 + t % 3, random_sphere_field(rng)));
        const auto r = pl_critical_points(m);
        const auto v = critical_values(m, r);
        bool connected = true;
        for (std::size_t i = 1; i < v.size(); ++i)
            connected = connected && level_components(m, 0.5 * (v[i - 1] + v[i])) <= 1;
        (r.saddle_count() == 0 ? without : with_saddles)++;
        if ((r.saddle_count() == 0) != connected)
            ++violations;
    }
    EXPECT_EQ(violations, 0);
    EXPECT_GT(with_saddles, 20);
    EXPECT_GT(without, 20);
}
