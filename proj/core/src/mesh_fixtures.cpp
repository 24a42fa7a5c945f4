#include "fibcon/mesh_fixtures.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <utility>

namespace fibcon::morse::fixtures {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double quantize(double v) { return std::round(v * 1e12) / 1e12; }

} // namespace

ScalarMesh octahedron()
{
    ScalarMesh m;
    m.positions = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    m.vertex_count = m.positions.size();
    for (const auto& p : m.positions)
        m.values.push_back(p[2]);
    m.faces = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
    return m;
}

ScalarMesh torus_grid(std::size_t n, const TorusField& f)
{
    ScalarMesh m;
    m.vertex_count = n * n;
    auto id = [n](std::size_t i, std::size_t j) { return (i % n) * n + (j % n); };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double x = static_cast<double>(i) / static_cast<double>(n);
            const double y = static_cast<double>(j) / static_cast<double>(n);
            const double ring = 2.0 + 0.7 * std::cos(two_pi * y);
            m.positions.push_back({ring * std::cos(two_pi * x), ring * std::sin(two_pi * x), 0.7 * std::sin(two_pi * y)});
            m.values.push_back(quantize(f(x, y)));
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const auto a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            m.faces.push_back({a, b, c});
            m.faces.push_back({a, c, d});
        }
    return m;
}

ScalarMesh cos_cos_torus(std::size_t n)
{
    return torus_grid(n, [](double x, double y) { return std::cos(two_pi * x) + std::cos(two_pi * y); });
}

ScalarMesh standing_torus(std::size_t n)
{
    return torus_grid(n, [](double x, double y) { return (2.0 + 0.7 * std::cos(two_pi * y)) * std::cos(two_pi * x); });
}

ScalarMesh four_saddle_torus(std::size_t n)
{
    return torus_grid(n, [](double x, double y) { return std::cos(two_pi * x) + std::cos(2.0 * two_pi * y); });
}

ScalarMesh icosphere(int subdivisions, const PointField& f)
{
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<std::array<double, 3>> pts = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
        {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    std::vector<std::array<std::size_t, 3>> tris = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
        {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    auto normalize = [](std::array<double, 3> p) {
        const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        return std::array<double, 3>{p[0] / r, p[1] / r, p[2] / r};
    };
    for (auto& p : pts)
        p = normalize(p);

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> mid;
        auto midpoint = [&](std::size_t a, std::size_t b) {
            const auto key = std::minmax(a, b);
            const auto it = mid.find(key);
            if (it != mid.end())
                return it->second;
            const auto& p = pts[a];
            const auto& q = pts[b];
            pts.push_back(normalize({p[0] + q[0], p[1] + q[1], p[2] + q[2]}));
            mid.emplace(key, pts.size() - 1);
            return pts.size() - 1;
        };
        std::vector<std::array<std::size_t, 3>> next;
        next.reserve(4 * tris.size());
        for (const auto& t : tris) {
            const auto ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        tris = std::move(next);
    }

    ScalarMesh m;
    m.vertex_count = pts.size();
    m.positions = pts;
    m.faces = tris;
    for (const auto& p : pts)
        m.values.push_back(f(p));
    return m;
}

ScalarMesh double_bump_sphere(int subdivisions)
{
    const double s = std::sin(std::numbers::pi / 3.0), c = std::cos(std::numbers::pi / 3.0);
    return icosphere(subdivisions, [s, c](const std::array<double, 3>& p) {
        const double da = s * p[0] + c * p[2];
        const double db = -s * p[0] + c * p[2];
        return std::exp(4.0 * da) + std::exp(4.0 * db);
    });
}

ScalarMesh grid_patch(std::size_t n)
{
    ScalarMesh m;
    m.vertex_count = n * n;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            m.positions.push_back({static_cast<double>(i), static_cast<double>(j), 0.0});
            m.values.push_back(static_cast<double>(i + j));
        }
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const auto a = i * n + j, b = (i + 1) * n + j, cc = (i + 1) * n + j + 1, d = i * n + j + 1;
            m.faces.push_back({a, b, cc});
            m.faces.push_back({a, cc, d});
        }
    return m;
}

} // namespace fibcon::morse::fixtures
