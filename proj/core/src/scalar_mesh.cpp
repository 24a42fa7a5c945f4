#include "fibcon/surface_morse.hpp"

#include "disjoint_sets.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <tuple>

namespace fibcon::morse {

MeshError::MeshError(Kind k, std::vector<std::size_t> s, const std::string& what)
    : std::runtime_error(fmt::format("{}: {}", to_string(k), what)), kind(k), simplex(std::move(s))
{
}

std::string to_string(MeshError::Kind k)
{
    switch (k) {
    case MeshError::Kind::NotClosed: return "NotClosed";
    case MeshError::Kind::NotOrientable: return "NotOrientable";
    case MeshError::Kind::NonManifoldEdge: return "NonManifoldEdge";
    case MeshError::Kind::NonManifoldVertex: return "NonManifoldVertex";
    case MeshError::Kind::InvalidFace: return "InvalidFace";
    case MeshError::Kind::InvalidValue: return "InvalidValue";
    case MeshError::Kind::Parse: return "Parse";
    }
    return "?";
}

std::int64_t SurfaceMesh::euler_characteristic() const
{
    return static_cast<std::int64_t>(mesh_.vertex_count) - static_cast<std::int64_t>(edges_.size()) +
           static_cast<std::int64_t>(mesh_.faces.size());
}

std::int64_t SurfaceMesh::genus() const
{
    return (2 * static_cast<std::int64_t>(components_) - euler_characteristic()) / 2;
}

namespace {

using Face = std::array<std::size_t, 3>;

// Whether the oriented face runs u -> v.
bool runs(const Face& f, std::size_t u, std::size_t v)
{
    for (int i = 0; i < 3; ++i)
        if (f[i] == u && f[(i + 1) % 3] == v)
            return true;
    return false;
}

std::array<std::size_t, 2> edge_key(std::size_t a, std::size_t b)
{
    return a < b ? std::array<std::size_t, 2>{a, b} : std::array<std::size_t, 2>{b, a};
}

} // namespace

SurfaceMesh validate_mesh(const ScalarMesh& input)
{
    using Kind = MeshError::Kind;
    const std::size_t nv = input.vertex_count;

    if (input.values.size() != nv)
        throw MeshError(Kind::InvalidValue, {},
                        fmt::format("{} values for {} vertices", input.values.size(), nv));
    for (std::size_t v = 0; v < nv; ++v)
        if (!std::isfinite(input.values[v]))
            throw MeshError(Kind::InvalidValue, {v}, fmt::format("vertex {} has a non-finite value", v));
    if (!input.positions.empty() && input.positions.size() != nv)
        throw MeshError(Kind::InvalidValue, {},
                        fmt::format("{} positions for {} vertices", input.positions.size(), nv));
    if (input.faces.empty())
        throw MeshError(Kind::NotClosed, {}, "mesh has no faces");

    SurfaceMesh out;
    out.mesh_ = input;
    auto& faces = out.mesh_.faces;

    std::vector<Face> sorted_faces;
    sorted_faces.reserve(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto& t = faces[f];
        for (auto v : t)
            if (v >= nv)
                throw MeshError(Kind::InvalidFace, {t[0], t[1], t[2]},
                                fmt::format("face {} references vertex {} of {}", f, v, nv));
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw MeshError(Kind::InvalidFace, {t[0], t[1], t[2]}, fmt::format("face {} is degenerate", f));
        Face s = t;
        std::sort(s.begin(), s.end());
        sorted_faces.push_back(s);
    }
    {
        auto dup = sorted_faces;
        std::sort(dup.begin(), dup.end());
        if (auto it = std::adjacent_find(dup.begin(), dup.end()); it != dup.end())
            throw MeshError(Kind::InvalidFace, {(*it)[0], (*it)[1], (*it)[2]}, "face appears twice");
    }

    // Edge incidences.
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> inc; // (lo, hi, face)
    inc.reserve(3 * faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f)
        for (int i = 0; i < 3; ++i) {
            const auto k = edge_key(faces[f][i], faces[f][(i + 1) % 3]);
            inc.emplace_back(k[0], k[1], f);
        }
    std::sort(inc.begin(), inc.end());

    std::vector<std::array<std::size_t, 2>> edge_faces;
    for (std::size_t i = 0; i < inc.size();) {
        std::size_t j = i;
        while (j < inc.size() && std::get<0>(inc[j]) == std::get<0>(inc[i]) && std::get<1>(inc[j]) == std::get<1>(inc[i]))
            ++j;
        const std::size_t a = std::get<0>(inc[i]), b = std::get<1>(inc[i]);
        if (j - i == 1)
            throw MeshError(Kind::NotClosed, {a, b}, fmt::format("edge ({}, {}) is on the boundary", a, b));
        if (j - i > 2)
            throw MeshError(Kind::NonManifoldEdge, {a, b},
                            fmt::format("edge ({}, {}) belongs to {} faces", a, b, j - i));
        out.edges_.push_back({a, b});
        edge_faces.push_back({std::get<2>(inc[i]), std::get<2>(inc[i + 1])});
        i = j;
    }

    auto edge_id = [&](std::size_t a, std::size_t b) {
        const auto k = edge_key(a, b);
        const auto it = std::lower_bound(out.edges_.begin(), out.edges_.end(), k);
        return static_cast<std::size_t>(it - out.edges_.begin());
    };

    // Face adjacency through edges; orientation by breadth-first propagation.
    std::vector<std::array<std::size_t, 3>> face_nbr(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f)
        for (int i = 0; i < 3; ++i) {
            const auto e = edge_id(faces[f][i], faces[f][(i + 1) % 3]);
            face_nbr[f][i] = edge_faces[e][0] == f ? edge_faces[e][1] : edge_faces[e][0];
        }

    std::vector<char> seen(faces.size(), 0);
    std::vector<std::size_t> queue;
    std::size_t components = 0;
    for (std::size_t start = 0; start < faces.size(); ++start) {
        if (seen[start])
            continue;
        ++components;
        seen[start] = 1;
        queue.assign(1, start);
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const std::size_t f = queue[qi];
            for (int i = 0; i < 3; ++i) {
                const std::size_t g = face_nbr[f][i];
                const auto& tf = faces[f];
                // The shared edge as traversed by f in its current orientation.
                std::size_t a = 0, b = 0;
                for (int k = 0; k < 3; ++k) {
                    const std::size_t p = tf[k], q = tf[(k + 1) % 3];
                    if ((p != faces[g][0] && p != faces[g][1] && p != faces[g][2]) ||
                        (q != faces[g][0] && q != faces[g][1] && q != faces[g][2]))
                        continue;
                    a = p;
                    b = q;
                }
                if (!seen[g]) {
                    if (runs(faces[g], a, b))
                        std::swap(faces[g][1], faces[g][2]);
                    seen[g] = 1;
                    queue.push_back(g);
                } else if (runs(faces[g], a, b)) {
                    throw MeshError(Kind::NotOrientable, {a, b},
                                    fmt::format("faces {} and {} disagree on edge ({}, {})", f, g, a, b));
                }
            }
        }
    }
    out.components_ = components;

    out.face_edges_.resize(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f)
        for (int i = 0; i < 3; ++i)
            out.face_edges_[f][i] = edge_id(faces[f][i], faces[f][(i + 1) % 3]);

    // Vertex links in cyclic order.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> next(nv);
    for (const auto& t : faces)
        for (int i = 0; i < 3; ++i)
            next[t[i]].emplace_back(t[(i + 1) % 3], t[(i + 2) % 3]);
    out.links_.resize(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        auto& nx = next[v];
        if (nx.empty())
            throw MeshError(Kind::NonManifoldVertex, {v}, fmt::format("vertex {} is not in any face", v));
        std::sort(nx.begin(), nx.end());
        for (std::size_t i = 1; i < nx.size(); ++i)
            if (nx[i].first == nx[i - 1].first)
                throw MeshError(Kind::NonManifoldVertex, {v}, fmt::format("link of vertex {} is not a cycle", v));
        auto succ = [&](std::size_t w) {
            const auto it = std::lower_bound(nx.begin(), nx.end(), std::make_pair(w, std::size_t{0}));
            return (it != nx.end() && it->first == w) ? it->second : nv;
        };
        auto& cycle = out.links_[v];
        std::size_t w = nx.front().first;
        do {
            cycle.push_back(w);
            w = succ(w);
        } while (w != nv && w != nx.front().first && cycle.size() <= nx.size());
        if (w != nx.front().first || cycle.size() != nx.size() || cycle.size() < 3)
            throw MeshError(Kind::NonManifoldVertex, {v},
                            fmt::format("link of vertex {} is not a single cycle", v));
    }

    out.order_.resize(nv);
    std::iota(out.order_.begin(), out.order_.end(), std::size_t{0});
    const auto& vals = out.mesh_.values;
    std::sort(out.order_.begin(), out.order_.end(),
              [&](std::size_t a, std::size_t b) { return vals[a] < vals[b] || (vals[a] == vals[b] && a < b); });
    out.rank_.resize(nv);
    for (std::size_t r = 0; r < nv; ++r)
        out.rank_[out.order_[r]] = r;
    return out;
}

namespace {

[[noreturn]] void parse_fail(const std::string& what)
{
    throw MeshError(MeshError::Kind::Parse, {}, what);
}

} // namespace

ScalarMesh read_soff(std::istream& in)
{
    std::stringstream clean;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        clean << line << '\n';
    }

    std::string magic;
    if (!(clean >> magic) || magic != "SOFF")
        parse_fail("missing SOFF header");
    long long nv = 0, nf = 0;
    if (!(clean >> nv >> nf) || nv < 0 || nf < 0)
        parse_fail("expected vertex and face counts");

    ScalarMesh m;
    m.vertex_count = static_cast<std::size_t>(nv);
    m.values.resize(m.vertex_count);
    m.positions.resize(m.vertex_count);
    for (std::size_t v = 0; v < m.vertex_count; ++v) {
        auto& p = m.positions[v];
        if (!(clean >> p[0] >> p[1] >> p[2] >> m.values[v]))
            parse_fail(fmt::format("vertex line {} needs x y z s", v));
    }
    m.faces.resize(static_cast<std::size_t>(nf));
    for (std::size_t f = 0; f < m.faces.size(); ++f) {
        long long k = 0, a = -1, b = -1, c = -1;
        if (!(clean >> k) || k != 3)
            parse_fail(fmt::format("face {} is not a triangle", f));
        if (!(clean >> a >> b >> c) || a < 0 || b < 0 || c < 0)
            parse_fail(fmt::format("face {} needs three vertex indices", f));
        m.faces[f] = {static_cast<std::size_t>(a), static_cast<std::size_t>(b), static_cast<std::size_t>(c)};
    }
    std::string extra;
    if (clean >> extra)
        parse_fail("trailing data after the last face");
    return m;
}

ScalarMesh read_soff_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        parse_fail(fmt::format("cannot open '{}'", path));
    return read_soff(in);
}

void write_soff(std::ostream& out, const ScalarMesh& m)
{
    out << "SOFF\n" << m.vertex_count << ' ' << m.faces.size() << '\n';
    for (std::size_t v = 0; v < m.vertex_count; ++v) {
        const std::array<double, 3> p = m.positions.empty() ? std::array<double, 3>{0, 0, 0} : m.positions[v];
        out << fmt::format("{} {} {} {}\n", p[0], p[1], p[2], m.values[v]);
    }
    for (const auto& f : m.faces)
        out << fmt::format("3 {} {} {}\n", f[0], f[1], f[2]);
}

} // namespace fibcon::morse
