#include "fibcon/surface_morse.hpp"

#include "disjoint_sets.hpp"

#include <algorithm>
#include <cmath>

namespace fibcon::morse {

int CriticalReport::saddle_count() const
{
    int s = 0;
    for (const auto& sd : saddles)
        s += sd.multiplicity;
    return s;
}

CriticalReport pl_critical_points(const SurfaceMesh& m)
{
    CriticalReport rep;
    for (std::size_t v = 0; v < m.vertex_count(); ++v) {
        const auto& link = m.link(v);
        std::size_t lower = 0;
        int runs = 0;
        for (std::size_t i = 0; i < link.size(); ++i) {
            const bool lo = m.below(link[i], v);
            const bool prev = m.below(link[(i + link.size() - 1) % link.size()], v);
            lower += lo ? 1 : 0;
            runs += (lo && !prev) ? 1 : 0;
        }
        if (lower == 0)
            rep.minima.push_back(v);
        else if (lower == link.size())
            rep.maxima.push_back(v);
        else if (runs >= 2)
            rep.saddles.push_back({v, runs - 1});
    }
    rep.euler_characteristic = m.euler_characteristic();
    rep.genus = m.genus();
    return rep;
}

std::size_t level_components(const SurfaceMesh& m, double c)
{
    const auto& vals = m.values();
    if (!(c >= m.min_value() && c <= m.max_value()))
        return 0;

    // Sorted order makes the exact-hit test and the gap lookup a binary search.
    const std::size_t n = m.vertex_count();
    auto value_at = [&](std::size_t r) { return vals[m.vertex_at_rank(r)]; };
    std::size_t lo = 0, hi = n;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (value_at(mid) < c)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < n && value_at(lo) == c) {
        std::size_t r = lo;
        while (r < n && value_at(r) == c)
            ++r;
        if (r == n)
            return 0;
        c += 0.5 * (value_at(r) - c);
    }

    const auto& edges = m.edges();
    std::vector<std::size_t> slot(edges.size(), static_cast<std::size_t>(-1));
    std::size_t crossed = 0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const double a = vals[edges[e][0]], b = vals[edges[e][1]];
        if ((a < c) != (b < c))
            slot[e] = crossed++;
    }
    detail::DisjointSets ds(crossed);
    for (const auto& fe : m.face_edges()) {
        std::size_t first = static_cast<std::size_t>(-1);
        for (auto e : fe) {
            if (slot[e] == static_cast<std::size_t>(-1))
                continue;
            if (first == static_cast<std::size_t>(-1))
                first = slot[e];
            else
                ds.unite(first, slot[e]);
        }
    }
    return ds.set_count();
}

ConnectednessReport connectedness_report(const SurfaceMesh& m)
{
    return connectedness_report(m, reeb_graph(m));
}

ConnectednessReport connectedness_report(const SurfaceMesh& m, const ReebGraph& g)
{
    ConnectednessReport rep;
    rep.genus = m.genus();
    rep.euler_characteristic = m.euler_characteristic();
    for (const auto& node : g.nodes) {
        switch (node.type) {
        case ReebNode::Type::Minimum: ++rep.min_count; break;
        case ReebNode::Type::Maximum: ++rep.max_count; break;
        case ReebNode::Type::Saddle: rep.saddle_count += node.multiplicity; break;
        }
    }
    rep.genus_bound_ok = rep.saddle_count >= 2 * rep.genus;

    // Cluster node values into real levels.
    const double range = m.max_value() - m.min_value();
    const double tie = 1e-12 * range;
    std::vector<std::size_t> by_value(g.nodes.size());
    for (std::size_t i = 0; i < by_value.size(); ++i)
        by_value[i] = i;
    std::stable_sort(by_value.begin(), by_value.end(),
                     [&](std::size_t a, std::size_t b) { return g.nodes[a].value < g.nodes[b].value; });
    std::vector<std::size_t> level_of(g.nodes.size());
    std::vector<double> level_value;
    for (std::size_t k = 0; k < by_value.size(); ++k) {
        const double v = g.nodes[by_value[k]].value;
        if (level_value.empty() || v - level_value.back() > tie)
            level_value.push_back(v);
        level_of[by_value[k]] = level_value.size() - 1;
    }

    auto note = [&](std::size_t count) {
        rep.max_level_components = std::max(rep.max_level_components, count);
        if (count > 1)
            rep.all_levels_connected = false;
    };

    const std::size_t nl = level_value.size();
    std::vector<std::size_t> open_count(nl, 0);    // arcs over (L_k, L_{k+1})
    std::vector<std::size_t> through_count(nl, 0); // arcs strictly across L_k
    for (const auto& arc : g.arcs) {
        const std::size_t a = level_of[arc.lower], b = level_of[arc.upper];
        for (std::size_t k = a; k < b; ++k)
            ++open_count[k];
        for (std::size_t k = a + 1; k < b; ++k)
            ++through_count[k];
    }

    detail::DisjointSets groups(g.nodes.size());
    for (const auto& arc : g.arcs)
        if (level_of[arc.lower] == level_of[arc.upper])
            groups.unite(arc.lower, arc.upper);
    std::vector<std::size_t> group_count(nl, 0);
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        if (groups.find(i) == i)
            ++group_count[level_of[i]];

    for (std::size_t k = 0; k < nl; ++k) {
        note(group_count[k] + through_count[k]);
        if (k + 1 < nl)
            note(open_count[k]);
    }

    std::vector<int> saddles_at(nl, 0);
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        if (g.nodes[i].type == ReebNode::Type::Saddle)
            saddles_at[level_of[i]] += g.nodes[i].multiplicity;
    for (std::size_t k = 0; k < nl; ++k)
        if (saddles_at[k] > 0)
            rep.parity_per_level.push_back({level_value[k], saddles_at[k]});
    return rep;
}

} // namespace fibcon::morse
