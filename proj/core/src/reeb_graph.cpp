#include "fibcon/surface_morse.hpp"

#include "disjoint_sets.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace fibcon::morse {

std::vector<int> ReebGraph::degrees() const
{
    std::vector<int> deg(nodes.size(), 0);
    for (const auto& a : arcs) {
        ++deg[a.lower];
        ++deg[a.upper];
    }
    return deg;
}

// Between consecutive critical ranks R_i < R_{i+1} the level sets sweep a union
// of cylinders.  Each cylinder is found as a union-find class of the edges that
// meet the open slab, glued through triangles.  Cylinders that do not end at
// the critical vertex of a slab boundary continue into the neighbouring slab
// and are chained into one arc.
ReebGraph reeb_graph(const SurfaceMesh& m)
{
    const auto crit = pl_critical_points(m);

    struct Crit {
        std::size_t rank;
        ReebNode node;
    };
    std::vector<Crit> cs;
    for (auto v : crit.minima)
        cs.push_back({m.rank(v), {v, m.value(v), ReebNode::Type::Minimum, 0}});
    for (auto v : crit.maxima)
        cs.push_back({m.rank(v), {v, m.value(v), ReebNode::Type::Maximum, 0}});
    for (const auto& s : crit.saddles)
        cs.push_back({m.rank(s.vertex), {s.vertex, m.value(s.vertex), ReebNode::Type::Saddle, s.multiplicity}});
    std::sort(cs.begin(), cs.end(), [](const Crit& a, const Crit& b) { return a.rank < b.rank; });

    ReebGraph g;
    std::vector<std::size_t> cr;
    for (const auto& c : cs) {
        g.nodes.push_back(c.node);
        cr.push_back(c.rank);
    }
    const std::size_t slabs = cr.size() - 1;

    const auto& edges = m.edges();
    const std::size_t ne = edges.size();
    std::vector<std::size_t> lo(ne), hi(ne), offset(ne + 1, 0);
    std::vector<std::size_t> ra(ne), rb(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        ra[e] = std::min(m.rank(edges[e][0]), m.rank(edges[e][1]));
        rb[e] = std::max(m.rank(edges[e][0]), m.rank(edges[e][1]));
        const auto idx = static_cast<std::size_t>(std::upper_bound(cr.begin(), cr.end(), ra[e]) - cr.begin());
        const auto jdx = static_cast<std::size_t>(std::lower_bound(cr.begin(), cr.end(), rb[e]) - cr.begin());
        lo[e] = idx - 1;
        hi[e] = std::min(jdx, slabs) - 1;
        offset[e + 1] = offset[e] + (hi[e] - lo[e] + 1);
    }
    auto entry = [&](std::size_t e, std::size_t slab) { return offset[e] + (slab - lo[e]); };

    detail::DisjointSets pieces(offset[ne]);
    for (const auto& fe : m.face_edges()) {
        const std::size_t first = std::min({lo[fe[0]], lo[fe[1]], lo[fe[2]]});
        const std::size_t last = std::max({hi[fe[0]], hi[fe[1]], hi[fe[2]]});
        for (std::size_t s = first; s <= last; ++s) {
            std::size_t anchor = static_cast<std::size_t>(-1);
            for (auto e : fe) {
                if (s < lo[e] || s > hi[e])
                    continue;
                if (anchor == static_cast<std::size_t>(-1))
                    anchor = entry(e, s);
                else
                    pieces.unite(anchor, entry(e, s));
            }
        }
    }

    // Segments: one per union-find class, with slab index and boundary contacts.
    struct Segment {
        std::size_t slab;
        bool bottom = false;
        bool top = false;
        std::size_t down = static_cast<std::size_t>(-1); // entry in slab-1 of a crossing edge
    };
    std::vector<std::size_t> seg_of_root(offset[ne], static_cast<std::size_t>(-1));
    std::vector<Segment> segs;
    std::vector<std::size_t> seg_of_entry(offset[ne]);
    for (std::size_t e = 0; e < ne; ++e) {
        for (std::size_t s = lo[e]; s <= hi[e]; ++s) {
            const std::size_t id = entry(e, s);
            const std::size_t root = pieces.find(id);
            if (seg_of_root[root] == static_cast<std::size_t>(-1)) {
                seg_of_root[root] = segs.size();
                segs.push_back({s});
            }
            const std::size_t sg = seg_of_root[root];
            seg_of_entry[id] = sg;
            auto& seg = segs[sg];
            if (ra[e] == cr[s] || rb[e] == cr[s])
                seg.bottom = true;
            if (ra[e] == cr[s + 1] || rb[e] == cr[s + 1])
                seg.top = true;
            if (ra[e] < cr[s] && cr[s] < rb[e])
                seg.down = entry(e, s - 1);
        }
    }

    detail::DisjointSets chains(segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (segs[i].bottom)
            continue;
        if (segs[i].down == static_cast<std::size_t>(-1))
            throw std::logic_error("reeb_graph: level component without a lower continuation");
        chains.unite(i, seg_of_entry[segs[i].down]);
    }

    std::vector<std::size_t> lower(segs.size(), static_cast<std::size_t>(-1));
    std::vector<std::size_t> upper(segs.size(), static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::size_t c = chains.find(i);
        if (segs[i].bottom)
            lower[c] = segs[i].slab;
        if (segs[i].top)
            upper[c] = segs[i].slab + 1;
    }
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (chains.find(i) != i)
            continue;
        if (lower[i] == static_cast<std::size_t>(-1) || upper[i] == static_cast<std::size_t>(-1))
            throw std::logic_error("reeb_graph: open arc");
        g.arcs.push_back({lower[i], upper[i]});
    }
    std::sort(g.arcs.begin(), g.arcs.end(),
              [](const ReebArc& a, const ReebArc& b) { return std::tie(a.lower, a.upper) < std::tie(b.lower, b.upper); });

    detail::DisjointSets comp(g.nodes.size());
    for (const auto& a : g.arcs)
        comp.unite(a.lower, a.upper);
    g.components = comp.set_count();
    g.loop_count = static_cast<std::int64_t>(g.arcs.size()) - static_cast<std::int64_t>(g.nodes.size()) +
                   static_cast<std::int64_t>(g.components);
    return g;
}

void write_dot(std::ostream& out, const ReebGraph& g)
{
    out << "graph reeb {\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const auto& n = g.nodes[i];
        const char* shape = n.type == ReebNode::Type::Saddle ? "diamond" : "circle";
        out << fmt::format("  n{} [label=\"v={:.10g}\", shape={}];\n", i, n.value, shape);
    }
    for (const auto& a : g.arcs)
        out << fmt::format("  n{} -- n{};\n", a.lower, a.upper);
    out << "}\n";
}

} // namespace fibcon::morse
