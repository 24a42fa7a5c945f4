#pragma once

// Piecewise-linear Morse theory on closed oriented triangulated surfaces.
// Ties between vertex values are broken by vertex index (simulated
// simplicity), so every query works with the strict order (value, index).

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fibcon::morse {

struct ScalarMesh {
    std::size_t vertex_count = 0;
    std::vector<std::array<std::size_t, 3>> faces;
    std::vector<double> values;
    /// Optional; either empty or one entry per vertex.
    std::vector<std::array<double, 3>> positions;
};

class MeshError : public std::runtime_error {
public:
    enum class Kind { NotClosed, NotOrientable, NonManifoldEdge, NonManifoldVertex, InvalidFace, InvalidValue, Parse };

    MeshError(Kind kind, std::vector<std::size_t> simplex, const std::string& what);

    Kind kind;
    /// Offending vertices (an edge, a face or a single vertex).
    std::vector<std::size_t> simplex;
};

std::string to_string(MeshError::Kind k);

/// A mesh that passed validation: consistently oriented faces, vertex links,
/// edge table and the simulated-simplicity order.
class SurfaceMesh {
public:
    const ScalarMesh& mesh() const { return mesh_; }
    std::size_t vertex_count() const { return mesh_.vertex_count; }
    const std::vector<std::array<std::size_t, 3>>& faces() const { return mesh_.faces; }
    const std::vector<double>& values() const { return mesh_.values; }
    double value(std::size_t v) const { return mesh_.values[v]; }

    const std::vector<std::array<std::size_t, 2>>& edges() const { return edges_; }
    /// Edge ids of each face, ordered (f0 f1), (f1 f2), (f2 f0).
    const std::vector<std::array<std::size_t, 3>>& face_edges() const { return face_edges_; }
    /// Neighbours of v in cyclic order.
    const std::vector<std::size_t>& link(std::size_t v) const { return links_[v]; }
    /// Position of v in the (value, index) order.
    std::size_t rank(std::size_t v) const { return rank_[v]; }
    std::size_t vertex_at_rank(std::size_t r) const { return order_[r]; }
    bool below(std::size_t a, std::size_t b) const { return rank_[a] < rank_[b]; }

    std::size_t component_count() const { return components_; }
    std::int64_t euler_characteristic() const;
    std::int64_t genus() const;

    double min_value() const { return mesh_.values[order_.front()]; }
    double max_value() const { return mesh_.values[order_.back()]; }

private:
    friend SurfaceMesh validate_mesh(const ScalarMesh& m);

    ScalarMesh mesh_;
    std::vector<std::array<std::size_t, 2>> edges_;
    std::vector<std::array<std::size_t, 3>> face_edges_;
    std::vector<std::vector<std::size_t>> links_;
    std::vector<std::size_t> rank_;
    std::vector<std::size_t> order_;
    std::size_t components_ = 0;
};

/// Checks closedness, manifoldness and orientability and reorients faces
/// consistently within each component.  Throws MeshError.
SurfaceMesh validate_mesh(const ScalarMesh& m);

struct Saddle {
    std::size_t vertex;
    int multiplicity;

    friend bool operator==(const Saddle&, const Saddle&) = default;
};

struct CriticalReport {
    std::vector<std::size_t> minima;
    std::vector<std::size_t> maxima;
    std::vector<Saddle> saddles;
    std::int64_t euler_characteristic = 0;
    std::int64_t genus = 0;

    int saddle_count() const;
};

CriticalReport pl_critical_points(const SurfaceMesh& m);

/// Components of the PL level set {f = c}.  A level equal to a vertex value is
/// moved up by half the gap to the next larger vertex value.
std::size_t level_components(const SurfaceMesh& m, double c);

struct ReebNode {
    std::size_t vertex;
    double value;
    enum class Type { Minimum, Maximum, Saddle } type;
    int multiplicity = 0;
};

struct ReebArc {
    std::size_t lower;
    std::size_t upper;
};

struct ReebGraph {
    /// Sorted by the (value, index) order of their vertices.
    std::vector<ReebNode> nodes;
    std::vector<ReebArc> arcs;
    std::size_t components = 0;
    std::int64_t loop_count = 0;

    std::vector<int> degrees() const;
};

ReebGraph reeb_graph(const SurfaceMesh& m);

/// `graph reeb { ... }` with node labels `v=<value>`.
void write_dot(std::ostream& out, const ReebGraph& g);

struct LevelParity {
    double level;
    int saddles;
};

struct ConnectednessReport {
    bool all_levels_connected = true;
    int saddle_count = 0;
    int min_count = 0;
    int max_count = 0;
    std::vector<LevelParity> parity_per_level;
    bool genus_bound_ok = true;
    std::int64_t genus = 0;
    std::int64_t euler_characteristic = 0;
    /// Largest number of level-set components over all real levels.
    std::size_t max_level_components = 0;
};

/// Level connectivity is judged on real levels: critical values closer than
/// 1e-12 times the value range are one level.
ConnectednessReport connectedness_report(const SurfaceMesh& m);
ConnectednessReport connectedness_report(const SurfaceMesh& m, const ReebGraph& g);

/// SOFF: `SOFF`, `V F`, V lines `x y z s`, F lines `3 i j k`.
ScalarMesh read_soff(std::istream& in);
ScalarMesh read_soff_file(const std::string& path);
void write_soff(std::ostream& out, const ScalarMesh& m);

} // namespace fibcon::morse
