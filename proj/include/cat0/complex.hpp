#pragma once

#include "cat0/errors.hpp"
#include "cat0/geometry.hpp"
#include "cat0/metric_graph.hpp"

#include <nlohmann/json_fwd.hpp>
#include <map>
#include <string>
#include <vector>

namespace cat0 {

/// A finite piecewise Euclidean 2-complex: convex polygonal cells with
/// explicit planar corner coordinates, explicit edges with lengths, and
/// gluing data.  Immutable after construction; all operations on it are pure.
class Complex2PE {
  public:
    struct Edge {
        std::string id;
        int v0 = -1, v1 = -1;
        double length = 0.0;
    };

    struct Cell {
        std::string id;
        std::vector<int> corners;     // vertex indices, ccw convex position
        std::vector<Vec2> coords;     // planar corner coordinates
        std::vector<int> sides;       // edge indices; side i joins corner i to corner i+1
        std::vector<bool> side_forward; // true when edge.v0 sits at corner i
        int size() const { return static_cast<int>(corners.size()); }
    };

    /// Incidence of a cell corner or side at a vertex / edge.
    struct CellRef {
        int cell = -1;
        int index = -1; // corner index or side index within the cell
    };

    Complex2PE() = default;
    Complex2PE(std::vector<std::string> vertex_ids, std::vector<Edge> edges,
               std::vector<Cell> cells);

    static Complex2PE from_json(const nlohmann::json& doc);
    static Complex2PE from_file(const std::string& path);
    nlohmann::json to_json() const;

    int vertex_count() const { return static_cast<int>(vertex_ids_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    int cell_count() const { return static_cast<int>(cells_.size()); }

    const std::string& vertex_id(int v) const { return vertex_ids_[v]; }
    const Edge& edge(int e) const { return edges_[e]; }
    const Cell& cell(int c) const { return cells_[c]; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Cell>& cells() const { return cells_; }

    int vertex_index(const std::string& id) const;
    int edge_index(const std::string& id) const;
    int cell_index(const std::string& id) const;

    /// Cells incident to an edge, as (cell, side index) pairs.  Size >= 1 by
    /// the no-isolated-edges invariant; >= 3 along non-manifold edges.
    const std::vector<CellRef>& cells_at_edge(int e) const { return edge_cells_[e]; }
    /// Cell corners incident to a vertex, as (cell, corner index) pairs.
    const std::vector<CellRef>& corners_at_vertex(int v) const { return vertex_corners_[v]; }
    /// Edge ends at a vertex, as (edge, end) with end 0 at v0 and 1 at v1.
    const std::vector<std::pair<int, int>>& edge_ends_at_vertex(int v) const {
        return vertex_edge_ends_[v];
    }

    /// Interior angle of cell c at corner i.
    double corner_angle(int c, int i) const;
    /// Planar position of the endpoint of edge `e` (end 0 or 1) in cell c's
    /// frame, where side `side` of c references e.
    Vec2 edge_end_coord(int c, int side, int end) const;
    /// Planar position of the point at parameter t on edge e, in c's frame.
    Vec2 edge_point_coord(int c, int side, double t) const;
    /// Maximum cell diameter (used for default scales).
    double max_cell_diameter() const;

    bool is_boundary_edge(int e) const { return edge_cells_[e].size() == 1; }

  private:
    void build_incidence();
    void validate() const;

    std::vector<std::string> vertex_ids_;
    std::vector<Edge> edges_;
    std::vector<Cell> cells_;
    std::map<std::string, int> vertex_by_id_, edge_by_id_, cell_by_id_;
    std::vector<std::vector<CellRef>> edge_cells_;
    std::vector<std::vector<CellRef>> vertex_corners_;
    std::vector<std::vector<std::pair<int, int>>> vertex_edge_ends_;
};

Complex2PE load_complex(const nlohmann::json& doc);

/// A located point of a complex: at a vertex, at parameter t in (0,1) along
/// an edge, or strictly inside a cell at the given planar coordinates.
struct PointLocation {
    enum class Kind { Vertex, Edge, Cell };
    Kind kind = Kind::Vertex;
    int index = -1;
    double t = 0.0;
    Vec2 xy = Vec2::Zero();

    static PointLocation vertex(int v) { return {Kind::Vertex, v, 0.0, Vec2::Zero()}; }
    static PointLocation on_edge(int e, double t) { return {Kind::Edge, e, t, Vec2::Zero()}; }
    static PointLocation in_cell(int c, const Vec2& p) { return {Kind::Cell, c, 0.0, p}; }

    bool same_as(const PointLocation& o, double tol = kMetricTol) const;
};

void validate_location(const Complex2PE& X, const PointLocation& p);

/// Planar coordinates of a located point within a specific cell, given the
/// side (for edge points) or corner (for vertices) of that cell to use.
Vec2 locate_in_cell(const Complex2PE& X, const PointLocation& p, int cell);

/// A piecewise linear path: breakpoints with carrying-cell assignments.  Each
/// segment is a straight segment in its carrying cell; segments that run
/// along an edge of the complex record that edge.
struct PLPath {
    struct Segment {
        int cell = -1;      // carrying cell
        Vec2 a, b;          // endpoints in the carrying cell's frame
        int along_edge = -1; // edge index when the segment lies on an edge
        double length() const { return (b - a).norm(); }
    };
    std::vector<PointLocation> points; // size = segments.size() + 1
    std::vector<Segment> segments;

    bool single_point() const { return segments.empty() && points.size() == 1; }
    /// Arclength parameter of each breakpoint.
    std::vector<double> breakpoint_params() const;
    PLPath reversed() const;
};

double path_length(const PLPath& path);

/// Point at arclength s along the path (clamped to [0, length]).
PointLocation path_point_at(const Complex2PE& X, const PLPath& path, double s);

/// Subpath between arclength parameters s0 <= s1 (clamped).
PLPath subpath(const Complex2PE& X, const PLPath& path, double s0, double s1);

/// Concatenation; the second path must start where the first ends.
PLPath concat_paths(const PLPath& a, const PLPath& b);

/// The link of a vertex: one graph arc per incident cell corner, with length
/// the corner angle; graph nodes are the edge ends at the vertex.
MetricGraph vertex_link(const Complex2PE& X, int v);
MetricGraph vertex_link(const Complex2PE& X, const std::string& vertex_id);

/// Space of directions at any located point.  At a vertex this is the link;
/// at an edge-interior point it is two poles joined by one arc of length pi
/// per incident cell; inside a cell it is a circle of length 2*pi.
MetricGraph direction_space_at(const Complex2PE& X, const PointLocation& p);

/// Node index conventions for direction spaces, used to place concrete
/// directions in the graph (see direction_point_*).
struct DirectionSpace {
    MetricGraph graph;
    PointLocation at;
    // Vertex case: node n <-> edge_ends_at_vertex(v)[n]; arc k <-> corner k.
    // Edge case: node 0 = pole toward v1 (t increasing), node 1 = pole toward
    // v0; arc k <-> cells_at_edge(e)[k].
    // Cell case: nodes {0,1} split a circle into two arcs of length pi; a
    // planar direction at angle phi sits at offset phi on that circle.
};

DirectionSpace direction_space(const Complex2PE& X, const PointLocation& p);

/// The direction of the straight segment from `p` toward planar point
/// `target` inside cell `c`, as a point of the direction space at p.
GraphPoint direction_toward(const Complex2PE& X, const DirectionSpace& ds, int cell,
                            const Vec2& from, const Vec2& toward);
/// The direction along edge e (toward end 1 if forward) at a point of e or at
/// one of its endpoints.
GraphPoint direction_along_edge(const Complex2PE& X, const DirectionSpace& ds, int e,
                                bool forward);

/// Index of a side of `cell` referencing `edge` (-1 if none).
int side_of(const Complex2PE& X, int cell, int edge);

/// Isometry carrying next_cell's frame into prev_cell's frame across `edge`,
/// placing next_cell on the opposite side of the edge line (unfolding).
Iso2 unfold_across(const Complex2PE& X, int prev_cell, int next_cell, int edge);

/// Centroid of a cell in its own frame.
Vec2 cell_centroid(const Complex2PE& X, int cell);

} // namespace cat0
