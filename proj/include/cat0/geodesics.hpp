#pragma once

#include "cat0/complex.hpp"
#include "cat0/link_condition.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <random>

namespace cat0 {

/// Shortest-path mesh over a complex: graph on edge samples (spacing <= h)
/// and vertices, with a clique per cell between samples on different sides.
/// Clique arcs are generated on the fly (they are quadratic per cell and
/// would dominate memory at fine resolutions).
struct Mesh {
    double h = 0.0;
    std::vector<PointLocation> nodes; // vertex or edge point per node
    std::vector<std::vector<int>> edge_nodes; // per edge: v0, samples, v1

    struct CellBoundary {
        std::vector<int> node;
        std::vector<Vec2> pos;           // positions in the cell frame
        std::vector<std::uint64_t> side; // bitmask of sides the node lies on
    };
    std::vector<CellBoundary> cell_boundary;
    std::vector<std::vector<std::pair<int, int>>> node_cells; // (cell, boundary index)

    struct ChainArc {
        int to;
        double w;
        int edge;
    };
    std::vector<std::vector<ChainArc>> chain; // consecutive samples along edges

    /// Invokes fn(v, weight, via_cell, along_edge) for each neighbor of u.
    template <class F> void for_neighbors(int u, F&& fn) const {
        for (const auto& a : chain[u]) fn(a.to, a.w, -1, a.edge);
        for (auto [c, i] : node_cells[u]) {
            const auto& cb = cell_boundary[c];
            for (size_t j = 0; j < cb.node.size(); ++j) {
                if (cb.side[i] & cb.side[j]) continue;
                fn(cb.node[j], (cb.pos[i] - cb.pos[j]).norm(), c, -1);
            }
        }
    }
};

/// Planar comparison triangle placed from three side lengths.
struct ComparisonTriangle {
    double pq = 0, qr = 0, pr = 0;
    Vec2 p, q, r;
    double angle_p = 0, angle_q = 0, angle_r = 0;

    static ComparisonTriangle from_sides(double pq, double qr, double pr);
    /// Point at distance `s` from the first endpoint of the named side
    /// (side 0 = [p,q], 1 = [q,r], 2 = [p,r]).
    Vec2 point_on_side(int side, double s) const;
};

struct GeodesicResult {
    PLPath path;
    double length = 0;
    bool certified = false; // passed the local-geodesy certificate
    double h_used = 0;
};

struct LocalGeodesyVerdict {
    bool yes = true;
    PointLocation violation_at;
    double direction_distance = kPi; // measured distance at the first violation
};

struct ProbeReport {
    double max_cat0_violation = 0;
    double max_convexity_violation = 0;
    double corner_gap[3] = {0, 0, 0}; // comparison angle minus measured angle
    int samples = 0;
};

/// Distance field d(., sources) evaluated on mesh nodes.
struct DistanceField {
    const Mesh* mesh = nullptr;
    double h = 0;
    std::vector<double> node_dist;
    std::vector<PointLocation> sources;
};

/// Geodesic queries over a fixed complex (referenced, not owned: the complex
/// must outlive the engine).  Meshes are cached per h; the engine itself is
/// logically const and safe to share for reading.
class GeodesicEngine {
  public:
    explicit GeodesicEngine(const Complex2PE& X) : X_(&X) {}

    const Complex2PE& complex() const { return *X_; }

    bool npc() const;
    void require_npc() const; // throws NotNPC with the witness vertex

    /// Certified geodesic between two located points.  The mesh at spacing h
    /// provides a corridor; planar unfolding straightens it exactly.  A path
    /// whose every interior contact has direction-space distance >= pi is a
    /// local geodesic, hence the unique geodesic here; if certification fails
    /// the mesh is refined (h halved) and the search repeated.
    GeodesicResult geodesic_between(const PointLocation& p, const PointLocation& q,
                                    double h = 0.25) const;

    /// Same machinery without the nonpositive-curvature precondition; the
    /// result is a locally shortened path but carries no uniqueness claim.
    GeodesicResult shortest_path_unchecked(const PointLocation& p, const PointLocation& q,
                                           double h = 0.25) const;

    /// Pure mesh-graph shortest path length (the fine-mesh oracle).
    double mesh_distance(const PointLocation& p, const PointLocation& q, double h) const;

    LocalGeodesyVerdict is_local_geodesic(const PLPath& path) const;

    /// Angle between [p,x] and [p,y] via the limit of comparison angles
    /// 2 asin(d(g(t), g'(t)) / 2t) at t = t0 / 2^i.
    double alexandrov_angle(const PointLocation& p, const PointLocation& x,
                            const PointLocation& y, double h = 0.25) const;
    /// The same angle read off the direction space at p (capped at pi).
    double angle_via_directions(const PLPath& px, const PLPath& py) const;

    /// Sample comparison-point pairs on a geodesic triangle and report the
    /// worst CAT(0) and convexity residuals plus corner angle gaps.
    ProbeReport comparison_probe(const PointLocation& a, const PointLocation& b,
                                 const PointLocation& c, int samples, unsigned seed = 1,
                                 double h = 0.25) const;

    const Mesh& mesh(double h) const;

    DistanceField distance_field(const std::vector<PointLocation>& sources, double h,
                                 double r_max = kInf) const;
    double field_at(const DistanceField& f, const PointLocation& p) const;

    static std::vector<PointLocation> sample_path(const Complex2PE& X, const PLPath& path,
                                                  double spacing);

  private:
    struct NodePath {
        std::vector<int> nodes;
        double length = kInf;
        int first_cell = -1, last_cell = -1; // attachment cells at the endpoints
    };

    NodePath mesh_shortest(const PointLocation& p, const PointLocation& q, double h) const;
    GeodesicResult straighten(const PointLocation& p, const PointLocation& q,
                              const NodePath& np, double h) const;
    GeodesicResult run_query(const PointLocation& p, const PointLocation& q, double h,
                             bool checked) const;

    const Complex2PE* X_;
    mutable std::map<double, std::shared_ptr<Mesh>> meshes_;
    mutable int npc_state_ = -1; // -1 unknown, 0 fail, 1 pass
    mutable LinkConditionVerdict npc_verdict_;
};

} // namespace cat0
