#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace cat0 {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Weighted multigraph with positive edge lengths.  Models vertex links and
/// direction spaces of a piecewise Euclidean 2-complex; parallel edges and
/// loops are permitted.
struct MetricGraph {
    struct Arc {
        int a = -1, b = -1;
        double len = 0.0;
        std::string label; // provenance (e.g. which cell corner)
    };

    std::vector<std::string> node_labels;
    std::vector<Arc> arcs;

    int node_count() const { return static_cast<int>(node_labels.size()); }
    int arc_count() const { return static_cast<int>(arcs.size()); }

    int add_node(std::string label = {});
    int add_arc(int a, int b, double len, std::string label = {});

    double total_length() const;
    bool connected() const;

    /// Metric-equivalent graph with degree-2 nodes suppressed (incident arcs
    /// merged).  A circle component keeps one node carrying a loop arc.
    MetricGraph smoothed() const;

    /// Shortest node-to-node distances from `src`; arcs listed in `skip` are
    /// not traversed.
    std::vector<double> node_distances(int src, const std::vector<int>& skip = {}) const;
};

/// A point of the underlying metric space of a graph: either a node or an
/// interior point of an arc at a given offset from endpoint `a`.
struct GraphPoint {
    int arc = -1;        // -1 when the point is a node
    double offset = 0.0; // in [0, len(arc)]
    int node = -1;       // set when arc == -1

    static GraphPoint at_node(int n) { return GraphPoint{-1, 0.0, n}; }
    static GraphPoint on_arc(int arc, double offset) { return GraphPoint{arc, offset, -1}; }
};

/// Geodesic distance between two points of the metric space of `g`.
double graph_point_distance(const MetricGraph& g, const GraphPoint& p, const GraphPoint& q);

/// A realizing route: either direct along the shared arc, or a node path.
/// `nodes` lists the visited nodes in order and `arcs` the arcs between them
/// (arcs.size() == nodes.size() - 1 when nodes is nonempty).
struct GraphRoute {
    double length = kInf;
    bool direct = false;
    std::vector<int> nodes;
    std::vector<int> arcs;
};

GraphRoute graph_point_route(const MetricGraph& g, const GraphPoint& p, const GraphPoint& q);

struct CycleWitness {
    double length = kInf;
    std::vector<int> arcs; // arc indices of a realizing simple cycle; empty if none
};

/// Minimum length over immersed closed paths (equivalently, minimum-weight
/// simple cycle); infinite for forests.
CycleWitness shortest_essential_loop(const MetricGraph& g);

/// Metric-space diameter: supremum of distances over all points, including
/// arc-interior points.  Throws DisconnectedGraph if g is not connected.
double metric_graph_diameter(const MetricGraph& g);

/// Combinatorial isomorphism that also matches arc lengths within `len_tol`.
/// Brute force with degree pruning; intended for small graphs.
bool metric_graphs_isomorphic(const MetricGraph& g, const MetricGraph& h, double len_tol = 1e-9);

/// All simple cycles with their lengths (enumeration oracle for small graphs).
std::vector<CycleWitness> enumerate_simple_cycles(const MetricGraph& g);

} // namespace cat0
