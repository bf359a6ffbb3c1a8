#pragma once

#include "cat0/complex.hpp"

#include <nlohmann/json_fwd.hpp>
#include <map>
#include <string>
#include <vector>

namespace cat0 {

/// Simple undirected graph used as a prescribed vertex link.
struct SimpleGraph {
    int nodes = 0;
    std::vector<std::pair<int, int>> edges;

    static SimpleGraph cycle(int k);
    std::vector<std::vector<int>> adjacency() const;
    int girth() const; // kInf-like large value for forests
    bool simple() const;
};

/// A generated complex together with its distinguished points / regions.
/// All generators are deterministic so fixtures are byte-stable.
struct Generated {
    Complex2PE X;
    std::map<std::string, PointLocation> points;
    std::map<std::string, std::vector<std::string>> cell_groups;
    std::vector<std::string> singular_path; // vertex ids along a marked line
    nlohmann::json metadata_json() const;
};

/// n x n patch of unit squares (flat).
Generated generate_grid(int n);

/// Radius-n patch of unit regular hexagons (flat).
Generated generate_hex(int n);

/// Radius-n ball of the regular squared tiling with k squares around every
/// interior vertex: k=3 positively curved, k=4 flat, k>=5 negatively curved.
Generated generate_cone(int k, int n);

/// Three R x 2R half-plane patches of unit squares glued along a line.
/// Marked: the singular segment and the three flat sheets (pairwise unions
/// of half-planes form the flats).
Generated generate_triplane(int R);

/// Point (x, y, sheet) of a generated triplane, with sheet in {1,2,3} and
/// sheet irrelevant for y == 0.
PointLocation triplane_point(const Generated& g, double x, double y, int sheet);

/// triplane(2n) with marked vertices a=(0,n,1), b=(-2n,n,2), c=(2n,n,3).
Generated generate_delta_n(int n);

/// Radius-r ball of a hexagonal complex in which every completed vertex link
/// is isomorphic to L with all arc lengths 2*pi/3.  Requires girth(L) >= 3.
Generated generate_moussong_ball(const SimpleGraph& L, int r);

/// Flat n x n grid with a strip of m squares flapped off a horizontal line.
Generated generate_flap_grid(int n, int m);

/// CLI entry point; `params` carries kind-specific settings.
Generated generate(const std::string& kind, const nlohmann::json& params);

} // namespace cat0
