#pragma once

#include "cat0/complex.hpp"

namespace cat0 {

/// Result of cutting a complex along a piecewise linear path: the subdivided
/// complex, the path as a vertex chain of the new 1-skeleton, and cell
/// provenance.
struct Subdivision {
    Complex2PE Y;
    std::vector<int> path_vertices;        // chain in Y realizing the path
    std::vector<int> path_edges;           // edges of Y between consecutive chain vertices
    std::map<std::string, std::string> cell_origin; // Y cell id -> X cell id
};

/// Lazily subdivides X along a simple path whose endpoints lie on the
/// 1-skeleton: edges are split at crossing parameters and cells are cut by
/// the crossing chords.  The path must not stop in a cell interior.
Subdivision subdivide_along_path(const Complex2PE& X, const PLPath& path);

/// Cells of Y reachable from `seed` without crossing the cut chain.
std::vector<int> cells_on_side(const Subdivision& S, int seed_cell);

} // namespace cat0
