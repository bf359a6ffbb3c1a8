#pragma once

#include "cat0/diagram.hpp"
#include "cat0/flats.hpp"
#include "cat0/geodesics.hpp"

#include <set>

namespace cat0 {

struct RuffleParams {
    double R = 1.0;
    double theta = 0.1;
};

struct RuffleVerdict {
    bool yes = true;
    PointLocation witness; // sample center violating both conditions
};

/// Checks that every point of the boundary arc alpha (sampled at its
/// vertices plus spacing R/4) has an open R-ball containing a vertex of
/// curvature <= -theta or meeting the rest of the boundary.  When
/// `count_beta` is set the complementary arc of alpha's cycle counts as
/// other boundary; otherwise only the other boundary cycles do.
RuffleVerdict is_ruffled(const DiagramMap& M, const std::vector<int>& alpha_darts,
                         const RuffleParams& params, bool count_beta = true, double h = 0.25);

/// A preflat: closure of a connected component of the interior of the
/// preimage of a flat region.
struct Preflat {
    std::vector<int> cells;    // filled faces of D
    std::vector<int> boundary; // boundary darts (preflat on the left)
};

std::vector<Preflat> extract_preflats(const DiagramMap& M, const FlatDisc& F);

/// Exterior corners of a set of cells: per vertex, the angle runs of filled
/// non-member corners pinned between member attachments.  All must be
/// >= pi - tol for convexity.
double min_exterior_corner(const DiagramMap& M, const std::set<int>& cells);

/// A subdiagram that may carry 1-dimensional pieces.
struct Subdiagram {
    std::set<int> cells;
    std::set<int> edges;    // includes all sides of cells
    std::set<int> vertices; // includes all endpoints of edges
    void absorb_closure(const DiscDiagram& D);
};

/// Smallest subdiagram containing the seed that is closed under geodesics:
/// alternates geodesic closure between components and exterior-corner
/// closure until a fixed point.  Requires nonpositive interior curvature.
Subdiagram diagram_convex_hull(const DiagramMap& M, Subdiagram seed, double h = 0.25);

/// Boundary walk of a subdiagram (S on the left), starting from `start`
/// (an S-dart).  1-dimensional pieces are traversed on both sides.
std::vector<int> subdiagram_boundary_walk(const DiagramMap& M, const Subdiagram& S, int start);

struct FlatClosureResult {
    std::vector<int> beta;   // dart path homotopic to alpha rel endpoints
    Subdiagram d_gamma;      // hull of gamma and the collected preflats
    std::vector<int> d_alpha_cells;
    std::vector<Preflat> used_preflats;
};

/// Collects preflats of the given flats meeting the R-neighborhood of the
/// boundary geodesic gamma, hulls them with gamma, and returns the local
/// geodesic beta bounding the hull on the other side.
FlatClosureResult flat_closure(const DiagramMap& M, const std::vector<int>& gamma_darts,
                               const std::vector<FlatDisc>& flats, double R, double h = 0.25);

} // namespace cat0
