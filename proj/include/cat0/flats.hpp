#pragma once

#include "cat0/geodesics.hpp"

#include <optional>

namespace cat0 {

/// A developable flat region: a set of closed cells admitting a local
/// isometry into the plane with trivial holonomy and injective image.
struct FlatDisc {
    std::vector<int> cells;
    std::map<int, Iso2> placement;  // cell -> planar placement
    PointLocation center;           // meaningful for grown discs
    Vec2 center_pos = Vec2::Zero(); // developed position of the center
    double inscribed_radius = 0.0;

    bool contains_cell(int c) const;
};

struct DevelopObstruction {
    enum class Kind { BadLink, Holonomy, Overlap };
    Kind kind = Kind::BadLink;
    int vertex = -1; // BadLink: offending vertex
    int cell = -1;   // Holonomy/Overlap: offending cell
    double value = 0.0;
};

struct DevelopResult {
    std::optional<FlatDisc> disc;         // set on success
    std::optional<DevelopObstruction> obstruction;
};

/// Unfolds the region breadth-first from the seed; returns the placed flat
/// region or the first obstruction (interior vertex link differing from
/// 2*pi, holonomy mismatch, or overlapping placements).
DevelopResult develop_region(const Complex2PE& X, int seed_cell, const std::vector<int>& region);

/// Largest verified flat disc about `center` of radius at most r_target:
/// cells meeting the metric ball are added nearest-first while the
/// development stays valid.
FlatDisc grow_flat_disc(const Complex2PE& X, const PointLocation& center, double r_target);

/// Validates the FlatDisc invariants (links, holonomy, injectivity) afresh.
void validate_flat_disc(const Complex2PE& X, const FlatDisc& F);

struct TriplaneWitness {
    std::vector<int> spine;              // vertex chain of the singular segment
    double radius = 0.0;
    std::array<std::vector<int>, 3> half_disc_cells;
};

/// Searches locally geodesic edge paths through edges with at least three
/// incident cells for three pairwise-distinct flat half-discs of radius R
/// glued along the path.  A witness certifies an isometrically embedded
/// triplane ball of radius R.
std::optional<TriplaneWitness> detect_triplane(const Complex2PE& X, double R);

/// Sampled diameters of intersections of k-neighborhoods of flat pairs.
struct FlatProximityTable {
    struct Entry {
        int flat_a = 0, flat_b = 0;
        double k = 0.0;
        double diameter = 0.0;
    };
    std::vector<Entry> entries;
    std::vector<double> ks;
    std::vector<double> psi_hat; // per k: max diameter over pairs
    double uncertainty = 0.0;    // +- 2h
};

FlatProximityTable flat_proximity_table(const Complex2PE& X, const std::vector<FlatDisc>& flats,
                                        const std::vector<double>& ks, double h = 0.25);

} // namespace cat0
