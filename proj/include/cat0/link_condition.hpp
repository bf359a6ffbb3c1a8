#pragma once

#include "cat0/complex.hpp"

namespace cat0 {

/// Verdict of the link condition check over a whole complex.  A complex of
/// nonpositive curvature must have every locally geodesic loop in every
/// vertex link of length at least 2*pi.
struct LinkConditionVerdict {
    bool pass = true;
    int worst_vertex = -1;       // vertex with the shortest essential loop
    double loop_length = kInf;   // its length (may exceed 2*pi when passing)
    std::vector<int> witness;    // arc indices of the loop in that link
};

/// Pass iff every vertex link's shortest essential loop is >= 2*pi - 1e-9,
/// so exactly flat complexes pass.
LinkConditionVerdict check_link_condition(const Complex2PE& X);

/// Metric-space diameter of a link graph (edge-interior points included).
double link_diameter(const MetricGraph& g);

} // namespace cat0
