#pragma once

#include <stdexcept>
#include <string>

namespace cat0 {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define CAT0_ERROR(Name)                                                                           \
    struct Name : Error {                                                                          \
        using Error::Error;                                                                        \
    }

CAT0_ERROR(SchemaError);       // malformed input document
CAT0_ERROR(MetricError);       // side length disagrees with edge length
CAT0_ERROR(ConvexityError);    // cell corners not strictly convex
CAT0_ERROR(UnknownVertex);
CAT0_ERROR(UnknownId);
CAT0_ERROR(DisconnectedGraph);
CAT0_ERROR(DisconnectedRegion);
CAT0_ERROR(NotNPC);            // link condition fails
CAT0_ERROR(NoPathFound);
CAT0_ERROR(NotClosed);
CAT0_ERROR(NotReduced);
CAT0_ERROR(DegenerateInput);
CAT0_ERROR(ArcNotOnBoundary);
CAT0_ERROR(BadParams);
CAT0_ERROR(PreconditionRuffleFailed);
CAT0_ERROR(InvariantBreach);   // internal consistency failure (e.g. Gauss-Bonnet residual)

#undef CAT0_ERROR

/// Bounded search gave up; carries the bound that was exhausted.
struct Exceeded : Error {
    int bound;
    explicit Exceeded(int bound_, const std::string& what_ = "search bound exceeded")
        : Error(what_), bound(bound_) {}
};

} // namespace cat0
