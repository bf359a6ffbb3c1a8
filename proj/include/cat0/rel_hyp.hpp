#pragma once

#include "cat0/diagram_geometry.hpp"

#include <optional>

namespace cat0 {

struct QGParams {
    double lambda = 1.0;
    double eps = 0.0;
};

/// A sampled metric measurement with its reported uncertainty.
struct Measured {
    double value = 0.0;
    double uncertainty = 0.0;
};

/// Minimum delta such that each triangle side lies in the delta-neighborhood
/// of the union of the other two, sampled at spacing h (+-2h).
Measured thinness(const GeodesicEngine& E, const PLPath sides[3], double h = 0.5);

/// As thinness, with the flat disc joined into each union.
Measured relative_thinness(const GeodesicEngine& E, const PLPath sides[3], const FlatDisc& F,
                           double h = 0.5);

Measured hausdorff_distance(const GeodesicEngine& E, const PLPath& P, const PLPath& Q,
                            double h = 0.5);

struct QGVerdict {
    bool yes = true;
    double s = 0, t = 0;    // first violating parameter pair
    double measured = 0;    // d(P(s), P(t))
    double bound = 0;       // the bound it violated
};

/// Verifies (1/lambda)|s-t| - eps <= d(P(s), P(t)) <= lambda |s-t| + eps on
/// all sampled parameter pairs (spacing h, slack 2h).
QGVerdict check_quasigeodesic(const GeodesicEngine& E, const PLPath& P, const QGParams& params,
                              double h = 0.5);

struct TameResult {
    PLPath path;
    QGParams derived;          // constants the output satisfies (reported)
    Measured hausdorff_from_input;
};

/// Piecewise-geodesic taming: samples P at unit arclength spacing and joins
/// consecutive samples by geodesics.  Same endpoints; Hausdorff distance
/// from P below lambda + eps.
TameResult tame_quasigeodesic(const GeodesicEngine& E, const PLPath& P, const QGParams& params);

/// Witness that two paths L-fellow travel relative to a sequence of flats:
/// matched partitions alternating L-close tracking with intervals inside the
/// L-neighborhood of each flat.
struct FTCertificate {
    std::vector<int> flats;       // indices into the supplied flat list, size n
    std::vector<double> t, s;     // partition of alpha: t[i] <= s[i], size n+1
    std::vector<double> tp, sp;   // partition of alpha'
    double L = 0;
    double uncertainty = 0;
};

std::optional<FTCertificate> fellow_travel_certificate(const GeodesicEngine& E, const PLPath& alpha,
                                                       const PLPath& alpha_prime,
                                                       const std::vector<FlatDisc>& flats, double L,
                                                       double h = 0.5);

/// Independent recheck of a certificate against the definition.
bool revalidate_certificate(const GeodesicEngine& E, const PLPath& alpha,
                            const PLPath& alpha_prime, const std::vector<FlatDisc>& flats,
                            const FTCertificate& cert, double h = 0.5);

/// Quadratic divergence bound R*theta*k(k-1)/2 with k = floor(r / 2R)
/// (zero for r < 2R).
double quadratic_divergence_bound(double R, double theta, double r);

struct DivergenceReport {
    struct Sample {
        double gamma_param = 0;
        double r_lower = 0; // distance to the far boundary, minus uncertainty
        double bound = 0;
        double margin = 0; // alpha length minus bound
    };
    std::vector<Sample> samples;
    double alpha_length = 0;
    bool all_ok = true;
};

/// Checks the quadratic divergence bound at samples along the geodesic side
/// gamma of a ruffled diagram: the complementary boundary alpha must have
/// length at least Q(d(p, alpha)).  Throws PreconditionRuffleFailed unless
/// (D, gamma) is (R, theta)-ruffled.
DivergenceReport divergence_check(const DiagramMap& M, const std::vector<int>& gamma_darts,
                                  const RuffleParams& params, double h = 0.25);

struct BroomReport {
    double height = 0;
    double handle_length = 0;
    double branching_angle = 0;
    double bound = 0;          // (height - handle) * angle / 2
    double tip_separation = 0; // d(x, y) between the far endpoints
    bool ok = true;            // tip separation and outer path respect the bound
};

/// Linear divergence of a broom: two geodesics from a common tip with a
/// shared handle; the outer path between their far endpoints has length at
/// least (M - N) * theta / 2.
BroomReport broom_divergence(const GeodesicEngine& E, const PLPath& a, const PLPath& b,
                             double outer_length);

} // namespace cat0
