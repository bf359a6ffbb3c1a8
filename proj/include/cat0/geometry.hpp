#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace cat0 {

using Vec2 = Eigen::Vector2d;

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

/// Global absolute tolerance for metric consistency checks.
constexpr double kMetricTol = 1e-9;

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Unsigned angle in [0, pi] between the rays b->a and b->c.
double angle_at(const Vec2& a, const Vec2& b, const Vec2& c);

/// Unsigned angle in [0, pi] between two direction vectors.
double angle_between(const Vec2& u, const Vec2& v);

/// A planar isometry x |-> R x + t, where R is orthogonal (rotation or
/// reflection).  Used for unfolding cells across shared edges and for
/// developing flat regions.
struct Iso2 {
    Eigen::Matrix2d rot = Eigen::Matrix2d::Identity();
    Vec2 shift = Vec2::Zero();

    Vec2 operator()(const Vec2& p) const { return rot * p + shift; }
    Iso2 then(const Iso2& outer) const;  // outer ∘ this
    Iso2 inverse() const;
    bool reflecting() const { return rot.determinant() < 0.0; }
    bool approx_equal(const Iso2& other, double tol) const;

    /// The unique orientation-preserving (or reversing, per `reflect`)
    /// isometry sending a0->b0 and a1->b1.  Requires |a1-a0| == |b1-b0|.
    static Iso2 matching_segment(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1,
                                 bool reflect);
};

/// Strict convexity test for a ccw-ordered polygon (all left turns).
bool strictly_convex_ccw(const std::vector<Vec2>& poly, double tol = kMetricTol);

/// Convexity allowing straight (angle pi) corners, as produced by cell
/// subdivision; still requires ccw order, positive area and nonzero sides.
bool convex_ccw(const std::vector<Vec2>& poly, double tol = kMetricTol);

double polygon_area(const std::vector<Vec2>& poly);

/// Intersection of two convex polygons (Sutherland–Hodgman).  Returns the
/// clipped polygon, possibly empty.
std::vector<Vec2> convex_intersection(const std::vector<Vec2>& subject,
                                      const std::vector<Vec2>& clip);

/// Distance from a point to a convex polygon (0 if inside).
double point_to_convex_polygon(const Vec2& p, const std::vector<Vec2>& poly);

double point_to_segment(const Vec2& p, const Vec2& a, const Vec2& b);

/// Shortest path through a sleeve of portals (string pulling with funnel).
/// Portals are directed crossings; `left`/`right` are as seen walking from
/// `start` to `goal`.  The result is the polyline of interior bend points,
/// each tagged with the portal index and side it bends around.
struct FunnelBend {
    int portal = -1;   // index into the portal list
    bool left = false; // which endpoint of the portal the path bends around
    Vec2 at;
};

std::vector<FunnelBend> funnel_path(const Vec2& start, const std::vector<Vec2>& left,
                                    const std::vector<Vec2>& right, const Vec2& goal);

} // namespace cat0
