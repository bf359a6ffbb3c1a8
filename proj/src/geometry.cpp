#include "cat0/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace cat0 {

double angle_between(const Vec2& u, const Vec2& v) {
    double c = cross2(u, v);
    double d = u.dot(v);
    return std::abs(std::atan2(c, d));
}

double angle_at(const Vec2& a, const Vec2& b, const Vec2& c) {
    return angle_between(a - b, c - b);
}

Iso2 Iso2::then(const Iso2& outer) const {
    Iso2 r;
    r.rot = outer.rot * rot;
    r.shift = outer.rot * shift + outer.shift;
    return r;
}

Iso2 Iso2::inverse() const {
    Iso2 r;
    r.rot = rot.transpose(); // orthogonal
    r.shift = -(r.rot * shift);
    return r;
}

bool Iso2::approx_equal(const Iso2& other, double tol) const {
    return (rot - other.rot).cwiseAbs().maxCoeff() <= tol &&
           (shift - other.shift).cwiseAbs().maxCoeff() <= tol;
}

Iso2 Iso2::matching_segment(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1,
                            bool reflect) {
    Vec2 da = a1 - a0;
    Vec2 db = b1 - b0;
    double na = da.norm(), nb = db.norm();
    if (na < 1e-300 || nb < 1e-300)
        throw std::invalid_argument("matching_segment: degenerate segment");
    da /= na;
    db /= nb;
    Eigen::Matrix2d A, B;
    // Frame whose columns are the segment direction and its (possibly
    // reflected) normal; mapping frame to frame carries a0a1 onto b0b1.
    A << da.x(), -da.y(), da.y(), da.x();
    double s = reflect ? -1.0 : 1.0;
    B << db.x(), -s * db.y(), db.y(), s * db.x();
    Iso2 r;
    r.rot = B * A.transpose();
    r.shift = b0 - r.rot * a0;
    return r;
}

bool strictly_convex_ccw(const std::vector<Vec2>& poly, double tol) {
    size_t n = poly.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const Vec2& c = poly[(i + 2) % n];
        if (cross2(b - a, c - b) <= tol) return false;
    }
    return true;
}

bool convex_ccw(const std::vector<Vec2>& poly, double tol) {
    size_t n = poly.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const Vec2& c = poly[(i + 2) % n];
        if ((b - a).norm() <= tol) return false;
        if (cross2(b - a, c - b) < -tol) return false;
    }
    return polygon_area(poly) > tol;
}

double polygon_area(const std::vector<Vec2>& poly) {
    double a = 0;
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) a += cross2(poly[i], poly[(i + 1) % n]);
    return 0.5 * a;
}

std::vector<Vec2> convex_intersection(const std::vector<Vec2>& subject,
                                      const std::vector<Vec2>& clip) {
    std::vector<Vec2> out = subject;
    size_t m = clip.size();
    for (size_t i = 0; i < m && !out.empty(); ++i) {
        const Vec2& c0 = clip[i];
        const Vec2& c1 = clip[(i + 1) % m];
        Vec2 dir = c1 - c0;
        std::vector<Vec2> in;
        in.swap(out);
        size_t k = in.size();
        for (size_t j = 0; j < k; ++j) {
            const Vec2& a = in[j];
            const Vec2& b = in[(j + 1) % k];
            double sa = cross2(dir, a - c0);
            double sb = cross2(dir, b - c0);
            if (sa >= 0) out.push_back(a);
            if ((sa > 0 && sb < 0) || (sa < 0 && sb > 0)) {
                double t = sa / (sa - sb);
                out.push_back(a + t * (b - a));
            }
        }
    }
    return out;
}

double point_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double len2 = ab.squaredNorm();
    if (len2 < 1e-300) return (p - a).norm();
    double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

double point_to_convex_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
    size_t n = poly.size();
    if (n == 0) return std::numeric_limits<double>::infinity();
    if (n == 1) return (p - poly[0]).norm();
    // Orientation-robust: inside iff p never lies strictly on the outer side.
    bool neg = false, pos = false;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        double c = cross2(b - a, p - a);
        if (c < 0) neg = true;
        if (c > 0) pos = true;
        best = std::min(best, point_to_segment(p, a, b));
    }
    return (neg && pos) ? best : 0.0;
}

namespace {
inline double triarea2(const Vec2& a, const Vec2& b, const Vec2& c) {
    return cross2(b - a, c - a);
}
} // namespace

std::vector<FunnelBend> funnel_path(const Vec2& start, const std::vector<Vec2>& left,
                                    const std::vector<Vec2>& right, const Vec2& goal) {
    const int n = static_cast<int>(left.size());
    std::vector<FunnelBend> bends;
    if (n == 0) return bends;

    // Classic funnel with restart on apex advance.  "Left" endpoints lie on
    // the counterclockwise side of travel.  The right boundary narrows when a
    // new right endpoint moves counterclockwise (cross >= 0); it crosses over
    // once it passes the left boundary, making the left point a bend.
    Vec2 apex = start, pl = start, pr = start;
    int apex_i = -1, left_i = -1, right_i = -1;

    auto emit = [&](int portal, bool is_left, const Vec2& at) {
        bends.push_back(FunnelBend{portal, is_left, at});
    };

    for (int i = 0; i <= n; ++i) {
        Vec2 l = (i < n) ? left[i] : goal;
        Vec2 r = (i < n) ? right[i] : goal;

        if (triarea2(apex, pr, r) >= 0.0) {
            if ((apex - pr).squaredNorm() < 1e-300 || triarea2(apex, pl, r) <= 0.0) {
                pr = r;
                right_i = i;
            } else {
                emit(left_i, true, pl);
                apex = pl;
                apex_i = left_i;
                pl = apex;
                pr = apex;
                left_i = apex_i;
                right_i = apex_i;
                i = apex_i; // restart scan just past the new apex
                continue;
            }
        }
        if (triarea2(apex, pl, l) <= 0.0) {
            if ((apex - pl).squaredNorm() < 1e-300 || triarea2(apex, pr, l) >= 0.0) {
                pl = l;
                left_i = i;
            } else {
                emit(right_i, false, pr);
                apex = pr;
                apex_i = right_i;
                pl = apex;
                pr = apex;
                left_i = apex_i;
                right_i = apex_i;
                i = apex_i;
                continue;
            }
        }
    }
    return bends;
}

} // namespace cat0
