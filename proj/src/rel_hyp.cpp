#include "cat0/rel_hyp.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace cat0 {

namespace {

std::vector<PointLocation> flat_sources(const Complex2PE& X, const FlatDisc& F, double spacing) {
    std::vector<PointLocation> out;
    std::set<int> edges;
    for (int c : F.cells) {
        for (int v : X.cell(c).corners) out.push_back(PointLocation::vertex(v));
        for (int e : X.cell(c).sides) edges.insert(e);
    }
    for (int e : edges) {
        double len = X.edge(e).length;
        int k = std::max(1, static_cast<int>(std::ceil(len / spacing)));
        for (int i = 1; i < k; ++i)
            out.push_back(PointLocation::on_edge(e, static_cast<double>(i) / k));
    }
    return out;
}

Measured one_sided_sup(const GeodesicEngine& E, const std::vector<PointLocation>& from,
                       const std::vector<PointLocation>& to, double h) {
    if (from.empty()) return Measured{0.0, 2 * h};
    auto field = E.distance_field(to, h);
    double sup = 0;
    for (const auto& p : from) sup = std::max(sup, E.field_at(field, p));
    return Measured{sup, 2 * h};
}

} // namespace

Measured thinness(const GeodesicEngine& E, const PLPath sides[3], double h) {
    const Complex2PE& X = E.complex();
    Measured best{0.0, 2 * h};
    for (int i = 0; i < 3; ++i) {
        auto from = GeodesicEngine::sample_path(X, sides[i], h);
        std::vector<PointLocation> to;
        for (int j = 0; j < 3; ++j) {
            if (j == i) continue;
            auto s = GeodesicEngine::sample_path(X, sides[j], h);
            to.insert(to.end(), s.begin(), s.end());
        }
        auto m = one_sided_sup(E, from, to, h);
        best.value = std::max(best.value, m.value);
    }
    return best;
}

Measured relative_thinness(const GeodesicEngine& E, const PLPath sides[3], const FlatDisc& F,
                           double h) {
    const Complex2PE& X = E.complex();
    auto extra = flat_sources(X, F, h);
    Measured best{0.0, 2 * h};
    for (int i = 0; i < 3; ++i) {
        auto from = GeodesicEngine::sample_path(X, sides[i], h);
        std::vector<PointLocation> to = extra;
        for (int j = 0; j < 3; ++j) {
            if (j == i) continue;
            auto s = GeodesicEngine::sample_path(X, sides[j], h);
            to.insert(to.end(), s.begin(), s.end());
        }
        auto m = one_sided_sup(E, from, to, h);
        best.value = std::max(best.value, m.value);
    }
    return best;
}

Measured hausdorff_distance(const GeodesicEngine& E, const PLPath& P, const PLPath& Q, double h) {
    const Complex2PE& X = E.complex();
    auto sp = GeodesicEngine::sample_path(X, P, h);
    auto sq = GeodesicEngine::sample_path(X, Q, h);
    auto a = one_sided_sup(E, sp, sq, h);
    auto b = one_sided_sup(E, sq, sp, h);
    return Measured{std::max(a.value, b.value), 2 * h};
}

QGVerdict check_quasigeodesic(const GeodesicEngine& E, const PLPath& P, const QGParams& params,
                              double h) {
    if (params.lambda < 1.0 || params.eps < 0.0)
        throw BadParams("quasigeodesic constants need lambda >= 1, eps >= 0");
    const Complex2PE& X = E.complex();
    double len = path_length(P);
    int m = std::max(1, static_cast<int>(std::ceil(len / h)));
    std::vector<double> params_at(m + 1);
    std::vector<PointLocation> pts(m + 1);
    for (int i = 0; i <= m; ++i) {
        params_at[i] = len * i / m;
        pts[i] = path_point_at(X, P, params_at[i]);
    }
    double slack = 2 * h;
    QGVerdict verdict;
    for (int i = 0; i <= m; ++i) {
        auto field = E.distance_field({pts[i]}, h);
        for (int j = i + 1; j <= m; ++j) {
            double d = E.field_at(field, pts[j]);
            double gap = params_at[j] - params_at[i];
            double upper = params.lambda * gap + params.eps;
            double lower = gap / params.lambda - params.eps;
            if (d - slack > upper) {
                return QGVerdict{false, params_at[i], params_at[j], d, upper};
            }
            if (d + slack < lower) {
                return QGVerdict{false, params_at[i], params_at[j], d, lower};
            }
        }
    }
    return verdict;
}

TameResult tame_quasigeodesic(const GeodesicEngine& E, const PLPath& P, const QGParams& params) {
    const Complex2PE& X = E.complex();
    double len = path_length(P);
    int m = std::max(1, static_cast<int>(std::ceil(len)));
    TameResult out;
    std::vector<PointLocation> anchors;
    for (int i = 0; i <= m; ++i) anchors.push_back(path_point_at(X, P, len * i / m));
    PLPath glued;
    glued.points.push_back(anchors.front());
    for (int i = 0; i + 1 <= m; ++i) {
        auto leg = E.geodesic_between(anchors[i], anchors[i + 1], 0.5);
        glued = concat_paths(glued, leg.path);
    }
    out.path = std::move(glued);
    // Reported constants: the standard taming estimate, with the additive
    // term raised to whatever the sampled pairs actually require.
    double lp = params.lambda + params.eps;
    QGParams derived{std::max(1.0, lp), 2 * (params.lambda + params.eps)};
    double h = 0.5;
    auto v = check_quasigeodesic(E, out.path, derived, h);
    int guard = 0;
    while (!v.yes && guard++ < 8) {
        derived.eps *= 2;
        v = check_quasigeodesic(E, out.path, derived, h);
    }
    out.derived = derived;
    out.hausdorff_from_input = hausdorff_distance(E, P, out.path, 0.25);
    return out;
}

// ---------------------------------------------------------------------------
// Fellow travelling relative to flats

std::optional<FTCertificate> fellow_travel_certificate(const GeodesicEngine& E, const PLPath& alpha,
                                                       const PLPath& alpha_prime,
                                                       const std::vector<FlatDisc>& flats, double L,
                                                       double h) {
    const Complex2PE& X = E.complex();
    double la = path_length(alpha), lb = path_length(alpha_prime);
    h = std::min(h, std::max(L / 4, 0.125));
    int m = std::max(1, static_cast<int>(std::ceil(la / h)));
    int n = std::max(1, static_cast<int>(std::ceil(lb / h)));
    std::vector<double> ta(m + 1), tb(n + 1);
    std::vector<PointLocation> A(m + 1), B(n + 1);
    for (int i = 0; i <= m; ++i) {
        ta[i] = la * i / m;
        A[i] = path_point_at(X, alpha, ta[i]);
    }
    for (int j = 0; j <= n; ++j) {
        tb[j] = lb * j / n;
        B[j] = path_point_at(X, alpha_prime, tb[j]);
    }
    double tol = L + 2 * h + 1e-9;
    // Pairwise distances via per-row fields.
    std::vector<std::vector<char>> track_ok(m + 1, std::vector<char>(n + 1, 0));
    for (int i = 0; i <= m; ++i) {
        auto field = E.distance_field({A[i]}, h, /*r_max=*/tol + 4 * h);
        for (int j = 0; j <= n; ++j) track_ok[i][j] = E.field_at(field, B[j]) <= tol;
    }
    int F = static_cast<int>(flats.size());
    std::vector<std::vector<char>> a_in(F), b_in(F);
    for (int f = 0; f < F; ++f) {
        auto field = E.distance_field(flat_sources(X, flats[f], h), h);
        a_in[f].resize(m + 1);
        b_in[f].resize(n + 1);
        for (int i = 0; i <= m; ++i) a_in[f][i] = E.field_at(field, A[i]) <= tol;
        for (int j = 0; j <= n; ++j) b_in[f][j] = E.field_at(field, B[j]) <= tol;
    }
    // DP over (i, j, phase) with lexicographic cost (flat count, flat span).
    struct Cost {
        int flats = 1 << 28;
        double span = 0;
        bool operator<(const Cost& o) const {
            if (flats != o.flats) return flats < o.flats;
            return span < o.span - 1e-15;
        }
    };
    int P = F + 1; // phase 0 = tracking, phase f+1 = inside flat f
    auto idx = [&](int i, int j, int p) { return (i * (n + 1) + j) * P + p; };
    std::vector<Cost> best(static_cast<size_t>(m + 1) * (n + 1) * P, Cost{});
    std::vector<int> parent(best.size(), -1);
    auto relax = [&](int to, Cost c, int from) {
        if (c < best[to]) {
            best[to] = c;
            parent[to] = from;
            return true;
        }
        return false;
    };
    if (!track_ok[0][0]) return std::nullopt;
    best[idx(0, 0, 0)] = Cost{0, 0.0};
    // Process states in increasing i + j (all moves advance or switch phase;
    // switches are resolved by a small inner loop per diagonal).
    for (int diag = 0; diag <= m + n; ++diag) {
        for (int rep = 0; rep < 2 + F; ++rep) { // settle same-cell phase switches
            for (int i = std::max(0, diag - n); i <= std::min(m, diag); ++i) {
                int j = diag - i;
                // tracking <-> flat switches at (i, j)
                Cost c0 = best[idx(i, j, 0)];
                if (c0.flats < (1 << 28)) {
                    for (int f = 0; f < F; ++f) {
                        if (a_in[f][i] && b_in[f][j])
                            relax(idx(i, j, f + 1), Cost{c0.flats + 1, c0.span},
                                  idx(i, j, 0));
                    }
                }
                for (int f = 0; f < F; ++f) {
                    Cost cf = best[idx(i, j, f + 1)];
                    if (cf.flats < (1 << 28) && track_ok[i][j])
                        relax(idx(i, j, 0), cf, idx(i, j, f + 1));
                }
            }
        }
        // advances
        for (int i = std::max(0, diag - n); i <= std::min(m, diag); ++i) {
            int j = diag - i;
            for (int p = 0; p < P; ++p) {
                Cost c = best[idx(i, j, p)];
                if (!(c.flats < (1 << 28))) continue;
                auto ok_state = [&](int i2, int j2) {
                    if (p == 0) return static_cast<bool>(track_ok[i2][j2]);
                    return static_cast<bool>(a_in[p - 1][i2] && b_in[p - 1][j2]);
                };
                auto step_cost = [&](int i2, int j2) {
                    if (p == 0) return c;
                    Cost c2 = c;
                    c2.span += (ta[std::min(i2, m)] - ta[i]) + (tb[std::min(j2, n)] - tb[j]);
                    return c2;
                };
                if (i < m && ok_state(i + 1, j)) relax(idx(i + 1, j, p), step_cost(i + 1, j), idx(i, j, p));
                if (j < n && ok_state(i, j + 1)) relax(idx(i, j + 1, p), step_cost(i, j + 1), idx(i, j, p));
                if (i < m && j < n && ok_state(i + 1, j + 1))
                    relax(idx(i + 1, j + 1, p), step_cost(i + 1, j + 1), idx(i, j, p));
            }
        }
    }
    int goal = idx(m, n, 0);
    if (!(best[goal].flats < (1 << 28))) return std::nullopt;
    // Reconstruct the phase runs.
    std::vector<std::tuple<int, int, int>> states; // (i, j, phase)
    int cur = goal;
    while (cur >= 0) {
        int p = cur % P;
        int j = (cur / P) % (n + 1);
        int i = cur / (P * (n + 1));
        states.emplace_back(i, j, p);
        cur = parent[cur];
    }
    std::reverse(states.begin(), states.end());
    FTCertificate cert;
    cert.L = L;
    cert.uncertainty = 2 * h;
    cert.t.push_back(0);
    cert.tp.push_back(0);
    int phase = 0;
    for (size_t k = 0; k + 1 < states.size(); ++k) {
        auto [i, j, p] = states[k];
        auto [i2, j2, p2] = states[k + 1];
        if (p == 0 && p2 != 0) { // entering a flat
            cert.s.push_back(ta[i]);
            cert.sp.push_back(tb[j]);
            cert.flats.push_back(p2 - 1);
        }
        if (p != 0 && p2 == 0) { // leaving a flat
            cert.t.push_back(ta[i]);
            cert.tp.push_back(tb[j]);
        }
        phase = p2;
    }
    (void)phase;
    cert.s.push_back(la);
    cert.sp.push_back(lb);
    if (!revalidate_certificate(E, alpha, alpha_prime, flats, cert, h)) return std::nullopt;
    return cert;
}

bool revalidate_certificate(const GeodesicEngine& E, const PLPath& alpha,
                            const PLPath& alpha_prime, const std::vector<FlatDisc>& flats,
                            const FTCertificate& cert, double h) {
    const Complex2PE& X = E.complex();
    size_t n = cert.flats.size();
    if (cert.t.size() != n + 1 || cert.s.size() != n + 1 || cert.tp.size() != n + 1 ||
        cert.sp.size() != n + 1)
        return false;
    double la = path_length(alpha), lb = path_length(alpha_prime);
    auto monotone = [&](const std::vector<double>& t, const std::vector<double>& s, double total) {
        double prev = 0;
        for (size_t i = 0; i <= n; ++i) {
            if (t[i] < prev - 1e-9 || s[i] < t[i] - 1e-9) return false;
            prev = s[i];
        }
        return std::abs(s[n] - total) <= 1e-6;
    };
    if (!monotone(cert.t, cert.s, la) || !monotone(cert.tp, cert.sp, lb)) return false;
    double tol = cert.L + cert.uncertainty + 2 * h + 1e-9;
    for (size_t i = 0; i <= n; ++i) {
        auto pa = subpath(X, alpha, cert.t[i], cert.s[i]);
        auto pb = subpath(X, alpha_prime, cert.tp[i], cert.sp[i]);
        if (hausdorff_distance(E, pa, pb, h).value > tol) return false;
    }
    for (size_t i = 1; i <= n; ++i) {
        auto field = E.distance_field(flat_sources(X, flats[cert.flats[i - 1]], h), h);
        for (const auto& p :
             GeodesicEngine::sample_path(X, subpath(X, alpha, cert.s[i - 1], cert.t[i]), h))
            if (E.field_at(field, p) > tol) return false;
        for (const auto& p : GeodesicEngine::sample_path(
                 X, subpath(X, alpha_prime, cert.sp[i - 1], cert.tp[i]), h))
            if (E.field_at(field, p) > tol) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Divergence

double quadratic_divergence_bound(double R, double theta, double r) {
    if (r < 2 * R) return 0.0;
    double k = std::floor(r / (2 * R));
    return R * theta * k * (k - 1) / 2.0;
}

DivergenceReport divergence_check(const DiagramMap& M, const std::vector<int>& gamma_darts,
                                  const RuffleParams& params, double h) {
    auto verdict = is_ruffled(M, gamma_darts, params, true, h);
    if (!verdict.yes)
        throw PreconditionRuffleFailed("the diagram is not ruffled along gamma");
    const DiscDiagram& D = M.D;
    Complex2PE Y = M.as_complex();
    GeodesicEngine E(Y);
    // alpha = the rest of gamma's boundary cycle.
    int face = D.face_of_dart(gamma_darts.front());
    std::set<int> gset(gamma_darts.begin(), gamma_darts.end());
    std::vector<int> alpha;
    for (int d : D.face(face).cycle)
        if (!gset.count(d)) alpha.push_back(d);
    DivergenceReport rep;
    for (int d : alpha) rep.alpha_length += Y.edge(D.edge_of(d)).length;
    std::vector<PointLocation> alpha_pts;
    alpha_pts.push_back(PointLocation::vertex(D.tail(gamma_darts.front())));
    alpha_pts.push_back(PointLocation::vertex(D.head(gamma_darts.back())));
    for (int d : alpha) {
        int e = D.edge_of(d);
        alpha_pts.push_back(PointLocation::vertex(D.tail(d)));
        double len = Y.edge(e).length;
        int k = std::max(1, static_cast<int>(std::ceil(len / h)));
        for (int i = 1; i < k; ++i)
            alpha_pts.push_back(PointLocation::on_edge(e, static_cast<double>(i) / k));
    }
    auto field = E.distance_field(alpha_pts, h);
    // Samples along gamma.
    double acc = 0;
    std::vector<std::pair<double, PointLocation>> samples;
    samples.emplace_back(0.0, PointLocation::vertex(D.tail(gamma_darts.front())));
    for (int d : gamma_darts) {
        int e = D.edge_of(d);
        double len = Y.edge(e).length;
        int k = std::max(1, static_cast<int>(std::ceil(len / (params.R / 2))));
        for (int i = 1; i < k; ++i)
            samples.emplace_back(acc + len * i / k,
                                 PointLocation::on_edge(e, d % 2 == 0 ? static_cast<double>(i) / k
                                                                      : 1.0 - static_cast<double>(i) / k));
        acc += len;
        samples.emplace_back(acc, PointLocation::vertex(D.head(d)));
    }
    for (const auto& [param, p] : samples) {
        DivergenceReport::Sample s;
        s.gamma_param = param;
        s.r_lower = std::max(0.0, E.field_at(field, p) - 2 * h);
        s.bound = quadratic_divergence_bound(params.R, params.theta, s.r_lower);
        s.margin = rep.alpha_length - s.bound;
        if (s.margin < -1e-6) rep.all_ok = false;
        rep.samples.push_back(s);
    }
    return rep;
}

BroomReport broom_divergence(const GeodesicEngine& E, const PLPath& a, const PLPath& b,
                             double outer_length) {
    const Complex2PE& X = E.complex();
    BroomReport rep;
    double la = path_length(a), lb = path_length(b);
    rep.height = std::min(la, lb);
    // Handle: maximal common prefix (pointwise within 1e-9), by bisection.
    double lo = 0, hi = rep.height;
    auto together = [&](double s) {
        auto pa = path_point_at(X, a, s);
        auto pb = path_point_at(X, b, s);
        if (pa.same_as(pb, 1e-9)) return true;
        return E.geodesic_between(pa, pb, 0.5).length <= 1e-9;
    };
    if (!together(0)) throw BadParams("broom geodesics do not share their tip");
    if (together(hi)) {
        rep.handle_length = hi;
        rep.branching_angle = 0.0;
    } else {
        for (int it = 0; it < 50; ++it) {
            double mid = (lo + hi) / 2;
            (together(mid) ? lo : hi) = mid;
        }
        rep.handle_length = lo;
        auto sa = subpath(X, a, rep.handle_length, la);
        auto sb = subpath(X, b, rep.handle_length, lb);
        rep.branching_angle = E.angle_via_directions(sa, sb);
    }
    rep.bound = std::max(0.0, (rep.height - rep.handle_length) * rep.branching_angle / 2.0);
    rep.tip_separation =
        E.geodesic_between(path_point_at(X, a, la), path_point_at(X, b, lb), 0.5).length;
    rep.ok = rep.tip_separation >= rep.bound - 1e-6 && outer_length >= rep.bound - 1e-6;
    return rep;
}

} // namespace cat0
