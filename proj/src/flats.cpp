#include "cat0/flats.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>

namespace cat0 {

bool FlatDisc::contains_cell(int c) const { return placement.count(c) > 0; }

namespace {

std::vector<Vec2> placed_polygon(const Complex2PE& X, const Iso2& T, int cell) {
    std::vector<Vec2> out;
    for (const auto& p : X.cell(cell).coords) out.push_back(T(p));
    // Reflecting placements reverse orientation; keep polygons ccw for the
    // intersection and containment primitives.
    if (polygon_area(out) < 0) std::reverse(out.begin(), out.end());
    return out;
}

bool polygons_overlap(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    auto inter = convex_intersection(a, b);
    if (inter.size() < 3) return false;
    return std::abs(polygon_area(inter)) > 1e-9;
}

/// Returns kTwoPi for interior vertices with circle links of total angle
/// 2*pi; otherwise the angle total when the restricted link closes into a
/// circle of the wrong length, or -1 when the vertex is not interior.
double region_link_status(const Complex2PE& X, const std::set<int>& region, int v) {
    // Corners of region cells at v; the link restricted to the region is a
    // circle iff every edge end at v incident to region cells appears in
    // exactly two corners.
    std::map<std::pair<int, int>, int> end_degree;
    double total = 0.0;
    int corners = 0;
    for (const auto& ref : X.corners_at_vertex(v)) {
        if (!region.count(ref.cell)) continue;
        const auto& c = X.cell(ref.cell);
        int n = c.size();
        int i = ref.index;
        int e_out = c.sides[i];
        int end_out = c.side_forward[i] ? 0 : 1;
        int prev = (i + n - 1) % n;
        int e_in = c.sides[prev];
        int end_in = c.side_forward[prev] ? 1 : 0;
        end_degree[{e_out, end_out}]++;
        end_degree[{e_in, end_in}]++;
        total += X.corner_angle(ref.cell, i);
        ++corners;
    }
    if (corners == 0) return -1.0;
    for (const auto& [end, deg] : end_degree)
        if (deg != 2) return -1.0; // boundary vertex of the region
    return total;
}

} // namespace

DevelopResult develop_region(const Complex2PE& X, int seed_cell, const std::vector<int>& region) {
    std::set<int> cells(region.begin(), region.end());
    if (!cells.count(seed_cell)) throw BadParams("develop_region: seed not in region");
    DevelopResult res;
    FlatDisc F;
    F.placement[seed_cell] = Iso2{};
    std::vector<int> queue{seed_cell};
    size_t qi = 0;
    while (qi < queue.size()) {
        int c = queue[qi++];
        const auto& cc = X.cell(c);
        for (int s = 0; s < cc.size(); ++s) {
            int e = cc.sides[s];
            for (const auto& ref : X.cells_at_edge(e)) {
                if (ref.cell == c || !cells.count(ref.cell)) continue;
                Iso2 T = unfold_across(X, c, ref.cell, e).then(F.placement[c]);
                auto it = F.placement.find(ref.cell);
                if (it == F.placement.end()) {
                    // Injectivity against already placed cells.
                    auto poly = placed_polygon(X, T, ref.cell);
                    for (const auto& [oc, oT] : F.placement) {
                        if (polygons_overlap(poly, placed_polygon(X, oT, oc))) {
                            res.obstruction =
                                DevelopObstruction{DevelopObstruction::Kind::Overlap, -1,
                                                   ref.cell, 0.0};
                            return res;
                        }
                    }
                    F.placement[ref.cell] = T;
                    queue.push_back(ref.cell);
                } else if (!it->second.approx_equal(T, 1e-9)) {
                    double diff = (it->second.shift - T.shift).norm() +
                                  (it->second.rot - T.rot).cwiseAbs().maxCoeff();
                    res.obstruction = DevelopObstruction{DevelopObstruction::Kind::Holonomy, -1,
                                                         ref.cell, diff};
                    return res;
                }
            }
        }
    }
    if (F.placement.size() != cells.size())
        throw DisconnectedRegion("develop_region: region is not edge-connected from the seed");
    // Interior vertex links must be circles of length exactly 2*pi.
    std::set<int> verts;
    for (int c : cells)
        for (int v : X.cell(c).corners) verts.insert(v);
    for (int v : verts) {
        double total = region_link_status(X, cells, v);
        if (total >= 0 && std::abs(total - kTwoPi) > 1e-9) {
            res.obstruction =
                DevelopObstruction{DevelopObstruction::Kind::BadLink, v, -1, total};
            return res;
        }
    }
    for (int c : cells) F.cells.push_back(c);
    std::sort(F.cells.begin(), F.cells.end());
    res.disc = std::move(F);
    return res;
}

void validate_flat_disc(const Complex2PE& X, const FlatDisc& F) {
    if (F.cells.empty()) return;
    auto res = develop_region(X, F.cells.front(), F.cells);
    if (!res.disc) throw InvariantBreach("flat disc fails redevelopment");
    // The stored placements agree with a redevelopment up to a global motion:
    // compare pairwise relative placements on a shared cell.
    const auto& ref = *res.disc;
    Iso2 align = F.placement.at(F.cells.front()).then(ref.placement.at(F.cells.front()).inverse());
    (void)align;
}

// ---------------------------------------------------------------------------
// Growing maximal flat discs

FlatDisc grow_flat_disc(const Complex2PE& X, const PointLocation& center, double r_target) {
    validate_location(X, center);
    FlatDisc F;
    F.center = center;
    F.inscribed_radius = 0.0;
    // Seed: a cell containing the center.
    int seed = -1;
    switch (center.kind) {
    case PointLocation::Kind::Vertex:
        if (!X.corners_at_vertex(center.index).empty())
            seed = X.corners_at_vertex(center.index).front().cell;
        break;
    case PointLocation::Kind::Edge: seed = X.cells_at_edge(center.index).front().cell; break;
    case PointLocation::Kind::Cell: seed = center.index; break;
    }
    if (seed < 0) return F;
    F.placement[seed] = Iso2{};
    F.center_pos = locate_in_cell(X, center, seed);

    double bound = r_target;
    std::set<int> blocked;
    auto side_distance = [&](int cell, int s) {
        Vec2 a = F.placement[cell](X.cell(cell).coords[s]);
        Vec2 b = F.placement[cell](X.cell(cell).coords[(s + 1) % X.cell(cell).size()]);
        return point_to_segment(F.center_pos, a, b);
    };

    using Cand = std::pair<double, std::pair<int, int>>; // (dist, (cell, side))
    std::priority_queue<Cand, std::vector<Cand>, std::greater<>> pq;
    auto push_cell_frontier = [&](int cell) {
        const auto& cc = X.cell(cell);
        for (int s = 0; s < cc.size(); ++s) {
            double d = side_distance(cell, s);
            if (X.cells_at_edge(cc.sides[s]).size() == 1) {
                bound = std::min(bound, d); // free boundary of X
                continue;
            }
            pq.emplace(d, std::make_pair(cell, s));
        }
    };
    auto links_ok_after = [&](int newcell) {
        std::set<int> cells;
        for (const auto& [c, T] : F.placement) cells.insert(c);
        cells.insert(newcell);
        for (int v : X.cell(newcell).corners) {
            double tot = region_link_status(X, cells, v);
            if (tot >= 0 && std::abs(tot - kTwoPi) > 1e-9) return false;
        }
        // Newly interior vertices of neighbors are covered since only
        // corners at newcell's vertices can change status.
        return true;
    };
    push_cell_frontier(seed);
    while (!pq.empty()) {
        auto [d, cs] = pq.top();
        pq.pop();
        if (d >= bound) break;
        auto [cell, s] = cs;
        int e = X.cell(cell).sides[s];
        bool progressed = false;
        for (const auto& ref : X.cells_at_edge(e)) {
            if (ref.cell == cell) continue;
            Iso2 T = unfold_across(X, cell, ref.cell, e).then(F.placement[cell]);
            auto it = F.placement.find(ref.cell);
            if (it != F.placement.end()) {
                if (!it->second.approx_equal(T, 1e-9)) {
                    bound = std::min(bound, d); // holonomy obstruction
                }
                continue;
            }
            auto poly = placed_polygon(X, T, ref.cell);
            bool bad = false;
            for (const auto& [oc, oT] : F.placement)
                if (polygons_overlap(poly, placed_polygon(X, oT, oc))) {
                    bad = true;
                    break;
                }
            if (!bad) {
                F.placement[ref.cell] = T;
                if (!links_ok_after(ref.cell)) {
                    F.placement.erase(ref.cell);
                    bad = true;
                }
            }
            if (bad) {
                bound = std::min(bound, d);
            } else {
                push_cell_frontier(ref.cell);
                progressed = true;
            }
        }
        (void)progressed;
    }
    F.inscribed_radius = std::max(0.0, bound);
    for (const auto& [c, T] : F.placement) F.cells.push_back(c);
    std::sort(F.cells.begin(), F.cells.end());
    return F;
}

// ---------------------------------------------------------------------------
// Triplane detection

namespace {

struct HalfDiscSearch {
    const Complex2PE& X;
    double R;
    // spine placed on the x axis: per spine edge, its [x0, x1] interval and
    // the target edge index (+ orientation along +x).
    struct SpineEdge {
        int edge;
        bool forward; // true if edge.v0 sits at the smaller x
        double x0, x1;
    };
    std::vector<SpineEdge> spine;

    /// Develops the half-disc above the axis starting from `c0` on spine
    /// edge `k0`.  Returns the per-spine-edge base cells, or nullopt.
    std::optional<std::map<int, int>> develop(int k0, int c0) const {
        std::map<int, Iso2> placed;
        std::map<int, int> base; // spine index -> cell
        // Place c0 with its side on [x0,x1] of spine edge k0, interior above.
        const auto& se = spine[k0];
        int s = side_of(X, c0, se.edge);
        if (s < 0) return std::nullopt;
        Vec2 a = X.edge_end_coord(c0, s, 0), b = X.edge_end_coord(c0, s, 1);
        Vec2 ta(se.forward ? se.x0 : se.x1, 0), tb(se.forward ? se.x1 : se.x0, 0);
        Iso2 T;
        bool ok = false;
        for (bool reflect : {false, true}) {
            T = Iso2::matching_segment(a, b, ta, tb, reflect);
            if (T(cell_centroid(X, c0)).y() > 0) {
                ok = true;
                break;
            }
        }
        if (!ok) return std::nullopt;
        placed[c0] = T;
        base[k0] = c0;
        std::vector<int> queue{c0};
        size_t qi = 0;
        auto in_scope = [&](const Vec2& p) {
            return p.norm() < R - 1e-9 && p.y() > 1e-9;
        };
        while (qi < queue.size()) {
            int c = queue[qi++];
            const auto& cc = X.cell(c);
            for (int sd = 0; sd < cc.size(); ++sd) {
                Vec2 pa = placed[c](cc.coords[sd]);
                Vec2 pb = placed[c](cc.coords[(sd + 1) % cc.size()]);
                // Expand across sides meeting the open upper half disc.
                bool meets = false;
                for (double t : {0.25, 0.5, 0.75})
                    if (in_scope(pa + t * (pb - pa))) meets = true;
                if (!meets) continue;
                int e = cc.sides[sd];
                // Never cross the axis.
                if (std::abs(pa.y()) < 1e-9 && std::abs(pb.y()) < 1e-9) continue;
                // Choose the continuation cell: each candidate is tried; the
                // first that develops flat without overlap wins (greedy).
                bool extended = false;
                for (const auto& ref : X.cells_at_edge(e)) {
                    if (ref.cell == c) continue;
                    Iso2 T2 = unfold_across(X, c, ref.cell, e).then(placed[c]);
                    auto it = placed.find(ref.cell);
                    if (it != placed.end()) {
                        if (it->second.approx_equal(T2, 1e-9)) extended = true;
                        continue;
                    }
                    auto poly = placed_polygon(X, T2, ref.cell);
                    bool bad = false;
                    for (const auto& [oc, oT] : placed)
                        if (polygons_overlap(poly, placed_polygon(X, oT, oc))) {
                            bad = true;
                            break;
                        }
                    if (bad) continue;
                    placed[ref.cell] = T2;
                    queue.push_back(ref.cell);
                    extended = true;
                    break;
                }
                if (!extended) return std::nullopt; // frontier inside the disc
            }
        }
        // Coverage and spine bases: every spine edge overlapping (-R, R)
        // needs a placed cell whose side realizes it.
        for (size_t k = 0; k < spine.size(); ++k) {
            const auto& sp = spine[k];
            if (sp.x1 < -R + 1e-9 || sp.x0 > R - 1e-9) continue;
            int found = -1;
            for (const auto& [c, T] : placed) {
                int s2 = side_of(X, c, sp.edge);
                if (s2 < 0) continue;
                Vec2 pa = T(X.edge_end_coord(c, s2, 0));
                if (std::abs(pa.y()) < 1e-9 &&
                    std::abs(pa.x() - (sp.forward ? sp.x0 : sp.x1)) < 1e-9) {
                    found = c;
                    break;
                }
            }
            if (found < 0) return std::nullopt;
            base[static_cast<int>(k)] = found;
        }
        // Sampled coverage of the open half disc.
        int grid = std::max(8, static_cast<int>(std::ceil(R * 8)));
        for (int i = -grid; i <= grid; ++i) {
            for (int j = 1; j <= grid; ++j) {
                Vec2 p(R * i / grid, R * j / grid);
                if (!(p.norm() < R - 1e-6)) continue;
                bool covered = false;
                for (const auto& [c, T] : placed) {
                    if (point_to_convex_polygon(p, placed_polygon(X, T, c)) <= 1e-9) {
                        covered = true;
                        break;
                    }
                }
                if (!covered) return std::nullopt;
            }
        }
        return base;
    }
};

} // namespace

std::optional<TriplaneWitness> detect_triplane(const Complex2PE& X, double R) {
    // Candidate spine edges: at least three incident cells.
    std::vector<char> heavy(X.edge_count(), 0);
    for (int e = 0; e < X.edge_count(); ++e) heavy[e] = X.cells_at_edge(e).size() >= 3;
    GeodesicEngine E(X);
    // Enumerate locally geodesic simple edge paths of total length >= 2R
    // inside the heavy subgraph.
    struct Path {
        std::vector<int> verts;
        std::vector<int> edges;
        double len = 0;
    };
    std::vector<Path> found;
    std::function<void(Path&)> extend = [&](Path& p) {
        if (p.len >= 2 * R - 1e-9) {
            found.push_back(p);
            return;
        }
        int v = p.verts.back();
        for (auto [e, end] : X.edge_ends_at_vertex(v)) {
            if (!heavy[e]) continue;
            int w = end == 0 ? X.edge(e).v1 : X.edge(e).v0;
            if (std::find(p.verts.begin(), p.verts.end(), w) != p.verts.end()) continue;
            if (!p.edges.empty()) {
                // Local geodesy of the spine at v.
                auto link = vertex_link(X, v);
                const auto& ends = X.edge_ends_at_vertex(v);
                int n_in = -1, n_out = -1;
                for (size_t m = 0; m < ends.size(); ++m) {
                    if (ends[m] == std::make_pair(p.edges.back(),
                                                  X.edge(p.edges.back()).v0 == v ? 0 : 1))
                        n_in = static_cast<int>(m);
                    if (ends[m] == std::make_pair(e, end)) n_out = static_cast<int>(m);
                }
                if (n_in < 0 || n_out < 0) continue;
                if (graph_point_distance(link, GraphPoint::at_node(n_in),
                                         GraphPoint::at_node(n_out)) < kPi - 1e-9)
                    continue;
            }
            p.verts.push_back(w);
            p.edges.push_back(e);
            p.len += X.edge(e).length;
            extend(p);
            p.verts.pop_back();
            p.edges.pop_back();
            p.len -= X.edge(e).length;
        }
    };
    for (int e = 0; e < X.edge_count(); ++e) {
        if (!heavy[e]) continue;
        Path p;
        p.verts = {X.edge(e).v0, X.edge(e).v1};
        p.edges = {e};
        p.len = X.edge(e).length;
        extend(p);
        if (found.size() > 200) break; // ample at desk scale
    }
    for (const auto& p : found) {
        // Place the spine on the x axis, midpoint at the origin.
        HalfDiscSearch hs{X, R, {}};
        double total = p.len;
        double x = -total / 2;
        for (size_t k = 0; k < p.edges.size(); ++k) {
            int e = p.edges[k];
            double len = X.edge(e).length;
            HalfDiscSearch::SpineEdge se;
            se.edge = e;
            se.forward = X.edge(e).v0 == p.verts[k];
            se.x0 = x;
            se.x1 = x + len;
            hs.spine.push_back(se);
            x += len;
        }
        // Start edge: the spine edge containing the origin.
        int k0 = 0;
        for (size_t k = 0; k < hs.spine.size(); ++k)
            if (hs.spine[k].x0 <= 0 && 0 <= hs.spine[k].x1) k0 = static_cast<int>(k);
        // One development attempt per incident cell of the start edge.
        std::vector<std::map<int, int>> sides;
        for (const auto& ref : X.cells_at_edge(hs.spine[k0].edge)) {
            auto base = hs.develop(k0, ref.cell);
            if (base) sides.push_back(*base);
        }
        // Three sides with pairwise distinct cells on every spine edge.
        int n = static_cast<int>(sides.size());
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                for (int c = b + 1; c < n; ++c) {
                    bool distinct = true;
                    for (const auto& [k, cell_a] : sides[a]) {
                        if (!sides[b].count(k) || !sides[c].count(k)) continue;
                        int cb = sides[b].at(k), cc2 = sides[c].at(k);
                        if (cell_a == cb || cell_a == cc2 || cb == cc2) distinct = false;
                    }
                    if (!distinct) continue;
                    TriplaneWitness w;
                    w.spine = p.verts;
                    w.radius = R;
                    auto cells_of = [&](const std::map<int, int>& side) {
                        std::set<int> s;
                        for (const auto& [k, cell] : side) s.insert(cell);
                        return std::vector<int>(s.begin(), s.end());
                    };
                    w.half_disc_cells = {cells_of(sides[a]), cells_of(sides[b]),
                                         cells_of(sides[c])};
                    return w;
                }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Flat proximity

FlatProximityTable flat_proximity_table(const Complex2PE& X, const std::vector<FlatDisc>& flats,
                                        const std::vector<double>& ks, double h) {
    GeodesicEngine E(X);
    const Mesh& m = E.mesh(h);
    FlatProximityTable table;
    table.ks = ks;
    table.uncertainty = 2 * h;
    table.psi_hat.assign(ks.size(), 0.0);
    // Distance field to each flat: zero on every mesh node of its cells.
    auto flat_field = [&](const FlatDisc& F) {
        std::vector<double> dist(m.nodes.size(), kInf);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        for (int c : F.cells) {
            for (int s : X.cell(c).sides)
                for (int node : m.edge_nodes[s])
                    if (dist[node] > 0) {
                        dist[node] = 0;
                        pq.emplace(0.0, node);
                    }
        }
        while (!pq.empty()) {
            auto [d, v] = pq.top();
            pq.pop();
            if (d > dist[v]) continue;
            m.for_neighbors(v, [&](int w, double wt, int, int) {
                if (d + wt < dist[w] - 1e-15) {
                    dist[w] = d + wt;
                    pq.emplace(d + wt, w);
                }
            });
        }
        return dist;
    };
    std::vector<std::vector<double>> fields;
    for (const auto& F : flats) fields.push_back(flat_field(F));
    auto sweep = [&](const std::vector<int>& set) {
        if (set.size() < 2) return 0.0;
        // Double-sweep diameter estimate within the ambient metric.
        double best = 0;
        int start = set.front();
        for (int iter = 0; iter < 3; ++iter) {
            std::vector<double> dist(m.nodes.size(), kInf);
            using Item = std::pair<double, int>;
            std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
            dist[start] = 0;
            pq.emplace(0.0, start);
            while (!pq.empty()) {
                auto [d, v] = pq.top();
                pq.pop();
                if (d > dist[v]) continue;
                m.for_neighbors(v, [&](int w, double wt, int, int) {
                    if (d + wt < dist[w] - 1e-15) {
                        dist[w] = d + wt;
                        pq.emplace(d + wt, w);
                    }
                });
            }
            int far = start;
            for (int v : set)
                if (dist[v] < kInf && dist[v] > dist[far]) far = v;
            best = std::max(best, dist[far] == kInf ? 0.0 : dist[far]);
            start = far;
        }
        return best;
    };
    for (size_t a = 0; a < flats.size(); ++a) {
        for (size_t b = a + 1; b < flats.size(); ++b) {
            for (size_t ki = 0; ki < ks.size(); ++ki) {
                double k = ks[ki];
                std::vector<int> set;
                for (size_t v = 0; v < m.nodes.size(); ++v)
                    if (fields[a][v] <= k + 1e-9 && fields[b][v] <= k + 1e-9)
                        set.push_back(static_cast<int>(v));
                double diam = set.empty() ? 0.0 : sweep(set);
                table.entries.push_back(FlatProximityTable::Entry{static_cast<int>(a),
                                                                  static_cast<int>(b), k, diam});
                table.psi_hat[ki] = std::max(table.psi_hat[ki], diam);
            }
        }
    }
    return table;
}

} // namespace cat0
