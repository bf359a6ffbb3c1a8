#include "cat0/generators.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <set>

namespace cat0 {

using nlohmann::json;

// ---------------------------------------------------------------------------
// SimpleGraph

SimpleGraph SimpleGraph::cycle(int k) {
    SimpleGraph g;
    g.nodes = k;
    for (int i = 0; i < k; ++i) g.edges.emplace_back(i, (i + 1) % k);
    return g;
}

std::vector<std::vector<int>> SimpleGraph::adjacency() const {
    std::vector<std::vector<int>> adj(nodes);
    for (auto [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    return adj;
}

bool SimpleGraph::simple() const {
    std::set<std::pair<int, int>> seen;
    for (auto [a, b] : edges) {
        if (a == b) return false;
        if (a < 0 || b < 0 || a >= nodes || b >= nodes) return false;
        auto key = std::minmax(a, b);
        if (!seen.insert({key.first, key.second}).second) return false;
    }
    return true;
}

int SimpleGraph::girth() const {
    auto adj = adjacency();
    int best = 1 << 29;
    for (int s = 0; s < nodes; ++s) {
        std::vector<int> dist(nodes, -1), par(nodes, -1);
        std::deque<int> q{s};
        dist[s] = 0;
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            for (int w : adj[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    par[w] = v;
                    q.push_back(w);
                } else if (w != par[v]) {
                    best = std::min(best, dist[v] + dist[w] + 1);
                }
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Builder

namespace {

struct Builder {
    std::vector<std::string> vertex_ids;
    std::map<std::string, int> vmap;
    std::vector<Complex2PE::Edge> edges;
    std::map<std::pair<int, int>, std::vector<int>> edges_between;
    std::vector<Complex2PE::Cell> cells;

    int vertex(const std::string& id) {
        auto it = vmap.find(id);
        if (it != vmap.end()) return it->second;
        int v = static_cast<int>(vertex_ids.size());
        vertex_ids.push_back(id);
        vmap[id] = v;
        return v;
    }

    int edge_between(int a, int b, double len) {
        auto key = std::minmax(a, b);
        auto& lst = edges_between[{key.first, key.second}];
        for (int e : lst)
            if (std::abs(edges[e].length - len) <= kMetricTol) return e;
        Complex2PE::Edge e;
        e.id = "e" + std::to_string(edges.size());
        e.v0 = key.first;
        e.v1 = key.second;
        e.length = len;
        int idx = static_cast<int>(edges.size());
        edges.push_back(e);
        lst.push_back(idx);
        return idx;
    }

    void add_cell(const std::vector<int>& corners, const std::vector<Vec2>& coords) {
        Complex2PE::Cell c;
        c.id = "c" + std::to_string(cells.size());
        c.corners = corners;
        c.coords = coords;
        int n = static_cast<int>(corners.size());
        for (int i = 0; i < n; ++i) {
            int j = (i + 1) % n;
            double len = (coords[j] - coords[i]).norm();
            int e = edge_between(corners[i], corners[j], len);
            c.sides.push_back(e);
            c.side_forward.push_back(edges[e].v0 == corners[i]);
        }
        cells.push_back(std::move(c));
    }

    Complex2PE finish() { return Complex2PE(vertex_ids, edges, cells); }
};

std::vector<Vec2> unit_square() {
    return {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
}

std::vector<Vec2> square_at(double x, double y) {
    return {Vec2(x, y), Vec2(x + 1, y), Vec2(x + 1, y + 1), Vec2(x, y + 1)};
}

std::vector<Vec2> regular_polygon(int p) {
    double R = 0.5 / std::sin(kPi / p);
    std::vector<Vec2> out;
    for (int i = 0; i < p; ++i) {
        double a = kTwoPi * i / p;
        out.emplace_back(R * std::cos(a), R * std::sin(a));
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// grid

Generated generate_grid(int n) {
    if (n < 1) throw BadParams("grid: n must be >= 1");
    Builder b;
    auto vid = [](int i, int j) { return "v" + std::to_string(i) + "_" + std::to_string(j); };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) b.vertex(vid(i, j));
    Generated g;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            std::vector<int> corners = {b.vertex(vid(i, j)), b.vertex(vid(i + 1, j)),
                                        b.vertex(vid(i + 1, j + 1)), b.vertex(vid(i, j + 1))};
            b.add_cell(corners, square_at(i, j));
        }
    g.X = b.finish();
    g.points["center"] = PointLocation::vertex(g.X.vertex_index(vid(n / 2, n / 2)));
    g.points["corner"] = PointLocation::vertex(g.X.vertex_index(vid(0, 0)));
    std::vector<std::string> all;
    for (const auto& c : g.X.cells()) all.push_back(c.id);
    g.cell_groups["plane"] = all;
    return g;
}

// ---------------------------------------------------------------------------
// hex

Generated generate_hex(int n) {
    if (n < 1) throw BadParams("hex: n must be >= 1");
    Builder b;
    auto corner_id = [](const Vec2& p) {
        long kx = std::lround(2.0 * p.x());
        long ky = std::lround(2.0 * p.y() / std::sqrt(3.0));
        return "v" + std::to_string(kx) + "_" + std::to_string(ky);
    };
    Generated g;
    // Axial coordinates of hex centers within distance n-1 of the origin.
    for (int q = -(n - 1); q <= n - 1; ++q) {
        for (int r = -(n - 1); r <= n - 1; ++r) {
            int s = -q - r;
            if (std::abs(s) > n - 1) continue;
            Vec2 center(1.5 * q, std::sqrt(3.0) * (r + q / 2.0));
            std::vector<int> corners;
            std::vector<Vec2> coords;
            for (int k = 0; k < 6; ++k) {
                Vec2 p = center + Vec2(std::cos(kPi * k / 3.0), std::sin(kPi * k / 3.0));
                corners.push_back(b.vertex(corner_id(p)));
                coords.push_back(p);
            }
            b.add_cell(corners, coords);
        }
    }
    g.X = b.finish();
    g.points["center"] = PointLocation::vertex(g.X.vertex_index(corner_id(Vec2(1, 0))));
    return g;
}

// ---------------------------------------------------------------------------
// Regular tiling balls (cone and Moussong complexes)

namespace {

/// Grows a ball of a piecewise Euclidean complex made of regular p-gons in
/// which every completed vertex link is isomorphic to the prescribed graph L.
/// Vertices at combinatorial distance <= radius-1 from the base vertex are
/// completed level by level; the embedding of each partial link into L is
/// chosen as the lexicographically first extension.
struct TilingBall {
    const SimpleGraph& L;
    int p;
    int radius;
    std::vector<std::vector<int>> Ladj;

    Builder b;
    std::vector<int> dist;
    std::vector<char> complete;
    // Per vertex: incident edges, and corners as (edge index, edge index, cell).
    std::vector<std::vector<int>> vedges;
    struct Corner {
        int e0, e1;
    };
    std::vector<std::vector<Corner>> vcorners;

    explicit TilingBall(const SimpleGraph& link, int sides, int r)
        : L(link), p(sides), radius(r), Ladj(link.adjacency()) {}

    int new_vertex(int d) {
        int v = b.vertex("v" + std::to_string(b.vertex_ids.size()));
        dist.push_back(d);
        complete.push_back(0);
        vedges.emplace_back();
        vcorners.emplace_back();
        return v;
    }

    int connect(int a, int c) {
        int e = b.edge_between(a, c, 1.0);
        auto reg = [&](int v) {
            auto& lst = vedges[v];
            if (std::find(lst.begin(), lst.end(), e) == lst.end()) lst.push_back(e);
        };
        reg(a);
        reg(c);
        relax(a, c);
        relax(c, a);
        return e;
    }

    void relax(int from, int to) {
        if (dist[from] + 1 < dist[to]) {
            dist[to] = dist[from] + 1;
            for (int e : vedges[to]) {
                const auto& ed = b.edges[e];
                relax(to, ed.v0 == to ? ed.v1 : ed.v0);
            }
        }
    }

    int other_end(int e, int v) const {
        const auto& ed = b.edges[e];
        return ed.v0 == v ? ed.v1 : ed.v0;
    }

    /// Lexicographically first injective, adjacency-preserving extension of
    /// the partial assignment of incident edges to L-nodes.
    bool embed(int v, std::vector<int>& label) const {
        const auto& es = vedges[v];
        int m = static_cast<int>(es.size());
        label.assign(m, -1);
        std::vector<char> used(L.nodes, 0);
        // corner constraints as pairs of local indices
        std::vector<std::pair<int, int>> cons;
        for (const auto& c : vcorners[v]) {
            int i0 = static_cast<int>(std::find(es.begin(), es.end(), c.e0) - es.begin());
            int i1 = static_cast<int>(std::find(es.begin(), es.end(), c.e1) - es.begin());
            cons.emplace_back(i0, i1);
        }
        auto adjacent = [&](int x, int y) {
            return std::find(Ladj[x].begin(), Ladj[x].end(), y) != Ladj[x].end();
        };
        std::function<bool(int)> rec = [&](int i) -> bool {
            if (i == m) return true;
            for (int cand = 0; cand < L.nodes; ++cand) {
                if (used[cand]) continue;
                label[i] = cand;
                used[cand] = 1;
                bool ok = true;
                for (auto [a, c] : cons) {
                    if (label[a] < 0 || label[c] < 0) continue;
                    if (!adjacent(label[a], label[c])) {
                        ok = false;
                        break;
                    }
                }
                if (ok && rec(i + 1)) return true;
                used[cand] = 0;
                label[i] = -1;
            }
            return false;
        };
        return rec(0);
    }

    void complete_vertex(int v) {
        std::vector<int> label;
        if (!embed(v, label))
            throw BadParams("tiling ball: partial link does not embed into the prescribed link");
        // Edge per L-node.
        std::vector<int> edge_of(L.nodes, -1);
        for (size_t i = 0; i < vedges[v].size(); ++i) edge_of[label[i]] = vedges[v][i];
        for (int a = 0; a < L.nodes; ++a) {
            if (edge_of[a] >= 0) continue;
            int w = new_vertex(dist[v] + 1);
            edge_of[a] = connect(v, w);
        }
        // Cell per missing L-arc.
        std::set<std::pair<int, int>> have;
        for (const auto& c : vcorners[v]) {
            int la = -1, lb = -1;
            for (int a = 0; a < L.nodes; ++a) {
                if (edge_of[a] == c.e0) la = a;
                if (edge_of[a] == c.e1) lb = a;
            }
            have.insert(std::minmax(la, lb));
        }
        auto coords = regular_polygon(p);
        for (auto [a, c] : L.edges) {
            auto key = std::minmax(a, c);
            if (have.count({key.first, key.second})) continue;
            int ea = edge_of[a], ec = edge_of[c];
            int A = other_end(ea, v), C = other_end(ec, v);
            // Corners: v, A, chain of p-3 new vertices, C.
            std::vector<int> corners{v, A};
            int prev = A;
            for (int i = 0; i < p - 3; ++i) {
                int w = new_vertex(std::min(dist[prev], dist[C]) + 1);
                connect(prev, w);
                corners.push_back(w);
                prev = w;
            }
            connect(prev, C);
            corners.push_back(C);
            add_cell_with_corners(corners, coords);
        }
        complete[v] = 1;
    }

    void add_cell_with_corners(const std::vector<int>& corners, const std::vector<Vec2>& coords) {
        int cell_index = static_cast<int>(b.cells.size());
        b.add_cell(corners, coords);
        const auto& cell = b.cells[cell_index];
        int n = cell.size();
        for (int i = 0; i < n; ++i) {
            int prev = (i + n - 1) % n;
            vcorners[cell.corners[i]].push_back(Corner{cell.sides[i], cell.sides[prev]});
        }
    }

    Generated run() {
        Generated g;
        int v0 = new_vertex(0);
        while (true) {
            int pick = -1;
            for (int v = 0; v < static_cast<int>(dist.size()); ++v) {
                if (complete[v] || dist[v] > radius - 1) continue;
                if (pick < 0 || dist[v] < dist[pick]) pick = v;
            }
            if (pick < 0) break;
            complete_vertex(pick);
        }
        g.X = b.finish();
        g.points["apex"] = PointLocation::vertex(v0);
        std::vector<std::string> interior;
        for (int v = 0; v < static_cast<int>(dist.size()); ++v)
            if (complete[v]) interior.push_back(b.vertex_ids[v]);
        g.cell_groups["complete_vertices"] = interior;
        return g;
    }
};

} // namespace

Generated generate_cone(int k, int n) {
    if (k < 3) throw BadParams("cone: need at least 3 squares per vertex");
    if (n < 1) throw BadParams("cone: radius must be >= 1");
    SimpleGraph link = SimpleGraph::cycle(k);
    TilingBall ball(link, 4, n);
    return ball.run();
}

Generated generate_moussong_ball(const SimpleGraph& L, int r) {
    if (!L.simple()) throw BadParams("moussong_ball: prescribed link must be a simplicial graph");
    if (L.girth() < 3) throw BadParams("moussong_ball: prescribed link must have girth >= 3");
    if (r < 1) throw BadParams("moussong_ball: radius must be >= 1");
    TilingBall ball(L, 6, r);
    return ball.run();
}

// ---------------------------------------------------------------------------
// triplane / delta_n

namespace {
std::string tri_vid(int x, int y, int sheet) {
    if (y == 0) return "L" + std::to_string(x);
    return "s" + std::to_string(sheet) + "_" + std::to_string(x) + "_" + std::to_string(y);
}
} // namespace

Generated generate_triplane(int R) {
    if (R < 1) throw BadParams("triplane: R must be >= 1");
    Builder b;
    Generated g;
    std::map<int, std::vector<std::string>> sheet_cells;
    for (int sheet = 1; sheet <= 3; ++sheet) {
        for (int y = 0; y < R; ++y) {
            for (int x = -R; x < R; ++x) {
                std::vector<int> corners = {
                    b.vertex(tri_vid(x, y, sheet)), b.vertex(tri_vid(x + 1, y, sheet)),
                    b.vertex(tri_vid(x + 1, y + 1, sheet)), b.vertex(tri_vid(x, y + 1, sheet))};
                sheet_cells[sheet].push_back("c" + std::to_string(b.cells.size()));
                b.add_cell(corners, square_at(x, y));
            }
        }
    }
    g.X = b.finish();
    for (int sheet = 1; sheet <= 3; ++sheet)
        g.cell_groups["sheet" + std::to_string(sheet)] = sheet_cells[sheet];
    // The three flats: pairwise unions of half-planes.
    for (int i = 1; i <= 3; ++i)
        for (int j = i + 1; j <= 3; ++j) {
            auto cells = sheet_cells[i];
            cells.insert(cells.end(), sheet_cells[j].begin(), sheet_cells[j].end());
            g.cell_groups["flat" + std::to_string(i) + std::to_string(j)] = cells;
        }
    for (int x = -R; x <= R; ++x) g.singular_path.push_back(tri_vid(x, 0, 0));
    g.points["origin"] = PointLocation::vertex(g.X.vertex_index(tri_vid(0, 0, 0)));
    return g;
}

PointLocation triplane_point(const Generated& g, double x, double y, int sheet) {
    double xi, yi;
    bool ix = std::abs(x - std::round(x)) < 1e-12;
    bool iy = std::abs(y - std::round(y)) < 1e-12;
    xi = std::round(x);
    yi = std::round(y);
    if (ix && iy)
        return PointLocation::vertex(
            g.X.vertex_index(tri_vid(static_cast<int>(xi), static_cast<int>(yi), sheet)));
    // Interior or edge point: find the carrying cell from the sheet group.
    for (const auto& cid : g.cell_groups.at("sheet" + std::to_string(sheet))) {
        int c = g.X.cell_index(cid);
        const auto& cell = g.X.cell(c);
        if (point_to_convex_polygon(Vec2(x, y), cell.coords) <= 1e-12) {
            if (ix || iy) {
                // Locate on the matching side when on the cell boundary.
                for (int s = 0; s < cell.size(); ++s) {
                    Vec2 p0 = cell.coords[s], p1 = cell.coords[(s + 1) % cell.size()];
                    if (point_to_segment(Vec2(x, y), p0, p1) <= 1e-12) {
                        Vec2 a = g.X.edge_end_coord(c, s, 0), bb = g.X.edge_end_coord(c, s, 1);
                        double t = (Vec2(x, y) - a).norm() / (bb - a).norm();
                        return PointLocation::on_edge(cell.sides[s], t);
                    }
                }
            }
            return PointLocation::in_cell(c, Vec2(x, y));
        }
    }
    throw BadParams("triplane_point: point outside the generated patch");
}

Generated generate_delta_n(int n) {
    if (n < 1) throw BadParams("delta_n: n must be >= 1");
    Generated g = generate_triplane(2 * n);
    g.points["a"] = triplane_point(g, 0, n, 1);
    g.points["b"] = triplane_point(g, -2 * n, n, 2);
    g.points["c"] = triplane_point(g, 2 * n, n, 3);
    return g;
}

// ---------------------------------------------------------------------------
// flap grid

Generated generate_flap_grid(int n, int m) {
    if (n < 2 || m < 1 || m > n) throw BadParams("flap_grid: need n >= 2 and 1 <= m <= n");
    Builder b;
    auto vid = [](int i, int j) { return "v" + std::to_string(i) + "_" + std::to_string(j); };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) b.vertex(vid(i, j));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            std::vector<int> corners = {b.vertex(vid(i, j)), b.vertex(vid(i + 1, j)),
                                        b.vertex(vid(i + 1, j + 1)), b.vertex(vid(i, j + 1))};
            b.add_cell(corners, square_at(i, j));
        }
    std::vector<std::string> grid_cells;
    for (const auto& c : b.cells) grid_cells.push_back(c.id);
    int line = n / 2;
    int x0 = (n - m) / 2;
    std::vector<std::string> flap_cells;
    for (int i = 0; i < m; ++i) {
        int x = x0 + i;
        std::vector<int> corners = {b.vertex(vid(x, line)), b.vertex(vid(x + 1, line)),
                                    b.vertex("f" + std::to_string(x + 1)),
                                    b.vertex("f" + std::to_string(x))};
        flap_cells.push_back("c" + std::to_string(b.cells.size()));
        b.add_cell(corners, unit_square());
    }
    Generated out;
    out.X = b.finish();
    out.cell_groups["plane"] = grid_cells;
    out.cell_groups["flap"] = flap_cells;
    for (int x = x0; x <= x0 + m; ++x) out.singular_path.push_back(vid(x, line));
    out.points["center"] = PointLocation::vertex(out.X.vertex_index(vid(n / 2, n / 2)));
    return out;
}

// ---------------------------------------------------------------------------
// dispatch + metadata

json Generated::metadata_json() const {
    json meta;
    json pts = json::object();
    for (const auto& [name, p] : points) {
        json jp;
        switch (p.kind) {
        case PointLocation::Kind::Vertex:
            jp = {{"kind", "vertex"}, {"id", X.vertex_id(p.index)}};
            break;
        case PointLocation::Kind::Edge:
            jp = {{"kind", "edge"}, {"id", X.edge(p.index).id}, {"t", p.t}};
            break;
        case PointLocation::Kind::Cell:
            jp = {{"kind", "cell"}, {"id", X.cell(p.index).id}, {"xy", {p.xy.x(), p.xy.y()}}};
            break;
        }
        pts[name] = std::move(jp);
    }
    meta["points"] = std::move(pts);
    json groups = json::object();
    for (const auto& [name, cells] : cell_groups) groups[name] = cells;
    meta["cell_groups"] = std::move(groups);
    if (!singular_path.empty()) meta["singular_path"] = singular_path;
    return meta;
}

Generated generate(const std::string& kind, const json& params) {
    auto geti = [&](const std::string& key, int fallback = INT32_MIN) {
        if (params.contains(key)) return params.at(key).get<int>();
        if (fallback != INT32_MIN) return fallback;
        throw BadParams("generate " + kind + ": missing parameter " + key);
    };
    if (kind == "grid") return generate_grid(geti("n"));
    if (kind == "hex") return generate_hex(geti("n"));
    if (kind == "cone") return generate_cone(geti("k"), geti("n"));
    if (kind == "triplane") return generate_triplane(geti("R"));
    if (kind == "delta_n") return generate_delta_n(geti("n"));
    if (kind == "flap_grid") {
        int n = geti("n");
        return generate_flap_grid(n, geti("m", std::max(1, n / 2)));
    }
    if (kind == "moussong_ball") {
        SimpleGraph L;
        if (params.contains("cycle")) {
            L = SimpleGraph::cycle(params.at("cycle").get<int>());
        } else if (params.contains("link")) {
            const auto& jl = params.at("link");
            L.nodes = jl.at("nodes").get<int>();
            for (const auto& je : jl.at("edges"))
                L.edges.emplace_back(je.at(0).get<int>(), je.at(1).get<int>());
        } else {
            throw BadParams("moussong_ball: provide cycle=<k> or link={nodes, edges}");
        }
        return generate_moussong_ball(L, geti("r"));
    }
    throw BadParams("unknown generator kind: " + kind);
}

} // namespace cat0
