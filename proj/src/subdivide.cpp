#include "cat0/subdivide.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>

namespace cat0 {

namespace {

struct YBuilder {
    std::vector<std::string> vertex_ids;
    std::map<std::string, int> vmap;
    std::vector<Complex2PE::Edge> edges;
    std::vector<Complex2PE::Cell> cells;

    int vertex(const std::string& id) {
        auto it = vmap.find(id);
        if (it != vmap.end()) return it->second;
        int v = static_cast<int>(vertex_ids.size());
        vertex_ids.push_back(id);
        vmap[id] = v;
        return v;
    }
    int edge(const std::string& id, int v0, int v1, double len) {
        Complex2PE::Edge e;
        e.id = id;
        e.v0 = v0;
        e.v1 = v1;
        e.length = len;
        edges.push_back(e);
        return static_cast<int>(edges.size()) - 1;
    }
};

struct Node {
    int yv = -1;   // Y vertex
    Vec2 pos;      // in the cell frame
    int edge_to_next = -1; // Y edge joining this node to the next (boundary)
};

} // namespace

Subdivision subdivide_along_path(const Complex2PE& X, const PLPath& path) {
    for (const auto& p : path.points)
        if (p.kind == PointLocation::Kind::Cell)
            throw BadParams("subdivide_along_path: path stops inside a cell");

    // Split parameters per edge.
    std::map<int, std::set<double>> splits;
    for (const auto& p : path.points)
        if (p.kind == PointLocation::Kind::Edge) splits[p.index].insert(p.t);
    for (auto& [e, ts] : splits) {
        // snap near-endpoint parameters away (they are vertices already)
        std::set<double> clean;
        for (double t : ts)
            if (t > 1e-9 && t < 1 - 1e-9) clean.insert(t);
        ts = clean;
    }

    YBuilder B;
    for (int v = 0; v < X.vertex_count(); ++v) B.vertex(X.vertex_id(v));

    // Refinement tables per original edge.
    std::vector<std::vector<int>> sub_vertices(X.edge_count());
    std::vector<std::vector<int>> sub_edges(X.edge_count());
    std::vector<std::vector<double>> sub_params(X.edge_count());
    for (int e = 0; e < X.edge_count(); ++e) {
        const auto& ed = X.edge(e);
        std::vector<double> ts{0.0};
        if (splits.count(e))
            for (double t : splits[e]) ts.push_back(t);
        ts.push_back(1.0);
        std::sort(ts.begin(), ts.end());
        sub_params[e] = ts;
        sub_vertices[e].push_back(ed.v0);
        for (size_t k = 1; k + 1 < ts.size(); ++k)
            sub_vertices[e].push_back(
                B.vertex("w_" + ed.id + "_" + std::to_string(k)));
        sub_vertices[e].push_back(ed.v1);
        for (size_t k = 0; k + 1 < ts.size(); ++k) {
            std::string id = ts.size() == 2 ? ed.id : ed.id + "." + std::to_string(k);
            sub_edges[e].push_back(B.edge(id, sub_vertices[e][k], sub_vertices[e][k + 1],
                                          (ts[k + 1] - ts[k]) * ed.length));
        }
    }

    // Chords per cell, endpoints as Y vertices with positions.
    struct Chord {
        int va, vb;
        Vec2 pa, pb;
        int yedge = -1;
    };
    std::map<int, std::vector<Chord>> chords;
    auto y_vertex_of = [&](const PointLocation& p) -> int {
        if (p.kind == PointLocation::Kind::Vertex) return p.index;
        const auto& ts = sub_params[p.index];
        for (size_t k = 0; k < ts.size(); ++k)
            if (std::abs(ts[k] - p.t) <= 1e-9) return sub_vertices[p.index][k];
        throw InvariantBreach("subdivide: breakpoint lost its split vertex");
    };
    for (size_t s = 0; s < path.segments.size(); ++s) {
        const auto& seg = path.segments[s];
        if (seg.along_edge >= 0 || seg.length() <= 1e-9) continue;
        Chord ch;
        ch.va = y_vertex_of(path.points[s]);
        ch.vb = y_vertex_of(path.points[s + 1]);
        if (ch.va == ch.vb) continue; // sub-tolerance sliver
        ch.pa = seg.a;
        ch.pb = seg.b;
        chords[seg.cell].push_back(ch);
    }

    Subdivision S;
    int chord_count = 0;
    for (auto& [cell, list] : chords)
        for (auto& ch : list)
            ch.yedge = B.edge("x" + std::to_string(chord_count++), ch.va, ch.vb,
                              (ch.pa - ch.pb).norm());

    // Rebuild every cell with refined sides, then cut by its chords.
    for (int c = 0; c < X.cell_count(); ++c) {
        const auto& cc = X.cell(c);
        std::vector<Node> poly;
        for (int s = 0; s < cc.size(); ++s) {
            int e = cc.sides[s];
            bool fwd = cc.side_forward[s];
            const auto& sv = sub_vertices[e];
            const auto& se = sub_edges[e];
            const auto& ts = sub_params[e];
            int m = static_cast<int>(se.size());
            for (int k = 0; k < m; ++k) {
                Node n;
                int idx = fwd ? k : m - k;
                n.yv = sv[idx];
                // ts holds edge parameters; edge_point_coord resolves the
                // side orientation itself.
                n.pos = X.edge_point_coord(c, s, ts[idx]);
                n.edge_to_next = se[fwd ? k : m - 1 - k];
                poly.push_back(n);
            }
        }
        // Recursive cut by chords.
        struct Piece {
            std::vector<Node> poly;
            std::vector<Chord> chords;
        };
        std::vector<Piece> stack{{poly, chords.count(c) ? chords[c] : std::vector<Chord>{}}};
        int piece_no = 0;
        while (!stack.empty()) {
            Piece P = std::move(stack.back());
            stack.pop_back();
            if (P.chords.empty()) {
                Complex2PE::Cell cell;
                cell.id = piece_no == 0 && !chords.count(c) ? cc.id
                                                            : cc.id + "#" + std::to_string(piece_no);
                ++piece_no;
                int n = static_cast<int>(P.poly.size());
                for (int i = 0; i < n; ++i) {
                    cell.corners.push_back(P.poly[i].yv);
                    cell.coords.push_back(P.poly[i].pos);
                    int ye = P.poly[i].edge_to_next;
                    cell.sides.push_back(ye);
                    cell.side_forward.push_back(B.edges[ye].v0 == P.poly[i].yv);
                }
                S.cell_origin[cell.id] = cc.id;
                B.cells.push_back(std::move(cell));
                continue;
            }
            Chord ch = P.chords.back();
            P.chords.pop_back();
            // Locate chord endpoints among the piece nodes.
            auto find_node = [&](int yv, const Vec2& pos) {
                for (size_t i = 0; i < P.poly.size(); ++i)
                    if (P.poly[i].yv == yv && (P.poly[i].pos - pos).norm() <= 1e-9)
                        return static_cast<int>(i);
                return -1;
            };
            int ia = find_node(ch.va, ch.pa);
            int ib = find_node(ch.vb, ch.pb);
            if (ia < 0 || ib < 0) {
                if (getenv("CAT0_DEBUG")) {
                    printf("cell %s chord va=%d (%.3f,%.3f) vb=%d (%.3f,%.3f)\n", cc.id.c_str(),
                           ch.va, ch.pa.x(), ch.pa.y(), ch.vb, ch.pb.x(), ch.pb.y());
                    for (const auto& nd : P.poly)
                        printf("  node yv=%d pos=(%.3f,%.3f)\n", nd.yv, nd.pos.x(), nd.pos.y());
                }
                throw InvariantBreach("subdivide: chord endpoint is not on its piece boundary");
            }
            int n = static_cast<int>(P.poly.size());
            auto arc = [&](int from, int to) {
                Piece out;
                for (int i = from; i != to; i = (i + 1) % n) out.poly.push_back(P.poly[i]);
                Node last = P.poly[to];
                last.edge_to_next = ch.yedge;
                out.poly.push_back(last);
                return out;
            };
            Piece A = arc(ia, ib); // ia .. ib then chord back
            Piece Bp = arc(ib, ia);
            auto inside = [&](const Piece& piece, const Chord& k) {
                int x = -1, y = -1;
                for (size_t i = 0; i < piece.poly.size(); ++i) {
                    if (piece.poly[i].yv == k.va && (piece.poly[i].pos - k.pa).norm() <= 1e-9)
                        x = static_cast<int>(i);
                    if (piece.poly[i].yv == k.vb && (piece.poly[i].pos - k.pb).norm() <= 1e-9)
                        y = static_cast<int>(i);
                }
                return x >= 0 && y >= 0;
            };
            for (const auto& k : P.chords) {
                if (inside(A, k))
                    A.chords.push_back(k);
                else if (inside(Bp, k))
                    Bp.chords.push_back(k);
                else
                    throw InvariantBreach("subdivide: crossing chords in one cell");
            }
            stack.push_back(std::move(A));
            stack.push_back(std::move(Bp));
        }
    }

    S.Y = Complex2PE(B.vertex_ids, B.edges, B.cells);

    // The path as a vertex chain of Y.
    auto push_chain = [&](int yv, int ye) {
        if (!S.path_vertices.empty() && S.path_vertices.back() == yv && ye < 0) return;
        if (!S.path_vertices.empty() && ye >= 0) S.path_edges.push_back(ye);
        S.path_vertices.push_back(yv);
    };
    if (!path.points.empty()) push_chain(y_vertex_of(path.points.front()), -1);
    for (size_t s = 0; s < path.segments.size(); ++s) {
        const auto& seg = path.segments[s];
        int va = y_vertex_of(path.points[s]);
        int vb = y_vertex_of(path.points[s + 1]);
        if (va == vb || seg.length() <= 1e-9) continue;
        if (seg.along_edge < 0) {
            bool found = false;
            for (const auto& ch : chords[seg.cell])
                if ((ch.va == va && ch.vb == vb) || (ch.va == vb && ch.vb == va)) {
                    push_chain(vb, ch.yedge);
                    found = true;
                    break;
                }
            if (!found) throw InvariantBreach("subdivide: chain chord missing");
        } else {
            // walk the refined edge between the two parameters
            int e = seg.along_edge;
            const auto& sv = sub_vertices[e];
            const auto& se = sub_edges[e];
            int ka = -1, kb = -1;
            for (size_t k = 0; k < sv.size(); ++k) {
                if (sv[k] == va) ka = static_cast<int>(k);
                if (sv[k] == vb) kb = static_cast<int>(k);
            }
            if (ka < 0 || kb < 0) throw InvariantBreach("subdivide: lost chain vertex");
            int step = kb > ka ? 1 : -1;
            for (int k = ka; k != kb; k += step)
                push_chain(sv[k + step], se[step > 0 ? k : k - 1]);
        }
    }
    if (S.path_vertices.size() != S.path_edges.size() + 1)
        throw InvariantBreach("subdivide: chain bookkeeping failed");
    return S;
}

std::vector<int> cells_on_side(const Subdivision& S, int seed_cell) {
    std::set<int> cut(S.path_edges.begin(), S.path_edges.end());
    std::set<int> seen{seed_cell};
    std::vector<int> stack{seed_cell}, out{seed_cell};
    while (!stack.empty()) {
        int c = stack.back();
        stack.pop_back();
        for (int e : S.Y.cell(c).sides) {
            if (cut.count(e)) continue;
            for (const auto& ref : S.Y.cells_at_edge(e)) {
                if (seen.insert(ref.cell).second) {
                    stack.push_back(ref.cell);
                    out.push_back(ref.cell);
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace cat0
