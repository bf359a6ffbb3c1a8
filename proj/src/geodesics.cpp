#include "cat0/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <queue>
#include <set>

namespace cat0 {

namespace {

constexpr double kCertTol = 1e-9;   // local geodesy threshold: >= pi - kCertTol
constexpr double kUnpinTol = 1e-12; // strictness for triggering an unpin

// ---------------------------------------------------------------------------
// Contact-chain model used while straightening.

struct Contact {
    bool at_vertex = false;
    int index = -1; // vertex or edge
    double t = 0.5; // edge parameter

    PointLocation location(const Complex2PE& X) const {
        if (at_vertex) return PointLocation::vertex(index);
        if (t <= kMetricTol) return PointLocation::vertex(X.edge(index).v0);
        if (t >= 1.0 - kMetricTol) return PointLocation::vertex(X.edge(index).v1);
        return PointLocation::on_edge(index, t);
    }
};

struct Gap {
    int cell = -1;       // carrying cell
    int along_edge = -1; // >= 0 when the segment runs along that edge
};

struct Chain {
    PointLocation from, to;
    std::vector<Contact> contacts;
    std::vector<Gap> gaps; // gaps.size() == contacts.size() + 1
};

PointLocation contact_loc(const Complex2PE& X, const Contact& c) { return c.location(X); }

} // namespace

// ---------------------------------------------------------------------------
// ComparisonTriangle

ComparisonTriangle ComparisonTriangle::from_sides(double pq, double qr, double pr) {
    if (pq < 0 || qr < 0 || pr < 0) throw BadParams("comparison triangle: negative side");
    if (pq + qr < pr - 1e-9 || pq + pr < qr - 1e-9 || qr + pr < pq - 1e-9)
        throw BadParams("comparison triangle: triangle inequality violated");
    ComparisonTriangle ct;
    ct.pq = pq;
    ct.qr = qr;
    ct.pr = pr;
    ct.p = Vec2(0, 0);
    ct.q = Vec2(pq, 0);
    double x = (pq < 1e-300) ? 0.0 : (pq * pq + pr * pr - qr * qr) / (2 * pq);
    double y2 = pr * pr - x * x;
    ct.r = Vec2(x, std::sqrt(std::max(0.0, y2)));
    auto ang = [](const Vec2& a, const Vec2& b, const Vec2& c) {
        if ((a - b).norm() < 1e-12 || (c - b).norm() < 1e-12) return 0.0;
        return angle_at(a, b, c);
    };
    ct.angle_p = ang(ct.q, ct.p, ct.r);
    ct.angle_q = ang(ct.p, ct.q, ct.r);
    ct.angle_r = ang(ct.p, ct.r, ct.q);
    return ct;
}

Vec2 ComparisonTriangle::point_on_side(int side, double s) const {
    auto lerp = [](const Vec2& a, const Vec2& b, double len, double s) {
        if (len < 1e-300) return a;
        return Vec2(a + std::clamp(s / len, 0.0, 1.0) * (b - a));
    };
    switch (side) {
    case 0: return lerp(p, q, pq, s);
    case 1: return lerp(q, r, qr, s);
    case 2: return lerp(p, r, pr, s);
    }
    throw BadParams("point_on_side: side must be 0, 1 or 2");
}

// ---------------------------------------------------------------------------
// Mesh construction

const Mesh& GeodesicEngine::mesh(double h) const {
    auto it = meshes_.find(h);
    if (it != meshes_.end()) return *it->second;
    const Complex2PE& X = *X_;
    auto m = std::make_shared<Mesh>();
    m->h = h;
    for (int v = 0; v < X.vertex_count(); ++v) m->nodes.push_back(PointLocation::vertex(v));
    m->edge_nodes.resize(X.edge_count());
    for (int e = 0; e < X.edge_count(); ++e) {
        const auto& ed = X.edge(e);
        int k = std::max(1, static_cast<int>(std::ceil(ed.length / h - 1e-12)));
        auto& chain = m->edge_nodes[e];
        chain.push_back(ed.v0);
        for (int i = 1; i < k; ++i) {
            chain.push_back(static_cast<int>(m->nodes.size()));
            m->nodes.push_back(PointLocation::on_edge(e, static_cast<double>(i) / k));
        }
        chain.push_back(ed.v1);
    }
    int n = static_cast<int>(m->nodes.size());
    m->chain.resize(n);
    m->node_cells.resize(n);
    for (int e = 0; e < X.edge_count(); ++e) {
        const auto& chain = m->edge_nodes[e];
        double step = X.edge(e).length / (chain.size() - 1);
        for (size_t i = 0; i + 1 < chain.size(); ++i) {
            m->chain[chain[i]].push_back(Mesh::ChainArc{chain[i + 1], step, e});
            m->chain[chain[i + 1]].push_back(Mesh::ChainArc{chain[i], step, e});
        }
    }
    m->cell_boundary.resize(X.cell_count());
    for (int c = 0; c < X.cell_count(); ++c) {
        const auto& cell = X.cell(c);
        auto& cb = m->cell_boundary[c];
        std::map<int, int> where;
        for (int s = 0; s < cell.size(); ++s) {
            const auto& chain = m->edge_nodes[cell.sides[s]];
            int len = static_cast<int>(chain.size());
            for (int j = 0; j < len; ++j) {
                int node = chain[j];
                double t = static_cast<double>(j) / (len - 1);
                Vec2 pos = X.edge_point_coord(c, s, t);
                auto it2 = where.find(node);
                if (it2 == where.end()) {
                    where[node] = static_cast<int>(cb.node.size());
                    cb.node.push_back(node);
                    cb.pos.push_back(pos);
                    cb.side.push_back(std::uint64_t(1) << (s % 64));
                } else {
                    cb.side[it2->second] |= std::uint64_t(1) << (s % 64);
                }
            }
        }
        for (size_t i = 0; i < cb.node.size(); ++i)
            m->node_cells[cb.node[i]].emplace_back(c, static_cast<int>(i));
    }
    meshes_[h] = m;
    return *m;
}

// ---------------------------------------------------------------------------
// Virtual attachment of located points to the mesh

namespace {

struct Attachment {
    int node;
    double dist;
    int cell; // attachment cell (-1 for the node itself)
};

std::vector<Attachment> attach(const Complex2PE& X, const Mesh& m, const PointLocation& p) {
    std::vector<Attachment> out;
    switch (p.kind) {
    case PointLocation::Kind::Vertex:
        out.push_back(Attachment{p.index, 0.0, -1});
        return out;
    case PointLocation::Kind::Edge: {
        for (const auto& ref : X.cells_at_edge(p.index)) {
            Vec2 pos = X.edge_point_coord(ref.cell, ref.index, p.t);
            const auto& cb = m.cell_boundary[ref.cell];
            for (size_t j = 0; j < cb.node.size(); ++j)
                out.push_back(Attachment{cb.node[j], (pos - cb.pos[j]).norm(), ref.cell});
        }
        return out;
    }
    case PointLocation::Kind::Cell: {
        const auto& cb = m.cell_boundary[p.index];
        for (size_t j = 0; j < cb.node.size(); ++j)
            out.push_back(Attachment{cb.node[j], (p.xy - cb.pos[j]).norm(), p.index});
        return out;
    }
    }
    throw BadParams("attach: bad location");
}

/// Cells shared by two locations, for direct-chord candidates.
std::vector<int> common_cells(const Complex2PE& X, const PointLocation& p,
                              const PointLocation& q) {
    auto cells_of = [&](const PointLocation& x) {
        std::set<int> s;
        switch (x.kind) {
        case PointLocation::Kind::Vertex:
            for (const auto& r : X.corners_at_vertex(x.index)) s.insert(r.cell);
            break;
        case PointLocation::Kind::Edge:
            for (const auto& r : X.cells_at_edge(x.index)) s.insert(r.cell);
            break;
        case PointLocation::Kind::Cell: s.insert(x.index); break;
        }
        return s;
    };
    auto a = cells_of(p), b = cells_of(q);
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

} // namespace

GeodesicEngine::NodePath GeodesicEngine::mesh_shortest(const PointLocation& p,
                                                       const PointLocation& q, double h) const {
    const Complex2PE& X = *X_;
    const Mesh& m = mesh(h);
    auto src = attach(X, m, p);
    auto dst = attach(X, m, q);
    int n = static_cast<int>(m.nodes.size());
    std::vector<double> dist(n, kInf);
    std::vector<int> par(n, -1), src_cell(n, -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (const auto& a : src) {
        if (a.dist < dist[a.node]) {
            dist[a.node] = a.dist;
            src_cell[a.node] = a.cell;
            pq.emplace(a.dist, a.node);
        }
    }
    std::vector<double> tail(n, kInf);
    std::vector<int> tail_cell(n, -1);
    for (const auto& a : dst)
        if (a.dist < tail[a.node]) {
            tail[a.node] = a.dist;
            tail_cell[a.node] = a.cell;
        }
    double best_total = kInf;
    int best_node = -1;
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        if (d >= best_total) break;
        if (tail[v] < kInf && d + tail[v] < best_total) {
            best_total = d + tail[v];
            best_node = v;
        }
        m.for_neighbors(v, [&](int w, double wt, int, int) {
            double nd = d + wt;
            if (nd < dist[w] - 1e-15) {
                dist[w] = nd;
                par[w] = v;
                pq.emplace(nd, w);
            }
        });
    }
    NodePath np;
    if (best_node < 0) return np;
    np.length = best_total;
    int v = best_node;
    std::vector<int> rev;
    while (v >= 0) {
        rev.push_back(v);
        v = par[v];
    }
    np.nodes.assign(rev.rbegin(), rev.rend());
    np.first_cell = src_cell[np.nodes.front()];
    np.last_cell = tail_cell[best_node];
    return np;
}

double GeodesicEngine::mesh_distance(const PointLocation& p, const PointLocation& q,
                                     double h) const {
    validate_location(*X_, p);
    validate_location(*X_, q);
    double direct = kInf;
    for (int c : common_cells(*X_, p, q))
        direct = std::min(direct, (locate_in_cell(*X_, p, c) - locate_in_cell(*X_, q, c)).norm());
    auto np = mesh_shortest(p, q, h);
    return std::min(direct, np.length);
}

// ---------------------------------------------------------------------------
// NPC bookkeeping

bool GeodesicEngine::npc() const {
    if (npc_state_ < 0) {
        npc_verdict_ = check_link_condition(*X_);
        npc_state_ = npc_verdict_.pass ? 1 : 0;
    }
    return npc_state_ == 1;
}

void GeodesicEngine::require_npc() const {
    if (!npc())
        throw NotNPC("link condition fails at vertex " + X_->vertex_id(npc_verdict_.worst_vertex) +
                     " with loop length " + std::to_string(npc_verdict_.loop_length));
}

// ---------------------------------------------------------------------------
// Polisher: funnel straightening plus vertex unpinning on a contact chain

namespace {

struct Polisher {
    const Complex2PE& X;
    Chain chain;

    Vec2 pos_in(const PointLocation& loc, int cell) const { return locate_in_cell(X, loc, cell); }

    PointLocation loc_before_gap(int g) const {
        return g == 0 ? chain.from : contact_loc(X, chain.contacts[g - 1]);
    }
    PointLocation loc_after_gap(int g) const {
        return g == static_cast<int>(chain.gaps.size()) - 1 ? chain.to
                                                            : contact_loc(X, chain.contacts[g]);
    }

    void remove_contact(int i, int keep_gap_cell, int keep_along) {
        chain.contacts.erase(chain.contacts.begin() + i);
        chain.gaps[i].cell = keep_gap_cell;
        chain.gaps[i].along_edge = keep_along;
        chain.gaps.erase(chain.gaps.begin() + i + 1);
    }

    double gap_length(int g) const {
        const Gap& gap = chain.gaps[g];
        return (pos_in(loc_before_gap(g), gap.cell) - pos_in(loc_after_gap(g), gap.cell)).norm();
    }

    bool simplify_once() {
        int k = static_cast<int>(chain.contacts.size());
        for (int i = 0; i < k; ++i) {
            auto& c = chain.contacts[i];
            if (!c.at_vertex && (c.t <= kMetricTol || c.t >= 1 - kMetricTol)) {
                int v = c.t <= kMetricTol ? X.edge(c.index).v0 : X.edge(c.index).v1;
                c = Contact{true, v, 0.0};
                return true;
            }
        }
        // Collapse zero-length gaps (coinciding contacts of different kinds).
        for (int g = 0; g < static_cast<int>(chain.gaps.size()); ++g) {
            if (gap_length(g) > 1e-12) continue;
            if (g < k) {
                remove_contact(g, chain.gaps[g + 1].cell, chain.gaps[g + 1].along_edge);
                return true;
            }
            if (k > 0) {
                remove_contact(k - 1, chain.gaps[k - 1].cell, chain.gaps[k - 1].along_edge);
                return true;
            }
        }
        for (int i = 0; i < k; ++i) {
            auto li = contact_loc(X, chain.contacts[i]);
            if (loc_before_gap(i).same_as(li, 1e-9)) {
                chain.contacts.erase(chain.contacts.begin() + i);
                chain.gaps.erase(chain.gaps.begin() + i);
                return true;
            }
            if (li.same_as(loc_after_gap(i + 1), 1e-9)) {
                chain.contacts.erase(chain.contacts.begin() + i);
                chain.gaps.erase(chain.gaps.begin() + i + 1);
                return true;
            }
        }
        for (int i = 0; i < k; ++i) {
            const Gap gl = chain.gaps[i];
            const Gap gr = chain.gaps[i + 1];
            // An edge run adjacent to a cell segment is absorbed into the
            // cell: both neighbors lie on that cell's boundary.
            if (gl.along_edge >= 0 && gr.along_edge < 0 &&
                side_of(X, gr.cell, gl.along_edge) >= 0) {
                remove_contact(i, gr.cell, -1);
                return true;
            }
            if (gr.along_edge >= 0 && gl.along_edge < 0 &&
                side_of(X, gl.cell, gr.along_edge) >= 0) {
                remove_contact(i, gl.cell, -1);
                return true;
            }
            if (gl.along_edge < 0 && gr.along_edge < 0 && gl.cell == gr.cell) {
                remove_contact(i, gl.cell, -1);
                return true;
            }
            if (gl.along_edge >= 0 && gl.along_edge == gr.along_edge &&
                !chain.contacts[i].at_vertex) {
                remove_contact(i, gl.cell, gl.along_edge);
                return true;
            }
        }
        return false;
    }

    void simplify() {
        int guard = 0;
        while (simplify_once() && guard++ < 100000) {}
    }

    void funnel_runs() {
        auto crossing_flags = [&]() {
            int k = static_cast<int>(chain.contacts.size());
            std::vector<char> f(k, 0);
            for (int i = 0; i < k; ++i)
                f[i] = !chain.contacts[i].at_vertex && chain.gaps[i].along_edge < 0 &&
                       chain.gaps[i + 1].along_edge < 0;
            return f;
        };
        auto flags = crossing_flags();
        int i = 0;
        int guard = 0;
        while (i < static_cast<int>(flags.size()) && guard++ < 10000) {
            if (!flags[i]) {
                ++i;
                continue;
            }
            int j = i;
            while (j + 1 < static_cast<int>(flags.size()) && flags[j + 1]) ++j;
            bool changed = straighten_run(i, j);
            if (changed) {
                simplify();
                flags = crossing_flags();
                i = 0;
            } else {
                i = j + 1;
            }
        }
    }

    bool straighten_run(int i, int j) {
        std::vector<int> cells;
        std::vector<int> edges;
        for (int g = i; g <= j + 1; ++g) cells.push_back(chain.gaps[g].cell);
        for (int t2 = i; t2 <= j; ++t2) edges.push_back(chain.contacts[t2].index);
        int m = static_cast<int>(edges.size());
        std::vector<Iso2> F(cells.size());
        for (int l = 1; l < static_cast<int>(cells.size()); ++l) {
            Iso2 M = unfold_across(X, cells[l - 1], cells[l], edges[l - 1]);
            F[l] = M.then(F[l - 1]);
        }
        Vec2 S = F.front()(pos_in(loc_before_gap(i), cells.front()));
        Vec2 T = F.back()(pos_in(loc_after_gap(j + 1), cells.back()));
        std::vector<Vec2> end0(m), end1(m), lefts(m), rights(m);
        std::vector<char> left_is_end0(m, 1);
        for (int l = 0; l < m; ++l) {
            int cell_after = cells[l + 1];
            int s_in = side_of(X, cell_after, edges[l]);
            const auto& cellref = X.cell(cell_after);
            Vec2 p0 = F[l + 1](X.edge_end_coord(cell_after, s_in, 0));
            Vec2 p1 = F[l + 1](X.edge_end_coord(cell_after, s_in, 1));
            end0[l] = p0;
            end1[l] = p1;
            // Entering a ccw polygon through the directed side
            // coords[s] -> coords[s+1], the head corner sits to the right of
            // travel; a reflecting frame flips the orientation.
            Vec2 headcorner = F[l + 1](cellref.coords[(s_in + 1) % cellref.size()]);
            bool head_is_end0 = (headcorner - p0).norm() <= (headcorner - p1).norm();
            bool right_is_end0 = head_is_end0;
            if (F[l + 1].reflecting()) right_is_end0 = !right_is_end0;
            left_is_end0[l] = right_is_end0 ? 0 : 1;
            lefts[l] = left_is_end0[l] ? p0 : p1;
            rights[l] = left_is_end0[l] ? p1 : p0;
        }
        auto bends = funnel_path(S, lefts, rights, T);
        struct NewContact {
            Contact c;
            int portal_after;
        };
        std::vector<NewContact> rebuilt;
        Vec2 prev = S;
        int next_portal = 0;
        auto emit_crossings = [&](const Vec2& a, const Vec2& b, int upto) {
            for (int l = next_portal; l < upto; ++l) {
                Vec2 d = end1[l] - end0[l];
                double denom = cross2(d, b - a);
                double u;
                if (std::abs(denom) < 1e-14)
                    u = 0.5;
                else
                    u = cross2(a - end0[l], b - a) / denom;
                u = std::clamp(u, 0.0, 1.0);
                Contact c;
                c.at_vertex = false;
                c.index = edges[l];
                c.t = u;
                rebuilt.push_back(NewContact{c, l + 1});
            }
            next_portal = upto;
        };
        for (const auto& bd : bends) {
            emit_crossings(prev, bd.at, bd.portal);
            int e = edges[bd.portal];
            bool at_end0 = (bd.left == static_cast<bool>(left_is_end0[bd.portal]));
            Contact c;
            c.at_vertex = true;
            c.index = at_end0 ? X.edge(e).v0 : X.edge(e).v1;
            rebuilt.push_back(NewContact{c, bd.portal + 1});
            next_portal = bd.portal + 1;
            prev = bd.at;
        }
        emit_crossings(prev, T, m);
        std::vector<Contact> nc;
        std::vector<Gap> ng;
        for (const auto& r : rebuilt) nc.push_back(r.c);
        ng.push_back(Gap{cells.front(), -1});
        for (size_t r = 1; r < rebuilt.size(); ++r)
            ng.push_back(Gap{cells[rebuilt[r - 1].portal_after], -1});
        ng.push_back(Gap{cells.back(), -1});
        bool changed = (static_cast<int>(nc.size()) != j - i + 1);
        if (!changed) {
            for (int l = 0; l <= j - i && !changed; ++l) {
                const auto& oldc = chain.contacts[i + l];
                if (oldc.at_vertex != nc[l].at_vertex || oldc.index != nc[l].index ||
                    (!oldc.at_vertex && std::abs(oldc.t - nc[l].t) > 1e-13))
                    changed = true;
            }
        }
        chain.contacts.erase(chain.contacts.begin() + i, chain.contacts.begin() + j + 1);
        chain.contacts.insert(chain.contacts.begin() + i, nc.begin(), nc.end());
        chain.gaps.erase(chain.gaps.begin() + i, chain.gaps.begin() + i + (j - i + 2));
        chain.gaps.insert(chain.gaps.begin() + i, ng.begin(), ng.end());
        return changed;
    }

    double pos_param(const PointLocation& p, int edge) const {
        if (p.kind == PointLocation::Kind::Edge && p.index == edge) return p.t;
        if (p.kind == PointLocation::Kind::Vertex) {
            if (X.edge(edge).v0 == p.index) return 0.0;
            if (X.edge(edge).v1 == p.index) return 1.0;
        }
        throw Error("pos_param: point not on edge");
    }

    GraphPoint direction_of_gap(const DirectionSpace& ds, int g, bool backward) const {
        const Gap& gap = chain.gaps[g];
        PointLocation here = ds.at;
        PointLocation other = backward ? loc_before_gap(g) : loc_after_gap(g);
        if (gap.along_edge >= 0) {
            if (here.kind == PointLocation::Kind::Vertex)
                return direction_along_edge(X, ds, gap.along_edge,
                                            X.edge(gap.along_edge).v0 == here.index);
            bool fwd = pos_param(other, gap.along_edge) > here.t;
            return direction_along_edge(X, ds, gap.along_edge, fwd);
        }
        Vec2 a = pos_in(here, gap.cell);
        Vec2 b = pos_in(other, gap.cell);
        return direction_toward(X, ds, gap.cell, a, b);
    }

    int first_violation(double tol) const {
        for (int i = 0; i < static_cast<int>(chain.contacts.size()); ++i) {
            if (gap_length(i) <= 1e-12 || gap_length(i + 1) <= 1e-12) continue;
            auto loc = contact_loc(X, chain.contacts[i]);
            auto ds = direction_space(X, loc);
            GraphPoint din = direction_of_gap(ds, i, true);
            GraphPoint dout = direction_of_gap(ds, i + 1, false);
            if (graph_point_distance(ds.graph, din, dout) < kPi - tol) return i;
        }
        return -1;
    }

    bool unpin(int i) {
        auto loc = contact_loc(X, chain.contacts[i]);
        if (loc.kind != PointLocation::Kind::Vertex) return false;
        int v = loc.index;
        auto ds = direction_space(X, loc);
        GraphPoint din = direction_of_gap(ds, i, true);
        GraphPoint dout = direction_of_gap(ds, i + 1, false);
        auto route = graph_point_route(ds.graph, din, dout);
        if (route.length >= kPi - kUnpinTol) return false;
        const auto& ends = X.edge_ends_at_vertex(v);
        const auto& corners = X.corners_at_vertex(v);
        if (route.direct || route.nodes.empty()) {
            if (din.arc < 0) return false;
            remove_contact(i, corners[din.arc].cell, -1);
            return true;
        }
        std::vector<Contact> nc;
        std::vector<Gap> ng;
        if (din.arc >= 0)
            ng.push_back(Gap{corners[din.arc].cell, -1});
        else
            ng.push_back(chain.gaps[i]);
        for (size_t r = 0; r < route.nodes.size(); ++r) {
            auto [e, end] = ends[route.nodes[r]];
            double len = X.edge(e).length;
            double eps = std::min(0.45, 0.05 / len);
            Contact c;
            c.at_vertex = false;
            c.index = e;
            c.t = (end == 0) ? eps : 1.0 - eps;
            nc.push_back(c);
            if (r + 1 < route.nodes.size()) ng.push_back(Gap{corners[route.arcs[r]].cell, -1});
        }
        if (dout.arc >= 0)
            ng.push_back(Gap{corners[dout.arc].cell, -1});
        else
            ng.push_back(chain.gaps[i + 1]);
        chain.contacts.erase(chain.contacts.begin() + i);
        chain.contacts.insert(chain.contacts.begin() + i, nc.begin(), nc.end());
        chain.gaps.erase(chain.gaps.begin() + i, chain.gaps.begin() + i + 2);
        chain.gaps.insert(chain.gaps.begin() + i, ng.begin(), ng.end());
        return true;
    }


    void debug_dump(const char* tag) const {
        if (!getenv("CAT0_DEBUG")) return;
        printf("[%s] from->", tag);
        for (size_t i = 0; i < chain.contacts.size(); ++i) {
            const auto& c = chain.contacts[i];
            printf("[g c%d e%d]", chain.gaps[i].cell, chain.gaps[i].along_edge);
            if (c.at_vertex) printf(" V%d ", c.index);
            else printf(" E%d@%.3f ", c.index, c.t);
        }
        printf("[g c%d e%d] ->to\n", chain.gaps.back().cell, chain.gaps.back().along_edge);
    }
    void polish() {
        for (int round = 0; round < 64; ++round) {
            simplify();
            debug_dump("simplified");
            funnel_runs();
            simplify();
            debug_dump("funneled");
            int vi = first_violation(kUnpinTol);
            if (vi < 0) return;
            if (!unpin(vi)) { debug_dump("unpin-failed"); return; }
            debug_dump("unpinned");
        }
    }

    PLPath to_path() const {
        PLPath path;
        path.points.push_back(chain.from);
        for (const auto& c : chain.contacts) path.points.push_back(contact_loc(X, c));
        path.points.push_back(chain.to);
        for (size_t g = 0; g < chain.gaps.size(); ++g) {
            PLPath::Segment seg;
            seg.cell = chain.gaps[g].cell;
            seg.along_edge = chain.gaps[g].along_edge;
            seg.a = pos_in(path.points[g], seg.cell);
            seg.b = pos_in(path.points[g + 1], seg.cell);
            path.segments.push_back(seg);
        }
        PLPath clean;
        clean.points.push_back(path.points.front());
        for (size_t g = 0; g < path.segments.size(); ++g) {
            if (path.segments[g].length() <= 1e-12 && path.segments.size() > 1) continue;
            clean.segments.push_back(path.segments[g]);
            clean.points.push_back(path.points[g + 1]);
        }
        if (clean.segments.empty()) clean.points = {path.points.front()};
        return clean;
    }
};

} // namespace

GeodesicResult GeodesicEngine::straighten(const PointLocation& p, const PointLocation& q,
                                          const NodePath& np, double h) const {
    const Complex2PE& X = *X_;
    const Mesh& m = mesh(h);
    Polisher po{X, Chain{}};
    po.chain.from = p;
    po.chain.to = q;

    std::vector<PointLocation> pts;
    pts.push_back(p);
    for (int nidx : np.nodes) pts.push_back(m.nodes[nidx]);
    pts.push_back(q);

    auto on_common_edge = [&](const PointLocation& a, const PointLocation& b) -> int {
        auto edges_of = [&](const PointLocation& x) {
            std::set<int> s;
            if (x.kind == PointLocation::Kind::Edge) s.insert(x.index);
            if (x.kind == PointLocation::Kind::Vertex)
                for (auto [e, end] : X.edge_ends_at_vertex(x.index)) s.insert(e);
            return s;
        };
        auto ea = edges_of(a), eb = edges_of(b);
        for (int e : ea)
            if (eb.count(e)) return e;
        return -1;
    };

    for (size_t i = 1; i + 1 < pts.size(); ++i) {
        Contact c;
        if (pts[i].kind == PointLocation::Kind::Vertex) {
            c.at_vertex = true;
            c.index = pts[i].index;
        } else {
            c.at_vertex = false;
            c.index = pts[i].index;
            c.t = pts[i].t;
        }
        po.chain.contacts.push_back(c);
    }
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        Gap g;
        int e = on_common_edge(pts[i], pts[i + 1]);
        if (e >= 0) {
            g.along_edge = e;
            g.cell = X.cells_at_edge(e).front().cell;
        } else {
            auto cc = common_cells(X, pts[i], pts[i + 1]);
            if (cc.empty()) throw Error("straighten: mesh step without a carrying cell");
            g.cell = cc.front();
            g.along_edge = -1;
        }
        po.chain.gaps.push_back(g);
    }

    po.polish();
    GeodesicResult res;
    res.path = po.to_path();
    res.length = path_length(res.path);
    res.h_used = h;
    res.certified = is_local_geodesic(res.path).yes;
    return res;
}

GeodesicResult GeodesicEngine::run_query(const PointLocation& p, const PointLocation& q, double h,
                                         bool checked) const {
    const Complex2PE& X = *X_;
    validate_location(X, p);
    validate_location(X, q);
    if (checked) require_npc();
    GeodesicResult best;
    best.length = kInf;
    // Two points on the closure of one edge: the chord runs along the edge.
    auto edge_param = [&](const PointLocation& x, int e) -> double {
        if (x.kind == PointLocation::Kind::Edge && x.index == e) return x.t;
        if (x.kind == PointLocation::Kind::Vertex) {
            if (X.edge(e).v0 == x.index) return 0.0;
            if (X.edge(e).v1 == x.index && X.edge(e).v0 != X.edge(e).v1) return 1.0;
        }
        return -1.0;
    };
    std::vector<int> p_edges;
    if (p.kind == PointLocation::Kind::Edge) p_edges.push_back(p.index);
    if (p.kind == PointLocation::Kind::Vertex)
        for (auto [e, end] : X.edge_ends_at_vertex(p.index)) p_edges.push_back(e);
    for (int e : p_edges) {
        if (best.length < kInf) break;
        double tp = edge_param(p, e), tq = edge_param(q, e);
        if (tp < 0 || tq < 0) continue;
        double len = std::abs(tp - tq) * X.edge(e).length;
        PLPath path;
        if (len <= 1e-12) {
            path.points = {p};
        } else {
            path.points = {p, q};
            int c = X.cells_at_edge(e).front().cell;
            path.segments.push_back(
                PLPath::Segment{c, locate_in_cell(X, p, c), locate_in_cell(X, q, c), e});
        }
        best = GeodesicResult{std::move(path), len, true, h};
    }
    for (int c : common_cells(X, p, q)) {
        Vec2 a = locate_in_cell(X, p, c), b = locate_in_cell(X, q, c);
        double len = (a - b).norm();
        if (len < best.length) {
            PLPath path;
            if (len <= 1e-12) {
                path.points = {p};
            } else {
                path.points = {p, q};
                path.segments.push_back(PLPath::Segment{c, a, b, -1});
            }
            best = GeodesicResult{std::move(path), len, true, h};
        }
    }
    if (p.same_as(q)) {
        if (best.length == kInf) {
            PLPath path;
            path.points = {p};
            best = GeodesicResult{std::move(path), 0.0, true, h};
        }
        return best;
    }
    GeodesicResult last;
    last.length = kInf;
    double hh = h;
    for (int attempt = 0; attempt < 4; ++attempt, hh /= 2) {
        auto np = mesh_shortest(p, q, hh);
        if (np.length == kInf) break;
        if (best.certified && best.length < kInf && np.length >= best.length - 1e-12) return best;
        last = straighten(p, q, np, hh);
        if (last.certified) return (last.length <= best.length) ? last : best;
    }
    if (best.length < kInf && best.length <= last.length) return best;
    if (last.length == kInf) throw NoPathFound("no path between the given points");
    return last;
}

GeodesicResult GeodesicEngine::geodesic_between(const PointLocation& p, const PointLocation& q,
                                                double h) const {
    return run_query(p, q, h, true);
}

GeodesicResult GeodesicEngine::shortest_path_unchecked(const PointLocation& p,
                                                       const PointLocation& q, double h) const {
    return run_query(p, q, h, false);
}

// ---------------------------------------------------------------------------
// Local geodesy certification

LocalGeodesyVerdict GeodesicEngine::is_local_geodesic(const PLPath& path) const {
    const Complex2PE& X = *X_;
    LocalGeodesyVerdict verdict;
    for (size_t i = 0; i + 1 < path.segments.size(); ++i) {
        const auto& s0 = path.segments[i];
        const auto& s1 = path.segments[i + 1];
        if (s0.length() <= 1e-12 || s1.length() <= 1e-12) continue;
        const PointLocation& bp = path.points[i + 1];
        auto ds = direction_space(X, bp);
        auto dir_of = [&](const PLPath::Segment& s, bool incoming) -> GraphPoint {
            if (s.along_edge >= 0 && bp.kind != PointLocation::Kind::Cell) {
                bool fwd;
                if (bp.kind == PointLocation::Kind::Vertex) {
                    fwd = X.edge(s.along_edge).v0 == bp.index;
                } else {
                    int sd = side_of(X, s.cell, s.along_edge);
                    Vec2 edir = X.edge_end_coord(s.cell, sd, 1) - X.edge_end_coord(s.cell, sd, 0);
                    Vec2 travel = incoming ? (s.a - s.b) : (s.b - s.a);
                    fwd = travel.dot(edir) > 0;
                }
                return direction_along_edge(X, ds, s.along_edge, fwd);
            }
            if (incoming) return direction_toward(X, ds, s.cell, s.b, s.a);
            return direction_toward(X, ds, s.cell, s.a, s.b);
        };
        GraphPoint din = dir_of(s0, true);
        GraphPoint dout = dir_of(s1, false);
        double d = graph_point_distance(ds.graph, din, dout);
        if (d < kPi - kCertTol) {
            verdict.yes = false;
            verdict.violation_at = bp;
            verdict.direction_distance = d;
            return verdict;
        }
    }
    return verdict;
}

// ---------------------------------------------------------------------------
// Angles

double GeodesicEngine::angle_via_directions(const PLPath& px, const PLPath& py) const {
    const Complex2PE& X = *X_;
    if (px.segments.empty() || py.segments.empty())
        throw DegenerateInput("angle_via_directions: degenerate geodesic");
    const PointLocation& p = px.points.front();
    auto ds = direction_space(X, p);
    auto dir_of = [&](const PLPath& path) {
        const auto& s = path.segments.front();
        if (s.along_edge >= 0 && p.kind == PointLocation::Kind::Vertex)
            return direction_along_edge(X, ds, s.along_edge, X.edge(s.along_edge).v0 == p.index);
        if (s.along_edge >= 0 && p.kind == PointLocation::Kind::Edge) {
            int sd = side_of(X, s.cell, s.along_edge);
            Vec2 edir = X.edge_end_coord(s.cell, sd, 1) - X.edge_end_coord(s.cell, sd, 0);
            return direction_along_edge(X, ds, s.along_edge, (s.b - s.a).dot(edir) > 0);
        }
        return direction_toward(X, ds, s.cell, s.a, s.b);
    };
    double d = graph_point_distance(ds.graph, dir_of(px), dir_of(py));
    return std::min(d, kPi);
}

double GeodesicEngine::alexandrov_angle(const PointLocation& p, const PointLocation& x,
                                        const PointLocation& y, double h) const {
    if (p.same_as(x) || p.same_as(y))
        throw DegenerateInput("alexandrov_angle: x and y must differ from p");
    auto gx = geodesic_between(p, x, h);
    auto gy = geodesic_between(p, y, h);
    double t0 = std::min(0.1, std::min(gx.length, gy.length) / 2);
    double prev = kInf, angle = kPi;
    for (int i = 0; i < 40; ++i) {
        double t = t0 * std::pow(0.5, i);
        auto a = path_point_at(*X_, gx.path, t);
        auto b = path_point_at(*X_, gy.path, t);
        double d = geodesic_between(a, b, h).length;
        angle = 2.0 * std::asin(std::clamp(d / (2.0 * t), 0.0, 1.0));
        // Comparison angles are nonincreasing as t shrinks in a CAT(0) space.
        if (prev < kInf && angle > prev + 1e-6)
            throw InvariantBreach("alexandrov_angle: comparison angles increased under refinement");
        if (prev < kInf && std::abs(angle - prev) < 1e-6) return angle;
        prev = angle;
    }
    return angle;
}

// ---------------------------------------------------------------------------
// Comparison probe

ProbeReport GeodesicEngine::comparison_probe(const PointLocation& a, const PointLocation& b,
                                             const PointLocation& c, int samples, unsigned seed,
                                             double h) const {
    ProbeReport rep;
    bool exact = npc();
    auto side = [&](const PointLocation& u, const PointLocation& v) {
        return shortest_path_unchecked(u, v, h);
    };
    auto dist = [&](const PointLocation& u, const PointLocation& v) {
        if (u.same_as(v)) return 0.0;
        auto r = shortest_path_unchecked(u, v, h);
        if (exact && r.certified) return r.length;
        return std::min(r.length, mesh_distance(u, v, std::min(h, 0.05)));
    };
    auto s_ab = side(a, b), s_bc = side(b, c), s_ac = side(a, c);
    auto ct = ComparisonTriangle::from_sides(s_ab.length, s_bc.length, s_ac.length);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const PLPath* paths[3] = {&s_ab.path, &s_bc.path, &s_ac.path};
    double lens[3] = {s_ab.length, s_bc.length, s_ac.length};
    for (int it = 0; it < samples; ++it) {
        int i = static_cast<int>(rng() % 3);
        int j = static_cast<int>(rng() % 3);
        double si = uni(rng) * lens[i];
        double sj = uni(rng) * lens[j];
        auto xi = path_point_at(*X_, *paths[i], si);
        auto xj = path_point_at(*X_, *paths[j], sj);
        double d = dist(xi, xj);
        double dbar = (ct.point_on_side(i, si) - ct.point_on_side(j, sj)).norm();
        rep.max_cat0_violation = std::max(rep.max_cat0_violation, d - dbar);
        ++rep.samples;
    }
    {
        // Convexity: the two sides leaving `a`, parametrized proportionally;
        // they share their start, so the bound is t * d(b, c).
        double d1 = lens[1];
        for (int it = 0; it < std::max(4, samples / 2); ++it) {
            double t = uni(rng);
            auto x0 = path_point_at(*X_, s_ab.path, t * lens[0]);
            auto x1 = path_point_at(*X_, s_ac.path, t * lens[2]);
            double d = dist(x0, x1);
            rep.max_convexity_violation = std::max(rep.max_convexity_violation, d - t * d1);
        }
    }
    if (exact && s_ab.length > 1e-9 && s_bc.length > 1e-9 && s_ac.length > 1e-9) {
        rep.corner_gap[0] = ct.angle_p - angle_via_directions(s_ab.path, s_ac.path);
        rep.corner_gap[1] = ct.angle_q - angle_via_directions(s_ab.path.reversed(), s_bc.path);
        rep.corner_gap[2] =
            ct.angle_r - angle_via_directions(s_bc.path.reversed(), s_ac.path.reversed());
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Distance fields and path sampling

DistanceField GeodesicEngine::distance_field(const std::vector<PointLocation>& sources, double h,
                                             double r_max) const {
    const Complex2PE& X = *X_;
    const Mesh& m = mesh(h);
    DistanceField f;
    f.mesh = &m;
    f.h = h;
    f.sources = sources;
    f.node_dist.assign(m.nodes.size(), kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (const auto& s : sources) {
        for (const auto& at : attach(X, m, s)) {
            if (at.dist < f.node_dist[at.node]) {
                f.node_dist[at.node] = at.dist;
                pq.emplace(at.dist, at.node);
            }
        }
    }
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > f.node_dist[v]) continue;
        if (d > r_max) break;
        m.for_neighbors(v, [&](int w, double wt, int, int) {
            double nd = d + wt;
            if (nd < f.node_dist[w] - 1e-15) {
                f.node_dist[w] = nd;
                pq.emplace(nd, w);
            }
        });
    }
    return f;
}

double GeodesicEngine::field_at(const DistanceField& f, const PointLocation& p) const {
    const Complex2PE& X = *X_;
    double best = kInf;
    for (const auto& at : attach(X, *f.mesh, p))
        if (f.node_dist[at.node] < kInf) best = std::min(best, f.node_dist[at.node] + at.dist);
    for (const auto& s : f.sources)
        for (int c : common_cells(X, p, s))
            best = std::min(best, (locate_in_cell(X, p, c) - locate_in_cell(X, s, c)).norm());
    return best;
}

std::vector<PointLocation> GeodesicEngine::sample_path(const Complex2PE& X, const PLPath& path,
                                                       double spacing) {
    std::vector<PointLocation> out;
    if (path.points.empty()) return out;
    double len = path_length(path);
    if (len <= 1e-12) {
        out.push_back(path.points.front());
        return out;
    }
    int k = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    for (int i = 0; i <= k; ++i) out.push_back(path_point_at(X, path, len * i / k));
    return out;
}

} // namespace cat0
