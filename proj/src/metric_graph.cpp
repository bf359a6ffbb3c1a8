#include "cat0/metric_graph.hpp"

#include "cat0/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

namespace cat0 {

int MetricGraph::add_node(std::string label) {
    node_labels.push_back(std::move(label));
    return node_count() - 1;
}

int MetricGraph::add_arc(int a, int b, double len, std::string label) {
    if (len <= 0) throw BadParams("metric graph arc length must be positive");
    arcs.push_back(Arc{a, b, len, std::move(label)});
    return arc_count() - 1;
}

double MetricGraph::total_length() const {
    double s = 0;
    for (const auto& e : arcs) s += e.len;
    return s;
}

namespace {
std::vector<std::vector<int>> incidence(const MetricGraph& g) {
    std::vector<std::vector<int>> inc(g.node_count());
    for (int i = 0; i < g.arc_count(); ++i) {
        inc[g.arcs[i].a].push_back(i);
        if (g.arcs[i].b != g.arcs[i].a) inc[g.arcs[i].b].push_back(i);
    }
    return inc;
}
} // namespace

bool MetricGraph::connected() const {
    if (node_count() == 0) return true;
    auto inc = incidence(*this);
    std::vector<char> seen(node_count(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int ei : inc[v]) {
            int w = arcs[ei].a == v ? arcs[ei].b : arcs[ei].a;
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

MetricGraph MetricGraph::smoothed() const {
    MetricGraph g = *this;
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<int> deg(g.node_count(), 0);
        for (const auto& e : g.arcs) {
            deg[e.a]++;
            deg[e.b]++;
        }
        for (int v = 0; v < g.node_count() && !changed; ++v) {
            if (deg[v] != 2) continue;
            int e0 = -1, e1 = -1;
            for (int i = 0; i < g.arc_count(); ++i) {
                if (g.arcs[i].a == v || g.arcs[i].b == v) {
                    if (e0 < 0)
                        e0 = i;
                    else
                        e1 = i;
                }
            }
            if (e1 < 0) continue; // a loop at v; leave the circle component alone
            int u = g.arcs[e0].a == v ? g.arcs[e0].b : g.arcs[e0].a;
            int w = g.arcs[e1].a == v ? g.arcs[e1].b : g.arcs[e1].a;
            MetricGraph::Arc merged;
            merged.a = u;
            merged.b = w;
            merged.len = g.arcs[e0].len + g.arcs[e1].len;
            merged.label = g.arcs[e0].label;
            std::vector<Arc> next;
            for (int i = 0; i < g.arc_count(); ++i)
                if (i != e0 && i != e1) next.push_back(g.arcs[i]);
            next.push_back(merged);
            g.arcs = std::move(next);
            changed = true;
        }
    }
    // Drop isolated nodes introduced by merging, compacting indices.
    std::vector<int> deg(g.node_count(), 0);
    for (const auto& e : g.arcs) {
        deg[e.a]++;
        deg[e.b]++;
    }
    std::vector<int> remap(g.node_count(), -1);
    MetricGraph out;
    for (int v = 0; v < g.node_count(); ++v)
        if (deg[v] > 0) remap[v] = out.add_node(g.node_labels[v]);
    for (const auto& e : g.arcs) out.add_arc(remap[e.a], remap[e.b], e.len, e.label);
    return out;
}

std::vector<double> MetricGraph::node_distances(int src, const std::vector<int>& skip) const {
    std::vector<char> skipped(arc_count(), 0);
    for (int s : skip) skipped[s] = 1;
    auto inc = incidence(*this);
    std::vector<double> dist(node_count(), kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        for (int ei : inc[v]) {
            if (skipped[ei]) continue;
            const Arc& e = arcs[ei];
            int w = e.a == v ? e.b : e.a;
            double nd = d + e.len;
            if (nd < dist[w]) {
                dist[w] = nd;
                pq.emplace(nd, w);
            }
        }
    }
    return dist;
}

double graph_point_distance(const MetricGraph& g, const GraphPoint& p, const GraphPoint& q) {
    auto ends = [&](const GraphPoint& x) -> std::pair<std::pair<int, double>, std::pair<int, double>> {
        if (x.arc < 0) return {{x.node, 0.0}, {x.node, 0.0}};
        const auto& e = g.arcs[x.arc];
        return {{e.a, x.offset}, {e.b, e.len - x.offset}};
    };
    double best = kInf;
    if (p.arc >= 0 && p.arc == q.arc) best = std::abs(p.offset - q.offset);
    if (p.arc < 0 && q.arc < 0 && p.node == q.node) return 0.0;
    auto [pa, pb] = ends(p);
    auto [qa, qb] = ends(q);
    auto dist_a = g.node_distances(pa.first);
    auto dist_b = (pb.first == pa.first) ? dist_a : g.node_distances(pb.first);
    for (auto [pn, po] : {pa, pb}) {
        const auto& dd = (pn == pa.first) ? dist_a : dist_b;
        for (auto [qn, qo] : {qa, qb}) {
            if (dd[qn] < kInf) best = std::min(best, po + dd[qn] + qo);
        }
    }
    return best;
}

GraphRoute graph_point_route(const MetricGraph& g, const GraphPoint& p, const GraphPoint& q) {
    GraphRoute best;
    if (p.arc >= 0 && p.arc == q.arc) {
        best.length = std::abs(p.offset - q.offset);
        best.direct = true;
    }
    if (p.arc < 0 && q.arc < 0 && p.node == q.node) {
        best.length = 0;
        best.direct = false;
        best.nodes = {p.node};
        return best;
    }
    auto ends = [&](const GraphPoint& x) -> std::vector<std::pair<int, double>> {
        if (x.arc < 0) return {{x.node, 0.0}};
        const auto& e = g.arcs[x.arc];
        return {{e.a, x.offset}, {e.b, e.len - x.offset}};
    };
    auto inc = [&]() {
        std::vector<std::vector<int>> out(g.node_count());
        for (int i = 0; i < g.arc_count(); ++i) {
            out[g.arcs[i].a].push_back(i);
            if (g.arcs[i].b != g.arcs[i].a) out[g.arcs[i].b].push_back(i);
        }
        return out;
    }();
    for (auto [pn, po] : ends(p)) {
        // Dijkstra with parent arcs from pn.
        std::vector<double> dist(g.node_count(), kInf);
        std::vector<int> par_arc(g.node_count(), -1), par_node(g.node_count(), -1);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        dist[pn] = 0;
        pq.emplace(0.0, pn);
        while (!pq.empty()) {
            auto [d, v] = pq.top();
            pq.pop();
            if (d > dist[v]) continue;
            for (int ei : inc[v]) {
                const MetricGraph::Arc& e = g.arcs[ei];
                int w = e.a == v ? e.b : e.a;
                if (d + e.len < dist[w] - 1e-15) {
                    dist[w] = d + e.len;
                    par_arc[w] = ei;
                    par_node[w] = v;
                    pq.emplace(dist[w], w);
                }
            }
        }
        for (auto [qn, qo] : ends(q)) {
            if (dist[qn] == kInf) continue;
            double total = po + dist[qn] + qo;
            if (total < best.length - 1e-15) {
                GraphRoute r;
                r.length = total;
                int v = qn;
                while (v != pn) {
                    r.nodes.push_back(v);
                    r.arcs.push_back(par_arc[v]);
                    v = par_node[v];
                }
                r.nodes.push_back(pn);
                std::reverse(r.nodes.begin(), r.nodes.end());
                std::reverse(r.arcs.begin(), r.arcs.end());
                best = std::move(r);
            }
        }
    }
    return best;
}

CycleWitness shortest_essential_loop(const MetricGraph& g) {
    CycleWitness best;
    for (int ei = 0; ei < g.arc_count(); ++ei) {
        const auto& e = g.arcs[ei];
        if (e.a == e.b) {
            if (e.len < best.length) best = CycleWitness{e.len, {ei}};
            continue;
        }
        // Minimum cycle through arc ei: shortest a-b path avoiding ei, plus ei.
        auto inc_dist = g.node_distances(e.a, {ei});
        if (inc_dist[e.b] == kInf) continue;
        double cand = inc_dist[e.b] + e.len;
        if (cand < best.length) {
            // Reconstruct the path by greedy descent on distances.
            std::vector<int> cyc{ei};
            auto inc = incidence(g);
            int v = e.b;
            while (v != e.a) {
                int pick = -1, nxt = -1;
                for (int fi : inc[v]) {
                    if (fi == ei) continue;
                    const auto& f = g.arcs[fi];
                    if (f.a == f.b) continue;
                    int w = f.a == v ? f.b : f.a;
                    if (std::abs(inc_dist[w] + f.len - inc_dist[v]) < 1e-12) {
                        pick = fi;
                        nxt = w;
                        break;
                    }
                }
                if (pick < 0) break; // numerical dead end; length still valid
                cyc.push_back(pick);
                v = nxt;
            }
            best = CycleWitness{cand, cyc};
        }
    }
    return best;
}

namespace {
// max z subject to z <= c_i + a_i s + b_i u (four routings), 0<=s<=l, 0<=u<=m.
// Exact vertex enumeration of the tiny LP: every optimum lies on the
// intersection of three active constraints.
double max_min_of_routings(double l, double m, const double c[4], const double a[4],
                           const double b[4]) {
    struct Row {
        double za, sa, ua, rhs; // za*z + sa*s + ua*u <= rhs
    };
    std::vector<Row> rows;
    for (int i = 0; i < 4; ++i) {
        if (!std::isfinite(c[i])) continue;
        rows.push_back(Row{1.0, -a[i], -b[i], c[i]}); // z - a s - b u <= c
    }
    rows.push_back(Row{0, -1, 0, 0});  // s >= 0
    rows.push_back(Row{0, 1, 0, l});   // s <= l
    rows.push_back(Row{0, 0, -1, 0});  // u >= 0
    rows.push_back(Row{0, 0, 1, m});   // u <= m
    double best = -kInf;
    int n = static_cast<int>(rows.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                Eigen::Matrix3d A;
                A << rows[i].za, rows[i].sa, rows[i].ua, rows[j].za, rows[j].sa, rows[j].ua,
                    rows[k].za, rows[k].sa, rows[k].ua;
                if (std::abs(A.determinant()) < 1e-12) continue;
                Eigen::Vector3d rhs(rows[i].rhs, rows[j].rhs, rows[k].rhs);
                Eigen::Vector3d x = A.fullPivLu().solve(rhs);
                double z = x[0], s = x[1], u = x[2];
                bool feasible = true;
                for (const auto& r : rows)
                    if (r.za * z + r.sa * s + r.ua * u > r.rhs + 1e-9) {
                        feasible = false;
                        break;
                    }
                if (feasible) best = std::max(best, z);
            }
    return best;
}
} // namespace

double metric_graph_diameter(const MetricGraph& g) {
    if (!g.connected()) throw DisconnectedGraph("metric_graph_diameter: graph is disconnected");
    int n = g.node_count();
    if (n == 0) return 0.0;
    std::vector<std::vector<double>> dist(n);
    for (int v = 0; v < n; ++v) dist[v] = g.node_distances(v);

    double best = 0.0;
    for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w)
            if (dist[v][w] < kInf) best = std::max(best, dist[v][w]);

    int m = g.arc_count();
    for (int i = 0; i < m; ++i) {
        const auto& e = g.arcs[i];
        // Two points on the same arc: sup of min(|s-u|, s + d(a,b) + l - u)
        // is (l + d(a,b))/2, attained at antipodal-like positions.
        double dab = dist[e.a][e.b]; // <= e.len always (the arc itself)
        best = std::max(best, (e.len + dab) / 2.0);
        for (int j = i + 1; j < m; ++j) {
            const auto& f = g.arcs[j];
            // x at offset s on e=(a,b;l), y at offset u on f=(c,d;m):
            // d(x,y) = min over the four routings through the endpoints.
            double c[4] = {dist[e.a][f.a], dist[e.a][f.b], dist[e.b][f.a], dist[e.b][f.b]};
            double a[4] = {1, 1, -1, -1};
            double b[4] = {1, -1, 1, -1};
            double cc[4] = {c[0], c[1] + f.len, c[2] + e.len, c[3] + e.len + f.len};
            best = std::max(best, max_min_of_routings(e.len, f.len, cc, a, b));
        }
    }
    return best;
}

namespace {
// Degree sequence with loop handling for isomorphism pruning.
std::vector<int> degrees(const MetricGraph& g) {
    std::vector<int> deg(g.node_count(), 0);
    for (const auto& e : g.arcs) {
        deg[e.a]++;
        deg[e.b]++;
    }
    return deg;
}

bool match_arcs(const MetricGraph& g, const MetricGraph& h, const std::vector<int>& perm,
                double tol) {
    // Multiset comparison of arcs under the node permutation.
    std::vector<char> used(h.arc_count(), 0);
    for (const auto& e : g.arcs) {
        int a = perm[e.a], b = perm[e.b];
        bool ok = false;
        for (int j = 0; j < h.arc_count(); ++j) {
            if (used[j]) continue;
            const auto& f = h.arcs[j];
            bool same = (f.a == a && f.b == b) || (f.a == b && f.b == a);
            if (same && std::abs(f.len - e.len) <= tol) {
                used[j] = 1;
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    return true;
}

bool extend(const MetricGraph& g, const MetricGraph& h, std::vector<int>& perm,
            std::vector<char>& taken, size_t i, const std::vector<int>& dg,
            const std::vector<int>& dh, double tol) {
    if (i == perm.size()) return match_arcs(g, h, perm, tol);
    for (int c = 0; c < h.node_count(); ++c) {
        if (taken[c] || dg[i] != dh[c]) continue;
        perm[i] = c;
        taken[c] = 1;
        if (extend(g, h, perm, taken, i + 1, dg, dh, tol)) return true;
        taken[c] = 0;
    }
    return false;
}
} // namespace

bool metric_graphs_isomorphic(const MetricGraph& g, const MetricGraph& h, double len_tol) {
    if (g.node_count() != h.node_count() || g.arc_count() != h.arc_count()) return false;
    auto dg = degrees(g), dh = degrees(h);
    auto sg = dg, sh = dh;
    std::sort(sg.begin(), sg.end());
    std::sort(sh.begin(), sh.end());
    if (sg != sh) return false;
    std::vector<int> perm(g.node_count(), -1);
    std::vector<char> taken(h.node_count(), 0);
    return extend(g, h, perm, taken, 0, dg, dh, len_tol);
}

namespace {
void cycle_dfs(const MetricGraph& g, const std::vector<std::vector<int>>& inc, int start, int v,
               double len, std::vector<int>& arc_stack, std::vector<char>& node_used,
               std::vector<CycleWitness>& out) {
    for (int ei : inc[v]) {
        const auto& e = g.arcs[ei];
        if (!arc_stack.empty() && ei == arc_stack.back()) continue; // no immediate backtrack
        if (!arc_stack.empty() && ei <= arc_stack.front()) continue; // canonical: min arc first
        if (std::find(arc_stack.begin(), arc_stack.end(), ei) != arc_stack.end()) continue;
        int w = (e.a == v) ? e.b : e.a;
        if (e.a == e.b) {
            if (arc_stack.empty()) out.push_back(CycleWitness{e.len, {ei}});
            continue;
        }
        if (w == start && !arc_stack.empty()) {
            auto cyc = arc_stack;
            cyc.push_back(ei);
            out.push_back(CycleWitness{len + e.len, cyc});
            continue;
        }
        if (node_used[w]) continue;
        node_used[w] = 1;
        arc_stack.push_back(ei);
        cycle_dfs(g, inc, start, w, len + e.len, arc_stack, node_used, out);
        arc_stack.pop_back();
        node_used[w] = 0;
    }
}
} // namespace

std::vector<CycleWitness> enumerate_simple_cycles(const MetricGraph& g) {
    auto inc = incidence(g);
    std::vector<CycleWitness> out;
    for (int v = 0; v < g.node_count(); ++v) {
        std::vector<int> stack;
        std::vector<char> used(g.node_count(), 0);
        used[v] = 1;
        cycle_dfs(g, inc, v, v, 0.0, stack, used, out);
    }
    // Each simple cycle is found multiple times (per start node / direction);
    // deduplicate by sorted arc set.
    std::set<std::vector<int>> seen;
    std::vector<CycleWitness> uniq;
    for (auto& c : out) {
        auto key = c.arcs;
        std::sort(key.begin(), key.end());
        if (seen.insert(key).second) uniq.push_back(std::move(c));
    }
    return uniq;
}

} // namespace cat0
