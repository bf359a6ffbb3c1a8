#include "cat0/diagram.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace cat0 {

using nlohmann::json;

DiscDiagram::DiscDiagram(std::vector<std::string> vertex_ids, std::vector<std::string> edge_ids,
                         std::vector<Dart> darts, int outer_dart)
    : vertex_ids_(std::move(vertex_ids)), edge_ids_(std::move(edge_ids)),
      darts_(std::move(darts)) {
    rebuild_faces();
    if (outer_dart >= 0) outer_face_ = face_of_[outer_dart];
}

int DiscDiagram::cell_count() const {
    int n = 0;
    for (const auto& f : faces_)
        if (f.filled) ++n;
    return n;
}

int DiscDiagram::vertex_index(const std::string& id) const {
    for (int v = 0; v < vertex_count(); ++v)
        if (vertex_ids_[v] == id) return v;
    throw UnknownVertex("diagram vertex not found: " + id);
}

int DiscDiagram::edge_index(const std::string& id) const {
    for (int e = 0; e < edge_count(); ++e)
        if (edge_ids_[e] == id) return e;
    throw UnknownId("diagram edge not found: " + id);
}

void DiscDiagram::rebuild_faces() {
    faces_.clear();
    face_of_.assign(darts_.size(), -1);
    for (int d = 0; d < dart_count(); ++d) {
        if (face_of_[d] >= 0) continue;
        Face f;
        int x = d;
        do {
            face_of_[x] = static_cast<int>(faces_.size());
            f.cycle.push_back(x);
            x = next(twin(x));
        } while (x != d);
        faces_.push_back(std::move(f));
    }
}

std::vector<int> DiscDiagram::unfilled_faces() const {
    std::vector<int> out;
    if (outer_face_ >= 0) out.push_back(outer_face_);
    for (int f = 0; f < face_count(); ++f)
        if (!faces_[f].filled && f != outer_face_) out.push_back(f);
    return out;
}

void DiscDiagram::fill_face(int f, std::vector<Vec2> coords) {
    if (f == outer_face_) throw BadParams("cannot fill the outer face");
    faces_[f].filled = true;
    faces_[f].coords = std::move(coords);
}

void DiscDiagram::set_outer(int f) {
    if (faces_[f].filled) throw BadParams("outer face cannot be filled");
    outer_face_ = f;
}

double DiscDiagram::corner_angle(int f, int k) const {
    const Face& face = faces_[f];
    int n = static_cast<int>(face.cycle.size());
    const Vec2& prev = face.coords[(k + n - 1) % n];
    const Vec2& here = face.coords[k];
    const Vec2& next = face.coords[(k + 1) % n];
    return angle_at(prev, here, next);
}

double DiscDiagram::edge_length(int e) const {
    for (int d : {2 * e, 2 * e + 1}) {
        int f = face_of_[d];
        if (!faces_[f].filled) continue;
        const auto& cyc = faces_[f].cycle;
        for (size_t k = 0; k < cyc.size(); ++k)
            if (cyc[k] == d)
                return (faces_[f].coords[(k + 1) % cyc.size()] - faces_[f].coords[k]).norm();
    }
    throw BadParams("edge_length: edge " + edge_ids_[e] + " bounds no filled face");
}

int DiscDiagram::euler_characteristic() const {
    return vertex_count() - edge_count() + cell_count();
}

std::vector<int> DiscDiagram::darts_at_vertex(int v) const {
    std::vector<int> out;
    for (int d = 0; d < dart_count(); ++d)
        if (darts_[d].tail == v) out.push_back(d);
    return out;
}

std::vector<std::pair<int, int>> DiscDiagram::corners_at_vertex(int v) const {
    std::vector<std::pair<int, int>> out;
    for (int f = 0; f < face_count(); ++f) {
        if (!faces_[f].filled) continue;
        const auto& cyc = faces_[f].cycle;
        for (size_t k = 0; k < cyc.size(); ++k)
            if (darts_[cyc[k]].tail == v) out.emplace_back(f, static_cast<int>(k));
    }
    return out;
}

int DiscDiagram::link_euler_characteristic(int v) const {
    int darts_here = static_cast<int>(darts_at_vertex(v).size());
    int corners_here = static_cast<int>(corners_at_vertex(v).size());
    return darts_here - corners_here;
}

void DiscDiagram::validate() const {
    // Rotation integrity: next is a permutation preserving tails.
    std::vector<int> seen(dart_count(), 0);
    for (int d = 0; d < dart_count(); ++d) {
        int n = darts_[d].next;
        if (n < 0 || n >= dart_count() || darts_[n].tail != darts_[d].tail)
            throw InvariantBreach("diagram rotation is not a tail-preserving permutation");
        seen[n]++;
    }
    for (int d = 0; d < dart_count(); ++d)
        if (seen[d] != 1) throw InvariantBreach("diagram rotation is not a permutation");
    // Connectivity over darts.
    if (dart_count() > 0) {
        std::vector<char> vis(dart_count(), 0);
        std::vector<int> stack{0};
        vis[0] = 1;
        while (!stack.empty()) {
            int d = stack.back();
            stack.pop_back();
            for (int e : {twin(d), next(d)})
                if (!vis[e]) {
                    vis[e] = 1;
                    stack.push_back(e);
                }
        }
        if (!std::all_of(vis.begin(), vis.end(), [](char c) { return c != 0; }))
            throw InvariantBreach("diagram is not connected");
    }
    // Spherical embedding: V - E + F == 2.
    int sphere = vertex_count() - edge_count() + face_count();
    if (dart_count() > 0 && sphere != 2)
        throw InvariantBreach("rotation system does not embed in the sphere (V - E + F = " +
                              std::to_string(sphere) + ")");
    if (outer_face_ >= 0 && faces_[outer_face_].filled)
        throw InvariantBreach("outer face is filled");
}

bool DiscDiagram::is_disc() const {
    return unfilled_faces().size() == 1 && euler_characteristic() == 1;
}

// ---------------------------------------------------------------------------
// Curvature and Gauss-Bonnet

double vertex_curvature(const DiscDiagram& D, int v) {
    if (v < 0 || v >= D.vertex_count()) throw UnknownVertex("vertex_curvature: bad vertex");
    double angles = 0;
    for (auto [f, k] : D.corners_at_vertex(v)) angles += D.corner_angle(f, k);
    return kTwoPi - kPi * D.link_euler_characteristic(v) - angles;
}

double vertex_curvature(const DiscDiagram& D, const std::string& vertex_id) {
    return vertex_curvature(D, D.vertex_index(vertex_id));
}

double gauss_bonnet_residual(const DiscDiagram& D) {
    double total = 0;
    for (int v = 0; v < D.vertex_count(); ++v) total += vertex_curvature(D, v);
    return std::abs(total - kTwoPi * D.euler_characteristic());
}

// ---------------------------------------------------------------------------
// DiagramMap

std::pair<int, bool> DiagramMap::dart_image(int d) const {
    int e = DiscDiagram::twin(0) == 1 ? d / 2 : d / 2; // primary dart is 2e
    bool primary = (d % 2) == 0;
    return {edge_image[e], primary == edge_forward[e]};
}

void DiagramMap::pull_back_geometry() {
    const Complex2PE& X = *target;
    cell_images.assign(D.face_count(), CellImage{});
    for (int f = 0; f < D.face_count(); ++f) {
        if (f == D.outer_face()) continue;
        const auto& cyc = D.face(f).cycle;
        if (!D.face(f).filled && !cyc.empty() && f == D.outer_face()) continue;
        if (!D.face(f).filled) continue;
        int m = static_cast<int>(cyc.size());
        auto [e0, fwd0] = dart_image(cyc[0]);
        bool matched = false;
        for (const auto& ref : X.cells_at_edge(e0)) {
            const auto& tc = X.cell(ref.cell);
            if (tc.size() != m) continue;
            for (int orient : {+1, -1}) {
                // side s(k) = start + orient * k; traversal direction along
                // the target side must match the dart image.
                int start = ref.index;
                bool ok = true;
                for (int k = 0; k < m && ok; ++k) {
                    int s = ((start + orient * k) % m + m) % m;
                    auto [ek, fk] = dart_image(cyc[k]);
                    if (tc.sides[s] != ek) {
                        ok = false;
                        break;
                    }
                    // Side s runs corner s -> corner s+1; with orient -1 the
                    // cycle traverses it backwards.
                    bool side_fwd_in_cycle = (orient == 1) == tc.side_forward[s];
                    if (side_fwd_in_cycle != fk) ok = false;
                }
                if (!ok) continue;
                cell_images[f] = CellImage{ref.cell, start, orient};
                std::vector<Vec2> coords(m);
                for (int k = 0; k < m; ++k) {
                    int s = ((start + orient * k) % m + m) % m;
                    int corner = (orient == 1) ? s : (s + 1) % m;
                    Vec2 c = tc.coords[corner];
                    if (orient == -1) c.y() = -c.y(); // mirror keeps ccw order
                    coords[k] = c;
                }
                D.fill_face(f, std::move(coords));
                matched = true;
                break;
            }
            if (matched) break;
        }
        if (!matched)
            throw InvariantBreach("diagram face does not map onto a single target cell boundary");
    }
}

void DiagramMap::validate() const {
    D.validate();
    const Complex2PE& X = *target;
    if (static_cast<int>(vertex_image.size()) != D.vertex_count() ||
        static_cast<int>(edge_image.size()) != D.edge_count())
        throw InvariantBreach("diagram map tables have wrong sizes");
    // Edge images must join the images of their endpoints, in order.
    for (int e = 0; e < D.edge_count(); ++e) {
        const auto& te = X.edge(edge_image[e]);
        int a = vertex_image[D.tail(2 * e)];
        int b = vertex_image[D.head(2 * e)];
        int want_a = edge_forward[e] ? te.v0 : te.v1;
        int want_b = edge_forward[e] ? te.v1 : te.v0;
        if (a != want_a || b != want_b)
            throw InvariantBreach("edge image does not respect vertex images");
    }
    // Metric pullback: each filled face's polygon matches its target cell.
    for (int f = 0; f < D.face_count(); ++f) {
        if (!D.face(f).filled) continue;
        const auto& ci = cell_images[f];
        const auto& tc = X.cell(ci.cell);
        const auto& cyc = D.face(f).cycle;
        int m = static_cast<int>(cyc.size());
        for (int k = 0; k < m; ++k) {
            int s = ((ci.start + ci.orient * k) % m + m) % m;
            double side_len =
                (D.face(f).coords[(k + 1) % m] - D.face(f).coords[k]).norm();
            if (std::abs(side_len - X.edge(tc.sides[s]).length) > kMetricTol)
                throw InvariantBreach("metric pullback mismatch on a cell side");
        }
    }
}

Complex2PE DiagramMap::as_complex() const {
    std::vector<std::string> vids;
    for (int v = 0; v < D.vertex_count(); ++v) vids.push_back(D.vertex_id(v));
    std::vector<Complex2PE::Edge> edges;
    for (int e = 0; e < D.edge_count(); ++e) {
        Complex2PE::Edge ed;
        ed.id = D.edge_id(e);
        ed.v0 = D.tail(2 * e);
        ed.v1 = D.head(2 * e);
        ed.length = target->edge(edge_image[e]).length;
        edges.push_back(ed);
    }
    std::vector<Complex2PE::Cell> cells;
    for (int f = 0; f < D.face_count(); ++f) {
        if (!D.face(f).filled) continue;
        Complex2PE::Cell c;
        c.id = "f" + std::to_string(f);
        const auto& cyc = D.face(f).cycle;
        for (size_t k = 0; k < cyc.size(); ++k) {
            c.corners.push_back(D.tail(cyc[k]));
            c.coords.push_back(D.face(f).coords[k]);
            c.sides.push_back(D.edge_of(cyc[k]));
            c.side_forward.push_back(cyc[k] % 2 == 0);
        }
        cells.push_back(std::move(c));
    }
    return Complex2PE(vids, edges, cells);
}

json DiagramMap::to_json() const {
    json doc;
    json verts = json::array(), edges = json::array(), cells = json::array();
    for (int v = 0; v < D.vertex_count(); ++v) verts.push_back(D.vertex_id(v));
    for (int e = 0; e < D.edge_count(); ++e)
        edges.push_back({{"id", D.edge_id(e)},
                         {"v0", D.vertex_id(D.tail(2 * e))},
                         {"v1", D.vertex_id(D.head(2 * e))}});
    auto oriented = [&](int d) {
        std::string s = D.edge_id(D.edge_of(d));
        return d % 2 == 0 ? s : "-" + s;
    };
    int cell_no = 0;
    std::map<int, std::string> cell_name;
    for (int f = 0; f < D.face_count(); ++f) {
        if (!D.face(f).filled) continue;
        cell_name[f] = "d" + std::to_string(cell_no++);
        json jc;
        jc["id"] = cell_name[f];
        json b = json::array();
        for (int d : D.face(f).cycle) b.push_back(oriented(d));
        jc["boundary"] = std::move(b);
        cells.push_back(std::move(jc));
    }
    doc["vertices"] = std::move(verts);
    doc["edges"] = std::move(edges);
    doc["cells"] = std::move(cells);
    json rot = json::object();
    for (int v = 0; v < D.vertex_count(); ++v) {
        auto at = D.darts_at_vertex(v);
        if (at.empty()) continue;
        json lst = json::array();
        int d = at.front();
        int x = d;
        do {
            lst.push_back(D.edge_id(D.edge_of(x)));
            x = D.next(x);
        } while (x != d);
        rot[D.vertex_id(v)] = std::move(lst);
    }
    doc["rotation"] = std::move(rot);
    json ob = json::array();
    if (D.outer_face() >= 0)
        for (int d : D.face(D.outer_face()).cycle) ob.push_back(oriented(d));
    doc["outer_boundary"] = std::move(ob);
    json jm;
    json mv = json::object(), me = json::object(), mc = json::object();
    for (int v = 0; v < D.vertex_count(); ++v)
        mv[D.vertex_id(v)] = target->vertex_id(vertex_image[v]);
    for (int e = 0; e < D.edge_count(); ++e)
        me[D.edge_id(e)] = json{{"edge", target->edge(edge_image[e]).id},
                                {"forward", static_cast<bool>(edge_forward[e])}};
    for (int f = 0; f < D.face_count(); ++f) {
        if (!D.face(f).filled) continue;
        mc[cell_name[f]] = json{{"cell", target->cell(cell_images[f].cell).id},
                                {"start", cell_images[f].start},
                                {"orient", cell_images[f].orient}};
    }
    jm["vertices"] = std::move(mv);
    jm["edges"] = std::move(me);
    jm["cells"] = std::move(mc);
    doc["map"] = std::move(jm);
    return doc;
}

DiagramMap DiagramMap::from_json(const json& doc, const Complex2PE& X) {
    try {
        std::vector<std::string> vids = doc.at("vertices").get<std::vector<std::string>>();
        std::map<std::string, int> vidx;
        for (size_t i = 0; i < vids.size(); ++i) vidx[vids[i]] = static_cast<int>(i);
        std::vector<std::string> eids;
        std::vector<std::pair<int, int>> eends;
        std::map<std::string, int> eidx;
        for (const auto& je : doc.at("edges")) {
            eidx[je.at("id").get<std::string>()] = static_cast<int>(eids.size());
            eids.push_back(je.at("id").get<std::string>());
            eends.emplace_back(vidx.at(je.at("v0").get<std::string>()),
                               vidx.at(je.at("v1").get<std::string>()));
        }
        std::vector<DiscDiagram::Dart> darts(2 * eids.size());
        for (size_t e = 0; e < eids.size(); ++e) {
            darts[2 * e].tail = eends[e].first;
            darts[2 * e + 1].tail = eends[e].second;
        }
        // Rotation: per vertex, cyclic list of edge ids; successive
        // occurrences of an id name successive darts of that edge at v.
        for (auto it = doc.at("rotation").begin(); it != doc.at("rotation").end(); ++it) {
            int v = vidx.at(it.key());
            std::map<int, std::vector<int>> remaining; // edge -> darts at v
            for (size_t e = 0; e < eids.size(); ++e) {
                if (eends[e].first == v) remaining[static_cast<int>(e)].push_back(2 * e);
                if (eends[e].second == v) remaining[static_cast<int>(e)].push_back(2 * e + 1);
            }
            std::vector<int> order;
            for (const auto& jid : it.value()) {
                int e = eidx.at(jid.get<std::string>());
                auto& lst = remaining[e];
                if (lst.empty()) throw SchemaError("rotation lists edge too often");
                order.push_back(lst.front());
                lst.erase(lst.begin());
            }
            for (size_t k = 0; k < order.size(); ++k)
                darts[order[k]].next = order[(k + 1) % order.size()];
        }
        // Outer face: identified by its first oriented edge.
        int outer_dart = -1;
        if (!doc.at("outer_boundary").empty()) {
            std::string first = doc.at("outer_boundary")[0].get<std::string>();
            bool rev = !first.empty() && first[0] == '-';
            int e = eidx.at(rev ? first.substr(1) : first);
            outer_dart = 2 * e + (rev ? 1 : 0);
        }
        DiscDiagram D(vids, eids, darts, outer_dart);
        DiagramMap M;
        M.target = &X;
        const auto& jm = doc.at("map");
        M.vertex_image.resize(D.vertex_count());
        for (int v = 0; v < D.vertex_count(); ++v)
            M.vertex_image[v] =
                X.vertex_index(jm.at("vertices").at(D.vertex_id(v)).get<std::string>());
        M.edge_image.resize(D.edge_count());
        M.edge_forward.resize(D.edge_count());
        for (int e = 0; e < D.edge_count(); ++e) {
            const auto& rec = jm.at("edges").at(D.edge_id(e));
            M.edge_image[e] = X.edge_index(rec.at("edge").get<std::string>());
            M.edge_forward[e] = rec.at("forward").get<bool>();
        }
        // Cells: fill every face listed in "cells".
        std::set<std::vector<int>> cell_keys;
        for (const auto& jc : doc.at("cells")) {
            std::string first = jc.at("boundary")[0].get<std::string>();
            bool rev = !first.empty() && first[0] == '-';
            int e = eidx.at(rev ? first.substr(1) : first);
            int d = 2 * e + (rev ? 1 : 0);
            int f = D.face_of_dart(d);
            if (f == D.outer_face()) throw SchemaError("cell boundary names the outer face");
            D.fill_face(f, {});
        }
        M.D = std::move(D);
        M.pull_back_geometry();
        M.validate();
        return M;
    } catch (const json::exception& ex) {
        throw SchemaError(std::string("malformed diagram document: ") + ex.what());
    }
}

// ---------------------------------------------------------------------------
// Diagram over a disc-like subcomplex

DiagramMap diagram_from_subcomplex(const Complex2PE& X, const std::vector<int>& cells) {
    if (cells.empty()) throw BadParams("diagram_from_subcomplex: no cells");
    std::set<int> cellset(cells.begin(), cells.end());
    // Collect the edges and vertices used.
    std::map<int, int> edge_local, vertex_local;
    std::vector<int> edge_global, vertex_global;
    auto local_vertex = [&](int v) {
        auto it = vertex_local.find(v);
        if (it != vertex_local.end()) return it->second;
        int idx = static_cast<int>(vertex_global.size());
        vertex_local[v] = idx;
        vertex_global.push_back(v);
        return idx;
    };
    auto local_edge = [&](int e) {
        auto it = edge_local.find(e);
        if (it != edge_local.end()) return it->second;
        int idx = static_cast<int>(edge_global.size());
        edge_local[e] = idx;
        edge_global.push_back(e);
        local_vertex(X.edge(e).v0);
        local_vertex(X.edge(e).v1);
        return idx;
    };
    for (int c : cells)
        for (int s : X.cell(c).sides) local_edge(s);

    // Each edge bounds at most two cells of the subcomplex.
    std::map<int, std::vector<Complex2PE::CellRef>> at_edge;
    for (int e : edge_global) {
        for (const auto& ref : X.cells_at_edge(e))
            if (cellset.count(ref.cell)) at_edge[e].push_back(ref);
        if (at_edge[e].size() > 2)
            throw BadParams("subcomplex has an edge with more than two cells");
    }
    // Orient cells consistently: neighboring cells traverse shared edges in
    // opposite directions.
    std::map<int, int> orient; // cell -> +1 / -1
    std::vector<int> stack{cells.front()};
    orient[cells.front()] = 1;
    while (!stack.empty()) {
        int c = stack.back();
        stack.pop_back();
        const auto& cc = X.cell(c);
        for (int i = 0; i < cc.size(); ++i) {
            int e = cc.sides[i];
            for (const auto& ref : at_edge[e]) {
                if (ref.cell == c) continue;
                bool same_dir =
                    X.cell(ref.cell).side_forward[ref.index] == cc.side_forward[i];
                int want = same_dir ? -orient[c] : orient[c];
                auto it = orient.find(ref.cell);
                if (it == orient.end()) {
                    orient[ref.cell] = want;
                    stack.push_back(ref.cell);
                } else if (it->second != want) {
                    throw BadParams("subcomplex is not orientable as a diagram");
                }
            }
        }
    }
    if (orient.size() != cellset.size())
        throw BadParams("subcomplex is not connected through shared edges");

    // Darts: 2 per local edge; primary dart tail = image v0.
    std::vector<DiscDiagram::Dart> darts(2 * edge_global.size());
    for (size_t e = 0; e < edge_global.size(); ++e) {
        darts[2 * e].tail = vertex_local[X.edge(edge_global[e]).v0];
        darts[2 * e + 1].tail = vertex_local[X.edge(edge_global[e]).v1];
    }
    // Rotation from cell corners: for an oriented cell corner with incoming
    // dart a->v and outgoing dart v->b, set next(v->b) = twin(a->v) = v->a.
    auto dart_for = [&](int e_global, bool forward) {
        int le = edge_local[e_global];
        return forward ? 2 * le : 2 * le + 1;
    };
    std::map<int, int> sigma; // partial rotation
    for (int c : cells) {
        const auto& cc = X.cell(c);
        int n = cc.size();
        for (int i = 0; i < n; ++i) {
            // Walk the cell boundary in its orientation.
            int side_here = (orient[c] == 1) ? i : (n - 1 - i);
            int side_prev = (orient[c] == 1) ? (i + n - 1) % n : (n - i) % n;
            bool fwd_here = (orient[c] == 1) == cc.side_forward[side_here];
            bool fwd_prev = (orient[c] == 1) == cc.side_forward[side_prev];
            int out = dart_for(cc.sides[side_here], fwd_here);
            int in = dart_for(cc.sides[side_prev], fwd_prev);
            // Face rule (face_next = next of twin): next(twin(in)) = out.
            int tin = DiscDiagram::twin(in);
            if (sigma.count(tin)) throw BadParams("subcomplex corner structure conflicts");
            sigma[tin] = out;
        }
    }
    // Complete the rotation at boundary arcs: chain the free dart slots.
    // Group darts by tail; those not yet given a successor get the free
    // predecessors in canonical order.
    int dart_total = static_cast<int>(darts.size());
    std::vector<int> has_succ(dart_total, 0), has_pred(dart_total, 0);
    for (auto [a, b] : sigma) {
        has_succ[a] = 1;
        has_pred[b] = 1;
    }
    for (int v = 0; v < static_cast<int>(vertex_global.size()); ++v) {
        std::vector<int> no_succ, no_pred;
        for (int d = 0; d < dart_total; ++d) {
            if (darts[d].tail != v) continue;
            if (!has_succ[d]) no_succ.push_back(d);
            if (!has_pred[d]) no_pred.push_back(d);
        }
        if (no_succ.size() != no_pred.size())
            throw BadParams("subcomplex link structure is inconsistent");
        // Chain arc components: follow sigma from each predecessor-free dart
        // to its successor-free end, then connect ends cyclically.
        std::vector<std::pair<int, int>> arcs; // (start dart without pred, end dart without succ)
        for (int d : no_pred) {
            int x = d;
            while (has_succ[x]) x = sigma[x];
            arcs.emplace_back(d, x);
        }
        if (arcs.empty()) continue;
        for (size_t k = 0; k < arcs.size(); ++k) {
            sigma[arcs[k].second] = arcs[(k + 1) % arcs.size()].first;
            has_succ[arcs[k].second] = 1;
            has_pred[arcs[(k + 1) % arcs.size()].first] = 1;
        }
    }
    for (int d = 0; d < dart_total; ++d) darts[d].next = sigma.at(d);

    std::vector<std::string> vids, eids;
    for (int v : vertex_global) vids.push_back(X.vertex_id(v));
    for (int e : edge_global) eids.push_back(X.edge(e).id);
    DiscDiagram D(vids, eids, darts, -1);
    // Mark filled faces: those whose image cycle traverses a subcomplex cell.
    // With the rotation above, every face of length n matching an oriented
    // cell boundary is filled; the remaining faces are unfilled.
    DiagramMap M;
    M.target = &X;
    M.vertex_image = vertex_global;
    M.edge_image = edge_global;
    M.edge_forward.assign(edge_global.size(), true);
    // Identify filled faces: face cycles that came from cell corners.
    // A face is filled iff all its darts' sigma assignments came from cells;
    // equivalently its cycle matches some cell's oriented boundary.  Walk
    // cells and mark the face containing each oriented boundary.
    std::set<int> filled;
    for (int c : cells) {
        const auto& cc = X.cell(c);
        int side0 = (orient[c] == 1) ? 0 : cc.size() - 1;
        bool fwd0 = (orient[c] == 1) == cc.side_forward[side0];
        int d0 = dart_for(cc.sides[side0], fwd0);
        filled.insert(D.face_of_dart(d0));
    }
    if (static_cast<int>(filled.size()) != static_cast<int>(cellset.size()))
        throw BadParams("subcomplex does not embed as a diagram (face collision)");
    for (int f : filled) D.fill_face(f, {});
    // Outer face: the unfilled face with the longest cycle.
    int outer = -1;
    size_t best = 0;
    for (int f = 0; f < D.face_count(); ++f) {
        if (filled.count(f)) continue;
        if (D.face(f).cycle.size() >= best) {
            best = D.face(f).cycle.size();
            outer = f;
        }
    }
    if (outer < 0) throw BadParams("subcomplex closes into a sphere");
    D.set_outer(outer);
    M.D = std::move(D);
    M.pull_back_geometry();
    if (!M.D.is_disc()) throw BadParams("subcomplex is not a disc");
    M.validate();
    return M;
}

} // namespace cat0
