#include "cat0/complex.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>

namespace cat0 {

using nlohmann::json;

Complex2PE::Complex2PE(std::vector<std::string> vertex_ids, std::vector<Edge> edges,
                       std::vector<Cell> cells)
    : vertex_ids_(std::move(vertex_ids)), edges_(std::move(edges)), cells_(std::move(cells)) {
    for (int i = 0; i < vertex_count(); ++i) {
        if (!vertex_by_id_.emplace(vertex_ids_[i], i).second)
            throw SchemaError("duplicate vertex id: " + vertex_ids_[i]);
    }
    for (int i = 0; i < edge_count(); ++i) {
        if (!edge_by_id_.emplace(edges_[i].id, i).second)
            throw SchemaError("duplicate edge id: " + edges_[i].id);
    }
    for (int i = 0; i < cell_count(); ++i) {
        if (!cell_by_id_.emplace(cells_[i].id, i).second)
            throw SchemaError("duplicate cell id: " + cells_[i].id);
    }
    validate();
    build_incidence();
}

void Complex2PE::validate() const {
    for (const auto& e : edges_) {
        if (e.v0 < 0 || e.v0 >= vertex_count() || e.v1 < 0 || e.v1 >= vertex_count())
            throw SchemaError("edge " + e.id + " references unknown vertex");
        if (!(e.length > 0)) throw SchemaError("edge " + e.id + " must have positive length");
    }
    std::vector<char> edge_used(edge_count(), 0);
    for (const auto& c : cells_) {
        int n = c.size();
        if (n < 3) throw SchemaError("cell " + c.id + " has fewer than 3 corners");
        if (static_cast<int>(c.coords.size()) != n || static_cast<int>(c.sides.size()) != n ||
            static_cast<int>(c.side_forward.size()) != n)
            throw SchemaError("cell " + c.id + " has inconsistent corner/side lists");
        if (!convex_ccw(c.coords))
            throw ConvexityError("cell " + c.id + " corners are not in convex ccw position");
        for (int i = 0; i < n; ++i) {
            int j = (i + 1) % n;
            const Edge& e = edges_.at(c.sides[i]);
            int a = c.corners[i], b = c.corners[j];
            bool fwd = c.side_forward[i];
            int want0 = fwd ? e.v0 : e.v1;
            int want1 = fwd ? e.v1 : e.v0;
            if (a != want0 || b != want1)
                throw SchemaError("cell " + c.id + " side " + std::to_string(i) +
                                  " does not match edge " + e.id + " endpoints");
            double side_len = (c.coords[j] - c.coords[i]).norm();
            if (std::abs(side_len - e.length) > kMetricTol)
                throw MetricError("cell " + c.id + " side " + std::to_string(i) + " has length " +
                                  std::to_string(side_len) + " but edge " + e.id + " has length " +
                                  std::to_string(e.length));
            edge_used[c.sides[i]] = 1;
        }
    }
    for (int e = 0; e < edge_count(); ++e)
        if (!edge_used[e]) throw SchemaError("edge " + edges_[e].id + " is not used by any cell");
    // Connectivity over the 1-skeleton.
    if (vertex_count() > 0) {
        std::vector<int> parent(vertex_count());
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (const auto& e : edges_) parent[find(e.v0)] = find(e.v1);
        int root = find(0);
        for (int v = 1; v < vertex_count(); ++v)
            if (find(v) != root) throw SchemaError("complex is not connected");
    }
}

void Complex2PE::build_incidence() {
    edge_cells_.assign(edge_count(), {});
    vertex_corners_.assign(vertex_count(), {});
    vertex_edge_ends_.assign(vertex_count(), {});
    for (int e = 0; e < edge_count(); ++e) {
        vertex_edge_ends_[edges_[e].v0].emplace_back(e, 0);
        vertex_edge_ends_[edges_[e].v1].emplace_back(e, 1);
    }
    for (int ci = 0; ci < cell_count(); ++ci) {
        const Cell& c = cells_[ci];
        for (int i = 0; i < c.size(); ++i) {
            edge_cells_[c.sides[i]].push_back(CellRef{ci, i});
            vertex_corners_[c.corners[i]].push_back(CellRef{ci, i});
        }
    }
}

int Complex2PE::vertex_index(const std::string& id) const {
    auto it = vertex_by_id_.find(id);
    if (it == vertex_by_id_.end()) throw UnknownVertex("unknown vertex id: " + id);
    return it->second;
}

int Complex2PE::edge_index(const std::string& id) const {
    auto it = edge_by_id_.find(id);
    if (it == edge_by_id_.end()) throw UnknownId("unknown edge id: " + id);
    return it->second;
}

int Complex2PE::cell_index(const std::string& id) const {
    auto it = cell_by_id_.find(id);
    if (it == cell_by_id_.end()) throw UnknownId("unknown cell id: " + id);
    return it->second;
}

double Complex2PE::corner_angle(int c, int i) const {
    const Cell& cell = cells_[c];
    int n = cell.size();
    const Vec2& prev = cell.coords[(i + n - 1) % n];
    const Vec2& here = cell.coords[i];
    const Vec2& next = cell.coords[(i + 1) % n];
    return angle_at(prev, here, next);
}

Vec2 Complex2PE::edge_end_coord(int c, int side, int end) const {
    const Cell& cell = cells_[c];
    int n = cell.size();
    bool fwd = cell.side_forward[side];
    // side runs corner[side] -> corner[side+1]; forward means v0 at corner[side]
    bool at_start = (end == 0) == fwd;
    return at_start ? cell.coords[side] : cell.coords[(side + 1) % n];
}

Vec2 Complex2PE::edge_point_coord(int c, int side, double t) const {
    Vec2 p0 = edge_end_coord(c, side, 0);
    Vec2 p1 = edge_end_coord(c, side, 1);
    return p0 + t * (p1 - p0);
}

double Complex2PE::max_cell_diameter() const {
    double best = 0;
    for (const auto& c : cells_)
        for (size_t i = 0; i < c.coords.size(); ++i)
            for (size_t j = i + 1; j < c.coords.size(); ++j)
                best = std::max(best, (c.coords[i] - c.coords[j]).norm());
    return best;
}

// ---------------------------------------------------------------------------
// JSON I/O

Complex2PE Complex2PE::from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("edges") ||
        !doc.contains("cells"))
        throw SchemaError("complex document must contain vertices, edges and cells");
    std::vector<std::string> vids;
    try {
        vids = doc.at("vertices").get<std::vector<std::string>>();
    } catch (const json::exception&) {
        throw SchemaError("vertices must be a list of strings");
    }
    std::map<std::string, int> vidx;
    for (size_t i = 0; i < vids.size(); ++i) vidx[vids[i]] = static_cast<int>(i);

    std::vector<Edge> edges;
    std::map<std::string, int> eidx;
    try {
        for (const auto& je : doc.at("edges")) {
            Edge e;
            e.id = je.at("id").get<std::string>();
            auto v0 = je.at("v0").get<std::string>();
            auto v1 = je.at("v1").get<std::string>();
            if (!vidx.count(v0) || !vidx.count(v1))
                throw SchemaError("edge " + e.id + " references unknown vertex");
            e.v0 = vidx[v0];
            e.v1 = vidx[v1];
            e.length = je.at("length").get<double>();
            eidx[e.id] = static_cast<int>(edges.size());
            edges.push_back(e);
        }
    } catch (const json::exception& ex) {
        throw SchemaError(std::string("malformed edge record: ") + ex.what());
    }

    std::vector<Cell> cells;
    try {
        for (const auto& jc : doc.at("cells")) {
            Cell c;
            c.id = jc.at("id").get<std::string>();
            for (const auto& cid : jc.at("corners")) {
                auto v = cid.get<std::string>();
                if (!vidx.count(v)) throw SchemaError("cell " + c.id + " references unknown vertex");
                c.corners.push_back(vidx[v]);
            }
            for (const auto& co : jc.at("coords")) {
                if (!co.is_array() || co.size() != 2)
                    throw SchemaError("cell " + c.id + " coords entries must be [x, y]");
                c.coords.emplace_back(co[0].get<double>(), co[1].get<double>());
            }
            for (const auto& sid : jc.at("sides")) {
                auto s = sid.get<std::string>();
                if (!eidx.count(s)) throw SchemaError("cell " + c.id + " references unknown edge");
                c.sides.push_back(eidx[s]);
            }
            int n = static_cast<int>(c.corners.size());
            if (static_cast<int>(c.sides.size()) != n)
                throw SchemaError("cell " + c.id + " sides/corners mismatch");
            for (int i = 0; i < n; ++i) {
                const Edge& e = edges[c.sides[i]];
                int a = c.corners[i], b = c.corners[(i + 1) % n];
                if (e.v0 == a && e.v1 == b)
                    c.side_forward.push_back(true);
                else if (e.v1 == a && e.v0 == b)
                    c.side_forward.push_back(false);
                else
                    throw SchemaError("cell " + c.id + " side " + std::to_string(i) +
                                      " does not join its corners");
            }
            cells.push_back(std::move(c));
        }
    } catch (const json::exception& ex) {
        throw SchemaError(std::string("malformed cell record: ") + ex.what());
    }
    return Complex2PE(std::move(vids), std::move(edges), std::move(cells));
}

Complex2PE Complex2PE::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& ex) {
        throw SchemaError(std::string("invalid JSON: ") + ex.what());
    }
    return from_json(doc);
}

json Complex2PE::to_json() const {
    json doc;
    doc["vertices"] = vertex_ids_;
    json jedges = json::array();
    for (const auto& e : edges_) {
        jedges.push_back({{"id", e.id},
                          {"v0", vertex_ids_[e.v0]},
                          {"v1", vertex_ids_[e.v1]},
                          {"length", e.length}});
    }
    doc["edges"] = std::move(jedges);
    json jcells = json::array();
    for (const auto& c : cells_) {
        json jc;
        jc["id"] = c.id;
        json corners = json::array(), coords = json::array(), sides = json::array();
        for (int i = 0; i < c.size(); ++i) {
            corners.push_back(vertex_ids_[c.corners[i]]);
            coords.push_back({c.coords[i].x(), c.coords[i].y()});
            sides.push_back(edges_[c.sides[i]].id);
        }
        jc["corners"] = std::move(corners);
        jc["coords"] = std::move(coords);
        jc["sides"] = std::move(sides);
        jcells.push_back(std::move(jc));
    }
    doc["cells"] = std::move(jcells);
    return doc;
}

Complex2PE load_complex(const json& doc) { return Complex2PE::from_json(doc); }

// ---------------------------------------------------------------------------
// Locations

bool PointLocation::same_as(const PointLocation& o, double tol) const {
    if (kind != o.kind || index != o.index) return false;
    switch (kind) {
    case Kind::Vertex: return true;
    case Kind::Edge: return std::abs(t - o.t) <= tol;
    case Kind::Cell: return (xy - o.xy).norm() <= tol;
    }
    return false;
}

void validate_location(const Complex2PE& X, const PointLocation& p) {
    switch (p.kind) {
    case PointLocation::Kind::Vertex:
        if (p.index < 0 || p.index >= X.vertex_count()) throw UnknownVertex("bad vertex index");
        return;
    case PointLocation::Kind::Edge:
        if (p.index < 0 || p.index >= X.edge_count()) throw UnknownId("bad edge index");
        if (!(p.t > 0.0 && p.t < 1.0))
            throw BadParams("edge point parameter must be strictly inside (0,1)");
        return;
    case PointLocation::Kind::Cell: {
        if (p.index < 0 || p.index >= X.cell_count()) throw UnknownId("bad cell index");
        const auto& poly = X.cell(p.index).coords;
        if (point_to_convex_polygon(p.xy, poly) > kMetricTol)
            throw BadParams("cell point lies outside its cell");
        return;
    }
    }
}

Vec2 locate_in_cell(const Complex2PE& X, const PointLocation& p, int cell) {
    const auto& c = X.cell(cell);
    switch (p.kind) {
    case PointLocation::Kind::Vertex:
        for (int i = 0; i < c.size(); ++i)
            if (c.corners[i] == p.index) return c.coords[i];
        throw BadParams("vertex is not a corner of the requested cell");
    case PointLocation::Kind::Edge:
        for (int i = 0; i < c.size(); ++i)
            if (c.sides[i] == p.index) return X.edge_point_coord(cell, i, p.t);
        throw BadParams("edge is not a side of the requested cell");
    case PointLocation::Kind::Cell:
        if (p.index != cell) throw BadParams("point lies in a different cell");
        return p.xy;
    }
    throw BadParams("bad location");
}

// ---------------------------------------------------------------------------
// Paths

double path_length(const PLPath& path) {
    double s = 0;
    for (const auto& seg : path.segments) s += seg.length();
    return s;
}

std::vector<double> PLPath::breakpoint_params() const {
    std::vector<double> ps(points.size(), 0.0);
    for (size_t i = 0; i < segments.size(); ++i) ps[i + 1] = ps[i] + segments[i].length();
    return ps;
}

PLPath PLPath::reversed() const {
    PLPath r;
    r.points.assign(points.rbegin(), points.rend());
    for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
        Segment s = *it;
        std::swap(s.a, s.b);
        r.segments.push_back(s);
    }
    return r;
}

PointLocation path_point_at(const Complex2PE& X, const PLPath& path, double s) {
    if (path.points.empty()) throw BadParams("empty path");
    if (path.segments.empty()) return path.points.front();
    double acc = 0;
    for (size_t i = 0; i < path.segments.size(); ++i) {
        const auto& seg = path.segments[i];
        double len = seg.length();
        if (s <= acc + len || i + 1 == path.segments.size()) {
            double local = len < 1e-300 ? 0.0 : std::clamp((s - acc) / len, 0.0, 1.0);
            if (local <= 0.0) return path.points[i];
            if (local >= 1.0) return path.points[i + 1];
            if (seg.along_edge >= 0) {
                // Interpolate the edge parameter between the endpoint params.
                auto param_of = [&](const PointLocation& p, const Vec2&) -> double {
                    if (p.kind == PointLocation::Kind::Edge) return p.t;
                    const auto& e = X.edge(seg.along_edge);
                    return (p.kind == PointLocation::Kind::Vertex && p.index == e.v0) ? 0.0 : 1.0;
                };
                double t0 = param_of(path.points[i], seg.a);
                double t1 = param_of(path.points[i + 1], seg.b);
                double t = t0 + local * (t1 - t0);
                if (t <= kMetricTol) return PointLocation::vertex(X.edge(seg.along_edge).v0);
                if (t >= 1 - kMetricTol) return PointLocation::vertex(X.edge(seg.along_edge).v1);
                return PointLocation::on_edge(seg.along_edge, t);
            }
            Vec2 xy = seg.a + local * (seg.b - seg.a);
            // Snap to the boundary: in-cell locations must be strictly
            // interior, and segment interiors can graze a side.
            const auto& cell = X.cell(seg.cell);
            int n = cell.size();
            for (int si = 0; si < n; ++si) {
                Vec2 a = cell.coords[si], b = cell.coords[(si + 1) % n];
                if (point_to_segment(xy, a, b) > 1e-9) continue;
                if ((xy - a).norm() <= 1e-9) return PointLocation::vertex(cell.corners[si]);
                if ((xy - b).norm() <= 1e-9)
                    return PointLocation::vertex(cell.corners[(si + 1) % n]);
                Vec2 p0 = X.edge_end_coord(seg.cell, si, 0);
                Vec2 p1 = X.edge_end_coord(seg.cell, si, 1);
                double t = (xy - p0).dot(p1 - p0) / (p1 - p0).squaredNorm();
                return PointLocation::on_edge(cell.sides[si], std::clamp(t, 1e-9, 1 - 1e-9));
            }
            return PointLocation::in_cell(seg.cell, xy);
        }
        acc += len;
    }
    return path.points.back();
}

PLPath subpath(const Complex2PE& X, const PLPath& path, double s0, double s1) {
    double len = path_length(path);
    s0 = std::clamp(s0, 0.0, len);
    s1 = std::clamp(s1, s0, len);
    PLPath out;
    out.points.push_back(path_point_at(X, path, s0));
    double acc = 0;
    for (size_t i = 0; i < path.segments.size(); ++i) {
        const auto& seg = path.segments[i];
        double l = seg.length();
        double a = std::max(s0, acc), b = std::min(s1, acc + l);
        if (b - a > 1e-12) {
            PLPath::Segment piece = seg;
            double ta = (a - acc) / l, tb = (b - acc) / l;
            piece.a = seg.a + ta * (seg.b - seg.a);
            piece.b = seg.a + tb * (seg.b - seg.a);
            out.segments.push_back(piece);
            out.points.push_back(b < acc + l - 1e-12 ? path_point_at(X, path, b)
                                                     : path.points[i + 1]);
        }
        acc += l;
        if (acc >= s1) break;
    }
    if (out.segments.empty()) out.points = {path_point_at(X, path, s0)};
    return out;
}

PLPath concat_paths(const PLPath& a, const PLPath& b) {
    if (a.points.empty()) return b;
    if (b.points.empty()) return a;
    PLPath out = a;
    out.points.insert(out.points.end(), b.points.begin() + 1, b.points.end());
    out.segments.insert(out.segments.end(), b.segments.begin(), b.segments.end());
    return out;
}

// ---------------------------------------------------------------------------
// Links and direction spaces

MetricGraph vertex_link(const Complex2PE& X, int v) {
    if (v < 0 || v >= X.vertex_count()) throw UnknownVertex("vertex_link: bad vertex index");
    MetricGraph g;
    const auto& ends = X.edge_ends_at_vertex(v);
    std::map<std::pair<int, int>, int> node_of;
    for (auto [e, end] : ends) {
        int n = g.add_node(X.edge(e).id + (end == 0 ? ":0" : ":1"));
        node_of[{e, end}] = n;
    }
    for (const auto& ref : X.corners_at_vertex(v)) {
        const auto& c = X.cell(ref.cell);
        int n = c.size();
        int i = ref.index;
        // Outgoing side i and incoming side i-1 at corner i.
        int e_out = c.sides[i];
        int end_out = c.side_forward[i] ? 0 : 1;
        int prev = (i + n - 1) % n;
        int e_in = c.sides[prev];
        int end_in = c.side_forward[prev] ? 1 : 0;
        g.add_arc(node_of.at({e_out, end_out}), node_of.at({e_in, end_in}),
                  X.corner_angle(ref.cell, i), c.id + "#" + std::to_string(i));
    }
    return g;
}

MetricGraph vertex_link(const Complex2PE& X, const std::string& vertex_id) {
    return vertex_link(X, X.vertex_index(vertex_id));
}

DirectionSpace direction_space(const Complex2PE& X, const PointLocation& p) {
    DirectionSpace ds;
    ds.at = p;
    switch (p.kind) {
    case PointLocation::Kind::Vertex:
        ds.graph = vertex_link(X, p.index);
        return ds;
    case PointLocation::Kind::Edge: {
        ds.graph.add_node("pole+");
        ds.graph.add_node("pole-");
        for (const auto& ref : X.cells_at_edge(p.index))
            ds.graph.add_arc(0, 1, kPi, X.cell(ref.cell).id);
        return ds;
    }
    case PointLocation::Kind::Cell: {
        ds.graph.add_node("0");
        ds.graph.add_node("pi");
        ds.graph.add_arc(0, 1, kPi, "upper");
        ds.graph.add_arc(1, 0, kPi, "lower");
        return ds;
    }
    }
    throw BadParams("bad location");
}

MetricGraph direction_space_at(const Complex2PE& X, const PointLocation& p) {
    validate_location(X, p);
    return direction_space(X, p).graph;
}

GraphPoint direction_toward(const Complex2PE& X, const DirectionSpace& ds, int cell,
                            const Vec2& from, const Vec2& toward) {
    Vec2 dir = toward - from;
    if (dir.norm() < 1e-300) throw DegenerateInput("direction_toward: zero direction");
    switch (ds.at.kind) {
    case PointLocation::Kind::Cell: {
        double phi = std::atan2(dir.y(), dir.x());
        if (phi < 0) phi += kTwoPi;
        if (phi <= kPi) return GraphPoint::on_arc(0, phi);
        return GraphPoint::on_arc(1, phi - kPi);
    }
    case PointLocation::Kind::Edge: {
        const auto& refs = X.cells_at_edge(ds.at.index);
        for (size_t k = 0; k < refs.size(); ++k) {
            if (refs[k].cell != cell) continue;
            Vec2 fwd = X.edge_end_coord(cell, refs[k].index, 1) -
                       X.edge_end_coord(cell, refs[k].index, 0);
            double theta = angle_between(fwd, dir);
            if (theta <= kMetricTol) return GraphPoint::at_node(0);
            if (theta >= kPi - kMetricTol) return GraphPoint::at_node(1);
            return GraphPoint::on_arc(static_cast<int>(k), theta);
        }
        throw BadParams("direction_toward: cell is not incident to the edge");
    }
    case PointLocation::Kind::Vertex: {
        int v = ds.at.index;
        const auto& corners = X.corners_at_vertex(v);
        const auto& ends = X.edge_ends_at_vertex(v);
        for (size_t k = 0; k < corners.size(); ++k) {
            if (corners[k].cell != cell) continue;
            const auto& c = X.cell(cell);
            int i = corners[k].index;
            if ((c.coords[i] - from).norm() > 1e-7) continue; // repeated vertex in this cell
            int n = c.size();
            Vec2 ray_out = c.coords[(i + 1) % n] - c.coords[i];
            Vec2 ray_in = c.coords[(i + n - 1) % n] - c.coords[i];
            double beta = angle_between(ray_out, dir);
            double total = X.corner_angle(cell, i);
            double beta2 = angle_between(ray_in, dir);
            // The direction must lie inside the corner wedge.
            if (beta > total + 1e-7 || beta2 > total + 1e-7) continue;
            if (beta <= kMetricTol) {
                int e = c.sides[i];
                int end = c.side_forward[i] ? 0 : 1;
                for (size_t m = 0; m < ends.size(); ++m)
                    if (ends[m] == std::make_pair(e, end)) return GraphPoint::at_node((int)m);
            }
            if (beta >= total - kMetricTol) {
                int prev = (i + n - 1) % n;
                int e = c.sides[prev];
                int end = c.side_forward[prev] ? 1 : 0;
                for (size_t m = 0; m < ends.size(); ++m)
                    if (ends[m] == std::make_pair(e, end)) return GraphPoint::at_node((int)m);
            }
            return GraphPoint::on_arc(static_cast<int>(k), std::min(beta, total));
        }
        throw BadParams("direction_toward: direction not found in any corner of the cell at the vertex");
    }
    }
    throw BadParams("bad location");
}

GraphPoint direction_along_edge(const Complex2PE& X, const DirectionSpace& ds, int e,
                                bool forward) {
    switch (ds.at.kind) {
    case PointLocation::Kind::Edge:
        if (ds.at.index != e) throw BadParams("direction_along_edge: point not on that edge");
        return GraphPoint::at_node(forward ? 0 : 1);
    case PointLocation::Kind::Vertex: {
        const auto& ends = X.edge_ends_at_vertex(ds.at.index);
        int end = forward ? 0 : 1;
        for (size_t m = 0; m < ends.size(); ++m)
            if (ends[m] == std::make_pair(e, end)) return GraphPoint::at_node((int)m);
        throw BadParams("direction_along_edge: edge end not at this vertex");
    }
    case PointLocation::Kind::Cell:
        throw BadParams("direction_along_edge: point lies inside a cell");
    }
    throw BadParams("bad location");
}


int side_of(const Complex2PE& X, int cell, int edge) {
    const auto& c = X.cell(cell);
    for (int s = 0; s < c.size(); ++s)
        if (c.sides[s] == edge) return s;
    return -1;
}

Vec2 cell_centroid(const Complex2PE& X, int cell) {
    Vec2 s = Vec2::Zero();
    for (const auto& p : X.cell(cell).coords) s += p;
    return s / X.cell(cell).coords.size();
}

Iso2 unfold_across(const Complex2PE& X, int prev_cell, int next_cell, int edge) {
    int sp = side_of(X, prev_cell, edge);
    int sn = side_of(X, next_cell, edge);
    if (sp < 0 || sn < 0) throw Error("unfold_across: edge is not a side of both cells");
    Vec2 a0 = X.edge_end_coord(next_cell, sn, 0), a1 = X.edge_end_coord(next_cell, sn, 1);
    Vec2 b0 = X.edge_end_coord(prev_cell, sp, 0), b1 = X.edge_end_coord(prev_cell, sp, 1);
    for (bool reflect : {false, true}) {
        Iso2 m = Iso2::matching_segment(a0, a1, b0, b1, reflect);
        Vec2 cn = m(cell_centroid(X, next_cell));
        Vec2 cp = cell_centroid(X, prev_cell);
        double side_n = cross2(b1 - b0, cn - b0);
        double side_p = cross2(b1 - b0, cp - b0);
        if (side_n * side_p < 0) return m;
    }
    return Iso2::matching_segment(a0, a1, b0, b1, true);
}

} // namespace cat0
