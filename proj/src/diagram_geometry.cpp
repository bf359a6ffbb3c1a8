#include "cat0/diagram_geometry.hpp"

#include "cat0/diagram_build.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>

namespace cat0 {

namespace {

/// Dart path as locations along the 1-skeleton of the diagram-as-complex.
std::vector<PointLocation> dart_path_samples(const DiagramMap& M, const Complex2PE& Y,
                                             const std::vector<int>& darts, double spacing) {
    std::vector<PointLocation> out;
    if (darts.empty()) return out;
    out.push_back(PointLocation::vertex(M.D.tail(darts.front())));
    for (int d : darts) {
        int e = M.D.edge_of(d);
        double len = Y.edge(e).length;
        int k = std::max(1, static_cast<int>(std::ceil(len / spacing)));
        for (int i = 1; i < k; ++i) {
            double t = static_cast<double>(i) / k;
            out.push_back(PointLocation::on_edge(e, d % 2 == 0 ? t : 1.0 - t));
        }
        out.push_back(PointLocation::vertex(M.D.head(d)));
    }
    return out;
}

} // namespace

RuffleVerdict is_ruffled(const DiagramMap& M, const std::vector<int>& alpha_darts,
                         const RuffleParams& params, bool count_beta, double h) {
    if (params.R <= 0 || params.theta <= 0) throw BadParams("ruffle parameters must be positive");
    const DiscDiagram& D = M.D;
    // alpha must be a subpath of a boundary cycle.
    for (int d : alpha_darts) {
        int f = D.face_of_dart(d);
        if (D.face(f).filled) throw ArcNotOnBoundary("arc dart borders a filled face");
    }
    for (size_t i = 0; i + 1 < alpha_darts.size(); ++i)
        if (D.head(alpha_darts[i]) != D.tail(alpha_darts[i + 1]))
            throw ArcNotOnBoundary("arc darts do not concatenate");

    Complex2PE Y = M.as_complex();
    GeodesicEngine E(Y);

    // Negative-curvature sources: vertices with kappa <= -theta (+slack).
    std::vector<PointLocation> neg;
    for (int v = 0; v < D.vertex_count(); ++v)
        if (vertex_curvature(D, v) <= -params.theta + 1e-9) neg.push_back(PointLocation::vertex(v));
    // Other-boundary sources: darts of unfilled faces not on alpha
    // (optionally excluding the rest of alpha's own cycle).
    std::set<int> alpha_set(alpha_darts.begin(), alpha_darts.end());
    int alpha_face = alpha_darts.empty() ? -1 : D.face_of_dart(alpha_darts.front());
    std::vector<PointLocation> other;
    for (int f = 0; f < D.face_count(); ++f) {
        if (D.face(f).filled) continue;
        if (f == alpha_face && !count_beta) {
            // Only darts outside alpha's own cycle count.
            continue;
        }
        for (int d : D.face(f).cycle) {
            if (alpha_set.count(d)) continue;
            if (f == alpha_face && !count_beta) continue;
            int e = D.edge_of(d);
            other.push_back(PointLocation::on_edge(e, 0.5));
            other.push_back(PointLocation::vertex(D.tail(d)));
            other.push_back(PointLocation::vertex(D.head(d)));
            // denser sampling along long boundary edges
            double len = Y.edge(e).length;
            int k = std::max(1, static_cast<int>(std::ceil(len / (params.R / 4))));
            for (int i = 1; i < k; ++i)
                other.push_back(PointLocation::on_edge(e, static_cast<double>(i) / k));
        }
    }
    DistanceField fneg = neg.empty() ? DistanceField{} : E.distance_field(neg, h);
    DistanceField foth = other.empty() ? DistanceField{} : E.distance_field(other, h);

    auto samples = dart_path_samples(M, Y, alpha_darts, params.R / 4);
    for (const auto& s : samples) {
        bool ok = false;
        if (!neg.empty() && E.field_at(fneg, s) <= params.R - 1e-9) ok = true;
        if (!ok && !other.empty() && E.field_at(foth, s) <= params.R - 1e-9) ok = true;
        if (!ok) return RuffleVerdict{false, s};
    }
    return RuffleVerdict{true, {}};
}

// ---------------------------------------------------------------------------
// Preflats

std::vector<Preflat> extract_preflats(const DiagramMap& M, const FlatDisc& F) {
    const DiscDiagram& D = M.D;
    std::set<int> flat_cells(F.cells.begin(), F.cells.end());
    std::vector<int> pre; // filled faces mapping into F
    for (int f = 0; f < D.face_count(); ++f)
        if (D.face(f).filled && flat_cells.count(M.cell_images[f].cell)) pre.push_back(f);
    std::set<int> pre_set(pre.begin(), pre.end());

    // Components through edges interior to the union: every filled face at
    // the edge lies in the preimage.
    auto edge_interior = [&](int e) {
        bool any = false;
        for (int d : {2 * e, 2 * e + 1}) {
            int f = D.face_of_dart(d);
            if (!D.face(f).filled) continue;
            if (!pre_set.count(f)) return false;
            any = true;
        }
        return any;
    };
    std::map<int, int> comp;
    int ncomp = 0;
    for (int f : pre) {
        if (comp.count(f)) continue;
        int id = ncomp++;
        std::vector<int> stack{f};
        comp[f] = id;
        while (!stack.empty()) {
            int g = stack.back();
            stack.pop_back();
            for (int d : D.face(g).cycle) {
                int e = D.edge_of(d);
                if (!edge_interior(e)) continue;
                int g2 = D.face_of_dart(DiscDiagram::twin(d));
                if (D.face(g2).filled && pre_set.count(g2) && !comp.count(g2)) {
                    comp[g2] = id;
                    stack.push_back(g2);
                }
            }
        }
    }
    std::vector<Preflat> out(ncomp);
    for (auto [f, id] : comp) out[id].cells.push_back(f);
    // Boundary walk per component.
    for (auto& P : out) {
        std::set<int> cells(P.cells.begin(), P.cells.end());
        int start = -1;
        for (int f : P.cells)
            for (int d : D.face(f).cycle)
                if (!cells.count(D.face_of_dart(DiscDiagram::twin(d)))) {
                    start = d;
                    break;
                }
        if (start < 0) continue; // closed component (cannot happen in a disc)
        auto next_bd = [&](int d) {
            int x = D.next(DiscDiagram::twin(d));
            for (int guard = 0; guard < 1000; ++guard) {
                if (cells.count(D.face_of_dart(x)) &&
                    !cells.count(D.face_of_dart(DiscDiagram::twin(x))))
                    return x;
                x = D.next(DiscDiagram::twin(x));
            }
            throw InvariantBreach("preflat boundary walk failed");
        };
        int d = start;
        int guard = 0;
        do {
            P.boundary.push_back(d);
            d = next_bd(d);
        } while (d != start && guard++ < 100000);
        // convexity: exterior corners at least pi
        double mec = min_exterior_corner(M, cells);
        if (mec < kPi - 1e-9)
            throw InvariantBreach("preflat is not convex (exterior corner " +
                                  std::to_string(mec) + ")");
    }
    return out;
}

double min_exterior_corner(const DiagramMap& M, const std::set<int>& cells) {
    const DiscDiagram& D = M.D;
    double best = kInf;
    std::set<int> verts;
    for (int f : cells)
        for (int d : D.face(f).cycle) verts.insert(D.tail(d));
    for (int v : verts) {
        // Wedges in rotation order: wedge after dart x is the face left of
        // twin(x), spanning to sigma(x).
        auto at = D.darts_at_vertex(v);
        if (at.empty()) continue;
        // rotation cycle at v
        std::vector<int> rot;
        int x0 = at.front();
        int x = x0;
        do {
            rot.push_back(x);
            x = D.next(x);
        } while (x != x0);
        int n = static_cast<int>(rot.size());
        auto wedge_face = [&](int i) { return D.face_of_dart(DiscDiagram::twin(rot[i])); };
        auto wedge_angle = [&](int i) {
            int f = wedge_face(i);
            if (!D.face(f).filled) return -1.0; // boundary gap
            const auto& cyc = D.face(f).cycle;
            // the corner of f at v between twin(rot[i]) and sigma(rot[i])
            for (size_t k = 0; k < cyc.size(); ++k)
                if (cyc[k] == D.next(rot[i])) return D.corner_angle(f, static_cast<int>(k));
            throw InvariantBreach("corner lookup failed");
        };
        // classify wedges: member / exterior-filled / gap
        std::vector<int> kind(n); // 0 member, 1 filled outside, 2 gap
        std::vector<double> ang(n, 0.0);
        bool has_member = false;
        for (int i = 0; i < n; ++i) {
            int f = wedge_face(i);
            if (!D.face(f).filled) {
                kind[i] = 2;
            } else {
                ang[i] = wedge_angle(i);
                kind[i] = cells.count(f) ? 0 : 1;
                if (kind[i] == 0) has_member = true;
            }
        }
        if (!has_member) continue;
        // maximal runs of kind-1 wedges flanked by kind-0 wedges
        for (int i = 0; i < n; ++i) {
            if (kind[i] != 0) continue;
            // walk forward from the wedge after i
            double run = 0;
            bool pure = true;
            for (int j = 1; j <= n; ++j) {
                int w = (i + j) % n;
                if (kind[w] == 0) {
                    if (j > 1 && pure) best = std::min(best, run);
                    break;
                }
                if (kind[w] == 2) {
                    pure = false;
                    break;
                }
                run += ang[w];
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Subdiagram hulls

void Subdiagram::absorb_closure(const DiscDiagram& D) {
    for (int f : this->cells)
        for (int d : D.face(f).cycle) this->edges.insert(D.edge_of(d));
    for (int e : this->edges) {
        this->vertices.insert(D.tail(2 * e));
        this->vertices.insert(D.head(2 * e));
    }
}

namespace {

std::vector<std::set<int>> subdiagram_components(const DiscDiagram& D, const Subdiagram& S) {
    // union-find over vertices through S's edges
    std::map<int, int> parent;
    std::function<int(int)> find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (int v : S.vertices) parent[v] = v;
    for (int e : S.edges) {
        int a = find(D.tail(2 * e)), b = find(D.head(2 * e));
        parent[a] = b;
    }
    std::map<int, std::set<int>> groups;
    for (int v : S.vertices) groups[find(v)].insert(v);
    std::vector<std::set<int>> out;
    for (auto& [r, g] : groups) out.push_back(std::move(g));
    return out;
}

} // namespace

Subdiagram diagram_convex_hull(const DiagramMap& M, Subdiagram S, double h) {
    const DiscDiagram& D = M.D;
    for (int v = 0; v < D.vertex_count(); ++v)
        if (D.link_euler_characteristic(v) == 0 && vertex_curvature(D, v) > 1e-9)
            throw NotNPC("diagram has positive interior curvature");
    Complex2PE Y = M.as_complex();
    GeodesicEngine E(Y);
    S.absorb_closure(D);
    for (int round = 0; round < 1000; ++round) {
        bool changed = false;
        // 1. connect components with geodesics
        auto comps = subdiagram_components(D, S);
        if (comps.size() > 1) {
            int a = *comps[0].begin(), b = *comps[1].begin();
            auto r = E.geodesic_between(PointLocation::vertex(a), PointLocation::vertex(b), h);
            for (const auto& seg : r.path.segments) {
                if (seg.along_edge >= 0)
                    S.edges.insert(seg.along_edge);
                else
                    S.cells.insert(seg.cell);
            }
            S.absorb_closure(D);
            changed = true;
        }
        // 2. exterior corner closure
        for (int v : std::vector<int>(S.vertices.begin(), S.vertices.end())) {
            auto at = D.darts_at_vertex(v);
            if (at.empty()) continue;
            std::vector<int> rot;
            int x0 = at.front();
            int x = x0;
            do {
                rot.push_back(x);
                x = D.next(x);
            } while (x != x0);
            int n = static_cast<int>(rot.size());
            auto is_s_dart = [&](int d) { return S.edges.count(D.edge_of(d)) > 0; };
            auto wedge_face = [&](int i) {
                return D.face_of_dart(DiscDiagram::twin(rot[i]));
            };
            auto wedge_angle = [&](int i) {
                int f = wedge_face(i);
                const auto& cyc = D.face(f).cycle;
                for (size_t k = 0; k < cyc.size(); ++k)
                    if (cyc[k] == D.next(rot[i])) return D.corner_angle(f, static_cast<int>(k));
                throw InvariantBreach("corner lookup failed");
            };
            // runs of wedges between consecutive S-darts
            std::vector<int> anchors;
            for (int i = 0; i < n; ++i)
                if (is_s_dart(rot[i])) anchors.push_back(i);
            if (anchors.size() < 2) continue;
            for (size_t ai = 0; ai < anchors.size(); ++ai) {
                int i = anchors[ai];
                int j = anchors[(ai + 1) % anchors.size()];
                // wedges strictly between the darts rot[i] and rot[j]
                double run = 0;
                bool pure = true;
                std::vector<int> faces;
                for (int w = i; (w % n) != j; ++w) {
                    int idx = w % n;
                    int f = wedge_face(idx);
                    if (!D.face(f).filled) {
                        pure = false;
                        break;
                    }
                    run += wedge_angle(idx);
                    faces.push_back(f);
                }
                if (!pure) continue;
                bool all_in = true;
                for (int f : faces)
                    if (!S.cells.count(f)) all_in = false;
                if (all_in) continue;
                if (run < kPi - 1e-9) {
                    for (int f : faces) S.cells.insert(f);
                    S.absorb_closure(D);
                    changed = true;
                }
            }
        }
        if (!changed) return S;
    }
    throw InvariantBreach("convex hull closure did not terminate");
}

std::vector<int> subdiagram_boundary_walk(const DiagramMap& M, const Subdiagram& S, int start) {
    const DiscDiagram& D = M.D;
    auto s_dart = [&](int d) { return S.edges.count(D.edge_of(d)) > 0; };
    auto interior_edge = [&](int e) {
        int f0 = D.face_of_dart(2 * e), f1 = D.face_of_dart(2 * e + 1);
        return D.face(f0).filled && D.face(f1).filled && S.cells.count(f0) && S.cells.count(f1);
    };
    if (!s_dart(start) || interior_edge(D.edge_of(start)))
        throw BadParams("boundary walk must start on a boundary dart of the subdiagram");
    auto next_bd = [&](int d) {
        int x = DiscDiagram::twin(d);
        for (int guard = 0; guard < 10000; ++guard) {
            x = D.next(x);
            if (s_dart(x) && !interior_edge(D.edge_of(x))) return x;
        }
        throw InvariantBreach("subdiagram boundary walk failed");
    };
    std::vector<int> out;
    int d = start;
    int guard = 0;
    do {
        out.push_back(d);
        d = next_bd(d);
    } while (d != start && guard++ < 100000);
    return out;
}

// ---------------------------------------------------------------------------
// Flat closure

FlatClosureResult flat_closure(const DiagramMap& M, const std::vector<int>& gamma_darts,
                               const std::vector<FlatDisc>& flats, double R, double h) {
    const DiscDiagram& D = M.D;
    if (find_cancelable_pair(M))
        throw NotReduced("flat_closure requires a reduced diagram");
    Complex2PE Y = M.as_complex();
    GeodesicEngine E(Y);
    auto gamma_samples = dart_path_samples(M, Y, gamma_darts, 0.5);
    DistanceField fg = E.distance_field(gamma_samples, h);

    FlatClosureResult res;
    Subdiagram S;
    for (int d : gamma_darts) S.edges.insert(D.edge_of(d));
    for (const auto& F : flats) {
        for (auto& P : extract_preflats(M, F)) {
            double dist = kInf;
            for (int f : P.cells)
                for (int d : D.face(f).cycle)
                    dist = std::min(dist, E.field_at(fg, PointLocation::vertex(D.tail(d))));
            if (dist <= R + 1e-9) {
                for (int f : P.cells) S.cells.insert(f);
                res.used_preflats.push_back(std::move(P));
            }
        }
    }
    S.absorb_closure(D);
    res.d_gamma = diagram_convex_hull(M, S, h);

    if (res.used_preflats.empty()) {
        res.beta = gamma_darts;
        for (int f = 0; f < D.face_count(); ++f)
            if (D.face(f).filled) res.d_alpha_cells.push_back(f);
        return res;
    }
    // beta: boundary walk of the hull from gamma's start, on the far side.
    // gamma darts lie on the hull boundary; walk the cycle containing the
    // reversed gamma and take the complementary arc.
    int g_first = gamma_darts.front();
    auto cycle = subdiagram_boundary_walk(M, res.d_gamma, DiscDiagram::twin(gamma_darts.back()));
    // find the run of reversed-gamma darts; beta = the rest, reversed so it
    // runs from tail(gamma) to head(gamma).
    std::set<int> gset;
    for (int d : gamma_darts) gset.insert(DiscDiagram::twin(d));
    std::vector<int> rest;
    for (int d : cycle)
        if (!gset.count(d)) rest.push_back(d);
    // Orient beta to run with gamma, from tail(gamma_first) to
    // head(gamma_last).
    std::vector<int> beta = rest;
    if (!beta.empty() && D.tail(beta.front()) != D.tail(gamma_darts.front())) {
        beta.clear();
        for (auto it = rest.rbegin(); it != rest.rend(); ++it)
            beta.push_back(DiscDiagram::twin(*it));
    }
    if (!beta.empty() && (D.tail(beta.front()) != D.tail(gamma_darts.front()) ||
                          D.head(beta.back()) != D.head(gamma_darts.back())))
        throw InvariantBreach("flat closure: beta endpoints do not match gamma");
    res.beta = beta;
    std::set<int> hull_cells = res.d_gamma.cells;
    for (int f = 0; f < D.face_count(); ++f)
        if (D.face(f).filled && !hull_cells.count(f)) res.d_alpha_cells.push_back(f);
    (void)g_first;
    return res;
}

} // namespace cat0
