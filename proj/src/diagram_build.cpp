#include "cat0/diagram_build.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace cat0 {

std::vector<TargetDart> loop_from_vertices(const Complex2PE& X,
                                           const std::vector<std::string>& vertex_ids) {
    if (vertex_ids.size() < 2) throw NotClosed("loop needs at least two vertices");
    std::vector<int> vs;
    for (const auto& id : vertex_ids) vs.push_back(X.vertex_index(id));
    if (vs.front() != vs.back()) throw NotClosed("vertex walk does not close up");
    std::vector<TargetDart> out;
    for (size_t i = 0; i + 1 < vs.size(); ++i) {
        int a = vs[i], b = vs[i + 1];
        bool found = false;
        for (auto [e, end] : X.edge_ends_at_vertex(a)) {
            const auto& ed = X.edge(e);
            if (end == 0 && ed.v1 == b) {
                out.push_back(TargetDart{e, true});
                found = true;
                break;
            }
            if (end == 1 && ed.v0 == b) {
                out.push_back(TargetDart{e, false});
                found = true;
                break;
            }
        }
        if (!found)
            throw NotClosed("no edge joins " + vertex_ids[i] + " and " + vertex_ids[i + 1]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Mutable diagram guts

struct DiagramAssembler::Impl {
    const Complex2PE* X = nullptr;
    struct MDart {
        int twin = -1, next = -1, tail = -1;
        TargetDart target;
        bool alive = true;
        bool outer = false; // borders the outer face on its left
    };
    std::vector<MDart> darts;
    std::vector<int> vertex_target; // per diagram vertex
    std::vector<char> vertex_alive;
    std::vector<int> word;               // darts of the unfilled inner face
    std::vector<std::vector<int>> cells; // dart cycles of filled cells
    int zips_done = 0;

    int new_vertex(int tv) {
        vertex_target.push_back(tv);
        vertex_alive.push_back(1);
        return static_cast<int>(vertex_target.size()) - 1;
    }

    int new_dart_pair(int ta, int tb, const TargetDart& td) {
        MDart d1, d2;
        d1.tail = ta;
        d2.tail = tb;
        d1.target = td;
        d2.target = td.reversed();
        int i = static_cast<int>(darts.size());
        d1.twin = i + 1;
        d2.twin = i;
        darts.push_back(d1);
        darts.push_back(d2);
        return i;
    }

    int sigma_pred(int d) const {
        for (int x = 0; x < static_cast<int>(darts.size()); ++x)
            if (darts[x].alive && darts[x].next == d) return x;
        throw InvariantBreach("rotation predecessor not found");
    }

    void retarget_tail(int from_v, int to_v) {
        for (auto& d : darts)
            if (d.alive && d.tail == from_v) d.tail = to_v;
        vertex_alive[from_v] = 0;
    }

    bool can_zip_darts(int b1, int b2) const {
        if (!darts[b1].alive || !darts[b2].alive) return false;
        if (darts[b1].twin == b2 || b1 == b2) return false; // a dart and its own twin
        if (!(darts[b2].target == darts[b1].target.reversed())) return false;
        int u = darts[b1].tail;
        int v = darts[b2].tail;
        int w = darts[darts[b2].twin].tail;
        if (u == v || w == v) return false; // no loop edges
        return true;
    }

    // Glues edge(b1) onto edge(b2): the two darts bordering the shared
    // unfilled face die and their twins become the two sides of the merged
    // edge.  Requires next(twin(b1)) == b2 (face adjacency) and
    // can_zip_darts.
    void zip_darts(int b1, int b2) {
        int t1 = darts[b1].twin, t2 = darts[b2].twin;
        if (darts[t1].next != b2) throw InvariantBreach("zip: darts are not face-adjacent");
        int u = darts[b1].tail;
        int w = darts[t2].tail;
        int pred_b2 = sigma_pred(b2);
        int pred_b1 = sigma_pred(b1);
        int after_b1 = darts[b1].next;
        int after_t2 = darts[t2].next;
        // Delete b2 from the rotation at v.
        darts[pred_b2].next = darts[b2].next;
        if (u == w) {
            // Delete b1; the fold wraps the far vertex into this face.
            darts[pred_b1].next = after_b1;
        } else {
            // Delete b1 and splice the whole w-fan, ending with t2, into its
            // slot, so the faces on either side of the glued edge close up.
            if (pred_b1 != b1) {
                darts[pred_b1].next = (after_t2 == t2) ? t2 : after_t2;
                darts[t2].next = after_b1;
            }
            retarget_tail(w, u);
        }
        darts[t1].twin = t2;
        darts[t2].twin = t1;
        darts[b1].alive = darts[b2].alive = false;
        ++zips_done;
    }

    void remove_word(int k, int count) {
        for (int i = 0; i < count; ++i) word.erase(word.begin() + (k % word.size()));
    }
};

DiagramAssembler::DiagramAssembler(const Complex2PE& X, const std::vector<TargetDart>& loop)
    : X_(&X) {
    impl = std::make_shared<Impl>();
    impl->X = &X;
    int m = static_cast<int>(loop.size());
    if (m < 1) throw NotClosed("empty loop");
    for (int i = 0; i < m; ++i)
        if (loop[i].head(X) != loop[(i + 1) % m].tail(X))
            throw NotClosed("loop darts do not concatenate");
    for (int i = 0; i < m; ++i) impl->new_vertex(loop[i].tail(X));
    for (int i = 0; i < m; ++i) {
        int d = impl->new_dart_pair(i, (i + 1) % m, loop[i]);
        impl->word.push_back(d);
    }
    // Rotation: at vertex i the two darts are word[i] (outgoing) and
    // twin(word[i-1]); the unfilled inner face traverses the word forward.
    for (int i = 0; i < m; ++i) {
        int out = impl->word[i];
        int in_twin = impl->darts[impl->word[(i + m - 1) % m]].twin;
        impl->darts[out].next = in_twin;
        impl->darts[in_twin].next = out;
        impl->darts[impl->darts[out].twin].outer = true;
    }
    if (m == 1) {
        // A single loop dart: its twin is its own rotation partner.
        int d = impl->word[0];
        impl->darts[d].next = impl->darts[d].twin;
        impl->darts[impl->darts[d].twin].next = d;
    }
}

int DiagramAssembler::boundary_size() const { return static_cast<int>(impl->word.size()); }

TargetDart DiagramAssembler::boundary_target(int k) const {
    return impl->darts[impl->word[k]].target;
}

bool DiagramAssembler::can_zip(int k) const {
    int m = boundary_size();
    if (m < 2) return false;
    int b1 = impl->word[k % m], b2 = impl->word[(k + 1) % m];
    return impl->can_zip_darts(b1, b2);
}

void DiagramAssembler::zip(int k) {
    if (!can_zip(k)) throw BadParams("zip not permitted at this position");
    int m = boundary_size();
    int b1 = impl->word[k % m], b2 = impl->word[(k + 1) % m];
    impl->zip_darts(b1, b2);
    // Remove the two word positions (careful with wraparound order).
    std::vector<int> nw;
    for (int i = 0; i < m; ++i) {
        int d = impl->word[i];
        if (d != b1 && d != b2) nw.push_back(d);
    }
    impl->word = std::move(nw);
}

std::vector<DiagramAssembler::AttachOption> DiagramAssembler::attach_options(int k) const {
    const Complex2PE& X = *X_;
    std::vector<AttachOption> out;
    TargetDart td = boundary_target(k);
    for (const auto& ref : X.cells_at_edge(td.edge)) {
        const auto& tc = X.cell(ref.cell);
        // With orient +1 the cell cycle traverses side `ref.index` the way
        // the side runs in the target; the boundary dart must match.
        bool side_dir = tc.side_forward[ref.index];
        int orient = (side_dir == td.forward) ? 1 : -1;
        out.push_back(AttachOption{ref.cell, ref.index, orient});
    }
    return out;
}

void DiagramAssembler::attach(int k, const AttachOption& opt) {
    const Complex2PE& X = *X_;
    auto& I = *impl;
    int m = boundary_size();
    int b = I.word[k % m];
    const auto& tc = X.cell(opt.cell);
    int n = tc.size();
    // Cell cycle darts: (b, c_1, ..., c_{n-1}); c_j follows side
    // start + orient*j with direction matching the traversal.
    std::vector<TargetDart> cycle_targets(n);
    std::vector<int> corner_targets(n); // target vertex of tail(cycle[j])
    for (int j = 0; j < n; ++j) {
        int s = ((opt.side + opt.orient * j) % n + n) % n;
        bool dir = (opt.orient == 1) == tc.side_forward[s];
        cycle_targets[j] = TargetDart{tc.sides[s], dir};
        int corner = (opt.orient == 1) ? s : (s + 1) % n;
        corner_targets[j] = tc.corners[corner];
    }
    if (!(cycle_targets[0] == I.darts[b].target))
        throw BadParams("attach: cell side does not match the boundary dart");
    // New chain of vertices from head(b) to tail(b): n-2 interior vertices.
    int tail_b = I.darts[b].tail;
    int head_b = I.darts[I.darts[b].twin].tail;
    std::vector<int> chain_v{head_b};
    for (int j = 2; j < n; ++j) chain_v.push_back(I.new_vertex(corner_targets[j % n]));
    chain_v.push_back(tail_b);
    std::vector<int> cdarts{b};
    for (int j = 1; j < n; ++j)
        cdarts.push_back(I.new_dart_pair(chain_v[j - 1], chain_v[j], cycle_targets[j]));
    // Rotations: interior chain vertices have exactly two darts.
    // Corner rule: next(out) = twin(in) for the new cell's corners; the
    // unfilled face picks up the twins.
    int t_b = I.darts[b].twin;
    int old_after_tb = I.darts[t_b].next;         // was next unfilled dart after b
    int pred_of_b = I.sigma_pred(b);              // dart aiming at b at tail(b)
    // head(b): insert c_1: cell corner (b in, c_1 out).
    I.darts[t_b].next = cdarts[1];
    I.darts[cdarts[1]].next = old_after_tb;
    // interior corners: (c_j in, c_{j+1} out): next(twin(c_j)) = c_{j+1};
    // and the unfilled face: next(c_{j+1}...) handled by twin chains.
    for (int j = 1; j + 1 < n; ++j) {
        int cj = cdarts[j], cj1 = cdarts[j + 1];
        I.darts[I.darts[cj].twin].next = cj1;
        I.darts[cj1].next = I.darts[cj].twin;
    }
    // tail(b): corner (c_{n-1} in, b out): next(twin(c_{n-1})) = b; the dart
    // that pointed at b now continues to twin(c_{n-1}).
    int last = cdarts[n - 1];
    I.darts[I.darts[last].twin].next = b;
    if (pred_of_b != I.darts[last].twin) I.darts[pred_of_b].next = I.darts[last].twin;
    I.cells.push_back(cdarts);
    // Boundary word: replace position k by the twins of c_{n-1}, ..., c_1.
    std::vector<int> nw;
    for (int i = 0; i < m; ++i) {
        if (I.word[i] != b) {
            nw.push_back(I.word[i]);
            continue;
        }
        for (int j = n - 1; j >= 1; --j) nw.push_back(I.darts[cdarts[j]].twin);
    }
    I.word = std::move(nw);
}

bool DiagramAssembler::closed() const { return impl->word.empty(); }

int DiagramAssembler::cells_used() const { return static_cast<int>(impl->cells.size()); }

std::string DiagramAssembler::boundary_key() const {
    const auto& I = *impl;
    int m = static_cast<int>(I.word.size());
    if (m == 0) return "";
    // Sequence of (target dart, first occurrence of the diagram edge).
    auto encode = [&](int rot) {
        std::ostringstream os;
        std::map<int, int> first;
        for (int i = 0; i < m; ++i) {
            int d = I.word[(i + rot) % m];
            int e = std::min(d, I.darts[d].twin);
            auto it = first.find(e);
            int cls;
            if (it == first.end()) {
                cls = static_cast<int>(first.size());
                first[e] = cls;
            } else {
                cls = it->second;
            }
            os << I.darts[d].target.edge << (I.darts[d].target.forward ? '+' : '-') << cls << ';';
        }
        return os.str();
    };
    std::string best = encode(0);
    for (int r = 1; r < m; ++r) best = std::min(best, encode(r));
    return best;
}

DiagramMap DiagramAssembler::finish() const {
    if (!closed()) throw BadParams("finish: boundary word is not empty");
    const auto& I = *impl;
    const Complex2PE& X = *X_;
    // Compact alive darts into edges.
    std::map<int, int> dart_new;
    std::vector<int> primary; // alive dart with even role
    for (int d = 0; d < static_cast<int>(I.darts.size()); ++d) {
        if (!I.darts[d].alive || dart_new.count(d)) continue;
        int t = I.darts[d].twin;
        int e = static_cast<int>(primary.size());
        dart_new[d] = 2 * e;
        dart_new[t] = 2 * e + 1;
        primary.push_back(d);
    }
    std::map<int, int> vertex_new;
    std::vector<int> vertex_old;
    for (int v = 0; v < static_cast<int>(I.vertex_target.size()); ++v) {
        if (!I.vertex_alive[v]) continue;
        vertex_new[v] = static_cast<int>(vertex_old.size());
        vertex_old.push_back(v);
    }
    std::vector<DiscDiagram::Dart> darts(2 * primary.size());
    for (auto [old_d, new_d] : dart_new) {
        darts[new_d].tail = vertex_new.at(I.darts[old_d].tail);
        darts[new_d].next = dart_new.at(I.darts[old_d].next);
    }
    std::vector<std::string> vids, eids;
    for (size_t v = 0; v < vertex_old.size(); ++v) vids.push_back("u" + std::to_string(v));
    for (size_t e = 0; e < primary.size(); ++e) eids.push_back("a" + std::to_string(e));
    int outer_dart = -1;
    for (int d = 0; d < static_cast<int>(I.darts.size()); ++d)
        if (I.darts[d].alive && I.darts[d].outer) {
            outer_dart = dart_new.at(d);
            break;
        }
    DiscDiagram D(vids, eids, darts, outer_dart);
    for (const auto& cyc : I.cells) {
        int d0 = cyc.front();
        if (!I.darts[d0].alive) {
            // The first dart may have been folded away; find a survivor.
            for (int d : cyc)
                if (I.darts[d].alive) {
                    d0 = d;
                    break;
                }
        }
        if (!I.darts[d0].alive) throw InvariantBreach("finish: cell lost all its darts");
        D.fill_face(D.face_of_dart(dart_new.at(d0)), {});
    }
    DiagramMap M;
    M.target = &X;
    M.D = std::move(D);
    M.vertex_image.resize(M.D.vertex_count());
    for (size_t v = 0; v < vertex_old.size(); ++v)
        M.vertex_image[v] = I.vertex_target[vertex_old[v]];
    M.edge_image.resize(primary.size());
    M.edge_forward.resize(primary.size());
    for (size_t e = 0; e < primary.size(); ++e) {
        M.edge_image[e] = I.darts[primary[e]].target.edge;
        M.edge_forward[e] = I.darts[primary[e]].target.forward;
    }
    M.pull_back_geometry();
    M.D.validate();
    M.validate();
    return M;
}

// ---------------------------------------------------------------------------
// Bounded filling search

namespace {

struct FillSearch {
    const Complex2PE& X;
    std::map<std::string, int> visited; // boundary key -> depth already explored

    bool dfs(DiagramAssembler st, int budget, DiagramAssembler& out) {
        if (st.closed()) {
            out = st;
            return true;
        }
        auto key = st.boundary_key();
        auto it = visited.find(key);
        if (it != visited.end() && it->second >= budget) return false;
        visited[key] = budget;
        int m = st.boundary_size();
        // Zips cost nothing and shrink the word.
        for (int k = 0; k < m; ++k) {
            if (!st.can_zip(k)) continue;
            DiagramAssembler next = st;
            next.impl = std::make_shared<DiagramAssembler::Impl>(*st.impl);
            next.zip(k);
            if (dfs(next, budget, out)) return true;
        }
        if (budget == 0) return false;
        for (int k = 0; k < m; ++k) {
            for (const auto& opt : st.attach_options(k)) {
                DiagramAssembler next = st;
                next.impl = std::make_shared<DiagramAssembler::Impl>(*st.impl);
                next.attach(k, opt);
                if (dfs(next, budget - 1, out)) return true;
            }
        }
        return false;
    }
};

} // namespace

DiagramMap build_reduced_disc_diagram(const Complex2PE& X, const std::vector<TargetDart>& loop,
                                      int max_cells) {
    DiagramAssembler seed(X, loop);
    for (int budget = 0; budget <= max_cells; ++budget) {
        FillSearch fs{X, {}};
        DiagramAssembler found(X, loop);
        if (fs.dfs(seed, budget, found)) {
            auto M = found.finish();
            return reduce_diagram(M);
        }
    }
    throw Exceeded(max_cells, "no filling with at most " + std::to_string(max_cells) + " cells");
}

// ---------------------------------------------------------------------------
// Cancelable pairs and reduction

namespace {

std::vector<int> cycle_from(const DiscDiagram& D, int f, int d0) {
    const auto& cyc = D.face(f).cycle;
    int n = static_cast<int>(cyc.size());
    int at = -1;
    for (int i = 0; i < n; ++i)
        if (cyc[i] == d0) at = i;
    if (at < 0) throw InvariantBreach("dart not on face");
    std::vector<int> out;
    for (int i = 0; i < n; ++i) out.push_back(cyc[(at + i) % n]);
    return out;
}

} // namespace

std::optional<CancelablePair> find_cancelable_pair(const DiagramMap& M) {
    const DiscDiagram& D = M.D;
    for (int e = 0; e < D.edge_count(); ++e) {
        int d = 2 * e, t = 2 * e + 1;
        int f1 = D.face_of_dart(d), f2 = D.face_of_dart(t);
        if (!D.face(f1).filled || !D.face(f2).filled) continue;
        auto cyc1 = cycle_from(D, f1, d);
        auto cyc2 = cycle_from(D, f2, t);
        if (cyc1.size() != cyc2.size()) continue;
        int n = static_cast<int>(cyc1.size());
        // Reverse cyc2 about d: cycle of f2 beginning with the same oriented
        // edge direction as d is (d, twin(cyc2[n-1]), ..., twin(cyc2[1])).
        bool identical_in_D = true, identical_in_X = true;
        for (int i = 1; i < n; ++i) {
            int mirror = DiscDiagram::twin(cyc2[n - i]);
            if (cyc1[i] != mirror) identical_in_D = false;
            if (!(M.dart_image(cyc1[i]) == M.dart_image(mirror))) identical_in_X = false;
        }
        if (identical_in_X && !identical_in_D)
            return CancelablePair{f1, f2, e};
    }
    return std::nullopt;
}

DiagramMap reduce_diagram(const DiagramMap& M0) {
    DiagramMap M = M0;
    int guard = 0;
    while (guard++ < 10000) {
        // Deterministic tie-break: find_cancelable_pair scans edges in order.
        auto pair = find_cancelable_pair(M);
        if (!pair) return M;
        const DiscDiagram& D = M.D;
        int e = pair->edge;
        int d = 2 * e, t = 2 * e + 1;
        auto cyc1 = cycle_from(D, pair->face_a, d);
        auto cyc2 = cycle_from(D, pair->face_b, t);
        int n = static_cast<int>(cyc1.size());
        // Rebuild through an assembler: excise both cells and the shared
        // edge, then sew the mirrored slit shut with zips.
        DiagramAssembler::Impl I;
        I.X = M.target;
        I.vertex_target = M.vertex_image;
        I.vertex_alive.assign(M.vertex_image.size(), 1);
        I.darts.resize(D.dart_count());
        for (int x = 0; x < D.dart_count(); ++x) {
            I.darts[x].twin = DiscDiagram::twin(x);
            I.darts[x].next = D.next(x);
            I.darts[x].tail = D.tail(x);
            auto [te, fw] = M.dart_image(x);
            I.darts[x].target = TargetDart{te, fw};
            I.darts[x].outer = (D.face_of_dart(x) == D.outer_face());
        }
        // Remove darts d and t from the rotation: successors skip over them.
        auto skip_removed = [&](int x) {
            int guard2 = 0;
            while ((x == d || x == t) && guard2++ < 4) x = I.darts[x].next;
            return x;
        };
        for (int x = 0; x < static_cast<int>(I.darts.size()); ++x) {
            if (x == d || x == t) continue;
            I.darts[x].next = skip_removed(I.darts[x].next);
        }
        I.darts[d].alive = I.darts[t].alive = false;
        // Cells: keep all filled faces except the excised two.
        for (int f = 0; f < D.face_count(); ++f) {
            if (!D.face(f).filled || f == pair->face_a || f == pair->face_b) continue;
            I.cells.push_back(D.face(f).cycle);
        }
        // Sew the slit: the hole cycle reads cyc1's remainder then cyc2's,
        // and consecutive junction pairs fold together.
        for (int i = 1; i < n; ++i) {
            int b1 = cyc1[n - i];
            int b2 = cyc2[i];
            // The darts may have been remapped by earlier zips: follow
            // aliveness; zip_darts validates face-adjacency.
            if (!I.darts[b1].alive || !I.darts[b2].alive) {
                // already identified by an earlier zip (shared side)
                continue;
            }
            if (b1 == I.darts[b2].twin || b1 == b2) continue; // already the same edge
            if (!I.can_zip_darts(b1, b2))
                throw InvariantBreach("reduction: degenerate cancelable pair");
            I.zip_darts(b1, b2);
        }
        // Reassemble a DiagramMap from the surgered structure.
        DiagramAssembler shell(*M.target, boundary_word(M));
        shell.impl = std::make_shared<DiagramAssembler::Impl>(std::move(I));
        shell.impl->word.clear();
        M = shell.finish();
    }
    throw InvariantBreach("reduction did not terminate");
}

std::vector<TargetDart> boundary_word(const DiagramMap& M, bool canonical) {
    const DiscDiagram& D = M.D;
    if (D.outer_face() < 0) return {};
    std::vector<TargetDart> w;
    // The outer face cycle runs clockwise around the diagram; its reverse is
    // the boundary path of the disc.
    const auto& cyc = D.face(D.outer_face()).cycle;
    for (auto it = cyc.rbegin(); it != cyc.rend(); ++it) {
        auto [e, f] = M.dart_image(DiscDiagram::twin(*it));
        w.push_back(TargetDart{e, f});
    }
    if (canonical && !w.empty()) {
        auto encode = [&](const std::vector<TargetDart>& v) {
            std::ostringstream os;
            for (const auto& t : v) os << t.edge << (t.forward ? '+' : '-') << ';';
            return os.str();
        };
        std::vector<TargetDart> best = w;
        std::string bestk = encode(w);
        for (size_t r = 1; r < w.size(); ++r) {
            std::rotate(w.begin(), w.begin() + 1, w.end());
            auto k = encode(w);
            if (k < bestk) {
                bestk = k;
                best = w;
            }
        }
        return best;
    }
    return w;
}

} // namespace cat0
