#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cat0/diagram_build.hpp"
#include "cat0/diagram_geometry.hpp"
#include "cat0/generators.hpp"
#include "cat0/rel_hyp.hpp"
#include "cat0/subdivide.hpp"

#include <fstream>
#include <iostream>

using namespace cat0;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerdictFail = 2;
constexpr int kExitInvariantBreach = 3;

void emit(const json& report, const std::string& out) {
    if (out.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::ofstream f(out);
        f << report.dump(2) << "\n";
    }
}

Complex2PE load_file(const std::string& path) { return Complex2PE::from_file(path); }

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path);
    json j;
    in >> j;
    return j;
}

/// Location syntax: "<vertex-id>" | "v:<vertex-id>" | "e:<edge-id>:<t>" |
/// "c:<cell-id>:<x>:<y>".
PointLocation parse_location(const Complex2PE& X, const std::string& spec) {
    auto split = [&](const std::string& s) {
        std::vector<std::string> parts;
        size_t pos = 0;
        while (true) {
            auto nxt = s.find(':', pos);
            parts.push_back(s.substr(pos, nxt - pos));
            if (nxt == std::string::npos) break;
            pos = nxt + 1;
        }
        return parts;
    };
    auto parts = split(spec);
    if (parts.size() == 1) return PointLocation::vertex(X.vertex_index(parts[0]));
    if (parts[0] == "v" && parts.size() == 2)
        return PointLocation::vertex(X.vertex_index(parts[1]));
    if (parts[0] == "e" && parts.size() == 3)
        return PointLocation::on_edge(X.edge_index(parts[1]), std::stod(parts[2]));
    if (parts[0] == "c" && parts.size() == 4)
        return PointLocation::in_cell(X.cell_index(parts[1]),
                                      Vec2(std::stod(parts[2]), std::stod(parts[3])));
    throw BadParams("bad location: " + spec);
}

json location_json(const Complex2PE& X, const PointLocation& p) {
    switch (p.kind) {
    case PointLocation::Kind::Vertex: return {{"kind", "vertex"}, {"id", X.vertex_id(p.index)}};
    case PointLocation::Kind::Edge:
        return {{"kind", "edge"}, {"id", X.edge(p.index).id}, {"t", p.t}};
    case PointLocation::Kind::Cell:
        return {{"kind", "cell"}, {"id", X.cell(p.index).id}, {"xy", {p.xy.x(), p.xy.y()}}};
    }
    return {};
}

json path_json(const Complex2PE& X, const PLPath& path) {
    json out = json::array();
    for (const auto& p : path.points) out.push_back(location_json(X, p));
    return out;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        auto nxt = s.find(',', pos);
        if (nxt == std::string::npos) {
            if (pos < s.size()) out.push_back(s.substr(pos));
            break;
        }
        out.push_back(s.substr(pos, nxt - pos));
        pos = nxt + 1;
    }
    return out;
}

/// Piecewise geodesic through the listed locations.
PLPath route_through(const GeodesicEngine& E, const std::vector<std::string>& locs, double h) {
    const Complex2PE& X = E.complex();
    if (locs.empty()) throw BadParams("empty path");
    PLPath p;
    p.points.push_back(parse_location(X, locs.front()));
    for (size_t i = 0; i + 1 < locs.size(); ++i) {
        auto leg =
            E.geodesic_between(parse_location(X, locs[i]), parse_location(X, locs[i + 1]), h);
        p = concat_paths(p, leg.path);
    }
    return p;
}

FlatDisc flat_from_cells(const Complex2PE& X, const std::vector<std::string>& ids) {
    std::vector<int> cells;
    for (const auto& id : ids) cells.push_back(X.cell_index(id));
    auto res = develop_region(X, cells.front(), cells);
    if (!res.disc) throw BadParams("the given cells do not develop as a flat region");
    return *res.disc;
}

std::vector<int> parse_arc(const DiagramMap& M, const std::string& arc) {
    auto ids = split_commas(arc);
    std::vector<int> chain;
    for (const auto& id : ids) chain.push_back(M.D.vertex_index(id));
    std::vector<int> darts;
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
        int found = -1;
        for (int d = 0; d < M.D.dart_count(); ++d) {
            if (M.D.face(M.D.face_of_dart(d)).filled) continue;
            if ((M.D.tail(d) == chain[i] && M.D.head(d) == chain[i + 1]) ||
                (M.D.tail(d) == chain[i + 1] && M.D.head(d) == chain[i]))
                found = d;
        }
        if (found < 0) throw ArcNotOnBoundary("no boundary edge joins " + ids[i] + "," + ids[i + 1]);
        darts.push_back(found);
    }
    if (darts.size() > 1 && M.D.head(darts[0]) != M.D.tail(darts[1]))
        std::reverse(darts.begin(), darts.end());
    return darts;
}

int run_repro(const std::string& id, unsigned seed);

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"piecewise Euclidean CAT(0) 2-complex toolkit"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    std::string in_path, out_path, diagram_path, complex_path;
    std::string from_spec, to_spec, a_spec, b_spec, c_spec;
    std::string loop_spec, arc_spec, path_spec, p_spec, q_spec, flat_cells, flats_spec, ks_spec;
    std::string kind, repro_id, link_spec;
    double h = 0.05, tol = 1e-9, R = 3.0, theta = 0.5, lambda = 1.0, eps = 0.0, L = 1.0;
    double rmin = 3.0, rtarget = 5.0;
    int max_cells = 8, samples = 50, n = 3, k = 5, m = -1, r = 2;
    unsigned seed = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->set_help_flag("--help", "print help");
        cmd->add_option("--h", h, "mesh spacing");
        cmd->add_option("--tol", tol, "tolerance");
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_option("-o", out_path, "output file");
    };

    auto* g = app.add_subcommand("generate", "build one of the example complexes");
    g->add_option("--kind", kind, "grid|hex|cone|triplane|delta_n|moussong_ball|flap_grid")
        ->required();
    g->add_option("--n", n, "size");
    g->add_option("--k", k, "squares per vertex (cone)");
    g->add_option("--R", R, "triplane half-width");
    g->add_option("--m", m, "flap length");
    g->add_option("--r", r, "ball radius (moussong)");
    g->add_option("--cycle", link_spec, "cycle length for the moussong link");
    add_common(g);

    auto* cc = app.add_subcommand("check-cat0", "link condition verdict");
    cc->add_option("complex", in_path)->required();
    add_common(cc);

    auto* ge = app.add_subcommand("geodesic", "certified geodesic between two points");
    ge->add_option("complex", in_path)->required();
    ge->add_option("--from", from_spec)->required();
    ge->add_option("--to", to_spec)->required();
    add_common(ge);

    auto* pt = app.add_subcommand("probe-triangle", "CAT(0) comparison probe");
    pt->add_option("complex", in_path)->required();
    pt->add_option("--a", a_spec)->required();
    pt->add_option("--b", b_spec)->required();
    pt->add_option("--c", c_spec)->required();
    pt->add_option("--samples", samples);
    add_common(pt);

    auto* fl = app.add_subcommand("fill-loop", "reduced disc diagram for a boundary loop");
    fl->add_option("complex", in_path)->required();
    fl->add_option("--loop", loop_spec, "comma separated vertex walk")->required();
    fl->add_option("--max-cells", max_cells);
    add_common(fl);

    auto* rd = app.add_subcommand("reduce", "excise cancelable pairs");
    rd->add_option("diagram", diagram_path)->required();
    rd->add_option("--complex", complex_path)->required();
    add_common(rd);

    auto* gb = app.add_subcommand("gauss-bonnet", "curvature sum audit");
    gb->add_option("diagram", diagram_path)->required();
    gb->add_option("--complex", complex_path)->required();
    add_common(gb);

    auto* ru = app.add_subcommand("ruffled", "ruffle verdict along a boundary arc");
    ru->add_option("diagram", diagram_path)->required();
    ru->add_option("--complex", complex_path)->required();
    ru->add_option("--arc", arc_spec, "comma separated vertex chain")->required();
    ru->add_option("--R", R);
    ru->add_option("--theta", theta);
    add_common(ru);

    auto* ff = app.add_subcommand("find-flats", "grow maximal flat discs");
    ff->add_option("complex", in_path)->required();
    ff->add_option("--rmin", rmin);
    ff->add_option("--rtarget", rtarget);
    add_common(ff);

    auto* dt = app.add_subcommand("detect-triplane", "search for an embedded triplane ball");
    dt->add_option("complex", in_path)->required();
    dt->add_option("--R", R);
    add_common(dt);

    auto* ps = app.add_subcommand("psi-table", "flat proximity diameters");
    ps->add_option("complex", in_path)->required();
    ps->add_option("--k", ks_spec, "comma separated k values")->required();
    ps->add_option("--flats", flats_spec, "semicolon separated cell-id lists");
    ps->add_option("--rmin", rmin);
    add_common(ps);

    auto* th = app.add_subcommand("thinness", "triangle thinness");
    th->add_option("complex", in_path)->required();
    th->add_option("--a", a_spec)->required();
    th->add_option("--b", b_spec)->required();
    th->add_option("--c", c_spec)->required();
    add_common(th);

    auto* rt = app.add_subcommand("rel-thinness", "thinness relative to a flat");
    rt->add_option("complex", in_path)->required();
    rt->add_option("--a", a_spec)->required();
    rt->add_option("--b", b_spec)->required();
    rt->add_option("--c", c_spec)->required();
    rt->add_option("--flat-cells", flat_cells, "comma separated cell ids")->required();
    add_common(rt);

    auto* hd = app.add_subcommand("hausdorff", "Hausdorff distance between two routes");
    hd->add_option("complex", in_path)->required();
    hd->add_option("--p", p_spec, "route waypoints")->required();
    hd->add_option("--q", q_spec, "route waypoints")->required();
    add_common(hd);

    auto* qg = app.add_subcommand("qg-check", "quasigeodesic verification");
    qg->add_option("complex", in_path)->required();
    qg->add_option("--path", path_spec, "route waypoints")->required();
    qg->add_option("--lambda", lambda);
    qg->add_option("--eps", eps);
    add_common(qg);

    auto* tm = app.add_subcommand("tame", "piecewise geodesic taming");
    tm->add_option("complex", in_path)->required();
    tm->add_option("--path", path_spec, "route waypoints")->required();
    tm->add_option("--lambda", lambda);
    tm->add_option("--eps", eps);
    add_common(tm);

    auto* ft = app.add_subcommand("ft-cert", "fellow travelling relative to flats");
    ft->add_option("complex", in_path)->required();
    ft->add_option("--p", p_spec)->required();
    ft->add_option("--q", q_spec)->required();
    ft->add_option("--L", L);
    ft->add_option("--flats", flats_spec, "semicolon separated cell-id lists");
    add_common(ft);

    auto* dv = app.add_subcommand("divergence", "quadratic divergence audit");
    dv->add_option("diagram", diagram_path)->required();
    dv->add_option("--complex", complex_path)->required();
    dv->add_option("--gamma", arc_spec, "geodesic boundary chain")->required();
    dv->add_option("--R", R);
    dv->add_option("--theta", theta);
    add_common(dv);

    auto* rp = app.add_subcommand("repro", "named desk-scale experiments");
    rp->add_option("experiment", repro_id)->required();
    add_common(rp);

    CLI11_PARSE(app, argc, argv);

    try {
        if (g->parsed()) {
            json params;
            params["n"] = n;
            params["k"] = k;
            params["R"] = static_cast<int>(R);
            if (m >= 0) params["m"] = m;
            params["r"] = r;
            if (!link_spec.empty()) params["cycle"] = std::stoi(link_spec);
            std::string gk = kind == "moussong_ball" && link_spec.empty() ? "moussong_ball" : kind;
            auto gen = generate(gk, params);
            json doc = gen.X.to_json();
            doc["metadata"] = gen.metadata_json();
            emit(doc, out_path);
            return kExitOk;
        }
        if (cc->parsed()) {
            auto X = load_file(in_path);
            auto v = check_link_condition(X);
            json rep;
            rep["status"] = v.pass ? "pass" : "fail";
            if (v.worst_vertex >= 0) {
                rep["worst_vertex"] = X.vertex_id(v.worst_vertex);
                if (v.loop_length < kInf) rep["loop_length"] = v.loop_length;
            }
            emit(rep, out_path);
            return v.pass ? kExitOk : kExitVerdictFail;
        }
        if (ge->parsed()) {
            auto X = load_file(in_path);
            GeodesicEngine E(X);
            auto r2 = E.geodesic_between(parse_location(X, from_spec), parse_location(X, to_spec),
                                         h);
            json rep;
            rep["length"] = r2.length;
            rep["certified"] = r2.certified;
            rep["breakpoints"] = path_json(X, r2.path);
            emit(rep, out_path);
            return kExitOk;
        }
        if (pt->parsed()) {
            auto X = load_file(in_path);
            GeodesicEngine E(X);
            auto rep = E.comparison_probe(parse_location(X, a_spec), parse_location(X, b_spec),
                                          parse_location(X, c_spec), samples, seed, h);
            json out;
            out["max_cat0_violation"] = rep.max_cat0_violation;
            out["max_convexity_violation"] = rep.max_convexity_violation;
            out["corner_gaps"] = {rep.corner_gap[0], rep.corner_gap[1], rep.corner_gap[2]};
            out["samples"] = rep.samples;
            out["uncertainty"] = E.npc() ? 0.0 : 2 * std::min(h, 0.05);
            emit(out, out_path);
            return kExitOk;
        }
        if (fl->parsed()) {
            auto X = load_file(in_path);
            auto loop = loop_from_vertices(X, split_commas(loop_spec));
            auto M = build_reduced_disc_diagram(X, loop, max_cells);
            emit(M.to_json(), out_path);
            return kExitOk;
        }
        if (rd->parsed()) {
            auto X = load_file(complex_path);
            auto M = DiagramMap::from_json(read_json(diagram_path), X);
            auto R2 = reduce_diagram(M);
            emit(R2.to_json(), out_path);
            return kExitOk;
        }
        if (gb->parsed()) {
            auto X = load_file(complex_path);
            auto M = DiagramMap::from_json(read_json(diagram_path), X);
            double res = gauss_bonnet_residual(M.D);
            json rep;
            rep["residual"] = res;
            rep["euler_characteristic"] = M.D.euler_characteristic();
            rep["cells"] = M.D.cell_count();
            emit(rep, out_path);
            return res < tol ? kExitOk : kExitInvariantBreach;
        }
        if (ru->parsed()) {
            auto X = load_file(complex_path);
            auto M = DiagramMap::from_json(read_json(diagram_path), X);
            auto darts = parse_arc(M, arc_spec);
            auto v = is_ruffled(M, darts, RuffleParams{R, theta}, true, h);
            json rep;
            rep["ruffled"] = v.yes;
            if (!v.yes) rep["witness"] = location_json(M.as_complex(), v.witness);
            emit(rep, out_path);
            return v.yes ? kExitOk : kExitVerdictFail;
        }
        if (ff->parsed()) {
            auto X = load_file(in_path);
            json flats = json::array();
            std::set<std::vector<int>> seen;
            for (int v = 0; v < X.vertex_count(); ++v) {
                auto F = grow_flat_disc(X, PointLocation::vertex(v), rtarget);
                if (F.inscribed_radius < rmin) continue;
                if (!seen.insert(F.cells).second) continue;
                json jf;
                jf["center"] = location_json(X, F.center);
                jf["inscribed_radius"] = F.inscribed_radius;
                json cells = json::array();
                for (int c : F.cells) cells.push_back(X.cell(c).id);
                jf["cells"] = std::move(cells);
                flats.push_back(std::move(jf));
            }
            json rep;
            rep["flats"] = std::move(flats);
            rep["rmin"] = rmin;
            emit(rep, out_path);
            return kExitOk;
        }
        if (dt->parsed()) {
            auto X = load_file(in_path);
            auto w = detect_triplane(X, R);
            json rep;
            rep["found"] = w.has_value();
            rep["R"] = R;
            if (w) {
                json spine = json::array();
                for (int v : w->spine) spine.push_back(X.vertex_id(v));
                rep["spine"] = std::move(spine);
                json sides = json::array();
                for (const auto& side : w->half_disc_cells) {
                    json s = json::array();
                    for (int c : side) s.push_back(X.cell(c).id);
                    sides.push_back(std::move(s));
                }
                rep["half_discs"] = std::move(sides);
            }
            emit(rep, out_path);
            return kExitOk;
        }
        if (ps->parsed()) {
            auto X = load_file(in_path);
            std::vector<FlatDisc> flats;
            if (!flats_spec.empty()) {
                size_t pos = 0;
                while (pos <= flats_spec.size()) {
                    auto nxt = flats_spec.find(';', pos);
                    auto chunk = flats_spec.substr(pos, nxt - pos);
                    if (!chunk.empty()) flats.push_back(flat_from_cells(X, split_commas(chunk)));
                    if (nxt == std::string::npos) break;
                    pos = nxt + 1;
                }
            } else {
                std::set<std::vector<int>> seen;
                for (int v = 0; v < X.vertex_count(); ++v) {
                    auto F = grow_flat_disc(X, PointLocation::vertex(v), rtarget);
                    if (F.inscribed_radius >= rmin && seen.insert(F.cells).second)
                        flats.push_back(F);
                }
            }
            std::vector<double> ks;
            for (const auto& s : split_commas(ks_spec)) ks.push_back(std::stod(s));
            auto table = flat_proximity_table(X, flats, ks, std::min(h, 0.25));
            json rep;
            rep["uncertainty"] = table.uncertainty;
            json psij = json::array(), entries = json::array();
            for (size_t i = 0; i < ks.size(); ++i)
                psij.push_back({{"k", ks[i]}, {"psi_hat", table.psi_hat[i]}});
            for (const auto& e : table.entries)
                entries.push_back({{"flat_a", e.flat_a},
                                   {"flat_b", e.flat_b},
                                   {"k", e.k},
                                   {"diameter", e.diameter}});
            rep["psi"] = std::move(psij);
            rep["pairs"] = std::move(entries);
            rep["flat_count"] = flats.size();
            emit(rep, out_path);
            return kExitOk;
        }
        if (th->parsed() || rt->parsed()) {
            auto X = load_file(in_path);
            GeodesicEngine E(X);
            auto A = parse_location(X, a_spec), B = parse_location(X, b_spec),
                 C = parse_location(X, c_spec);
            PLPath sides[3] = {E.geodesic_between(A, B, h).path, E.geodesic_between(B, C, h).path,
                               E.geodesic_between(A, C, h).path};
            Measured msd = th->parsed()
                               ? thinness(E, sides, std::min(h, 0.5))
                               : relative_thinness(E, sides,
                                                   flat_from_cells(X, split_commas(flat_cells)),
                                                   std::min(h, 0.5));
            json rep;
            rep["delta"] = msd.value;
            rep["uncertainty"] = msd.uncertainty;
            emit(rep, out_path);
            return kExitOk;
        }
        if (hd->parsed()) {
            auto X = load_file(in_path);
            GeodesicEngine E(X);
            auto P = route_through(E, split_commas(p_spec), h);
            auto Q = route_through(E, split_commas(q_spec), h);
            auto msd = hausdorff_distance(E, P, Q, std::min(h, 0.5));
            json rep;
            rep["hausdorff"] = msd.value;
            rep["uncertainty"] = msd.uncertainty;
            emit(rep, out_path);
            return kExitOk;
        }
        if (qg->parsed()) {
            auto X = load_file(in_path);
            GeodesicEngine E(X);
            auto P = route_through(E, split_commas(path_spec), h);
            auto v = check_quasigeodesic(E, P, QGParams{lambda, eps}, std::min(h, 0.5));
            json rep;
            rep["quasigeodesic"] = v.yes;
            if (!v.yes) {
                rep["violation"] = {{"s", v.s}, {"t", v.t}, {"measured", v.measured},
                                    {"bound", v.bound}};
            }
            emit(rep, out_path);
            return v.yes ? kExitOk : kExitVerdictFail;
        }
        if (tm->parsed()) {
            auto X = load_file(in_path);
            GeodesicEngine E(X);
            auto P = route_through(E, split_commas(path_spec), h);
            auto t = tame_quasigeodesic(E, P, QGParams{lambda, eps});
            json rep;
            rep["length_in"] = path_length(P);
            rep["length_out"] = path_length(t.path);
            rep["lambda_out"] = t.derived.lambda;
            rep["eps_out"] = t.derived.eps;
            rep["hausdorff_from_input"] = t.hausdorff_from_input.value;
            rep["uncertainty"] = t.hausdorff_from_input.uncertainty;
            rep["breakpoints"] = path_json(X, t.path);
            emit(rep, out_path);
            return kExitOk;
        }
        if (ft->parsed()) {
            auto X = load_file(in_path);
            GeodesicEngine E(X);
            auto P = route_through(E, split_commas(p_spec), h);
            auto Q = route_through(E, split_commas(q_spec), h);
            std::vector<FlatDisc> flats;
            if (!flats_spec.empty()) {
                size_t pos = 0;
                while (pos <= flats_spec.size()) {
                    auto nxt = flats_spec.find(';', pos);
                    auto chunk = flats_spec.substr(pos, nxt - pos);
                    if (!chunk.empty()) flats.push_back(flat_from_cells(X, split_commas(chunk)));
                    if (nxt == std::string::npos) break;
                    pos = nxt + 1;
                }
            }
            auto cert = fellow_travel_certificate(E, P, Q, flats, L, std::min(h, 0.5));
            json rep;
            rep["found"] = cert.has_value();
            rep["L"] = L;
            if (cert) {
                rep["flats"] = cert->flats;
                rep["t"] = cert->t;
                rep["s"] = cert->s;
                rep["t_prime"] = cert->tp;
                rep["s_prime"] = cert->sp;
                rep["uncertainty"] = cert->uncertainty;
            }
            emit(rep, out_path);
            return cert ? kExitOk : kExitVerdictFail;
        }
        if (dv->parsed()) {
            auto X = load_file(complex_path);
            auto M = DiagramMap::from_json(read_json(diagram_path), X);
            auto darts = parse_arc(M, arc_spec);
            auto rep = divergence_check(M, darts, RuffleParams{R, theta}, h);
            json out;
            out["ok"] = rep.all_ok;
            out["alpha_length"] = rep.alpha_length;
            json ss = json::array();
            for (const auto& s : rep.samples)
                ss.push_back({{"gamma_param", s.gamma_param},
                              {"r_lower", s.r_lower},
                              {"bound", s.bound},
                              {"margin", s.margin}});
            out["samples"] = std::move(ss);
            emit(out, out_path);
            return rep.all_ok ? kExitOk : kExitInvariantBreach;
        }
        if (rp->parsed()) return run_repro(repro_id, seed);
    } catch (const NotNPC& ex) {
        std::cerr << "not nonpositively curved: " << ex.what() << "\n";
        return kExitVerdictFail;
    } catch (const InvariantBreach& ex) {
        std::cerr << "invariant breach: " << ex.what() << "\n";
        return kExitInvariantBreach;
    } catch (const Error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

namespace {

int run_repro(const std::string& id, unsigned seed) {
    json rep;
    rep["experiment"] = id;
    if (id == "link-verdicts") {
        json rows = json::array();
        auto row = [&](const std::string& name, const Generated& g) {
            auto v = check_link_condition(g.X);
            rows.push_back({{"complex", name},
                            {"status", v.pass ? "pass" : "fail"},
                            {"loop_length", v.loop_length}});
        };
        row("grid(4)", generate_grid(4));
        row("hex(2)", generate_hex(2));
        row("cone(3,1)", generate_cone(3, 1));
        row("cone(5,2)", generate_cone(5, 2));
        row("moussong(C4,2)", generate_moussong_ball(SimpleGraph::cycle(4), 2));
        rep["rows"] = std::move(rows);
    } else if (id == "delta-n-fat") {
        json rows = json::array();
        for (int n : {4, 8, 16}) {
            auto g = generate_delta_n(n);
            GeodesicEngine E(g.X);
            auto a = g.points.at("a"), b = g.points.at("b"), c = g.points.at("c");
            PLPath sides[3] = {E.geodesic_between(b, a, 0.5).path,
                               E.geodesic_between(a, c, 0.5).path,
                               E.geodesic_between(b, c, 0.5).path};
            auto d = thinness(E, sides, 0.5);
            rows.push_back({{"n", n}, {"delta", d.value}, {"uncertainty", d.uncertainty}});
        }
        rep["rows"] = std::move(rows);
    } else if (id == "triplane-detect") {
        json rows = json::array();
        rows.push_back({{"complex", "triplane(5)"},
                        {"R", 3.0},
                        {"found", detect_triplane(generate_triplane(5).X, 3.0).has_value()}});
        rows.push_back({{"complex", "grid(5)"},
                        {"R", 2.0},
                        {"found", detect_triplane(generate_grid(5).X, 2.0).has_value()}});
        rows.push_back({{"complex", "hex(3)"},
                        {"R", 2.0},
                        {"found", detect_triplane(generate_hex(3).X, 2.0).has_value()}});
        rep["rows"] = std::move(rows);
    } else if (id == "psi-triplane") {
        json rows = json::array();
        for (int Rr : {2, 4}) {
            auto g = generate_triplane(Rr);
            std::vector<FlatDisc> flats;
            for (const char* name : {"flat12", "flat13", "flat23"}) {
                std::vector<int> cells;
                for (const auto& cid : g.cell_groups.at(name)) cells.push_back(g.X.cell_index(cid));
                flats.push_back(*develop_region(g.X, cells.front(), cells).disc);
            }
            auto table = flat_proximity_table(g.X, flats, {0.0, 1.0}, 0.25);
            rows.push_back({{"radius", Rr},
                            {"psi0", table.psi_hat[0]},
                            {"psi1", table.psi_hat[1]},
                            {"uncertainty", table.uncertainty}});
        }
        rep["rows"] = std::move(rows);
    } else if (id == "gauss-bonnet") {
        std::mt19937 rng(seed);
        auto grid = generate_grid(4);
        int checked = 0;
        double worst = 0;
        for (int it = 0; it < 25; ++it) {
            std::vector<int> cells{static_cast<int>(rng() % grid.X.cell_count())};
            std::set<int> used(cells.begin(), cells.end());
            for (int grow = 0; grow < 6; ++grow) {
                int c = cells[rng() % cells.size()];
                for (int s : grid.X.cell(c).sides)
                    for (const auto& ref : grid.X.cells_at_edge(s))
                        if (!used.count(ref.cell) && used.size() < 7) {
                            used.insert(ref.cell);
                            cells.push_back(ref.cell);
                        }
            }
            try {
                auto M = diagram_from_subcomplex(grid.X, cells);
                worst = std::max(worst, gauss_bonnet_residual(M.D));
                ++checked;
            } catch (const BadParams&) {
            }
        }
        rep["diagrams"] = checked;
        rep["max_residual"] = worst;
    } else {
        std::cerr << "unknown experiment: " << id
                  << " (try link-verdicts, delta-n-fat, triplane-detect, psi-triplane,"
                     " gauss-bonnet)\n";
        return kExitUsage;
    }
    emit(rep, "");
    return kExitOk;
}

} // namespace
