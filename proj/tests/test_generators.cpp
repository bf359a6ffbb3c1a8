#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cat0/generators.hpp"
#include "cat0/link_condition.hpp"

#include <nlohmann/json.hpp>

using namespace cat0;

TEST_CASE("every generated complex passes load validation") {
    for (const auto& g :
         {generate_grid(3), generate_hex(2), generate_cone(4, 2), generate_cone(5, 2),
          generate_triplane(2), generate_delta_n(2), generate_flap_grid(4, 2),
          generate_moussong_ball(SimpleGraph::cycle(4), 2)}) {
        // Reload through the document round trip revalidates all invariants.
        auto Y = Complex2PE::from_json(g.X.to_json());
        CHECK(Y.cell_count() == g.X.cell_count());
    }
}

TEST_CASE("cone(5,2) interior links have length 5*pi/2") {
    auto g = generate_cone(5, 2);
    int checked = 0;
    for (const auto& vid : g.cell_groups.at("complete_vertices")) {
        auto link = vertex_link(g.X, g.X.vertex_index(vid));
        CHECK(link.total_length() == doctest::Approx(5 * kPi / 2));
        auto loop = shortest_essential_loop(link);
        CHECK(loop.length == doctest::Approx(5 * kPi / 2));
        ++checked;
    }
    CHECK(checked >= 6); // apex and the five distance-1 vertices
}

TEST_CASE("cone curvature signs") {
    CHECK_FALSE(check_link_condition(generate_cone(3, 1).X).pass);
    CHECK(check_link_condition(generate_cone(4, 2).X).pass);
    CHECK(check_link_condition(generate_cone(5, 2).X).pass);
}

TEST_CASE("generators are deterministic") {
    auto a = generate_cone(5, 2);
    auto b = generate_cone(5, 2);
    CHECK(a.X.to_json().dump() == b.X.to_json().dump());
    auto ma = generate_moussong_ball(SimpleGraph::cycle(4), 2);
    auto mb = generate_moussong_ball(SimpleGraph::cycle(4), 2);
    CHECK(ma.X.to_json().dump() == mb.X.to_json().dump());
}

TEST_CASE("triplane structure") {
    auto g = generate_triplane(2);
    CHECK(g.X.cell_count() == 3 * 2 * 4);
    int line_edges = 0;
    for (int e = 0; e < g.X.edge_count(); ++e)
        if (g.X.cells_at_edge(e).size() == 3) ++line_edges;
    CHECK(line_edges == 4); // 2R edges along the singular line
    CHECK(g.singular_path.size() == 5);
    CHECK(check_link_condition(g.X).pass);
}

TEST_CASE("delta_n marks the triangle of the three sheets") {
    auto g = generate_delta_n(2);
    auto a = g.points.at("a");
    auto b = g.points.at("b");
    auto c = g.points.at("c");
    CHECK(a.kind == PointLocation::Kind::Vertex);
    CHECK(g.X.vertex_id(a.index) == "s1_0_2");
    CHECK(g.X.vertex_id(b.index) == "s2_-4_2");
    CHECK(g.X.vertex_id(c.index) == "s3_4_2");
    CHECK(g.cell_groups.count("flat12") == 1);
    CHECK(g.cell_groups.count("flat13") == 1);
    CHECK(g.cell_groups.count("flat23") == 1);
}

TEST_CASE("moussong ball with square link passes the link condition") {
    auto g = generate_moussong_ball(SimpleGraph::cycle(4), 2);
    auto verdict = check_link_condition(g.X);
    CHECK(verdict.pass);
    CHECK(verdict.loop_length == doctest::Approx(4 * (2 * kPi / 3)));
}

TEST_CASE("moussong ball interior links are isomorphic to the prescribed graph") {
    auto L = SimpleGraph::cycle(4);
    MetricGraph target;
    for (int i = 0; i < L.nodes; ++i) target.add_node();
    for (auto [a, b] : L.edges) target.add_arc(a, b, 2 * kPi / 3);
    auto g = generate_moussong_ball(L, 2);
    int checked = 0;
    for (const auto& vid : g.cell_groups.at("complete_vertices")) {
        auto link = vertex_link(g.X, g.X.vertex_index(vid));
        CHECK(metric_graphs_isomorphic(link, target, 1e-9));
        ++checked;
    }
    CHECK(checked >= 5);
}

TEST_CASE("moussong ball rejects bad link graphs") {
    SimpleGraph multi;
    multi.nodes = 2;
    multi.edges = {{0, 1}, {0, 1}};
    CHECK_THROWS_AS(generate_moussong_ball(multi, 1), BadParams);
    SimpleGraph triangle_with_girth2 = multi;
    CHECK_THROWS_AS(generate_moussong_ball(triangle_with_girth2, 1), BadParams);
}

TEST_CASE("flap grid has a three-cell line") {
    auto g = generate_flap_grid(4, 2);
    int tri = 0;
    for (int e = 0; e < g.X.edge_count(); ++e)
        if (g.X.cells_at_edge(e).size() == 3) ++tri;
    CHECK(tri == 2);
    CHECK(check_link_condition(g.X).pass);
}

TEST_CASE("generate dispatch") {
    nlohmann::json p;
    p["n"] = 2;
    auto g = generate("grid", p);
    CHECK(g.X.cell_count() == 4);
    CHECK_THROWS_AS(generate("nonsense", p), BadParams);
    nlohmann::json mp;
    mp["cycle"] = 4;
    mp["r"] = 1;
    CHECK(generate("moussong_ball", mp).X.cell_count() == 4);
    auto meta = g.metadata_json();
    CHECK(meta.contains("points"));
}
