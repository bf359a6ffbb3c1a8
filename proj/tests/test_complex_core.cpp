#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cat0/complex.hpp"
#include "cat0/generators.hpp"

#include <nlohmann/json.hpp>

using namespace cat0;
using nlohmann::json;

namespace {

json unit_square_doc(double declared_length = 1.0) {
    return json{
        {"vertices", {"a", "b", "c", "d"}},
        {"edges",
         {{{"id", "ab"}, {"v0", "a"}, {"v1", "b"}, {"length", declared_length}},
          {{"id", "bc"}, {"v0", "b"}, {"v1", "c"}, {"length", 1.0}},
          {{"id", "cd"}, {"v0", "c"}, {"v1", "d"}, {"length", 1.0}},
          {{"id", "da"}, {"v0", "d"}, {"v1", "a"}, {"length", 1.0}}}},
        {"cells",
         {{{"id", "sq"},
           {"corners", {"a", "b", "c", "d"}},
           {"coords", {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}},
           {"sides", {"ab", "bc", "cd", "da"}}}}}};
}

} // namespace

TEST_CASE("load_complex accepts a unit square") {
    auto X = load_complex(unit_square_doc());
    CHECK(X.cell_count() == 1);
    CHECK(X.edge_count() == 4);
    CHECK(X.vertex_count() == 4);
    for (int i = 0; i < 4; ++i) CHECK(X.corner_angle(0, i) == doctest::Approx(kPi / 2));
}

TEST_CASE("load_complex rejects metric inconsistency") {
    CHECK_THROWS_AS(load_complex(unit_square_doc(2.0)), MetricError);
}

TEST_CASE("load_complex rejects malformed documents") {
    json doc = unit_square_doc();
    doc.erase("edges");
    CHECK_THROWS_AS(load_complex(doc), SchemaError);
    json doc2 = unit_square_doc();
    doc2["cells"][0]["coords"] = {{0.0, 0.0}, {1.0, 0.0}, {0.2, 0.2}, {0.0, 1.0}}; // reflex
    CHECK_THROWS_AS(load_complex(doc2), ConvexityError);
}

TEST_CASE("3x3 grid document counts") {
    // Counts by direct enumeration of the grid: (n+1)^2 vertices,
    // 2*n*(n+1) edges, n^2 cells.
    auto g = generate_grid(3);
    CHECK(g.X.cell_count() == 9);
    CHECK(g.X.edge_count() == 24);
    CHECK(g.X.vertex_count() == 16);
    auto doc = g.X.to_json();
    auto Y = load_complex(doc);
    CHECK(Y.cell_count() == 9);
}

TEST_CASE("serialize then load is the identity") {
    auto g = generate_grid(3);
    auto doc = g.X.to_json();
    auto Y = Complex2PE::from_json(doc);
    REQUIRE(Y.vertex_count() == g.X.vertex_count());
    REQUIRE(Y.edge_count() == g.X.edge_count());
    REQUIRE(Y.cell_count() == g.X.cell_count());
    for (int e = 0; e < Y.edge_count(); ++e) {
        CHECK(Y.edge(e).id == g.X.edge(e).id);
        CHECK(Y.edge(e).length == doctest::Approx(g.X.edge(e).length).epsilon(1e-12));
    }
    for (int c = 0; c < Y.cell_count(); ++c)
        for (int i = 0; i < Y.cell(c).size(); ++i)
            CHECK((Y.cell(c).coords[i] - g.X.cell(c).coords[i]).norm() <= 1e-12);
    // Round a second time: byte-stable.
    CHECK(Y.to_json().dump() == doc.dump());
}

TEST_CASE("vertex_link of interior grid vertex is a circle of length 2*pi") {
    auto g = generate_grid(2);
    int v = g.X.vertex_index("v1_1");
    auto link = vertex_link(g.X, v);
    CHECK(link.node_count() == 4);
    CHECK(link.arc_count() == 4);
    CHECK(link.total_length() == doctest::Approx(kTwoPi));
    for (const auto& a : link.arcs) CHECK(a.len == doctest::Approx(kPi / 2));
    // Total link length equals independent corner-angle summation.
    double total = 0;
    for (const auto& ref : g.X.corners_at_vertex(v)) total += g.X.corner_angle(ref.cell, ref.index);
    CHECK(link.total_length() == doctest::Approx(total));
}

TEST_CASE("vertex_link of interior hex vertex is a circle of length 2*pi") {
    auto g = generate_hex(2);
    int v = g.points.at("center").index;
    auto link = vertex_link(g.X, v);
    CHECK(link.arc_count() == 3);
    CHECK(link.total_length() == doctest::Approx(kTwoPi));
    for (const auto& a : link.arcs) CHECK(a.len == doctest::Approx(2 * kPi / 3));
}

TEST_CASE("vertex link on the triplane singular line is a theta graph") {
    auto g = generate_triplane(1);
    int v = g.X.vertex_index("L0");
    auto link = vertex_link(g.X, v);
    // Three half-plane germs: metrically 3 arcs of length pi between the two
    // line directions; Euler characteristic -1 (also before smoothing).
    CHECK(link.node_count() - link.arc_count() == -1);
    auto theta = link.smoothed();
    CHECK(theta.node_count() == 2);
    CHECK(theta.arc_count() == 3);
    for (const auto& a : theta.arcs) CHECK(a.len == doctest::Approx(kPi));
}

TEST_CASE("direction spaces at edge and cell points") {
    auto g = generate_grid(2);
    // Interior edge shared by exactly two squares.
    int shared = -1;
    for (int e = 0; e < g.X.edge_count(); ++e)
        if (g.X.cells_at_edge(e).size() == 2) {
            shared = e;
            break;
        }
    REQUIRE(shared >= 0);
    auto ds = direction_space_at(g.X, PointLocation::on_edge(shared, 0.5));
    CHECK(ds.node_count() == 2);
    CHECK(ds.arc_count() == 2);
    CHECK(ds.total_length() == doctest::Approx(kTwoPi));
    for (const auto& a : ds.arcs) CHECK(a.len == doctest::Approx(kPi));

    auto dc = direction_space_at(g.X, PointLocation::in_cell(0, Vec2(0.5, 0.5)));
    CHECK(dc.total_length() == doctest::Approx(kTwoPi));

    auto tp = generate_triplane(1);
    int line_edge = -1;
    for (int e = 0; e < tp.X.edge_count(); ++e)
        if (tp.X.cells_at_edge(e).size() == 3) {
            line_edge = e;
            break;
        }
    REQUIRE(line_edge >= 0);
    auto dt = direction_space_at(tp.X, PointLocation::on_edge(line_edge, 0.5));
    CHECK(dt.node_count() == 2);
    CHECK(dt.arc_count() == 3);
    for (const auto& a : dt.arcs) CHECK(a.len == doctest::Approx(kPi));
}

TEST_CASE("direction space arc count equals incident cell count on edges") {
    for (auto g : {generate_grid(3), generate_triplane(2), generate_flap_grid(4, 2)}) {
        for (int e = 0; e < g.X.edge_count(); ++e) {
            auto ds = direction_space_at(g.X, PointLocation::on_edge(e, 0.25));
            CHECK(ds.arc_count() == static_cast<int>(g.X.cells_at_edge(e).size()));
            for (const auto& a : ds.arcs) CHECK(a.len == doctest::Approx(kPi).epsilon(1e-9));
        }
    }
}

TEST_CASE("path_length basics") {
    auto g = generate_grid(1);
    PLPath p;
    p.points.push_back(PointLocation::vertex(0));
    CHECK(path_length(p) == 0.0);

    // Diagonal of the unit square cell.
    PLPath diag;
    diag.points.push_back(PointLocation::vertex(g.X.vertex_index("v0_0")));
    diag.points.push_back(PointLocation::vertex(g.X.vertex_index("v1_1")));
    diag.segments.push_back(PLPath::Segment{0, Vec2(0, 0), Vec2(1, 1), -1});
    CHECK(path_length(diag) == doctest::Approx(std::sqrt(2.0)));

    // L-shaped two-segment path with unit legs.
    auto g2 = generate_grid(2);
    PLPath ell;
    ell.points.push_back(PointLocation::vertex(g2.X.vertex_index("v0_0")));
    ell.points.push_back(PointLocation::vertex(g2.X.vertex_index("v1_0")));
    ell.points.push_back(PointLocation::vertex(g2.X.vertex_index("v1_1")));
    int c0 = 0;
    ell.segments.push_back(PLPath::Segment{c0, Vec2(0, 0), Vec2(1, 0), -1});
    ell.segments.push_back(PLPath::Segment{c0, Vec2(1, 0), Vec2(1, 1), -1});
    CHECK(path_length(ell) == doctest::Approx(2.0));
}

TEST_CASE("graph point distance on a theta graph") {
    MetricGraph g;
    g.add_node("a");
    g.add_node("b");
    g.add_arc(0, 1, kPi);
    g.add_arc(0, 1, kPi);
    g.add_arc(0, 1, kPi);
    CHECK(graph_point_distance(g, GraphPoint::on_arc(0, kPi / 2), GraphPoint::on_arc(1, kPi / 2)) ==
          doctest::Approx(kPi));
    CHECK(graph_point_distance(g, GraphPoint::on_arc(0, 0.3), GraphPoint::on_arc(0, 1.0)) ==
          doctest::Approx(0.7));
    CHECK(graph_point_distance(g, GraphPoint::at_node(0), GraphPoint::at_node(1)) ==
          doctest::Approx(kPi));
}
