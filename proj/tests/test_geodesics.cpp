#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cat0/generators.hpp"
#include "cat0/geodesics.hpp"

#include <random>

using namespace cat0;

namespace {
PointLocation grid_vertex(const Generated& g, int i, int j) {
    return PointLocation::vertex(
        g.X.vertex_index("v" + std::to_string(i) + "_" + std::to_string(j)));
}

Vec2 cell_center(const Complex2PE& X, int c) {
    Vec2 s = Vec2::Zero();
    for (const auto& p : X.cell(c).coords) s += p;
    return s / X.cell(c).coords.size();
}
} // namespace

TEST_CASE("straight segment inside one cell") {
    auto g = generate_grid(1);
    GeodesicEngine E(g.X);
    auto r = E.geodesic_between(PointLocation::in_cell(0, Vec2(0.25, 0.25)),
                                PointLocation::in_cell(0, Vec2(0.75, 0.5)));
    CHECK(r.certified);
    CHECK(r.length == doctest::Approx(std::hypot(0.5, 0.25)).epsilon(1e-12));
    CHECK(r.path.segments.size() == 1);
}

TEST_CASE("opposite corners of a 2x1 rectangle unfold to sqrt(5)") {
    auto g = generate_grid(2);
    GeodesicEngine E(g.X);
    auto r = E.geodesic_between(grid_vertex(g, 0, 0), grid_vertex(g, 2, 1));
    CHECK(r.certified);
    CHECK(r.length == doctest::Approx(std::sqrt(5.0)).epsilon(1e-9));
}

TEST_CASE("grid geodesics are exactly Euclidean") {
    auto g = generate_grid(4);
    GeodesicEngine E(g.X);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uni(0.05, 3.95);
    for (int it = 0; it < 25; ++it) {
        Vec2 a(uni(rng), uni(rng)), b(uni(rng), uni(rng));
        // Grid cells are indexed row-major with global plane coordinates.
        int ca = static_cast<int>(std::floor(a.x())) + 4 * static_cast<int>(std::floor(a.y()));
        int cb = static_cast<int>(std::floor(b.x())) + 4 * static_cast<int>(std::floor(b.y()));
        auto pa = PointLocation::in_cell(ca, a);
        auto pb = PointLocation::in_cell(cb, b);
        auto r = E.geodesic_between(pa, pb, 0.5);
        CHECK(r.certified);
        CHECK(r.length == doctest::Approx((a - b).norm()).epsilon(1e-9));
    }
}

TEST_CASE("triplane cross-sheet geodesics match the two-half-plane unfolding") {
    auto g = generate_triplane(3);
    GeodesicEngine E(g.X);
    // p = (x1,y1,sheet1), q = (x2,y2,sheet2): unfolding the two half planes
    // across the singular line gives d = sqrt((x1-x2)^2 + (y1+y2)^2).
    struct Case {
        double x1, y1;
        int s1;
        double x2, y2;
        int s2;
    } cases[] = {
        {0, 1, 1, 0, 1, 2},
        {-1, 2, 1, 1.5, 1, 3},
        {2, 0.5, 2, -2, 2.5, 3},
        {0.5, 0.25, 1, 0.5, 0.25, 3},
    };
    for (const auto& tc : cases) {
        auto p = triplane_point(g, tc.x1, tc.y1, tc.s1);
        auto q = triplane_point(g, tc.x2, tc.y2, tc.s2);
        double expect = std::hypot(tc.x1 - tc.x2, tc.y1 + tc.y2);
        auto r = E.geodesic_between(p, q, 0.5);
        CHECK(r.certified);
        CHECK(r.length == doctest::Approx(expect).epsilon(1e-9));
        // Fine-mesh shortest-path oracle agrees within 1e-3 at h = 0.01.
        double oracle = E.mesh_distance(p, q, 0.01);
        CHECK(r.length <= oracle + 1e-12);
        CHECK(oracle - r.length <= 1e-3);
    }
}

TEST_CASE("same-sheet geodesics on the triplane are Euclidean") {
    auto g = generate_triplane(3);
    GeodesicEngine E(g.X);
    auto p = triplane_point(g, -2, 1, 2);
    auto q = triplane_point(g, 2, 2, 2);
    auto r = E.geodesic_between(p, q, 0.5);
    CHECK(r.certified);
    CHECK(r.length == doctest::Approx(std::hypot(4, 1)).epsilon(1e-9));
}

TEST_CASE("is_local_geodesic on elementary paths") {
    auto g = generate_grid(2);
    GeodesicEngine E(g.X);

    PLPath straight;
    straight.points = {PointLocation::in_cell(0, Vec2(0.1, 0.1)),
                       PointLocation::in_cell(0, Vec2(0.9, 0.7))};
    straight.segments.push_back(PLPath::Segment{0, Vec2(0.1, 0.1), Vec2(0.9, 0.7), -1});
    CHECK(E.is_local_geodesic(straight).yes);

    // Bend at an interior edge crossing.
    int shared = -1;
    for (int e = 0; e < g.X.edge_count(); ++e)
        if (g.X.cells_at_edge(e).size() == 2) {
            shared = e;
            break;
        }
    REQUIRE(shared >= 0);
    const auto& refs = g.X.cells_at_edge(shared);
    int c0 = refs[0].cell, c1 = refs[1].cell;
    auto bp = PointLocation::on_edge(shared, 0.3);
    Vec2 mid0 = locate_in_cell(g.X, bp, c0);
    Vec2 mid1 = locate_in_cell(g.X, bp, c1);
    Vec2 a = cell_center(g.X, c0) + Vec2(0.11, 0.07);
    Vec2 b = cell_center(g.X, c1) - Vec2(0.13, 0.05);
    PLPath bent;
    bent.points = {PointLocation::in_cell(c0, a), bp, PointLocation::in_cell(c1, b)};
    bent.segments.push_back(PLPath::Segment{c0, a, mid0, -1});
    bent.segments.push_back(PLPath::Segment{c1, mid1, b, -1});
    auto verdict = E.is_local_geodesic(bent);
    CHECK_FALSE(verdict.yes);
    CHECK(verdict.direction_distance < kPi - 1e-9);
}

TEST_CASE("path along the triplane singular line is locally geodesic") {
    auto g = generate_triplane(2);
    GeodesicEngine E(g.X);
    auto p = PointLocation::vertex(g.X.vertex_index("L-1"));
    auto q = PointLocation::vertex(g.X.vertex_index("L1"));
    auto r = E.geodesic_between(p, q, 0.5);
    CHECK(r.certified);
    CHECK(r.length == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(E.is_local_geodesic(r.path).yes);
}

TEST_CASE("refinement stability (Cauchy certificate)") {
    auto g = generate_cone(5, 2);
    GeodesicEngine E(g.X);
    std::mt19937 rng(5);
    auto random_vertex = [&]() {
        return PointLocation::vertex(static_cast<int>(rng() % g.X.vertex_count()));
    };
    for (int it = 0; it < 10; ++it) {
        auto p = random_vertex(), q = random_vertex();
        if (p.same_as(q)) continue;
        auto r1 = E.geodesic_between(p, q, 0.5);
        auto r2 = E.geodesic_between(p, q, 0.25);
        CHECK(r1.certified);
        CHECK(r2.certified);
        CHECK(std::abs(r1.length - r2.length) < 1e-6);
    }
}

TEST_CASE("geodesics match the mesh oracle on small complexes") {
    std::mt19937 rng(17);
    for (auto g : {generate_grid(3), generate_cone(5, 2), generate_triplane(2)}) {
        GeodesicEngine E(g.X);
        for (int it = 0; it < 8; ++it) {
            auto p = PointLocation::vertex(static_cast<int>(rng() % g.X.vertex_count()));
            auto q = PointLocation::vertex(static_cast<int>(rng() % g.X.vertex_count()));
            if (p.same_as(q)) continue;
            auto r = E.geodesic_between(p, q, 0.5);
            double oracle = E.mesh_distance(p, q, 0.02);
            CHECK(r.certified);
            CHECK(r.length <= oracle + 1e-9);
            CHECK(oracle - r.length <= 2 * 0.02);
        }
    }
}

TEST_CASE("alexandrov angles in flat cells") {
    auto g = generate_grid(2);
    GeodesicEngine E(g.X);
    auto p = grid_vertex(g, 1, 1);
    auto x = grid_vertex(g, 2, 1);
    auto y = grid_vertex(g, 1, 2);
    CHECK(E.alexandrov_angle(p, x, y) == doctest::Approx(kPi / 2).epsilon(1e-5));
    auto z = grid_vertex(g, 0, 1);
    CHECK(E.alexandrov_angle(p, x, z) == doctest::Approx(kPi).epsilon(1e-5));
    CHECK_THROWS_AS(E.alexandrov_angle(p, p, x), DegenerateInput);
}

TEST_CASE("alexandrov angle at a 5-squares cone point agrees with the link") {
    auto g = generate_cone(5, 2);
    GeodesicEngine E(g.X);
    int apex = g.points.at("apex").index;
    auto link = vertex_link(g.X, apex);
    const auto& ends = g.X.edge_ends_at_vertex(apex);
    REQUIRE(ends.size() == 5);
    auto other_end = [&](int k) {
        const auto& e = g.X.edge(ends[k].first);
        return ends[k].second == 0 ? e.v1 : e.v0;
    };
    for (size_t i = 1; i < ends.size(); ++i) {
        double dlink = graph_point_distance(link, GraphPoint::at_node(0),
                                            GraphPoint::at_node(static_cast<int>(i)));
        auto x = PointLocation::vertex(other_end(0));
        auto y = PointLocation::vertex(other_end(static_cast<int>(i)));
        double expected = std::min(dlink, kPi);
        double via_limit = E.alexandrov_angle(PointLocation::vertex(apex), x, y);
        auto gx = E.geodesic_between(PointLocation::vertex(apex), x);
        auto gy = E.geodesic_between(PointLocation::vertex(apex), y);
        double via_dirs = E.angle_via_directions(gx.path, gy.path);
        CHECK(via_dirs == doctest::Approx(expected).epsilon(1e-9));
        CHECK(via_limit == doctest::Approx(expected).epsilon(1e-4));
    }
}

TEST_CASE("comparison probe: flat triangles satisfy equality, cones violate") {
    auto flat = generate_grid(3);
    GeodesicEngine Ef(flat.X);
    auto rep = Ef.comparison_probe(grid_vertex(flat, 0, 0), grid_vertex(flat, 3, 1),
                                   grid_vertex(flat, 1, 3), 24, 7);
    CHECK(rep.max_cat0_violation <= 1e-9);
    CHECK(rep.max_convexity_violation <= 1e-9);
    for (double gap : rep.corner_gap) CHECK(gap >= -1e-6);

    // Degenerate (collinear) triangle.
    auto rep2 = Ef.comparison_probe(grid_vertex(flat, 0, 1), grid_vertex(flat, 1, 1),
                                    grid_vertex(flat, 3, 1), 16, 7);
    CHECK(rep2.max_cat0_violation <= 1e-9);

    // Around the apex of a 3-squares cone the CAT(0) inequality fails.
    auto cone = generate_cone(3, 2);
    GeodesicEngine Ec(cone.X);
    CHECK_FALSE(Ec.npc());
    CHECK_THROWS_AS(Ec.geodesic_between(PointLocation::vertex(0), PointLocation::vertex(1)),
                    NotNPC);
    const auto& ends = cone.X.edge_ends_at_vertex(cone.points.at("apex").index);
    REQUIRE(ends.size() == 3);
    auto around = [&](int k) {
        const auto& e = cone.X.edge(ends[k].first);
        return PointLocation::vertex(ends[k].second == 0 ? e.v1 : e.v0);
    };
    auto repc = Ec.comparison_probe(around(0), around(1), around(2), 60, 11);
    CHECK(repc.max_cat0_violation > 0.01);
}

TEST_CASE("moussong ball geodesics certify") {
    auto g = generate_moussong_ball(SimpleGraph::cycle(4), 2);
    GeodesicEngine E(g.X);
    std::mt19937 rng(23);
    for (int it = 0; it < 6; ++it) {
        auto p = PointLocation::vertex(static_cast<int>(rng() % g.X.vertex_count()));
        auto q = PointLocation::vertex(static_cast<int>(rng() % g.X.vertex_count()));
        if (p.same_as(q)) continue;
        auto r = E.geodesic_between(p, q, 0.5);
        CHECK(r.certified);
        double oracle = E.mesh_distance(p, q, 0.05);
        CHECK(r.length <= oracle + 1e-9);
    }
}
