#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cat0/generators.hpp"
#include "cat0/link_condition.hpp"

#include <random>

using namespace cat0;

TEST_CASE("shortest essential loop on basic graphs") {
    // Circle of total length 2*pi built from four arcs.
    MetricGraph circle;
    for (int i = 0; i < 4; ++i) circle.add_node();
    for (int i = 0; i < 4; ++i) circle.add_arc(i, (i + 1) % 4, kPi / 2);
    CHECK(shortest_essential_loop(circle).length == doctest::Approx(kTwoPi));

    MetricGraph theta;
    theta.add_node();
    theta.add_node();
    for (int i = 0; i < 3; ++i) theta.add_arc(0, 1, kPi);
    CHECK(shortest_essential_loop(theta).length == doctest::Approx(kTwoPi));

    MetricGraph tree;
    for (int i = 0; i < 4; ++i) tree.add_node();
    tree.add_arc(0, 1, 1.0);
    tree.add_arc(1, 2, 2.0);
    tree.add_arc(1, 3, 0.5);
    CHECK(shortest_essential_loop(tree).length == kInf);

    MetricGraph loop;
    loop.add_node();
    loop.add_arc(0, 0, 0.75);
    CHECK(shortest_essential_loop(loop).length == doctest::Approx(0.75));
}

TEST_CASE("shortest essential loop agrees with exhaustive enumeration") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 60; ++trial) {
        MetricGraph g;
        int n = 2 + static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i) g.add_node();
        int m = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < m; ++i) {
            int a = static_cast<int>(rng() % n);
            int b = static_cast<int>(rng() % n);
            double len = 0.25 + (rng() % 100) / 25.0;
            g.add_arc(a, b, len);
        }
        auto fast = shortest_essential_loop(g);
        auto all = enumerate_simple_cycles(g);
        double brute = kInf;
        for (const auto& c : all) brute = std::min(brute, c.length);
        if (brute == kInf)
            CHECK(fast.length == kInf);
        else
            CHECK(fast.length == doctest::Approx(brute).epsilon(1e-9));
        // The witness realizes the reported length.
        if (fast.length < kInf) {
            double sum = 0;
            for (int a : fast.arcs) sum += g.arcs[a].len;
            CHECK(sum == doctest::Approx(fast.length).epsilon(1e-9));
        }
    }
}

TEST_CASE("monotonicity: lengthening an arc never shortens the minimal loop") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        MetricGraph g;
        int n = 3 + static_cast<int>(rng() % 3);
        for (int i = 0; i < n; ++i) g.add_node();
        for (int i = 0; i < 6; ++i)
            g.add_arc(static_cast<int>(rng() % n), static_cast<int>(rng() % n),
                      0.5 + (rng() % 50) / 10.0);
        double before = shortest_essential_loop(g).length;
        int pick = static_cast<int>(rng() % g.arc_count());
        g.arcs[pick].len += 1.0;
        double after = shortest_essential_loop(g).length;
        CHECK(after >= before - 1e-12);
    }
}

TEST_CASE("link condition verdicts on generated complexes") {
    CHECK(check_link_condition(generate_grid(3).X).pass);
    CHECK(check_link_condition(generate_hex(2).X).pass);
    CHECK(check_link_condition(generate_triplane(2).X).pass);
    CHECK(check_link_condition(generate_flap_grid(4, 2).X).pass);

    auto cone3 = generate_cone(3, 1);
    auto v3 = check_link_condition(cone3.X);
    CHECK_FALSE(v3.pass);
    CHECK(v3.loop_length == doctest::Approx(3 * kPi / 2));

    auto cone5 = generate_cone(5, 1);
    auto v5 = check_link_condition(cone5.X);
    CHECK(v5.pass);
    CHECK(v5.loop_length == doctest::Approx(5 * kPi / 2));
}

TEST_CASE("link diameters") {
    MetricGraph circle;
    circle.add_node();
    circle.add_arc(0, 0, kTwoPi);
    CHECK(link_diameter(circle) == doctest::Approx(kPi));

    MetricGraph arc;
    arc.add_node();
    arc.add_node();
    arc.add_arc(0, 1, kPi);
    CHECK(link_diameter(arc) == doctest::Approx(kPi));

    MetricGraph theta;
    theta.add_node();
    theta.add_node();
    for (int i = 0; i < 3; ++i) theta.add_arc(0, 1, kPi);

    // Brute-force oracle at resolution 1e-3: sample pairs of points on arcs.
    double brute = 0;
    int steps = 1000;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            for (int a = 0; a <= steps; a += 7)
                for (int bmk = 0; bmk <= steps; bmk += 7) {
                    auto p = GraphPoint::on_arc(i, kPi * a / steps);
                    auto q = GraphPoint::on_arc(j, kPi * bmk / steps);
                    brute = std::max(brute, graph_point_distance(theta, p, q));
                }
    double exact = link_diameter(theta);
    CHECK(exact == doctest::Approx(kPi).epsilon(1e-9));
    CHECK(exact >= brute - 1e-9);
    CHECK(exact <= brute + 2 * kPi * 7.0 / steps);

    MetricGraph disconnected;
    disconnected.add_node();
    disconnected.add_node();
    disconnected.add_node();
    disconnected.add_arc(0, 1, 1.0);
    CHECK_THROWS_AS(link_diameter(disconnected), DisconnectedGraph);
}

TEST_CASE("metric graph isomorphism") {
    auto c4a = SimpleGraph::cycle(4);
    MetricGraph a, b;
    for (int i = 0; i < 4; ++i) a.add_node();
    for (auto [x, y] : c4a.edges) a.add_arc(x, y, 2 * kPi / 3);
    for (int i = 0; i < 4; ++i) b.add_node();
    b.add_arc(2, 1, 2 * kPi / 3);
    b.add_arc(1, 0, 2 * kPi / 3);
    b.add_arc(0, 3, 2 * kPi / 3);
    b.add_arc(3, 2, 2 * kPi / 3);
    CHECK(metric_graphs_isomorphic(a, b));
    b.arcs[0].len = kPi;
    CHECK_FALSE(metric_graphs_isomorphic(a, b));
}
