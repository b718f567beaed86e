#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "agv/graph.hpp"

using namespace agv;

TEST_CASE("y graph layout") {
    const Graph& g = y_graph();
    CHECK(g.vertices().size() == 4);
    CHECK(g.edges().size() == 3);
    for (int e = 1; e <= 3; ++e) {
        CHECK(g.edge(e).u == 0);
        CHECK(g.edge(e).v == e);
    }
    CHECK(g.shares_vertex(1, 2));
    CHECK(g.shares_vertex(2, 2));
    CHECK(g.incident(0).size() == 3);
    CHECK(g.incident(1).size() == 1);
}

TEST_CASE("graph construction rejects bad input") {
    CHECK_THROWS_AS(Graph({0, 1}, {{1, 0, 0}}), std::invalid_argument);        // self-loop
    CHECK_THROWS_AS(Graph({0, 1}, {{1, 0, 2}}), std::invalid_argument);        // unknown vertex
    CHECK_THROWS_AS(Graph({0, 0}, {}), std::invalid_argument);                 // dup vertex
    CHECK_THROWS_AS(Graph({0, 1, 2}, {{1, 0, 1}, {1, 1, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(y_graph().edge(9), std::invalid_argument);
}

TEST_CASE("distance on the y graph") {
    const Graph& g = y_graph();
    GraphPoint a{1, 0.3}, b{1, 0.8}, c{2, 0.4};
    CHECK(graph_distance(g, a, b) == doctest::Approx(0.5));
    CHECK(graph_distance(g, a, c) == doctest::Approx(0.7));  // through the center
    GraphPoint center{std::nullopt, 0.0};
    CHECK(graph_distance(g, center, b) == doctest::Approx(0.8));
    CHECK(graph_distance(g, center, center) == doctest::Approx(0.0));
    CHECK_THROWS_AS(graph_distance(g, GraphPoint{1, -0.1}, b), std::invalid_argument);
}

TEST_CASE("canonicalize clears the index exactly at zero") {
    GraphPoint p{2, 0.0};
    CHECK(canonicalize(p) == GraphPoint{std::nullopt, 0.0});
    GraphPoint q{2, 1e-12};
    CHECK(canonicalize(q) == q);
}

TEST_CASE("distance picks the short way around a cycle") {
    // square cycle v0-v1-v2-v3-v0
    Graph g({0, 1, 2, 3}, {{1, 0, 1}, {2, 1, 2}, {3, 2, 3}, {4, 3, 0}});
    GraphPoint a{1, 0.1};   // near v0 on edge 1
    GraphPoint b{4, 0.9};   // near v0 on edge 4
    CHECK(graph_distance(g, a, b) == doctest::Approx(0.2));
    GraphPoint c{3, 0.5};
    // both ways around measure 2.4 and 1.6
    CHECK(graph_distance(g, a, c) == doctest::Approx(1.6));
}

TEST_CASE("distance is a metric on random points") {
    Graph g({0, 1, 2, 3, 4}, {{1, 0, 1}, {2, 1, 2}, {3, 2, 3}, {4, 3, 0}, {5, 1, 4}});
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> pick_edge(1, 5);
    std::uniform_real_distribution<double> pick_t(0.0, 1.0);
    auto sample = [&] { return GraphPoint{pick_edge(rng), pick_t(rng)}; };
    for (int it = 0; it < 500; ++it) {
        GraphPoint a = sample(), b = sample(), c = sample();
        double ab = graph_distance(g, a, b);
        double ba = graph_distance(g, b, a);
        CHECK(ab == doctest::Approx(ba));
        CHECK(ab >= 0.0);
        CHECK(graph_distance(g, a, a) == doctest::Approx(0.0));
        CHECK(ab <= graph_distance(g, a, c) + graph_distance(g, c, b) + 1e-12);
    }
}
