#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "agv/graph.hpp"
#include "agv/patterns.hpp"

using namespace agv;

namespace {

// H shape: two junctions v1, v4 joined by edge 3.
Graph h_graph() {
    return Graph({0, 1, 2, 3, 4, 5},
                 {{1, 0, 1}, {2, 1, 2}, {3, 1, 4}, {4, 3, 4}, {5, 4, 5}});
}

// path 0-1-2-3-4-5 with edges 1..5
Graph chain_graph() {
    return Graph({0, 1, 2, 3, 4, 5},
                 {{1, 0, 1}, {2, 1, 2}, {3, 2, 3}, {4, 3, 4}, {5, 4, 5}});
}

}  // namespace

TEST_CASE("excursions are walks in the line graph") {
    const Graph& y = y_graph();
    CHECK(is_excursion(y, {1, 2}));
    CHECK(is_excursion(y, {1, 2, 3, 1}));
    CHECK(is_excursion(y, {2}));
    Graph h = h_graph();
    CHECK(is_excursion(h, {1, 2, 3, 5}));
    CHECK_FALSE(is_excursion(h, {1, 5}));  // opposite ends of the H
    CHECK_THROWS_AS(is_excursion(y, {}), std::invalid_argument);
    CHECK_THROWS_AS(is_excursion(y, {7}), std::invalid_argument);
}

TEST_CASE("cyclic blocks close up") {
    const Graph& y = y_graph();
    CHECK(is_cyclic_block(y, {1, 2}));
    CHECK(is_cyclic_block(y, {1, 2, 3}));
    CHECK(is_cyclic_block(y, {2}));
    Graph c = chain_graph();
    CHECK(is_cyclic_block(c, {1, 2}));
    CHECK_FALSE(is_cyclic_block(c, {1, 2, 3}));  // ends don't meet
}

TEST_CASE("m block extension slides a window") {
    auto ext = m_block_extension({1, 2, 3, 1, 2}, 2);
    REQUIRE(ext.size() == 4);
    CHECK(ext[0] == std::vector<int>{1, 2});
    CHECK(ext[3] == std::vector<int>{1, 2});
    CHECK(m_block_extension({4}, 1) == std::vector<std::vector<int>>{{4}});
    CHECK_THROWS_AS(m_block_extension({1, 2}, 3), std::invalid_argument);
    CHECK_THROWS_AS(m_block_extension({1, 2}, 0), std::invalid_argument);
}

TEST_CASE("levels fan out from the block") {
    const Graph& y = y_graph();
    auto lv = build_levels(y, {1, 2});
    REQUIRE(lv.levels.size() == 2);
    CHECK(lv.levels[0] == std::vector<int>{1, 2});
    CHECK(lv.levels[1] == std::vector<int>{3});
    CHECK(lv.leftover.empty());
    CHECK(lv.level_of.at(3) == 1);

    auto full = build_levels(y, {1, 2, 3});
    CHECK(full.levels.size() == 1);

    // Υ plus an island edge: the island can never reach the pattern
    Graph yi({0, 1, 2, 3, 4, 5},
             {{1, 0, 1}, {2, 0, 2}, {3, 0, 3}, {4, 4, 5}});
    auto li = build_levels(yi, {1, 2});
    CHECK(li.leftover == std::vector<int>{4});

    CHECK_THROWS_AS(build_levels(y, std::vector<int>{}), std::invalid_argument);
    Graph c = chain_graph();
    CHECK_THROWS_AS(build_levels(c, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("successor cycles the block and descends levels") {
    const Graph& y = y_graph();
    auto lv = build_levels(y, {1, 2});
    CHECK(successor(y, lv, 1) == 2);
    CHECK(successor(y, lv, 2) == 1);
    CHECK(successor(y, lv, 3) == 1);  // least block edge touching e3
    CHECK(graph_controller(y, lv, 3) == 1);

    Graph yi({0, 1, 2, 3, 4, 5},
             {{1, 0, 1}, {2, 0, 2}, {3, 0, 3}, {4, 4, 5}});
    auto li = build_levels(yi, {1, 2});
    CHECK_THROWS_AS(successor(yi, li, 4), std::invalid_argument);
    CHECK_THROWS_AS(steps_to_pattern(yi, li, 4), std::invalid_argument);
}

TEST_CASE("three level chain needs two steps") {
    Graph c = chain_graph();
    auto lv = build_levels(c, {3});
    REQUIRE(lv.levels.size() == 3);
    CHECK(lv.levels[1] == std::vector<int>{2, 4});
    CHECK(lv.levels[2] == std::vector<int>{1, 5});
    CHECK(steps_to_pattern(c, lv, 1) == 2);
    CHECK(steps_to_pattern(c, lv, 4) == 1);
    CHECK(steps_to_pattern(c, lv, 3) == 0);
}

namespace {

Graph random_graph(std::mt19937_64& rng, int& out_edges) {
    std::uniform_int_distribution<int> ndist(3, 8);
    int n = ndist(rng);
    std::vector<int> verts(n);
    for (int i = 0; i < n; ++i) verts[i] = i;
    std::vector<Edge> edges;
    int id = 1;
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> udist(0, v - 1);
        edges.push_back({id++, udist(rng), v});
    }
    std::uniform_int_distribution<int> extra(0, 12 - static_cast<int>(edges.size()));
    int add = extra(rng);
    std::uniform_int_distribution<int> vd(0, n - 1);
    while (add-- > 0) {
        int a = vd(rng), b = vd(rng);
        if (a == b) continue;
        edges.push_back({id++, a, b});
    }
    out_edges = id - 1;
    return Graph(verts, edges);
}

// Independent lock check: scan the iterate sequence for the first index
// from which it replays the block cyclically forever (within the horizon).
int brute_lock_index(const std::vector<int>& seq, const std::vector<int>& block) {
    int m = static_cast<int>(block.size());
    for (int k = 0; k + 2 * m < static_cast<int>(seq.size()); ++k) {
        auto rot = std::find(block.begin(), block.end(), seq[k]);
        if (rot == block.end()) continue;
        int r = static_cast<int>(rot - block.begin());
        bool ok = true;
        for (int n = k; n < static_cast<int>(seq.size()); ++n)
            if (seq[n] != block[(r + n - k) % m]) { ok = false; break; }
        if (ok) return k;
    }
    return -1;
}

}  // namespace

TEST_CASE("iterates descend one level per step and lock") {
    std::mt19937_64 rng(2026);
    for (int trial = 0; trial < 50; ++trial) {
        int ecount = 0;
        Graph g = random_graph(rng, ecount);
        std::uniform_int_distribution<int> ed(1, ecount);
        // single edges are always cyclic blocks; adjacent pairs close up too
        std::vector<int> block{ed(rng)};
        if (trial % 2 == 1) {
            const Edge& e = g.edge(block[0]);
            for (const Edge& f : g.edges())
                if (f.id != e.id && g.shares_vertex(e.id, f.id)) {
                    block.push_back(f.id);
                    break;
                }
        }
        auto lv = build_levels(g, block);

        std::set<int> seen;
        for (const auto& cell : lv.levels)
            for (int e : cell) CHECK(seen.insert(e).second);
        for (int e : lv.leftover) CHECK(seen.insert(e).second);
        CHECK(static_cast<int>(seen.size()) == ecount);

        int deepest = static_cast<int>(lv.levels.size()) - 1;
        for (const Edge& e : g.edges()) {
            if (lv.level_of.find(e.id) == lv.level_of.end()) continue;
            int p = lv.level_of.at(e.id);
            int q = lv.level_of.at(graph_controller(g, lv, e.id));
            CHECK(q == std::max(p - 1, 0));
            CHECK(steps_to_pattern(g, lv, e.id) == p);
            CHECK(p <= deepest);

            std::vector<int> seq{e.id};
            int horizon = deepest + 3 * static_cast<int>(block.size()) + 3;
            for (int s = 0; s < horizon; ++s)
                seq.push_back(graph_controller(g, lv, seq.back()));
            CHECK(brute_lock_index(seq, lv.levels[0]) == p);
        }
    }
}
