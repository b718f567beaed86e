#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "agv/graph.hpp"

namespace agv {

// An excursion is an edge sequence in which consecutive edges share a vertex.
// Lists the ids; validity is relative to a graph.
bool is_excursion(const Graph& g, const std::vector<int>& edges);

// A block is additionally cyclic: the last edge must share a vertex with the
// first, so the block can repeat forever.
bool is_cyclic_block(const Graph& g, const std::vector<int>& block);

// All length-m windows of the sequence, in order.  Throws when m < 1 or
// m > sequence length.
std::vector<std::vector<int>> m_block_extension(const std::vector<int>& seq, int m);

// Partition of the edge set induced by a block: level 0 is the block itself,
// level n+1 collects edges sharing a vertex with level n that appear in no
// earlier level.  Edges never reached go to `leftover`.
struct PatternLevels {
    std::vector<int> block;                  // as given (may repeat edges)
    std::vector<std::vector<int>> levels;    // levels[0] = block edges, first-appearance order;
                                             // deeper levels sorted by ascending edge id
    std::vector<int> leftover;
    std::unordered_map<int, int> level_of;   // edge id -> level index
};

PatternLevels build_levels(const Graph& g, const std::vector<int>& block);

// Least legal successor.  Block edges advance to the next block position;
// an edge at level p > 0 descends to the first edge of level p-1 (in that
// level's order) sharing a vertex with it.  Throws for leftover edges.
int successor(const Graph& g, const PatternLevels& levels, int edge);

// The discrete feedback map: one application of `successor`.  Iterating it
// from any non-leftover edge reaches the block within p steps and then
// cycles through it.
int graph_controller(const Graph& g, const PatternLevels& levels, int edge);

// Number of iterates before the trajectory is inside the block cycle; equals
// the start edge's level.
int steps_to_pattern(const Graph& g, const PatternLevels& levels, int start);

}  // namespace agv
