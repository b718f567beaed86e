#include "agv/patterns.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace agv {

bool is_excursion(const Graph& g, const std::vector<int>& edges) {
    if (edges.empty()) throw std::invalid_argument("empty edge sequence");
    for (int id : edges)
        if (!g.has_edge(id)) throw std::invalid_argument("unknown edge id " + std::to_string(id));
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        if (!g.shares_vertex(edges[i], edges[i + 1])) return false;
    return true;
}

bool is_cyclic_block(const Graph& g, const std::vector<int>& block) {
    if (!is_excursion(g, block)) return false;
    return g.shares_vertex(block.back(), block.front());
}

std::vector<std::vector<int>> m_block_extension(const std::vector<int>& seq, int m) {
    if (m < 1) throw std::invalid_argument("window length must be at least 1");
    if (static_cast<std::size_t>(m) > seq.size())
        throw std::invalid_argument("window length exceeds sequence length");
    std::vector<std::vector<int>> out;
    for (std::size_t i = 0; i + m <= seq.size(); ++i)
        out.emplace_back(seq.begin() + i, seq.begin() + i + m);
    return out;
}

PatternLevels build_levels(const Graph& g, const std::vector<int>& block) {
    if (!is_cyclic_block(g, block))
        throw std::invalid_argument("block is not a legal cyclic excursion");
    PatternLevels out;
    out.block = block;
    std::vector<int> level0;
    for (int id : block)
        if (std::find(level0.begin(), level0.end(), id) == level0.end()) level0.push_back(id);
    out.levels.push_back(level0);
    for (int id : level0) out.level_of[id] = 0;

    while (true) {
        std::vector<int> next;
        for (const Edge& e : g.edges()) {
            if (out.level_of.count(e.id)) continue;
            bool adjacent = false;
            for (int prev : out.levels.back())
                if (g.shares_vertex(e.id, prev)) { adjacent = true; break; }
            if (adjacent) next.push_back(e.id);
        }
        if (next.empty()) break;
        std::sort(next.begin(), next.end());
        for (int id : next) out.level_of[id] = static_cast<int>(out.levels.size());
        out.levels.push_back(std::move(next));
    }
    for (const Edge& e : g.edges())
        if (!out.level_of.count(e.id)) out.leftover.push_back(e.id);
    std::sort(out.leftover.begin(), out.leftover.end());
    return out;
}

int successor(const Graph& g, const PatternLevels& levels, int edge) {
    auto it = levels.level_of.find(edge);
    if (it == levels.level_of.end())
        throw std::invalid_argument("edge " + std::to_string(edge) +
                                    " is leftover or unknown; no successor");
    int p = it->second;
    if (p == 0) {
        // advance along the block; for a repeated edge the first occurrence
        // decides (the map must stay single-valued)
        const auto& b = levels.block;
        std::size_t i = std::find(b.begin(), b.end(), edge) - b.begin();
        return b[(i + 1) % b.size()];
    }
    for (int cand : levels.levels[p - 1])
        if (g.shares_vertex(edge, cand)) return cand;
    throw std::logic_error("level construction broke adjacency");  // unreachable
}

int graph_controller(const Graph& g, const PatternLevels& levels, int edge) {
    return successor(g, levels, edge);
}

int steps_to_pattern(const Graph& g, const PatternLevels& levels, int start) {
    auto it = levels.level_of.find(start);
    if (it == levels.level_of.end())
        throw std::invalid_argument("start edge is leftover; pattern unreachable");
    (void)g;
    return it->second;
}

}  // namespace agv
