#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace agv {

// Finite undirected graph with unit-length edges.  Self-loops are rejected:
// every point of an edge must be separated from the far endpoint by the edge
// metric, which a loop breaks.
struct Edge {
    int id;
    int u, v;   // endpoint vertex ids; the edge parameter runs 0 at u, 1 at v
};

class Graph {
  public:
    Graph(std::vector<int> vertices, std::vector<Edge> edges);

    const std::vector<int>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }

    bool has_vertex(int v) const { return vertex_pos_.count(v) != 0; }
    bool has_edge(int id) const { return edge_pos_.count(id) != 0; }
    const Edge& edge(int id) const;

    // ids of edges incident to vertex v
    const std::vector<int>& incident(int v) const;

    // true when the two edges share at least one endpoint (an edge shares a
    // vertex with itself)
    bool shares_vertex(int e1, int e2) const;

    // hop count between vertices, all edges counted with length 1
    double vertex_distance(int a, int b) const;

  private:
    std::vector<int> vertices_;
    std::vector<Edge> edges_;
    std::unordered_map<int, std::size_t> vertex_pos_;
    std::unordered_map<int, std::size_t> edge_pos_;
    std::unordered_map<int, std::vector<int>> incidence_;
    // pairwise vertex distances, precomputed; graphs here are tiny
    std::vector<std::vector<double>> vdist_;
};

// Point on a graph edge.  `value` is the parameter along the edge (distance
// from the parameter-0 endpoint).  On the Y-graph all edges start at the
// center, so value doubles as the distance-from-center coordinate, and the
// canonical representation of the center itself clears the edge index.
struct GraphPoint {
    std::optional<int> edge;
    double value = 0.0;
};

// Requested motion of one vehicle: which edge to move along and the signed
// rate (positive away from the parameter-0 endpoint).  At a vertex the edge
// index names the edge the vehicle moves onto.
struct Velocity {
    int edge = 0;
    double rate = 0.0;
};

bool operator==(const GraphPoint& a, const GraphPoint& b);

// Collapses (e, 0) to the index-free center representation.  Y-graph only:
// on other graphs (e, 0) sits at an arbitrary vertex and the index is kept.
GraphPoint canonicalize(const GraphPoint& p);

// Path-metric distance between two points of g.  On the Y-graph this is
// |a-b| along a shared edge and a.value + b.value otherwise.
double graph_distance(const Graph& g, const GraphPoint& a, const GraphPoint& b);

// The Y-graph: center vertex 0, leaves 1..3, edges 1..3 with parameter 0 at
// the center.
const Graph& y_graph();

bool is_y_graph(const Graph& g);

std::string to_string(const GraphPoint& p);

}  // namespace agv
