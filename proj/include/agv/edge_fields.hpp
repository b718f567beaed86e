#pragma once

#include <map>
#include <utility>
#include <vector>

#include "agv/graph.hpp"
#include "agv/patterns.hpp"

namespace agv {

// Single-vehicle field pulling toward a fixed interior point of one edge.
// Defined on the goal edge plus a collar slice of every edge sharing one of
// its endpoints; the potential is the path distance to the goal, scaled so
// the alpha-sublevel sits strictly inside the goal edge.
struct EdgePointField {
    Graph g;
    GraphPoint goal;
    double alpha = 0.1;
    double collar = 1.0;          // reach into neighbouring edges, (0, 1]
    double lyapunov_scale = 1.0;
    double gain = 4.0;            // pull strength on the goal edge
};

EdgePointField make_edge_point_field(const Graph& g, const GraphPoint& goal,
                                     double alpha = 0.1, double collar = 1.0);

bool in_domain(const EdgePointField& f, const GraphPoint& p);

// Field value at p; throws std::domain_error off the domain.  On the goal
// edge the pull is linear in the offset; collar edges drift at constant
// speed toward the shared vertex, matching the goal-edge speed there.
Velocity velocity(const EdgePointField& f, const GraphPoint& p);

// Scaled path distance to the goal; zero only at the goal.
double lyapunov(const EdgePointField& f, const GraphPoint& p);

// True when a's goal, together with the whole alpha-sublevel of a's
// potential around it, lies inside b's domain.  alpha < 0 uses a.alpha.
bool prepares(const EdgePointField& a, const EdgePointField& b, double alpha = -1.0);

// One fixed step of the field from p.  Vertex crossings are localized by
// bisection and cut the step; *consumed reports the time actually used.
// Crossing a vertex moves the point onto the goal edge; leaving the domain
// through any other vertex throws std::runtime_error.
GraphPoint step_field(const EdgePointField& f, const GraphPoint& p, double dt,
                      double* consumed = nullptr);

struct HybridEvent {
    double t;
    enum Kind { EdgeEnter, Activate, Arrival } kind;
    int edge;  // entered edge / newly active field's edge / edge whose potential crossed
};

// Sequencer over per-edge point fields: serves the active edge's goal, then
// hands over to the successor edge's field, replaying the discrete
// controller on the continuous state.
struct HybridController {
    Graph g;
    PatternLevels levels;
    std::map<int, EdgePointField> fields;
    double alpha = 0.1;
    double t = 0.0;
    int mode = -1;          // edge whose field is active; set on first step
    int current_edge = -1;
    bool switched_this_dwell = false;
};

// Validates that every non-leftover edge has a field with its goal on that
// edge and that each field prepares its successor's field.
HybridController make_single_agv_hybrid(const PatternLevels& levels,
                                        std::map<int, EdgePointField> fields,
                                        double alpha = 0.1);

// Advances one step (possibly cut short at a vertex crossing, a potential
// crossing of alpha, or a mode switch), logging what happened.
std::pair<GraphPoint, std::vector<HybridEvent>> step_hybrid(HybridController& c,
                                                            const GraphPoint& p,
                                                            double dt);

// Runs until t_max and returns the edge-transition log, start edge first.
std::vector<int> run_hybrid(HybridController& c, const GraphPoint& start,
                            double t_max, double dt = 1e-3);

}  // namespace agv
