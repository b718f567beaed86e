#pragma once

#include <utility>
#include <vector>

#include "agv/config_space.hpp"
#include "agv/flow.hpp"

namespace agv {

// Polyline in the configuration space with exact product-metric distances.
// Each segment is a metric geodesic between its endpoints; point-to-segment
// distance folds the tree factors into per-segment linear charts.
class ConfigPolyline {
  public:
    explicit ConfigPolyline(std::vector<Config> vertices, bool closed = true);

    double distance(const Config& c) const;
    const std::vector<Config>& vertices() const { return verts_; }
    bool closed() const { return closed_; }

  private:
    struct Factor {
        int edge = 0;  // 0 at the center
        double value = 0.0;
    };
    struct Box {
        double lo_x = 0.0, hi_x = 0.0, lo_y = 0.0, hi_y = 0.0;
    };
    std::vector<Config> verts_;
    std::vector<Factor> fx_, fy_;
    std::vector<Box> box_;  // per segment, in unsigned coordinates
    bool closed_ = true;
};

// A cyclic docking tour.  One boundary point per symbol at its zone-center
// angle; the ridden arc between consecutive points dips inside the disc so
// skipped zones stay silent; each chord's field attracts to a closed curve
// that follows the arc and rejoins the boundary elsewhere.  Words whose
// largest angular gap exceeds pi retrace the covered range backward instead
// of crossing the gap, so the tour stays in winding class zero.
struct ChordPlan {
    Word word;
    double epsilon = 0.05;
    std::vector<DiscPoint> docking;         // q_j, r = 1
    std::vector<double> omega;              // +1 rides forward, -1 retraces
    int backward = -1;                      // retraced chord index, -1 when none
    std::vector<PeriodicProfile> profiles;  // closed radius profiles f_j
    std::vector<std::vector<Config>> arcs;  // ridden arc alpha_j, q_j -> q_{j+1}
    std::vector<ConfigPolyline> beta;       // full attractor curves
    std::vector<PiecewiseField> fields;     // X^j; fins drain into the squares
};

// Builds the tour for a monotone word.  epsilon is the switch threshold and
// must stay below half the smallest pairwise docking separation.
ChordPlan plan_cycle(const Word& w, double epsilon);

// (Phi, Psi): distance from c to chord j's attractor curve, and the same
// plus the distance still to go to the next docking point.
std::pair<double, double> chord_lyapunov(const ChordPlan& plan, int j, const Config& c);

// Integrates the switched fields: ride chord 1 until some tube Phi^j < eps
// captures the state (lowest index wins), then advance cyclically whenever
// Psi^j < eps.  Switch events carry the entered chord ("chord 2").  Throws
// std::runtime_error when no tube captures within the transient bound.
Trajectory run_cycle(const ChordPlan& plan, const Config& start, double t_max,
                     double dt = 2e-3);

// The last tour's docking symbols (trailing word.size() entries; a
// single-symbol plan reports that symbol).  Throws when the trajectory has
// not completed a tour.
Word steady_word(const Trajectory& traj, const ChordPlan& plan);

// Hausdorff distance between the last completed tour of the trajectory and
// the planned arc cycle.  Requires at least two completed tours.
double realized_cycle_error(const Trajectory& traj, const ChordPlan& plan);

}  // namespace agv
