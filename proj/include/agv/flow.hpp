#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "agv/config_space.hpp"

namespace agv {

// Joint velocity assignment for the two vehicles at one configuration.
struct FieldValue {
    Velocity vx, vy;
};

// Piecewise-smooth velocity field over the configuration space.  The
// evaluator is pure and may be shared across threads.  Fields that are only
// defined on the squares (covers_fins == false) throw std::domain_error when
// evaluated on a fin.
struct PiecewiseField {
    std::function<FieldValue(const Config&)> eval;
    bool covers_fins = true;
    std::string kind;
};

// Field in disc coordinates; both components are functions of (r, theta).
struct DiscField {
    std::function<double(double, double)> r_dot;
    std::function<double(double, double)> theta_dot;
};

// 2*pi-periodic radius profile with an analytic derivative.
struct PeriodicProfile {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
};

// a0 + sum_k cos_coef[k-1]*cos(k*theta) + sin_coef[k-1]*sin(k*theta)
PeriodicProfile harmonic_profile(double a0, std::vector<double> cos_coef,
                                 std::vector<double> sin_coef);

// The two-vehicle circulating field: three piecewise cases selected by the
// edge relation of the vehicles (same edge; x behind the cyclic successor of
// y's edge; y behind the cyclic successor of x's edge).  Its attracting limit
// cycle is the outer boundary of the square region.
PiecewiseField circulating_field();

// 1 - |nu_x - nu_y| on a shared edge, 1 - max(nu_x, nu_y) otherwise.
// Zero exactly on the docked boundary; decreases along circulating orbits.
double circulating_lyapunov(const Config& c);

// Gradient-descent field driving the pair to a goal configuration.  On the
// squares it is the chart transport of an annulus potential (quadratic wells
// in angle and radius plus an inner collision barrier); on the fins the
// potential is extended by dividing the attaching-ray value by (1 - nu) of
// the inner vehicle, and the descent field points off the fin into the
// squares while matching the square-sheet speeds at the branch vertices.
PiecewiseField navigation_field(const GraphPoint& goal_x, const GraphPoint& goal_y);

// Chart transport of a disc field onto the squares.  Fins are not covered;
// compose with with_fin_descent when orbits may start there.
PiecewiseField pushforward_disc_field(const DiscField& f);

// Extends a squares-only field across the fins using the same-edge descent
// rule of the circulating flow (inner vehicle retreats to the center, outer
// vehicle pushes outward).  Fins drain into the squares, so limit cycles in
// the squares are unaffected.
PiecewiseField with_fin_descent(const PiecewiseField& base);

// Disc field with invariant attracting cycle r = f(theta) traversed at
// angular rate omega:  r_dot = r * (1 - (r - f'(theta) * omega) / f(theta)).
// f must map into (0, 1] and close up over the period.
DiscField tuned_cycle_field(const PeriodicProfile& f, double omega);

enum class EventKind { CellChange, VertexPass, Dock, BoundaryHit, Switch, Converged };

struct Event {
    double t = 0.0;
    EventKind kind = EventKind::CellChange;
    std::string payload;
};

std::string to_string(EventKind k);

struct Sample {
    double t = 0.0;
    Config c;
};

struct Trajectory {
    std::vector<Sample> samples;
    std::vector<Event> events;
    Word word;   // docking symbols in visit order (grazing contacts dropped)
};

// Raised when an integrated orbit lands inside the separation guard.
struct SafetyViolation : std::runtime_error {
    double t;
    explicit SafetyViolation(double when);
};

// External stop predicate: integration halts, with a Switch event labelled
// `label`, when fn first crosses <= 0.
struct StopRule {
    std::function<double(const Config&)> fn;
    std::string label;
};

struct IntegrateOptions {
    double t_max = 10.0;
    double dt = 1e-3;
    int sample_stride = 1;           // keep every k-th step; events always kept
    double dock_tol = kDefaultDockTol;
    double delta = kDefaultDelta;    // separation guard
    bool stop_on_converge = false;   // stop when the joint speed stalls below 1e-6
    std::optional<StopRule> stop;
};

// Fixed-step fourth-order integration with bisection-localized events
// (vertex passes, cell changes, dock threshold crossings, boundary contact,
// guard breach, stop rule).  Deterministic for identical inputs.
Trajectory integrate(const PiecewiseField& field, const Config& start,
                     const IntegrateOptions& opt);
Trajectory integrate(const PiecewiseField& field, const Config& start,
                     double t_max, double dt = 1e-3);

// Rebuilds the docking word of a sampled orbit with the same contact
// tracking integrate uses.  Meant for stitched multi-stage runs, where
// per-stage words would split a contact at the stage boundary and lose it
// to the grazing filter.  Assumes stride-1 sampling.
Word word_from_samples(const std::vector<Sample>& samples,
                       double dock_tol = kDefaultDockTol);

struct DiscSample {
    double t = 0.0;
    DiscPoint p;
};

// Plain fixed-step integration in disc coordinates; the radius is clamped to
// (0, 1] and no events are detected.
std::vector<DiscSample> integrate_disc(const DiscField& f, const DiscPoint& start,
                                       double t_max, double dt = 1e-3);

struct Violation {
    std::string detail;
    std::optional<Config> where;
};

struct ValidityReport {
    bool valid = true;
    std::vector<Violation> violations;
};

// Compatibility test for the one-sided velocity limits of the sheets meeting
// at a graph vertex: all speeds identical and exactly one sheet outgoing
// (positive).  The all-zero case is singular and passes vacuously.
ValidityReport validate_vertex_fields(const std::vector<double>& speeds,
                                      const std::vector<int>& signs,
                                      double tol = 1e-9);

// Samples branch configurations (one vehicle at the center) and checks, per
// sample, that the moving vehicle's three one-sided sheet limits satisfy
// validate_vertex_fields and that the stationary vehicle's limits agree
// across sheets.  Sheets that throw are reported as coverage violations.
ValidityReport validate_config_field(const PiecewiseField& field, int samples);

}  // namespace agv
