#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "agv/chords.hpp"
#include "agv/config_space.hpp"
#include "agv/flow.hpp"
#include "agv/graph.hpp"
#include "agv/patterns.hpp"

namespace agv {

bool operator==(const Edge& a, const Edge& b);

// Radius profile as a finite Fourier series: a0 + sum cos/sin terms.
struct HarmonicSpec {
    double a0 = 0.0;
    std::vector<double> cos_coef, sin_coef;
    friend bool operator==(const HarmonicSpec&, const HarmonicSpec&) = default;
};

// Which velocity field a scenario runs.  kind selects the family; only the
// members that family reads may be set ("colliding" and "broken-seam" are
// diagnostic fields for exercising the safety guard and the validator).
struct FieldSpec {
    std::string kind = "circulating";
    std::optional<GraphPoint> goal_x, goal_y;  // navigation
    std::optional<HarmonicSpec> f;             // tuned
    double omega = 1.0;                        // tuned
    Word word;                                 // chords
    friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

// Integration horizon and start states.  Explicit starts and a sampled
// start_count are mutually exclusive; parsing defaults to one sampled start.
struct SimSpec {
    double t_max = 10.0;
    double dt = 1e-3;
    double delta = kDefaultDelta;
    double tol = kDefaultDockTol;
    double epsilon = 0.05;        // chord switch threshold
    std::vector<Config> starts;
    int start_count = 0;          // > 0: sample this many starts
    unsigned long seed = 0;
    friend bool operator==(const SimSpec&, const SimSpec&) = default;
};

struct OutputSpec {
    std::string csv, svg;         // empty: skip that file
    friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

// Input for the pattern verb: a cyclic edge block and a start edge.
struct PatternSpec {
    std::vector<int> block;
    int start = 0;
    friend bool operator==(const PatternSpec&, const PatternSpec&) = default;
};

struct Scenario {
    std::string graph = "Y";      // built-in name; empty when custom lists given
    std::vector<int> vertices;    // custom graph only
    std::vector<Edge> edges;
    FieldSpec field;
    SimSpec sim;
    OutputSpec output;
    std::optional<PatternSpec> pattern;
    friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Parses one JSON document into a validated Scenario with defaults applied.
// Throws std::invalid_argument with a single-line diagnostic naming the
// offending key (or the line for malformed JSON).
Scenario parse_scenario(const std::string& text);

// Canonical JSON for a Scenario; parse_scenario(render_scenario(s)) == s.
std::string render_scenario(const Scenario& s);

// The graph the scenario runs on (built-in or constructed from the lists).
Graph scenario_graph(const Scenario& s);

// Builds the scenario's velocity field.  Not usable for kind "chords",
// which integrates through a ChordPlan instead; see cmd_simulate.
PiecewiseField scenario_field(const Scenario& s);

// Explicit start list, or start_count configurations sampled uniformly per
// cell (squares and fins alike) with rejection inside the separation guard.
// Sampling is deterministic in (seed, index); the Y-graph is required.
std::vector<Config> scenario_starts(const Scenario& s);

// Trajectory table: t, iota_x, nu_x, iota_y, nu_y, cell, r, theta, event,
// symbol.  Disc coordinates are blank on fins; events between consecutive
// samples are folded into the later row, ';'-joined.
void write_csv(std::ostream& os, const Trajectory& tr, double dock_tol = kDefaultDockTol);

// Self-contained 800x800 phase portrait: unit circle, six seam rays, twelve
// labeled docking zones, and the orbit polyline (fin excursions leave gaps).
void write_svg(std::ostream& os, const Trajectory& tr);

// Exit codes shared by the verb drivers and the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitSafety = 3;
inline constexpr int kExitParse = 4;

struct CmdResult {
    int exit_code = kExitOk;
    std::string report;   // '\n'-terminated lines; errors are one line
};

// Integrates every start, writes the requested files, and reports one
// summary line per start (steady word, Lyapunov statistics, branch-crossing
// cost of the last period, realized cycle error when applicable).
CmdResult cmd_simulate(const Scenario& s);

// Runs the branch-compatibility validator on the scenario's field(s) and
// reports located violations.
CmdResult cmd_validate(const Scenario& s);

// Monotonicity verdict, zone angles, gap angles, and optimal winding class
// for a word given as symbol tokens.
CmdResult cmd_check_word(const std::vector<std::string>& tokens);

// Gap angles and optimal winding class only; the word must be monotone.
CmdResult cmd_gap_angles(const std::vector<std::string>& tokens);

// Level structure, leftover set, and the iterate sequence from the start
// edge until the pattern has locked (two full blocks after entry).
std::string pattern_report(const Graph& g, const std::vector<int>& block, int start);
CmdResult cmd_pattern(const Scenario& s);

// Diagnostics for a tuned-cycle field: profile range, invariance residual
// of r = f(theta), and the convergence gap of a probe bundle.
CmdResult cmd_tune(const Scenario& s);

}  // namespace agv
