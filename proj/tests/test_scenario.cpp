#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "agv/scenario.hpp"

using namespace agv;

namespace {
const double PI = std::acos(-1.0);

Config cfg(int ex, double vx, int ey, double vy) {
    return {GraphPoint{ex, vx}, GraphPoint{ey, vy}};
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

std::string line_with(const std::string& text, const std::string& prefix) {
    std::istringstream is(text);
    std::string ln;
    while (std::getline(is, ln))
        if (ln.rfind(prefix, 0) == 0) return ln;
    return {};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// fields of one CSV row (commas never appear inside a field)
std::vector<std::string> split_csv(const std::string& row) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : row) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}
}  // namespace

TEST_CASE("minimal scenario parses with documented defaults") {
    for (const char* text : {"{}", R"({"field":{"kind":"circulating"}})"}) {
        const Scenario s = parse_scenario(text);
        CHECK(s.graph == "Y");
        CHECK(s.field.kind == "circulating");
        CHECK(s.sim.t_max == 10.0);
        CHECK(s.sim.dt == 1e-3);
        CHECK(s.sim.delta == 0.02);
        CHECK(s.sim.tol == 0.05);
        CHECK(s.sim.epsilon == 0.05);
        CHECK(s.sim.starts.empty());
        CHECK(s.sim.start_count == 1);
        CHECK(s.sim.seed == 0);
        CHECK(s.output.csv.empty());
        CHECK(!s.pattern);
    }
}

TEST_CASE("parse diagnostics name the offending key") {
    auto err = [](const char* text) -> std::string {
        try {
            parse_scenario(text);
        } catch (const std::invalid_argument& e) {
            return e.what();
        }
        return "(no throw)";
    };
    CHECK(contains(err(R"({"field":{"kind":"warp"}})"), "field.kind"));
    CHECK(contains(err(R"({"field":{"kind":"chords","word":["AB11"]}})"), "field.word[0]"));
    CHECK(contains(err(R"({"field":{"kind":"chords","word":["AB11"]}})"), "distinct"));
    CHECK(contains(err(R"({"field":{"kind":"chords","word":["C9"]}})"), "field.word[0]"));
    CHECK(contains(err(R"({"fied":{}})"), "fied"));
    CHECK(contains(err(R"({"sim":{"dt":0}})"), "sim.dt"));
    CHECK(contains(err(R"({"sim":{"t_max":-1}})"), "sim.t_max"));
    CHECK(contains(err(R"({"sim":{"start_count":0}})"), "sim.start_count"));
    CHECK(contains(err(R"({"sim":{"tol":1.5}})"), "sim.tol"));
    CHECK(contains(err("{ nope"), "line 1"));
    CHECK(contains(err("{\n  \"sim\": {\n    \"dt\": oops\n  }\n}"), "line 3"));
    CHECK(contains(err(R"({"field":{"kind":"navigation"}})"), "goal_x"));
    CHECK(contains(err(R"({"field":{"kind":"navigation","goal_x":{"edge":9,"value":0.5},
        "goal_y":{"edge":2,"value":0.5}}})"), "field.goal_x.edge"));
    CHECK(contains(err(R"({"field":{"kind":"circulating","omega":2}})"), "field.omega"));
    CHECK(contains(err(R"({"field":{"kind":"tuned"}})"), "f_harmonics"));
    CHECK(contains(err(R"({"field":{"kind":"tuned","f_harmonics":{"a0":1.2}}})"),
                   "inside (0, 1]"));
    CHECK(contains(err(R"({"field":{"kind":"tuned","f_harmonics":{"a0":0.4,"sin":[0.5]}}})"),
                   "inside (0, 1]"));
    CHECK(contains(err(R"({"field":{"kind":"chords","word":[]}})"), "nonempty word"));
    CHECK(contains(err(R"({"sim":{"starts":[{"x":{"edge":1,"value":0.5},
        "y":{"edge":1,"value":0.505}}]}})"), "sim.starts[0]"));
    CHECK(contains(err(R"({"sim":{"starts":[{"x":{"edge":1,"value":0.2},
        "y":{"edge":2,"value":0.4}}],"start_count":2}})"), "mutually exclusive"));
    CHECK(contains(err(R"({"pattern":{"block":[1,7],"start":3}})"), "pattern.block[1]"));
    CHECK(contains(err(R"({"pattern":{"block":[1,2]}})"), "start"));
    CHECK(contains(err(R"({"graph":"K4"})"), "unknown built-in"));
    CHECK(contains(err(R"({"graph":{"vertices":[0,1]}})"), "graph"));
    CHECK(contains(err(R"({"graph":{"vertices":[0],"edges":[[1,0,0]]}})"), "graph"));
    CHECK(contains(err(R"([1,2])"), "root"));
}

TEST_CASE("render/parse round-trips every scenario shape") {
    std::vector<Scenario> shapes;

    shapes.push_back(parse_scenario("{}"));

    Scenario nav;
    nav.field.kind = "navigation";
    nav.field.goal_x = GraphPoint{1, 0.6};
    nav.field.goal_y = GraphPoint{2, 0.55};
    nav.sim.t_max = 7.5;
    nav.sim.start_count = 3;
    nav.sim.seed = 42;
    nav.output.csv = "nav.csv";
    shapes.push_back(nav);

    Scenario tuned;
    tuned.field.kind = "tuned";
    tuned.field.f = HarmonicSpec{0.5, {0.05}, {0.1, 0.02}};
    tuned.field.omega = -1.25;
    tuned.sim.dt = 2e-3;
    tuned.sim.start_count = 2;
    shapes.push_back(tuned);

    Scenario ch;
    ch.field.kind = "chords";
    ch.field.word = {parse_symbol("A1"), parse_symbol("AB12"), parse_symbol("B3")};
    ch.sim.epsilon = 0.04;
    ch.sim.starts = {cfg(1, 0.5, 2, 0.5), {GraphPoint{1, 0.3}, GraphPoint{1, 0.8}}};
    ch.sim.start_count = 0;
    ch.output.svg = "orbit.svg";
    shapes.push_back(ch);

    Scenario pat;
    pat.graph.clear();
    pat.vertices = {0, 1, 2, 3, 4};
    pat.edges = {{1, 0, 1}, {2, 1, 2}, {3, 2, 3}, {4, 3, 4}};
    pat.sim.start_count = 1;
    pat.pattern = PatternSpec{{2, 3}, 1};
    shapes.push_back(pat);

    for (const Scenario& s : shapes) {
        const std::string text = render_scenario(s);
        const Scenario back = parse_scenario(text);
        CHECK(back == s);
        CHECK(render_scenario(back) == text);
    }
}

TEST_CASE("sampled starts are reproducible, guarded, and cover all cells") {
    Scenario s = parse_scenario(R"({"sim":{"start_count":600,"seed":5,"delta":0.1}})");
    const auto a = scenario_starts(s);
    const auto b = scenario_starts(s);
    REQUIRE(a.size() == 600);
    CHECK(a == b);

    s.sim.seed = 6;
    const auto c = scenario_starts(s);
    bool all_same = true;
    for (std::size_t i = 0; i < c.size(); ++i) all_same = all_same && c[i] == a[i];
    CHECK(!all_same);

    int square = 0, fin_xy = 0, fin_yx = 0;
    for (const Config& k : a) {
        CHECK_NOTHROW(validate_config(k, s.sim.delta));
        const CellId cell = cell_of(k);
        if (cell.kind == CellId::Square)
            ++square;
        else
            ++(cell.b > 0 ? fin_xy : fin_yx);
    }
    // uniform over the twelve cells: six square kinds, three fins each way
    CHECK(square > 230);
    CHECK(fin_xy > 60);
    CHECK(fin_yx > 60);
}

TEST_CASE("csv writer folds events into rows and blanks fin disc columns") {
    Trajectory tr;
    tr.samples.push_back({0.0, cfg(1, 0.45, 2, 0.7)});
    tr.samples.push_back({0.1, {GraphPoint{3, 0.2}, GraphPoint{3, 0.6}}});
    tr.samples.push_back({0.2, cfg(1, 0.97, 2, 0.3)});
    tr.events.push_back({0.05, EventKind::CellChange, "F3xy"});
    tr.events.push_back({0.07, EventKind::VertexPass, "x -> e3"});
    tr.events.push_back({0.25, EventKind::Converged, ""});
    std::ostringstream os;
    write_csv(os, tr);
    const std::string expect =
        "t,iota_x,nu_x,iota_y,nu_y,cell,r,theta,event,symbol\n"
        "0,1,0.45,2,0.7,S12,0.7,0.666305897974,,\n"
        "0.1,3,0.2,3,0.6,F3xy,,,cell-change F3xy;vertex-pass x -> e3,\n"
        "0.2,1,0.97,2,0.3,S12,0.97,0.199964770998,converged,A1\n";
    CHECK(os.str() == expect);
}

TEST_CASE("simulate writes deterministic csv with cyclic cell changes") {
    const char* text = R"({
      "field": {"kind": "circulating"},
      "sim": {"t_max": 16.0,
              "starts": [{"x":{"edge":1,"value":0.45},"y":{"edge":2,"value":0.7}}]},
      "output": {"csv": "test_sc_run.csv", "svg": "test_sc_run.svg"}})";
    const CmdResult r1 = cmd_simulate(parse_scenario(text));
    REQUIRE(r1.exit_code == kExitOk);
    const std::string csv = slurp("test_sc_run.csv");
    const CmdResult r2 = cmd_simulate(parse_scenario(text));
    CHECK(r2.exit_code == kExitOk);
    CHECK(slurp("test_sc_run.csv") == csv);
    CHECK(r2.report == r1.report);

    // the event column lists the visited cells in the circulating order
    std::vector<std::string> cells;
    std::istringstream is(csv);
    std::string row;
    std::getline(is, row);
    CHECK(row == "t,iota_x,nu_x,iota_y,nu_y,cell,r,theta,event,symbol");
    std::size_t rows = 0;
    while (std::getline(is, row)) {
        ++rows;
        const auto f = split_csv(row);
        REQUIRE(f.size() == 10);
        // seam crossings pair the cell change with a vertex pass in one row
        const auto pos = f[8].find("cell-change ");
        if (pos != std::string::npos) cells.push_back(f[8].substr(pos + 12, 3));
    }
    CHECK(rows >= 16000);
    REQUIRE(cells.size() >= 7);
    const auto& cyc = square_cycle();
    std::size_t at = 0;
    while (at < cyc.size() && to_string(cyc[at]) != cells[0]) ++at;
    REQUIRE(at < cyc.size());
    for (std::size_t k = 0; k < cells.size(); ++k)
        CHECK(cells[k] == to_string(cyc[(at + k) % cyc.size()]));

    const std::string line = line_with(r1.report, "start 0:");
    CHECK(contains(line, "wd_last=6"));

    const std::string svg = slurp("test_sc_run.svg");
    CHECK(contains(svg, "<svg xmlns"));
    CHECK(contains(svg, "width=\"800\""));
    CHECK(contains(svg, "<polyline"));
    for (int z = 0; z < 12; ++z)
        CHECK(contains(svg, ">" + to_string(symbol_at_zone(z)) + "</text>"));
    std::remove("test_sc_run.csv");
    std::remove("test_sc_run.svg");
}

TEST_CASE("simulate batches write one indexed file per start") {
    const char* text = R"({
      "field": {"kind": "circulating"},
      "sim": {"t_max": 0.5, "start_count": 3, "seed": 11},
      "output": {"csv": "test_sc_batch.csv"}})";
    const CmdResult r = cmd_simulate(parse_scenario(text));
    CHECK(r.exit_code == kExitOk);
    for (int i = 0; i < 3; ++i) {
        const std::string path = "test_sc_batch_" + std::to_string(i) + ".csv";
        CHECK(!slurp(path).empty());
        std::remove(path.c_str());
    }
    CHECK(contains(r.report, "start 2:"));
}

TEST_CASE("simulate reports chords steady state and realized error") {
    const char* text = R"({
      "field": {"kind": "chords", "word": ["A1","B2","A3"]},
      "sim": {"t_max": 40.0, "dt": 0.002,
              "starts": [{"x":{"edge":1,"value":0.5},"y":{"edge":2,"value":0.5}}]}})";
    const CmdResult r = cmd_simulate(parse_scenario(text));
    REQUIRE(r.exit_code == kExitOk);
    const std::string line = line_with(r.report, "start 0:");
    CHECK(contains(line, "steady=\"A1 B2 A3\""));
    CHECK(contains(line, "cycle_err="));
    CHECK(!contains(line, "cycle_err=n/a"));
}

TEST_CASE("simulate surfaces guard breaches as exit 3 with the time") {
    const char* text = R"({
      "field": {"kind": "colliding"},
      "sim": {"starts": [{"x":{"edge":1,"value":0.9},"y":{"edge":2,"value":0.9}}]}})";
    const CmdResult r = cmd_simulate(parse_scenario(text));
    CHECK(r.exit_code == kExitSafety);
    CHECK(contains(r.report, "safety violation at t="));
}

TEST_CASE("simulate rejects unusable scenarios as exit 2") {
    // epsilon too large for the word's docking separation
    const CmdResult r = cmd_simulate(parse_scenario(
        R"({"field":{"kind":"chords","word":["A1","B2"]},"sim":{"epsilon":0.6}})"));
    CHECK(r.exit_code == kExitValidation);
    CHECK(contains(r.report, "error: "));
}

TEST_CASE("validate passes lemma-built fields and locates broken seams") {
    CmdResult r = cmd_validate(parse_scenario(R"({"field":{"kind":"circulating"}})"));
    CHECK(r.exit_code == kExitOk);
    CHECK(contains(r.report, "valid: yes"));

    r = cmd_validate(parse_scenario(R"({"field":{"kind":"navigation",
        "goal_x":{"edge":1,"value":0.6},"goal_y":{"edge":2,"value":0.6}}})"));
    CHECK(r.exit_code == kExitOk);

    r = cmd_validate(parse_scenario(R"({"field":{"kind":"broken-seam"}})"));
    CHECK(r.exit_code == kExitValidation);
    CHECK(contains(r.report, "valid: no"));
    CHECK(contains(r.report, "violation:"));
    CHECK(contains(r.report, " at x="));
    // the scaled square is S12, so every located violation sits on its seams
    std::istringstream is(r.report);
    std::string ln;
    while (std::getline(is, ln)) {
        if (ln.rfind("violation:", 0) != 0) continue;
        CHECK(contains(ln, "(center)"));
        const bool on_s12_seam = contains(ln, "x=(e1") || contains(ln, "y=(e2") ||
                                 contains(ln, "x=(center)");
        CHECK(on_s12_seam);
    }
}

TEST_CASE("check-word reports the verdict, angles, gaps, and class") {
    CmdResult r = cmd_check_word({"A1", "B2", "A3"});
    CHECK(r.exit_code == kExitOk);
    CHECK(contains(r.report, "monotone: yes"));
    CHECK(contains(r.report, "zone_angles: 0 1.0472 2.0944"));
    CHECK(contains(r.report, "gap_angles: 1.0472 1.0472 4.18879"));
    CHECK(contains(r.report, "winding_class: Zero"));

    r = cmd_check_word({"A1", "B2", "A3", "B1"});
    CHECK(contains(r.report, "winding_class: PlusMinusOne"));

    r = cmd_check_word({"A1", "A3", "B2"});
    CHECK(r.exit_code == kExitOk);
    CHECK(contains(r.report, "monotone: no"));
    CHECK(contains(r.report, "gap_angles: n/a"));

    r = cmd_check_word({"A1"});
    CHECK(contains(r.report, "monotone: yes"));
    CHECK(contains(r.report, "gap_angles: 6.28319"));
    CHECK(contains(r.report, "winding_class: Zero"));

    CHECK(cmd_check_word({"AB11"}).exit_code == kExitParse);
    CHECK(cmd_check_word({}).exit_code == kExitParse);
}

TEST_CASE("gap-angles requires a monotone word") {
    CmdResult r = cmd_gap_angles({"A1"});
    CHECK(r.exit_code == kExitOk);
    CHECK(contains(r.report, "gap_angles: 6.28319"));
    r = cmd_gap_angles({"A1", "A3", "B2"});
    CHECK(r.exit_code == kExitValidation);
    CHECK(contains(r.report, "not monotone"));
}

TEST_CASE("pattern verb prints levels and the locked iterate sequence") {
    const Scenario s = parse_scenario(R"({"pattern":{"block":[1,2],"start":3}})");
    const CmdResult r = cmd_pattern(s);
    REQUIRE(r.exit_code == kExitOk);
    CHECK(contains(r.report, "levels: [e1 e2] [e3]"));
    CHECK(contains(r.report, "leftover: (none)"));
    CHECK(contains(r.report, "steps_to_pattern: 1"));
    CHECK(line_with(r.report, "iterates:") == "iterates: e3 e1 e2 e1 e2");

    // a block covering every edge locks immediately
    const CmdResult all = cmd_pattern(
        parse_scenario(R"({"pattern":{"block":[1,2,3],"start":2}})"));
    CHECK(all.exit_code == kExitOk);
    CHECK(contains(all.report, "steps_to_pattern: 0"));

    // leftover start: an edge in a component the block never reaches
    const CmdResult lo = cmd_pattern(parse_scenario(R"({
        "graph": {"vertices":[0,1,2,3,4,5,6],
                  "edges":[[1,0,1],[2,1,2],[3,2,3],[4,3,4],[9,5,6]]},
        "pattern": {"block":[1], "start":9}})"));
    CHECK(lo.exit_code == kExitValidation);
    CHECK(contains(lo.report, "leftover"));

    CHECK(cmd_pattern(parse_scenario("{}")).exit_code == kExitParse);
}

TEST_CASE("tune reports profile diagnostics") {
    const CmdResult r = cmd_tune(parse_scenario(R"({
        "field": {"kind":"tuned","f_harmonics":{"a0":0.5,"sin":[0.1]},"omega":1.0}})"));
    REQUIRE(r.exit_code == kExitOk);
    CHECK(contains(r.report, "f_min: 0.4"));
    CHECK(contains(r.report, "f_max: 0.6"));
    CHECK(contains(r.report, "valid: yes"));
    const std::string resid = line_with(r.report, "invariant_residual:");
    CHECK(!resid.empty());
    CHECK(std::stod(resid.substr(resid.find(':') + 1)) < 1e-12);
    const std::string gap = line_with(r.report, "convergence_gap:");
    CHECK(std::stod(gap.substr(gap.find(':') + 1)) < 1e-3);

    CHECK(cmd_tune(parse_scenario(R"({"field":{"kind":"circulating"}})")).exit_code ==
          kExitValidation);
}

TEST_CASE("scenario_field rejects kinds without a direct field") {
    const Scenario s = parse_scenario(R"({"field":{"kind":"chords","word":["A1"]}})");
    CHECK_THROWS_AS((void)scenario_field(s), std::invalid_argument);
}
