// Command-line front end: scenario-driven simulation and disc-model
// diagnostics for the two-vehicle guidepath library.
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "agv/scenario.hpp"

namespace {

int load_scenario(const std::string& path, agv::Scenario& out) {
    std::ifstream f(path);
    if (!f) {
        std::printf("agvsim: error: cannot read %s\n", path.c_str());
        return agv::kExitParse;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        out = agv::parse_scenario(ss.str());
    } catch (const std::invalid_argument& e) {
        std::printf("agvsim: parse error: %s\n", e.what());
        return agv::kExitParse;
    }
    return agv::kExitOk;
}

int finish(const agv::CmdResult& r) {
    std::fputs(r.report.c_str(), stdout);
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-vehicle guidepath simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_path, svg_path;
    unsigned long seed = 0;
    int starts = 0;
    std::vector<std::string> tokens;

    CLI::App* sim = app.add_subcommand("simulate", "integrate a scenario and write csv/svg");
    sim->add_option("--scenario", scenario_path, "scenario file")->required();
    sim->add_option("--out", out_path, "trajectory csv path (overrides the scenario)");
    sim->add_option("--svg", svg_path, "phase portrait path (overrides the scenario)");
    CLI::Option* sim_seed = sim->add_option("--seed", seed, "sampling seed override");
    sim->add_option("--starts", starts, "sample this many starts instead")
        ->check(CLI::PositiveNumber);

    CLI::App* val = app.add_subcommand("validate", "run the branch-compatibility validator");
    val->add_option("--scenario", scenario_path, "scenario file")->required();

    CLI::App* cw = app.add_subcommand("check-word", "monotonicity and winding of a word");
    cw->add_option("tokens", tokens, "symbol tokens, e.g. A1 B2 AB32");

    CLI::App* ga = app.add_subcommand("gap-angles", "gap angles and optimal winding class");
    ga->add_option("tokens", tokens, "symbol tokens of a monotone word");

    CLI::App* pat = app.add_subcommand("pattern", "discrete controller iterates for a block");
    pat->add_option("--scenario", scenario_path, "scenario file with a pattern section")
        ->required();

    CLI::App* tune = app.add_subcommand("tune", "tuned-cycle field diagnostics");
    tune->add_option("--scenario", scenario_path, "scenario file with a tuned field")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::printf("agvsim: usage error: %s\n", e.what());
        return agv::kExitParse;
    }

    if (cw->parsed()) return finish(agv::cmd_check_word(tokens));
    if (ga->parsed()) return finish(agv::cmd_gap_angles(tokens));

    agv::Scenario s;
    if (int rc = load_scenario(scenario_path, s); rc != agv::kExitOk) return rc;

    if (sim->parsed()) {
        if (!out_path.empty()) s.output.csv = out_path;
        if (!svg_path.empty()) s.output.svg = svg_path;
        if (sim_seed->count() > 0) s.sim.seed = seed;
        if (starts > 0) {
            s.sim.starts.clear();
            s.sim.start_count = starts;
        }
        return finish(agv::cmd_simulate(s));
    }
    if (val->parsed()) return finish(agv::cmd_validate(s));
    if (pat->parsed()) return finish(agv::cmd_pattern(s));
    return finish(agv::cmd_tune(s));
}
