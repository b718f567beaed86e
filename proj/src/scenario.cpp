#include "agv/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace agv {

namespace {

using njson = nlohmann::ordered_json;

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

std::string fmt(const char* spec, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}
std::string f12(double v) { return fmt("%.12g", v); }
std::string f6(double v) { return fmt("%.6g", v); }

// ---- parsing ------------------------------------------------------------

void check_keys(const njson& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) { known = true; break; }
        if (!known) fail(path + ": unknown key \"" + item.key() + "\"");
    }
}

const njson* get_opt(const njson& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double get_number(const njson& obj, const std::string& path, const char* key, double dflt) {
    const njson* j = get_opt(obj, key);
    if (!j) return dflt;
    if (!j->is_number()) fail(path + "." + key + ": expected a number");
    return j->get<double>();
}

int get_int(const njson& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path + ": expected an integer");
    return j.get<int>();
}

GraphPoint parse_graph_point(const njson& j, const std::string& path, const Graph& g) {
    if (!j.is_object()) fail(path + ": expected an object {edge, value}");
    check_keys(j, path, {"edge", "value"});
    GraphPoint p;
    if (const njson* e = get_opt(j, "edge")) {
        int id = get_int(*e, path + ".edge");
        if (!g.has_edge(id)) fail(path + ".edge: unknown edge id " + std::to_string(id));
        p.edge = id;
    }
    p.value = get_number(j, path, "value", 0.0);
    if (p.value < 0.0 || p.value > 1.0) fail(path + ".value: must lie in [0, 1]");
    if (!p.edge && p.value != 0.0) fail(path + ": a point with no edge must have value 0");
    return is_y_graph(g) ? canonicalize(p) : p;
}

void parse_graph_spec(const njson& j, Scenario& s) {
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name != "Y") fail("graph: unknown built-in graph \"" + name + "\"");
        s.graph = name;
        return;
    }
    if (!j.is_object()) fail("graph: expected a built-in name or {vertices, edges}");
    check_keys(j, "graph", {"vertices", "edges"});
    const njson* vj = get_opt(j, "vertices");
    const njson* ej = get_opt(j, "edges");
    if (!vj || !ej) fail("graph: custom graphs need both vertices and edges");
    if (!vj->is_array()) fail("graph.vertices: expected an array");
    if (!ej->is_array()) fail("graph.edges: expected an array");
    s.graph.clear();
    for (std::size_t k = 0; k < vj->size(); ++k)
        s.vertices.push_back(get_int((*vj)[k], "graph.vertices[" + std::to_string(k) + "]"));
    for (std::size_t k = 0; k < ej->size(); ++k) {
        const njson& t = (*ej)[k];
        const std::string path = "graph.edges[" + std::to_string(k) + "]";
        if (!t.is_array() || t.size() != 3) fail(path + ": expected [id, u, v]");
        s.edges.push_back({get_int(t[0], path), get_int(t[1], path), get_int(t[2], path)});
    }
    try {
        Graph probe(s.vertices, s.edges);
    } catch (const std::exception& e) {
        fail(std::string("graph: ") + e.what());
    }
}

void parse_field_spec(const njson& j, FieldSpec& f, const Graph& g) {
    if (!j.is_object()) fail("field: expected an object");
    if (const njson* kj = get_opt(j, "kind")) {
        if (!kj->is_string()) fail("field.kind: expected a string");
        f.kind = kj->get<std::string>();
    }
    static const std::vector<const char*> kAnyKey = {
        "kind", "goal_x", "goal_y", "f_harmonics", "omega", "word"};
    std::vector<const char*> allowed;
    if (f.kind == "circulating" || f.kind == "colliding" || f.kind == "broken-seam")
        allowed = {"kind"};
    else if (f.kind == "navigation")
        allowed = {"kind", "goal_x", "goal_y"};
    else if (f.kind == "tuned")
        allowed = {"kind", "f_harmonics", "omega"};
    else if (f.kind == "chords")
        allowed = {"kind", "word"};
    else
        fail("field.kind: unknown field kind \"" + f.kind + "\"");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) { ok = true; break; }
        if (ok) continue;
        for (const char* k : kAnyKey)
            if (item.key() == k)
                fail("field." + item.key() + ": not used by field kind \"" + f.kind + "\"");
        fail("field: unknown key \"" + item.key() + "\"");
    }
    if (f.kind == "navigation") {
        const njson* gx = get_opt(j, "goal_x");
        const njson* gy = get_opt(j, "goal_y");
        if (!gx || !gy) fail("field: navigation needs goal_x and goal_y");
        f.goal_x = parse_graph_point(*gx, "field.goal_x", g);
        f.goal_y = parse_graph_point(*gy, "field.goal_y", g);
    }
    if (f.kind == "tuned") {
        const njson* hj = get_opt(j, "f_harmonics");
        if (!hj) fail("field: tuned needs f_harmonics");
        if (!hj->is_object()) fail("field.f_harmonics: expected an object {a0, cos, sin}");
        check_keys(*hj, "field.f_harmonics", {"a0", "cos", "sin"});
        HarmonicSpec h;
        const njson* a0 = get_opt(*hj, "a0");
        if (!a0 || !a0->is_number()) fail("field.f_harmonics.a0: expected a number");
        h.a0 = a0->get<double>();
        auto coefs = [&](const char* key, std::vector<double>& out) {
            const njson* cj = get_opt(*hj, key);
            if (!cj) return;
            if (!cj->is_array()) fail(std::string("field.f_harmonics.") + key + ": expected an array");
            for (std::size_t k = 0; k < cj->size(); ++k) {
                if (!(*cj)[k].is_number())
                    fail(std::string("field.f_harmonics.") + key + "[" + std::to_string(k) +
                         "]: expected a number");
                out.push_back((*cj)[k].get<double>());
            }
        };
        coefs("cos", h.cos_coef);
        coefs("sin", h.sin_coef);
        PeriodicProfile p = harmonic_profile(h.a0, h.cos_coef, h.sin_coef);
        double lo = 1e300, hi = -1e300;
        for (int k = 0; k < 720; ++k) {
            double v = p.value(2.0 * kPi * k / 720.0);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (lo <= 1e-6 || hi > 1.0 + 1e-12)
            fail("field.f_harmonics: profile must stay inside (0, 1]");
        f.f = std::move(h);
        f.omega = get_number(j, "field", "omega", 1.0);
    }
    if (f.kind == "chords") {
        const njson* wj = get_opt(j, "word");
        if (!wj || !wj->is_array() || wj->empty())
            fail("field: chords needs a nonempty word");
        for (std::size_t k = 0; k < wj->size(); ++k) {
            const std::string path = "field.word[" + std::to_string(k) + "]";
            if (!(*wj)[k].is_string()) fail(path + ": expected a symbol token");
            try {
                f.word.push_back(parse_symbol((*wj)[k].get<std::string>()));
            } catch (const std::invalid_argument& e) {
                fail(path + ": " + e.what());
            }
        }
    }
}

void parse_sim_spec(const njson& j, SimSpec& sim, const Graph& g) {
    if (!j.is_object()) fail("sim: expected an object");
    check_keys(j, "sim",
               {"t_max", "dt", "delta", "tol", "epsilon", "starts", "start_count", "seed"});
    sim.t_max = get_number(j, "sim", "t_max", sim.t_max);
    sim.dt = get_number(j, "sim", "dt", sim.dt);
    sim.delta = get_number(j, "sim", "delta", sim.delta);
    sim.tol = get_number(j, "sim", "tol", sim.tol);
    sim.epsilon = get_number(j, "sim", "epsilon", sim.epsilon);
    if (sim.t_max < 0.0) fail("sim.t_max: must be nonnegative");
    if (sim.dt <= 0.0) fail("sim.dt: must be positive");
    if (sim.delta < 0.0 || sim.delta >= 1.0) fail("sim.delta: must lie in [0, 1)");
    if (sim.tol <= 0.0 || sim.tol >= 1.0) fail("sim.tol: must lie in (0, 1)");
    if (sim.epsilon <= 0.0) fail("sim.epsilon: must be positive");
    if (const njson* sj = get_opt(j, "seed")) {
        if (!sj->is_number_integer() || sj->get<long long>() < 0)
            fail("sim.seed: expected a nonnegative integer");
        sim.seed = sj->get<unsigned long>();
    }
    if (const njson* aj = get_opt(j, "starts")) {
        if (!aj->is_array()) fail("sim.starts: expected an array");
        for (std::size_t k = 0; k < aj->size(); ++k) {
            const std::string path = "sim.starts[" + std::to_string(k) + "]";
            const njson& cj = (*aj)[k];
            if (!cj.is_object()) fail(path + ": expected {x, y}");
            check_keys(cj, path, {"x", "y"});
            const njson* xj = get_opt(cj, "x");
            const njson* yj = get_opt(cj, "y");
            if (!xj || !yj) fail(path + ": needs both x and y");
            Config c{parse_graph_point(*xj, path + ".x", g),
                     parse_graph_point(*yj, path + ".y", g)};
            if (is_y_graph(g)) {
                try {
                    validate_config(c, sim.delta);
                } catch (const std::exception& e) {
                    fail(path + ": " + e.what());
                }
            }
            sim.starts.push_back(c);
        }
    }
    if (const njson* cj = get_opt(j, "start_count")) {
        int n = get_int(*cj, "sim.start_count");
        if (n < 1) fail("sim.start_count: must be at least 1");
        if (!sim.starts.empty()) fail("sim: starts and start_count are mutually exclusive");
        sim.start_count = n;
    } else if (sim.starts.empty()) {
        sim.start_count = 1;
    }
}

void parse_pattern_spec(const njson& j, Scenario& s, const Graph& g) {
    if (!j.is_object()) fail("pattern: expected an object");
    check_keys(j, "pattern", {"block", "start"});
    const njson* bj = get_opt(j, "block");
    const njson* sj = get_opt(j, "start");
    if (!bj || !bj->is_array() || bj->empty()) fail("pattern.block: expected a nonempty array");
    PatternSpec p;
    for (std::size_t k = 0; k < bj->size(); ++k) {
        const std::string path = "pattern.block[" + std::to_string(k) + "]";
        int id = get_int((*bj)[k], path);
        if (!g.has_edge(id)) fail(path + ": unknown edge id " + std::to_string(id));
        p.block.push_back(id);
    }
    if (!sj) fail("pattern: needs a start edge");
    p.start = get_int(*sj, "pattern.start");
    if (!g.has_edge(p.start))
        fail("pattern.start: unknown edge id " + std::to_string(p.start));
    s.pattern = std::move(p);
}

}  // namespace

bool operator==(const Edge& a, const Edge& b) {
    return a.id == b.id && a.u == b.u && a.v == b.v;
}

Scenario parse_scenario(const std::string& text) {
    njson doc;
    try {
        doc = njson::parse(text);
    } catch (const njson::parse_error& e) {
        std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        long line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
        fail("line " + std::to_string(line) + ": malformed JSON");
    }
    if (!doc.is_object()) fail("scenario: root must be a JSON object");
    check_keys(doc, "scenario", {"graph", "field", "sim", "output", "pattern"});
    Scenario s;
    if (const njson* j = get_opt(doc, "graph")) parse_graph_spec(*j, s);
    const Graph g = scenario_graph(s);
    if (const njson* j = get_opt(doc, "field")) parse_field_spec(*j, s.field, g);
    if (const njson* j = get_opt(doc, "sim")) {
        parse_sim_spec(*j, s.sim, g);
    } else {
        s.sim.start_count = 1;
    }
    if (const njson* j = get_opt(doc, "output")) {
        if (!j->is_object()) fail("output: expected an object");
        check_keys(*j, "output", {"csv", "svg"});
        if (const njson* c = get_opt(*j, "csv")) {
            if (!c->is_string()) fail("output.csv: expected a path string");
            s.output.csv = c->get<std::string>();
        }
        if (const njson* c = get_opt(*j, "svg")) {
            if (!c->is_string()) fail("output.svg: expected a path string");
            s.output.svg = c->get<std::string>();
        }
    }
    if (const njson* j = get_opt(doc, "pattern")) parse_pattern_spec(*j, s, g);
    return s;
}

namespace {

njson point_json(const GraphPoint& p) {
    njson j = njson::object();
    if (p.edge) j["edge"] = *p.edge;
    j["value"] = p.value;
    return j;
}

}  // namespace

std::string render_scenario(const Scenario& s) {
    njson doc = njson::object();
    if (!s.graph.empty()) {
        doc["graph"] = s.graph;
    } else {
        njson gj = njson::object();
        gj["vertices"] = s.vertices;
        njson ej = njson::array();
        for (const Edge& e : s.edges) ej.push_back({e.id, e.u, e.v});
        gj["edges"] = std::move(ej);
        doc["graph"] = std::move(gj);
    }
    njson fj = njson::object();
    fj["kind"] = s.field.kind;
    if (s.field.goal_x) fj["goal_x"] = point_json(*s.field.goal_x);
    if (s.field.goal_y) fj["goal_y"] = point_json(*s.field.goal_y);
    if (s.field.f) {
        njson hj = njson::object();
        hj["a0"] = s.field.f->a0;
        hj["cos"] = s.field.f->cos_coef;
        hj["sin"] = s.field.f->sin_coef;
        fj["f_harmonics"] = std::move(hj);
        fj["omega"] = s.field.omega;
    }
    if (!s.field.word.empty()) {
        njson wj = njson::array();
        for (const GrammarSymbol& sym : s.field.word) wj.push_back(to_string(sym));
        fj["word"] = std::move(wj);
    }
    doc["field"] = std::move(fj);
    njson sj = njson::object();
    sj["t_max"] = s.sim.t_max;
    sj["dt"] = s.sim.dt;
    sj["delta"] = s.sim.delta;
    sj["tol"] = s.sim.tol;
    sj["epsilon"] = s.sim.epsilon;
    sj["seed"] = s.sim.seed;
    if (!s.sim.starts.empty()) {
        njson aj = njson::array();
        for (const Config& c : s.sim.starts) {
            njson cj = njson::object();
            cj["x"] = point_json(c.x);
            cj["y"] = point_json(c.y);
            aj.push_back(std::move(cj));
        }
        sj["starts"] = std::move(aj);
    } else if (s.sim.start_count > 0) {
        sj["start_count"] = s.sim.start_count;
    }
    doc["sim"] = std::move(sj);
    if (!s.output.csv.empty() || !s.output.svg.empty()) {
        njson oj = njson::object();
        if (!s.output.csv.empty()) oj["csv"] = s.output.csv;
        if (!s.output.svg.empty()) oj["svg"] = s.output.svg;
        doc["output"] = std::move(oj);
    }
    if (s.pattern) {
        njson pj = njson::object();
        pj["block"] = s.pattern->block;
        pj["start"] = s.pattern->start;
        doc["pattern"] = std::move(pj);
    }
    return doc.dump(2) + "\n";
}

Graph scenario_graph(const Scenario& s) {
    if (!s.graph.empty()) {
        if (s.graph == "Y") return y_graph();
        throw std::invalid_argument("graph: unknown built-in graph \"" + s.graph + "\"");
    }
    return Graph(s.vertices, s.edges);
}

namespace {

// Both vehicles race toward the midpoint of edge 1; trips the separation
// guard from any start.  Diagnostic kind for exercising exit code 3.
PiecewiseField colliding_field() {
    PiecewiseField f;
    f.covers_fins = true;
    f.kind = "colliding";
    f.eval = [](const Config& c) -> FieldValue {
        auto pull = [](const GraphPoint& p) -> Velocity {
            if (!p.edge) return {1, 0.3};
            if (*p.edge == 1) return {1, p.value > 0.5 ? -0.3 : 0.3};
            return {*p.edge, -0.3};
        };
        return {pull(c.x), pull(c.y)};
    };
    return f;
}

// Circulating field with one square sheet scaled, so the one-sided limits
// disagree across that square's seams.  Diagnostic kind for the validator.
PiecewiseField broken_seam_field() {
    PiecewiseField base = circulating_field();
    PiecewiseField f;
    f.covers_fins = true;
    f.kind = "broken-seam";
    f.eval = [base](const Config& c) -> FieldValue {
        FieldValue v = base.eval(c);
        CellId cell = cell_of(c);
        if (cell.kind == CellId::Square && cell.a == 1 && cell.b == 2) {
            v.vx.rate *= 1.3;
            v.vy.rate *= 1.3;
        }
        return v;
    };
    return f;
}

}  // namespace

PiecewiseField scenario_field(const Scenario& s) {
    const std::string& k = s.field.kind;
    if (k == "circulating") return circulating_field();
    if (k == "colliding") return colliding_field();
    if (k == "broken-seam") return broken_seam_field();
    if (k == "navigation") {
        if (!s.field.goal_x || !s.field.goal_y)
            throw std::invalid_argument("field: navigation needs goal_x and goal_y");
        return navigation_field(*s.field.goal_x, *s.field.goal_y);
    }
    if (k == "tuned") {
        if (!s.field.f) throw std::invalid_argument("field: tuned needs f_harmonics");
        PeriodicProfile p = harmonic_profile(s.field.f->a0, s.field.f->cos_coef,
                                             s.field.f->sin_coef);
        return with_fin_descent(pushforward_disc_field(tuned_cycle_field(p, s.field.omega)));
    }
    throw std::invalid_argument("field: kind \"" + k + "\" has no direct field");
}

std::vector<Config> scenario_starts(const Scenario& s) {
    if (!s.sim.starts.empty()) return s.sim.starts;
    if (s.sim.start_count <= 0) throw std::invalid_argument("sim: no starts given");
    if (!is_y_graph(scenario_graph(s)))
        throw std::invalid_argument("sim: sampled starts need the Y-graph");
    std::vector<Config> out;
    out.reserve(s.sim.start_count);
    for (int i = 0; i < s.sim.start_count; ++i) {
        // per-start seed, so batch order and worker count cannot matter
        std::mt19937_64 rng(s.sim.seed + 0x9e3779b97f4a7c15ull *
                                             static_cast<unsigned long>(i + 1));
        std::uniform_int_distribution<int> cell_pick(0, 11);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const int cell = cell_pick(rng);
        Config c;
        for (;;) {
            if (cell < 6) {
                const CellId& sq = square_cycle()[cell];
                double nx = unit(rng), ny = unit(rng);
                if (nx + ny < s.sim.delta) continue;
                c = {GraphPoint{sq.a, nx}, GraphPoint{sq.b, ny}};
            } else {
                const int e = (cell - 6) % 3 + 1;
                double u = unit(rng), v = unit(rng);
                if (u > v) std::swap(u, v);
                if (v - u < s.sim.delta) continue;
                c = cell < 9 ? Config{GraphPoint{e, u}, GraphPoint{e, v}}
                             : Config{GraphPoint{e, v}, GraphPoint{e, u}};
            }
            break;
        }
        c.x = canonicalize(c.x);
        c.y = canonicalize(c.y);
        out.push_back(c);
    }
    return out;
}

// ---- file writers -------------------------------------------------------

void write_csv(std::ostream& os, const Trajectory& tr, double dock_tol) {
    os << "t,iota_x,nu_x,iota_y,nu_y,cell,r,theta,event,symbol\n";
    std::size_t ev = 0;
    for (std::size_t k = 0; k < tr.samples.size(); ++k) {
        const Sample& s = tr.samples[k];
        const bool last = k + 1 == tr.samples.size();
        std::string events;
        while (ev < tr.events.size() && (tr.events[ev].t <= s.t + 1e-12 || last)) {
            const Event& e = tr.events[ev++];
            if (!events.empty()) events += ';';
            events += to_string(e.kind);
            if (!e.payload.empty()) {
                events += ' ';
                events += e.payload;
            }
        }
        const CellId cell = cell_of(s.c);
        std::string r, th;
        if (cell.kind == CellId::Square) {
            const DiscPoint d = to_disc(s.c);
            r = f12(d.r);
            th = f12(d.theta);
        }
        const auto sym = docking_symbol(s.c, dock_tol);
        os << f12(s.t) << ',' << (s.c.x.edge ? std::to_string(*s.c.x.edge) : "") << ','
           << f12(s.c.x.value) << ',' << (s.c.y.edge ? std::to_string(*s.c.y.edge) : "")
           << ',' << f12(s.c.y.value) << ',' << to_string(cell) << ',' << r << ',' << th
           << ',' << events << ',' << (sym ? to_string(*sym) : "") << '\n';
    }
}

void write_svg(std::ostream& os, const Trajectory& tr) {
    constexpr double cx = 400.0, cy = 400.0, rad = 360.0;
    auto px = [&](const DiscPoint& d) {
        return std::pair<double, double>{cx + rad * d.r * std::cos(d.theta),
                                         cy - rad * d.r * std::sin(d.theta)};
    };
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
          "viewBox=\"0 0 800 800\">\n"
          "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n"
          "<circle cx=\"400\" cy=\"400\" r=\"360\" fill=\"none\" stroke=\"#333\" "
          "stroke-width=\"2\"/>\n"
          "<circle cx=\"400\" cy=\"400\" r=\"7\" fill=\"#eee\" stroke=\"#999\"/>\n";
    for (int k = 0; k < 6; ++k) {
        const auto [x, y] = px({1.0, k * kPi / 3.0});
        os << "<line x1=\"400\" y1=\"400\" x2=\"" << fmt("%.2f", x) << "\" y2=\""
           << fmt("%.2f", y) << "\" stroke=\"#bbb\" stroke-dasharray=\"6 4\"/>\n";
    }
    for (int z = 0; z < 12; ++z) {
        const GrammarSymbol sym = symbol_at_zone(z);
        const double a = zone_angle(sym);
        const double lx = cx + 383.0 * std::cos(a), ly = cy - 383.0 * std::sin(a);
        os << "<text x=\"" << fmt("%.1f", lx) << "\" y=\"" << fmt("%.1f", ly)
           << "\" font-family=\"monospace\" font-size=\"14\" fill=\"#555\" "
              "text-anchor=\"middle\" dominant-baseline=\"middle\">"
           << to_string(sym) << "</text>\n";
    }
    // orbit, thinned; fins have no disc image and break the polyline
    const std::size_t stride = std::max<std::size_t>(1, tr.samples.size() / 4000);
    std::string pts;
    bool started = false;
    auto flush = [&] {
        if (pts.find(' ') != std::string::npos)
            os << "<polyline points=\"" << pts
               << "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
        pts.clear();
    };
    for (std::size_t k = 0; k < tr.samples.size(); k += stride) {
        const Config& c = tr.samples[k].c;
        if (cell_of(c).kind != CellId::Square) {
            flush();
            continue;
        }
        const auto [x, y] = px(to_disc(c));
        if (!started) {
            os << "<circle cx=\"" << fmt("%.2f", x) << "\" cy=\"" << fmt("%.2f", y)
               << "\" r=\"4\" fill=\"#d62728\"/>\n";
            started = true;
        }
        if (!pts.empty()) pts += ' ';
        pts += fmt("%.2f", x);
        pts += ',';
        pts += fmt("%.2f", y);
    }
    flush();
    os << "</svg>\n";
}

// ---- verb drivers -------------------------------------------------------

namespace {

std::string indexed_path(const std::string& path, std::size_t i, std::size_t n) {
    if (n <= 1) return path;
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + "_" + std::to_string(i);
    return path.substr(0, dot) + "_" + std::to_string(i) + path.substr(dot);
}

// window (t_a, t_b] spanning the last completed period, when one exists
std::optional<std::pair<double, double>> last_period(const Trajectory& tr,
                                                     const std::string& kind,
                                                     const ChordPlan* plan) {
    std::vector<double> ts;
    if (kind == "chords") {
        if (!plan || plan->word.empty()) return std::nullopt;
        if (plan->word.size() == 1) {
            const std::string tok = to_string(plan->word[0]);
            for (const Event& e : tr.events)
                if (e.kind == EventKind::Dock && e.payload == tok) ts.push_back(e.t);
        } else {
            for (const Event& e : tr.events)
                if (e.kind == EventKind::Switch && e.payload == "chord 1") ts.push_back(e.t);
        }
        if (ts.size() < 2) return std::nullopt;
        return std::pair{ts[ts.size() - 2], ts.back()};
    }
    if (kind != "circulating" && kind != "tuned") return std::nullopt;
    std::vector<const Event*> cc;
    for (const Event& e : tr.events)
        if (e.kind == EventKind::CellChange) cc.push_back(&e);
    if (cc.size() < 2) return std::nullopt;
    const std::string& tail = cc.back()->payload;
    for (std::size_t k = cc.size() - 1; k-- > 0;)
        if (cc[k]->payload == tail) return std::pair{cc[k]->t, cc.back()->t};
    return std::nullopt;
}

std::string wd_of_window(const Trajectory& tr, double ta, double tb) {
    std::vector<DiscPoint> poly;
    for (const Sample& s : tr.samples) {
        if (s.t < ta || s.t > tb) continue;
        if (cell_of(s.c).kind != CellId::Square) return "n/a";
        poly.push_back(to_disc(s.c));
    }
    if (poly.size() < 3) return "n/a";
    return std::to_string(wd_cost(poly, true));
}

}  // namespace

CmdResult cmd_simulate(const Scenario& s) {
    std::string report;
    if (!is_y_graph(scenario_graph(s)))
        return {kExitValidation, "error: continuous fields need the Y-graph\n"};
    const bool chords = s.field.kind == "chords";
    ChordPlan plan;
    PiecewiseField field;
    std::vector<Config> starts;
    try {
        if (chords)
            plan = plan_cycle(s.field.word, s.sim.epsilon);
        else
            field = scenario_field(s);
        starts = scenario_starts(s);
    } catch (const std::exception& e) {
        return {kExitValidation, std::string("error: ") + e.what() + "\n"};
    }

    std::function<std::optional<double>(const Config&)> phi;
    if (chords) {
        phi = [&plan](const Config& c) -> std::optional<double> {
            double m = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < plan.beta.size(); ++j)
                m = std::min(m, chord_lyapunov(plan, static_cast<int>(j), c).first);
            return m;
        };
    } else if (s.field.kind == "navigation") {
        const Config goal{*s.field.goal_x, *s.field.goal_y};
        phi = [goal](const Config& c) -> std::optional<double> {
            return config_distance(c, goal);
        };
    } else if (s.field.kind == "tuned") {
        PeriodicProfile p = harmonic_profile(s.field.f->a0, s.field.f->cos_coef,
                                             s.field.f->sin_coef);
        phi = [p](const Config& c) -> std::optional<double> {
            if (cell_of(c).kind != CellId::Square) return std::nullopt;
            const DiscPoint d = to_disc(c);
            return std::fabs(d.r - p.value(d.theta));
        };
    } else {
        phi = [](const Config& c) -> std::optional<double> {
            return circulating_lyapunov(c);
        };
    }

    for (std::size_t i = 0; i < starts.size(); ++i) {
        Trajectory tr;
        try {
            if (chords) {
                tr = run_cycle(plan, starts[i], s.sim.t_max, s.sim.dt);
            } else {
                IntegrateOptions opt;
                opt.t_max = s.sim.t_max;
                opt.dt = s.sim.dt;
                opt.dock_tol = s.sim.tol;
                opt.delta = s.sim.delta;
                opt.stop_on_converge = s.field.kind == "navigation";
                tr = integrate(field, starts[i], opt);
            }
        } catch (const SafetyViolation& v) {
            report += "error: safety violation at t=" + f6(v.t) + " (start " +
                      std::to_string(i) + ")\n";
            return {kExitSafety, report};
        } catch (const std::exception& e) {
            report += "error: " + std::string(e.what()) + " (start " + std::to_string(i) +
                      ")\n";
            return {kExitValidation, report};
        }

        if (!s.output.csv.empty()) {
            const std::string path = indexed_path(s.output.csv, i, starts.size());
            std::ofstream os(path);
            if (!os) return {kExitParse, "error: cannot write " + path + "\n"};
            write_csv(os, tr, s.sim.tol);
        }
        if (!s.output.svg.empty()) {
            const std::string path = indexed_path(s.output.svg, i, starts.size());
            std::ofstream os(path);
            if (!os) return {kExitParse, "error: cannot write " + path + "\n"};
            write_svg(os, tr);
        }

        // Lyapunov statistics on a thinned grid (chord tube distances are
        // polyline queries, too slow for every sample)
        const std::size_t stride = std::max<std::size_t>(1, tr.samples.size() / 2000);
        std::optional<double> phi0, phi_end;
        double phi_min = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < tr.samples.size(); k += stride) {
            if (const auto v = phi(tr.samples[k].c)) {
                if (!phi0) phi0 = *v;
                phi_end = *v;
                phi_min = std::min(phi_min, *v);
            }
        }
        if (!tr.samples.empty()) {
            if (const auto v = phi(tr.samples.back().c)) {
                phi_end = *v;
                phi_min = std::min(phi_min, *v);
            }
        }

        std::string line = "start " + std::to_string(i) + ": t_end=" +
                           f6(tr.samples.empty() ? 0.0 : tr.samples.back().t) +
                           " samples=" + std::to_string(tr.samples.size());
        line += " phi0=" + (phi0 ? f6(*phi0) : "n/a");
        line += " phi_end=" + (phi_end ? f6(*phi_end) : "n/a");
        line += " phi_min=" + (phi_end ? f6(phi_min) : "n/a");
        line += " word=\"" + to_string(tr.word) + "\"";
        if (const auto w = last_period(tr, s.field.kind, chords ? &plan : nullptr))
            line += " wd_last=" + wd_of_window(tr, w->first, w->second);
        else
            line += " wd_last=n/a";
        if (chords) {
            try {
                line += " steady=\"" + to_string(steady_word(tr, plan)) + "\"";
            } catch (const std::exception&) {
                line += " steady=n/a";
            }
            try {
                line += " cycle_err=" + f6(realized_cycle_error(tr, plan));
            } catch (const std::exception&) {
                line += " cycle_err=n/a";
            }
        }
        report += line + "\n";
    }
    return {kExitOk, report};
}

CmdResult cmd_validate(const Scenario& s) {
    if (!is_y_graph(scenario_graph(s)))
        return {kExitValidation, "error: continuous fields need the Y-graph\n"};
    std::vector<std::pair<std::string, PiecewiseField>> fields;
    try {
        if (s.field.kind == "chords") {
            ChordPlan plan = plan_cycle(s.field.word, s.sim.epsilon);
            for (std::size_t j = 0; j < plan.fields.size(); ++j)
                fields.emplace_back("chord " + std::to_string(j + 1), plan.fields[j]);
        } else {
            fields.emplace_back(s.field.kind, scenario_field(s));
        }
    } catch (const std::exception& e) {
        return {kExitValidation, std::string("error: ") + e.what() + "\n"};
    }
    std::string report = "field: " + s.field.kind + "\n";
    std::size_t bad = 0;
    for (const auto& [label, f] : fields) {
        const ValidityReport r = validate_config_field(f, 500);
        for (const Violation& v : r.violations) {
            ++bad;
            report += "violation:";
            if (fields.size() > 1) report += " [" + label + "]";
            report += " " + v.detail;
            if (v.where)
                report += " at x=" + to_string(v.where->x) + " y=" + to_string(v.where->y);
            report += "\n";
        }
    }
    if (bad == 0) {
        report += "valid: yes\n";
        return {kExitOk, report};
    }
    report += "valid: no (" + std::to_string(bad) + " violations)\n";
    return {kExitValidation, report};
}

namespace {

CmdResult parse_word_tokens(const std::vector<std::string>& tokens, Word& w) {
    if (tokens.empty()) return {kExitParse, "error: no word tokens given\n"};
    for (std::size_t k = 0; k < tokens.size(); ++k) {
        try {
            w.push_back(parse_symbol(tokens[k]));
        } catch (const std::invalid_argument& e) {
            return {kExitParse,
                    "error: token " + std::to_string(k + 1) + ": " + e.what() + "\n"};
        }
    }
    return {kExitOk, ""};
}

std::string angles_line(const char* label, const std::vector<double>& vals) {
    std::string out = label;
    for (double v : vals) {
        out += ' ';
        out += f6(v);
    }
    return out + "\n";
}

}  // namespace

CmdResult cmd_check_word(const std::vector<std::string>& tokens) {
    Word w;
    if (CmdResult err = parse_word_tokens(tokens, w); err.exit_code != kExitOk) return err;
    std::string report = "word: " + to_string(w) + "\n";
    std::vector<double> thetas;
    for (const GrammarSymbol& sym : w) thetas.push_back(zone_angle(sym));
    report += angles_line("zone_angles:", thetas);
    if (!is_monotone(w)) {
        report += "monotone: no\ngap_angles: n/a\nwinding_class: n/a\n";
        return {kExitOk, report};
    }
    report += "monotone: yes\n";
    const std::vector<double> gaps = gap_angles(thetas);
    report += angles_line("gap_angles:", gaps);
    report += std::string("winding_class: ") +
              (optimal_winding_class(gaps) == WindingClass::Zero ? "Zero" : "PlusMinusOne") +
              "\n";
    return {kExitOk, report};
}

CmdResult cmd_gap_angles(const std::vector<std::string>& tokens) {
    Word w;
    if (CmdResult err = parse_word_tokens(tokens, w); err.exit_code != kExitOk) return err;
    if (!is_monotone(w)) return {kExitValidation, "error: word is not monotone\n"};
    std::vector<double> thetas;
    for (const GrammarSymbol& sym : w) thetas.push_back(zone_angle(sym));
    const std::vector<double> gaps = gap_angles(thetas);
    std::string report = angles_line("gap_angles:", gaps);
    report += std::string("winding_class: ") +
              (optimal_winding_class(gaps) == WindingClass::Zero ? "Zero" : "PlusMinusOne") +
              "\n";
    return {kExitOk, report};
}

std::string pattern_report(const Graph& g, const std::vector<int>& block, int start) {
    if (!g.has_edge(start))
        throw std::invalid_argument("pattern: unknown start edge e" + std::to_string(start));
    if (!is_cyclic_block(g, block))
        throw std::invalid_argument("pattern: block is not a cyclic edge sequence");
    const PatternLevels levels = build_levels(g, block);
    if (levels.level_of.find(start) == levels.level_of.end())
        throw std::invalid_argument("pattern: start edge e" + std::to_string(start) +
                                    " is in the leftover set");
    std::string out = "levels:";
    for (const auto& lv : levels.levels) {
        out += " [";
        for (std::size_t k = 0; k < lv.size(); ++k)
            out += (k ? " e" : "e") + std::to_string(lv[k]);
        out += "]";
    }
    out += "\nleftover:";
    if (levels.leftover.empty()) {
        out += " (none)";
    } else {
        for (int e : levels.leftover) out += " e" + std::to_string(e);
    }
    out += "\nsteps_to_pattern: " + std::to_string(steps_to_pattern(g, levels, start));
    out += "\niterates: e" + std::to_string(start);
    int cur = start, in_block = 0;
    while (in_block < 2 * static_cast<int>(block.size())) {
        cur = graph_controller(g, levels, cur);
        out += " e" + std::to_string(cur);
        if (levels.level_of.at(cur) == 0) ++in_block;
    }
    return out + "\n";
}

CmdResult cmd_pattern(const Scenario& s) {
    if (!s.pattern) return {kExitParse, "error: scenario has no pattern section\n"};
    try {
        return {kExitOk, pattern_report(scenario_graph(s), s.pattern->block, s.pattern->start)};
    } catch (const std::invalid_argument& e) {
        return {kExitValidation, std::string("error: ") + e.what() + "\n"};
    }
}

CmdResult cmd_tune(const Scenario& s) {
    if (s.field.kind != "tuned" || !s.field.f)
        return {kExitValidation, "error: tune needs a tuned field with f_harmonics\n"};
    const PeriodicProfile p = harmonic_profile(s.field.f->a0, s.field.f->cos_coef,
                                               s.field.f->sin_coef);
    const DiscField df = tuned_cycle_field(p, s.field.omega);
    double lo = 1e300, hi = -1e300, resid = 0.0;
    for (int k = 0; k < 720; ++k) {
        const double th = 2.0 * kPi * k / 720.0;
        const double v = p.value(th);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        resid = std::max(resid, std::fabs(df.r_dot(v, th) - p.deriv(th) * s.field.omega));
    }
    double gap = 0.0;
    for (double r0 : {0.15, 0.55, 0.95}) {
        for (double th0 : {0.4, 2.5, 4.6}) {
            const auto orbit = integrate_disc(df, {r0, th0}, 20.0, 1e-3);
            const DiscPoint& d = orbit.back().p;
            gap = std::max(gap, std::fabs(d.r - p.value(d.theta)));
        }
    }
    std::string report = "f_min: " + f6(lo) + "\nf_max: " + f6(hi) + "\nomega: " +
                         f6(s.field.omega) + "\ninvariant_residual: " + f6(resid) +
                         "\nconvergence_gap: " + f6(gap) + "\n";
    const bool ok = lo > 0.0 && hi <= 1.0 + 1e-12 && resid < 1e-9;
    report += ok ? "valid: yes\n" : "valid: no\n";
    return {ok ? kExitOk : kExitValidation, report};
}

}  // namespace agv
