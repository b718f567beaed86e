#include "agv/edge_fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace agv {

namespace {

constexpr double kCrossTimeTol = 1e-9;

void check_point(const Graph& g, const GraphPoint& p, const char* who) {
    if (!p.edge) throw std::invalid_argument(std::string(who) + " needs an edge index");
    if (!g.has_edge(*p.edge)) throw std::invalid_argument(std::string(who) + " names an unknown edge");
    if (p.value < 0.0 || p.value > 1.0)
        throw std::invalid_argument(std::string(who) + " parameter outside [0,1]");
}

// offset of p from vertex w along its own edge
double offset_from(const Edge& e, double value, int w) {
    return w == e.u ? value : 1.0 - value;
}

// endpoint of the goal edge the collar edge should drain into: the shared
// vertex nearest the goal
int entry_vertex(const EdgePointField& f, const Edge& e) {
    const Edge& ge = f.g.edge(*f.goal.edge);
    int best = -1;
    double best_d = 0.0;
    for (int w : {e.u, e.v}) {
        if (w != ge.u && w != ge.v) continue;
        const double d = offset_from(ge, f.goal.value, w);
        if (best < 0 || d < best_d) {
            best = w;
            best_d = d;
        }
    }
    return best;  // -1: e does not touch the goal edge
}

}  // namespace

EdgePointField make_edge_point_field(const Graph& g, const GraphPoint& goal,
                                     double alpha, double collar) {
    check_point(g, goal, "goal");
    if (goal.value == 0.0 || goal.value == 1.0)
        throw std::invalid_argument("goal must be interior to its edge, not at a vertex");
    if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("alpha outside (0,1)");
    if (collar <= 0.0 || collar > 1.0) throw std::invalid_argument("collar outside (0,1]");
    EdgePointField f{g, goal, alpha, collar, 1.0, 4.0};
    // keep the alpha-sublevel of the potential strictly inside the goal edge
    const double margin = std::min(goal.value, 1.0 - goal.value);
    f.lyapunov_scale = std::max(1.0, alpha / (0.8 * margin));
    return f;
}

bool in_domain(const EdgePointField& f, const GraphPoint& p) {
    if (!p.edge || !f.g.has_edge(*p.edge)) return false;
    if (p.value < 0.0 || p.value > 1.0) return false;
    if (*p.edge == *f.goal.edge) return true;
    const Edge& e = f.g.edge(*p.edge);
    const Edge& ge = f.g.edge(*f.goal.edge);
    for (int w : {e.u, e.v})
        if ((w == ge.u || w == ge.v) && offset_from(e, p.value, w) < f.collar)
            return true;
    return false;
}

namespace {

// signed rate along the edge holding the state; no domain check, usable on
// integrator stage values slightly outside [0,1]
double edge_rate_at(const EdgePointField& f, int edge, double value) {
    if (edge == *f.goal.edge) return -f.gain * (value - f.goal.value);
    const int w = entry_vertex(f, f.g.edge(edge));
    const double speed = f.gain * offset_from(f.g.edge(*f.goal.edge), f.goal.value, w);
    return w == f.g.edge(edge).u ? -speed : speed;
}

}  // namespace

Velocity velocity(const EdgePointField& f, const GraphPoint& p) {
    if (!in_domain(f, p)) throw std::domain_error("point outside the field domain");
    return {*p.edge, edge_rate_at(f, *p.edge, p.value)};
}

double lyapunov(const EdgePointField& f, const GraphPoint& p) {
    if (!in_domain(f, p)) throw std::domain_error("point outside the field domain");
    return graph_distance(f.g, p, f.goal) * f.lyapunov_scale;
}

bool prepares(const EdgePointField& a, const EdgePointField& b, double alpha) {
    if (alpha < 0.0) alpha = a.alpha;
    if (!in_domain(b, a.goal)) return false;
    // the sublevel is an interval of the goal edge; sweep it
    const double radius = alpha / a.lyapunov_scale;
    const double lo = std::max(0.0, a.goal.value - radius);
    const double hi = std::min(1.0, a.goal.value + radius);
    for (double v = lo; v <= hi + 1e-12; v += 1e-3)
        if (!in_domain(b, GraphPoint{*a.goal.edge, std::min(v, hi)})) return false;
    return true;
}

GraphPoint step_field(const EdgePointField& f, const GraphPoint& p, double dt,
                      double* consumed) {
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    if (!in_domain(f, p)) throw std::domain_error("point outside the field domain");
    const int e = *p.edge;
    auto rk4 = [&](double v0, double h) {
        const double k1 = edge_rate_at(f, e, v0);
        const double k2 = edge_rate_at(f, e, v0 + h / 2 * k1);
        const double k3 = edge_rate_at(f, e, v0 + h / 2 * k2);
        const double k4 = edge_rate_at(f, e, v0 + h * k3);
        return v0 + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    };
    double v1 = rk4(p.value, dt);
    double used = dt;
    // a start pinned at a vertex with the flow pointing off-edge crosses at
    // once rather than sticking to the clamp
    const double r0 = edge_rate_at(f, e, p.value);
    const bool off_lo = v1 <= 0.0 && (p.value > 0.0 || r0 < 0.0);
    const bool off_hi = v1 >= 1.0 && (p.value < 1.0 || r0 > 0.0);
    if (off_lo || off_hi) {
        double lo = 0.0, hi = dt;
        auto past = [&](double h) {
            const double v = rk4(p.value, h);
            return off_lo ? v <= 0.0 : v >= 1.0;
        };
        while (hi - lo > kCrossTimeTol) {
            const double mid = 0.5 * (lo + hi);
            (past(mid) ? hi : lo) = mid;
        }
        used = hi;
        const Edge& cur = f.g.edge(e);
        const int w = off_lo ? cur.u : cur.v;
        if (e == *f.goal.edge)
            throw std::runtime_error("flow escaped the goal edge at vertex " + std::to_string(w));
        const Edge& ge = f.g.edge(*f.goal.edge);
        if (w != ge.u && w != ge.v)
            throw std::runtime_error("flow left the field domain at vertex " + std::to_string(w));
        if (consumed) *consumed = used;
        return {ge.id, w == ge.u ? 0.0 : 1.0};
    }
    if (consumed) *consumed = used;
    return {e, std::clamp(v1, 0.0, 1.0)};
}

namespace {

void activate_next(HybridController& c, std::vector<HybridEvent>& events) {
    c.mode = graph_controller(c.g, c.levels, c.mode);
    c.switched_this_dwell = true;
    events.push_back({c.t, HybridEvent::Activate, c.mode});
}

// switch checks at the start of a dwell: arrival at the active goal, or the
// state already sitting on the successor edge
void maybe_switch(HybridController& c, const GraphPoint& p, std::vector<HybridEvent>& events) {
    if (c.switched_this_dwell) return;
    const EdgePointField& f = c.fields.at(c.mode);
    if (in_domain(f, p) && lyapunov(f, p) <= c.alpha) {
        events.push_back({c.t, HybridEvent::Arrival, c.mode});
        activate_next(c, events);
        return;
    }
    const int succ = graph_controller(c.g, c.levels, c.mode);
    if (succ != c.mode && c.current_edge == succ) activate_next(c, events);
}

}  // namespace

HybridController make_single_agv_hybrid(const PatternLevels& levels,
                                        std::map<int, EdgePointField> fields,
                                        double alpha) {
    if (fields.empty()) throw std::invalid_argument("no fields given");
    if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("alpha outside (0,1)");
    HybridController c{fields.begin()->second.g, levels, std::move(fields), alpha};
    for (const auto& [edge, level] : levels.level_of) {
        (void)level;
        const auto it = c.fields.find(edge);
        if (it == c.fields.end())
            throw std::invalid_argument("missing field for edge " + std::to_string(edge));
        if (*it->second.goal.edge != edge)
            throw std::invalid_argument("field for edge " + std::to_string(edge) +
                                        " must take its goal on that edge");
        const int succ = graph_controller(c.g, levels, edge);
        const auto st = c.fields.find(succ);
        if (st == c.fields.end())
            throw std::invalid_argument("missing field for edge " + std::to_string(succ));
        if (!prepares(it->second, st->second, alpha))
            throw std::invalid_argument("the field for edge " + std::to_string(edge) +
                                        " does not prepare the field for edge " +
                                        std::to_string(succ));
    }
    return c;
}

std::pair<GraphPoint, std::vector<HybridEvent>> step_hybrid(HybridController& c,
                                                            const GraphPoint& p,
                                                            double dt) {
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    check_point(c.g, p, "state");
    std::vector<HybridEvent> events;
    if (c.mode < 0) {
        c.mode = *p.edge;
        c.current_edge = *p.edge;
        if (c.fields.find(c.mode) == c.fields.end())
            throw std::invalid_argument("no field for start edge " + std::to_string(c.mode));
    }
    maybe_switch(c, p, events);
    const EdgePointField& f = c.fields.at(c.mode);
    if (!in_domain(f, p)) throw std::runtime_error("state left the active field domain");

    double used = 0.0;
    GraphPoint q = step_field(f, p, dt, &used);
    if (*q.edge == *p.edge) {
        const double phi0 = lyapunov(f, p);
        const double phi1 = lyapunov(f, q);
        if (phi0 > c.alpha && phi1 <= c.alpha && !c.switched_this_dwell) {
            // cut the step at the crossing
            double lo = 0.0, hi = used;
            while (hi - lo > kCrossTimeTol) {
                const double mid = 0.5 * (lo + hi);
                double part = 0.0;
                const GraphPoint r = step_field(f, p, mid, &part);
                (lyapunov(f, r) <= c.alpha ? hi : lo) = mid;
            }
            q = step_field(f, p, hi, &used);
            c.t += used;
            events.push_back({c.t, HybridEvent::Arrival, c.mode});
            activate_next(c, events);
            return {q, events};
        }
        c.t += used;
        return {q, events};
    }
    // crossed a vertex onto the active goal edge
    c.t += used;
    c.current_edge = *q.edge;
    c.switched_this_dwell = false;
    events.push_back({c.t, HybridEvent::EdgeEnter, *q.edge});
    maybe_switch(c, q, events);
    return {q, events};
}

std::vector<int> run_hybrid(HybridController& c, const GraphPoint& start, double t_max,
                            double dt) {
    check_point(c.g, start, "start");
    if (t_max < 0.0) throw std::invalid_argument("t_max must be nonnegative");
    std::vector<int> log{*start.edge};
    GraphPoint p = start;
    const long cap = static_cast<long>(t_max / dt) * 4 + 1000;
    long n = 0;
    while (c.t < t_max - 1e-12) {
        auto [q, events] = step_hybrid(c, p, dt);
        p = q;
        for (const HybridEvent& e : events)
            if (e.kind == HybridEvent::EdgeEnter) log.push_back(e.edge);
        if (++n > cap) throw std::runtime_error("hybrid run stalled");
    }
    return log;
}

}  // namespace agv
