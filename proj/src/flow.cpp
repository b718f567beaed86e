#include "agv/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace agv {

namespace {

constexpr double kPi = 3.14159265358979323846;

int next3(int i) { return i % 3 + 1; }

// --- the circulating field -------------------------------------------

FieldValue same_edge_descent(int edge, double vx, double vy) {
    // inner vehicle retreats to the center at the outer one's speed, outer
    // vehicle pushes outward with the logistic rate
    if (vx < vy) return {{edge, -vy}, {edge, vy * (1.0 - vy)}};
    return {{edge, vx * (1.0 - vx)}, {edge, -vx}};
}

FieldValue circulating_value(const Config& cc) {
    const GraphPoint x = canonicalize(cc.x), y = canonicalize(cc.y);
    const double vx = x.value, vy = y.value;
    if (!x.edge && !y.edge) throw std::domain_error("both vehicles at the center");
    if (x.edge && y.edge && *x.edge == *y.edge)
        return same_edge_descent(*x.edge, vx, vy);
    if (!x.edge || (y.edge && *x.edge == next3(*y.edge))) {
        // x at the center, or trailing y around the cyclic edge order
        const int iy = *y.edge;
        if (vx < vy) return {{next3(iy), vy}, {iy, vy * (1.0 - vy)}};
        return {{*x.edge, vx * (1.0 - vx)}, {iy, -vx}};
    }
    // y at the center, or trailing x
    const int ix = *x.edge;
    if (vy < vx) return {{ix, vx * (1.0 - vx)}, {next3(ix), vx}};
    return {{ix, -vy}, {*y.edge, vy * (1.0 - vy)}};
}

// --- chart transport ---------------------------------------------------

int wedge_of(double theta) {
    int w = static_cast<int>(std::floor(wrap_angle(theta) / (kPi / 3.0)));
    return std::clamp(w, 0, 5);
}

// One vehicle exactly at the center: the advancing-side square fixes the
// target edge, and the sheet speed is the shared one-sided limit.
FieldValue pushforward_branch(const DiscField& f, const Config& cc) {
    const bool x_center = !canonicalize(cc.x).edge;
    const GraphPoint rest = x_center ? canonicalize(cc.y) : canonicalize(cc.x);
    const DiscPoint d = to_disc(cc);
    const double rd = f.r_dot(d.r, d.theta);
    const double td = f.theta_dot(d.r, d.theta);
    Velocity still{*rest.edge, rd};
    Velocity mover{next3(*rest.edge), 0.0};
    if (td != 0.0) {
        const double side = td > 0.0 ? 1.0 : -1.0;
        const CellId sq = square_cycle()[wedge_of(d.theta + side * kPi / 6.0)];
        mover.edge = x_center ? sq.a : sq.b;
        mover.rate = 1.5 * rest.value * std::fabs(td);
    }
    return x_center ? FieldValue{mover, still} : FieldValue{still, mover};
}

FieldValue pushforward_value(const DiscField& f, const Config& cc) {
    const GraphPoint x = canonicalize(cc.x), y = canonicalize(cc.y);
    if (x.edge && y.edge && *x.edge == *y.edge)
        throw std::domain_error("field is not defined on the fins");
    if (!x.edge || !y.edge) return pushforward_branch(f, cc);
    const DiscPoint d = to_disc(cc);
    const double rd = f.r_dot(d.r, d.theta);
    const double td = f.theta_dot(d.r, d.theta);
    const double vx = x.value, vy = y.value;
    // the angular coordinate reverses orientation on alternating wedges
    const double sigma = (*y.edge == next3(*x.edge)) ? 1.0 : -1.0;
    const double q = 1.5 * td * (vx * vx + vy * vy);
    if (parity(d.theta) > 0)
        return {{*x.edge, rd}, {*y.edge, rd * (vy / vx) + sigma * q / vx}};
    return {{*x.edge, rd * (vx / vy) - sigma * q / vy}, {*y.edge, rd}};
}

}  // namespace

PiecewiseField circulating_field() {
    PiecewiseField f;
    f.eval = circulating_value;
    f.covers_fins = true;
    f.kind = "circulating";
    return f;
}

double circulating_lyapunov(const Config& cc) {
    const GraphPoint x = canonicalize(cc.x), y = canonicalize(cc.y);
    if (x.edge && y.edge && *x.edge == *y.edge)
        return 1.0 - std::fabs(x.value - y.value);
    return 1.0 - std::max(x.value, y.value);
}

PiecewiseField pushforward_disc_field(const DiscField& f) {
    PiecewiseField out;
    out.eval = [f](const Config& c) { return pushforward_value(f, c); };
    out.covers_fins = false;
    out.kind = "pushforward";
    return out;
}

PiecewiseField with_fin_descent(const PiecewiseField& base) {
    PiecewiseField out;
    out.covers_fins = true;
    out.kind = base.kind;
    out.eval = [inner = base.eval](const Config& c) {
        const GraphPoint x = canonicalize(c.x), y = canonicalize(c.y);
        if (x.edge && y.edge && *x.edge == *y.edge)
            return same_edge_descent(*x.edge, x.value, y.value);
        return inner(c);
    };
    return out;
}

// --- navigation --------------------------------------------------------

namespace {

constexpr double kNavWeightTheta = 0.5;
constexpr double kNavWeightR = 0.5;
constexpr double kNavBarrierRadius = 0.08;
constexpr double kNavBarrierGain = 2.0;
constexpr double kNavAngularFloor = 0.05;  // keeps the angular rate finite near the puncture

double wrap_pi(double a) {
    double w = std::fmod(a + kPi, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w - kPi;  // (-pi, pi]: the cut sits opposite the goal angle
}

struct NavCore {
    double rg = 0.5, thg = 0.0;

    double dP_dr(double r) const {
        double d = 2.0 * kNavWeightR * (r - rg);
        if (r < kNavBarrierRadius)
            d -= 2.0 * kNavBarrierGain * (kNavBarrierRadius - r) * kNavBarrierRadius / (r * r * r);
        return d;
    }
    double dP_dth(double th) const { return 2.0 * kNavWeightTheta * wrap_pi(th - thg); }

    double r_rate(double r, double th) const {
        (void)th;
        return -dP_dr(r);
    }
    double th_rate(double r, double th) const {
        const double rr = std::max(r, kNavAngularFloor);
        return -dP_dth(th) / (rr * rr);
    }
};

// attaching-ray angle of the fin sheet: the branch configurations with this
// vehicle at the center all share one disc angle
double fin_ray(int edge, bool x_inner) {
    if (x_inner) return wrap_angle(kPi / 3.0 - 2.0 * kPi / 3.0 * (edge + 1));
    return wrap_angle(-2.0 * kPi / 3.0 * (edge - 1));
}

// Descent on a fin for the extended potential P(ray at outer radius)/(1 - inner).
// The inner vehicle's rate matches the square-sheet speed limit at the branch
// vertex, so the three sheets meeting there stay compatible.
FieldValue nav_fin_value(const NavCore& core, int edge, double vx, double vy) {
    const bool x_inner = vx < vy;
    const double inner = x_inner ? vx : vy;
    const double outer = x_inner ? vy : vx;
    const double th = fin_ray(edge, x_inner);
    const double off = 1.0 - inner;
    const double d_in = -1.5 * outer * std::fabs(core.th_rate(outer, th)) / (off * off);
    const double d_out = core.r_rate(outer, th) / off;
    if (x_inner) return {{edge, d_in}, {edge, d_out}};
    return {{edge, d_out}, {edge, d_in}};
}

}  // namespace

PiecewiseField navigation_field(const GraphPoint& goal_x, const GraphPoint& goal_y) {
    const GraphPoint gx = canonicalize(goal_x), gy = canonicalize(goal_y);
    if (!gx.edge || !gy.edge) throw std::invalid_argument("navigation goal at the center vertex");
    if (gx.value >= 1.0 || gy.value >= 1.0) throw std::invalid_argument("navigation goal at a leaf vertex");
    if (*gx.edge == *gy.edge) throw std::invalid_argument("navigation goals share an edge");
    const DiscPoint g = to_disc(Config{gx, gy});
    if (g.r < 0.1) throw std::invalid_argument("navigation goal inside the center barrier");
    const NavCore core{g.r, g.theta};
    DiscField grad;
    grad.r_dot = [core](double r, double th) { return core.r_rate(r, th); };
    grad.theta_dot = [core](double r, double th) { return core.th_rate(r, th); };
    PiecewiseField out;
    out.covers_fins = true;
    out.kind = "navigation";
    out.eval = [core, grad](const Config& c) -> FieldValue {
        const GraphPoint x = canonicalize(c.x), y = canonicalize(c.y);
        if (x.edge && y.edge && *x.edge == *y.edge)
            return nav_fin_value(core, *x.edge, x.value, y.value);
        return pushforward_value(grad, c);
    };
    return out;
}

// --- tuned limit cycles -------------------------------------------------

PeriodicProfile harmonic_profile(double a0, std::vector<double> cos_coef,
                                 std::vector<double> sin_coef) {
    PeriodicProfile p;
    p.value = [a0, cos_coef, sin_coef](double th) {
        double v = a0;
        for (std::size_t k = 0; k < cos_coef.size(); ++k) v += cos_coef[k] * std::cos((k + 1) * th);
        for (std::size_t k = 0; k < sin_coef.size(); ++k) v += sin_coef[k] * std::sin((k + 1) * th);
        return v;
    };
    p.deriv = [cos_coef, sin_coef](double th) {
        double v = 0.0;
        for (std::size_t k = 0; k < cos_coef.size(); ++k) v -= (k + 1) * cos_coef[k] * std::sin((k + 1) * th);
        for (std::size_t k = 0; k < sin_coef.size(); ++k) v += (k + 1) * sin_coef[k] * std::cos((k + 1) * th);
        return v;
    };
    return p;
}

DiscField tuned_cycle_field(const PeriodicProfile& f, double omega) {
    if (omega == 0.0) throw std::invalid_argument("omega must be nonzero");
    if (!f.value || !f.deriv) throw std::invalid_argument("profile not set");
    const int grid = 2048;
    for (int k = 0; k <= grid; ++k) {
        const double v = f.value(2.0 * kPi * k / grid);
        if (!(v > 0.0) || v > 1.0) throw std::invalid_argument("profile must map into (0, 1]");
    }
    if (std::fabs(f.value(0.0) - f.value(2.0 * kPi)) > 1e-9)
        throw std::invalid_argument("profile does not close up over the period");
    DiscField out;
    out.r_dot = [f, omega](double r, double th) {
        const double a = wrap_angle(th);
        return r * (1.0 - (r - f.deriv(a) * omega) / f.value(a));
    };
    out.theta_dot = [omega](double, double) { return omega; };
    return out;
}

// --- integration --------------------------------------------------------

SafetyViolation::SafetyViolation(double when)
    : std::runtime_error([when] {
          char buf[64];
          std::snprintf(buf, sizeof buf, "separation guard breached at t=%.9f", when);
          return std::string(buf);
      }()),
      t(when) {}

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::CellChange: return "cell-change";
        case EventKind::VertexPass: return "vertex-pass";
        case EventKind::Dock: return "dock";
        case EventKind::BoundaryHit: return "boundary-hit";
        case EventKind::Switch: return "switch";
        case EventKind::Converged: return "converged";
    }
    return "?";
}

namespace {

constexpr double kEventTimeTol = 1e-9;
constexpr double kConvergeSpeed = 1e-6;
// angular travel below which a docking contact is a graze, not a zone visit
constexpr double kMinZoneSweep = 0.01;

struct RawState {
    int ex = 0;
    double px = 0.0;  // x's edge parameter; kept unclamped between steps
    int ey = 0;
    double py = 0.0;
};

Config raw_config(const RawState& s) {
    return {canonicalize(GraphPoint{s.ex, std::clamp(s.px, 0.0, 1.0)}),
            canonicalize(GraphPoint{s.ey, std::clamp(s.py, 0.0, 1.0)})};
}

// signed rate relative to the current edge parameter; motion onto another
// edge reads as a decrease through the shared vertex
double edge_rate(const Velocity& v, int current) {
    return v.edge == current ? v.rate : -v.rate;
}

struct Stepper {
    const PiecewiseField* field = nullptr;
    bool hold_x = false, hold_y = false;  // sliding along the docked boundary

    struct Deriv {
        double dx = 0.0, dy = 0.0;
    };

    Deriv deriv(const RawState& s) const {
        const FieldValue f = field->eval(raw_config(s));
        Deriv d{edge_rate(f.vx, s.ex), edge_rate(f.vy, s.ey)};
        if (hold_x) d.dx = std::min(d.dx, 0.0);
        if (hold_y) d.dy = std::min(d.dy, 0.0);
        return d;
    }

    RawState rk4(const RawState& s, double h) const {
        auto at = [&s](const Deriv& d, double a) {
            RawState r = s;
            r.px += a * d.dx;
            r.py += a * d.dy;
            return r;
        };
        const Deriv k1 = deriv(s);
        const Deriv k2 = deriv(at(k1, h / 2));
        const Deriv k3 = deriv(at(k2, h / 2));
        const Deriv k4 = deriv(at(k3, h));
        RawState r = s;
        r.px += h / 6 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
        r.py += h / 6 * (k1.dy + 2 * k2.dy + 2 * k3.dy + k4.dy);
        return r;
    }
};

// Tracks docking symbols along the orbit and folds them into the word.
// Contacts that sweep less than kMinZoneSweep of boundary are dropped, so a
// corner crossing contributes its corner symbol but not the grazed arcs
// beside it.
struct WordTracker {
    std::optional<GrammarSymbol> cur;
    double extent = 0.0;
    bool have_coord = false;
    bool fin_coord = false;
    double coord = 0.0;

    void push(Word& out) {
        if (cur && extent >= kMinZoneSweep && (out.empty() || !(out.back() == *cur)))
            out.push_back(*cur);
    }

    void update(const Config& c, double tol, Word& out) {
        const std::optional<GrammarSymbol> sym = docking_symbol(c, tol);
        if (!sym) {
            push(out);
            cur.reset();
            have_coord = false;
            return;
        }
        const GraphPoint x = canonicalize(c.x), y = canonicalize(c.y);
        const bool on_fin = x.edge && y.edge && *x.edge == *y.edge;
        double now;
        if (on_fin) {
            now = x.value + y.value;  // boundary progress proxy off the disc chart
        } else {
            now = to_disc(c).theta;
        }
        if (cur && *cur == *sym) {
            if (have_coord && on_fin == fin_coord) {
                double d = now - coord;
                if (!on_fin) d = wrap_pi_local(d);
                extent += std::fabs(d);
            }
        } else {
            push(out);
            cur = *sym;
            extent = 0.0;
        }
        have_coord = true;
        fin_coord = on_fin;
        coord = now;
    }

    static double wrap_pi_local(double a) {
        double w = std::fmod(a + kPi, 2.0 * kPi);
        if (w < 0.0) w += 2.0 * kPi;
        return w - kPi;
    }
};

}  // namespace

Trajectory integrate(const PiecewiseField& field, const Config& start,
                     const IntegrateOptions& opt) {
    if (opt.dt <= 0.0) throw std::invalid_argument("dt must be positive");
    if (opt.t_max < 0.0) throw std::invalid_argument("t_max must be nonnegative");
    if (opt.sample_stride < 1) throw std::invalid_argument("sample stride must be >= 1");
    Config c0{canonicalize(start.x), canonicalize(start.y)};
    validate_config(c0, opt.delta);

    Trajectory out;
    if (opt.t_max == 0.0) return out;  // degenerate horizon: nothing happened

    Stepper st{&field};
    RawState s;
    {
        const FieldValue f0 = field.eval(c0);
        s.ex = c0.x.edge ? *c0.x.edge : f0.vx.edge;
        s.px = c0.x.value;
        s.ey = c0.y.edge ? *c0.y.edge : f0.vy.edge;
        s.py = c0.y.value;
    }

    const double dock_hi = 1.0 - opt.dock_tol;
    double t = 0.0;
    long step = 0;
    CellId cell = cell_of(c0);
    WordTracker words;
    words.update(c0, opt.dock_tol, out.word);
    out.samples.push_back({0.0, c0});

    while (t < opt.t_max - 1e-12) {
        const double h_full = std::min(opt.dt, opt.t_max - t);
        const RawState s0 = s;
        const RawState s1 = st.rk4(s0, h_full);

        // earliest event in (0, h]: bisect each triggered predicate on the
        // step size, then apply the winner
        enum class Ev { None, Kink, VertexX, VertexY, BoundX, BoundY, DockX, DockY, Guard, Stop };
        Ev ev = Ev::None;
        double h_ev = 2.0 * h_full;  // above any admissible crossing
        auto consider = [&](bool fired, Ev kind, auto pred) {
            if (!fired) return;
            double lo = 0.0, hi = h_full;
            while (hi - lo > kEventTimeTol) {
                const double mid = 0.5 * (lo + hi);
                if (pred(st.rk4(s0, mid)))
                    hi = mid;
                else
                    lo = mid;
            }
            if (hi < h_ev) {
                h_ev = hi;
                ev = kind;
            }
        };
        // split the step where the vehicles swap speed ranks: the fields
        // switch branches across that diagonal, and integrating through the
        // switch in one step loses accuracy
        {
            const double d0 = s0.px - s0.py, d1 = s1.px - s1.py;
            consider(s0.ex != s0.ey && d0 != 0.0 && (d0 > 0.0) != (d1 > 0.0), Ev::Kink,
                     [d0](const RawState& r) { return (d0 > 0.0) != (r.px - r.py > 0.0); });
        }
        consider(s0.px > 0.0 && s1.px <= 0.0, Ev::VertexX,
                 [](const RawState& r) { return r.px <= 0.0; });
        consider(s0.py > 0.0 && s1.py <= 0.0, Ev::VertexY,
                 [](const RawState& r) { return r.py <= 0.0; });
        consider(s0.px < 1.0 && s1.px >= 1.0, Ev::BoundX,
                 [](const RawState& r) { return r.px >= 1.0; });
        consider(s0.py < 1.0 && s1.py >= 1.0, Ev::BoundY,
                 [](const RawState& r) { return r.py >= 1.0; });
        consider(s0.px < dock_hi && s1.px >= dock_hi, Ev::DockX,
                 [dock_hi](const RawState& r) { return r.px >= dock_hi; });
        consider(s0.py < dock_hi && s1.py >= dock_hi, Ev::DockY,
                 [dock_hi](const RawState& r) { return r.py >= dock_hi; });
        {
            static const Graph& ug = y_graph();
            const Config c1 = raw_config(s1);
            consider(graph_distance(ug, c1.x, c1.y) < opt.delta, Ev::Guard,
                     [&opt](const RawState& r) {
                         const Config c = raw_config(r);
                         return graph_distance(ug, c.x, c.y) < opt.delta;
                     });
        }
        if (opt.stop && opt.stop->fn(raw_config(s1)) <= 0.0)
            consider(true, Ev::Stop,
                     [&opt](const RawState& r) { return opt.stop->fn(raw_config(r)) <= 0.0; });

        const double h = (ev == Ev::None) ? h_full : std::min(h_ev, h_full);
        s = (ev == Ev::None) ? s1 : st.rk4(s0, h);
        t += h;
        bool stop_now = false;

        switch (ev) {
            case Ev::None:
            case Ev::Kink:
                break;
            case Ev::VertexX:
            case Ev::VertexY: {
                const bool is_x = (ev == Ev::VertexX);
                (is_x ? s.px : s.py) = 0.0;
                const FieldValue f = field.eval(raw_config(s));
                const Velocity& v = is_x ? f.vx : f.vy;
                (is_x ? s.ex : s.ey) = v.edge;
                char buf[48];
                std::snprintf(buf, sizeof buf, "%s -> e%d", is_x ? "x" : "y", v.edge);
                out.events.push_back({t, EventKind::VertexPass, buf});
                break;
            }
            case Ev::BoundX:
                s.px = 1.0;
                st.hold_x = true;
                out.events.push_back({t, EventKind::BoundaryHit, "x"});
                break;
            case Ev::BoundY:
                s.py = 1.0;
                st.hold_y = true;
                out.events.push_back({t, EventKind::BoundaryHit, "y"});
                break;
            case Ev::DockX:
            case Ev::DockY: {
                // the bisection stops a hair short of the threshold
                if (ev == Ev::DockX) s.px = std::max(s.px, dock_hi);
                if (ev == Ev::DockY) s.py = std::max(s.py, dock_hi);
                const auto sym = docking_symbol(raw_config(s), opt.dock_tol);
                out.events.push_back(
                    {t, EventKind::Dock, sym ? to_string(*sym) : (ev == Ev::DockX ? "x" : "y")});
                break;
            }
            case Ev::Guard:
                throw SafetyViolation(t);
            case Ev::Stop:
                out.events.push_back({t, EventKind::Switch, opt.stop->label});
                stop_now = true;
                break;
        }

        if (st.hold_x && s.px < 1.0 - 1e-9) st.hold_x = false;
        if (st.hold_y && s.py < 1.0 - 1e-9) st.hold_y = false;

        const Config c = raw_config(s);
        const CellId now = cell_of(c);
        if (!(now == cell)) {
            out.events.push_back({t, EventKind::CellChange, to_string(now)});
            cell = now;
        }
        words.update(c, opt.dock_tol, out.word);
        ++step;
        if (step % opt.sample_stride == 0 || ev != Ev::None || t >= opt.t_max - 1e-12)
            out.samples.push_back({t, c});

        if (stop_now) break;

        if (opt.stop_on_converge) {
            const Stepper::Deriv d = st.deriv(s);
            if (std::hypot(d.dx, d.dy) < kConvergeSpeed) {
                out.events.push_back({t, EventKind::Converged, ""});
                if (out.samples.empty() || out.samples.back().t < t) out.samples.push_back({t, c});
                break;
            }
        }
    }
    words.push(out.word);
    return out;
}

Trajectory integrate(const PiecewiseField& field, const Config& start, double t_max,
                     double dt) {
    IntegrateOptions opt;
    opt.t_max = t_max;
    opt.dt = dt;
    return integrate(field, start, opt);
}

Word word_from_samples(const std::vector<Sample>& samples, double dock_tol) {
    Word out;
    WordTracker words;
    for (const Sample& s : samples) words.update(s.c, dock_tol, out);
    words.push(out);
    return out;
}

std::vector<DiscSample> integrate_disc(const DiscField& f, const DiscPoint& start,
                                       double t_max, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    if (t_max < 0.0) throw std::invalid_argument("t_max must be nonnegative");
    if (!(start.r > 0.0) || start.r > 1.0) throw std::domain_error("radius outside (0, 1]");
    std::vector<DiscSample> out;
    double r = start.r, th = start.theta, t = 0.0;
    out.push_back({0.0, {r, wrap_angle(th)}});
    auto dr = [&f](double rr, double tt) { return f.r_dot(std::clamp(rr, 1e-9, 1.0), tt); };
    auto dth = [&f](double rr, double tt) { return f.theta_dot(std::clamp(rr, 1e-9, 1.0), tt); };
    while (t < t_max - 1e-12) {
        const double h = std::min(dt, t_max - t);
        const double r1 = dr(r, th), a1 = dth(r, th);
        const double r2 = dr(r + h / 2 * r1, th + h / 2 * a1), a2 = dth(r + h / 2 * r1, th + h / 2 * a1);
        const double r3 = dr(r + h / 2 * r2, th + h / 2 * a2), a3 = dth(r + h / 2 * r2, th + h / 2 * a2);
        const double r4 = dr(r + h * r3, th + h * a3), a4 = dth(r + h * r3, th + h * a3);
        r += h / 6 * (r1 + 2 * r2 + 2 * r3 + r4);
        th += h / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
        r = std::clamp(r, 1e-9, 1.0);
        t += h;
        out.push_back({t, {r, wrap_angle(th)}});
    }
    return out;
}

// --- semiflow validity ---------------------------------------------------

ValidityReport validate_vertex_fields(const std::vector<double>& speeds,
                                      const std::vector<int>& signs, double tol) {
    if (speeds.size() != signs.size() || speeds.empty())
        throw std::invalid_argument("speed and sign lists must be nonempty and match");
    for (int sg : signs)
        if (sg != 1 && sg != -1) throw std::invalid_argument("signs must be +1 or -1");
    ValidityReport rep;
    const double hi = *std::max_element(speeds.begin(), speeds.end());
    if (hi <= tol) return rep;  // all sheets stalled: singular case, nothing to check
    const double lo = *std::min_element(speeds.begin(), speeds.end());
    if (hi - lo > tol) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "sheet speeds differ: %.12g vs %.12g", lo, hi);
        rep.violations.push_back({buf, std::nullopt});
    }
    const long outgoing = std::count(signs.begin(), signs.end(), 1);
    if (outgoing != 1) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "expected one outgoing sheet, found %ld", outgoing);
        rep.violations.push_back({buf, std::nullopt});
    }
    rep.valid = rep.violations.empty();
    return rep;
}

ValidityReport validate_config_field(const PiecewiseField& field, int samples) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    std::mt19937 rng(0x51f0b34au);
    std::uniform_real_distribution<double> uv(0.05, 0.95);
    ValidityReport rep;
    const double h = 1e-6;
    for (int n = 0; n < samples; ++n) {
        const int j = 1 + static_cast<int>(rng() % 3u);
        const double v = uv(rng);
        const bool x_moves = (n % 2 == 0);
        Config branch;
        (x_moves ? branch.y : branch.x) = GraphPoint{j, v};

        std::vector<double> speeds, rfactor;
        std::vector<int> signs;
        bool covered = true;
        for (int k = 1; k <= 3; ++k) {
            auto probe = [&](double hh) -> std::optional<FieldValue> {
                Config c = branch;
                (x_moves ? c.x : c.y) = GraphPoint{k, hh};
                try {
                    return field.eval(c);
                } catch (const std::exception&) {
                    return std::nullopt;
                }
            };
            const auto f1 = probe(h), f2 = probe(2.0 * h);
            if (!f1 || !f2) {
                rep.violations.push_back(
                    {"sheet onto edge " + std::to_string(k) + " is uncovered", branch});
                covered = false;
                continue;
            }
            // one-sided limits by Richardson extrapolation, 2 f(h) - f(2h)
            auto lim = [&](const Velocity& a, const Velocity& b, int rel) {
                return 2.0 * edge_rate(a, rel) - edge_rate(b, rel);
            };
            const double mv = x_moves ? lim(f1->vx, f2->vx, k) : lim(f1->vy, f2->vy, k);
            const double sv = x_moves ? lim(f1->vy, f2->vy, j) : lim(f1->vx, f2->vx, j);
            speeds.push_back(std::fabs(mv));
            signs.push_back(mv >= 0.0 ? 1 : -1);
            rfactor.push_back(sv);
        }
        if (!covered) continue;

        const double scale = *std::max_element(speeds.begin(), speeds.end());
        const ValidityReport vr =
            validate_vertex_fields(speeds, signs, 1e-9 + 1e-7 * scale);
        for (const Violation& violation : vr.violations)
            rep.violations.push_back({"branch point: " + violation.detail, branch});

        const double rlo = *std::min_element(rfactor.begin(), rfactor.end());
        const double rhi = *std::max_element(rfactor.begin(), rfactor.end());
        if (rhi - rlo > 1e-9 * (1.0 + std::fabs(rhi))) {
            char buf[96];
            std::snprintf(buf, sizeof buf,
                          "branch point: stationary rates differ: %.12g vs %.12g", rlo, rhi);
            rep.violations.push_back({buf, branch});
        }
    }
    rep.valid = rep.violations.empty();
    return rep;
}

}  // namespace agv
