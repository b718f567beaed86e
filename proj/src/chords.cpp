#include "agv/chords.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace agv {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

constexpr double kForwardBase = 0.88;   // ridden-span radius between bumps
constexpr double kBackwardBase = 0.7;   // deeper dip for the retraced chord
constexpr double kBumpFlat = 0.02;      // full-radius flat top around each docking angle
constexpr double kBumpRamp = 0.015;     // shoulder width beyond the flat top
constexpr double kSwitchScale = 2.0;    // handover fires while still on the flat top
constexpr double kCaptureBound = 15.0;  // transient allowance before giving up
constexpr double kPlateauStep = 0.02;   // attractor sampling on flat stretches
constexpr double kBumpStep = 1.25e-3;   // attractor sampling on the shoulders

double sstep(double x) {  // C2 smoothstep on [0, 1]
    x = std::clamp(x, 0.0, 1.0);
    return x * x * x * (x * (6.0 * x - 15.0) + 10.0);
}

double sstep_d(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double y = x * (1.0 - x);
    return 30.0 * y * y;
}

// Radius profile of one chord: a flat full-radius top around both span
// endpoints (the docking bumps), `base` across the span interior, 1 along
// the rest of the circle where the curve follows the boundary.  Handovers
// land on the flat top, so the radial transient is not re-excited, and the
// steep shoulders keep neighbouring zones below the docking threshold.
PeriodicProfile chord_profile(double start, double span, double base, double flat,
                              double ramp) {
    auto value = [start, span, base, flat, ramp](double th) {
        const double u = wrap_angle(th - start);
        if (u >= span) return 1.0;
        const double d = std::min(u, span - u);
        if (d <= flat) return 1.0;
        if (d >= flat + ramp) return base;
        return base + (1.0 - base) * (1.0 - sstep((d - flat) / ramp));
    };
    auto deriv = [start, span, base, flat, ramp](double th) {
        const double u = wrap_angle(th - start);
        if (u >= span) return 0.0;
        const double d = std::min(u, span - u);
        if (d <= flat || d >= flat + ramp) return 0.0;
        const double dd = (u <= span - u) ? 1.0 : -1.0;
        return dd * -((1.0 - base) * sstep_d((d - flat) / ramp) / ramp);
    };
    return PeriodicProfile{value, deriv};
}

// Sample angles over one turn starting at `start`: dense on the bump
// shoulders, coarse on flat stretches, with the chart corners pinned.
std::vector<double> sample_angles(double start, double span, double bump) {
    std::vector<double> raw;
    auto push_range = [&raw](double x0, double x1, double step) {
        if (x1 - x0 <= 1e-12) return;
        const int k = std::max(1, static_cast<int>(std::ceil((x1 - x0) / step)));
        for (int i = 0; i <= k; ++i) raw.push_back(x0 + (x1 - x0) * i / k);
    };
    push_range(start, start + bump, kBumpStep);
    push_range(start + bump, start + span - bump, kPlateauStep);
    push_range(start + span - bump, start + span, kBumpStep);
    push_range(start + span, start + kTwoPi, kPlateauStep);
    for (int k = 0; k < 12; ++k) {
        double c = k * kPi / 6.0;
        while (c < start) c += kTwoPi;
        if (c < start + kTwoPi) raw.push_back(c);
    }
    std::sort(raw.begin(), raw.end());
    std::vector<double> out;
    for (double th : raw)
        if (out.empty() || th - out.back() > 1e-9) out.push_back(th);
    while (!out.empty() && out.back() >= start + kTwoPi - 1e-9) out.pop_back();
    return out;
}

// Linear chart of one metric factor along a segment.  The segment endpoint
// coordinates are exact; the query's coordinate may flip sign with the side
// of the center (third-edge queries), which splits the minimization.
struct Chart {
    double ua = 0.0, ub = 0.0;
    double q_pos = 0.0, q_neg = 0.0;
    bool split = false;
};

Chart chart_for(int ea, double va, int eb, double vb, int eq, double vq) {
    Chart ch;
    const int ref = (ea != 0) ? ea : eb;
    ch.ua = (ea == 0) ? 0.0 : va;
    if (eb == 0)
        ch.ub = 0.0;
    else
        ch.ub = (eb == ref) ? vb : -vb;
    if (eq == 0 || vq == 0.0) {
        ch.q_pos = ch.q_neg = 0.0;
    } else if (ref == 0 || eq == ref) {
        ch.q_pos = ch.q_neg = vq;
    } else if (eb != 0 && eb != ref && eq == eb) {
        ch.q_pos = ch.q_neg = -vq;
    } else {
        ch.q_pos = -vq;  // beyond the center from wherever the segment sits
        ch.q_neg = vq;
        ch.split = true;
    }
    return ch;
}

double seg_dist2(const Chart& cx, const Chart& cy) {
    double ts[4];
    int nt = 0;
    ts[nt++] = 0.0;
    auto add_split = [&ts, &nt](const Chart& ch) {
        if (!ch.split) return;
        if ((ch.ua > 0.0) == (ch.ub > 0.0)) return;
        const double t = ch.ua / (ch.ua - ch.ub);
        if (t > 1e-12 && t < 1.0 - 1e-12) ts[nt++] = t;
    };
    add_split(cx);
    add_split(cy);
    ts[nt++] = 1.0;
    std::sort(ts, ts + nt);

    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < nt; ++i) {
        const double lo = ts[i], hi = ts[i + 1];
        if (hi - lo <= 0.0) continue;
        const double mid = 0.5 * (lo + hi);
        auto lin = [mid](const Chart& ch, double& a0, double& a1) {
            const double um = ch.ua + (ch.ub - ch.ua) * mid;
            const double qc = (um >= 0.0) ? ch.q_pos : ch.q_neg;
            a0 = ch.ua - qc;
            a1 = ch.ub - ch.ua;
        };
        double ax0, ax1, ay0, ay1;
        lin(cx, ax0, ax1);
        lin(cy, ay0, ay1);
        const double denom = ax1 * ax1 + ay1 * ay1;
        double t = (denom > 0.0) ? -(ax0 * ax1 + ay0 * ay1) / denom : lo;
        t = std::clamp(t, lo, hi);
        const double dx = ax0 + ax1 * t, dy = ay0 + ay1 * t;
        best = std::min(best, dx * dx + dy * dy);
    }
    return best;
}

Config dock_config(const DiscPoint& q) { return from_disc(q); }

}  // namespace

ConfigPolyline::ConfigPolyline(std::vector<Config> vertices, bool closed)
    : verts_(std::move(vertices)), closed_(closed) {
    if (verts_.size() < 2)
        throw std::invalid_argument("polyline needs at least two vertices");
    fx_.reserve(verts_.size());
    fy_.reserve(verts_.size());
    for (const Config& c : verts_) {
        fx_.push_back({c.x.edge ? *c.x.edge : 0, c.x.value});
        fy_.push_back({c.y.edge ? *c.y.edge : 0, c.y.value});
    }
    const std::size_t nseg = closed_ ? verts_.size() : verts_.size() - 1;
    box_.reserve(nseg);
    for (std::size_t k = 0; k < nseg; ++k) {
        const std::size_t m = (k + 1) % verts_.size();
        auto span = [](const Factor& a, const Factor& b, double& lo, double& hi) {
            lo = std::min(a.value, b.value);
            hi = std::max(a.value, b.value);
            if (a.edge != 0 && b.edge != 0 && a.edge != b.edge) lo = 0.0;  // folds through the center
        };
        Box b;
        span(fx_[k], fx_[m], b.lo_x, b.hi_x);
        span(fy_[k], fy_[m], b.lo_y, b.hi_y);
        box_.push_back(b);
    }
}

double ConfigPolyline::distance(const Config& c) const {
    const int eqx = c.x.edge ? *c.x.edge : 0;
    const int eqy = c.y.edge ? *c.y.edge : 0;
    const double qx = c.x.value, qy = c.y.value;

    double best2;
    {
        const double d = config_distance(c, verts_.front());
        best2 = d * d;
    }
    const std::size_t n = verts_.size();
    for (std::size_t k = 0; k < box_.size(); ++k) {
        // unsigned coordinates bound the metric from below, pruning segments
        const Box& b = box_[k];
        const double dx = std::max({b.lo_x - qx, qx - b.hi_x, 0.0});
        const double dy = std::max({b.lo_y - qy, qy - b.hi_y, 0.0});
        if (dx * dx + dy * dy >= best2) continue;
        const std::size_t m = (k + 1) % n;
        const Chart cx = chart_for(fx_[k].edge, fx_[k].value, fx_[m].edge, fx_[m].value, eqx, qx);
        const Chart cy = chart_for(fy_[k].edge, fy_[k].value, fy_[m].edge, fy_[m].value, eqy, qy);
        best2 = std::min(best2, seg_dist2(cx, cy));
    }
    return std::sqrt(best2);
}

ChordPlan plan_cycle(const Word& w, double epsilon) {
    if (w.empty()) throw std::invalid_argument("word is empty");
    if (!is_monotone(w)) throw std::invalid_argument("word is not monotone");
    const int n = static_cast<int>(w.size());

    std::vector<double> thetas(n);
    for (int j = 0; j < n; ++j) thetas[j] = zone_angle(w[j]);

    ChordPlan plan;
    plan.word = w;
    plan.docking.resize(n);
    std::vector<Config> docks(n);
    for (int j = 0; j < n; ++j) {
        plan.docking[j] = DiscPoint{1.0, thetas[j]};
        docks[j] = dock_config(plan.docking[j]);
    }

    double min_pair = 1.0;  // adjacent-zone separation bounds a lone point too
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            min_pair = std::min(min_pair, config_distance(docks[i], docks[j]));
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (epsilon >= 0.5 * min_pair)
        throw std::invalid_argument("epsilon exceeds half the docking separation");
    plan.epsilon = epsilon;

    const std::vector<double> gaps = gap_angles(thetas);
    if (n >= 2 && optimal_winding_class(gaps) == WindingClass::Zero) {
        // never cross the widest gap: retrace the covered range instead
        plan.backward = static_cast<int>(
            std::max_element(gaps.begin(), gaps.end()) - gaps.begin());
    }

    for (int j = 0; j < n; ++j) {
        const bool back = (j == plan.backward);
        const double start = back ? thetas[(j + 1) % n] : thetas[j];
        const double span = (n == 1) ? kTwoPi : (back ? kTwoPi - gaps[j] : gaps[j]);
        const double base = back ? kBackwardBase : kForwardBase;
        const double flat = std::min(kBumpFlat, span / 6.0);
        const double ramp = std::min(kBumpRamp, span / 8.0);

        plan.omega.push_back(back ? -1.0 : 1.0);
        plan.profiles.push_back(chord_profile(start, span, base, flat, ramp));
        plan.fields.push_back(with_fin_descent(
            pushforward_disc_field(tuned_cycle_field(plan.profiles.back(), plan.omega.back()))));

        const std::vector<double> angles = sample_angles(start, span, flat + ramp);
        std::vector<Config> bverts;
        bverts.reserve(angles.size());
        std::vector<Config> arc;
        for (double th : angles) {
            const double thw = wrap_angle(th);
            bverts.push_back(from_disc(DiscPoint{plan.profiles.back().value(thw), thw}));
            if (th <= start + span + 1e-9) arc.push_back(bverts.back());
        }
        if (span >= kTwoPi - 1e-9) arc.push_back(bverts.front());  // lone chord closes on itself
        if (back) std::reverse(arc.begin(), arc.end());
        plan.beta.emplace_back(std::move(bverts), true);
        plan.arcs.push_back(std::move(arc));
    }

    // every switch hands the state onto the next attractor
    for (int j = 0; j < n; ++j) {
        if (plan.beta[(j + 1) % n].distance(docks[(j + 1) % n]) > 1e-9)
            throw std::runtime_error("chord does not prepare its successor");
    }
    return plan;
}

std::pair<double, double> chord_lyapunov(const ChordPlan& plan, int j, const Config& c) {
    if (j < 0 || j >= static_cast<int>(plan.beta.size()))
        throw std::invalid_argument("chord index out of range");
    const double phi = plan.beta[j].distance(c);
    const Config qn = dock_config(plan.docking[(j + 1) % plan.docking.size()]);
    return {phi, phi + config_distance(c, qn)};
}

Trajectory run_cycle(const ChordPlan& plan, const Config& start, double t_max, double dt) {
    const int n = static_cast<int>(plan.word.size());
    if (n == 0 || plan.fields.size() != static_cast<std::size_t>(n) ||
        plan.beta.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("plan has no chords");
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    if (t_max < 0.0) throw std::invalid_argument("t_max must be nonnegative");

    Trajectory out;
    if (t_max == 0.0) return out;

    int mode = -1;  // riding chord 1 until some tube captures
    Config c = start;
    double t0 = 0.0;
    int instant_legs = 0;

    while (t0 < t_max - 1e-12) {
        IntegrateOptions opt;
        opt.dt = dt;
        opt.dock_tol = kDefaultDockTol;
        double cap = t_max - t0;
        const PiecewiseField* field = nullptr;
        bool has_rule = true;
        StopRule rule;
        if (mode < 0) {
            field = &plan.fields.front();
            cap = std::min(cap, kCaptureBound);
            const ChordPlan* p = &plan;
            const double eps = plan.epsilon;
            rule.fn = [p, eps](const Config& cc) {
                double m = std::numeric_limits<double>::infinity();
                for (const ConfigPolyline& b : p->beta) m = std::min(m, b.distance(cc));
                return m - eps;
            };
            rule.label = "capture";
        } else if (n == 1) {
            field = &plan.fields.front();
            has_rule = false;
        } else {
            field = &plan.fields[mode];
            const ConfigPolyline* b = &plan.beta[mode];
            const Config qn = dock_config(plan.docking[(mode + 1) % n]);
            const double eps = plan.epsilon;
            rule.fn = [b, qn, eps](const Config& cc) {
                const double d = kSwitchScale * config_distance(cc, qn);
                if (d - eps > 0.2) return d - eps;  // tube term cannot flip the sign yet
                return kSwitchScale * b->distance(cc) + d - eps;
            };
            rule.label = "advance";
        }
        opt.t_max = cap;
        if (has_rule) opt.stop = rule;

        const Trajectory leg = integrate(*field, c, opt);

        bool stopped = false;
        double leg_end = cap;
        const std::size_t skip =
            (!out.samples.empty() && !leg.samples.empty() && leg.samples.front().t == 0.0) ? 1 : 0;
        for (std::size_t i = skip; i < leg.samples.size(); ++i)
            out.samples.push_back({t0 + leg.samples[i].t, leg.samples[i].c});
        for (const Event& e : leg.events) {
            if (e.kind == EventKind::Switch) {  // relabelled with the entered chord below
                stopped = true;
                leg_end = e.t;
                continue;
            }
            out.events.push_back({t0 + e.t, e.kind, e.payload});
        }
        if (!leg.samples.empty()) {
            c = leg.samples.back().c;
            if (!stopped) leg_end = leg.samples.back().t;
        }
        t0 += leg_end;

        if (!stopped) {
            if (mode < 0 && cap >= kCaptureBound - 1e-12)
                throw std::runtime_error("capture failed: no chord tube entered");
            break;  // horizon exhausted (or the lone chord ran its course)
        }
        if (mode < 0) {
            int pick = 0;
            double best = std::numeric_limits<double>::infinity();
            for (int j = 0; j < n; ++j) {
                const double phi = plan.beta[j].distance(c);
                if (phi < plan.epsilon) {  // lowest index wins on overlap
                    pick = j;
                    break;
                }
                if (phi < best) {
                    best = phi;
                    pick = j;
                }
            }
            mode = pick;
        } else {
            mode = (mode + 1) % n;
        }
        char label[24];
        std::snprintf(label, sizeof label, "chord %d", mode + 1);
        out.events.push_back({t0, EventKind::Switch, label});
        if (leg_end < dt) {
            if (++instant_legs > n + 1) throw std::runtime_error("chord switching stalled");
        } else {
            instant_legs = 0;
        }
    }
    // contacts can straddle a handover, so the word is rebuilt from the
    // stitched samples rather than concatenated from the stage words
    out.word = word_from_samples(out.samples, kDefaultDockTol);
    return out;
}

Word steady_word(const Trajectory& traj, const ChordPlan& plan) {
    const int n = static_cast<int>(plan.word.size());
    if (n == 0) throw std::invalid_argument("plan has no chords");
    if (static_cast<int>(traj.word.size()) < n)
        throw std::invalid_argument("trajectory has not completed a tour");
    return Word(traj.word.end() - n, traj.word.end());
}

double realized_cycle_error(const Trajectory& traj, const ChordPlan& plan) {
    const int n = static_cast<int>(plan.word.size());
    if (n == 0 || plan.arcs.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("plan has no chords");

    double lo = 0.0, hi = 0.0;
    if (n >= 2) {
        std::vector<double> ts;
        for (const Event& e : traj.events)
            if (e.kind == EventKind::Switch && e.payload.rfind("chord ", 0) == 0)
                ts.push_back(e.t);
        if (static_cast<int>(ts.size()) < 2 * n + 1)
            throw std::invalid_argument("trajectory needs two completed tours");
        hi = ts.back();
        lo = ts[ts.size() - 1 - static_cast<std::size_t>(n)];
    } else {
        // a lone chord never switches; its laps are delimited by the docks
        std::vector<double> ts;
        const std::string want = to_string(plan.word.front());
        for (const Event& e : traj.events)
            if (e.kind == EventKind::Dock && e.payload == want) ts.push_back(e.t);
        if (ts.size() < 3)
            throw std::invalid_argument("trajectory needs two completed tours");
        hi = ts.back();
        lo = ts[ts.size() - 2];
    }

    std::vector<Config> orbit;
    for (const Sample& s : traj.samples)
        if (s.t >= lo - 1e-12 && s.t <= hi + 1e-12) orbit.push_back(s.c);
    if (orbit.size() < 2)
        throw std::invalid_argument("trajectory too sparse over the last tour");

    std::vector<Config> cat;
    for (const std::vector<Config>& arc : plan.arcs)
        for (const Config& p : arc)
            if (cat.empty() || !(cat.back() == p)) cat.push_back(p);
    if (cat.size() > 2 && cat.front() == cat.back()) cat.pop_back();

    const ConfigPolyline alpha(std::move(cat), true);
    const ConfigPolyline path(orbit, false);
    double h = 0.0;
    for (const Config& p : orbit) h = std::max(h, alpha.distance(p));
    for (const Config& p : alpha.vertices()) h = std::max(h, path.distance(p));
    return h;
}

}  // namespace agv
