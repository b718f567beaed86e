#include "agv/config_space.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace agv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// index arithmetic over {1,2,3}
int mod3(int n) { return ((n - 1) % 3 + 3) % 3 + 1; }
int next3(int i) { return i % 3 + 1; }

// angles produced by the chart formulas land within rounding noise of the
// pi/6 grid on cell boundaries; snapping keeps seam handling exact
double snap_to_grid(double theta) {
    double k = std::round(theta / (kPi / 6.0));
    double g = k * (kPi / 6.0);
    if (std::abs(theta - g) < 1e-12) return wrap_angle(g);
    return theta;
}

// wedge w in 0..5 <-> the square it charts, counterclockwise
constexpr int kWedgeSquare[6][2] = {{1, 2}, {3, 2}, {3, 1}, {2, 1}, {2, 3}, {1, 3}};

// zone k in 0..11 at angle k*pi/6; even entries are A/B arcs, odd are AB corners
struct ZoneEntry {
    GrammarSymbol::Kind kind;
    int i, j;
};
constexpr ZoneEntry kZones[12] = {
    {GrammarSymbol::A, 1, 0},  {GrammarSymbol::AB, 1, 2}, {GrammarSymbol::B, 2, 0},
    {GrammarSymbol::AB, 3, 2}, {GrammarSymbol::A, 3, 0},  {GrammarSymbol::AB, 3, 1},
    {GrammarSymbol::B, 1, 0},  {GrammarSymbol::AB, 2, 1}, {GrammarSymbol::A, 2, 0},
    {GrammarSymbol::AB, 2, 3}, {GrammarSymbol::B, 3, 0},  {GrammarSymbol::AB, 1, 3},
};

void require_canonical(const GraphPoint& p, const char* who) {
    if (p.edge && (*p.edge < 1 || *p.edge > 3))
        throw std::invalid_argument(std::string(who) + ": edge index outside 1..3");
    if (p.value < 0.0 || p.value > 1.0)
        throw std::invalid_argument(std::string(who) + ": coordinate outside [0,1]");
    if (!p.edge && p.value != 0.0)
        throw std::invalid_argument(std::string(who) + ": index-free point away from center");
}

}  // namespace

bool operator==(const Config& a, const Config& b) { return a.x == b.x && a.y == b.y; }

void validate_config(const Config& c, double delta) {
    require_canonical(c.x, "x");
    require_canonical(c.y, "y");
    double d = graph_distance(y_graph(), c.x, c.y);
    if (d < delta)
        throw std::domain_error("vehicles closer than the separation guard (" +
                                std::to_string(d) + " < " + std::to_string(delta) + ")");
}

double config_distance(const Config& a, const Config& b) {
    double dx = graph_distance(y_graph(), a.x, b.x);
    double dy = graph_distance(y_graph(), a.y, b.y);
    return std::sqrt(dx * dx + dy * dy);
}

bool operator==(const CellId& l, const CellId& r) {
    return l.kind == r.kind && l.a == r.a && l.b == r.b;
}

std::string to_string(const CellId& c) {
    if (c.kind == CellId::Square)
        return "S" + std::to_string(c.a) + std::to_string(c.b);
    return "F" + std::to_string(c.a) + (c.b > 0 ? "xy" : "yx");
}

const std::vector<CellId>& square_cycle() {
    static const std::vector<CellId> cyc = [] {
        std::vector<CellId> v;
        for (const auto& w : kWedgeSquare) v.push_back({CellId::Square, w[0], w[1]});
        return v;
    }();
    return cyc;
}

double wrap_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t;
}

int parity(double theta) {
    double t = wrap_angle(theta);
    long long a = static_cast<long long>(std::floor(3.0 * t / kPi));
    long long b = static_cast<long long>(std::floor(6.0 * t / kPi));
    return ((a + b) % 2 == 0) ? +1 : -1;
}

namespace {

// theta of the ray/interior point through c, per the chart's two branches
double chart_angle(const GraphPoint& x, const GraphPoint& y) {
    if (!x.edge && !y.edge) throw std::domain_error("both vehicles at the center");
    if (x.edge && y.edge && *x.edge == *y.edge)
        throw std::domain_error("vehicles share an edge: fins have no disc image");
    double t = std::atan2(y.value, x.value);
    double theta;
    if (!x.edge || (y.edge && *y.edge == next3(*x.edge)))
        theta = (2.0 / 3.0) * t - (kTwoPi / 3.0) * (*y.edge + 1);
    else
        theta = -(2.0 / 3.0) * t - (kTwoPi / 3.0) * (*x.edge - 1);
    return snap_to_grid(wrap_angle(theta));
}

}  // namespace

CellId cell_of(const Config& c) {
    const GraphPoint x = canonicalize(c.x), y = canonicalize(c.y);
    require_canonical(x, "x");
    require_canonical(y, "y");
    if (x.edge && y.edge) {
        if (*x.edge == *y.edge) {
            if (x.value == y.value) throw std::domain_error("configuration on the diagonal");
            return {CellId::Fin, *x.edge, x.value < y.value ? +1 : -1};
        }
        return {CellId::Square, *x.edge, *y.edge};
    }
    // one vehicle at the center: boundary of two squares; take the wedge the
    // chart angle opens into (half-open wedges [n*pi/3, (n+1)*pi/3))
    double theta = chart_angle(x, y);
    int w = static_cast<int>(std::llround(theta / (kPi / 3.0))) % 6;
    return {CellId::Square, kWedgeSquare[w][0], kWedgeSquare[w][1]};
}

DiscPoint to_disc(const Config& c) {
    const GraphPoint x = canonicalize(c.x), y = canonicalize(c.y);
    require_canonical(x, "x");
    require_canonical(y, "y");
    if (x.edge && y.edge && *x.edge == *y.edge)
        throw std::domain_error("vehicles share an edge: fins have no disc image");
    double theta = chart_angle(x, y);
    double r = parity(theta) > 0 ? x.value : y.value;
    if (r <= 0.0) throw std::domain_error("chart radius vanished (both at center?)");
    return {r, theta};
}

Config from_disc(const DiscPoint& p) {
    if (!(p.r > 0.0) || p.r > 1.0)
        throw std::domain_error("disc radius outside (0,1]");
    double theta = snap_to_grid(wrap_angle(p.theta));
    double nu_x, nu_y;
    if (parity(theta) > 0) {
        nu_x = p.r;
        nu_y = p.r * std::abs(std::tan(1.5 * theta));
    } else {
        nu_y = p.r;
        nu_x = p.r * std::abs(std::cos(1.5 * theta) / std::sin(1.5 * theta));
    }
    if (nu_x < 1e-12) nu_x = 0.0;
    if (nu_y < 1e-12) nu_y = 0.0;
    nu_x = std::min(nu_x, 1.0);
    nu_y = std::min(nu_y, 1.0);
    int ix = mod3(static_cast<int>(std::floor(-(1.5 / kPi) * (theta - kPi))));
    int iy = mod3(static_cast<int>(std::floor(-(1.5 / kPi) * theta)));
    Config c{GraphPoint{ix, nu_x}, GraphPoint{iy, nu_y}};
    c.x = canonicalize(c.x);
    c.y = canonicalize(c.y);
    return c;
}

bool operator==(const GrammarSymbol& a, const GrammarSymbol& b) {
    return a.kind == b.kind && a.i == b.i && (a.kind != GrammarSymbol::AB || a.j == b.j);
}

std::string to_string(const GrammarSymbol& s) {
    switch (s.kind) {
        case GrammarSymbol::A: return "A" + std::to_string(s.i);
        case GrammarSymbol::B: return "B" + std::to_string(s.i);
        default: return "AB" + std::to_string(s.i) + std::to_string(s.j);
    }
}

GrammarSymbol parse_symbol(const std::string& token) {
    auto digit = [](char c) -> int {
        if (c < '1' || c > '3') throw std::invalid_argument("leaf index must be 1..3");
        return c - '0';
    };
    if (token.size() == 2 && (token[0] == 'A' || token[0] == 'B'))
        return {token[0] == 'A' ? GrammarSymbol::A : GrammarSymbol::B, digit(token[1]), 0};
    if (token.size() == 4 && token[0] == 'A' && token[1] == 'B') {
        GrammarSymbol s{GrammarSymbol::AB, digit(token[2]), digit(token[3])};
        if (s.i == s.j) throw std::invalid_argument("AB symbol needs distinct leaves: " + token);
        return s;
    }
    throw std::invalid_argument("unrecognized grammar symbol: " + token);
}

std::string to_string(const Word& w) {
    std::string out;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (k) out += ' ';
        out += to_string(w[k]);
    }
    return out;
}

int zone_index(const GrammarSymbol& s) {
    for (int k = 0; k < 12; ++k) {
        const ZoneEntry& z = kZones[k];
        if (z.kind != s.kind || z.i != s.i) continue;
        if (s.kind != GrammarSymbol::AB || z.j == s.j) return k;
    }
    throw std::invalid_argument("symbol without a boundary zone: " + to_string(s));
}

GrammarSymbol symbol_at_zone(int index) {
    int k = ((index % 12) + 12) % 12;
    return {kZones[k].kind, kZones[k].i, kZones[k].j};
}

double zone_angle(const GrammarSymbol& s) { return zone_index(s) * (kPi / 6.0); }

BoundaryArc boundary_angle(const GrammarSymbol& s) {
    double c = zone_angle(s);
    if (s.kind == GrammarSymbol::AB) return {c, c};
    return {wrap_angle(c - kPi / 6.0), wrap_angle(c + kPi / 6.0)};
}

std::optional<GrammarSymbol> docking_symbol(const Config& c, double tol) {
    if (tol <= 0.0 || tol >= 0.5) throw std::invalid_argument("docking tolerance outside (0,0.5)");
    const GraphPoint x = canonicalize(c.x), y = canonicalize(c.y);
    bool dx = x.edge && x.value >= 1.0 - tol;
    bool dy = y.edge && y.value >= 1.0 - tol;
    if (dx && dy) {
        if (*x.edge == *y.edge) return std::nullopt;  // one station cannot hold both
        return GrammarSymbol{GrammarSymbol::AB, *x.edge, *y.edge};
    }
    if (dx) return GrammarSymbol{GrammarSymbol::A, *x.edge, 0};
    if (dy) return GrammarSymbol{GrammarSymbol::B, *y.edge, 0};
    return std::nullopt;
}

bool is_monotone(const Word& w) {
    if (w.empty()) throw std::invalid_argument("empty word");
    if (w.size() == 1) return true;
    int total = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        int a = zone_index(w[k]);
        int b = zone_index(w[(k + 1) % w.size()]);
        int step = ((b - a) % 12 + 12) % 12;
        if (step == 0) return false;  // repeated zone breaks strict order
        total += step;
    }
    return total == 12;  // exactly one pass around the boundary
}

namespace {

struct XY {
    double x, y;
};

XY lift(const DiscPoint& p) { return {p.r * std::cos(p.theta), p.r * std::sin(p.theta)}; }

// signed angle swept by the straight segment a -> b as seen from the origin
double sweep(const XY& a, const XY& b) {
    double cross = a.x * b.y - a.y * b.x;
    double dot = a.x * b.x + a.y * b.y;
    if (cross == 0.0 && dot <= 0.0)
        throw std::invalid_argument("polyline passes through the origin");
    return std::atan2(cross, dot);
}

}  // namespace

int winding_number(const std::vector<DiscPoint>& poly) {
    if (poly.size() < 2) throw std::invalid_argument("degenerate polyline");
    for (const auto& p : poly)
        if (p.r <= 0.0) throw std::invalid_argument("polyline vertex at the origin");
    double total = 0.0;
    for (std::size_t k = 0; k < poly.size(); ++k)
        total += sweep(lift(poly[k]), lift(poly[(k + 1) % poly.size()]));
    return static_cast<int>(std::llround(total / kTwoPi));
}

std::vector<double> gap_angles(const std::vector<double>& thetas) {
    if (thetas.empty()) throw std::invalid_argument("no boundary points");
    if (thetas.size() == 1) return {kTwoPi};
    std::vector<double> gaps(thetas.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        double a = wrap_angle(thetas[k]);
        double b = wrap_angle(thetas[(k + 1) % thetas.size()]);
        gaps[k] = wrap_angle(b - a);
        sum += gaps[k];
    }
    if (std::abs(sum - kTwoPi) > 1e-9)
        throw std::invalid_argument("visiting order winds the circle more than once");
    return gaps;
}

int wd_cost(const std::vector<DiscPoint>& path, bool closed) {
    if (path.size() < 2) return 0;
    // lift the angular coordinate along the path so ray contacts become
    // integer-level contacts of a scalar piecewise-linear function
    std::vector<XY> pts(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) pts[k] = lift(path[k]);
    std::vector<double> phi(path.size());
    phi[0] = path[0].theta;
    for (std::size_t k = 1; k < path.size(); ++k)
        phi[k] = phi[k - 1] + sweep(pts[k - 1], pts[k]);
    if (closed) phi.push_back(phi.back() + sweep(pts.back(), pts.front()));

    const double step = kPi / 3.0;
    const double tol = 1e-9;
    auto level_at = [&](double v) -> std::optional<long long> {
        long long m = static_cast<long long>(std::llround(v / step));
        if (std::abs(v - m * step) < tol) return m;
        return std::nullopt;
    };

    // a contact is a maximal run of on-level vertices, or a level passed
    // strictly inside a segment; per segment phi is linear, so a run can
    // only continue through vertices sharing the level
    int contacts = 0;
    std::optional<long long> run = level_at(phi[0]);
    bool start_on_level = run.has_value();
    if (start_on_level) ++contacts;
    for (std::size_t k = 1; k < phi.size(); ++k) {
        double a = phi[k - 1], b = phi[k];
        auto la = level_at(a), lb = level_at(b);
        long long m_lo = static_cast<long long>(std::ceil(std::min(a, b) / step - tol));
        long long m_hi = static_cast<long long>(std::floor(std::max(a, b) / step + tol));
        for (long long m = m_lo; m <= m_hi; ++m) {
            if ((la && *la == m) || (lb && *lb == m)) continue;  // vertex contacts below
            ++contacts;
        }
        if (lb) {
            if (!(run && *run == *lb)) ++contacts;  // new run starts here
        }
        run = lb;
    }
    // on a closed path the two terminal runs are the same geometric contact
    if (closed && start_on_level && run.has_value() && contacts > 1) --contacts;
    return contacts;
}

WindingClass optimal_winding_class(const std::vector<double>& gaps) {
    for (double g : gaps)
        if (g > kPi) return WindingClass::Zero;
    return WindingClass::PlusMinusOne;
}

}  // namespace agv
