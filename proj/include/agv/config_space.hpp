#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agv/graph.hpp"

namespace agv {

// Joint state of the two vehicles on the Y-graph, both points canonical
// (index cleared exactly at the center).  States closer than the separation
// guard are rejected by validate_config, not by construction.
struct Config {
    GraphPoint x, y;
};

constexpr double kDefaultDelta = 0.02;   // separation guard (path metric)
constexpr double kDefaultDockTol = 0.05; // docking threshold: nu >= 1 - tol

bool operator==(const Config& a, const Config& b);

// Throws std::domain_error when the two vehicles are closer than delta.
void validate_config(const Config& c, double delta = kDefaultDelta);

// L2 product of the two path-metric factors.
double config_distance(const Config& a, const Config& b);

// Cells of the configuration space: six squares (vehicles on distinct
// edges) and six triangular fins (same edge, split by who is closer to
// the center).
struct CellId {
    enum Kind { Square, Fin } kind = Square;
    int a = 0;  // Square: x's edge.  Fin: the shared edge.
    int b = 0;  // Square: y's edge.  Fin: +1 when nu_x < nu_y, -1 otherwise.
};

bool operator==(const CellId& l, const CellId& r);
std::string to_string(const CellId& c);

// Squares in the cyclic order the circulating motion visits them.
const std::vector<CellId>& square_cycle();

// Cell containing c.  Configurations with a vehicle at the center lie on a
// square boundary; they are assigned to the wedge their disc angle falls in
// (half-open wedges [n*pi/3, (n+1)*pi/3)).
CellId cell_of(const Config& c);

// ---- disc model -------------------------------------------------------

struct DiscPoint {
    double r = 0.0;
    double theta = 0.0;  // kept in [0, 2*pi)
};

double wrap_angle(double theta);  // into [0, 2*pi)

// Which of the two coordinates carries the radius in the wedge containing
// theta: +1 means nu_x = r, -1 means nu_y = r.  Constant on pi/6 wedges.
int parity(double theta);

// Polar chart of the six squares glued along their center seams
// (fins have no disc image and are rejected).
DiscPoint to_disc(const Config& c);
Config from_disc(const DiscPoint& p);

// ---- docking grammar --------------------------------------------------

// A_i: x docked at leaf i, y undocked.  B_j: y docked at leaf j.
// AB_{i,j}: both docked, x at i, y at j (i != j).
struct GrammarSymbol {
    enum Kind { A, B, AB } kind = A;
    int i = 1;  // A: x's leaf.  B: y's leaf.  AB: x's leaf.
    int j = 0;  // AB only: y's leaf.
};

bool operator==(const GrammarSymbol& a, const GrammarSymbol& b);
std::string to_string(const GrammarSymbol& s);
GrammarSymbol parse_symbol(const std::string& token);  // "A1", "B2", "AB32"

using Word = std::vector<GrammarSymbol>;

std::string to_string(const Word& w);

// Position of the symbol's zone in the cyclic boundary order
// A1, AB12, B2, AB32, A3, AB31, B1, AB21, A2, AB23, B3, AB13.
int zone_index(const GrammarSymbol& s);
GrammarSymbol symbol_at_zone(int index);  // inverse, index mod 12

// Center angle of the zone on the boundary circle (multiples of pi/6).
double zone_angle(const GrammarSymbol& s);

// Angular extent of a zone: A/B zones are open arcs of width pi/3, AB
// corners are single points (lo == hi).
struct BoundaryArc {
    double lo = 0.0, hi = 0.0;
};
BoundaryArc boundary_angle(const GrammarSymbol& s);

// Symbol the configuration currently docks as, if any.  tol is the docking
// threshold.  Both vehicles docked on the same edge has no symbol.
std::optional<GrammarSymbol> docking_symbol(const Config& c, double tol = kDefaultDockTol);

// True when the word visits zones in one strictly ascending pass around the
// boundary cycle (a single-symbol word is trivially monotone).
bool is_monotone(const Word& w);

// ---- winding and crossing costs ---------------------------------------

// Signed number of turns of a closed polyline about the origin; the points
// are joined by straight segments in the Cartesian lift and must avoid the
// origin.
int winding_number(const std::vector<DiscPoint>& closed_polyline);

// Consecutive angular gaps of boundary points in visiting order, each in
// [0, 2*pi), summing to 2*pi.  A single point yields {2*pi}.  Throws when
// the visiting order is not a single pass around the circle.
std::vector<double> gap_angles(const std::vector<double>& thetas);

// Number of contacts of the polyline with the six branch rays theta = n*pi/3
// (a tangential touch counts once, as does a transversal crossing).
int wd_cost(const std::vector<DiscPoint>& path, bool closed = true);

enum class WindingClass { Zero, PlusMinusOne };

// Which winding class contains a crossing-minimal embedded monotone cycle:
// Zero when some gap exceeds pi, PlusMinusOne otherwise.
WindingClass optimal_winding_class(const std::vector<double>& gaps);

}  // namespace agv
