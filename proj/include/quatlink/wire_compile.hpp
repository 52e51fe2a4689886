#pragma once

#include <functional>
#include <vector>

#include "quatlink/square_diagram.hpp"

namespace quatlink::build {

// A wire is a strand-to-be whose interior intersections with other wires have
// not yet been turned into crossings. Endpoints may reference boundary points
// or pre-existing crossing slots (which the compiler leaves untouched).
struct Wire {
  sqd::EndRef a, b;             // both None for a closed wire
  std::vector<geom::Vec2> pts;  // closed wires: first == last
  int tag = -1;                 // caller data
};

// Decides which branch passes over at a discovered intersection.
// Arguments: (wire index i, arclength param on i, wire index j, param on j,
// intersection point); returns true when branch i is the overpass.
using OverRule = std::function<bool(int, double, int, double, geom::Vec2)>;

struct CompileResult {
  std::vector<sqd::Strand> strands;
  std::vector<sqd::Crossing> crossings;  // ids from first_id upward
};

// Splits wires at their pairwise (and self-) transversal intersections,
// creating crossings with CCW slot assignment and over/under given by the
// rule. Throws on non-transversal or coincident intersections.
CompileResult compile_wires(const std::vector<Wire>& wires, const OverRule& rule,
                            int first_crossing_id);

}  // namespace quatlink::build
