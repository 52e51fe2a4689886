#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quatlink/geom.hpp"
#include "quatlink/square_diagram.hpp"

namespace quatlink::lens {

// Disk diagram of a link in L(4,1): unit disk centered at the origin,
// boundary points labeled +-1..+-n on the boundary circle, +t glued to -t.
struct DiskBoundaryPoint {
  int id = -1;
  int label = 0;      // signed, nonzero
  double angle = 0;   // turns in [0, 1)
  geom::Vec2 pos() const;
};

using Crossing = sqd::Crossing;
using Strand = sqd::Strand;
using EndRef = sqd::EndRef;

struct DiskDiagram {
  int n = 0;
  double tolerance = 1e-9;
  std::vector<DiskBoundaryPoint> boundary_points;
  std::vector<Crossing> crossings;
  std::vector<Strand> strands;

  const DiskBoundaryPoint* find_point(int id) const;
  const DiskBoundaryPoint* find_label(int label) const;
  const Crossing* find_crossing(int id) const;
};

DiskDiagram parse_disk(const std::string& text);
DiskDiagram parse_disk_file(const std::string& path);
std::string serialize(const DiskDiagram& d);

sqd::ValidationReport validate_disk(const DiskDiagram& d);

struct DiskComponent {
  std::vector<int> strand_indices;
  int steps = 0;          // signed sum of +t->-t transitions
  int cls = 0;            // class in Z/4 up to inversion: min(c, 4-c)
  std::vector<int> labels_used;  // |labels| of the pairs crossed, in order
};

std::vector<DiskComponent> trace_disk_components(const DiskDiagram& d);

struct LensLiftCounts {
  int rp3 = 0;  // components of the lift in the double cover
  int s3 = 0;   // components of the lift in S^3
};
LensLiftCounts lens_lift_counts(const DiskDiagram& d);
int s3_count_for_class(int cls);
int rp3_count_for_class(int cls);

// One entry of the standardization script.
struct LensMove {
  enum class Kind { Swap, Slide } kind;
  int label_a = 0;       // swap: CCW-earlier point's label; slide: the point
  int label_b = 0;       // swap only
  double target = 0;     // slide only: target angle in turns
};

struct StandardDiskDiagram {
  DiskDiagram diagram;
  // rot90-adapted layout: +t at angle t/(4(n+1)) turns, -t a quarter turn on
  std::vector<LensMove> script;
  int swap_count = 0;
};

// Sorts the boundary labels to (+1..+n, -1..-n) read counterclockwise from
// angle 0 by boundary transpositions (one new crossing each; a positive point
// slides over a negative one), then slides points to the adapted layout.
// Requires radial strand ends in the outer collar (lift_to_disk output and
// the shipped fixtures satisfy this).
StandardDiskDiagram standardize(const DiskDiagram& d);

// Reflection about the upper-left/lower-right axis with all crossings
// inverted; labels preserved.
DiskDiagram mirror_invert(const DiskDiagram& d);

// Sub-diagram spanned by one traced component (crossings with the rest of
// the diagram are smoothed away); labels renumbered to 1..n'.
DiskDiagram restrict_component(const DiskDiagram& d, int component_index);

// Combinatorial fingerprint (label-renumbering and isotopy invariant).
std::string canonical_disk_code(const DiskDiagram& d);

}  // namespace quatlink::lens
