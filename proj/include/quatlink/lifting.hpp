#pragma once

#include <string>
#include <vector>

#include "quatlink/disk_diagram.hpp"
#include "quatlink/planar.hpp"
#include "quatlink/square_diagram.hpp"

namespace quatlink::lift {

// General-position requirements specific to the lift construction: strands
// transversal to the square's diagonals, and no crossing, internal point or
// vertex on a diagonal or at the center.
sqd::ValidationReport check_lift_preconditions(const sqd::SquareDiagram& d);

// Disk diagram of the lift of the link in the double cover aligned with the
// diagram's projection axis. Requires a valid diagram passing the
// preconditions; throws with a remediation hint otherwise.
lens::DiskDiagram lift_to_disk(const sqd::SquareDiagram& d);

// Planar diagram of the lift in S^3 of a standardized disk diagram: four
// copies glued cyclically, +t of one copy to -t of the next.
pd::PlanarDiagram lift_to_s3(const lens::StandardDiskDiagram& d);

// Positive full twist on n strands: the braid (s1 s2 ... s(n-1))^n with all
// crossings positive under upward orientation.
struct TwistBlock {
  int n = 0;
  std::vector<int> word;  // generator indices 1..n-1, all positive
  static TwistBlock full_twist(int n);
  int crossing_count() const { return static_cast<int>(word.size()); }
  std::vector<int> permutation() const;  // image of each strand position
};

// Trace closure of a positive braid word on n strands.
pd::PlanarDiagram braid_closure(int n, const std::vector<int>& word);

struct StageReport {
  std::string stage;
  bool ok;
  std::string detail;
};

struct ConsistencyReport {
  std::vector<StageReport> stages;
  bool ok() const {
    for (auto& s : stages)
      if (!s.ok) return false;
    return true;
  }
  std::string to_string() const;
};

// Runs the full pipeline on a square diagram and cross-checks constructive
// component counts against the algebraic orbit counts at the disk and S^3
// stages.
ConsistencyReport predict_and_check(const sqd::SquareDiagram& d);

}  // namespace quatlink::lift
