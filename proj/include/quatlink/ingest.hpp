#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quatlink/cube.hpp"
#include "quatlink/square_diagram.hpp"

namespace quatlink::ingest {

// Piecewise-linear link in the open unit cube. A component is a cyclic
// sequence of legs; a leg runs inside the cube and may exit through a face,
// in which case the next leg starts at the glued point of the opposite face.
struct Leg {
  std::vector<cube::Vec3> pts;         // interior vertices of the leg
  std::optional<cube::Face> exit;      // face this leg exits through
  cube::Vec3 exit_point{0, 0, 0};      // point on that face
};

struct PLComponent {
  std::vector<Leg> legs;  // a component with no exits has one closed leg
  bool closed_in_cube() const {
    return legs.size() == 1 && !legs[0].exit.has_value();
  }
};

struct PLLink {
  std::vector<PLComponent> components;
  double tolerance = 1e-9;
};

PLLink parse_pll(const std::string& text);
PLLink parse_pll_file(const std::string& path);
std::string serialize(const PLLink& l);

// Structural soundness: legs nonempty, interior points in the open cube,
// exit points on their faces, re-entry chains consistent.
sqd::ValidationReport validate_pll(const PLLink& l);

enum class Axis : uint8_t { I = 0, J = 1, K = 2 };

struct GenPosIssue {
  std::string message;
  cube::Vec3 where;
};

struct GenPosReport {
  std::vector<GenPosIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string to_string() const;
};

// Violations for projecting along the axis: near-vertical segments, triple
// points, tangencies, depth ties at crossings, boundary points near corners,
// vertices projecting onto other strands.
GenPosReport check_general_position(const PLLink& l, Axis axis, bool positive = true);

// Seeded vertex jitter bounded by delta resolving all reported violations
// for every axis, or throws after the retry cap. Rejects delta larger than
// half the minimum clearance between non-adjacent segments.
PLLink perturb(const PLLink& l, uint64_t seed, double delta = 1e-3,
               int retry_cap = 32);

// Orthogonal projection to a square diagram. Also applies the extra
// general-position margin needed by the lift construction when
// `lift_ready` is set (content clear of the diagonals and center).
sqd::SquareDiagram project(const PLLink& l, Axis axis, bool positive = true);

}  // namespace quatlink::ingest
