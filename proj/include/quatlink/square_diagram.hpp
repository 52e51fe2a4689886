#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "quatlink/geom.hpp"
#include "quatlink/q8.hpp"

namespace quatlink::sqd {

enum class BPKind : uint8_t { Horizontal, Vertical, Internal };
enum class EdgeSide : uint8_t { Top, Bottom, Left, Right, NoSide };

struct BoundaryPoint {
  int id = -1;
  BPKind kind = BPKind::Internal;
  int label = 0;           // internal: signed +-t; horizontal/vertical: t >= 1
  EdgeSide side = EdgeSide::NoSide;
  geom::Vec2 pos;
};

struct EndRef {
  enum class Type : uint8_t { None, Boundary, Crossing };
  Type type = Type::None;
  int id = -1;    // boundary point id or crossing id
  int slot = -1;  // crossing slot 0..3
  bool operator==(const EndRef& o) const {
    return type == o.type && id == o.id && slot == o.slot;
  }
};

struct Crossing {
  int id = -1;
  geom::Vec2 pos;
  int over_pair = 0;  // 0: slots 0-2 pass over; 1: slots 1-3 pass over
};

struct Strand {
  EndRef a, b;                  // both None for a closed loop
  std::vector<geom::Vec2> pts;  // includes endpoints; closed loops: first == last
  bool closed() const { return a.type == EndRef::Type::None; }
};

struct SquareDiagram {
  int n_h = 0, n_v = 0, n_i = 0;
  double tolerance = 1e-9;
  std::vector<BoundaryPoint> boundary_points;
  std::vector<Crossing> crossings;
  std::vector<Strand> strands;

  const BoundaryPoint* find_point(int id) const;
  const Crossing* find_crossing(int id) const;
  // Boundary point glued to `p` (same horizontal/vertical label on the other
  // side, or the internal point with opposite label). Null if absent.
  const BoundaryPoint* partner(const BoundaryPoint& p) const;
};

struct Violation {
  int condition;  // 1..8 per the diagram conditions, 0 for structural defects
  std::string message;
  std::optional<geom::Vec2> where;
};

struct ValidationReport {
  std::vector<Violation> items;
  bool ok() const { return items.empty(); }
  std::string to_string() const;
};

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(int line_, int col_, const std::string& msg);
};

SquareDiagram parse(const std::string& text);
SquareDiagram parse_file(const std::string& path);
std::string serialize(const SquareDiagram& d);

ValidationReport validate(const SquareDiagram& d);

struct TracedComponent {
  std::vector<int> strand_indices;     // in traversal order
  std::vector<q8::QElem> word;         // monodromy letters in traversal order
  q8::QElem holonomy = q8::QElem::One; // product of word, in order
  q8::ConjClass cls{q8::ConjTag::C1, q8::QElem::One};
};

// Requires a valid diagram. Components are returned in a deterministic
// canonical order.
std::vector<TracedComponent> trace_components(const SquareDiagram& d);

struct LiftCountTable {
  int xi = 0, xj = 0, xk = 0, rp3 = 0, s3 = 0;
  bool operator==(const LiftCountTable& o) const {
    return xi == o.xi && xj == o.xj && xk == o.xk && rp3 == o.rp3 && s3 == o.s3;
  }
};

LiftCountTable component_lift_counts(const SquareDiagram& d);
LiftCountTable counts_for_classes(const std::vector<q8::ConjClass>& classes);

// Class bookkeeping under one of the six outer automorphism representatives:
// how each traced component's class transforms. No geometric re-projection.
struct RelabelResult {
  q8::OutAutomorphism perm;
  std::vector<q8::ConjClass> before;
  std::vector<q8::ConjClass> after;
  LiftCountTable counts_after;
};
RelabelResult relabel_axes(const SquareDiagram& d, const q8::OutAutomorphism& perm);

}  // namespace quatlink::sqd
