#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "quatlink/geom.hpp"
#include "quatlink/laurent.hpp"

namespace quatlink::pd {

// Classical link diagram as a 4-valent combinatorial map. Crossing slots are
// numbered 0..3 in counterclockwise order; slots s and s+2 belong to one
// strand passing straight through. over_pair 0 means slots 0 and 2 carry the
// overpass, 1 means slots 1 and 3. Arcs are recorded by `mate`: slot-end
// index 4*c + s is joined to mate[4*c + s]. Crossing-free circles are only
// counted (free_loops); they carry no combinatorics.
struct PlanarDiagram {
  struct Crossing {
    int over_pair = 0;
    geom::Vec2 pos;  // optional drawing hint; not part of the combinatorics
  };
  std::vector<Crossing> crossings;
  std::vector<int> mate;
  int free_loops = 0;

  int n() const { return static_cast<int>(crossings.size()); }
  int ends() const { return 4 * n(); }
  static int through(int end) { return (end & ~3) | ((end + 2) & 3); }
};

struct MapError : std::runtime_error {
  explicit MapError(const std::string& m) : std::runtime_error(m) {}
};

struct CapExceeded : std::runtime_error {
  explicit CapExceeded(const std::string& m) : std::runtime_error(m) {}
};

// Structural soundness: mate is a fixed-point-free involution over all slot
// ends, and every connected component of the map satisfies V - E + F = 2.
void validate_map(const PlanarDiagram& d);

struct Components {
  int count = 0;                                // includes free loops
  int graph_components = 0;                     // crossing-connected pieces
  std::vector<int> component_of_end;            // slot-end -> component id
  std::vector<std::vector<int>> crossing_ids;   // per component, sorted unique
  std::vector<int> representative_end;          // orbit rep per component (-1 for free loops)
};

Components components(const PlanarDiagram& d);

// Per-component orientation: flip[i] reverses component i's canonical
// traversal direction. Size may be smaller than count; missing entries mean
// canonical direction.
using Flips = std::vector<bool>;

int crossing_sign(const PlanarDiagram& d, const Components& comps, int crossing,
                  const Flips& flips);

// Symmetric integer matrix: off-diagonal entries are linking numbers,
// diagonal entries per-component writhes. Rows/columns follow components().
std::vector<std::vector<int>> linking_matrix(const PlanarDiagram& d,
                                             const Flips& flips = {});

int writhe(const PlanarDiagram& d, const Flips& flips = {});

// Kauffman bracket by the full state sum, normalized so a single circle has
// bracket 1. Throws CapExceeded past `cap` crossings.
LaurentPoly kauffman_bracket(const PlanarDiagram& d, int cap = 24);

// (-A)^{-3w} * bracket, as a Laurent polynomial in A (t = A^-4).
LaurentPoly jones(const PlanarDiagram& d, int cap = 24, const Flips& flips = {});

struct SplitReport {
  bool split_at_diagram_level = false;
  std::vector<int> part_of_component;  // component id -> connected part id
};
SplitReport split_diagram_check(const PlanarDiagram& d);

// Deterministic fingerprint, invariant under relabeling of crossings and
// choice of traversal starts.
std::string canonical_code(const PlanarDiagram& d);

// PD text: "PD[loops=k] X[a,b,c,d] ..." with edges numbered along oriented
// components and tuples counterclockwise from the incoming under edge.
std::string export_pd(const PlanarDiagram& d);
PlanarDiagram import_pd(const std::string& text);
std::string export_dt(const PlanarDiagram& d);  // knots only

// Rotation-system faces: sequences of slot ends with the face kept on the
// left when walking arcs.
std::vector<std::vector<int>> faces(const PlanarDiagram& d);

// Greedy crossing reduction by backward R1/R2 until stable. Isotopy-safe;
// used to bring lifted diagrams under the state-sum cap.
PlanarDiagram simplify(const PlanarDiagram& d);

// Planar Reidemeister rewrites used by property tests and fixture tooling.
PlanarDiagram r1_add(const PlanarDiagram& d, int end, bool positive_kink);
std::optional<PlanarDiagram> r1_remove(const PlanarDiagram& d, int crossing);
// Poke arc containing `end_a` over the arc containing `end_b`; both arcs must
// border a common face.
std::optional<PlanarDiagram> r2_add(const PlanarDiagram& d, int end_a, int end_b);
std::optional<PlanarDiagram> r2_remove(const PlanarDiagram& d, int c1, int c2);
std::optional<PlanarDiagram> r3(const PlanarDiagram& d, int c1, int c2, int c3);

}  // namespace quatlink::pd
