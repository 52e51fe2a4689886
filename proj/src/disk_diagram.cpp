#include "quatlink/disk_diagram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "quatlink/wire_compile.hpp"

namespace quatlink::lens {

using geom::Vec2;
using sqd::BPKind;  // not used for disk points, but EndRef/Strand come along

namespace {
constexpr double kTau = 6.283185307179586476925286766559;

Vec2 polar(double r, double turns) {
  return {r * std::cos(kTau * turns), r * std::sin(kTau * turns)};
}

double angle_turns(Vec2 p) {
  double a = std::atan2(p.y, p.x) / kTau;
  if (a < 0) a += 1.0;
  return a;
}
}  // namespace

Vec2 DiskBoundaryPoint::pos() const { return polar(1.0, angle); }

const DiskBoundaryPoint* DiskDiagram::find_point(int id) const {
  for (auto& p : boundary_points)
    if (p.id == id) return &p;
  return nullptr;
}

const DiskBoundaryPoint* DiskDiagram::find_label(int label) const {
  for (auto& p : boundary_points)
    if (p.label == label) return &p;
  return nullptr;
}

const Crossing* DiskDiagram::find_crossing(int id) const {
  for (auto& c : crossings)
    if (c.id == id) return &c;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Parse / serialize (mirrors the SQD grammar)

DiskDiagram parse_disk(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  DiskDiagram d;
  enum class Section { None, Points, Crossings, Strands } section = Section::None;
  bool have_header = false, have_count = false;
  std::set<int> point_ids, crossing_ids;

  auto fail = [&](const std::string& msg) {
    throw sqd::ParseError(lineno, 1, msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok[0] == '#') continue;
    if (!have_header) {
      std::string ver;
      if (tok != "DKD" || !(ls >> ver) || ver != "1") fail("expected header 'DKD 1'");
      have_header = true;
      continue;
    }
    if (tok == "count") {
      if (!(ls >> d.n) || d.n < 0) fail("bad count");
      have_count = true;
    } else if (tok == "tolerance") {
      if (!(ls >> d.tolerance) || d.tolerance <= 0) fail("bad tolerance");
    } else if (tok == "points") {
      section = Section::Points;
    } else if (tok == "crossings") {
      section = Section::Crossings;
    } else if (tok == "strands") {
      section = Section::Strands;
    } else if (tok == "B") {
      if (section != Section::Points) fail("B line outside points section");
      DiskBoundaryPoint p;
      std::string lab;
      if (!(ls >> p.id >> lab >> p.angle)) fail("short B line");
      try {
        p.label = std::stoi(lab);
      } catch (...) {
        fail("bad label " + lab);
      }
      if (p.label == 0) fail("label must be signed nonzero");
      if (!point_ids.insert(p.id).second) fail("duplicate point id");
      p.angle = p.angle - std::floor(p.angle);
      d.boundary_points.push_back(p);
    } else if (tok == "X") {
      if (section != Section::Crossings) fail("X line outside crossings section");
      Crossing c;
      std::string over;
      if (!(ls >> c.id >> c.pos.x >> c.pos.y >> over)) fail("short X line");
      if (!crossing_ids.insert(c.id).second) fail("duplicate crossing id");
      if (over == "02") c.over_pair = 0;
      else if (over == "13") c.over_pair = 1;
      else fail("over pair must be 02 or 13");
      d.crossings.push_back(c);
    } else if (tok == "S") {
      if (section != Section::Strands) fail("S line outside strands section");
      Strand s;
      std::string a;
      if (!(ls >> a)) fail("short S line");
      auto parse_ref = [&](const std::string& t) {
        EndRef r;
        if (t.size() >= 2 && t[0] == 'P') {
          r.type = EndRef::Type::Boundary;
          r.id = std::stoi(t.substr(1));
        } else if (t.size() >= 4 && t[0] == 'X' && t.find('.') != std::string::npos) {
          r.type = EndRef::Type::Crossing;
          auto dp = t.find('.');
          r.id = std::stoi(t.substr(1, dp - 1));
          r.slot = std::stoi(t.substr(dp + 1));
          if (r.slot < 0 || r.slot > 3) fail("slot out of range");
        } else {
          fail("bad endpoint reference " + t);
        }
        return r;
      };
      if (a == "closed") {
        s.a = s.b = EndRef{};
      } else {
        std::string b;
        if (!(ls >> b)) fail("S line needs two endpoints");
        s.a = parse_ref(a);
        s.b = parse_ref(b);
      }
      std::vector<double> nums;
      double v;
      while (ls >> v) nums.push_back(v);
      if (nums.size() % 2 != 0) fail("odd coordinate count");
      for (size_t q = 0; q + 1 < nums.size(); q += 2)
        s.pts.push_back({nums[q], nums[q + 1]});
      d.strands.push_back(s);
    } else {
      fail("unknown section or directive '" + tok + "'");
    }
  }
  if (!have_header) throw sqd::ParseError(1, 1, "expected header 'DKD 1'");
  if (!have_count) fail("missing count line");
  for (auto& s : d.strands)
    for (const EndRef* e : {&s.a, &s.b}) {
      if (e->type == EndRef::Type::Boundary && !d.find_point(e->id))
        fail("dangling boundary reference P" + std::to_string(e->id));
      if (e->type == EndRef::Type::Crossing && !d.find_crossing(e->id))
        fail("dangling crossing reference X" + std::to_string(e->id));
    }
  return d;
}

DiskDiagram parse_disk_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_disk(ss.str());
}

namespace {
std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}
}  // namespace

std::string serialize(const DiskDiagram& d) {
  std::ostringstream os;
  os << "DKD 1\n";
  os << "count " << d.n << "\n";
  os << "tolerance " << fmt(d.tolerance) << "\n";
  os << "points\n";
  for (auto& p : d.boundary_points)
    os << "B " << p.id << " " << (p.label > 0 ? "+" : "") << p.label << " "
       << fmt(p.angle) << "\n";
  os << "crossings\n";
  for (auto& c : d.crossings)
    os << "X " << c.id << " " << fmt(c.pos.x) << " " << fmt(c.pos.y) << " "
       << (c.over_pair == 0 ? "02" : "13") << "\n";
  os << "strands\n";
  for (auto& s : d.strands) {
    os << "S";
    if (s.closed()) os << " closed";
    else {
      auto emit = [&](const EndRef& e) {
        if (e.type == EndRef::Type::Boundary) os << " P" << e.id;
        else os << " X" << e.id << "." << e.slot;
      };
      emit(s.a);
      emit(s.b);
    }
    for (auto& p : s.pts) os << "  " << fmt(p.x) << " " << fmt(p.y);
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Validation

sqd::ValidationReport validate_disk(const DiskDiagram& d) {
  sqd::ValidationReport rep;
  const double eps = d.tolerance;
  auto add = [&](int cond, const std::string& msg,
                 std::optional<Vec2> where = std::nullopt) {
    rep.items.push_back({cond, msg, where});
  };

  // labels +-1..+-n exactly once each
  std::map<int, int> seen;
  for (auto& p : d.boundary_points) seen[p.label]++;
  for (int t = 1; t <= d.n; ++t) {
    if (seen[t] != 1) add(6, "label +" + std::to_string(t) + " appears " +
                                 std::to_string(seen[t]) + " times");
    if (seen[-t] != 1)
      add(6, "label -" + std::to_string(t) + " appears " +
                 std::to_string(seen[-t]) + " times");
  }
  for (auto& [lab, cnt] : seen)
    if (std::abs(lab) < 1 || std::abs(lab) > d.n)
      add(6, "label " + std::to_string(lab) + " out of range");

  auto end_position = [&](const EndRef& e) -> Vec2 {
    if (e.type == EndRef::Type::Boundary) return d.find_point(e.id)->pos();
    return d.find_crossing(e.id)->pos;
  };

  // strands inside the disk; endpoints match; interiors off the circle
  for (size_t si = 0; si < d.strands.size(); ++si) {
    const Strand& s = d.strands[si];
    std::string name = "strand " + std::to_string(si);
    if (s.pts.size() < 2) {
      add(0, name + " has fewer than 2 vertices");
      continue;
    }
    if (s.closed()) {
      if (geom::dist(s.pts.front(), s.pts.back()) > eps)
        add(0, name + " closed but first != last");
    } else {
      if (geom::dist(s.pts.front(), end_position(s.a)) > 1e-7)
        add(0, name + " first vertex does not match endpoint a", s.pts.front());
      if (geom::dist(s.pts.back(), end_position(s.b)) > 1e-7)
        add(0, name + " last vertex does not match endpoint b", s.pts.back());
    }
    for (size_t vi = 0; vi < s.pts.size(); ++vi) {
      double r = geom::norm(s.pts[vi]);
      if (r > 1 + eps) add(0, name + " leaves the disk", s.pts[vi]);
      bool terminal = !s.closed() && (vi == 0 || vi + 1 == s.pts.size());
      bool terminal_boundary =
          terminal &&
          ((vi == 0 && s.a.type == EndRef::Type::Boundary) ||
           (vi + 1 == s.pts.size() && s.b.type == EndRef::Type::Boundary));
      if (r >= 1 - eps && !terminal_boundary)
        add(0, name + " touches the boundary circle at an interior vertex",
            s.pts[vi]);
    }
  }

  // slot occupancy
  std::map<int, int> point_use;
  std::map<std::pair<int, int>, int> slot_use;
  for (auto& s : d.strands)
    for (const EndRef* e : {&s.a, &s.b}) {
      if (e->type == EndRef::Type::Boundary) point_use[e->id]++;
      if (e->type == EndRef::Type::Crossing) slot_use[{e->id, e->slot}]++;
    }
  for (auto& p : d.boundary_points) {
    int use = point_use.count(p.id) ? point_use[p.id] : 0;
    if (use != 1)
      add(0, "boundary point " + std::to_string(p.id) + " has " +
                 std::to_string(use) + " strand ends (want 1)",
          p.pos());
  }
  for (auto& c : d.crossings)
    for (int slot = 0; slot < 4; ++slot) {
      auto it = slot_use.find({c.id, slot});
      int use = it == slot_use.end() ? 0 : it->second;
      if (use != 1)
        add(0, "crossing " + std::to_string(c.id) + " slot " +
                   std::to_string(slot) + " has " + std::to_string(use) +
                   " ends (want 1)",
            c.pos);
    }

  // geometric intersections == declared crossings, interior, double points
  struct Hit {
    Vec2 p;
  };
  std::vector<Hit> hits;
  for (size_t i = 0; i < d.strands.size(); ++i)
    for (size_t j = i; j < d.strands.size(); ++j) {
      geom::Polyline pi{d.strands[i].pts}, pj{d.strands[j].pts};
      for (auto& h : geom::polyline_intersections(pi, pj, 1e-12, i == j))
        hits.push_back({h.point});
    }
  const double cluster_tol = 1e-7;
  std::vector<bool> used(hits.size(), false);
  for (size_t i = 0; i < hits.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    int cluster = 1;
    for (size_t j = i + 1; j < hits.size(); ++j)
      if (!used[j] && geom::dist(hits[i].p, hits[j].p) < cluster_tol) {
        used[j] = true;
        ++cluster;
      }
    if (cluster > 1) {
      add(2, "coincident intersections (triple point or worse)", hits[i].p);
      continue;
    }
    add(1, "strand intersection does not match any declared crossing",
        hits[i].p);
  }
  for (auto& c : d.crossings)
    if (geom::norm(c.pos) >= 1 - eps)
      add(3, "crossing on the boundary circle", c.pos);

  // slot CCW geometry
  for (auto& c : d.crossings) {
    struct EndDir {
      int slot;
      double angle;
    };
    std::vector<EndDir> dirs;
    for (auto& s : d.strands)
      for (const EndRef* e : {&s.a, &s.b})
        if (e->type == EndRef::Type::Crossing && e->id == c.id) {
          const auto& pts = s.pts;
          Vec2 adj = (e == &s.a) ? pts[1] : pts[pts.size() - 2];
          Vec2 dv = adj - c.pos;
          dirs.push_back({e->slot, std::atan2(dv.y, dv.x)});
        }
    if (dirs.size() != 4) continue;
    std::sort(dirs.begin(), dirs.end(),
              [](const EndDir& a, const EndDir& b) { return a.angle < b.angle; });
    for (int k = 0; k < 4; ++k)
      if (dirs[k].slot != k) {
        add(5, "crossing " + std::to_string(c.id) +
                   " slots not in CCW order from slot 0",
            c.pos);
        break;
      }
  }

  return rep;
}

// ---------------------------------------------------------------------------
// Tracing

std::vector<DiskComponent> trace_disk_components(const DiskDiagram& d) {
  struct Dir {
    int strand;
    bool forward;
  };
  std::map<std::pair<int, int>, Dir> from_slot;
  std::map<int, Dir> from_point;
  for (size_t si = 0; si < d.strands.size(); ++si) {
    const Strand& s = d.strands[si];
    if (s.closed()) continue;
    auto reg = [&](const EndRef& e, bool forward) {
      if (e.type == EndRef::Type::Boundary)
        from_point[e.id] = {static_cast<int>(si), forward};
      else
        from_slot[{e.id, e.slot}] = {static_cast<int>(si), forward};
    };
    reg(s.a, true);
    reg(s.b, false);
  }

  std::vector<DiskComponent> comps;
  std::set<int> visited;
  for (size_t start = 0; start < d.strands.size(); ++start) {
    if (visited.count(static_cast<int>(start))) continue;
    const Strand& s0 = d.strands[start];
    if (s0.closed()) {
      visited.insert(static_cast<int>(start));
      DiskComponent c;
      c.strand_indices.push_back(static_cast<int>(start));
      c.steps = 0;
      c.cls = 0;
      comps.push_back(std::move(c));
      continue;
    }
    DiskComponent tc;
    Dir cur{static_cast<int>(start), true};
    while (!visited.count(cur.strand)) {
      visited.insert(cur.strand);
      tc.strand_indices.push_back(cur.strand);
      const Strand& s = d.strands[cur.strand];
      EndRef e = cur.forward ? s.b : s.a;
      if (e.type == EndRef::Type::Crossing) {
        auto it = from_slot.find({e.id, (e.slot + 2) % 4});
        if (it == from_slot.end()) throw std::runtime_error("open crossing slot");
        cur = it->second;
      } else {
        const DiskBoundaryPoint* p = d.find_point(e.id);
        const DiskBoundaryPoint* q = d.find_label(-p->label);
        if (!q) throw std::runtime_error("unmatched boundary label");
        tc.steps += p->label > 0 ? +1 : -1;
        tc.labels_used.push_back(std::abs(p->label));
        auto it = from_point.find(q->id);
        if (it == from_point.end())
          throw std::runtime_error("partner point has no strand");
        cur = it->second;
      }
    }
    int c = ((tc.steps % 4) + 4) % 4;
    tc.cls = std::min(c, (4 - c) % 4);
    comps.push_back(std::move(tc));
  }
  // deterministic order: by smallest |label| used, then smallest strand index
  std::stable_sort(comps.begin(), comps.end(),
                   [](const DiskComponent& a, const DiskComponent& b) {
                     int la = a.labels_used.empty()
                                  ? (1 << 30)
                                  : *std::min_element(a.labels_used.begin(),
                                                      a.labels_used.end());
                     int lb = b.labels_used.empty()
                                  ? (1 << 30)
                                  : *std::min_element(b.labels_used.begin(),
                                                      b.labels_used.end());
                     if (la != lb) return la < lb;
                     return a.strand_indices.front() < b.strand_indices.front();
                   });
  return comps;
}

int s3_count_for_class(int cls) {
  switch (cls) {
    case 0: return 4;
    case 1: return 1;
    case 2: return 2;
    default: throw std::invalid_argument("class must be 0, 1 or 2");
  }
}

int rp3_count_for_class(int cls) {
  // orbits of translation by cls on Z/4 / {0,2}
  return cls % 2 == 0 ? 2 : 1;
}

LensLiftCounts lens_lift_counts(const DiskDiagram& d) {
  LensLiftCounts out;
  for (auto& c : trace_disk_components(d)) {
    out.rp3 += rp3_count_for_class(c.cls);
    out.s3 += s3_count_for_class(c.cls);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Standardization

namespace {

struct EndInfo {
  int point_index;   // into boundary_points
  int strand;        // strand index
  bool at_a;         // strand end touching the point
};

// index of the strand end at each boundary point; also verifies radial stubs
std::vector<EndInfo> boundary_ends(const DiskDiagram& d, double max_content) {
  std::vector<EndInfo> out;
  for (size_t pi = 0; pi < d.boundary_points.size(); ++pi) {
    const auto& p = d.boundary_points[pi];
    bool found = false;
    for (size_t si = 0; si < d.strands.size() && !found; ++si) {
      const Strand& s = d.strands[si];
      for (bool at_a : {true, false}) {
        const EndRef& e = at_a ? s.a : s.b;
        if (e.type == EndRef::Type::Boundary && e.id == p.id) {
          out.push_back({static_cast<int>(pi), static_cast<int>(si), at_a});
          found = true;
          break;
        }
      }
    }
    if (!found) throw std::runtime_error("boundary point without strand end");
  }
  (void)max_content;
  return out;
}

}  // namespace

namespace {

// append polar-interpolated points from (r0, a0) to (r1, a1), excluding the
// start point, following the continuous angle difference `da`; segments are
// subdivided so the radial sag of each straight piece stays under `max_sag`
void polar_segment(std::vector<Vec2>& pts, double r0, double a0, double r1,
                   double da, double max_sag) {
  double span = std::abs(da) * kTau;
  int steps = 1;
  if (span > 1e-12) {
    double need = span * std::sqrt(std::max(r0, r1) / (8.0 * max_sag));
    steps = std::max(1, static_cast<int>(std::ceil(need)));
  }
  for (int s = 1; s <= steps; ++s) {
    double t = static_cast<double>(s) / steps;
    pts.push_back(polar(r0 + (r1 - r0) * t, a0 + da * t));
  }
}

}  // namespace

StandardDiskDiagram standardize(const DiskDiagram& d) {
  StandardDiskDiagram out;
  DiskDiagram w = d;
  const double tol = w.tolerance;
  int m = static_cast<int>(w.boundary_points.size());
  if (m == 0) {
    out.diagram = w;
    return out;
  }

  // content ceiling: all vertices and crossings except terminal boundary ones
  double M = 0.0;
  for (auto& c : w.crossings) M = std::max(M, geom::norm(c.pos));
  for (auto& s : w.strands) {
    size_t lo = 0, hi = s.pts.size();
    if (!s.closed()) {
      if (s.a.type == EndRef::Type::Boundary) lo = 1;
      if (s.b.type == EndRef::Type::Boundary) hi = s.pts.size() - 1;
    }
    for (size_t vi = lo; vi < hi; ++vi) M = std::max(M, geom::norm(s.pts[vi]));
  }
  if (M >= 1 - 100 * tol)
    throw std::runtime_error(
        "standardize: no free collar under the boundary circle");
  double R0 = (1 + M) / 2;

  auto ends = boundary_ends(w, M);

  // verify radial terminal stubs and truncate them at R0
  for (auto& ei : ends) {
    Strand& s = w.strands[ei.strand];
    const auto& p = w.boundary_points[ei.point_index];
    Vec2 dir = p.pos();
    Vec2 inner = ei.at_a ? s.pts[1] : s.pts[s.pts.size() - 2];
    double r_in = geom::norm(inner);
    Vec2 expect = {dir.x * r_in, dir.y * r_in};
    if (geom::dist(inner, expect) > 1e-6)
      throw std::runtime_error(
          "standardize: boundary strand end is not radial in the collar");
    Vec2 cut = {dir.x * R0, dir.y * R0};
    if (ei.at_a) s.pts[0] = cut;
    else s.pts[s.pts.size() - 1] = cut;
  }

  // Event levels. Each level either transposes two cyclically adjacent
  // points (one crossing) or slides one point (no crossing).
  struct Level {
    std::vector<double> angles;  // before this level, per point index
    int swap_a = -1, swap_b = -1;
    bool swap_a_over = false;
    double swap_gap = 0;  // ccw distance from a to b
    int mover = -1;
    double delta = 0;  // signed angular motion of the mover
  };
  std::vector<Level> levels;
  auto snapshot = [&]() {
    Level lv;
    lv.angles.resize(m);
    for (int i = 0; i < m; ++i) lv.angles[i] = w.boundary_points[i].angle;
    return lv;
  };

  // Phase 1: bubble sort of the linear order read CCW from angle 0 into
  // (+1..+n, -1..-n).
  auto rank_of_label = [&](int label) {
    return label > 0 ? label - 1 : w.n + (-label) - 1;
  };
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  auto resort = [&]() {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return w.boundary_points[a].angle < w.boundary_points[b].angle;
    });
  };

  int swaps = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    resort();
    for (int i = 0; i + 1 < m; ++i) {
      int a = order[i], b = order[i + 1];
      int ra = rank_of_label(w.boundary_points[a].label);
      int rb = rank_of_label(w.boundary_points[b].label);
      if (ra > rb) {
        Level lv = snapshot();
        lv.swap_a = a;
        lv.swap_b = b;
        double ga = w.boundary_points[b].angle - w.boundary_points[a].angle;
        lv.swap_gap = ga;
        int la = w.boundary_points[a].label, lb = w.boundary_points[b].label;
        if ((la > 0) != (lb > 0)) lv.swap_a_over = la > 0;
        else lv.swap_a_over = std::abs(la) < std::abs(lb);
        levels.push_back(lv);
        std::swap(w.boundary_points[a].angle, w.boundary_points[b].angle);
        out.script.push_back({LensMove::Kind::Swap, la, lb, 0});
        ++swaps;
        std::swap(order[i], order[i + 1]);
        changed = true;
      }
    }
  }
  out.swap_count = swaps;

  // Phase 2: slide points (cyclic order preserved) to the adapted layout:
  // +t at t/(4(n+1)) turns and -t a quarter turn counterclockwise of it.
  std::vector<double> target(m);
  for (int i = 0; i < m; ++i) {
    int lab = w.boundary_points[i].label;
    double plus = std::abs(lab) / (4.0 * (w.n + 1));
    target[i] = lab > 0 ? plus : plus + 0.25;
  }
  const double step_cap = 1.0 / 16.0;
  int guard = 64 * m * m + 4096;
  while (true) {
    bool all_done = true;
    bool moved = false;
    for (int i = 0; i < m; ++i) {
      double cur = w.boundary_points[i].angle;
      double diff = target[i] - cur;
      diff -= std::floor(diff);  // counterclockwise distance in [0, 1)
      if (diff < 1e-13 || diff > 1 - 1e-13) continue;
      all_done = false;
      resort();
      int pos = 0;
      for (int k = 0; k < m; ++k)
        if (order[k] == i) pos = k;
      double lim = 1.0;
      if (m > 1) {
        int nxt = order[(pos + 1) % m];
        double gap = w.boundary_points[nxt].angle - cur;
        if (gap <= 0) gap += 1.0;
        lim = gap - 1e-4;
      }
      double step = std::min({diff, step_cap, std::max(lim, 0.0)});
      if (step <= 1e-13) continue;
      Level lv = snapshot();
      lv.mover = i;
      lv.delta = step;
      levels.push_back(lv);
      double na = cur + step;
      na -= std::floor(na);
      w.boundary_points[i].angle = na;
      moved = true;
    }
    if (all_done) break;
    if (!moved) throw std::runtime_error("standardize: slide scheduling stalled");
    if (--guard < 0) throw std::runtime_error("standardize: too many slide steps");
  }
  for (int i = 0; i < m; ++i) {
    double dd = w.boundary_points[i].angle - target[i];
    dd -= std::round(dd);
    if (std::abs(dd) > 1e-9)
      throw std::runtime_error("standardize: slide did not converge");
    double moved = d.find_point(w.boundary_points[i].id)->angle - target[i];
    moved -= std::round(moved);
    w.boundary_points[i].angle = target[i];
    if (std::abs(moved) > 1e-12)
      out.script.push_back(
          {LensMove::Kind::Slide, w.boundary_points[i].label, 0, target[i]});
  }

  // continuous angle chains across levels (deltas, no wrap normalization)
  int K = static_cast<int>(levels.size());
  std::vector<std::vector<double>> chain(m, std::vector<double>(K + 1));
  for (int i = 0; i < m; ++i) chain[i][0] = levels.empty() ? target[i] : levels[0].angles[i];
  for (int k = 0; k < K; ++k) {
    const Level& lv = levels[k];
    for (int i = 0; i < m; ++i) {
      double delta = 0;
      if (i == lv.swap_a) delta = lv.swap_gap;
      else if (i == lv.swap_b) delta = -lv.swap_gap;
      else if (i == lv.mover) delta = lv.delta;
      chain[i][k + 1] = chain[i][k] + delta;
    }
  }

  double band = (1 - R0) / (K + 1);
  auto ring_r = [&](int k) { return R0 + band * k; };

  // build wires: every strand, with collar extensions on boundary ends
  std::vector<build::Wire> wires;
  std::map<int, int> wire_of_strand;
  for (size_t si = 0; si < w.strands.size(); ++si) {
    build::Wire wire;
    wire.a = w.strands[si].a;
    wire.b = w.strands[si].b;
    wire.pts = w.strands[si].pts;
    wire.tag = static_cast<int>(si);
    wire_of_strand[static_cast<int>(si)] = static_cast<int>(wires.size());
    wires.push_back(wire);
  }
  for (auto& ei : ends) {
    build::Wire& wire = wires[wire_of_strand[ei.strand]];
    std::vector<Vec2> ext;
    int i = ei.point_index;
    int k = 0;
    while (k < K) {
      if (std::abs(chain[i][k + 1] - chain[i][k]) < 1e-15) {
        int k2 = k;
        while (k2 < K && std::abs(chain[i][k2 + 1] - chain[i][k]) < 1e-15) ++k2;
        ext.push_back(polar(ring_r(k2), chain[i][k]));
        k = k2;
      } else {
        polar_segment(ext, ring_r(k), chain[i][k], ring_r(k + 1),
                      chain[i][k + 1] - chain[i][k], band / 8);
        ++k;
      }
    }
    // radial stub to the circle
    ext.push_back(polar(1.0, target[i]));
    if (ei.at_a) {
      std::vector<Vec2> np(ext.rbegin(), ext.rend());
      np.insert(np.end(), wire.pts.begin(), wire.pts.end());
      wire.pts = np;
    } else {
      wire.pts.insert(wire.pts.end(), ext.begin(), ext.end());
    }
  }

  // over rule for the collar crossings: at a swap level the recorded point
  // passes over; branches identified by their angle at the ring below
  auto angdist = [](double a, double b) {
    double dd = a - b;
    dd -= std::round(dd);
    return std::abs(dd);
  };
  auto rule = [&](int wi, double si, int wj, double sj, Vec2 p) -> bool {
    double r = geom::norm(p);
    int k = static_cast<int>((r - R0) / band);
    if (k < 0) k = 0;
    if (k >= K) k = K - 1;
    const Level& lv = levels[k];
    if (lv.swap_a < 0) {
      std::ostringstream os;
      os.precision(12);
      os << "standardize: crossing at a non-swap level: k=" << k << "/" << K
         << " r=" << geom::norm(p) << " R0=" << R0 << " band=" << band
         << " pos=(" << p.x << "," << p.y << ")"
         << " mover=" << lv.mover << " delta=" << lv.delta << "\n";
      os << "angles at this level:";
      for (int i2 = 0; i2 < m; ++i2) os << " [" << i2 << "]=" << chain[i2][k];
      os << "\nmover from " << chain[lv.mover][k] << " to " << chain[lv.mover][k + 1];
      throw std::runtime_error(os.str());
    }
    auto branch_point_lo = [&](int wk, double sk) {
      geom::Polyline pl{wires[wk].pts};
      double off = std::min(0.5 * band / std::max(pl.length(), 1e-12), 0.4);
      Vec2 p1 = pl.at(std::max(0.0, sk - off));
      Vec2 p2 = pl.at(std::min(1.0, sk + off));
      return geom::norm(p1) < geom::norm(p2) ? p1 : p2;
    };
    double ai = angle_turns(branch_point_lo(wi, si));
    double aj = angle_turns(branch_point_lo(wj, sj));
    double wa = chain[lv.swap_a][k];
    bool i_is_a = angdist(ai, wa) <= angdist(aj, wa);
    return i_is_a == lv.swap_a_over;
  };

  int next_id = 0;
  for (auto& c : w.crossings) next_id = std::max(next_id, c.id + 1);
  auto compiled = build::compile_wires(wires, rule, next_id);
  DiskDiagram result;
  result.n = w.n;
  result.tolerance = w.tolerance;
  result.boundary_points = w.boundary_points;
  result.crossings = w.crossings;
  for (auto& c : compiled.crossings) result.crossings.push_back(c);
  result.strands = compiled.strands;
  out.diagram = result;
  return out;
}

// ---------------------------------------------------------------------------
// Mirror

DiskDiagram mirror_invert(const DiskDiagram& d) {
  DiskDiagram r = d;
  auto reflect = [](Vec2 p) { return Vec2{-p.y, -p.x}; };
  for (auto& s : r.strands)
    for (auto& p : s.pts) p = reflect(p);
  for (auto& p : r.boundary_points) {
    Vec2 np = reflect(polar(1.0, p.angle));
    p.angle = angle_turns(np);
  }
  // re-derive crossing slots: reflection reverses the cyclic order
  for (auto& c : r.crossings) {
    Vec2 old_pos = c.pos;
    c.pos = reflect(old_pos);
    // collect the four ends and their new angles
    struct EndAt {
      Strand* s;
      bool at_a;
      double ang;
      int old_slot;
    };
    std::vector<EndAt> ends;
    for (auto& s : r.strands)
      for (bool at_a : {true, false}) {
        EndRef& e = at_a ? s.a : s.b;
        if (e.type == EndRef::Type::Crossing && e.id == c.id) {
          Vec2 adj = at_a ? s.pts[1] : s.pts[s.pts.size() - 2];
          Vec2 dv = adj - c.pos;
          ends.push_back({&s, at_a, std::atan2(dv.y, dv.x), e.slot});
        }
      }
    if (ends.size() != 4) continue;
    std::sort(ends.begin(), ends.end(),
              [](const EndAt& a, const EndAt& b) { return a.ang < b.ang; });
    // new slot of each end = position in sorted order; track where old over
    // pair went
    int old_over_slot = c.over_pair;  // slots old_over_slot, +2 were over
    int new_over_parity = -1;
    for (int k = 0; k < 4; ++k) {
      EndRef& e = ends[k].at_a ? ends[k].s->a : ends[k].s->b;
      if ((ends[k].old_slot & 1) == (old_over_slot & 1)) new_over_parity = k & 1;
      e.slot = k;
    }
    // reflection keeps the over strand over; the crossing INVERSION flips it
    c.over_pair = (new_over_parity ^ 1) & 1;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Component restriction

DiskDiagram restrict_component(const DiskDiagram& d, int component_index) {
  auto comps = trace_disk_components(d);
  if (component_index < 0 || component_index >= static_cast<int>(comps.size()))
    throw std::out_of_range("component index");
  std::set<int> keep(comps[component_index].strand_indices.begin(),
                     comps[component_index].strand_indices.end());

  DiskDiagram r;
  r.tolerance = d.tolerance;
  // classify crossings: 4 kept ends -> keep; 2 -> smooth through; 0 -> drop
  std::map<int, int> kept_ends;
  for (size_t si = 0; si < d.strands.size(); ++si) {
    if (!keep.count(static_cast<int>(si))) continue;
    const Strand& s = d.strands[si];
    for (const EndRef* e : {&s.a, &s.b})
      if (e->type == EndRef::Type::Crossing) kept_ends[e->id]++;
  }
  std::set<int> keep_crossing;
  for (auto& c : d.crossings) {
    int k = kept_ends.count(c.id) ? kept_ends[c.id] : 0;
    if (k == 4) keep_crossing.insert(c.id);
    else if (k != 0 && k != 2)
      throw std::runtime_error("restrict: inconsistent crossing incidence");
  }

  // copy kept strands, merging through smoothed crossings
  std::vector<Strand> work;
  for (size_t si = 0; si < d.strands.size(); ++si)
    if (keep.count(static_cast<int>(si))) work.push_back(d.strands[si]);
  // iteratively merge strand pairs at smoothed crossings
  bool merged = true;
  while (merged) {
    merged = false;
    for (size_t i = 0; i < work.size() && !merged; ++i) {
      for (const EndRef* e : {&work[i].b, &work[i].a}) {
        if (e->type != EndRef::Type::Crossing) continue;
        if (keep_crossing.count(e->id)) continue;
        // find the partner end at slot+2
        int want_slot = (e->slot + 2) % 4;
        for (size_t j = 0; j < work.size() && !merged; ++j) {
          for (const EndRef* f : {&work[j].a, &work[j].b}) {
            if (f->type == EndRef::Type::Crossing && f->id == e->id &&
                f->slot == want_slot) {
              // merge strand i (ending at e) with strand j (starting at f)
              Strand a = work[i], b = work[j];
              if (e == &a.a) {
                std::reverse(a.pts.begin(), a.pts.end());
                std::swap(a.a, a.b);
              }
              if (i == j) {
                // strand closes onto itself through the crossing
                a.a = a.b = EndRef{};
                a.pts.push_back(a.pts.front());
                std::vector<Strand> nw;
                for (size_t q = 0; q < work.size(); ++q)
                  if (q != i) nw.push_back(work[q]);
                nw.push_back(a);
                work = nw;
                merged = true;
                break;
              }
              if (f == &b.b) {
                std::reverse(b.pts.begin(), b.pts.end());
                std::swap(b.a, b.b);
              }
              Strand m;
              m.a = a.a;
              m.b = b.b;
              m.pts = a.pts;
              m.pts.insert(m.pts.end(), b.pts.begin(), b.pts.end());
              std::vector<Strand> nw;
              for (size_t q = 0; q < work.size(); ++q)
                if (q != i && q != j) nw.push_back(work[q]);
              nw.push_back(m);
              work = nw;
              merged = true;
              break;
            }
          }
        }
        if (merged) break;
      }
    }
  }
  r.strands = work;
  for (auto& c : d.crossings)
    if (keep_crossing.count(c.id)) r.crossings.push_back(c);

  // keep only used boundary points; renumber labels
  std::map<int, int> relabel;  // old |label| -> new |label|
  std::vector<const DiskBoundaryPoint*> used;
  for (auto& s : r.strands)
    for (const EndRef* e : {&s.a, &s.b})
      if (e->type == EndRef::Type::Boundary) {
        const DiskBoundaryPoint* p = d.find_point(e->id);
        used.push_back(p);
        relabel.emplace(std::abs(p->label), 0);
      }
  int next = 1;
  for (auto& [old_lab, nw] : relabel) nw = next++;
  for (auto* p : used) {
    DiskBoundaryPoint np = *p;
    np.label = (p->label > 0 ? 1 : -1) * relabel[std::abs(p->label)];
    r.boundary_points.push_back(np);
  }
  r.n = next - 1;
  return r;
}

// ---------------------------------------------------------------------------
// Canonical code (combinatorial)

std::string canonical_disk_code(const DiskDiagram& d) {
  // events along each component traversal + the boundary circular order
  struct Ev {
    char type;  // 'x' crossing, 'b' boundary pair
    int id;     // crossing id or |label|
    char extra; // crossing: o/u + rel slot; boundary: +/-
    int rel;
  };
  // build traversal event lists per direction of each open chain/loop, then
  // canonical-minimize with relabeling
  // Reuse tracing but record events
  struct Dir {
    int strand;
    bool forward;
  };
  std::map<std::pair<int, int>, Dir> from_slot;
  std::map<int, Dir> from_point;
  for (size_t si = 0; si < d.strands.size(); ++si) {
    const Strand& s = d.strands[si];
    if (s.closed()) continue;
    auto reg = [&](const EndRef& e, bool forward) {
      if (e.type == EndRef::Type::Boundary)
        from_point[e.id] = {static_cast<int>(si), forward};
      else
        from_slot[{e.id, e.slot}] = {static_cast<int>(si), forward};
    };
    reg(s.a, true);
    reg(s.b, false);
  }
  auto emit_from = [&](int strand0, bool fwd0, std::map<int, int>& xlabel,
                       std::map<int, int>& xfirst, std::map<int, int>& blabel)
      -> std::string {
    std::ostringstream os;
    Dir cur{strand0, fwd0};
    std::set<std::pair<int, bool>> seen;
    while (!seen.count({cur.strand, cur.forward})) {
      seen.insert({cur.strand, cur.forward});
      const Strand& s = d.strands[cur.strand];
      EndRef e = cur.forward ? s.b : s.a;
      if (e.type == EndRef::Type::None) break;
      if (e.type == EndRef::Type::Crossing) {
        auto [it, fresh] = xlabel.emplace(e.id, static_cast<int>(xlabel.size()));
        os << "x" << it->second
           << (((e.slot & 1) == d.find_crossing(e.id)->over_pair) ? 'o' : 'u');
        if (fresh) {
          xfirst[e.id] = e.slot;
          os << "f";
        } else {
          os << ((e.slot - xfirst[e.id]) & 3);
        }
        os << ";";
        cur = from_slot.at({e.id, (e.slot + 2) % 4});
      } else {
        const DiskBoundaryPoint* p = d.find_point(e.id);
        auto [it, fresh] =
            blabel.emplace(std::abs(p->label), static_cast<int>(blabel.size()));
        os << "b" << it->second << (p->label > 0 ? '+' : '-') << ";";
        cur = from_point.at(d.find_label(-p->label)->id);
      }
    }
    return os.str();
  };

  // choose global minimal over all starting (strand, dir)
  std::string best;
  bool have = false;
  int loops = 0;
  std::vector<std::pair<int, bool>> starts;
  for (size_t si = 0; si < d.strands.size(); ++si) {
    if (d.strands[si].closed()) {
      ++loops;
      continue;
    }
    starts.push_back({static_cast<int>(si), true});
    starts.push_back({static_cast<int>(si), false});
  }
  if (starts.empty()) return "loops=" + std::to_string(loops);
  // component of each start
  auto comps = trace_disk_components(d);
  std::map<int, int> comp_of_strand;
  for (size_t ci = 0; ci < comps.size(); ++ci)
    for (int si : comps[ci].strand_indices) comp_of_strand[si] = static_cast<int>(ci);
  int ncomp = static_cast<int>(comps.size()) - loops;

  for (auto& [s0, f0] : starts) {
    std::map<int, int> xl, xf, bl;
    std::string code = emit_from(s0, f0, xl, xf, bl);
    std::set<int> done{comp_of_strand[s0]};
    while (static_cast<int>(done.size()) < ncomp) {
      std::string bc;
      std::pair<int, bool> bs{-1, false};
      for (auto& st : starts) {
        if (done.count(comp_of_strand[st.first])) continue;
        auto xl2 = xl;
        auto xf2 = xf;
        auto bl2 = bl;
        std::string c = emit_from(st.first, st.second, xl2, xf2, bl2);
        if (bs.first < 0 || c < bc) {
          bc = c;
          bs = st;
        }
      }
      code += "|" + emit_from(bs.first, bs.second, xl, xf, bl);
      done.insert(comp_of_strand[bs.first]);
    }
    // boundary cyclic order with the labels as renumbered in this traversal
    std::vector<std::pair<double, std::string>> bpts;
    for (auto& p : d.boundary_points) {
      int nl = bl.count(std::abs(p.label)) ? bl[std::abs(p.label)] : -1;
      bpts.push_back({p.angle, (p.label > 0 ? "+" : "-") + std::to_string(nl)});
    }
    std::sort(bpts.begin(), bpts.end());
    // minimize over rotation
    std::string bbest;
    for (size_t r = 0; r < bpts.size(); ++r) {
      std::string s;
      for (size_t k = 0; k < bpts.size(); ++k)
        s += bpts[(r + k) % bpts.size()].second + ",";
      if (bbest.empty() || s < bbest) bbest = s;
    }
    code += "|B:" + bbest;
    if (!have || code < best) {
      best = code;
      have = true;
    }
  }
  return best + "|loops=" + std::to_string(loops);
}

}  // namespace quatlink::lens
