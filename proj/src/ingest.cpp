#include "quatlink/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "quatlink/wire_compile.hpp"

namespace quatlink::ingest {

using cube::Face;
using cube::Vec3;
using geom::Vec2;
using sqd::EndRef;

namespace {

std::string face_name(Face f) {
  switch (f) {
    case Face::Zp: return "a+";
    case Face::Zn: return "a-";
    case Face::Yp: return "top";
    case Face::Yn: return "bottom";
    case Face::Xp: return "right";
    case Face::Xn: return "left";
  }
  return "?";
}

bool parse_face(const std::string& s, Face& f) {
  if (s == "a+") f = Face::Zp;
  else if (s == "a-") f = Face::Zn;
  else if (s == "top") f = Face::Yp;
  else if (s == "bottom") f = Face::Yn;
  else if (s == "right") f = Face::Xp;
  else if (s == "left") f = Face::Xn;
  else return false;
  return true;
}

}  // namespace

PLLink parse_pll(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  PLLink l;
  bool have_header = false;
  PLComponent* comp = nullptr;
  Leg cur;
  auto fail = [&](const std::string& m) { throw sqd::ParseError(lineno, 1, m); };
  auto flush_leg = [&](bool exiting, Face f = Face::Zp, Vec3 ep = {}) {
    if (!comp) fail("leg outside a component");
    if (cur.pts.empty() && comp->legs.empty() && !exiting)
      fail("empty leg");
    if (exiting) {
      cur.exit = f;
      cur.exit_point = ep;
    }
    comp->legs.push_back(cur);
    cur = Leg{};
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok[0] == '#') continue;
    if (!have_header) {
      std::string ver;
      if (tok != "PLL" || !(ls >> ver) || ver != "1") fail("expected header 'PLL 1'");
      have_header = true;
      continue;
    }
    if (tok == "component") {
      l.components.emplace_back();
      comp = &l.components.back();
      cur = Leg{};
    } else if (tok == "V") {
      Vec3 p;
      if (!(ls >> p.a >> p.b >> p.c)) fail("short V line");
      if (!comp) fail("V outside a component");
      cur.pts.push_back(p);
    } else if (tok == "F") {
      std::string fn;
      Vec3 p;
      if (!(ls >> fn >> p.a >> p.b >> p.c)) fail("short F line");
      Face f;
      if (!parse_face(fn, f)) fail("bad face name " + fn);
      flush_leg(true, f, p);
    } else if (tok == "end") {
      if (!comp) fail("end outside a component");
      if (!cur.pts.empty() || comp->legs.empty()) flush_leg(false);
      comp = nullptr;
    } else if (tok == "tolerance") {
      if (!(ls >> l.tolerance) || l.tolerance <= 0) fail("bad tolerance");
    } else {
      fail("unknown directive '" + tok + "'");
    }
  }
  if (!have_header) throw sqd::ParseError(1, 1, "expected header 'PLL 1'");
  if (comp) throw sqd::ParseError(lineno, 1, "component without end");
  return l;
}

PLLink parse_pll_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_pll(ss.str());
}

std::string serialize(const PLLink& l) {
  std::ostringstream os;
  os.precision(17);
  os << "PLL 1\n";
  os << "tolerance " << l.tolerance << "\n";
  for (auto& comp : l.components) {
    os << "component\n";
    for (auto& leg : comp.legs) {
      for (auto& p : leg.pts) os << "V " << p.a << " " << p.b << " " << p.c << "\n";
      if (leg.exit)
        os << "F " << face_name(*leg.exit) << " " << leg.exit_point.a << " "
           << leg.exit_point.b << " " << leg.exit_point.c << "\n";
    }
    os << "end\n";
  }
  return os.str();
}

sqd::ValidationReport validate_pll(const PLLink& l) {
  sqd::ValidationReport rep;
  auto add = [&](const std::string& m) { rep.items.push_back({0, m, {}}); };
  const double eps = l.tolerance;
  for (size_t ci = 0; ci < l.components.size(); ++ci) {
    auto& comp = l.components[ci];
    if (comp.legs.empty()) {
      add("component " + std::to_string(ci) + " has no legs");
      continue;
    }
    bool any_exit = false;
    for (auto& leg : comp.legs)
      if (leg.exit) any_exit = true;
    if (any_exit) {
      for (auto& leg : comp.legs)
        if (!leg.exit) add("component " + std::to_string(ci) +
                           " mixes exiting and closed legs");
    } else if (comp.legs.size() != 1) {
      add("closed component must have a single leg");
    }
    for (auto& leg : comp.legs) {
      for (auto& p : leg.pts)
        if (p.a <= eps || p.a >= 1 - eps || p.b <= eps || p.b >= 1 - eps ||
            p.c <= eps || p.c >= 1 - eps)
          add("interior vertex not in the open cube");
      if (leg.exit) {
        try {
          Face f = cube::face_of(leg.exit_point, 1e-9);
          if (f != *leg.exit) add("exit point is on the wrong face");
        } catch (const std::exception&) {
          add("exit point is not on a cube face");
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Geometry helpers: the closed polyline in the cube (with virtual re-entry
// points) per component, for a given axis relabeling.

namespace {

// coordinate relabelings: the cube's gluing tables are invariant under this
// cyclic axis permutation, and under the orientation-compatible flip used
// for the negative projection direction
Vec3 relabel(Vec3 p, Axis axis, bool positive) {
  Vec3 q = p;
  int cyc = static_cast<int>(axis);
  for (int k = 0; k < cyc; ++k) q = Vec3{q.c, q.a, q.b};  // (a,b,c)<-(c,a,b)
  if (!positive) q = Vec3{1 - q.a, q.c, q.b};
  return q;
}

Face relabel_face(Face f, Axis axis, bool positive) {
  // apply the same coordinate maps to face normals
  auto axis_dir = [](Face f) {
    switch (f) {
      case Face::Zp: return std::make_pair(0, +1);
      case Face::Zn: return std::make_pair(0, -1);
      case Face::Xp: return std::make_pair(1, +1);
      case Face::Xn: return std::make_pair(1, -1);
      case Face::Yp: return std::make_pair(2, +1);
      case Face::Yn: return std::make_pair(2, -1);
    }
    return std::make_pair(0, 0);
  };
  auto mk = [](int ax, int sgn) {
    if (ax == 0) return sgn > 0 ? Face::Zp : Face::Zn;
    if (ax == 1) return sgn > 0 ? Face::Xp : Face::Xn;
    return sgn > 0 ? Face::Yp : Face::Yn;
  };
  auto [ax, sgn] = axis_dir(f);
  int cyc = static_cast<int>(axis);
  for (int k = 0; k < cyc; ++k) ax = (ax + 1) % 3;  // c->a, a->b, b->c
  if (!positive) {
    if (ax == 0) sgn = -sgn;
    else ax = ax == 1 ? 2 : 1;
  }
  return mk(ax, sgn);
}

struct FlatLeg {
  std::vector<Vec3> pts;  // full 3D polyline including boundary endpoints
  // endpoint descriptors
  std::optional<Face> start_face, end_face;  // faces of the terminal points
  int component = -1;
  int leg_index = -1;
};

// assemble per-component legs in the relabeled frame, with explicit entry
// points prepended
std::vector<FlatLeg> flatten(const PLLink& l, Axis axis, bool positive) {
  std::vector<FlatLeg> out;
  for (size_t ci = 0; ci < l.components.size(); ++ci) {
    auto& comp = l.components[ci];
    if (comp.closed_in_cube()) {
      FlatLeg fl;
      fl.component = static_cast<int>(ci);
      fl.leg_index = 0;
      for (auto& p : comp.legs[0].pts) fl.pts.push_back(relabel(p, axis, positive));
      if (!fl.pts.empty() &&
          (std::abs(fl.pts.front().a - fl.pts.back().a) > 1e-12 ||
           std::abs(fl.pts.front().b - fl.pts.back().b) > 1e-12 ||
           std::abs(fl.pts.front().c - fl.pts.back().c) > 1e-12))
        fl.pts.push_back(fl.pts.front());
      out.push_back(fl);
      continue;
    }
    int n = static_cast<int>(comp.legs.size());
    for (int li = 0; li < n; ++li) {
      const Leg& prev = comp.legs[(li + n - 1) % n];
      const Leg& leg = comp.legs[li];
      FlatLeg fl;
      fl.component = static_cast<int>(ci);
      fl.leg_index = li;
      // entry point from the previous leg's exit
      Vec3 entry = cube::glue(*prev.exit, prev.exit_point);
      fl.pts.push_back(relabel(entry, axis, positive));
      fl.start_face = relabel_face(cube::opposite(*prev.exit), axis, positive);
      for (auto& p : leg.pts) fl.pts.push_back(relabel(p, axis, positive));
      fl.pts.push_back(relabel(leg.exit_point, axis, positive));
      fl.end_face = relabel_face(*leg.exit, axis, positive);
      out.push_back(fl);
    }
  }
  return out;
}

Vec2 proj(const Vec3& p) { return {p.b, p.c}; }

double depth_at(const FlatLeg& leg, double param) {
  // param is arclength along the projected polyline
  std::vector<Vec2> flat;
  for (auto& p : leg.pts) flat.push_back(proj(p));
  geom::Polyline pl{flat};
  double want = param * pl.length();
  double acc = 0;
  for (size_t i = 1; i < flat.size(); ++i) {
    double seg = geom::dist(flat[i - 1], flat[i]);
    if (acc + seg >= want || i + 1 == flat.size()) {
      double u = seg > 0 ? (want - acc) / seg : 0;
      return leg.pts[i - 1].a + (leg.pts[i].a - leg.pts[i - 1].a) * u;
    }
    acc += seg;
  }
  return leg.pts.back().a;
}

}  // namespace

std::string GenPosReport::to_string() const {
  std::ostringstream os;
  for (auto& i : issues)
    os << i.message << " near (" << i.where.a << ", " << i.where.b << ", "
       << i.where.c << ")\n";
  return os.str();
}

GenPosReport check_general_position(const PLLink& l, Axis axis, bool positive) {
  GenPosReport rep;
  auto legs = flatten(l, axis, positive);
  const double eps = 1e-6;

  // near-vertical segments
  for (auto& leg : legs) {
    for (size_t i = 1; i < leg.pts.size(); ++i) {
      Vec3 a = leg.pts[i - 1], b = leg.pts[i];
      double d3 = std::sqrt((a.a - b.a) * (a.a - b.a) + (a.b - b.b) * (a.b - b.b) +
                            (a.c - b.c) * (a.c - b.c));
      double d2 = geom::dist(proj(a), proj(b));
      if (d3 > eps && d2 < eps * 10)
        rep.issues.push_back({"segment nearly parallel to the projection axis", a});
    }
  }

  // pairwise intersections of projections; tangency and triple detection
  struct Hit {
    Vec2 p;
    double da;  // depth difference
  };
  std::vector<Hit> hits;
  for (size_t i = 0; i < legs.size(); ++i) {
    std::vector<Vec2> fi;
    for (auto& p : legs[i].pts) fi.push_back(proj(p));
    for (size_t j = i; j < legs.size(); ++j) {
      std::vector<Vec2> fj;
      for (auto& p : legs[j].pts) fj.push_back(proj(p));
      auto hs = geom::polyline_intersections(geom::Polyline{fi}, geom::Polyline{fj},
                                             1e-12, i == j);
      for (auto& h : hs) {
        double da = depth_at(legs[i], h.s) - depth_at(legs[j], h.t);
        hits.push_back({h.point, da});
        if (std::abs(da) < eps)
          rep.issues.push_back(
              {"depth tie at a crossing", {0.5, h.point.x, h.point.y}});
      }
    }
  }
  for (size_t a = 0; a < hits.size(); ++a)
    for (size_t b = a + 1; b < hits.size(); ++b)
      if (geom::dist(hits[a].p, hits[b].p) < 1e-5)
        rep.issues.push_back({"coincident crossings (triple point)",
                              {0.5, hits[a].p.x, hits[a].p.y}});

  // vertices projecting onto other strands
  for (size_t i = 0; i < legs.size(); ++i) {
    for (size_t vi = 1; vi + 1 < legs[i].pts.size(); ++vi) {
      Vec2 v = proj(legs[i].pts[vi]);
      for (size_t j = 0; j < legs.size(); ++j) {
        if (i == j) continue;
        for (size_t k = 1; k < legs[j].pts.size(); ++k) {
          double dd = geom::point_segment_dist(v, proj(legs[j].pts[k - 1]),
                                               proj(legs[j].pts[k]));
          if (dd < eps)
            rep.issues.push_back({"vertex projects onto another strand",
                                  legs[i].pts[vi]});
        }
      }
    }
  }

  // boundary points near corners
  for (auto& leg : legs) {
    for (auto [face, pt] :
         {std::make_pair(leg.start_face, leg.pts.empty() ? Vec3{} : leg.pts.front()),
          std::make_pair(leg.end_face, leg.pts.empty() ? Vec3{} : leg.pts.back())}) {
      if (!face) continue;
      if (*face == Face::Yp || *face == Face::Yn || *face == Face::Xp ||
          *face == Face::Xn) {
        Vec2 q = proj(pt);
        for (Vec2 corner : {Vec2{0, 0}, Vec2{1, 0}, Vec2{1, 1}, Vec2{0, 1}})
          if (geom::dist(q, corner) < 10 * eps)
            rep.issues.push_back({"boundary point near a square corner", pt});
      }
    }
  }

  return rep;
}

PLLink perturb(const PLLink& l, uint64_t seed, double delta, int retry_cap) {
  // minimum clearance between non-adjacent 3D segments (coarse, vertex-based)
  double clearance = 1.0;
  {
    std::vector<Vec3> verts;
    for (auto& c : l.components)
      for (auto& leg : c.legs)
        for (auto& p : leg.pts) verts.push_back(p);
    for (size_t i = 0; i < verts.size(); ++i)
      for (size_t j = i + 1; j < verts.size(); ++j) {
        double d = std::sqrt(
            (verts[i].a - verts[j].a) * (verts[i].a - verts[j].a) +
            (verts[i].b - verts[j].b) * (verts[i].b - verts[j].b) +
            (verts[i].c - verts[j].c) * (verts[i].c - verts[j].c));
        if (d > 1e-12) clearance = std::min(clearance, d);
      }
  }
  if (delta > clearance / 2)
    throw std::invalid_argument("perturb: delta exceeds half the minimum clearance");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int attempt = 0; attempt < retry_cap; ++attempt) {
    PLLink trial = l;
    if (attempt > 0) {
      for (auto& comp : trial.components)
        for (auto& leg : comp.legs) {
          for (auto& p : leg.pts) {
            p.a = std::clamp(p.a + delta * U(rng), 1e-3, 1 - 1e-3);
            p.b = std::clamp(p.b + delta * U(rng), 1e-3, 1 - 1e-3);
            p.c = std::clamp(p.c + delta * U(rng), 1e-3, 1 - 1e-3);
          }
          if (leg.exit) {
            // jitter within the face
            Vec3& e = leg.exit_point;
            Vec3 j{delta * U(rng), delta * U(rng), delta * U(rng)};
            switch (*leg.exit) {
              case Face::Zp:
              case Face::Zn:
                e.b = std::clamp(e.b + j.b, 1e-3, 1 - 1e-3);
                e.c = std::clamp(e.c + j.c, 1e-3, 1 - 1e-3);
                break;
              case Face::Yp:
              case Face::Yn:
                e.a = std::clamp(e.a + j.a, 1e-3, 1 - 1e-3);
                e.b = std::clamp(e.b + j.b, 1e-3, 1 - 1e-3);
                break;
              case Face::Xp:
              case Face::Xn:
                e.a = std::clamp(e.a + j.a, 1e-3, 1 - 1e-3);
                e.c = std::clamp(e.c + j.c, 1e-3, 1 - 1e-3);
                break;
            }
          }
        }
    }
    bool ok = true;
    for (Axis ax : {Axis::I, Axis::J, Axis::K})
      if (!check_general_position(trial, ax).ok()) ok = false;
    if (ok) return trial;
  }
  throw std::runtime_error("perturb: retry cap exceeded");
}

sqd::SquareDiagram project(const PLLink& l, Axis axis, bool positive) {
  auto gen = check_general_position(l, axis, positive);
  if (!gen.ok())
    throw std::runtime_error("project: input not in general position:\n" +
                             gen.to_string());
  auto legs = flatten(l, axis, positive);

  sqd::SquareDiagram d;
  d.tolerance = 1e-9;

  // boundary points from the transitions, pairing exit and entry points
  // transition key: (component, leg index) identifies the exit after that leg
  struct BP {
    int id;
    sqd::BPKind kind;
    int label;
    sqd::EdgeSide side;
    Vec2 pos;
  };
  int next_id = 1;
  std::map<std::pair<int, int>, std::pair<int, int>> trans_points;
  // (component, leg) -> (exit point id, entry point id of the NEXT leg)

  auto side_of = [](Face f) {
    switch (f) {
      case Face::Yp: return sqd::EdgeSide::Top;
      case Face::Yn: return sqd::EdgeSide::Bottom;
      case Face::Xp: return sqd::EdgeSide::Right;
      case Face::Xn: return sqd::EdgeSide::Left;
      default: return sqd::EdgeSide::NoSide;
    }
  };

  for (auto& leg : legs) {
    if (!leg.end_face) continue;
    Face f = *leg.end_face;
    Vec3 exit3 = leg.pts.back();
    // entry of the next leg = glue(f, exit3) in the relabeled frame
    Vec3 entry3 = cube::glue(f, exit3);
    sqd::BoundaryPoint pe, pn;
    pe.id = next_id++;
    pn.id = next_id++;
    pe.pos = proj(exit3);
    pn.pos = proj(entry3);
    if (f == Face::Zp || f == Face::Zn) {
      pe.kind = pn.kind = sqd::BPKind::Internal;
      int t = ++d.n_i;
      pe.label = f == Face::Zp ? +t : -t;
      pn.label = -pe.label;
    } else if (f == Face::Yp || f == Face::Yn) {
      pe.kind = pn.kind = sqd::BPKind::Horizontal;
      int t = ++d.n_h;
      pe.label = pn.label = t;
      pe.side = side_of(f);
      pn.side = side_of(cube::opposite(f));
    } else {
      pe.kind = pn.kind = sqd::BPKind::Vertical;
      int t = ++d.n_v;
      pe.label = pn.label = t;
      pe.side = side_of(f);
      pn.side = side_of(cube::opposite(f));
    }
    d.boundary_points.push_back(pe);
    d.boundary_points.push_back(pn);
    trans_points[{leg.component, leg.leg_index}] = {pe.id, pn.id};
  }

  // wires: projected legs with boundary endpoint refs
  std::vector<build::Wire> wires;
  std::vector<int> wire_leg;
  for (size_t li = 0; li < legs.size(); ++li) {
    auto& leg = legs[li];
    build::Wire w;
    for (auto& p : leg.pts) w.pts.push_back(proj(p));
    if (leg.end_face) {
      int ncomp_legs = 0;
      for (auto& lg : legs)
        if (lg.component == leg.component) ++ncomp_legs;
      // end -> this leg's transition exit point
      w.b = EndRef{EndRef::Type::Boundary,
                   trans_points[{leg.component, leg.leg_index}].first, -1};
      // start -> previous leg's transition entry point
      int prev = (leg.leg_index + ncomp_legs - 1) % ncomp_legs;
      w.a = EndRef{EndRef::Type::Boundary,
                   trans_points[{leg.component, prev}].second, -1};
    }
    wires.push_back(w);
    wire_leg.push_back(static_cast<int>(li));
  }

  auto rule = [&](int wi, double si, int wj, double sj, Vec2 p) -> bool {
    (void)p;
    double da = depth_at(legs[wire_leg[wi]], si);
    double db = depth_at(legs[wire_leg[wj]], sj);
    return da > db;  // nearer the viewer (a = +inf) passes over
  };
  auto compiled = build::compile_wires(wires, rule, 0);
  d.strands = compiled.strands;
  d.crossings = compiled.crossings;
  return d;
}

}  // namespace quatlink::ingest
