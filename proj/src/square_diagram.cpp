#include "quatlink/square_diagram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "quatlink/cube.hpp"

namespace quatlink::sqd {

using geom::Vec2;

ParseError::ParseError(int line_, int col_, const std::string& msg)
    : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                         std::to_string(col_) + ": " + msg),
      line(line_),
      col(col_) {}

const BoundaryPoint* SquareDiagram::find_point(int id) const {
  for (auto& p : boundary_points)
    if (p.id == id) return &p;
  return nullptr;
}

const Crossing* SquareDiagram::find_crossing(int id) const {
  for (auto& c : crossings)
    if (c.id == id) return &c;
  return nullptr;
}

const BoundaryPoint* SquareDiagram::partner(const BoundaryPoint& p) const {
  for (auto& q : boundary_points) {
    if (q.id == p.id) continue;
    if (q.kind != p.kind) continue;
    switch (p.kind) {
      case BPKind::Internal:
        if (q.label == -p.label) return &q;
        break;
      case BPKind::Horizontal:
      case BPKind::Vertical:
        if (q.label == p.label && q.side != p.side) return &q;
        break;
    }
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Tokenizer {
  std::string text;
  size_t pos = 0;
  int line = 1, col = 1;

  explicit Tokenizer(std::string t) : text(std::move(t)) {}

  void skip_ws_inline() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) {
      ++pos;
      ++col;
    }
  }

  bool at_eol() const { return pos >= text.size() || text[pos] == '\n'; }

  void next_line() {
    while (pos < text.size() && text[pos] != '\n') ++pos;
    if (pos < text.size()) ++pos;
    ++line;
    col = 1;
  }

  // Reads the next whitespace-separated token on the current line.
  std::optional<std::string> token() {
    skip_ws_inline();
    if (at_eol()) return std::nullopt;
    size_t start = pos;
    while (pos < text.size() && !isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
      ++col;
    }
    return text.substr(start, pos - start);
  }
};

double parse_double(Tokenizer& tz, const std::string& tok) {
  size_t used = 0;
  double v;
  try {
    v = std::stod(tok, &used);
  } catch (...) {
    throw ParseError(tz.line, tz.col, "expected number, got '" + tok + "'");
  }
  if (used != tok.size())
    throw ParseError(tz.line, tz.col, "trailing junk in number '" + tok + "'");
  return v;
}

int parse_int(Tokenizer& tz, const std::string& tok) {
  size_t used = 0;
  int v;
  try {
    v = std::stoi(tok, &used);
  } catch (...) {
    throw ParseError(tz.line, tz.col, "expected integer, got '" + tok + "'");
  }
  if (used != tok.size())
    throw ParseError(tz.line, tz.col, "trailing junk in integer '" + tok + "'");
  return v;
}

EndRef parse_endref(Tokenizer& tz, const std::string& tok) {
  EndRef r;
  if (tok.size() >= 2 && tok[0] == 'P') {
    r.type = EndRef::Type::Boundary;
    r.id = parse_int(tz, tok.substr(1));
    return r;
  }
  if (tok.size() >= 4 && tok[0] == 'X') {
    auto dotpos = tok.find('.');
    if (dotpos == std::string::npos)
      throw ParseError(tz.line, tz.col, "crossing endpoint needs .slot: " + tok);
    r.type = EndRef::Type::Crossing;
    r.id = parse_int(tz, tok.substr(1, dotpos - 1));
    r.slot = parse_int(tz, tok.substr(dotpos + 1));
    if (r.slot < 0 || r.slot > 3)
      throw ParseError(tz.line, tz.col, "slot out of range in " + tok);
    return r;
  }
  throw ParseError(tz.line, tz.col, "bad endpoint reference '" + tok + "'");
}

}  // namespace

SquareDiagram parse(const std::string& text) {
  Tokenizer tz(text);
  SquareDiagram d;

  auto first = tz.token();
  auto second = tz.token();
  if (!first || !second || *first != "SQD" || *second != "1")
    throw ParseError(1, 1, "expected header 'SQD 1'");
  tz.next_line();

  enum class Section { None, Points, Crossings, Strands };
  Section section = Section::None;
  bool have_counts = false;
  std::set<int> point_ids, crossing_ids;

  while (tz.pos < tz.text.size()) {
    tz.skip_ws_inline();
    if (tz.at_eol()) {
      tz.next_line();
      continue;
    }
    if (tz.text[tz.pos] == '#') {
      tz.next_line();
      continue;
    }
    auto tok = tz.token();
    if (!tok) {
      tz.next_line();
      continue;
    }
    if (*tok == "counts") {
      auto a = tz.token(), b = tz.token(), c = tz.token();
      if (!a || !b || !c) throw ParseError(tz.line, tz.col, "counts needs 3 integers");
      d.n_h = parse_int(tz, *a);
      d.n_v = parse_int(tz, *b);
      d.n_i = parse_int(tz, *c);
      if (d.n_h < 0 || d.n_v < 0 || d.n_i < 0)
        throw ParseError(tz.line, tz.col, "counts must be nonnegative");
      have_counts = true;
    } else if (*tok == "tolerance") {
      auto a = tz.token();
      if (!a) throw ParseError(tz.line, tz.col, "tolerance needs a value");
      d.tolerance = parse_double(tz, *a);
      if (d.tolerance <= 0) throw ParseError(tz.line, tz.col, "tolerance must be positive");
    } else if (*tok == "points") {
      section = Section::Points;
    } else if (*tok == "crossings") {
      section = Section::Crossings;
    } else if (*tok == "strands") {
      section = Section::Strands;
    } else if (*tok == "P") {
      if (section != Section::Points)
        throw ParseError(tz.line, tz.col, "P line outside points section");
      BoundaryPoint p;
      auto idt = tz.token(), kindt = tz.token();
      if (!idt || !kindt) throw ParseError(tz.line, tz.col, "short P line");
      p.id = parse_int(tz, *idt);
      if (!point_ids.insert(p.id).second)
        throw ParseError(tz.line, tz.col, "duplicate point id " + *idt);
      if (*kindt == "H" || *kindt == "V") {
        p.kind = (*kindt == "H") ? BPKind::Horizontal : BPKind::Vertical;
        auto lt = tz.token(), st = tz.token(), ct = tz.token();
        if (!lt || !st || !ct) throw ParseError(tz.line, tz.col, "short edge point line");
        p.label = parse_int(tz, *lt);
        if (*st == "top") p.side = EdgeSide::Top;
        else if (*st == "bottom") p.side = EdgeSide::Bottom;
        else if (*st == "left") p.side = EdgeSide::Left;
        else if (*st == "right") p.side = EdgeSide::Right;
        else throw ParseError(tz.line, tz.col, "bad side '" + *st + "'");
        double coord = parse_double(tz, *ct);
        if (p.kind == BPKind::Horizontal) {
          if (p.side != EdgeSide::Top && p.side != EdgeSide::Bottom)
            throw ParseError(tz.line, tz.col, "horizontal point must be top|bottom");
          p.pos = {coord, p.side == EdgeSide::Top ? 1.0 : 0.0};
        } else {
          if (p.side != EdgeSide::Left && p.side != EdgeSide::Right)
            throw ParseError(tz.line, tz.col, "vertical point must be left|right");
          p.pos = {p.side == EdgeSide::Right ? 1.0 : 0.0, coord};
        }
      } else if (*kindt == "I") {
        p.kind = BPKind::Internal;
        auto lt = tz.token(), xt = tz.token(), yt = tz.token();
        if (!lt || !xt || !yt) throw ParseError(tz.line, tz.col, "short internal point line");
        p.label = parse_int(tz, *lt);
        if (p.label == 0) throw ParseError(tz.line, tz.col, "internal label must be signed nonzero");
        p.side = EdgeSide::NoSide;
        p.pos = {parse_double(tz, *xt), parse_double(tz, *yt)};
      } else {
        throw ParseError(tz.line, tz.col, "bad point kind '" + *kindt + "'");
      }
      d.boundary_points.push_back(p);
    } else if (*tok == "X") {
      if (section != Section::Crossings)
        throw ParseError(tz.line, tz.col, "X line outside crossings section");
      Crossing c;
      auto idt = tz.token(), xt = tz.token(), yt = tz.token(), ot = tz.token();
      if (!idt || !xt || !yt || !ot) throw ParseError(tz.line, tz.col, "short X line");
      c.id = parse_int(tz, *idt);
      if (!crossing_ids.insert(c.id).second)
        throw ParseError(tz.line, tz.col, "duplicate crossing id " + *idt);
      c.pos = {parse_double(tz, *xt), parse_double(tz, *yt)};
      if (*ot == "02") c.over_pair = 0;
      else if (*ot == "13") c.over_pair = 1;
      else throw ParseError(tz.line, tz.col, "over pair must be 02 or 13");
      d.crossings.push_back(c);
    } else if (*tok == "S") {
      if (section != Section::Strands)
        throw ParseError(tz.line, tz.col, "S line outside strands section");
      Strand s;
      auto at = tz.token();
      if (!at) throw ParseError(tz.line, tz.col, "short S line");
      if (*at == "closed") {
        s.a = s.b = EndRef{};
      } else {
        s.a = parse_endref(tz, *at);
        auto bt = tz.token();
        if (!bt) throw ParseError(tz.line, tz.col, "S line needs two endpoints");
        s.b = parse_endref(tz, *bt);
      }
      std::vector<double> nums;
      while (auto t = tz.token()) nums.push_back(parse_double(tz, *t));
      if (nums.size() % 2 != 0)
        throw ParseError(tz.line, tz.col, "odd coordinate count on strand");
      for (size_t q = 0; q + 1 < nums.size(); q += 2)
        s.pts.push_back({nums[q], nums[q + 1]});
      d.strands.push_back(s);
    } else {
      throw ParseError(tz.line, tz.col, "unknown section or directive '" + *tok + "'");
    }
    tz.next_line();
  }

  if (!have_counts) throw ParseError(tz.line, 1, "missing counts line");

  // Dangling references are parse errors per the contract.
  for (auto& s : d.strands) {
    for (const EndRef* e : {&s.a, &s.b}) {
      if (e->type == EndRef::Type::Boundary && !d.find_point(e->id))
        throw ParseError(0, 0, "dangling boundary reference P" + std::to_string(e->id));
      if (e->type == EndRef::Type::Crossing && !d.find_crossing(e->id))
        throw ParseError(0, 0, "dangling crossing reference X" + std::to_string(e->id));
    }
  }
  return d;
}

SquareDiagram parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

namespace {
std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}
}  // namespace

std::string serialize(const SquareDiagram& d) {
  std::ostringstream os;
  os << "SQD 1\n";
  os << "counts " << d.n_h << " " << d.n_v << " " << d.n_i << "\n";
  os << "tolerance " << fmt(d.tolerance) << "\n";
  os << "points\n";
  for (auto& p : d.boundary_points) {
    switch (p.kind) {
      case BPKind::Horizontal:
        os << "P " << p.id << " H " << p.label << " "
           << (p.side == EdgeSide::Top ? "top" : "bottom") << " " << fmt(p.pos.x)
           << "\n";
        break;
      case BPKind::Vertical:
        os << "P " << p.id << " V " << p.label << " "
           << (p.side == EdgeSide::Right ? "right" : "left") << " " << fmt(p.pos.y)
           << "\n";
        break;
      case BPKind::Internal:
        os << "P " << p.id << " I " << (p.label > 0 ? "+" : "") << p.label << " "
           << fmt(p.pos.x) << " " << fmt(p.pos.y) << "\n";
        break;
    }
  }
  os << "crossings\n";
  for (auto& c : d.crossings)
    os << "X " << c.id << " " << fmt(c.pos.x) << " " << fmt(c.pos.y) << " "
       << (c.over_pair == 0 ? "02" : "13") << "\n";
  os << "strands\n";
  for (auto& s : d.strands) {
    os << "S";
    auto emit_ref = [&](const EndRef& e) {
      if (e.type == EndRef::Type::Boundary) os << " P" << e.id;
      else os << " X" << e.id << "." << e.slot;
    };
    if (s.closed()) os << " closed";
    else { emit_ref(s.a); emit_ref(s.b); }
    for (auto& p : s.pts) os << "  " << fmt(p.x) << " " << fmt(p.y);
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Validation

namespace {

bool on_square_boundary(Vec2 p, double eps) {
  return p.x <= eps || p.x >= 1 - eps || p.y <= eps || p.y >= 1 - eps;
}

Vec2 end_position(const SquareDiagram& d, const EndRef& e) {
  if (e.type == EndRef::Type::Boundary) return d.find_point(e.id)->pos;
  return d.find_crossing(e.id)->pos;
}

}  // namespace

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (auto& v : items) {
    os << "condition " << v.condition << ": " << v.message;
    if (v.where) os << " at (" << v.where->x << ", " << v.where->y << ")";
    os << "\n";
  }
  return os.str();
}

ValidationReport validate(const SquareDiagram& d) {
  ValidationReport rep;
  const double eps = d.tolerance;
  auto add = [&](int cond, const std::string& msg, std::optional<Vec2> where = {}) {
    rep.items.push_back({cond, msg, where});
  };

  // Structural: polylines well formed, in the closed square, endpoints match.
  for (size_t si = 0; si < d.strands.size(); ++si) {
    const Strand& s = d.strands[si];
    std::string name = "strand " + std::to_string(si);
    if (s.pts.size() < 2) {
      add(0, name + " has fewer than 2 vertices");
      continue;
    }
    if (s.closed()) {
      if (geom::dist(s.pts.front(), s.pts.back()) > eps)
        add(0, name + " is closed but first != last vertex", s.pts.front());
    } else {
      if (geom::dist(s.pts.front(), end_position(d, s.a)) > 1e-7)
        add(0, name + " first vertex does not match endpoint a", s.pts.front());
      if (geom::dist(s.pts.back(), end_position(d, s.b)) > 1e-7)
        add(0, name + " last vertex does not match endpoint b", s.pts.back());
    }
    for (auto& p : s.pts)
      if (p.x < -eps || p.x > 1 + eps || p.y < -eps || p.y > 1 + eps)
        add(0, name + " leaves the unit square", p);
    // Interior vertices stay off the square boundary; only terminal vertices
    // at edge points may touch it.
    for (size_t vi = 0; vi < s.pts.size(); ++vi) {
      bool terminal = (vi == 0 || vi + 1 == s.pts.size());
      bool terminal_on_edge =
          terminal && !s.closed() &&
          ((vi == 0 && s.a.type == EndRef::Type::Boundary &&
            d.find_point(s.a.id)->kind != BPKind::Internal) ||
           (vi + 1 == s.pts.size() && s.b.type == EndRef::Type::Boundary &&
            d.find_point(s.b.id)->kind != BPKind::Internal));
      if (on_square_boundary(s.pts[vi], eps) && !terminal_on_edge)
        add(0, name + " touches the square boundary at an interior vertex",
            s.pts[vi]);
    }
  }

  // Boundary point sanity + slot occupancy.
  std::map<int, int> point_use;  // point id -> #strand ends
  std::map<std::pair<int, int>, int> slot_use;
  for (auto& s : d.strands) {
    for (const EndRef* e : {&s.a, &s.b}) {
      if (e->type == EndRef::Type::Boundary) point_use[e->id]++;
      if (e->type == EndRef::Type::Crossing) slot_use[{e->id, e->slot}]++;
    }
  }
  for (auto& p : d.boundary_points) {
    int use = point_use.count(p.id) ? point_use[p.id] : 0;
    if (use != 1)
      add(0, "boundary point " + std::to_string(p.id) + " has " +
                 std::to_string(use) + " strand ends (want 1)",
          p.pos);
  }
  for (auto& c : d.crossings) {
    for (int slot = 0; slot < 4; ++slot) {
      auto it = slot_use.find({c.id, slot});
      int use = it == slot_use.end() ? 0 : it->second;
      if (use != 1)
        add(0, "crossing " + std::to_string(c.id) + " slot " +
                   std::to_string(slot) + " has " + std::to_string(use) +
                   " strand ends (want 1)",
            c.pos);
    }
  }

  // Condition 4: boundary points off the corners; and on their edges.
  const Vec2 corners[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (auto& p : d.boundary_points) {
    if (p.kind == BPKind::Internal) continue;
    for (auto& c : corners)
      if (geom::dist(p.pos, c) <= eps)
        add(4, "boundary point " + std::to_string(p.id) + " at a corner", p.pos);
    if (p.pos.x < -eps || p.pos.x > 1 + eps || p.pos.y < -eps || p.pos.y > 1 + eps)
      add(0, "edge point off the square", p.pos);
  }

  // Condition 6: horizontal/vertical label structure.
  {
    std::map<int, std::vector<const BoundaryPoint*>> hpts, vpts;
    for (auto& p : d.boundary_points) {
      if (p.kind == BPKind::Horizontal) hpts[p.label].push_back(&p);
      if (p.kind == BPKind::Vertical) vpts[p.label].push_back(&p);
    }
    for (int t = 1; t <= d.n_h; ++t) {
      auto& v = hpts[t];
      bool ok = v.size() == 2 && ((v[0]->side == EdgeSide::Top && v[1]->side == EdgeSide::Bottom) ||
                                  (v[0]->side == EdgeSide::Bottom && v[1]->side == EdgeSide::Top));
      if (!ok)
        add(6, "horizontal label " + std::to_string(t) +
                   " does not appear exactly once on top and once on bottom");
    }
    for (auto& [lab, v] : hpts)
      if (lab < 1 || lab > d.n_h)
        add(6, "horizontal label " + std::to_string(lab) + " out of range 1..n_h");
    for (int t = 1; t <= d.n_v; ++t) {
      auto& v = vpts[t];
      bool ok = v.size() == 2 && ((v[0]->side == EdgeSide::Left && v[1]->side == EdgeSide::Right) ||
                                  (v[0]->side == EdgeSide::Right && v[1]->side == EdgeSide::Left));
      if (!ok)
        add(6, "vertical label " + std::to_string(t) +
                   " does not appear exactly once on left and once on right");
    }
    for (auto& [lab, v] : vpts)
      if (lab < 1 || lab > d.n_v)
        add(6, "vertical label " + std::to_string(lab) + " out of range 1..n_v");
  }

  // Conditions 7 and 8: internal labels and the quarter-turn pairing.
  {
    std::map<int, const BoundaryPoint*> ipts;
    for (auto& p : d.boundary_points) {
      if (p.kind != BPKind::Internal) continue;
      if (ipts.count(p.label))
        add(7, "internal label " + std::to_string(p.label) + " appears twice", p.pos);
      ipts[p.label] = &p;
      if (on_square_boundary(p.pos, eps))
        add(7, "internal point " + std::to_string(p.id) + " not in the open square",
            p.pos);
    }
    for (int t = 1; t <= d.n_i; ++t) {
      const BoundaryPoint* plus = ipts.count(t) ? ipts[t] : nullptr;
      const BoundaryPoint* minus = ipts.count(-t) ? ipts[-t] : nullptr;
      if (!plus || !minus) {
        add(7, "internal pair +-" + std::to_string(t) + " incomplete");
        continue;
      }
      Vec2 want = geom::rot90_square(plus->pos);
      if (geom::dist(minus->pos, want) > eps)
        add(8, "internal point -" + std::to_string(t) +
                   " is not the quarter-turn image of +" + std::to_string(t),
            minus->pos);
    }
    for (auto& [lab, p] : ipts)
      if (std::abs(lab) < 1 || std::abs(lab) > d.n_i)
        add(7, "internal label " + std::to_string(lab) + " out of range", p->pos);
  }

  // Geometric crossings: every polyline intersection must be a declared
  // crossing; triple points and tangencies are violations.
  struct Hit {
    Vec2 p;
    size_t si, sj;
  };
  std::vector<Hit> hits;
  for (size_t i = 0; i < d.strands.size(); ++i) {
    for (size_t j = i; j < d.strands.size(); ++j) {
      geom::Polyline pi{d.strands[i].pts}, pj{d.strands[j].pts};
      // For self-intersections of closed strands, also skip the wrap pair.
      auto hs = geom::polyline_intersections(pi, pj, 1e-12, i == j);
      for (auto& h : hs) hits.push_back({h.point, i, j});
    }
  }
  // Cluster hits by location.
  const double cluster_tol = 1e-7;
  std::vector<std::vector<size_t>> clusters;
  std::vector<bool> used(hits.size(), false);
  for (size_t i = 0; i < hits.size(); ++i) {
    if (used[i]) continue;
    clusters.push_back({i});
    used[i] = true;
    for (size_t j = i + 1; j < hits.size(); ++j) {
      if (!used[j] && geom::dist(hits[i].p, hits[j].p) < cluster_tol) {
        clusters.back().push_back(j);
        used[j] = true;
      }
    }
  }
  // Strands are split at declared crossings, so any interior intersection is
  // an undeclared crossing.
  for (auto& cl : clusters) {
    Vec2 p = hits[cl[0]].p;
    if (cl.size() > 1) {
      add(2, "multiple intersections coincide (triple point or worse)", p);
      continue;
    }
    add(1, "strand intersection does not match any declared crossing", p);
  }
  for (auto& c : d.crossings)
    if (c.pos.x <= eps || c.pos.x >= 1 - eps || c.pos.y <= eps ||
        c.pos.y >= 1 - eps)
      add(3, "crossing on or outside the square boundary", c.pos);

  // Condition 5 and slot geometry: the four ends approach in CCW slot order,
  // slot 0 with the smallest angle, and opposite slots belong to transversal
  // directions.
  for (auto& c : d.crossings) {
    struct EndDir {
      int slot;
      double angle;
    };
    std::vector<EndDir> dirs;
    for (auto& s : d.strands) {
      for (const EndRef* e : {&s.a, &s.b}) {
        if (e->type == EndRef::Type::Crossing && e->id == c.id) {
          const auto& pts = s.pts;
          Vec2 adj = (e == &s.a) ? (pts.size() > 1 ? pts[1] : pts[0])
                                 : (pts.size() > 1 ? pts[pts.size() - 2] : pts[0]);
          Vec2 dv = adj - c.pos;
          dirs.push_back({e->slot, std::atan2(dv.y, dv.x)});
        }
      }
    }
    if (dirs.size() != 4) continue;  // already reported structurally
    std::sort(dirs.begin(), dirs.end(),
              [](const EndDir& a, const EndDir& b) { return a.angle < b.angle; });
    bool slot_ccw = true;
    for (int k = 0; k < 4; ++k)
      if (dirs[k].slot != k) slot_ccw = false;
    if (!slot_ccw)
      add(5, "crossing " + std::to_string(c.id) +
                 " slots are not in CCW geometric order starting at slot 0",
          c.pos);
  }

  return rep;
}

// ---------------------------------------------------------------------------
// Tracing

namespace {

struct DirectedStrand {
  int strand;
  bool forward;  // a -> b
};

EndRef out_end(const Strand& s, bool forward) { return forward ? s.b : s.a; }

}  // namespace

std::vector<TracedComponent> trace_components(const SquareDiagram& d) {
  // Index strand ends by their endpoint.
  std::map<std::pair<int, int>, DirectedStrand> from_slot;  // (crossing,slot)->outgoing strand dir
  std::map<int, DirectedStrand> from_point;                 // point id -> outgoing strand dir
  for (size_t si = 0; si < d.strands.size(); ++si) {
    const Strand& s = d.strands[si];
    if (s.closed()) continue;
    auto reg = [&](const EndRef& e, bool forward) {
      if (e.type == EndRef::Type::Boundary)
        from_point[e.id] = {static_cast<int>(si), forward};
      else
        from_slot[{e.id, e.slot}] = {static_cast<int>(si), forward};
    };
    reg(s.a, true);   // leaving endpoint a traverses forward
    reg(s.b, false);  // leaving endpoint b traverses backward
  }

  std::vector<TracedComponent> comps;
  std::set<std::pair<int, bool>> visited;  // directed strand visits

  for (size_t start = 0; start < d.strands.size(); ++start) {
    const Strand& s0 = d.strands[start];
    if (s0.closed()) {
      TracedComponent tc;
      tc.strand_indices.push_back(static_cast<int>(start));
      tc.holonomy = q8::QElem::One;
      tc.cls = q8::conj_class(tc.holonomy);
      comps.push_back(std::move(tc));
      continue;
    }
    if (visited.count({static_cast<int>(start), true}) ||
        visited.count({static_cast<int>(start), false}))
      continue;

    TracedComponent tc;
    DirectedStrand cur{static_cast<int>(start), true};
    while (!visited.count({cur.strand, cur.forward})) {
      visited.insert({cur.strand, cur.forward});
      visited.insert({cur.strand, !cur.forward});  // one pass per strand
      tc.strand_indices.push_back(cur.strand);
      const Strand& s = d.strands[cur.strand];
      EndRef e = out_end(s, cur.forward);
      if (e.type == EndRef::Type::Crossing) {
        // Straight through: slot s exits at slot s+2.
        int next_slot = (e.slot + 2) % 4;
        auto it = from_slot.find({e.id, next_slot});
        if (it == from_slot.end())
          throw std::runtime_error("trace: open crossing slot");
        cur = it->second;
      } else {
        const BoundaryPoint* p = d.find_point(e.id);
        const BoundaryPoint* q = d.partner(*p);
        if (!q) throw std::runtime_error("trace: unmatched boundary point");
        q8::QElem letter;
        switch (p->kind) {
          case BPKind::Internal:
            letter = p->label > 0 ? q8::QElem::I : q8::QElem::MinusI;
            break;
          case BPKind::Horizontal:
            letter = p->side == EdgeSide::Top ? q8::QElem::J : q8::QElem::MinusJ;
            break;
          case BPKind::Vertical:
            letter = p->side == EdgeSide::Right ? q8::QElem::K : q8::QElem::MinusK;
            break;
          default:
            throw std::logic_error("bad kind");
        }
        tc.word.push_back(letter);
        auto it = from_point.find(q->id);
        if (it == from_point.end())
          throw std::runtime_error("trace: partner point has no strand");
        cur = it->second;
      }
    }
    tc.holonomy = q8::QElem::One;
    for (auto l : tc.word) tc.holonomy = q8::mul(tc.holonomy, l);
    tc.cls = q8::conj_class(tc.holonomy);
    comps.push_back(std::move(tc));
  }

  // Canonical order: by smallest boundary event key, then smallest crossing id,
  // then smallest strand index.
  auto key = [&](const TracedComponent& tc) {
    int best_bp = 1 << 30, best_x = 1 << 30, best_s = 1 << 30;
    for (int si : tc.strand_indices) {
      best_s = std::min(best_s, si);
      const Strand& s = d.strands[si];
      for (const EndRef* e : {&s.a, &s.b}) {
        if (e->type == EndRef::Type::Boundary) {
          const BoundaryPoint* p = d.find_point(e->id);
          int k = static_cast<int>(p->kind) * 1000 + std::abs(p->label) * 2 +
                  (p->label < 0 ? 1 : 0);
          best_bp = std::min(best_bp, k);
        } else if (e->type == EndRef::Type::Crossing) {
          best_x = std::min(best_x, e->id);
        }
      }
    }
    return std::make_tuple(best_bp, best_x, best_s);
  };
  std::stable_sort(comps.begin(), comps.end(),
                   [&](const TracedComponent& a, const TracedComponent& b) {
                     return key(a) < key(b);
                   });
  return comps;
}

LiftCountTable counts_for_classes(const std::vector<q8::ConjClass>& classes) {
  LiftCountTable t;
  using q8::SubgroupTag;
  for (auto& c : classes) {
    q8::QElem g = c.representative;
    t.xi += q8::lift_component_count(g, q8::subgroup(SubgroupTag::Hi));
    t.xj += q8::lift_component_count(g, q8::subgroup(SubgroupTag::Hj));
    t.xk += q8::lift_component_count(g, q8::subgroup(SubgroupTag::Hk));
    t.rp3 += q8::lift_component_count(g, q8::subgroup(SubgroupTag::Center));
    t.s3 += q8::lift_component_count(g, q8::subgroup(SubgroupTag::Trivial));
  }
  return t;
}

LiftCountTable component_lift_counts(const SquareDiagram& d) {
  std::vector<q8::ConjClass> classes;
  for (auto& tc : trace_components(d)) classes.push_back(tc.cls);
  return counts_for_classes(classes);
}

RelabelResult relabel_axes(const SquareDiagram& d, const q8::OutAutomorphism& perm) {
  RelabelResult r;
  r.perm = perm;
  for (auto& tc : trace_components(d)) {
    r.before.push_back(tc.cls);
    r.after.push_back(perm.apply_class(tc.cls.tag));
  }
  r.counts_after = counts_for_classes(r.after);
  return r;
}

}  // namespace quatlink::sqd
