#include "quatlink/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "quatlink/q8.hpp"
#include "quatlink/wire_compile.hpp"

namespace quatlink::lift {

using geom::Vec2;
using lens::DiskBoundaryPoint;
using lens::DiskDiagram;
using sqd::BoundaryPoint;
using sqd::BPKind;
using sqd::Crossing;
using sqd::EdgeSide;
using sqd::EndRef;
using sqd::SquareDiagram;
using sqd::Strand;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;
// layout: central square of half-side kH, buffer to the fin inner circle
constexpr double kH = 0.30;     // central square half-side
constexpr double kR2 = 0.50;    // buffer outer = fin inner
constexpr double kRApex = 0.93; // fin outer (apex)
constexpr double kSweep = 0.46; // braid arcs sweep at this radius band
constexpr double kTeleBand0 = 0.56;

Vec2 polar(double r, double turns) {
  return {r * std::cos(kTau * turns), r * std::sin(kTau * turns)};
}

double angle_turns(Vec2 p) {
  double a = std::atan2(p.y, p.x) / kTau;
  if (a < 0) a += 1.0;
  return a;
}

// --- triangles of the square -------------------------------------------------

enum class Tri : int { S = 0, E = 1, N = 2, W = 3 };  // by rot90 order S->E->N->W

Tri triangle_of(Vec2 p) {
  double x = p.x - 0.5, y = p.y - 0.5;
  if (y <= -std::abs(x)) return Tri::S;
  if (x >= std::abs(y)) return Tri::E;
  if (y >= std::abs(x)) return Tri::N;
  return Tri::W;
}

// sector hosting each triangle's prism copy
// T_S -> N, T_E -> W, T_N -> S, T_W -> E
enum class Sector : int { N = 0, W = 1, S = 2, E = 3 };
Sector sector_of(Tri t) {
  switch (t) {
    case Tri::S: return Sector::N;
    case Tri::E: return Sector::W;
    case Tri::N: return Sector::S;
    case Tri::W: return Sector::E;
  }
  throw std::logic_error("tri");
}

// ccw-end angle of each sector, in turns; sector spans [ccw_end - 1/4, ccw_end]
double sector_ccw_end(Sector s) {
  switch (s) {
    case Sector::N: return 135.0 / 360.0;
    case Sector::W: return 225.0 / 360.0;
    case Sector::S: return 315.0 / 360.0;
    case Sector::E: return 45.0 / 360.0;
  }
  throw std::logic_error("sector");
}

// rotation taking triangle t to T_S (about the square center)
Vec2 to_ts_frame(Tri t, Vec2 p) {
  // rot90_ccw about center: (x,y) -> (1-y, x); apply enough times
  int times = 0;
  switch (t) {
    case Tri::S: times = 0; break;
    case Tri::E: times = 3; break;  // rot90_cw == rot90_ccw^3
    case Tri::N: times = 2; break;
    case Tri::W: times = 1; break;
  }
  Vec2 q = p;
  for (int k = 0; k < times; ++k) q = geom::rot90_square(q);
  return q;
}

// chart on T_S: u along the base (0,0)->(1,0), v toward the apex (1/2,1/2)
void ts_chart(Vec2 p, double& u, double& v) {
  v = 2.0 * p.y;
  u = v < 1.0 - 1e-12 ? (p.x - 0.5 * v) / (1.0 - v) : 0.5;
}

// fin placement: triangle point -> annular sector point
Vec2 fin_map(Tri t, Vec2 p) {
  Vec2 q = to_ts_frame(t, p);
  double u, v;
  ts_chart(q, u, v);
  Sector s = sector_of(t);
  double theta = sector_ccw_end(s) - 0.25 * u;
  double r = kR2 + v * (kRApex - kR2);
  return polar(r, theta);
}


// central placement: affine copy of the square about the origin
Vec2 central_map(Vec2 p) {
  return {2 * kH * (p.x - 0.5), 2 * kH * (p.y - 0.5)};
}

// subdivide a polyline so no segment is longer than `step`
std::vector<Vec2> subdivide(const std::vector<Vec2>& pts, double step) {
  std::vector<Vec2> out;
  if (pts.empty()) return out;
  out.push_back(pts[0]);
  for (size_t i = 1; i < pts.size(); ++i) {
    Vec2 a = pts[i - 1], b = pts[i];
    double len = geom::dist(a, b);
    int k = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int s = 1; s <= k; ++s)
      out.push_back(a + (b - a) * (static_cast<double>(s) / k));
  }
  return out;
}

// map a polyline through `f`, subdividing adaptively so image segments stay
// short (the placement charts distort heavily near the square center)
template <typename F>
std::vector<Vec2> map_adaptive(const std::vector<Vec2>& pts, F f,
                               double image_step = 0.01) {
  std::vector<Vec2> out;
  if (pts.empty()) return out;
  out.push_back(f(pts[0]));
  for (size_t i = 1; i < pts.size(); ++i) {
    // recursive bisection, iteratively with an explicit stack
    std::vector<std::pair<Vec2, Vec2>> stack{{pts[i - 1], pts[i]}};
    std::vector<Vec2> seg;
    while (!stack.empty()) {
      auto [a, b] = stack.back();
      stack.pop_back();
      Vec2 fa = f(a), fb = f(b);
      if (geom::dist(fa, fb) <= image_step || geom::dist(a, b) < 1e-7) {
        seg.push_back(fb);
      } else {
        Vec2 mid = (a + b) * 0.5;
        stack.push_back({mid, b});
        stack.push_back({a, mid});
      }
    }
    for (auto& p : seg) out.push_back(p);
  }
  return out;
}

void append_polar_lerp(std::vector<Vec2>& pts, double r0, double a0, double r1,
                       double a1_continuous) {
  double da = a1_continuous - a0;
  int steps = std::max(1, static_cast<int>(std::ceil(std::abs(da) * 128)));
  for (int s = 1; s <= steps; ++s) {
    double t = static_cast<double>(s) / steps;
    pts.push_back(polar(r0 + (r1 - r0) * t, a0 + da * t));
  }
}

// half-diagonal cuts
enum class Cut : int { ML = 0, AL = 1, MH = 2, AH = 3 };
// ML: b=c<=1/2 (between S and W), AL: b+c=1,b>=1/2 (S|E),
// MH: b=c>=1/2 (N|E), AH: b+c=1,b<=1/2 (N|W)

// the two triangles adjacent to a cut, and the sign of the clip end as seen
// from each triangle's fin: u=1 side edge carries +, u=0 side carries -
struct CutInfo {
  Tri plus_side;   // clip end in this triangle's fin is labeled +
  Tri minus_side;
};
CutInfo cut_info(Cut c) {
  switch (c) {
    case Cut::ML: return {Tri::W, Tri::S};  // ML in fin(T_W)=E is +, in fin(T_S)=N is -
    case Cut::AL: return {Tri::S, Tri::E};  // AL in fin(T_S)=N is +, in fin(T_E)=W is -
    case Cut::MH: return {Tri::E, Tri::N};  // MH in fin(T_E)=W is +, in fin(T_N)=S is -
    case Cut::AH: return {Tri::N, Tri::W};  // AH in fin(T_N)=S is +, in fin(T_W)=E is -
  }
  throw std::logic_error("cut");
}

Cut classify_cut(Vec2 p, double tol) {
  double x = p.x - 0.5, y = p.y - 0.5;
  if (std::abs(x - y) < tol) return x <= 0 ? Cut::ML : Cut::MH;
  if (std::abs(x + y) < tol) return x >= 0 ? Cut::AL : Cut::AH;
  throw std::runtime_error("point is not on a diagonal");
}

}  // namespace

// ---------------------------------------------------------------------------
// Preconditions

sqd::ValidationReport check_lift_preconditions(const sqd::SquareDiagram& d) {
  sqd::ValidationReport rep = sqd::validate(d);
  const double margin = 1e-6;
  auto add = [&](const std::string& msg, Vec2 where) {
    rep.items.push_back({0, msg + " (isotope the diagram off the diagonals "
                                  "and center before lifting)",
                         where});
  };
  auto near_diag = [&](Vec2 p) {
    double x = p.x - 0.5, y = p.y - 0.5;
    return std::abs(x - y) < margin || std::abs(x + y) < margin;
  };
  auto near_center = [&](Vec2 p) {
    return geom::dist(p, {0.5, 0.5}) < 10 * margin;
  };
  for (auto& c : d.crossings) {
    if (near_diag(c.pos)) add("crossing on a diagonal", c.pos);
    if (near_center(c.pos)) add("crossing at the center", c.pos);
  }
  for (auto& p : d.boundary_points) {
    if (p.kind == BPKind::Internal && near_diag(p.pos))
      add("internal point on a diagonal", p.pos);
    if (p.kind == BPKind::Internal && near_center(p.pos))
      add("internal point at the center", p.pos);
  }
  for (auto& s : d.strands) {
    for (auto& v : s.pts) {
      if (near_diag(v)) add("strand vertex on a diagonal", v);
      if (near_center(v)) add("strand passes near the center", v);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// lift_to_disk

namespace {

// an end of a mapped strand piece
struct PieceEnd {
  enum class Kind { CrossSlot, Wall, Dot, CutPt } kind = Kind::CrossSlot;
  // CrossSlot: copy crossing id + slot
  int crossing = -1, slot = -1;
  // Wall: which copy ('c' central, or fin Tri) and the base label + edge
  EdgeSide edge = EdgeSide::NoSide;
  int label = 0;  // Wall: positive base label; Dot: signed base label
  // CutPt: cut id and sign
  int cut_index = -1;  // index into the cut-point registry
  bool cut_plus = false;
};

struct Piece {
  std::vector<Vec2> pts;  // mapped coordinates
  PieceEnd a, b;
  bool closed = false;
  bool central = false;
  Tri tri = Tri::S;  // for fin pieces
};

struct Annot {
  enum class Kind { Content, Braid, Teleport, PushTail } kind = Kind::Content;
  double braid_depth = 0;
  int tele_rank = 0;
  double tele_seam = 0;   // seam angle in turns
  double tele_src_ccw = 0;  // exit side is CW of the seam
  int push_sign = 0;
  double from = 0, to = 0;  // arclength range, filled later
};

struct WireBuild {
  std::vector<Vec2> pts;
  EndRef a, b;
  std::vector<std::pair<double, Annot>> marks;  // (length-so-far at segment start)
  double len_acc = 0;

  void append(const std::vector<Vec2>& seg, const Annot& an) {
    Annot a2 = an;
    a2.from = len_acc;
    size_t start = pts.empty() ? 0 : 1;
    for (size_t i = 0; i < seg.size(); ++i) {
      if (i == 0 && !pts.empty()) {
        // continuity: seg[0] should equal current tail
        if (geom::dist(pts.back(), seg[0]) > 1e-9)
          throw std::runtime_error("wire continuity break");
        continue;
      }
      (void)start;
      if (!pts.empty()) len_acc += geom::dist(pts.back(), seg[i]);
      pts.push_back(seg[i]);
    }
    a2.to = len_acc;
    marks.push_back({a2.from, a2});
  }
};

}  // namespace

lens::DiskDiagram lift_to_disk(const sqd::SquareDiagram& d) {
  auto pre = check_lift_preconditions(d);
  if (!pre.ok())
    throw std::runtime_error("lift_to_disk preconditions failed:\n" +
                             pre.to_string());
  const double tol = 1e-9;

  // ---- cut the base strands along the diagonals and build mapped pieces
  struct CutPoint {
    Vec2 base_pos;  // on the diagonal
    Cut cut;
    int rank = 0;  // along the cut by distance from center
  };
  std::vector<CutPoint> cut_registry;

  std::vector<Piece> pieces;

  // crossing id maps: central copy keeps base ids + 0, fins offset by region
  auto copy_crossing_id = [&](bool central, Tri t, int base_id) {
    int region = central ? 0 : 1 + static_cast<int>(t);
    return region * 1000 + base_id;
  };

  // helper: make the PieceEnd for a base strand EndRef in a given copy
  auto mk_end = [&](const EndRef& e, bool central, Tri t) -> PieceEnd {
    PieceEnd pe;
    if (e.type == EndRef::Type::Crossing) {
      pe.kind = PieceEnd::Kind::CrossSlot;
      pe.crossing = copy_crossing_id(central, t, e.id);
      pe.slot = e.slot;
      return pe;
    }
    const BoundaryPoint* bp = d.find_point(e.id);
    if (bp->kind == BPKind::Internal) {
      pe.kind = PieceEnd::Kind::Dot;
      pe.label = bp->label;
    } else {
      pe.kind = PieceEnd::Kind::Wall;
      pe.label = bp->label;
      pe.edge = bp->side;
    }
    return pe;
  };

  // central copy: every strand, mapped whole
  for (auto& s : d.strands) {
    Piece p;
    p.central = true;
    p.closed = s.closed();
    p.pts = map_adaptive(s.pts, central_map);
    if (!s.closed()) {
      p.a = mk_end(s.a, true, Tri::S);
      p.b = mk_end(s.b, true, Tri::S);
    }
    pieces.push_back(p);
  }

  // fin copies: strands clipped along the diagonals
  for (auto& s : d.strands) {
    // gather split parameters on both diagonal lines
    auto sub = subdivide(s.pts, 0.02);
    // walk segments, splitting where they cross a diagonal
    std::vector<std::vector<Vec2>> parts;
    std::vector<CutPoint> part_cuts;  // cut at the END of part i (size-1 fewer)
    std::vector<Vec2> cur{sub[0]};
    for (size_t i = 1; i < sub.size(); ++i) {
      Vec2 a = sub[i - 1], b = sub[i];
      // intersect segment with both diagonals (as lines through the square)
      struct SplitHit {
        double t;
        Vec2 p;
      };
      std::vector<SplitHit> hits;
      auto line_hit = [&](double sign) {
        // diagonal: y - 0.5 = sign * (x - 0.5)
        double fa = (a.y - 0.5) - sign * (a.x - 0.5);
        double fb = (b.y - 0.5) - sign * (b.x - 0.5);
        if ((fa > 0 && fb > 0) || (fa < 0 && fb < 0)) return;
        double t = fa / (fa - fb);
        if (t <= 1e-12 || t >= 1 - 1e-12) return;
        hits.push_back({t, a + (b - a) * t});
      };
      line_hit(+1.0);
      line_hit(-1.0);
      std::sort(hits.begin(), hits.end(),
                [](const SplitHit& x, const SplitHit& y) { return x.t < y.t; });
      for (auto& h : hits) {
        cur.push_back(h.p);
        parts.push_back(cur);
        part_cuts.push_back({h.p, classify_cut(h.p, 1e-9), 0});
        cur.clear();
        cur.push_back(h.p);
      }
      cur.push_back(b);
    }
    parts.push_back(cur);

    // register cut points
    std::vector<int> cut_ids;
    for (auto& cp : part_cuts) {
      cut_ids.push_back(static_cast<int>(cut_registry.size()));
      cut_registry.push_back(cp);
    }

    for (size_t pi = 0; pi < parts.size(); ++pi) {
      auto& part = parts[pi];
      if (part.size() < 2) {
        // degenerate sliver; tolerate only if it is the whole strand
        if (parts.size() == 1) continue;
        throw std::runtime_error("lift_to_disk: degenerate clip piece");
      }
      // triangle of this part by midpoint
      Vec2 mid = geom::Polyline{part}.at(0.5);
      Tri t = triangle_of(mid);
      Piece p;
      p.central = false;
      p.tri = t;
      p.pts = map_adaptive(part, [&](Vec2 v) { return fin_map(t, v); });
      bool whole = parts.size() == 1;
      bool closed_whole = whole && s.closed();
      p.closed = closed_whole;
      if (!closed_whole) {
        auto cut_end = [&](int ci) {
          PieceEnd pe;
          pe.kind = PieceEnd::Kind::CutPt;
          pe.cut_index = ci;
          pe.cut_plus = cut_info(cut_registry[ci].cut).plus_side == t;
          return pe;
        };
        // part pi starts at cut pi-1 and ends at cut pi; the outermost ends
        // are the strand's own ends (open) or the polyline seam (closed,
        // resolved by the merge below)
        if (pi == 0) {
          p.a = s.closed() ? PieceEnd{} : mk_end(s.a, false, t);
        } else {
          p.a = cut_end(cut_ids[pi - 1]);
        }
        if (pi + 1 == parts.size()) {
          p.b = s.closed() ? PieceEnd{} : mk_end(s.b, false, t);
        } else {
          p.b = cut_end(cut_ids[pi]);
        }
      }
      pieces.push_back(p);
    }
    // closed strand clipped into parts: first and last part join (same cut
    // loop); merge them so the chain walker sees consistent ends
    if (s.closed() && parts.size() > 1) {
      // merge the last piece into the first: they share the seam vertex
      Piece& first = pieces[pieces.size() - parts.size()];
      Piece& last = pieces.back();
      // they belong to the same triangle and connect at the strand seam
      if (geom::dist(last.pts.back(), first.pts.front()) < 1e-9 &&
          last.tri == first.tri) {
        std::vector<Vec2> joined = last.pts;
        joined.insert(joined.end(), first.pts.begin() + 1, first.pts.end());
        first.pts = joined;
        first.a = last.a;
        pieces.pop_back();
      }
    }
  }

  // rank cut points along each half-diagonal by distance from the center
  {
    std::map<int, std::vector<int>> by_cut;
    for (size_t i = 0; i < cut_registry.size(); ++i)
      by_cut[static_cast<int>(cut_registry[i].cut)].push_back(
          static_cast<int>(i));
    for (auto& [c, idxs] : by_cut) {
      std::sort(idxs.begin(), idxs.end(), [&](int x, int y) {
        return geom::dist(cut_registry[x].base_pos, {0.5, 0.5}) <
               geom::dist(cut_registry[y].base_pos, {0.5, 0.5});
      });
      for (size_t r = 0; r < idxs.size(); ++r) cut_registry[idxs[r]].rank =
          static_cast<int>(r);
    }
  }

  // ---- connection structure over piece ends
  // key for wall ends: (copy, edge, label); central copies connect to fins
  struct EndKey {
    int piece;
    bool at_a;
  };
  auto end_of = [&](const EndKey& k) -> PieceEnd& {
    return k.at_a ? pieces[k.piece].a : pieces[k.piece].b;
  };
  std::vector<EndKey> all_ends;
  for (size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].closed) continue;
    all_ends.push_back({static_cast<int>(i), true});
    all_ends.push_back({static_cast<int>(i), false});
  }

  // wall connections: central edge point label t <-> fin copy of the glued
  // partner point (same base label, opposite side), in the adjacent sector
  auto wall_partner_tri = [&](EdgeSide central_side) {
    switch (central_side) {
      case EdgeSide::Top: return Tri::S;     // fin N
      case EdgeSide::Bottom: return Tri::N;  // fin S
      case EdgeSide::Right: return Tri::W;   // fin E
      case EdgeSide::Left: return Tri::E;    // fin W
      default: throw std::logic_error("side");
    }
  };
  auto opposite_side = [](EdgeSide s) {
    switch (s) {
      case EdgeSide::Top: return EdgeSide::Bottom;
      case EdgeSide::Bottom: return EdgeSide::Top;
      case EdgeSide::Left: return EdgeSide::Right;
      case EdgeSide::Right: return EdgeSide::Left;
      default: throw std::logic_error("side");
    }
  };

  struct Connector {
    EndKey x, y;
    Annot annot;
  };
  std::vector<Connector> connectors;

  auto find_end = [&](auto&& pred) -> EndKey {
    for (auto& k : all_ends)
      if (pred(end_of(k), pieces[k.piece])) return k;
    throw std::runtime_error("lift_to_disk: expected piece end not found");
  };

  // braid depth per (central edge, label): depth of the wall crossing
  auto braid_depth = [&](EdgeSide central_side, int label) -> double {
    // partner point of the central point on the opposite side
    for (auto& p : d.boundary_points) {
      if (p.kind == BPKind::Internal) continue;
      bool horizontal = p.kind == BPKind::Horizontal;
      EdgeSide ps = p.side;
      if (p.label != label) continue;
      if (horizontal && ps == opposite_side(central_side) &&
          (central_side == EdgeSide::Top || central_side == EdgeSide::Bottom)) {
        double partner_coord = p.pos.x;
        return central_side == EdgeSide::Top ? partner_coord
                                             : 1.0 - partner_coord;
      }
      if (!horizontal && ps == opposite_side(central_side) &&
          (central_side == EdgeSide::Left || central_side == EdgeSide::Right)) {
        double partner_coord = p.pos.y;
        return central_side == EdgeSide::Right ? 1.0 - partner_coord
                                               : partner_coord;
      }
    }
    throw std::runtime_error("lift_to_disk: wall partner not found");
  };

  for (auto& p : d.boundary_points) {
    if (p.kind == BPKind::Internal) continue;
    // central end with this side+label
    EndKey ce = find_end([&](const PieceEnd& e, const Piece& pc) {
      return pc.central && e.kind == PieceEnd::Kind::Wall && e.label == p.label &&
             e.edge == p.side &&
             ((p.kind == BPKind::Horizontal &&
               (e.edge == EdgeSide::Top || e.edge == EdgeSide::Bottom)) ||
              (p.kind == BPKind::Vertical &&
               (e.edge == EdgeSide::Left || e.edge == EdgeSide::Right)));
    });
    // fin end: the copy of the partner point in the adjacent sector
    Tri ft = wall_partner_tri(p.side);
    EdgeSide fs = opposite_side(p.side);
    EndKey fe = find_end([&](const PieceEnd& e, const Piece& pc) {
      return !pc.central && pc.tri == ft && e.kind == PieceEnd::Kind::Wall &&
             e.label == p.label && e.edge == fs;
    });
    Connector c;
    c.x = ce;
    c.y = fe;
    c.annot.kind = Annot::Kind::Braid;
    c.annot.braid_depth = braid_depth(p.side, p.label);
    connectors.push_back(c);
  }

  // teleports: sheet-1 +u dot (fin of its triangle) -> -u dot (next fin ccw)
  int tele_rank = 0;
  for (int u = 1; u <= d.n_i; ++u) {
    const BoundaryPoint *plus = nullptr, *minus = nullptr;
    for (auto& p : d.boundary_points) {
      if (p.kind != BPKind::Internal) continue;
      if (p.label == u) plus = &p;
      if (p.label == -u) minus = &p;
    }
    if (!plus || !minus) throw std::runtime_error("internal pair incomplete");
    Tri tp = triangle_of(plus->pos);
    Tri tm = triangle_of(minus->pos);
    EndKey pe = find_end([&](const PieceEnd& e, const Piece& pc) {
      return !pc.central && pc.tri == tp && e.kind == PieceEnd::Kind::Dot &&
             e.label == u;
    });
    EndKey me = find_end([&](const PieceEnd& e, const Piece& pc) {
      return !pc.central && pc.tri == tm && e.kind == PieceEnd::Kind::Dot &&
             e.label == -u;
    });
    // seam between sector_of(tp) and the next sector counterclockwise
    double seam = sector_ccw_end(sector_of(tp));
    Connector c;
    c.x = pe;  // exit side
    c.y = me;
    c.annot.kind = Annot::Kind::Teleport;
    c.annot.tele_rank = tele_rank++;
    c.annot.tele_seam = seam;
    connectors.push_back(c);
  }

  // ---- pushed boundary points: central dots and cut ends
  struct Push {
    EndKey end;
    int disk_label;  // signed
    double theta;    // push angle (turns)
  };
  std::vector<Push> pushes;
  int next_pair = 1;

  // central dots: pair +u/-u of the central copy
  for (int u = 1; u <= d.n_i; ++u) {
    int pair = next_pair++;
    for (int sign : {+1, -1}) {
      EndKey k = find_end([&](const PieceEnd& e, const Piece& pc) {
        return pc.central && e.kind == PieceEnd::Kind::Dot &&
               e.label == sign * u;
      });
      Vec2 pos = k.at_a ? pieces[k.piece].pts.front() : pieces[k.piece].pts.back();
      pushes.push_back({k, sign * pair, angle_turns(pos)});
    }
  }
  // cut pairs; angular offsets off the seam DECREASE with the rank (distance
  // from the center) so the radial fan-out tails nest without crossing each
  // other
  int max_rank = 0;
  for (auto& cp : cut_registry) max_rank = std::max(max_rank, cp.rank);
  for (size_t ci = 0; ci < cut_registry.size(); ++ci) {
    int pair = next_pair++;
    const CutPoint& cp = cut_registry[ci];
    CutInfo info = cut_info(cp.cut);
    for (int sign : {+1, -1}) {
      Tri t = sign > 0 ? info.plus_side : info.minus_side;
      EndKey k = find_end([&](const PieceEnd& e, const Piece& pc) {
        return !pc.central && pc.tri == t && e.kind == PieceEnd::Kind::CutPt &&
               e.cut_index == static_cast<int>(ci);
      });
      // + ends sit on the fin's CW seam (ccw_end - 1/4), - ends on the CCW one
      double seam = sign > 0 ? sector_ccw_end(sector_of(t)) - 0.25
                             : sector_ccw_end(sector_of(t));
      double delta = 0.004 * (max_rank + 1 - cp.rank);
      double theta = sign > 0 ? seam + delta : seam - delta;
      theta -= std::floor(theta);
      pushes.push_back({k, sign * pair, theta});
    }
  }

  // de-collide push angles deterministically
  {
    bool again = true;
    int guard = 1000;
    while (again && guard-- > 0) {
      again = false;
      std::sort(pushes.begin(), pushes.end(),
                [](const Push& a, const Push& b) { return a.theta < b.theta; });
      for (size_t i = 1; i < pushes.size(); ++i) {
        double gap = pushes[i].theta - pushes[i - 1].theta;
        if (gap < 1e-5) {
          pushes[i].theta += 2e-5;
          pushes[i].theta -= std::floor(pushes[i].theta);
          again = true;
        }
      }
    }
  }

  // bend each pushed end's final vertex to its push angle at constant radius,
  // then the tail is radial
  std::map<std::pair<int, bool>, const Push*> push_of_end;
  for (auto& ps : pushes) push_of_end[{ps.end.piece, ps.end.at_a}] = &ps;

  // ---- assemble wires by walking chains
  std::vector<build::Wire> wires;
  std::vector<std::vector<std::pair<double, Annot>>> wire_marks;
  std::set<std::pair<int, bool>> used_ends;
  std::vector<DiskBoundaryPoint> disk_points;
  int next_disk_point_id = 1;

  auto connector_at = [&](const EndKey& k) -> const Connector* {
    for (auto& c : connectors) {
      if (c.x.piece == k.piece && c.x.at_a == k.at_a) return &c;
      if (c.y.piece == k.piece && c.y.at_a == k.at_a) return &c;
    }
    return nullptr;
  };

  auto piece_polyline = [&](int piece, bool from_a) {
    std::vector<Vec2> p = pieces[piece].pts;
    if (!from_a) std::reverse(p.begin(), p.end());
    return p;
  };

  auto teleport_path = [&](Vec2 from, Vec2 to, const Annot& an, bool forward) {
    // from exit-side point to entry-side point across the seam
    double r_t = kTeleBand0 + 0.018 * an.tele_rank;
    double seam = an.tele_seam;
    double eps_t = 0.006 * (an.tele_rank + 1);
    Vec2 p1 = polar(r_t, seam - eps_t);
    Vec2 p2 = polar(r_t, seam + eps_t);
    if (!forward) std::swap(p1, p2);
    std::vector<Vec2> path{from};
    // polar interpolation from->p1, p1->p2, p2->to
    double a_from = angle_turns(from), r_from = geom::norm(from);
    double a_p1 = angle_turns(p1);
    double d1 = a_p1 - a_from;
    d1 -= std::round(d1);
    append_polar_lerp(path, r_from, a_from, r_t, a_from + d1);
    double a_p2 = angle_turns(p2);
    double d2 = a_p2 - a_p1;
    d2 -= std::round(d2);
    append_polar_lerp(path, r_t, a_p1, r_t, a_p1 + d2);
    double a_to = angle_turns(to), r_to = geom::norm(to);
    double d3 = a_to - (a_p1 + d2);
    d3 -= std::round(d3);
    append_polar_lerp(path, r_t, a_p1 + d2, r_to, a_p1 + d2 + d3);
    // snap the tail to `to` exactly
    path.back() = to;
    return path;
  };

  int braid_index = 0;
  auto braid_path = [&](Vec2 from, Vec2 to) {
    // radially out of the central square, then a sweep just under the fins
    double a0 = angle_turns(from);
    double a1 = angle_turns(to), r1 = geom::norm(to);
    double rs = kSweep + 0.0004 * (braid_index++ % 50);
    double da = a1 - a0;
    da -= std::round(da);
    std::vector<Vec2> path{from, polar(rs, a0)};
    append_polar_lerp(path, rs, a0, r1, a0 + da);
    path.back() = to;
    return path;
  };

  for (auto& start_key : all_ends) {
    if (used_ends.count({start_key.piece, start_key.at_a})) continue;
    // only start chains at pushed ends or crossing slots (chain terminals)
    const PieceEnd& se = end_of(start_key);
    bool terminal = se.kind == PieceEnd::Kind::CrossSlot ||
                    push_of_end.count({start_key.piece, start_key.at_a});
    if (!terminal) continue;

    WireBuild wb;
    // tail geometry: a short slant from the piece end to the push angle in a
    // thin radial band, then a radial run to the circle
    auto make_tail = [&](Vec2 endpos, double theta, bool inward) {
      double r0 = geom::norm(endpos);
      double band = std::min(0.015, 0.5 * (1.0 - r0));
      std::vector<Vec2> tail;
      if (inward) {
        tail.push_back(polar(1.0, theta));
        tail.push_back(polar(r0 + band, theta));
        tail.push_back(endpos);
      } else {
        tail.push_back(endpos);
        tail.push_back(polar(r0 + band, theta));
        tail.push_back(polar(1.0, theta));
      }
      return tail;
    };
    // end A of the wire
    if (se.kind == PieceEnd::Kind::CrossSlot) {
      wb.a = EndRef{EndRef::Type::Crossing, se.crossing, se.slot};
    } else {
      const Push* ps = push_of_end[{start_key.piece, start_key.at_a}];
      DiskBoundaryPoint dp;
      dp.id = next_disk_point_id++;
      dp.label = ps->disk_label;
      dp.angle = ps->theta;
      disk_points.push_back(dp);
      wb.a = EndRef{EndRef::Type::Boundary, dp.id, -1};
      Vec2 endpos = start_key.at_a ? pieces[start_key.piece].pts.front()
                                   : pieces[start_key.piece].pts.back();
      Annot an;
      an.kind = Annot::Kind::PushTail;
      an.push_sign = ps->disk_label > 0 ? +1 : -1;
      wb.append(make_tail(endpos, ps->theta, true), an);
    }

    // walk pieces and connectors
    EndKey cur = start_key;
    while (true) {
      used_ends.insert({cur.piece, cur.at_a});
      Annot content;
      content.kind = Annot::Kind::Content;
      wb.append(piece_polyline(cur.piece, cur.at_a), content);
      EndKey other{cur.piece, !cur.at_a};
      used_ends.insert({other.piece, other.at_a});
      const PieceEnd& oe = end_of(other);
      if (oe.kind == PieceEnd::Kind::CrossSlot) {
        wb.b = EndRef{EndRef::Type::Crossing, oe.crossing, oe.slot};
        break;
      }
      if (push_of_end.count({other.piece, other.at_a})) {
        const Push* ps = push_of_end[{other.piece, other.at_a}];
        DiskBoundaryPoint dp;
        dp.id = next_disk_point_id++;
        dp.label = ps->disk_label;
        dp.angle = ps->theta;
        disk_points.push_back(dp);
        wb.b = EndRef{EndRef::Type::Boundary, dp.id, -1};
        Vec2 endpos = wb.pts.back();
        double r0 = geom::norm(endpos);
        double band = std::min(0.015, 0.5 * (1.0 - r0));
        std::vector<Vec2> tail{endpos, polar(r0 + band, ps->theta),
                               polar(1.0, ps->theta)};
        Annot an;
        an.kind = Annot::Kind::PushTail;
        an.push_sign = ps->disk_label > 0 ? +1 : -1;
        wb.append(tail, an);
        break;
      }
      // otherwise a connector continues the chain
      const Connector* cn = connector_at(other);
      if (!cn) throw std::runtime_error("lift_to_disk: chain end unresolved");
      EndKey nxt = (cn->x.piece == other.piece && cn->x.at_a == other.at_a)
                       ? cn->y
                       : cn->x;
      bool forward = cn->x.piece == other.piece && cn->x.at_a == other.at_a;
      Vec2 from = wb.pts.back();
      Vec2 to = nxt.at_a ? pieces[nxt.piece].pts.front()
                         : pieces[nxt.piece].pts.back();
      std::vector<Vec2> path;
      if (cn->annot.kind == Annot::Kind::Braid) path = braid_path(from, to);
      else path = teleport_path(from, to, cn->annot, forward);
      wb.append(path, cn->annot);
      cur = nxt;
    }

    build::Wire w;
    w.a = wb.a;
    w.b = wb.b;
    w.pts = wb.pts;
    wires.push_back(w);
    wire_marks.push_back(wb.marks);
  }

  // closed chains (pieces with no terminals; includes whole closed strands)
  for (auto& start_key : all_ends) {
    if (used_ends.count({start_key.piece, start_key.at_a})) continue;
    WireBuild wb;
    EndKey cur = start_key;
    bool first = true;
    while (first || !(cur.piece == start_key.piece && cur.at_a == start_key.at_a)) {
      first = false;
      used_ends.insert({cur.piece, cur.at_a});
      Annot content;
      content.kind = Annot::Kind::Content;
      wb.append(piece_polyline(cur.piece, cur.at_a), content);
      EndKey other{cur.piece, !cur.at_a};
      used_ends.insert({other.piece, other.at_a});
      const Connector* cn = connector_at(other);
      if (!cn) throw std::runtime_error("lift_to_disk: closed chain broken");
      EndKey nxt = (cn->x.piece == other.piece && cn->x.at_a == other.at_a)
                       ? cn->y
                       : cn->x;
      bool forward = cn->x.piece == other.piece && cn->x.at_a == other.at_a;
      Vec2 from = wb.pts.back();
      if (nxt.piece == start_key.piece && nxt.at_a == start_key.at_a) {
        Vec2 to = wb.pts.front();
        std::vector<Vec2> path;
        if (cn->annot.kind == Annot::Kind::Braid) path = braid_path(from, to);
        else path = teleport_path(from, to, cn->annot, forward);
        wb.append(path, cn->annot);
        break;
      }
      Vec2 to = nxt.at_a ? pieces[nxt.piece].pts.front()
                         : pieces[nxt.piece].pts.back();
      std::vector<Vec2> path;
      if (cn->annot.kind == Annot::Kind::Braid) path = braid_path(from, to);
      else path = teleport_path(from, to, cn->annot, forward);
      wb.append(path, cn->annot);
      cur = nxt;
    }
    build::Wire w;
    w.pts = wb.pts;
    wires.push_back(w);
    wire_marks.push_back(wb.marks);
  }
  // plain closed pieces (closed strands never enter all_ends)
  for (size_t i = 0; i < pieces.size(); ++i) {
    if (!pieces[i].closed) continue;
    build::Wire w;
    w.pts = pieces[i].pts;
    Annot content;
    content.kind = Annot::Kind::Content;
    wires.push_back(w);
    wire_marks.push_back({{0.0, content}});
  }

  // annotation lookup
  auto annot_at = [&](int wi, double param) -> const Annot& {
    geom::Polyline pl{wires[wi].pts};
    double len = pl.length() * param;
    auto& marks = wire_marks[wi];
    const Annot* best = &marks.front().second;
    for (auto& [from, an] : marks)
      if (from <= len + 1e-12) best = &an;
    return *best;
  };

  auto tele_state_exit = [&](const Annot& an, Vec2 p) {
    // exit side: angle cw of the seam (within a quarter turn)
    double dd = angle_turns(p) - an.tele_seam;
    dd -= std::round(dd);
    return dd < 0;
  };

  auto rule = [&](int wi, double si, int wj, double sj, Vec2 p) -> bool {
    const Annot& A = annot_at(wi, si);
    const Annot& B = annot_at(wj, sj);
    auto kind_rank = [](const Annot& a) {
      switch (a.kind) {
        case Annot::Kind::PushTail: return 0;
        case Annot::Kind::Teleport: return 1;
        case Annot::Kind::Braid: return 2;
        case Annot::Kind::Content: return 3;
      }
      return 3;
    };
    if (A.kind == Annot::Kind::PushTail || B.kind == Annot::Kind::PushTail) {
      if (kind_rank(A) <= kind_rank(B))
        return A.kind == Annot::Kind::PushTail ? A.push_sign > 0
                                               : !(B.push_sign > 0);
      return B.push_sign > 0 ? false : true;
    }
    if (A.kind == Annot::Kind::Teleport || B.kind == Annot::Kind::Teleport) {
      if (A.kind == Annot::Kind::Teleport && B.kind == Annot::Kind::Teleport) {
        bool ea = tele_state_exit(A, p), eb = tele_state_exit(B, p);
        if (ea != eb) return ea;
        if (ea) return A.tele_rank < B.tele_rank;
        return A.tele_rank > B.tele_rank;
      }
      if (A.kind == Annot::Kind::Teleport) return tele_state_exit(A, p);
      return !tele_state_exit(B, p);
    }
    if (A.kind == Annot::Kind::Braid && B.kind == Annot::Kind::Braid)
      return A.braid_depth > B.braid_depth;
    std::ostringstream os;
    os.precision(12);
    os << "lift_to_disk: unexpected crossing between "
       << static_cast<int>(A.kind) << " and " << static_cast<int>(B.kind)
       << " at (" << p.x << ", " << p.y << ") r=" << geom::norm(p);
    throw std::runtime_error(os.str());
  };

  // ---- compile and emit
  int next_new_crossing = 10000;
  auto compiled = build::compile_wires(wires, rule, next_new_crossing);

  DiskDiagram out;
  out.tolerance = tol;
  out.n = next_pair - 1;
  out.boundary_points = disk_points;
  out.strands = compiled.strands;

  // copy crossings: positions mapped, slots rebuilt from geometry
  std::map<int, Crossing> copy_cross;
  for (auto& c : d.crossings) {
    Crossing cc;
    cc.id = copy_crossing_id(true, Tri::S, c.id);
    cc.pos = central_map(c.pos);
    cc.over_pair = c.over_pair;  // parity fixed below
    copy_cross[cc.id] = cc;
    Tri t = triangle_of(c.pos);
    Crossing fc;
    fc.id = copy_crossing_id(false, t, c.id);
    fc.pos = fin_map(t, c.pos);
    fc.over_pair = c.over_pair;
    copy_cross[fc.id] = fc;
  }

  // rebuild slots: for each copy crossing, sort its four strand ends by angle
  for (auto& [cid, cc] : copy_cross) {
    struct EndAt {
      Strand* s;
      bool at_a;
      double ang;
      int old_slot;
    };
    std::vector<EndAt> ends;
    for (auto& s : out.strands)
      for (bool at_a : {true, false}) {
        EndRef& e = at_a ? s.a : s.b;
        if (e.type == EndRef::Type::Crossing && e.id == cid) {
          Vec2 adj = at_a ? s.pts[1] : s.pts[s.pts.size() - 2];
          Vec2 dv = adj - cc.pos;
          ends.push_back({&s, at_a, std::atan2(dv.y, dv.x), e.slot});
        }
      }
    if (ends.size() != 4)
      throw std::runtime_error("lift_to_disk: copy crossing missing ends");
    std::sort(ends.begin(), ends.end(),
              [](const EndAt& a, const EndAt& b) { return a.ang < b.ang; });
    int new_over = -1;
    for (int k = 0; k < 4; ++k) {
      EndRef& e = ends[k].at_a ? ends[k].s->a : ends[k].s->b;
      if ((ends[k].old_slot & 1) == cc.over_pair) new_over = k & 1;
      e.slot = k;
    }
    cc.over_pair = new_over;
  }

  for (auto& [cid, cc] : copy_cross) out.crossings.push_back(cc);
  for (auto& c : compiled.crossings) out.crossings.push_back(c);
  return out;
}

// ---------------------------------------------------------------------------
// lift_to_s3: cyclic gluing of four copies


pd::PlanarDiagram lift_to_s3(const lens::StandardDiskDiagram& sd) {
  const DiskDiagram& d = sd.diagram;

  // Open-book overlay: the four fundamental-domain copies stack over the
  // same disk. Copy m (m = 0,1,2) is the diagram rotated clockwise by 90m
  // degrees at height level m; copy 3 is drawn outside the circle through
  // the inversion r -> 1/r with all of its crossings inverted. Boundary ends
  // join on the circle: +t of copy m meets -t of copy m+1 at the same point.
  // A small angular shear (vanishing on the circle) separates otherwise
  // coincident rotated copies. The stacking direction of the four regions is
  // the remaining binary orientation choice; it is pinned by the fiber-link
  // witness (coherently oriented lift of the [i]-fiber pair has linking +1),
  // which the final global crossing flip below realizes.
  auto xform = [&](int m, Vec2 p) -> Vec2 {
    Vec2 q = p;
    for (int k = 0; k < m; ++k) q = {q.y, -q.x};  // clockwise quarter turns
    double r = geom::norm(q);
    if (r > 1e-12) {
      double shear = 0.015 * m * (1.0 - std::min(r, 1.0));
      double c = std::cos(kTau * shear), s = std::sin(kTau * shear);
      q = {q.x * c - q.y * s, q.x * s + q.y * c};
    }
    if (m == 3) {
      double r2 = q.x * q.x + q.y * q.y;
      if (r2 < 1e-12) throw std::runtime_error("content at the disk center");
      q = {q.x / r2, q.y / r2};
    }
    return q;
  };

  // copy crossing ids
  auto copy_cid = [&](int m, int disk_cid) { return 10 * disk_cid + m; };

  // chain walking structures on the disk diagram
  std::map<std::pair<int, int>, std::pair<int, bool>> from_slot;
  std::map<int, std::pair<int, bool>> from_point;
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

  // build wires: chains of copy strands joined at the circle
  std::vector<build::Wire> wires;
  std::vector<std::vector<std::pair<double, int>>> wire_levels;  // (from-len, copy)
  std::set<std::tuple<int, int, bool>> used;  // (copy, strand, forward-dir)

  auto strand_polyline = [&](int m, int si, bool forward) {
    std::vector<Vec2> pts;
    auto sub = subdivide(d.strands[si].pts, 0.02);
    if (!forward) std::reverse(sub.begin(), sub.end());
    for (auto& v : sub) pts.push_back(xform(m, v));
    return pts;
  };

  // walk from a (copy, strand, direction) until a crossing end or closure
  auto walk_chain = [&](int m0, int si0, bool fwd0, bool& closed) {
    build::Wire w;
    std::vector<std::pair<double, int>> levels;
    double acc = 0;
    int m = m0, si = si0;
    bool fwd = fwd0;
    const Strand& s0 = d.strands[si0];
    const EndRef& start = fwd0 ? s0.a : s0.b;
    if (start.type == EndRef::Type::Crossing)
      w.a = EndRef{EndRef::Type::Crossing, copy_cid(m0, start.id), start.slot};
    closed = false;
    while (true) {
      used.insert({m, si, fwd});
      used.insert({m, si, !fwd});
      levels.push_back({acc, m});
      auto pts = strand_polyline(m, si, fwd);
      if (w.pts.empty()) {
        w.pts = pts;
      } else {
        if (geom::dist(w.pts.back(), pts.front()) > 1e-9)
          throw std::runtime_error("lift_to_s3: chain discontinuity");
        for (size_t k = 1; k < pts.size(); ++k) w.pts.push_back(pts[k]);
      }
      acc = geom::Polyline{w.pts}.length();
      const Strand& s = d.strands[si];
      const EndRef& far = fwd ? s.b : s.a;
      if (far.type == EndRef::Type::Crossing) {
        w.b = EndRef{EndRef::Type::Crossing, copy_cid(m, far.id), far.slot};
        break;
      }
      // label join: +t of copy m meets -t of copy m+1 at the same point
      const DiskBoundaryPoint* p = d.find_point(far.id);
      const DiskBoundaryPoint* q = d.find_label(-p->label);
      m = (m + (p->label > 0 ? 1 : 3)) % 4;
      auto nxt = from_point.at(q->id);
      si = nxt.first;
      fwd = nxt.second;
      if (m == m0 && si == si0 && fwd == fwd0) {
        // chain closed without a crossing
        closed = true;
        w.a = w.b = EndRef{};
        break;
      }
    }
    wire_levels.push_back(levels);
    return w;
  };

  // start chains at crossing ends
  for (size_t si = 0; si < d.strands.size(); ++si) {
    const Strand& s = d.strands[si];
    if (s.closed()) continue;
    for (bool at_a : {true, false}) {
      const EndRef& e = at_a ? s.a : s.b;
      if (e.type != EndRef::Type::Crossing) continue;
      for (int m = 0; m < 4; ++m) {
        if (used.count({m, static_cast<int>(si), at_a})) continue;
        bool closed = false;
        wires.push_back(walk_chain(m, static_cast<int>(si), at_a, closed));
      }
    }
  }
  // crossingless chains and closed strands
  for (size_t si = 0; si < d.strands.size(); ++si) {
    const Strand& s = d.strands[si];
    if (s.closed()) {
      for (int m = 0; m < 4; ++m) {
        build::Wire w;
        w.pts = strand_polyline(m, static_cast<int>(si), true);
        wires.push_back(w);
        wire_levels.push_back({{0.0, m}});
      }
      continue;
    }
    for (int m = 0; m < 4; ++m) {
      if (used.count({m, static_cast<int>(si), true}) ||
          used.count({m, static_cast<int>(si), false}))
        continue;
      bool closed = false;
      auto w = walk_chain(m, static_cast<int>(si), true, closed);
      if (!closed) throw std::runtime_error("lift_to_s3: broken chain");
      // ensure the closed wire polyline is closed
      if (geom::dist(w.pts.front(), w.pts.back()) > 1e-9)
        throw std::runtime_error("lift_to_s3: closed chain does not close");
      wires.push_back(w);
    }
  }

  // over rule: higher level passes over; copy 3 never meets the others
  auto level_at = [&](int wi, double param) {
    geom::Polyline pl{wires[wi].pts};
    double len = pl.length() * param;
    int best = wire_levels[wi].front().second;
    for (auto& [from, lvl] : wire_levels[wi])
      if (from <= len + 1e-12) best = lvl;
    return best;
  };
  auto rule = [&](int wi, double si_, int wj, double sj_, Vec2 p) -> bool {
    (void)p;
    int li = level_at(wi, si_), lj = level_at(wj, sj_);
    if (li == lj)
      throw std::runtime_error("lift_to_s3: same-level crossing outside copies");
    if (li == 3 || lj == 3)
      throw std::runtime_error("lift_to_s3: outside copy crossed an inside one");
    return li > lj;
  };

  int compile_base = 0;
  for (auto& c : d.crossings)
    compile_base = std::max(compile_base, copy_cid(3, c.id) + 1);
  auto compiled = build::compile_wires(wires, rule, compile_base);

  // assemble all crossings: copies of the disk crossings plus compiled ones
  struct XInfo {
    Vec2 pos;
    int over_parity_hint;  // from the disk diagram (parity of old over slots)
    bool invert;
  };
  std::map<int, XInfo> copyx;
  for (auto& c : d.crossings)
    for (int m = 0; m < 4; ++m)
      copyx[copy_cid(m, c.id)] = {xform(m, c.pos), c.over_pair, m == 3};

  // index all crossings densely
  std::map<int, int> dense;
  for (auto& [cid, xi] : copyx) dense.emplace(cid, static_cast<int>(dense.size()));
  for (auto& c : compiled.crossings) dense.emplace(c.id, static_cast<int>(dense.size()));

  pd::PlanarDiagram out;
  out.crossings.resize(dense.size());
  for (auto& [cid, xi] : copyx) out.crossings[dense[cid]].pos = xi.pos;
  for (auto& c : compiled.crossings) {
    out.crossings[dense[c.id]].pos = c.pos;
    out.crossings[dense[c.id]].over_pair = c.over_pair;
  }
  out.mate.assign(4 * dense.size(), -1);

  // rebuild slots of the copy crossings from the drawn geometry
  struct EndAt {
    int strand;
    bool at_a;
    double ang;
    int old_slot;
  };
  std::map<int, std::vector<EndAt>> ends_at;
  for (size_t si = 0; si < compiled.strands.size(); ++si) {
    auto& s = compiled.strands[si];
    for (bool at_a : {true, false}) {
      const EndRef& e = at_a ? s.a : s.b;
      if (e.type != EndRef::Type::Crossing) continue;
      if (!copyx.count(e.id)) continue;  // compiled crossings already slotted
      Vec2 cpos = copyx[e.id].pos;
      Vec2 adj = at_a ? s.pts[1] : s.pts[s.pts.size() - 2];
      Vec2 dv = adj - cpos;
      ends_at[e.id].push_back(
          {static_cast<int>(si), at_a, std::atan2(dv.y, dv.x), e.slot});
    }
  }
  for (auto& [cid2, xi2] : copyx)
    if (!ends_at.count(cid2) || ends_at[cid2].size() != 4) {
      std::ostringstream os;
      os << "lift_to_s3: copy crossing " << cid2 << " (disk crossing "
         << cid2 / 10 << " copy " << cid2 % 10 << ") has "
         << (ends_at.count(cid2) ? ends_at[cid2].size() : 0) << " ends";
      throw std::runtime_error(os.str());
    }
  for (auto& [cid, ends] : ends_at) {
    if (ends.size() != 4)
      throw std::runtime_error("lift_to_s3: copy crossing missing ends");
    std::sort(ends.begin(), ends.end(),
              [](const EndAt& a, const EndAt& b) { return a.ang < b.ang; });
    int new_over = -1;
    for (int k = 0; k < 4; ++k) {
      auto& s = compiled.strands[ends[k].strand];
      EndRef& e = ends[k].at_a ? s.a : s.b;
      if ((ends[k].old_slot & 1) == copyx[cid].over_parity_hint) new_over = k & 1;
      e.slot = k;
    }
    if (copyx[cid].invert) new_over ^= 1;
    out.crossings[dense[cid]].over_pair = new_over;
  }

  // connectivity: each compiled strand joins its two crossing ends
  for (auto& s : compiled.strands) {
    if (s.a.type == EndRef::Type::None) {
      out.free_loops++;
      continue;
    }
    if (s.a.type != EndRef::Type::Crossing || s.b.type != EndRef::Type::Crossing)
      throw std::runtime_error("lift_to_s3: stray boundary end");
    int ea = 4 * dense[s.a.id] + s.a.slot;
    int eb = 4 * dense[s.b.id] + s.b.slot;
    if (out.mate[ea] != -1 || out.mate[eb] != -1)
      throw std::runtime_error("lift_to_s3: slot reused");
    out.mate[ea] = eb;
    out.mate[eb] = ea;
  }

  // stacking-direction pin (see the comment above)
  for (auto& c : out.crossings) c.over_pair ^= 1;

  pd::validate_map(out);
  return out;
}

// ---------------------------------------------------------------------------

TwistBlock TwistBlock::full_twist(int n) {
  TwistBlock t;
  t.n = n;
  for (int rep = 0; rep < n; ++rep)
    for (int g = 1; g < n; ++g) t.word.push_back(g);
  return t;
}

std::vector<int> TwistBlock::permutation() const {
  std::vector<int> perm(n + 1);
  for (int i = 1; i <= n; ++i) perm[i] = i;
  for (int g : word) std::swap(perm[g], perm[g + 1]);
  return perm;
}

pd::PlanarDiagram braid_closure(int n, const std::vector<int>& word) {
  pd::PlanarDiagram out;
  int nc = static_cast<int>(word.size());
  out.crossings.assign(nc, {0, {}});
  out.mate.assign(4 * nc, -1);
  if (nc == 0) {
    out.free_loops = n;
    return out;
  }
  auto link = [&](int x, int y) {
    out.mate[x] = y;
    out.mate[y] = x;
  };
  std::vector<int> cur(n + 1, -1), first(n + 1, -1);
  for (int t = 0; t < nc; ++t) {
    int g = word[t];
    int sw = 4 * t + 2, se = 4 * t + 3, nw = 4 * t + 1, ne = 4 * t + 0;
    if (cur[g] < 0) first[g] = sw;
    else link(cur[g], sw);
    if (cur[g + 1] < 0) first[g + 1] = se;
    else link(cur[g + 1], se);
    cur[g + 1] = ne;
    cur[g] = nw;
  }
  int untouched = 0;
  for (int pos = 1; pos <= n; ++pos) {
    if (cur[pos] < 0) ++untouched;
    else link(cur[pos], first[pos]);
  }
  out.free_loops = untouched;
  pd::validate_map(out);
  return out;
}

// ---------------------------------------------------------------------------

std::string ConsistencyReport::to_string() const {
  std::ostringstream os;
  for (auto& s : stages)
    os << (s.ok ? "ok   " : "FAIL ") << s.stage << ": " << s.detail << "\n";
  return os.str();
}

ConsistencyReport predict_and_check(const sqd::SquareDiagram& d) {
  ConsistencyReport rep;
  auto add = [&](const std::string& stage, bool ok, const std::string& detail) {
    rep.stages.push_back({stage, ok, detail});
  };

  auto comps = sqd::trace_components(d);
  std::vector<q8::ConjClass> classes;
  for (auto& c : comps) classes.push_back(c.cls);
  auto table = sqd::counts_for_classes(classes);
  {
    std::ostringstream os;
    os << "components " << comps.size() << ", predicted disk components "
       << table.xi << ", S3 components " << table.s3;
    add("algebraic", true, os.str());
  }

  // predicted multiset of Z/4 classes of the disk components
  std::multiset<int> predicted_disk_classes;
  for (auto& c : comps) {
    auto deg = q8::component_degree(c.cls.representative,
                                    q8::subgroup(q8::SubgroupTag::Hi));
    int count = q8::lift_component_count(c.cls.representative,
                                         q8::subgroup(q8::SubgroupTag::Hi));
    int z = q8::zmod4_exponent(deg.power, q8::SubgroupTag::Hi);
    int zc = std::min(z, (4 - z) % 4);
    for (int k = 0; k < count; ++k) predicted_disk_classes.insert(zc);
  }

  DiskDiagram disk;
  try {
    disk = lift_to_disk(d);
  } catch (const std::exception& ex) {
    add("lift_to_disk", false, ex.what());
    return rep;
  }
  auto vrep = lens::validate_disk(disk);
  add("disk_valid", vrep.ok(), vrep.ok() ? "valid" : vrep.to_string());

  auto dcomps = lens::trace_disk_components(disk);
  {
    bool ok = static_cast<int>(dcomps.size()) == table.xi;
    std::ostringstream os;
    os << "constructive " << dcomps.size() << " vs algebraic " << table.xi;
    add("disk_component_count", ok, os.str());
  }
  {
    std::multiset<int> got;
    for (auto& c : dcomps) got.insert(c.cls);
    bool ok = got == predicted_disk_classes;
    std::ostringstream os;
    os << "disk classes {";
    for (int c : got) os << c << " ";
    os << "} vs predicted {";
    for (int c : predicted_disk_classes) os << c << " ";
    os << "}";
    add("disk_classes", ok, os.str());
  }

  // S3 stage
  auto sd = lens::standardize(disk);
  auto svrep = lens::validate_disk(sd.diagram);
  add("standardized_valid", svrep.ok(), svrep.ok() ? "valid" : svrep.to_string());
  {
    auto scomps = lens::trace_disk_components(sd.diagram);
    bool ok = scomps.size() == dcomps.size();
    add("standardize_preserves_components", ok,
        std::to_string(scomps.size()) + " components");
  }
  pd::PlanarDiagram s3;
  try {
    s3 = lift_to_s3(sd);
  } catch (const std::exception& ex) {
    add("lift_to_s3", false, ex.what());
    return rep;
  }
  auto pcomps = pd::components(s3);
  {
    bool ok = pcomps.count == table.s3;
    std::ostringstream os;
    os << "constructive " << pcomps.count << " vs algebraic " << table.s3;
    add("s3_component_count", ok, os.str());
  }
  {
    int via_disk = lens::lens_lift_counts(disk).s3;
    bool ok = via_disk == table.s3;
    std::ostringstream os;
    os << "disk-orbit formula " << via_disk << " vs Q8 formula " << table.s3;
    add("s3_two_formulas", ok, os.str());
  }
  return rep;
}

}  // namespace quatlink::lift
