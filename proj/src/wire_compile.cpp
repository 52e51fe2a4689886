#include "quatlink/wire_compile.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace quatlink::build {

using geom::Vec2;
using sqd::Crossing;
using sqd::EndRef;
using sqd::Strand;

namespace {

struct Cut {
  double t;         // arclength parameter on the wire
  int crossing_id;  // crossing created there
  Vec2 pos;
};

}  // namespace

CompileResult compile_wires(const std::vector<Wire>& wires, const OverRule& rule,
                            int first_crossing_id) {
  CompileResult out;
  int next_id = first_crossing_id;

  struct Hit {
    int wi, wj;
    double s, t;
    Vec2 p;
  };
  std::vector<Hit> hits;
  for (size_t i = 0; i < wires.size(); ++i) {
    geom::Polyline pi{wires[i].pts};
    for (size_t j = i; j < wires.size(); ++j) {
      geom::Polyline pj{wires[j].pts};
      for (auto& h :
           geom::polyline_intersections(pi, pj, 1e-12, i == j)) {
        hits.push_back({static_cast<int>(i), static_cast<int>(j), h.s, h.t,
                        h.point});
      }
    }
  }
  // coincidence check
  for (size_t a = 0; a < hits.size(); ++a)
    for (size_t b = a + 1; b < hits.size(); ++b)
      if (geom::dist(hits[a].p, hits[b].p) < 1e-9) {
        std::ostringstream os;
        os.precision(12);
        os << "compile_wires: coincident intersections (triple point) at ("
           << hits[a].p.x << ", " << hits[a].p.y << ") wires " << hits[a].wi
           << "@" << hits[a].s << "/" << hits[a].wj << "@" << hits[a].t
           << " and " << hits[b].wi << "@" << hits[b].s << "/" << hits[b].wj
           << "@" << hits[b].t;
        throw std::runtime_error(os.str());
      }

  std::vector<std::vector<Cut>> cuts(wires.size());
  std::vector<Crossing> crossings;
  struct Pending {
    int id;
    int wi, wj;
    double s, t;
    bool i_over;
    Vec2 p;
  };
  std::vector<Pending> pend;
  for (auto& h : hits) {
    Crossing c;
    c.id = next_id++;
    c.pos = h.p;
    bool i_over = rule(h.wi, h.s, h.wj, h.t, h.p);
    crossings.push_back(c);
    cuts[h.wi].push_back({h.s, c.id, h.p});
    cuts[h.wj].push_back({h.t, c.id, h.p});
    pend.push_back({c.id, h.wi, h.wj, h.s, h.t, i_over, h.p});
  }

  // split wires into strands at their cut parameters
  struct Piece {
    Strand s;
    int wire;
    // crossing ids at the two ends when they end at cuts (-1 otherwise)
    int cut_a = -1, cut_b = -1;
    double param_a = -1, param_b = -1;  // wire params of cut ends
  };
  std::vector<Piece> pieces;
  for (size_t w = 0; w < wires.size(); ++w) {
    auto& cv = cuts[w];
    std::sort(cv.begin(), cv.end(),
              [](const Cut& a, const Cut& b) { return a.t < b.t; });
    const Wire& wire = wires[w];
    geom::Polyline pl{wire.pts};
    double L = pl.length();
    bool closed = wire.a.type == EndRef::Type::None;
    if (cv.empty()) {
      Piece p;
      p.s.a = wire.a;
      p.s.b = wire.b;
      p.s.pts = wire.pts;
      p.wire = static_cast<int>(w);
      pieces.push_back(p);
      continue;
    }
    // walk the polyline inserting cut points
    // param of each vertex
    std::vector<double> vt(wire.pts.size(), 0.0);
    double acc = 0;
    for (size_t v = 1; v < wire.pts.size(); ++v) {
      acc += geom::dist(wire.pts[v - 1], wire.pts[v]);
      vt[v] = acc / L;
    }
    auto points_between = [&](double t0, double t1) {
      std::vector<Vec2> ps;
      for (size_t v = 0; v < wire.pts.size(); ++v)
        if (vt[v] > t0 + 1e-12 && vt[v] < t1 - 1e-12) ps.push_back(wire.pts[v]);
      return ps;
    };
    if (!closed) {
      double prev_t = 0.0;
      Vec2 prev_p = wire.pts.front();
      EndRef prev_ref = wire.a;
      int prev_cut = -1;
      for (size_t k = 0; k <= cv.size(); ++k) {
        double t1 = k < cv.size() ? cv[k].t : 1.0;
        Vec2 p1 = k < cv.size() ? cv[k].pos : wire.pts.back();
        Piece piece;
        piece.wire = static_cast<int>(w);
        piece.s.a = prev_ref;
        piece.cut_a = prev_cut;
        piece.param_a = prev_cut >= 0 ? prev_t : -1;
        piece.s.pts.push_back(prev_p);
        for (auto& mp : points_between(prev_t, t1)) piece.s.pts.push_back(mp);
        piece.s.pts.push_back(p1);
        if (k < cv.size()) {
          piece.s.b = EndRef{EndRef::Type::Crossing, cv[k].crossing_id, -1};
          piece.cut_b = cv[k].crossing_id;
          piece.param_b = t1;
          prev_ref = EndRef{EndRef::Type::Crossing, cv[k].crossing_id, -1};
          prev_cut = cv[k].crossing_id;
          prev_t = t1;
          prev_p = p1;
        } else {
          piece.s.b = wire.b;
        }
        pieces.push_back(piece);
      }
    } else {
      // closed wire with cuts: pieces wrap around
      for (size_t k = 0; k < cv.size(); ++k) {
        size_t k2 = (k + 1) % cv.size();
        Piece piece;
        piece.wire = static_cast<int>(w);
        piece.s.a = EndRef{EndRef::Type::Crossing, cv[k].crossing_id, -1};
        piece.cut_a = cv[k].crossing_id;
        piece.param_a = cv[k].t;
        piece.s.b = EndRef{EndRef::Type::Crossing, cv[k2].crossing_id, -1};
        piece.cut_b = cv[k2].crossing_id;
        piece.param_b = cv[k2].t;
        piece.s.pts.push_back(cv[k].pos);
        if (k2 > k) {
          for (auto& mp : points_between(cv[k].t, cv[k2].t))
            piece.s.pts.push_back(mp);
        } else {
          for (auto& mp : points_between(cv[k].t, 1.0)) piece.s.pts.push_back(mp);
          for (auto& mp : points_between(0.0, cv[k2].t)) piece.s.pts.push_back(mp);
        }
        piece.s.pts.push_back(cv[k2].pos);
        pieces.push_back(piece);
      }
    }
  }

  // assign slots at each crossing by CCW angle, slot 0 = smallest angle
  std::map<int, std::vector<std::pair<double, std::pair<int, bool>>>> at_crossing;
  // crossing id -> (angle, (piece index, is_end_a))
  for (size_t pi = 0; pi < pieces.size(); ++pi) {
    auto& piece = pieces[pi];
    if (piece.cut_a >= 0) {
      Vec2 c = piece.s.pts.front();
      Vec2 adj = piece.s.pts.size() > 1 ? piece.s.pts[1] : piece.s.pts.back();
      at_crossing[piece.cut_a].push_back(
          {std::atan2(adj.y - c.y, adj.x - c.x), {static_cast<int>(pi), true}});
    }
    if (piece.cut_b >= 0) {
      Vec2 c = piece.s.pts.back();
      Vec2 adj = piece.s.pts.size() > 1 ? piece.s.pts[piece.s.pts.size() - 2]
                                        : piece.s.pts.front();
      at_crossing[piece.cut_b].push_back(
          {std::atan2(adj.y - c.y, adj.x - c.x), {static_cast<int>(pi), false}});
    }
  }
  std::map<int, Crossing*> cross_by_id;
  for (auto& c : crossings) cross_by_id[c.id] = &c;

  for (auto& [cid, ends] : at_crossing) {
    if (ends.size() != 4)
      throw std::runtime_error("compile_wires: crossing without 4 ends");
    std::sort(ends.begin(), ends.end(),
              [](auto& a, auto& b) { return a.first < b.first; });
    for (int k = 0; k < 4; ++k) {
      auto [pi, is_a] = ends[k].second;
      (is_a ? pieces[pi].s.a.slot : pieces[pi].s.b.slot) = k;
    }
  }

  // over_pair per crossing from the pending over decisions
  for (auto& pd : pend) {
    // find a piece end at this crossing belonging to the over wire branch;
    // the branch is identified by (wire, param side)
    // The pieces adjacent to the crossing on wire wi at param s: ends with
    // cut id == pd.id and piece.wire == wi whose polyline touches pd.p.
    int over_slot = -1;
    for (auto& [cid, ends] : at_crossing) {
      if (cid != pd.id) continue;
      for (int k = 0; k < 4; ++k) {
        auto [pi, is_a] = ends[k].second;
        const Piece& piece = pieces[pi];
        int want_wire = pd.i_over ? pd.wi : pd.wj;
        if (piece.wire != want_wire) continue;
        if (pd.wi == pd.wj) {
          // self-crossing: the over branch is identified by its wire param
          double want_param = pd.i_over ? pd.s : pd.t;
          double have = is_a ? piece.param_a : piece.param_b;
          if (std::abs(have - want_param) > 1e-12) continue;
        }
        over_slot = is_a ? piece.s.a.slot : piece.s.b.slot;
        break;
      }
      break;
    }
    if (over_slot < 0)
      throw std::runtime_error("compile_wires: over branch not found");
    cross_by_id[pd.id]->over_pair = over_slot & 1;
  }

  for (auto& piece : pieces) out.strands.push_back(piece.s);
  out.crossings = crossings;
  return out;
}

}  // namespace quatlink::build
