#include "quatlink/planar.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace quatlink::pd {

namespace {

int next_ccw(int end) { return (end & ~3) | ((end + 1) & 3); }

struct DSU {
  std::vector<int> p;
  explicit DSU(int n) : p(n) {
    for (int i = 0; i < n; ++i) p[i] = i;
  }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[a] = b;
    return true;
  }
};

}  // namespace

void validate_map(const PlanarDiagram& d) {
  int N = d.ends();
  if (static_cast<int>(d.mate.size()) != N) throw MapError("mate size mismatch");
  for (int e = 0; e < N; ++e) {
    if (d.mate[e] < 0 || d.mate[e] >= N) throw MapError("mate out of range");
    if (d.mate[e] == e) throw MapError("slot end mated to itself");
    if (d.mate[d.mate[e]] != e) throw MapError("mate is not an involution");
  }
  // Euler formula per connected piece of the 4-valent graph.
  if (d.n() == 0) return;
  DSU dsu(d.n());
  for (int e = 0; e < N; ++e) dsu.unite(e / 4, d.mate[e] / 4);
  // trace faces: orbits of e -> next_ccw(mate[e])
  std::vector<int> face_of(N, -1);
  int nfaces = 0;
  for (int e = 0; e < N; ++e) {
    if (face_of[e] != -1) continue;
    int cur = e;
    while (face_of[cur] == -1) {
      face_of[cur] = nfaces;
      cur = next_ccw(d.mate[cur]);
    }
    ++nfaces;
  }
  std::map<int, std::array<int, 3>> vef;  // piece -> V, E(arc ends), F set handled below
  std::map<int, std::set<int>> piece_faces;
  for (int c = 0; c < d.n(); ++c) vef[dsu.find(c)][0]++;
  for (int e = 0; e < N; ++e) {
    vef[dsu.find(e / 4)][1]++;  // counts ends; arcs = ends/2
    piece_faces[dsu.find(e / 4)].insert(face_of[e]);
  }
  for (auto& [piece, counts] : vef) {
    int V = counts[0];
    int E = counts[1] / 2;
    int F = static_cast<int>(piece_faces[piece].size());
    if (V - E + F != 2)
      throw MapError("map is not planar: V-E+F = " +
                     std::to_string(V - E + F) + " on a connected piece");
  }
}

std::vector<std::vector<int>> faces(const PlanarDiagram& d) {
  int N = d.ends();
  std::vector<std::vector<int>> out;
  std::vector<bool> seen(N, false);
  for (int e = 0; e < N; ++e) {
    if (seen[e]) continue;
    out.emplace_back();
    int cur = e;
    while (!seen[cur]) {
      seen[cur] = true;
      out.back().push_back(cur);
      cur = next_ccw(d.mate[cur]);
    }
  }
  return out;
}

Components components(const PlanarDiagram& d) {
  Components comps;
  int N = d.ends();
  comps.component_of_end.assign(N, -1);
  std::vector<int> orbit_of(N, -1);
  std::vector<int> orbit_rep;
  for (int e = 0; e < N; ++e) {
    if (orbit_of[e] != -1) continue;
    int id = static_cast<int>(orbit_rep.size());
    orbit_rep.push_back(e);
    int cur = e;
    while (orbit_of[cur] == -1) {
      orbit_of[cur] = id;
      cur = d.mate[PlanarDiagram::through(cur)];
    }
  }
  // The two directions of one component are paired: the reverse orbit of e
  // contains through(e).
  std::vector<int> comp_of_orbit(orbit_rep.size(), -1);
  int ncomp = 0;
  for (size_t o = 0; o < orbit_rep.size(); ++o) {
    if (comp_of_orbit[o] != -1) continue;
    int rev = orbit_of[PlanarDiagram::through(orbit_rep[o])];
    comp_of_orbit[o] = ncomp;
    comp_of_orbit[rev] = ncomp;
    comps.representative_end.push_back(orbit_rep[o]);
    ++ncomp;
  }
  for (int e = 0; e < N; ++e) comps.component_of_end[e] = comp_of_orbit[orbit_of[e]];
  comps.crossing_ids.assign(ncomp, {});
  for (int e = 0; e < N; ++e) {
    auto& v = comps.crossing_ids[comps.component_of_end[e]];
    if (v.empty() || v.back() != e / 4) v.push_back(e / 4);
  }
  for (auto& v : comps.crossing_ids) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  comps.graph_components = 0;
  if (d.n() > 0) {
    DSU dsu(d.n());
    for (int e = 0; e < N; ++e) dsu.unite(e / 4, d.mate[e] / 4);
    std::set<int> roots;
    for (int c = 0; c < d.n(); ++c) roots.insert(dsu.find(c));
    comps.graph_components = static_cast<int>(roots.size());
  }
  for (int l = 0; l < d.free_loops; ++l) {
    comps.crossing_ids.emplace_back();
    comps.representative_end.push_back(-1);
    ++ncomp;
  }
  comps.count = ncomp;
  return comps;
}

namespace {

// arrival ends of the oriented traversal of component k (direction from its
// representative orbit, reversed if flips[k])
std::vector<int> oriented_arrivals(const PlanarDiagram& d, const Components& comps,
                                   int k, const Flips& flips) {
  int rep = comps.representative_end[k];
  if (rep < 0) return {};
  bool flip = k < static_cast<int>(flips.size()) && flips[k];
  int start = flip ? PlanarDiagram::through(rep) : rep;
  std::vector<int> arr;
  int cur = start;
  do {
    arr.push_back(cur);
    cur = d.mate[PlanarDiagram::through(cur)];
  } while (cur != start);
  return arr;
}

}  // namespace

int crossing_sign(const PlanarDiagram& d, const Components& comps, int crossing,
                  const Flips& flips) {
  // Determine exit slots of the two passes under the chosen orientations.
  int exit_slot[2] = {-1, -1};  // indexed by slot parity of the pass entry
  for (int k = 0; k < comps.count; ++k) {
    if (comps.representative_end[k] < 0) continue;
    for (int e : oriented_arrivals(d, comps, k, flips)) {
      if (e / 4 != crossing) continue;
      int out = PlanarDiagram::through(e);
      exit_slot[out & 1] = out & 3;
    }
  }
  int over_parity = d.crossings[crossing].over_pair;
  int o_out = exit_slot[over_parity];
  int u_out = exit_slot[1 - over_parity];
  if (o_out < 0 || u_out < 0) throw MapError("crossing not fully traversed");
  return ((o_out + 1) & 3) == u_out ? +1 : -1;
}

std::vector<std::vector<int>> linking_matrix(const PlanarDiagram& d,
                                             const Flips& flips) {
  Components comps = components(d);
  int n = comps.count;
  std::vector<std::vector<int>> sum(n, std::vector<int>(n, 0));
  for (int c = 0; c < d.n(); ++c) {
    int sgn = crossing_sign(d, comps, c, flips);
    // the two passes' components
    int over_parity = d.crossings[c].over_pair;
    int comp_over = comps.component_of_end[4 * c + over_parity];
    int comp_under = comps.component_of_end[4 * c + 1 - over_parity];
    sum[comp_over][comp_under] += sgn;
    if (comp_over != comp_under) sum[comp_under][comp_over] += sgn;
  }
  // off-diagonal: half the signed count; diagonal: full writhe of the component
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) sum[i][j] /= 2;
  return sum;
}

int writhe(const PlanarDiagram& d, const Flips& flips) {
  Components comps = components(d);
  int w = 0;
  for (int c = 0; c < d.n(); ++c) w += crossing_sign(d, comps, c, flips);
  return w;
}

LaurentPoly kauffman_bracket(const PlanarDiagram& d, int cap) {
  int n = d.n();
  if (n > cap)
    throw CapExceeded("state sum needs 2^" + std::to_string(n) +
                      " states, cap is 2^" + std::to_string(cap));
  LaurentPoly delta = LaurentPoly::monomial(-1, 2) + LaurentPoly::monomial(-1, -2);
  if (n == 0) {
    LaurentPoly r = LaurentPoly::one();
    for (int l = 1; l < d.free_loops; ++l) r = r * delta;
    return r;  // empty diagram: 1 by convention
  }
  // Precompute delta powers up to n + free_loops.
  std::vector<LaurentPoly> dpow(n + d.free_loops + 2);
  dpow[0] = LaurentPoly::one();
  for (size_t i = 1; i < dpow.size(); ++i) dpow[i] = dpow[i - 1] * delta;

  int N = d.ends();
  std::vector<int> parent(N);
  LaurentPoly total;
  for (uint64_t state = 0; state < (uint64_t(1) << n); ++state) {
    for (int e = 0; e < N; ++e) parent[e] = e;
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    auto unite = [&](int a, int b) {
      a = find(a);
      b = find(b);
      if (a != b) parent[a] = b;
    };
    int exp = 0;
    for (int c = 0; c < n; ++c) {
      bool a_smoothing = (state >> c) & 1;
      exp += a_smoothing ? 1 : -1;
      int o = d.crossings[c].over_pair;
      // A-smoothing merges the regions swept by turning the over strand CCW:
      // joins (o, o+3) and (o+2, o+1); B joins (o, o+1), (o+2, o+3)
      int s0 = 4 * c + o, s1 = 4 * c + ((o + 1) & 3), s2 = 4 * c + ((o + 2) & 3),
          s3 = 4 * c + ((o + 3) & 3);
      if (a_smoothing) {
        unite(s0, s3);
        unite(s2, s1);
      } else {
        unite(s0, s1);
        unite(s2, s3);
      }
    }
    for (int e = 0; e < N; ++e) unite(e, d.mate[e]);
    int loops = 0;
    for (int e = 0; e < N; ++e)
      if (find(e) == e) ++loops;
    loops += d.free_loops;
    total += LaurentPoly::monomial(1, exp) * dpow[loops - 1];
  }
  return total;
}

LaurentPoly jones(const PlanarDiagram& d, int cap, const Flips& flips) {
  LaurentPoly br = kauffman_bracket(d, cap);
  int w = d.n() > 0 ? writhe(d, flips) : 0;
  // (-A)^{-3w} = (-1)^{w} A^{-3w}
  LaurentPoly factor = LaurentPoly::monomial((w % 2 == 0) ? 1 : -1, -3 * w);
  return factor * br;
}

SplitReport split_diagram_check(const PlanarDiagram& d) {
  SplitReport rep;
  Components comps = components(d);
  rep.part_of_component.assign(comps.count, -1);
  if (d.n() > 0) {
    DSU dsu(d.n());
    for (int e = 0; e < d.ends(); ++e) dsu.unite(e / 4, d.mate[e] / 4);
    std::map<int, int> part_id;
    for (int k = 0; k < comps.count; ++k) {
      if (comps.representative_end[k] < 0) continue;
      int root = dsu.find(comps.representative_end[k] / 4);
      auto [it, fresh] = part_id.emplace(root, static_cast<int>(part_id.size()));
      rep.part_of_component[k] = it->second;
    }
    int next = static_cast<int>(part_id.size());
    for (int k = 0; k < comps.count; ++k)
      if (rep.part_of_component[k] < 0) rep.part_of_component[k] = next++;
    rep.split_at_diagram_level = next > 1;
  } else {
    for (int k = 0; k < comps.count; ++k) rep.part_of_component[k] = k;
    rep.split_at_diagram_level = comps.count > 1;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Canonical code

namespace {

// Token sequence for the traversal starting at end e0; crossing labels are
// assigned on first visit using (and extending) `labels`.
std::string traversal_code(const PlanarDiagram& d, int e0,
                           std::map<int, int>& labels,
                           std::map<int, int>& first_slot) {
  std::ostringstream os;
  int cur = e0;
  do {
    int c = cur / 4, s = cur & 3;
    auto [it, fresh] = labels.emplace(c, static_cast<int>(labels.size()));
    os << it->second;
    os << (((s & 1) == d.crossings[c].over_pair) ? 'o' : 'u');
    if (fresh) {
      first_slot[c] = s;
      os << 'f';
    } else {
      int dslot = (s - first_slot[c]) & 3;
      os << dslot;  // 1, 2, or 3
    }
    os << ';';
    cur = d.mate[PlanarDiagram::through(cur)];
  } while (cur != e0);
  return os.str();
}

}  // namespace

std::string canonical_code(const PlanarDiagram& d) {
  Components comps = components(d);
  int N = d.ends();
  std::string best;
  bool have_best = false;
  // choose the global start minimizing the whole code, greedily per component
  std::vector<int> starts_all;
  for (int e = 0; e < N; ++e) starts_all.push_back(e);
  if (d.n() == 0) {
    return "loops=" + std::to_string(d.free_loops);
  }
  for (int e0 : starts_all) {
    std::map<int, int> labels;
    std::map<int, int> first_slot;
    std::string code = traversal_code(d, e0, labels, first_slot);
    std::set<int> done_comps{comps.component_of_end[e0]};
    // remaining components: greedy minimal continuation
    while (static_cast<int>(done_comps.size()) <
           comps.count - d.free_loops) {
      std::string bestc;
      int beste = -1;
      for (int e = 0; e < N; ++e) {
        if (done_comps.count(comps.component_of_end[e])) continue;
        auto labels_copy = labels;
        auto fs_copy = first_slot;
        std::string c = traversal_code(d, e, labels_copy, fs_copy);
        if (beste < 0 || c < bestc) {
          bestc = c;
          beste = e;
        }
      }
      code += "|" + traversal_code(d, beste, labels, first_slot);
      done_comps.insert(comps.component_of_end[beste]);
    }
    if (!have_best || code < best) {
      best = code;
      have_best = true;
    }
  }
  return best + "|loops=" + std::to_string(d.free_loops);
}

// ---------------------------------------------------------------------------
// PD / DT codes

namespace {

// edge number per arc (mate pair), numbered along oriented components
std::map<int, int> number_edges(const PlanarDiagram& d, const Components& comps,
                                std::vector<int>* arrivals_out) {
  std::map<int, int> edge_no;  // min(end, mate[end]) -> number
  int next = 1;
  // walk each component, numbering the departed arc at each step
  for (int k = 0; k < comps.count; ++k) {
    int rep = comps.representative_end[k];
    if (rep < 0) continue;
    int cur = rep;
    do {
      int exit_end = PlanarDiagram::through(cur);
      int key = std::min(exit_end, d.mate[exit_end]);
      edge_no[key] = next++;
      if (arrivals_out) arrivals_out->push_back(cur);
      cur = d.mate[exit_end];
    } while (cur != rep);
  }
  return edge_no;
}

int edge_at(const PlanarDiagram& d, const std::map<int, int>& edge_no, int end) {
  return edge_no.at(std::min(end, d.mate[end]));
}

}  // namespace

std::string export_pd(const PlanarDiagram& d) {
  Components comps = components(d);
  std::vector<int> arrivals;
  auto edge_no = number_edges(d, comps, &arrivals);
  // incoming under end per crossing
  std::vector<int> under_in(d.n(), -1);
  for (int e : arrivals) {
    int c = e / 4, s = e & 3;
    if ((s & 1) != d.crossings[c].over_pair) under_in[c] = e;
  }
  std::ostringstream os;
  os << "PD[loops=" << d.free_loops << "]";
  for (int c = 0; c < d.n(); ++c) {
    if (under_in[c] < 0) throw MapError("crossing without under arrival");
    int s0 = under_in[c] & 3;
    os << " X[";
    for (int k = 0; k < 4; ++k) {
      if (k) os << ",";
      os << edge_at(d, edge_no, 4 * c + ((s0 + k) & 3));
    }
    os << "]";
  }
  return os.str();
}

PlanarDiagram import_pd(const std::string& text) {
  PlanarDiagram d;
  std::istringstream is(text);
  std::string tok;
  std::vector<std::array<int, 4>> tuples;
  if (!(is >> tok) || tok.rfind("PD[loops=", 0) != 0)
    throw MapError("PD text must start with PD[loops=k]");
  {
    auto close = tok.find(']');
    if (close == std::string::npos) throw MapError("bad PD header");
    d.free_loops = std::stoi(tok.substr(9, close - 9));
  }
  while (is >> tok) {
    if (tok.rfind("X[", 0) != 0 || tok.back() != ']')
      throw MapError("bad PD tuple: " + tok);
    std::array<int, 4> t{};
    std::string body = tok.substr(2, tok.size() - 3);
    std::istringstream bs(body);
    std::string num;
    int idx = 0;
    while (std::getline(bs, num, ',')) {
      if (idx >= 4) throw MapError("PD tuple with more than 4 entries");
      t[idx++] = std::stoi(num);
    }
    if (idx != 4) throw MapError("PD tuple with fewer than 4 entries");
    tuples.push_back(t);
  }
  d.crossings.assign(tuples.size(), PlanarDiagram::Crossing{1, {}});
  d.mate.assign(4 * tuples.size(), -1);
  std::map<int, std::vector<int>> edge_ends;
  for (size_t c = 0; c < tuples.size(); ++c)
    for (int s = 0; s < 4; ++s) edge_ends[tuples[c][s]].push_back(4 * c + s);
  for (auto& [edge, ends] : edge_ends) {
    if (ends.size() != 2)
      throw MapError("edge " + std::to_string(edge) + " appears " +
                     std::to_string(ends.size()) + " times");
    d.mate[ends[0]] = ends[1];
    d.mate[ends[1]] = ends[0];
  }
  validate_map(d);
  return d;
}

std::string export_dt(const PlanarDiagram& d) {
  Components comps = components(d);
  int real_comps = 0;
  for (int k = 0; k < comps.count; ++k)
    if (comps.representative_end[k] >= 0) ++real_comps;
  if (real_comps != 1 || d.free_loops != 0)
    throw MapError("DT export is defined for knots only");
  int rep = comps.representative_end[0];
  std::vector<std::pair<int, int>> visits(d.n(), {0, 0});  // odd, signed even
  int cur = rep, t = 1;
  do {
    int c = cur / 4, s = cur & 3;
    bool over = (s & 1) == d.crossings[c].over_pair;
    if (t % 2 == 1) {
      visits[c].first = t;
    } else {
      visits[c].second = over ? -t : t;
    }
    cur = d.mate[PlanarDiagram::through(cur)];
    ++t;
  } while (cur != rep);
  std::sort(visits.begin(), visits.end());
  std::ostringstream os;
  os << "DT:";
  for (auto& [o, e] : visits) os << " " << e;
  return os.str();
}

// ---------------------------------------------------------------------------
// Planar rewrites

PlanarDiagram simplify(const PlanarDiagram& d) {
  PlanarDiagram cur = d;
  bool changed = true;
  while (changed && cur.n() > 0) {
    changed = false;
    for (int c = 0; c < cur.n() && !changed; ++c) {
      if (auto r = r1_remove(cur, c)) {
        cur = *r;
        changed = true;
      }
    }
    if (changed) continue;
    for (int c1 = 0; c1 < cur.n() && !changed; ++c1)
      for (int c2 = c1 + 1; c2 < cur.n() && !changed; ++c2)
        if (auto r = r2_remove(cur, c1, c2)) {
          cur = *r;
          changed = true;
        }
  }
  return cur;
}

PlanarDiagram r1_add(const PlanarDiagram& d, int end, bool positive_kink) {
  PlanarDiagram r = d;
  int m = d.mate[end];
  int k = r.n();
  r.crossings.push_back({positive_kink ? 0 : 1, {}});
  r.mate.resize(4 * (k + 1));
  r.mate[end] = 4 * k + 3;
  r.mate[4 * k + 3] = end;
  r.mate[4 * k + 1] = 4 * k + 2;
  r.mate[4 * k + 2] = 4 * k + 1;
  r.mate[4 * k + 0] = m;
  r.mate[m] = 4 * k + 0;
  return r;
}

namespace {

// Remove crossing `c` reconnecting its slots by the two pairs given; fixes up
// arcs that chain through the removed slots and counts collapsed circles.
PlanarDiagram splice_out(const PlanarDiagram& d, int c,
                         std::array<std::array<int, 2>, 2> pairs) {
  int base = 4 * c;
  // successor map through the removed crossing
  std::map<int, int> jump;
  for (auto& pr : pairs) {
    jump[base + pr[0]] = base + pr[1];
    jump[base + pr[1]] = base + pr[0];
  }
  PlanarDiagram r;
  r.free_loops = d.free_loops;
  r.crossings = d.crossings;
  r.crossings.erase(r.crossings.begin() + c);
  auto newend = [&](int e) {
    int cc = e / 4, s = e & 3;
    return 4 * (cc > c ? cc - 1 : cc) + s;
  };
  r.mate.assign(4 * r.n(), -1);
  for (int e = 0; e < d.ends(); ++e) {
    if (e / 4 == c) continue;
    if (r.mate[newend(e)] != -1) continue;
    // follow the arc from e, skipping through the removed crossing
    int cur = d.mate[e];
    while (cur / 4 == c) cur = d.mate[jump[cur]];
    r.mate[newend(e)] = newend(cur);
    r.mate[newend(cur)] = newend(e);
  }
  // closed circles entirely through the removed crossing
  std::set<int> used;
  for (int s = 0; s < 4; ++s) {
    int e = base + s;
    if (used.count(e)) continue;
    // walk: e -> mate -> if in removed crossing, jump, repeat
    int cur = e;
    bool circle = true;
    std::vector<int> path;
    do {
      path.push_back(cur);
      int m = d.mate[cur];
      if (m / 4 != c) {
        circle = false;
        break;
      }
      path.push_back(m);
      cur = jump[m];
    } while (cur != e);
    if (circle) {
      for (int x : path) used.insert(x);
      r.free_loops++;
    }
  }
  return r;
}

}  // namespace

std::optional<PlanarDiagram> r1_remove(const PlanarDiagram& d, int crossing) {
  int base = 4 * crossing;
  for (int s = 0; s < 4; ++s) {
    int a = base + s, b = base + ((s + 1) & 3);
    if (d.mate[a] == b) {
      // kink loop joins adjacent slots; erase the crossing, the strand
      // continues through its two passes
      auto r = splice_out(d, crossing, {{{0, 2}, {1, 3}}});
      validate_map(r);
      return r;
    }
  }
  return std::nullopt;
}

std::optional<PlanarDiagram> r2_add(const PlanarDiagram& d, int end_a, int end_b) {
  if (end_a == end_b || d.mate[end_a] == end_b) return std::nullopt;
  // the two arcs must share a face
  auto fs = faces(d);
  bool share = false;
  for (auto& f : fs) {
    bool ha = false, hb = false;
    for (int e : f) {
      if (e == end_a || e == d.mate[end_a]) ha = true;
      if (e == end_b || e == d.mate[end_b]) hb = true;
    }
    if (ha && hb) share = true;
  }
  if (!share) return std::nullopt;
  for (int attempt = 0; attempt < 2; ++attempt) {
    PlanarDiagram r = d;
    int a0 = end_a, a1 = d.mate[end_a];
    int b0 = attempt == 0 ? end_b : d.mate[end_b];
    int b1 = d.mate[b0];
    int c1 = r.n(), c2 = c1 + 1;
    r.crossings.push_back({0, {}});
    r.crossings.push_back({0, {}});
    r.mate.resize(4 * (c2 + 1), -1);
    auto link = [&](int x, int y) {
      r.mate[x] = y;
      r.mate[y] = x;
    };
    link(a0, 4 * c1 + 2);
    link(4 * c1 + 0, 4 * c2 + 2);
    link(4 * c2 + 0, a1);
    link(b0, 4 * c1 + 3);
    link(4 * c1 + 1, 4 * c2 + 1);
    link(4 * c2 + 3, b1);
    try {
      validate_map(r);
      return r;
    } catch (const MapError&) {
      continue;
    }
  }
  return std::nullopt;
}

std::optional<PlanarDiagram> r2_remove(const PlanarDiagram& d, int c1, int c2) {
  if (c1 == c2) return std::nullopt;
  // find a bigon face with exactly the two crossings and opposite over parity
  for (auto& f : faces(d)) {
    if (f.size() != 2) continue;
    int x = f[0] / 4, y = f[1] / 4;
    if (!((x == c1 && y == c2) || (x == c2 && y == c1))) continue;
    // one strand must be over at both crossings: the two arcs of the bigon
    // belong to the two strands; check over parity
    int e0 = f[0], e1 = f[1];
    bool over0 = ((e0 & 3) & 1) == d.crossings[e0 / 4].over_pair;
    bool over1 = ((e1 & 3) & 1) == d.crossings[e1 / 4].over_pair;
    if (over0 == over1) continue;  // need one strand over, the other under
    // smooth both crossings along their strands
    int hi = std::max(c1, c2), lo = std::min(c1, c2);
    auto r1p = splice_out(d, hi, {{{0, 2}, {1, 3}}});
    // wait: smoothing along the strand joins each pass's two slots
    try {
      auto r2p = splice_out(r1p, lo, {{{0, 2}, {1, 3}}});
      validate_map(r2p);
      return r2p;
    } catch (const MapError&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<PlanarDiagram> r3(const PlanarDiagram& d, int c1, int c2, int c3) {
  // find a triangular face on exactly these crossings
  for (auto& f : faces(d)) {
    if (f.size() != 3) continue;
    std::set<int> cs{f[0] / 4, f[1] / 4, f[2] / 4};
    if (cs != std::set<int>{c1, c2, c3}) continue;
    // face ends f[i]; arcs (f[i], mate[f[i]]); try each side as the slider
    for (int side = 0; side < 3; ++side) {
      int fa = f[side];
      int ga = d.mate[fa];
      // slider strand passes crossings A = fa/4 and B = ga/4 at slots fa, ga
      int A = fa / 4, B = ga / 4;
      bool overA = ((fa & 3) & 1) == d.crossings[A].over_pair;
      bool overB = ((ga & 3) & 1) == d.crossings[B].over_pair;
      if (overA != overB) continue;
      int C = c1 + c2 + c3 - A - B;
      if (A == B || A == C || B == C) continue;
      // the other two triangle sides are the arcs A<->C and B<->C
      int sAC = -1, sBC = -1;
      for (int sd = 0; sd < 3; ++sd) {
        if (sd == side) continue;
        int u = f[sd], v = d.mate[f[sd]];
        std::set<int> pairc{u / 4, v / 4};
        if (pairc == std::set<int>{A, C}) sAC = sd;
        if (pairc == std::set<int>{B, C}) sBC = sd;
      }
      if (sAC < 0 || sBC < 0) continue;
      int acA = f[sAC] / 4 == A ? f[sAC] : d.mate[f[sAC]];  // AC-arc end at A
      int acC = d.mate[acA];
      int bcB = f[sBC] / 4 == B ? f[sBC] : d.mate[f[sBC]];
      int bcC = d.mate[bcB];
      // outer ends (same strand, opposite slot)
      int A_ca_out = PlanarDiagram::through(acA);
      int C_ca_out = PlanarDiagram::through(acC);
      int B_bc_out = PlanarDiagram::through(bcB);
      int C_bc_out = PlanarDiagram::through(bcC);
      int M1 = d.mate[A_ca_out], M2 = d.mate[C_ca_out];
      int M3 = d.mate[B_bc_out], M4 = d.mate[C_bc_out];
      std::set<int> touched{acA, acC, bcB, bcC, A_ca_out, C_ca_out,
                            B_bc_out, C_bc_out, fa, ga};
      if (touched.count(M1) || touched.count(M2) || touched.count(M3) ||
          touched.count(M4))
        continue;  // degenerate small configuration
      PlanarDiagram r = d;
      auto link = [&](int x, int y) {
        r.mate[x] = y;
        r.mate[y] = x;
      };
      link(A_ca_out, C_ca_out);
      link(B_bc_out, C_bc_out);
      link(acA, M1);
      link(acC, M2);
      link(bcB, M3);
      link(bcC, M4);
      try {
        validate_map(r);
        return r;
      } catch (const MapError&) {
        continue;
      }
    }
  }
  return std::nullopt;
}

}  // namespace quatlink::pd
