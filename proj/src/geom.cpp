#include "quatlink/geom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace quatlink::geom {

double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
double dist(Vec2 a, Vec2 b) { return norm(a - b); }

Vec2 rot90_square(Vec2 p) {
  // (x,y) -> (1-y, x): ccw quarter turn about (1/2, 1/2)
  return {1.0 - p.y, p.x};
}

std::optional<SegHit> segment_intersect(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1,
                                        double eps) {
  Vec2 da = a1 - a0, db = b1 - b0;
  double den = cross(da, db);
  double la = norm(da), lb = norm(db);
  if (la <= 0 || lb <= 0) return std::nullopt;
  if (std::abs(den) <= eps * la * lb) return std::nullopt;  // near parallel
  Vec2 d = b0 - a0;
  double t0 = cross(d, db) / den;
  double t1 = cross(d, da) / den;
  double m0 = eps / la, m1 = eps / lb;
  if (t0 <= m0 || t0 >= 1 - m0 || t1 <= m1 || t1 >= 1 - m1) return std::nullopt;
  return SegHit{t0, t1, a0 + da * t0};
}

double point_segment_dist(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 d = b - a;
  double l2 = dot(d, d);
  if (l2 == 0) return dist(p, a);
  double t = std::clamp(dot(p - a, d) / l2, 0.0, 1.0);
  return dist(p, a + d * t);
}

double Polyline::length() const {
  double L = 0;
  for (size_t i = 1; i < pts.size(); ++i) L += dist(pts[i - 1], pts[i]);
  return L;
}

Vec2 Polyline::at(double t) const {
  if (pts.empty()) throw std::logic_error("empty polyline");
  if (pts.size() == 1) return pts[0];
  double L = length();
  double want = std::clamp(t, 0.0, 1.0) * L;
  double acc = 0;
  for (size_t i = 1; i < pts.size(); ++i) {
    double seg = dist(pts[i - 1], pts[i]);
    if (acc + seg >= want || i + 1 == pts.size()) {
      double u = seg > 0 ? (want - acc) / seg : 0.0;
      return pts[i - 1] + (pts[i] - pts[i - 1]) * u;
    }
    acc += seg;
  }
  return pts.back();
}

std::vector<PolyHit> polyline_intersections(const Polyline& p, const Polyline& q,
                                            double eps, bool same_curve) {
  std::vector<PolyHit> hits;
  double Lp = p.length(), Lq = q.length();
  if (Lp <= 0 || Lq <= 0) return hits;

  // cumulative arclength at each vertex
  auto cumulate = [](const Polyline& pl) {
    std::vector<double> acc(pl.pts.size(), 0.0);
    for (size_t i = 1; i < pl.pts.size(); ++i)
      acc[i] = acc[i - 1] + dist(pl.pts[i - 1], pl.pts[i]);
    return acc;
  };
  auto accp = cumulate(p), accq = cumulate(q);

  // uniform grid over q's segments
  double minx = 1e18, miny = 1e18, maxx = -1e18, maxy = -1e18;
  for (auto& v : q.pts) {
    minx = std::min(minx, v.x);
    maxx = std::max(maxx, v.x);
    miny = std::min(miny, v.y);
    maxy = std::max(maxy, v.y);
  }
  int nseg_q = static_cast<int>(q.pts.size()) - 1;
  int gridn = std::max(1, std::min(256, static_cast<int>(std::sqrt(nseg_q)) * 2));
  double w = std::max(maxx - minx, 1e-12), h = std::max(maxy - miny, 1e-12);
  auto cell_of = [&](double x, double y) {
    int cx = std::clamp(static_cast<int>((x - minx) / w * gridn), 0, gridn - 1);
    int cy = std::clamp(static_cast<int>((y - miny) / h * gridn), 0, gridn - 1);
    return std::make_pair(cx, cy);
  };
  std::vector<std::vector<int>> buckets(gridn * gridn);
  for (int j = 1; j <= nseg_q; ++j) {
    auto [x0, y0] = cell_of(std::min(q.pts[j - 1].x, q.pts[j].x),
                            std::min(q.pts[j - 1].y, q.pts[j].y));
    auto [x1, y1] = cell_of(std::max(q.pts[j - 1].x, q.pts[j].x),
                            std::max(q.pts[j - 1].y, q.pts[j].y));
    for (int cx = x0; cx <= x1; ++cx)
      for (int cy = y0; cy <= y1; ++cy) buckets[cx * gridn + cy].push_back(j);
  }

  std::vector<int> cand;
  std::vector<char> seen(nseg_q + 1, 0);
  for (size_t i = 1; i < p.pts.size(); ++i) {
    double segp = accp[i] - accp[i - 1];
    cand.clear();
    auto [x0, y0] = cell_of(std::min(p.pts[i - 1].x, p.pts[i].x),
                            std::min(p.pts[i - 1].y, p.pts[i].y));
    auto [x1, y1] = cell_of(std::max(p.pts[i - 1].x, p.pts[i].x),
                            std::max(p.pts[i - 1].y, p.pts[i].y));
    for (int cx = x0; cx <= x1; ++cx)
      for (int cy = y0; cy <= y1; ++cy)
        for (int j : buckets[cx * gridn + cy])
          if (!seen[j]) {
            seen[j] = 1;
            cand.push_back(j);
          }
    for (int j : cand) seen[j] = 0;
    std::sort(cand.begin(), cand.end());
    for (int j : cand) {
      // for self-intersections, report each pair once and skip adjacency
      if (same_curve && j <= static_cast<int>(i) + 1) continue;
      auto hit = segment_intersect(p.pts[i - 1], p.pts[i], q.pts[j - 1],
                                   q.pts[j], eps);
      if (hit) {
        double segq = accq[j] - accq[j - 1];
        hits.push_back({(accp[i - 1] + hit->t0 * segp) / Lp,
                        (accq[j - 1] + hit->t1 * segq) / Lq, hit->point});
      }
    }
  }
  return hits;
}

}  // namespace quatlink::geom
