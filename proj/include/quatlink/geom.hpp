#pragma once

#include <optional>
#include <vector>

namespace quatlink::geom {

struct Vec2 {
  double x = 0, y = 0;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);
double dist(Vec2 a, Vec2 b);

// Counterclockwise quarter turn about the square center (1/2, 1/2).
Vec2 rot90_square(Vec2 p);

struct SegHit {
  double t0;  // parameter on segment 0, in (0,1)
  double t1;  // parameter on segment 1
  Vec2 point;
};

// Proper transversal interior intersection of two segments; near-parallel or
// endpoint touches return nullopt (callers treat those as degeneracies).
std::optional<SegHit> segment_intersect(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1,
                                        double eps);

// Distance from point p to segment [a, b].
double point_segment_dist(Vec2 p, Vec2 a, Vec2 b);

struct Polyline {
  std::vector<Vec2> pts;
  double length() const;
  Vec2 at(double t) const;  // t in [0,1] by arclength
};

// All pairwise interior intersections between two polylines.
struct PolyHit {
  double s;  // arclength parameter on first, in (0,1)
  double t;  // on second
  Vec2 point;
};
std::vector<PolyHit> polyline_intersections(const Polyline& p, const Polyline& q,
                                            double eps, bool same_curve);

}  // namespace quatlink::geom
