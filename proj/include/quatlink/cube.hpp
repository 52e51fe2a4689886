#pragma once

#include <array>
#include <string>

#include "quatlink/q8.hpp"

namespace quatlink::cube {

// The fundamental-domain cube is [0,1]^3 with coordinates (a, b, c):
//   a = depth along the projection axis (viewer at a = +inf),
//   b = diagram x, c = diagram y.
// Face pairs are glued by quarter turns; the maps below are pinned so that
// every cube-edge loop closes after three face crossings with letter product
// +1 (see the edge-cycle test), i.e. they genuinely present the manifold.
//
// Exit letters (recorded by component tracing, multiplied in traversal order;
// coset bookkeeping is by right multiplication):
//   exit a=1 (upper face)  -> +i     exit a=0 -> -i
//   exit c=1 (top edge)    -> +j     exit c=0 -> -j
//   exit b=1 (right edge)  -> +k     exit b=0 -> -k

enum class Face : uint8_t { Zp = 0, Zn, Yp, Yn, Xp, Xn };
// Zp: a=1, Zn: a=0, Yp: c=1 (top), Yn: c=0 (bottom), Xp: b=1 (right), Xn: b=0 (left)

struct Vec3 {
  double a, b, c;
};

Face opposite(Face f);
q8::QElem exit_letter(Face f);
std::string to_string(Face f);

// Point map of the gluing: a point on face `f` (given by full 3D coordinates
// with the face coordinate at its wall value) maps to its identified point on
// the opposite face.
Vec3 glue(Face f, const Vec3& p);

// Face containing a boundary 3D point (exact coordinate match to 0/1), or
// throws if the point is not on a face.
Face face_of(const Vec3& p, double eps);

}  // namespace quatlink::cube
