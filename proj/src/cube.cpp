#include "quatlink/cube.hpp"

#include <cmath>
#include <stdexcept>

namespace quatlink::cube {

Face opposite(Face f) {
  switch (f) {
    case Face::Zp: return Face::Zn;
    case Face::Zn: return Face::Zp;
    case Face::Yp: return Face::Yn;
    case Face::Yn: return Face::Yp;
    case Face::Xp: return Face::Xn;
    case Face::Xn: return Face::Xp;
  }
  throw std::logic_error("bad Face");
}

q8::QElem exit_letter(Face f) {
  using E = q8::QElem;
  switch (f) {
    case Face::Zp: return E::I;
    case Face::Zn: return E::MinusI;
    case Face::Yp: return E::J;
    case Face::Yn: return E::MinusJ;
    case Face::Xp: return E::K;
    case Face::Xn: return E::MinusK;
  }
  throw std::logic_error("bad Face");
}

std::string to_string(Face f) {
  static const char* names[6] = {"a+", "a-", "top", "bottom", "right", "left"};
  return names[static_cast<int>(f)];
}

Vec3 glue(Face f, const Vec3& p) {
  switch (f) {
    case Face::Zp:  // (1,b,c) -> (0, 1-c, b)
      return {0.0, 1.0 - p.c, p.b};
    case Face::Zn:  // (0,b,c) -> (1, c, 1-b)
      return {1.0, p.c, 1.0 - p.b};
    case Face::Yp:  // (a,b,1) -> (1-b, a, 0)
      return {1.0 - p.b, p.a, 0.0};
    case Face::Yn:  // (a,b,0) -> (b, 1-a, 1)
      return {p.b, 1.0 - p.a, 1.0};
    case Face::Xp:  // (a,1,c) -> (c, 0, 1-a)
      return {p.c, 0.0, 1.0 - p.a};
    case Face::Xn:  // (a,0,c) -> (1-c, 1, a)
      return {1.0 - p.c, 1.0, p.a};
  }
  throw std::logic_error("bad Face");
}

Face face_of(const Vec3& p, double eps) {
  if (std::abs(p.a - 1.0) <= eps) return Face::Zp;
  if (std::abs(p.a) <= eps) return Face::Zn;
  if (std::abs(p.c - 1.0) <= eps) return Face::Yp;
  if (std::abs(p.c) <= eps) return Face::Yn;
  if (std::abs(p.b - 1.0) <= eps) return Face::Xp;
  if (std::abs(p.b) <= eps) return Face::Xn;
  throw std::invalid_argument("point is not on a cube face");
}

}  // namespace quatlink::cube
