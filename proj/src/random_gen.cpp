#include "quatlink/random_gen.hpp"

#include <cmath>
#include <random>

#include "quatlink/lifting.hpp"

namespace quatlink::rgen {

using cube::Face;
using cube::Vec3;

ingest::PLLink random_link(uint64_t seed, int max_transitions) {
  std::mt19937_64 rng(seed);
  auto U = [&](double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    return u(rng);
  };
  auto pick_face = [&]() {
    return static_cast<Face>(rng() % 6);
  };
  ingest::PLLink l;
  int ncomp = 1 + static_cast<int>(rng() % 2);
  for (int c = 0; c < ncomp; ++c) {
    ingest::PLComponent comp;
    int ntrans = static_cast<int>(rng() % (max_transitions + 1));
    if (c > 0 && ntrans == 0 && rng() % 2) ntrans = 1;
    if (ntrans == 0) {
      // closed polygon inside the cube
      ingest::Leg leg;
      Vec3 center{U(0.25, 0.75), U(0.25, 0.75), U(0.25, 0.75)};
      int k = 4 + static_cast<int>(rng() % 3);
      double r = U(0.08, 0.2);
      for (int i = 0; i < k; ++i) {
        double th = 6.2831853 * i / k + U(-0.2, 0.2);
        Vec3 p{center.a + U(-0.05, 0.05), center.b + r * std::cos(th),
               center.c + r * std::sin(th)};
        p.a = std::clamp(p.a, 0.05, 0.95);
        p.b = std::clamp(p.b, 0.05, 0.95);
        p.c = std::clamp(p.c, 0.05, 0.95);
        leg.pts.push_back(p);
      }
      leg.pts.push_back(leg.pts.front());
      comp.legs.push_back(leg);
    } else {
      for (int t = 0; t < ntrans; ++t) {
        ingest::Leg leg;
        int nmid = 1 + static_cast<int>(rng() % 2);
        for (int v = 0; v < nmid; ++v)
          leg.pts.push_back({U(0.1, 0.9), U(0.1, 0.9), U(0.1, 0.9)});
        leg.exit = pick_face();
        Vec3 e{U(0.1, 0.9), U(0.1, 0.9), U(0.1, 0.9)};
        switch (*leg.exit) {
          case Face::Zp: e.a = 1; break;
          case Face::Zn: e.a = 0; break;
          case Face::Yp: e.c = 1; break;
          case Face::Yn: e.c = 0; break;
          case Face::Xp: e.b = 1; break;
          case Face::Xn: e.b = 0; break;
        }
        leg.exit_point = e;
        comp.legs.push_back(leg);
      }
    }
    l.components.push_back(comp);
  }
  return l;
}

sqd::SquareDiagram random_square_diagram(uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 64; ++attempt) {
    uint64_t s = rng();
    auto link = random_link(s);
    ingest::PLLink ready;
    try {
      ready = ingest::perturb(link, s ^ 0x9e3779b97f4a7c15ull, 5e-3, 8);
    } catch (const std::exception&) {
      continue;
    }
    auto axis = static_cast<ingest::Axis>(rng() % 3);
    sqd::SquareDiagram d;
    try {
      d = ingest::project(ready, axis, rng() % 2 == 0);
    } catch (const std::exception&) {
      continue;
    }
    if (!sqd::validate(d).ok()) continue;
    if (!lift::check_lift_preconditions(d).ok()) continue;
    return d;
  }
  throw std::runtime_error("random_square_diagram: no valid sample found");
}

}  // namespace quatlink::rgen
