#include "doctest.h"
#include "quatlink/cube.hpp"
#include "quatlink/q8.hpp"

using namespace quatlink;
using q8::QElem;

TEST_CASE("defining relations and identity") {
  CHECK(q8::mul(QElem::I, QElem::I) == QElem::MinusOne);
  CHECK(q8::mul(QElem::J, QElem::J) == QElem::MinusOne);
  CHECK(q8::mul(QElem::K, QElem::K) == QElem::MinusOne);
  // ijk = -1
  CHECK(q8::mul(q8::mul(QElem::I, QElem::J), QElem::K) == QElem::MinusOne);
  CHECK(q8::mul(QElem::I, QElem::J) == QElem::K);
  CHECK(q8::mul(QElem::J, QElem::I) == QElem::MinusK);
  for (int v = 0; v < 8; ++v) {
    QElem x = static_cast<QElem>(v);
    CHECK(q8::mul(QElem::One, x) == x);
    CHECK(q8::mul(x, QElem::One) == x);
    CHECK(q8::mul(x, q8::inverse(x)) == QElem::One);
    // -1 is central
    CHECK(q8::mul(QElem::MinusOne, x) == q8::mul(x, QElem::MinusOne));
  }
}

TEST_CASE("exhaustive associativity") {
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b)
      for (int c = 0; c < 8; ++c) {
        QElem ea = static_cast<QElem>(a), eb = static_cast<QElem>(b),
              ec = static_cast<QElem>(c);
        CHECK(q8::mul(q8::mul(ea, eb), ec) == q8::mul(ea, q8::mul(eb, ec)));
      }
}

TEST_CASE("subgroups and conjugacy classes") {
  CHECK(q8::all_subgroups().size() == 6);
  for (auto& h : q8::all_subgroups()) {
    // closed under product and normal (conjugation-closed)
    for (auto a : h.elements)
      for (auto b : h.elements) CHECK(h.contains(q8::mul(a, b)));
    for (auto a : h.elements)
      for (int g = 0; g < 8; ++g) {
        QElem eg = static_cast<QElem>(g);
        CHECK(h.contains(q8::mul(q8::mul(eg, a), q8::inverse(eg))));
      }
  }
  CHECK(q8::conj_class(QElem::MinusI).tag == q8::ConjTag::Ci);
  CHECK(q8::conj_class(QElem::One).tag == q8::ConjTag::C1);
  CHECK(q8::conj_class(QElem::MinusOne).tag == q8::ConjTag::Cm1);
  // classes closed under inversion and conjugation
  for (int g = 0; g < 8; ++g) {
    QElem eg = static_cast<QElem>(g);
    CHECK(q8::conj_class(eg).tag == q8::conj_class(q8::inverse(eg)).tag);
    for (int h = 0; h < 8; ++h) {
      QElem eh = static_cast<QElem>(h);
      CHECK(q8::conj_class(q8::mul(q8::mul(eh, eg), q8::inverse(eh))).tag ==
            q8::conj_class(eg).tag);
    }
  }
}

TEST_CASE("lift component counts reproduce the two-or-one rule") {
  using q8::SubgroupTag;
  auto& hi = q8::subgroup(SubgroupTag::Hi);
  auto& hj = q8::subgroup(SubgroupTag::Hj);
  auto& hk = q8::subgroup(SubgroupTag::Hk);
  // classes [1], [-1], [i] give two components in X_i; others give one
  CHECK(q8::lift_component_count(QElem::One, hi) == 2);
  CHECK(q8::lift_component_count(QElem::MinusOne, hi) == 2);
  CHECK(q8::lift_component_count(QElem::I, hi) == 2);
  CHECK(q8::lift_component_count(QElem::MinusI, hi) == 2);
  CHECK(q8::lift_component_count(QElem::J, hi) == 1);
  CHECK(q8::lift_component_count(QElem::K, hi) == 1);
  CHECK(q8::lift_component_count(QElem::J, hj) == 2);
  CHECK(q8::lift_component_count(QElem::K, hk) == 2);
  CHECK(q8::lift_component_count(QElem::I, hj) == 1);
  // (-1, Trivial) -> 4 orbits
  CHECK(q8::lift_component_count(QElem::MinusOne,
                                 q8::subgroup(SubgroupTag::Trivial)) == 4);
}

TEST_CASE("component degrees") {
  using q8::SubgroupTag;
  auto d1 = q8::component_degree(QElem::I, q8::subgroup(SubgroupTag::Trivial));
  CHECK(d1.orbit_size == 4);
  auto d2 = q8::component_degree(QElem::One, q8::subgroup(SubgroupTag::Hi));
  CHECK(d2.orbit_size == 1);
  auto d3 = q8::component_degree(QElem::MinusOne, q8::subgroup(SubgroupTag::Hi));
  CHECK(d3.orbit_size == 1);
  CHECK(d3.power == QElem::MinusOne);

  // count * degree = index, for every pair
  for (int g = 0; g < 8; ++g) {
    for (auto& h : q8::all_subgroups()) {
      QElem eg = static_cast<QElem>(g);
      int idx = 8 / h.order();
      CHECK(q8::lift_component_count(eg, h) *
                q8::component_degree(eg, h).orbit_size ==
            idx);
      // invariance under conjugation and inverse
      for (int x = 0; x < 8; ++x) {
        QElem ex = static_cast<QElem>(x);
        QElem conj = q8::mul(q8::mul(ex, eg), q8::inverse(ex));
        CHECK(q8::lift_component_count(conj, h) == q8::lift_component_count(eg, h));
      }
      CHECK(q8::lift_component_count(q8::inverse(eg), h) ==
            q8::lift_component_count(eg, h));
    }
  }
}

TEST_CASE("outer automorphism representatives") {
  auto& reps = q8::out_q8_reps();
  CHECK(reps.size() == 6);
  for (auto& r : reps) {
    // each extends to a group automorphism
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b) {
        QElem ea = static_cast<QElem>(a), eb = static_cast<QElem>(b);
        CHECK(r.apply(q8::mul(ea, eb)) == q8::mul(r.apply(ea), r.apply(eb)));
      }
  }
  // closure: composing two yields the class permutation of another in the list
  auto class_perm = [](const q8::OutAutomorphism& r) {
    return std::array<q8::ConjTag, 3>{r.apply_class(q8::ConjTag::Ci).tag,
                                      r.apply_class(q8::ConjTag::Cj).tag,
                                      r.apply_class(q8::ConjTag::Ck).tag};
  };
  for (auto& r1 : reps)
    for (auto& r2 : reps) {
      q8::OutAutomorphism comp{{r1.apply(r2.images[0]), r1.apply(r2.images[1]),
                                r1.apply(r2.images[2])}};
      bool found = false;
      for (auto& r3 : reps)
        if (class_perm(comp) == class_perm(r3)) found = true;
      CHECK(found);
    }
}

TEST_CASE("cube gluing: edge cycles close in three steps with trivial holonomy") {
  using cube::Face;
  using cube::Vec3;
  // For every cube edge, start on one adjacent face near the edge, repeatedly
  // glue through the face whose wall the walked point is near; after three
  // crossings the point must return and the letter product must be +1.
  struct EdgeProbe {
    Face f0;       // face we exit first
    Vec3 start;    // a point on f0 near the edge (in-face parameter 0.37)
  };
  const double u = 0.37, e = 1e-9;
  std::vector<EdgeProbe> probes = {
      // 4 edges of the a=1 face
      {Face::Zp, {1.0, u, 1.0 - e}},  // edge a=1,c=1
      {Face::Zp, {1.0, u, e}},        // edge a=1,c=0
      {Face::Zp, {1.0, 1.0 - e, u}},  // edge a=1,b=1
      {Face::Zp, {1.0, e, u}},        // edge a=1,b=0
      // 4 edges of the a=0 face
      {Face::Zn, {0.0, u, 1.0 - e}},
      {Face::Zn, {0.0, u, e}},
      {Face::Zn, {0.0, 1.0 - e, u}},
      {Face::Zn, {0.0, e, u}},
      // 4 vertical edges (b,c in {0,1}), probe from the c faces
      {Face::Yp, {u, 1.0 - e, 1.0}},
      {Face::Yp, {u, e, 1.0}},
      {Face::Yn, {u, 1.0 - e, 0.0}},
      {Face::Yn, {u, e, 0.0}},
  };
  for (auto& pr : probes) {
    Vec3 p = pr.start;
    Face f = pr.f0;
    QElem w = QElem::One;
    for (int step = 0; step < 3; ++step) {
      w = q8::mul(w, cube::exit_letter(f));
      p = cube::glue(f, p);
      if (step == 2) break;
      // find which other face the entered point is near (the next wall)
      Face entered = cube::opposite(f);
      Face next = entered;
      const double near = 1e-6;
      auto close0 = [&](double v) { return v < near; };
      auto close1 = [&](double v) { return v > 1 - near; };
      for (Face cand : {Face::Zp, Face::Zn, Face::Yp, Face::Yn, Face::Xp, Face::Xn}) {
        if (cand == entered) continue;
        bool on = false;
        switch (cand) {
          case Face::Zp: on = close1(p.a); break;
          case Face::Zn: on = close0(p.a); break;
          case Face::Yp: on = close1(p.c); break;
          case Face::Yn: on = close0(p.c); break;
          case Face::Xp: on = close1(p.b); break;
          case Face::Xn: on = close0(p.b); break;
        }
        if (on) next = cand;
      }
      REQUIRE(next != entered);
      f = next;
    }
    CHECK(w == QElem::One);
    // returned to the starting point (same in-face coordinates)
    CHECK(std::abs(p.a - pr.start.a) < 1e-6);
    CHECK(std::abs(p.b - pr.start.b) < 1e-6);
    CHECK(std::abs(p.c - pr.start.c) < 1e-6);
  }
}
