#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace quatlink::q8 {

// Elements of the quaternion group, in the fixed total order used for
// canonical coset representatives: +1 < -1 < +i < -i < +j < -j < +k < -k.
enum class QElem : uint8_t {
  One = 0,
  MinusOne = 1,
  I = 2,
  MinusI = 3,
  J = 4,
  MinusJ = 5,
  K = 6,
  MinusK = 7,
};

constexpr int kOrder = 8;

QElem mul(QElem a, QElem b);
QElem inverse(QElem a);
QElem neg(QElem a);
int element_order(QElem a);
QElem pow(QElem a, int n);

std::string to_string(QElem a);
bool parse_qelem(const std::string& s, QElem& out);

enum class SubgroupTag : uint8_t { Trivial = 0, Center, Hi, Hj, Hk, Full };

struct QSubgroup {
  SubgroupTag tag;
  std::vector<QElem> elements;  // sorted by the fixed total order
  bool contains(QElem g) const;
  int order() const { return static_cast<int>(elements.size()); }
};

const QSubgroup& subgroup(SubgroupTag tag);
const std::array<QSubgroup, 6>& all_subgroups();
std::string to_string(SubgroupTag tag);

enum class ConjTag : uint8_t { C1 = 0, Cm1, Ci, Cj, Ck };

struct ConjClass {
  ConjTag tag;
  QElem representative;
};

ConjClass conj_class(QElem g);
std::string to_string(ConjTag tag);

// Number of orbits of right multiplication by g on the coset space H\Q8.
// Equals the number of components of the preimage, in the cover for H, of a
// knot with free homotopy class [g].
int lift_component_count(QElem g, const QSubgroup& h);

struct ComponentDegree {
  int orbit_size;       // covering degree of each lifted component
  QElem power;          // g^orbit_size, an element of H
  ConjClass power_class;
};

ComponentDegree component_degree(QElem g, const QSubgroup& h);

// For g in one of Hi/Hj/Hk (cyclic of order 4 generated by the axis element),
// the exponent m with g = axis^m, as an element of Z/4.
int zmod4_exponent(QElem g, SubgroupTag axis_subgroup);

// The six outer automorphism class representatives, as images of (i, j, k).
struct OutAutomorphism {
  std::array<QElem, 3> images;  // images of +i, +j, +k
  QElem apply(QElem g) const;
  ConjClass apply_class(ConjTag c) const;
};

const std::array<OutAutomorphism, 6>& out_q8_reps();

}  // namespace quatlink::q8
