#include "quatlink/q8.hpp"

#include <stdexcept>

namespace quatlink::q8 {

namespace {

// Sign bit in the low position: element = base * sign, base in {1, i, j, k}.
// index = 2*base_index + (negative ? 1 : 0), base_index: 1->0, i->1, j->2, k->3.

struct TableInit {
  std::array<std::array<QElem, 8>, 8> mul;
  TableInit() {
    // Base products from i^2 = j^2 = k^2 = ijk = -1:
    // basis order: 1, i, j, k. product[a][b] = (sign, base)
    static const int base_prod[4][4] = {
        {0, 1, 2, 3},   // 1*{1,i,j,k}
        {1, 0, 3, 2},   // i*{1,i,j,k} -> i, -1, k, -j
        {2, 3, 0, 1},   // j*... -> j, -k, -1, i
        {3, 2, 1, 0},   // k*... -> k, j, -i, -1
    };
    static const int base_sign[4][4] = {
        {+1, +1, +1, +1},
        {+1, -1, +1, -1},
        {+1, -1, -1, +1},
        {+1, +1, -1, -1},
    };
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) {
        int ba = a >> 1, sa = (a & 1) ? -1 : +1;
        int bb = b >> 1, sb = (b & 1) ? -1 : +1;
        int bp = base_prod[ba][bb];
        int sp = base_sign[ba][bb] * sa * sb;
        mul[a][b] = static_cast<QElem>(2 * bp + (sp < 0 ? 1 : 0));
      }
    }
  }
};

const TableInit& table() {
  static const TableInit t;
  return t;
}

}  // namespace

QElem mul(QElem a, QElem b) {
  return table().mul[static_cast<int>(a)][static_cast<int>(b)];
}

QElem neg(QElem a) { return static_cast<QElem>(static_cast<int>(a) ^ 1); }

QElem inverse(QElem a) {
  // 1 and -1 are involutions' fixed points; +-i, +-j, +-k invert by negation.
  if (a == QElem::One || a == QElem::MinusOne) return a;
  return neg(a);
}

int element_order(QElem a) {
  if (a == QElem::One) return 1;
  if (a == QElem::MinusOne) return 2;
  return 4;
}

QElem pow(QElem a, int n) {
  int m = n % 4;
  if (m < 0) m += 4;
  QElem r = QElem::One;
  for (int t = 0; t < m; ++t) r = mul(r, a);
  return r;
}

std::string to_string(QElem a) {
  static const char* names[8] = {"+1", "-1", "+i", "-i", "+j", "-j", "+k", "-k"};
  return names[static_cast<int>(a)];
}

bool parse_qelem(const std::string& s, QElem& out) {
  static const char* names[8] = {"+1", "-1", "+i", "-i", "+j", "-j", "+k", "-k"};
  for (int t = 0; t < 8; ++t) {
    if (s == names[t]) {
      out = static_cast<QElem>(t);
      return true;
    }
  }
  // Accept unsigned shorthand for positive elements.
  if (s == "1") { out = QElem::One; return true; }
  if (s == "i") { out = QElem::I; return true; }
  if (s == "j") { out = QElem::J; return true; }
  if (s == "k") { out = QElem::K; return true; }
  return false;
}

bool QSubgroup::contains(QElem g) const {
  for (QElem e : elements)
    if (e == g) return true;
  return false;
}

const std::array<QSubgroup, 6>& all_subgroups() {
  using E = QElem;
  static const std::array<QSubgroup, 6> subs = {{
      {SubgroupTag::Trivial, {E::One}},
      {SubgroupTag::Center, {E::One, E::MinusOne}},
      {SubgroupTag::Hi, {E::One, E::MinusOne, E::I, E::MinusI}},
      {SubgroupTag::Hj, {E::One, E::MinusOne, E::J, E::MinusJ}},
      {SubgroupTag::Hk, {E::One, E::MinusOne, E::K, E::MinusK}},
      {SubgroupTag::Full,
       {E::One, E::MinusOne, E::I, E::MinusI, E::J, E::MinusJ, E::K, E::MinusK}},
  }};
  return subs;
}

const QSubgroup& subgroup(SubgroupTag tag) {
  return all_subgroups()[static_cast<int>(tag)];
}

std::string to_string(SubgroupTag tag) {
  static const char* names[6] = {"Trivial", "Center", "Hi", "Hj", "Hk", "Full"};
  return names[static_cast<int>(tag)];
}

ConjClass conj_class(QElem g) {
  switch (g) {
    case QElem::One:
      return {ConjTag::C1, QElem::One};
    case QElem::MinusOne:
      return {ConjTag::Cm1, QElem::MinusOne};
    case QElem::I:
    case QElem::MinusI:
      return {ConjTag::Ci, QElem::I};
    case QElem::J:
    case QElem::MinusJ:
      return {ConjTag::Cj, QElem::J};
    case QElem::K:
    case QElem::MinusK:
      return {ConjTag::Ck, QElem::K};
  }
  throw std::logic_error("bad QElem");
}

std::string to_string(ConjTag tag) {
  static const char* names[5] = {"[1]", "[-1]", "[i]", "[j]", "[k]"};
  return names[static_cast<int>(tag)];
}

namespace {

// Canonical representative of the right coset H*g: the smallest element in
// the fixed total order.
QElem coset_rep(const QSubgroup& h, QElem g) {
  QElem best = mul(h.elements[0], g);
  for (QElem e : h.elements) {
    QElem x = mul(e, g);
    if (static_cast<int>(x) < static_cast<int>(best)) best = x;
  }
  return best;
}

std::vector<QElem> coset_reps(const QSubgroup& h) {
  std::vector<QElem> reps;
  for (int v = 0; v < 8; ++v) {
    QElem g = static_cast<QElem>(v);
    if (coset_rep(h, g) == g) reps.push_back(g);
  }
  return reps;
}

}  // namespace

int lift_component_count(QElem g, const QSubgroup& h) {
  std::vector<QElem> reps = coset_reps(h);
  std::vector<bool> seen(reps.size(), false);
  int orbits = 0;
  for (size_t s = 0; s < reps.size(); ++s) {
    if (seen[s]) continue;
    ++orbits;
    QElem cur = reps[s];
    while (true) {
      cur = coset_rep(h, mul(cur, g));
      size_t idx = 0;
      while (reps[idx] != cur) ++idx;
      if (seen[idx]) break;
      seen[idx] = true;
    }
  }
  return orbits;
}

ComponentDegree component_degree(QElem g, const QSubgroup& h) {
  int index = kOrder / h.order();
  int count = lift_component_count(g, h);
  int d = index / count;
  QElem p = pow(g, d);
  return {d, p, conj_class(p)};
}

int zmod4_exponent(QElem g, SubgroupTag axis_subgroup) {
  QElem gen;
  switch (axis_subgroup) {
    case SubgroupTag::Hi: gen = QElem::I; break;
    case SubgroupTag::Hj: gen = QElem::J; break;
    case SubgroupTag::Hk: gen = QElem::K; break;
    default:
      throw std::invalid_argument("zmod4_exponent: subgroup is not an axis Z/4");
  }
  QElem cur = QElem::One;
  for (int m = 0; m < 4; ++m) {
    if (cur == g) return m;
    cur = mul(cur, gen);
  }
  throw std::invalid_argument("zmod4_exponent: element not in the subgroup");
}

QElem OutAutomorphism::apply(QElem g) const {
  switch (g) {
    case QElem::One: return QElem::One;
    case QElem::MinusOne: return QElem::MinusOne;
    case QElem::I: return images[0];
    case QElem::MinusI: return neg(images[0]);
    case QElem::J: return images[1];
    case QElem::MinusJ: return neg(images[1]);
    case QElem::K: return images[2];
    case QElem::MinusK: return neg(images[2]);
  }
  throw std::logic_error("bad QElem");
}

ConjClass OutAutomorphism::apply_class(ConjTag c) const {
  switch (c) {
    case ConjTag::C1: return {ConjTag::C1, QElem::One};
    case ConjTag::Cm1: return {ConjTag::Cm1, QElem::MinusOne};
    case ConjTag::Ci: return conj_class(images[0]);
    case ConjTag::Cj: return conj_class(images[1]);
    case ConjTag::Ck: return conj_class(images[2]);
  }
  throw std::logic_error("bad ConjTag");
}

const std::array<OutAutomorphism, 6>& out_q8_reps() {
  using E = QElem;
  static const std::array<OutAutomorphism, 6> reps = {{
      {{E::I, E::J, E::K}},
      {{E::J, E::K, E::I}},
      {{E::K, E::I, E::J}},
      {{E::I, E::K, E::MinusJ}},
      {{E::MinusK, E::J, E::I}},
      {{E::J, E::MinusI, E::K}},
  }};
  return reps;
}

}  // namespace quatlink::q8
