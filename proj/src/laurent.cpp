#include "quatlink/laurent.hpp"

#include <sstream>
#include <stdexcept>

namespace quatlink {

LaurentPoly LaurentPoly::monomial(int64_t coeff, int exponent) {
  LaurentPoly p;
  p.add_term(exponent, coeff);
  return p;
}

int64_t LaurentPoly::coeff(int exponent) const {
  auto it = coeffs_.find(exponent);
  return it == coeffs_.end() ? 0 : it->second;
}

int LaurentPoly::min_exp() const {
  if (coeffs_.empty()) throw std::logic_error("min_exp of zero polynomial");
  return coeffs_.begin()->first;
}

int LaurentPoly::max_exp() const {
  if (coeffs_.empty()) throw std::logic_error("max_exp of zero polynomial");
  return coeffs_.rbegin()->first;
}

void LaurentPoly::add_term(int exponent, int64_t coeff) {
  if (coeff == 0) return;
  auto [it, inserted] = coeffs_.emplace(exponent, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) coeffs_.erase(it);
  }
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& o) {
  for (auto& [e, c] : o.coeffs_) add_term(e, c);
  return *this;
}

LaurentPoly& LaurentPoly::operator-=(const LaurentPoly& o) {
  for (auto& [e, c] : o.coeffs_) add_term(e, -c);
  return *this;
}

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
  LaurentPoly r;
  for (auto& [ea, ca] : a.coeffs_)
    for (auto& [eb, cb] : b.coeffs_) r.add_term(ea + eb, ca * cb);
  return r;
}

LaurentPoly LaurentPoly::shifted(int dexp) const {
  LaurentPoly r;
  for (auto& [e, c] : coeffs_) r.coeffs_.emplace(e + dexp, c);
  return r;
}

LaurentPoly LaurentPoly::substituted_inverse() const {
  LaurentPoly r;
  for (auto& [e, c] : coeffs_) r.coeffs_.emplace(-e, c);
  return r;
}

std::string LaurentPoly::to_string(const std::string& var) const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // highest exponent first
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    int64_t c = it->second;
    int e = it->first;
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    int64_t ac = c < 0 ? -c : c;
    if (ac != 1 || e == 0) os << ac;
    if (e != 0) {
      os << var;
      if (e != 1) os << "^" << e;
    }
  }
  return os.str();
}

}  // namespace quatlink
