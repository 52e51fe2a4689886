#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace quatlink {

// Laurent polynomial in one variable with int64 coefficients, normalized
// (no zero coefficients stored).
class LaurentPoly {
 public:
  LaurentPoly() = default;
  static LaurentPoly monomial(int64_t coeff, int exponent);
  static LaurentPoly one() { return monomial(1, 0); }

  bool is_zero() const { return coeffs_.empty(); }
  int64_t coeff(int exponent) const;
  int min_exp() const;
  int max_exp() const;

  LaurentPoly& operator+=(const LaurentPoly& o);
  LaurentPoly& operator-=(const LaurentPoly& o);
  friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
  friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
  bool operator==(const LaurentPoly& o) const { return coeffs_ == o.coeffs_; }
  bool operator!=(const LaurentPoly& o) const { return !(*this == o); }

  LaurentPoly shifted(int dexp) const;           // multiply by x^dexp
  LaurentPoly substituted_inverse() const;       // x -> x^{-1}

  // e.g. "-A^4 - A^-4", variable name given by caller; zero prints "0".
  std::string to_string(const std::string& var) const;

  const std::map<int, int64_t>& terms() const { return coeffs_; }

 private:
  void add_term(int exponent, int64_t coeff);
  std::map<int, int64_t> coeffs_;
};

}  // namespace quatlink
