#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "itrm/nat.hpp"

namespace itrm {

struct OrdinalTerm;

// An ordinal below epsilon_0 in Cantor normal form: a sum of terms
// w^e * c with strictly decreasing exponents e (themselves ordinals) and
// coefficients c >= 1. The empty sum is 0. Values are immutable once built
// and always canonical, so equality is structural.
class Ordinal {
 public:
  Ordinal() = default;  // zero

  static Ordinal from_nat(const Nat& n);
  static Ordinal from_u64(std::uint64_t n) { return from_nat(nat(n)); }
  static Ordinal omega();
  // w^exponent * coefficient; coefficient must be >= 1.
  static Ordinal omega_power(const Ordinal& exponent, const Nat& coefficient);

  bool is_zero() const { return terms_.empty(); }
  bool is_finite() const;
  // A limit ordinal: nonzero with no finite part.
  bool is_limit() const;
  Nat finite_part() const;
  const std::vector<OrdinalTerm>& terms() const { return terms_; }
  int depth() const;

  bool operator==(const Ordinal& other) const;
  bool operator!=(const Ordinal& other) const { return !(*this == other); }

 private:
  std::vector<OrdinalTerm> terms_;
  friend Ordinal add(const Ordinal&, const Ordinal&);
  friend Ordinal subtract_from(const Ordinal&, const Ordinal&);
  friend int compare(const Ordinal&, const Ordinal&);
};

struct OrdinalTerm {
  Ordinal exponent;
  Nat coefficient;
};

class OrdinalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exponent nesting exceeded the configured cap (never silent wraparound).
class OrdinalDepthError : public OrdinalError {
 public:
  using OrdinalError::OrdinalError;
};

class CnfParseError : public OrdinalError {
 public:
  using OrdinalError::OrdinalError;
};

// Configurable cap on exponent nesting depth; default 8.
int max_ordinal_depth();
void set_max_ordinal_depth(int depth);

// Total order agreeing with the ordinal order: -1, 0 or 1.
int compare(const Ordinal& a, const Ordinal& b);
inline bool operator<(const Ordinal& a, const Ordinal& b) { return compare(a, b) < 0; }
inline bool operator<=(const Ordinal& a, const Ordinal& b) { return compare(a, b) <= 0; }
inline bool operator>(const Ordinal& a, const Ordinal& b) { return compare(a, b) > 0; }
inline bool operator>=(const Ordinal& a, const Ordinal& b) { return compare(a, b) >= 0; }

// Ordinal addition (non-commutative).
Ordinal add(const Ordinal& a, const Ordinal& b);

Ordinal successor(const Ordinal& a);

// p * omega for p > 0: w^(e+1) where e is the leading exponent of p.
Ordinal times_omega(const Ordinal& p);

// The unique x with base + x = target; requires base <= target.
Ordinal subtract_from(const Ordinal& base, const Ordinal& target);

// Text grammar used in traces and CLI output:
//   ordinal := "0" | term ("+" term)*
//   term    := "w" ("^" exponent)? ("*" nat)? | nat
//   exponent:= nat | "(" ordinal ")"
// The canonical printer always emits coefficients and parenthesizes
// non-finite exponents, e.g. "w^2*3+w*1+4", "w^(w*1)*1".
Ordinal parse_cnf(std::string_view text);
std::string print_cnf(const Ordinal& a);

}  // namespace itrm
