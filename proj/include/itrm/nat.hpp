#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace itrm {

// Arbitrary-precision natural number. GMP integers are used as the carrier;
// everything in this codebase keeps them >= 0.
using Nat = mpz_class;

inline Nat nat(std::uint64_t v) { return Nat(static_cast<unsigned long>(v)); }

inline bool fits_u64(const Nat& n) { return n.fits_ulong_p(); }

inline std::uint64_t to_u64(const Nat& n) {
  if (!n.fits_ulong_p())
    throw std::overflow_error("natural does not fit in 64 bits: " + n.get_str());
  return static_cast<std::uint64_t>(n.get_ui());
}

// Cantor pairing, fixed as p(i,j) = (i+j)(i+j+1)/2 + j.
inline Nat cantor_pair(const Nat& i, const Nat& j) {
  Nat s = i + j;
  return s * (s + 1) / 2 + j;
}

inline std::pair<Nat, Nat> cantor_unpair(const Nat& k) {
  // w = floor((sqrt(8k+1) - 1) / 2), the diagonal index.
  Nat w = sqrt(8 * k + 1);
  w = (w - 1) / 2;
  Nat t = w * (w + 1) / 2;
  Nat j = k - t;
  Nat i = w - j;
  return {i, j};
}

inline Nat cantor_pair(std::uint64_t i, std::uint64_t j) {
  return cantor_pair(nat(i), nat(j));
}

}  // namespace itrm
