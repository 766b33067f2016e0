#pragma once

// Shared digest format for certificate fields. Detection, verification and
// the reference engine implement their own logic; they only agree on how a
// period's line/test-outcome sequence is fingerprinted.

#include <cstdint>
#include <string>

#include "itrm/engine.hpp"

namespace itrm::detail {

constexpr std::uint64_t kHashMul = 0x9E3779B97F4A7C15ULL;  // odd

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

inline std::uint64_t combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (v * 0x9E3779B97F4A7C15ULL + 0x100000001B3ULL));
}

inline std::uint64_t step_key(std::uint64_t line, TestOutcome outcome) {
  return combine(combine(0x51ED, line), static_cast<std::uint64_t>(outcome) + 2);
}

inline std::uint64_t limit_key(std::uint64_t line, std::uint32_t level,
                               std::uint64_t cert_shape) {
  return combine(combine(combine(0x11F7, line), level + 1), cert_shape);
}

inline std::uint64_t nat_hash(const Nat& n) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (mp_size_t i = 0, sz = mpz_size(n.get_mpz_t()); i < sz; ++i)
    h = combine(h, mpz_getlimbn(n.get_mpz_t(), i));
  return h;
}

inline std::uint64_t string_hash(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) h = combine(h, c);
  return h;
}

inline std::uint64_t certificate_shape_digest(const LoopCertificate& c) {
  std::uint64_t h = combine(0xC0DE, c.level);
  h = combine(h, string_hash(print_cnf(c.period)));
  h = combine(h, c.line_trace_digest);
  h = combine(h, c.min_line);
  for (const Nat& d : c.delta) h = combine(h, nat_hash(d));
  for (const LoopCertificate& ch : c.children)
    h = combine(h, certificate_shape_digest(ch));
  return h;
}

}  // namespace itrm::detail
