#include "itrm/ordinal.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>

namespace itrm {

namespace {
std::atomic<int> g_max_depth{8};
}  // namespace

int max_ordinal_depth() { return g_max_depth.load(); }

void set_max_ordinal_depth(int depth) {
  if (depth < 1) throw OrdinalError("ordinal depth cap must be >= 1");
  g_max_depth.store(depth);
}

int Ordinal::depth() const {
  if (terms_.empty()) return 0;
  int worst = 0;
  for (const auto& t : terms_) worst = std::max(worst, t.exponent.depth());
  return 1 + worst;
}

namespace {
void check_depth(const Ordinal& a) {
  if (a.depth() > max_ordinal_depth())
    throw OrdinalDepthError("ordinal exponent nesting exceeds depth cap " +
                            std::to_string(max_ordinal_depth()));
}
}  // namespace

Ordinal Ordinal::from_nat(const Nat& n) {
  if (sgn(n) < 0) throw OrdinalError("ordinal from negative value");
  Ordinal r;
  if (sgn(n) != 0) r.terms_.push_back({Ordinal(), n});
  return r;
}

Ordinal Ordinal::omega() { return omega_power(from_u64(1), 1); }

Ordinal Ordinal::omega_power(const Ordinal& exponent, const Nat& coefficient) {
  if (sgn(coefficient) <= 0) throw OrdinalError("coefficient must be >= 1");
  Ordinal r;
  r.terms_.push_back({exponent, coefficient});
  check_depth(r);
  return r;
}

bool Ordinal::is_finite() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent.is_zero());
}

bool Ordinal::is_limit() const {
  return !terms_.empty() && !terms_.back().exponent.is_zero();
}

Nat Ordinal::finite_part() const {
  if (!terms_.empty() && terms_.back().exponent.is_zero()) return terms_.back().coefficient;
  return 0;
}

bool Ordinal::operator==(const Ordinal& other) const { return compare(*this, other) == 0; }

int compare(const Ordinal& a, const Ordinal& b) {
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  std::size_t n = std::min(ta.size(), tb.size());
  for (std::size_t i = 0; i < n; ++i) {
    int ce = compare(ta[i].exponent, tb[i].exponent);
    if (ce != 0) return ce;
    int cc = cmp(ta[i].coefficient, tb[i].coefficient);
    if (cc != 0) return cc < 0 ? -1 : 1;
  }
  if (ta.size() == tb.size()) return 0;
  return ta.size() < tb.size() ? -1 : 1;
}

Ordinal add(const Ordinal& a, const Ordinal& b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return b;
  const Ordinal& lead = b.terms_[0].exponent;
  Ordinal r;
  // Keep the terms of a with exponent > lead; a term with exponent == lead
  // merges coefficients; everything smaller is absorbed.
  std::size_t i = 0;
  while (i < a.terms_.size() && compare(a.terms_[i].exponent, lead) > 0) {
    r.terms_.push_back(a.terms_[i]);
    ++i;
  }
  if (i < a.terms_.size() && compare(a.terms_[i].exponent, lead) == 0) {
    r.terms_.push_back({lead, a.terms_[i].coefficient + b.terms_[0].coefficient});
  } else {
    r.terms_.push_back(b.terms_[0]);
  }
  for (std::size_t j = 1; j < b.terms_.size(); ++j) r.terms_.push_back(b.terms_[j]);
  return r;
}

Ordinal successor(const Ordinal& a) { return add(a, Ordinal::from_u64(1)); }

Ordinal times_omega(const Ordinal& p) {
  if (p.is_zero()) throw OrdinalError("times_omega requires a positive ordinal");
  const Ordinal& e = p.terms()[0].exponent;
  return Ordinal::omega_power(successor(e), 1);
}

Ordinal subtract_from(const Ordinal& base, const Ordinal& target) {
  const auto& tb = base.terms_;
  const auto& tt = target.terms_;
  std::size_t i = 0;
  while (i < tb.size() && i < tt.size()) {
    int ce = compare(tb[i].exponent, tt[i].exponent);
    int cc = ce == 0 ? cmp(tb[i].coefficient, tt[i].coefficient) : 0;
    if (ce == 0 && cc == 0) {
      ++i;
      continue;
    }
    if (ce < 0 || (ce == 0 && cc < 0)) {
      // target dominates from position i onward
      Ordinal r;
      if (ce == 0) {
        r.terms_.push_back({tt[i].exponent, tt[i].coefficient - tb[i].coefficient});
        for (std::size_t j = i + 1; j < tt.size(); ++j) r.terms_.push_back(tt[j]);
      } else {
        for (std::size_t j = i; j < tt.size(); ++j) r.terms_.push_back(tt[j]);
      }
      return r;
    }
    throw OrdinalError("subtract_from: base exceeds target");
  }
  if (i == tb.size()) {
    Ordinal r;
    for (std::size_t j = i; j < tt.size(); ++j) r.terms_.push_back(tt[j]);
    return r;
  }
  throw OrdinalError("subtract_from: base exceeds target");
}

// --- text grammar -------------------------------------------------------

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw CnfParseError("cnf parse error at offset " + std::to_string(pos) + ": " + msg);
  }

  Nat parse_nat() {
    if (eof() || !std::isdigit(static_cast<unsigned char>(peek()))) fail("expected number");
    std::size_t start = pos;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos;
    return Nat(std::string(text.substr(start, pos - start)), 10);
  }

  Ordinal parse_ordinal() {
    std::vector<OrdinalTerm> terms;
    if (!eof() && peek() == '0') {
      ++pos;
      return Ordinal();
    }
    while (true) {
      terms.push_back(parse_term());
      if (!eof() && peek() == '+') {
        ++pos;
        continue;
      }
      break;
    }
    // Grammar requires strictly decreasing exponents; reject anything else
    // so parsed values are always canonical.
    Ordinal r;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (i > 0 && compare(terms[i - 1].exponent, terms[i].exponent) <= 0)
        fail("exponents must be strictly decreasing");
      r = add(r, Ordinal::omega_power(terms[i].exponent, terms[i].coefficient));
    }
    return r;
  }

  OrdinalTerm parse_term() {
    if (eof()) fail("expected term");
    if (peek() == 'w') {
      ++pos;
      Ordinal exponent = Ordinal::from_u64(1);
      if (!eof() && peek() == '^') {
        ++pos;
        if (eof()) fail("expected exponent after '^'");
        if (peek() == '(') {
          ++pos;
          exponent = parse_ordinal();
          if (eof() || peek() != ')') fail("expected ')'");
          ++pos;
        } else if (std::isdigit(static_cast<unsigned char>(peek()))) {
          Nat e = parse_nat();
          if (sgn(e) == 0) fail("exponent 0 makes a finite term; write a bare number");
          exponent = Ordinal::from_nat(e);
        } else {
          fail("exponent must be a number or a parenthesized ordinal");
        }
      }
      Nat coeff = 1;
      if (!eof() && peek() == '*') {
        ++pos;
        coeff = parse_nat();
        if (sgn(coeff) == 0) fail("coefficient must be >= 1");
      }
      return {exponent, coeff};
    }
    Nat n = parse_nat();
    if (sgn(n) == 0) fail("0 is only valid as the whole ordinal");
    return {Ordinal(), n};
  }
};

}  // namespace

Ordinal parse_cnf(std::string_view text) {
  Parser p{text};
  Ordinal r = p.parse_ordinal();
  if (!p.eof()) p.fail("trailing input");
  check_depth(r);
  return r;
}

std::string print_cnf(const Ordinal& a) {
  if (a.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : a.terms()) {
    if (!first) out += '+';
    first = false;
    if (t.exponent.is_zero()) {
      out += t.coefficient.get_str();
      continue;
    }
    out += 'w';
    if (!(t.exponent.is_finite() && t.exponent.finite_part() == 1)) {
      out += '^';
      if (t.exponent.is_finite()) {
        out += t.exponent.finite_part().get_str();
      } else {
        out += '(';
        out += print_cnf(t.exponent);
        out += ')';
      }
    }
    out += '*';
    out += t.coefficient.get_str();
  }
  return out;
}

}  // namespace itrm
