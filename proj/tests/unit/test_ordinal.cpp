#include <doctest.h>

#include <random>
#include <vector>

#include "itrm/ordinal.hpp"

using namespace itrm;

namespace {

Ordinal o(const char* text) { return parse_cnf(text); }

// every CNF value below w^3 with coefficients bounded by `c`
std::vector<Ordinal> all_below_omega3(unsigned c) {
  std::vector<Ordinal> out;
  for (unsigned a2 = 0; a2 <= c; ++a2)
    for (unsigned a1 = 0; a1 <= c; ++a1)
      for (unsigned a0 = 0; a0 <= c; ++a0) {
        Ordinal v;
        if (a2) v = add(v, Ordinal::omega_power(Ordinal::from_u64(2), a2));
        if (a1) v = add(v, Ordinal::omega_power(Ordinal::from_u64(1), a1));
        if (a0) v = add(v, Ordinal::from_u64(a0));
        out.push_back(v);
      }
  return out;
}

Ordinal random_ordinal(std::mt19937_64& rng, int max_exp, int max_coeff) {
  std::uniform_int_distribution<int> coeff(0, max_coeff);
  Ordinal v;
  for (int e = max_exp; e >= 0; --e) {
    int c = coeff(rng);
    if (c > 0) v = add(v, Ordinal::omega_power(Ordinal::from_u64(e), c));
  }
  return v;
}

}  // namespace

TEST_CASE("compare agrees with ordinal order") {
  CHECK(compare(Ordinal::omega(), Ordinal::omega()) == 0);
  CHECK(compare(Ordinal::omega(), Ordinal::from_u64(1000000)) > 0);
  CHECK(compare(o("w^2*1+1"), o("w*5+9")) > 0);
  CHECK(compare(Ordinal(), Ordinal::from_u64(1)) < 0);
}

TEST_CASE("addition") {
  CHECK(add(Ordinal::omega(), Ordinal::from_u64(1)) == o("w*1+1"));
  CHECK(add(Ordinal::from_u64(3), Ordinal::omega()) == o("w*1"));
  CHECK(add(o("w*1+3"), Ordinal::omega()) == o("w*2"));
}

TEST_CASE("addition is associative below w^3 (exhaustive, coefficients <= 2)") {
  std::vector<Ordinal> values = all_below_omega3(2);
  for (const Ordinal& a : values)
    for (const Ordinal& b : values)
      for (const Ordinal& c : values)
        REQUIRE(add(add(a, b), c) == add(a, add(b, c)));
}

TEST_CASE("compare is a total order on random samples") {
  std::mt19937_64 rng(7);
  std::vector<Ordinal> xs;
  for (int i = 0; i < 60; ++i) xs.push_back(random_ordinal(rng, 3, 4));
  for (const Ordinal& a : xs)
    for (const Ordinal& b : xs) {
      CHECK(compare(a, b) == -compare(b, a));
      if (compare(a, b) == 0) CHECK(print_cnf(a) == print_cnf(b));  // canonical
      for (const Ordinal& c : xs)
        if (compare(a, b) <= 0 && compare(b, c) <= 0) CHECK(compare(a, c) <= 0);
    }
}

TEST_CASE("successor and limits") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    Ordinal a = random_ordinal(rng, 3, 4);
    CHECK(add(a, Ordinal::from_u64(1)) == successor(a));
    bool no_finite_term = !a.is_zero() && a.finite_part() == 0;
    CHECK(a.is_limit() == no_finite_term);
  }
  CHECK(o("w*2").is_limit());
  CHECK(!o("w*1+1").is_limit());
  CHECK(!Ordinal().is_limit());
}

TEST_CASE("times_omega") {
  CHECK(times_omega(Ordinal::from_u64(3)) == o("w*1"));
  CHECK(times_omega(Ordinal::omega()) == o("w^2*1"));
  CHECK(times_omega(o("w^2*2+5")) == o("w^3*1"));
  CHECK_THROWS_AS(times_omega(Ordinal()), OrdinalError);
}

TEST_CASE("times_omega is the least upper bound of p*n (p below w^2, coefficients <= 5)") {
  // oracle: p*n by repeated addition must stay below times_omega(p), and for
  // every sampled q below times_omega(p) some p*n must reach it
  for (unsigned c1 = 0; c1 <= 5; ++c1)
    for (unsigned c0 = 0; c0 <= 5; ++c0) {
      if (c1 == 0 && c0 == 0) continue;
      Ordinal p;
      if (c1) p = add(p, Ordinal::omega_power(Ordinal::from_u64(1), c1));
      if (c0) p = add(p, Ordinal::from_u64(c0));
      Ordinal t = times_omega(p);
      Ordinal pn;
      std::vector<Ordinal> multiples;
      for (int n = 1; n <= 30; ++n) {
        pn = add(pn, p);
        REQUIRE(pn < t);
        multiples.push_back(pn);
      }
      // least: sampled ordinals below t are dominated by some multiple
      std::vector<Ordinal> samples;
      if (c1 == 0) {
        for (unsigned q = 0; q < 25; ++q) samples.push_back(Ordinal::from_u64(q));
      } else {
        for (unsigned a = 0; a <= 20; a += 4)
          for (unsigned b = 0; b <= 5; ++b) {
            Ordinal q;
            if (a) q = add(q, Ordinal::omega_power(Ordinal::from_u64(1), a));
            if (b) q = add(q, Ordinal::from_u64(b));
            if (q < t) samples.push_back(q);
          }
      }
      for (const Ordinal& q : samples) {
        Ordinal acc;
        bool reached = false;
        for (int n = 1; n <= 64 && !reached; ++n) {
          acc = add(acc, p);
          reached = acc >= q;
        }
        REQUIRE(reached);
      }
    }
}

TEST_CASE("cnf text round-trips") {
  CHECK(print_cnf(o("w^2*3+w*1+4")) == "w^2*3+w*1+4");
  CHECK(print_cnf(o("0")) == "0");
  CHECK(print_cnf(o("w")) == "w*1");
  CHECK(print_cnf(o("w^3")) == "w^3*1");
  CHECK(print_cnf(o("17")) == "17");
  // non-finite exponents are parenthesized
  Ordinal tower = Ordinal::omega_power(Ordinal::omega(), 1);
  CHECK(print_cnf(tower) == "w^(w*1)*1");
  CHECK(parse_cnf(print_cnf(tower)) == tower);

  std::mt19937_64 rng(23);
  for (int i = 0; i < 300; ++i) {
    Ordinal a = random_ordinal(rng, 4, 6);
    CHECK(parse_cnf(print_cnf(a)) == a);
    CHECK(print_cnf(parse_cnf(print_cnf(a))) == print_cnf(a));
  }
}

TEST_CASE("cnf parse errors") {
  CHECK_THROWS_AS(parse_cnf(""), CnfParseError);
  CHECK_THROWS_AS(parse_cnf("w*0"), CnfParseError);
  CHECK_THROWS_AS(parse_cnf("1+w"), CnfParseError);     // increasing exponents
  CHECK_THROWS_AS(parse_cnf("w+w"), CnfParseError);     // equal exponents
  CHECK_THROWS_AS(parse_cnf("w^w"), CnfParseError);     // unparenthesized exponent
  CHECK_THROWS_AS(parse_cnf("w*1+"), CnfParseError);
  CHECK_THROWS_AS(parse_cnf("x"), CnfParseError);
  CHECK_THROWS_AS(parse_cnf("w*1 "), CnfParseError);
}

TEST_CASE("depth cap reports instead of wrapping") {
  int saved = max_ordinal_depth();
  set_max_ordinal_depth(3);
  Ordinal tower = Ordinal::omega();  // depth 2
  CHECK_NOTHROW(times_omega(tower));  // w^2, depth 2
  Ordinal deep = Ordinal::omega_power(Ordinal::omega(), 1);  // w^w, depth 3
  CHECK_THROWS_AS(Ordinal::omega_power(deep, Nat(1)), OrdinalDepthError);
  set_max_ordinal_depth(saved);
}

TEST_CASE("left subtraction inverts addition") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 300; ++i) {
    Ordinal a = random_ordinal(rng, 3, 4);
    Ordinal d = random_ordinal(rng, 3, 4);
    Ordinal b = add(a, d);
    CHECK(add(a, subtract_from(a, b)) == b);
  }
  CHECK_THROWS_AS(subtract_from(Ordinal::omega(), Ordinal::from_u64(3)), OrdinalError);
}
