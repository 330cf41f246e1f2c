#include <catch2/catch_amalgamated.hpp>

#include "sphereq/algebra.hpp"
#include "sphereq/random.hpp"

using namespace sphereq;

namespace {

GroupElement el(const GroupParams& params, VectorZpn vec, Unit unit) {
  return make_element(params, std::move(vec), unit);
}

}  // namespace

TEST_CASE("modular helpers") {
  REQUIRE(add_mod(2, 2, 3) == 1);
  REQUIRE(sub_mod(0, 2, 5) == 3);
  REQUIRE(neg_mod(0, 7) == 0);
  REQUIRE(neg_mod(3, 7) == 4);
  REQUIRE(mul_mod(4, 4, 5) == 1);
  // no overflow on 64-bit operands
  const std::uint64_t p = 0xffffffffffffffc5ull;  // largest 64-bit prime
  REQUIRE(mul_mod(p - 1, p - 1, p) == 1);
  REQUIRE(inv_mod(3, 7) == 5);
  REQUIRE(inv_mod(2, 3) == 2);
  REQUIRE(inv_mod(3, 5) == 2);
  REQUIRE_THROWS_AS(inv_mod(0, 5), InvariantViolation);
}

TEST_CASE("primality check") {
  for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 13ull, 769ull, 10007ull}) REQUIRE(is_prime(q));
  for (std::uint64_t q : {0ull, 1ull, 4ull, 9ull, 1001ull, 10006ull}) REQUIRE(!is_prime(q));
}

TEST_CASE("parameter and element validation") {
  REQUIRE_THROWS_AS(make_params(4, 1), CompositeModulus);
  REQUIRE_THROWS_AS(make_params(1, 1), CompositeModulus);
  REQUIRE_THROWS_AS(make_params(3, 0), NonPositiveDimension);

  const GroupParams g31 = make_params(3, 1);
  REQUIRE_THROWS_AS(make_element(g31, {3}, 1), InvariantViolation);   // residue not reduced
  REQUIRE_THROWS_AS(make_element(g31, {0}, 0), InvariantViolation);   // unit outside Z_p^*
  REQUIRE_THROWS_AS(make_element(g31, {0}, 3), InvariantViolation);
  REQUIRE_THROWS_AS(make_element(g31, {0, 0}, 1), LengthMismatch);

  const GroupParams g51 = make_params(5, 1);
  REQUIRE_THROWS_AS(require_same_params(identity(g31), identity(g51)), ParamMismatch);
}

TEST_CASE("product, inverse, conjugation examples") {
  const GroupParams g31 = make_params(3, 1);
  // (1,2)(2,2) = (1 + 2*2, 2*2) = (2, 1)
  REQUIRE(multiply(el(g31, {1}, 2), el(g31, {2}, 2)) == el(g31, {2}, 1));
  // (x,a)^-1 = (-a^-1 x, a^-1); (1,2)^-1 = (1,2)
  REQUIRE(inverse(el(g31, {1}, 2)) == el(g31, {1}, 2));

  const GroupParams g52 = make_params(5, 2);
  REQUIRE(inverse(el(g52, {1, 2}, 3)) == el(g52, {3, 1}, 2));
  REQUIRE(multiply(el(g52, {1, 2}, 3), inverse(el(g52, {1, 2}, 3))) == identity(g52));

  // z^-1 c z = (a^-1((b-1)x + y), b) for z = (x,a), c = (y,b)
  REQUIRE(conjugate(el(g31, {1}, 2), el(g31, {0}, 2)) == el(g31, {2}, 2));
}

TEST_CASE("group laws, exhaustive over small groups") {
  for (const auto& params : {make_params(3, 1), make_params(5, 1)}) {
    const auto all = all_elements(params);
    REQUIRE(all.size() == element_count(params));
    REQUIRE(std::is_sorted(all.begin(), all.end()));
    const GroupElement e = identity(params);

    for (const auto& a : all) {
      REQUIRE(multiply(e, a) == a);
      REQUIRE(multiply(a, e) == a);
      REQUIRE(multiply(a, inverse(a)) == e);
      REQUIRE(multiply(inverse(a), a) == e);
    }
    for (const auto& a : all)
      for (const auto& b : all) {
        REQUIRE(conjugate(a, b) == multiply(multiply(inverse(a), b), a));
        for (const auto& c : all)
          REQUIRE(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
      }
  }
}

TEST_CASE("group laws, randomized at large parameters") {
  const GroupParams params = make_params(10007, 8);
  RandomSource rng(20240801);
  const GroupElement e = identity(params);
  for (int trial = 0; trial < 2000; ++trial) {
    const GroupElement a = rng.element(params);
    const GroupElement b = rng.element(params);
    const GroupElement c = rng.element(params);
    REQUIRE(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
    REQUIRE(multiply(a, inverse(a)) == e);
    REQUIRE(conjugate(a, b) == multiply(multiply(inverse(a), b), a));
    REQUIRE(conjugate(a, b).unit == b.unit);  // conjugation preserves the unit part
  }
}

TEST_CASE("product of conjugates matches the naive fold") {
  const GroupParams params = make_params(13, 3);
  RandomSource rng(7);
  for (std::size_t m = 1; m <= 8; ++m) {
    std::vector<GroupElement> zs, cs;
    for (std::size_t i = 0; i < m; ++i) {
      zs.push_back(rng.element(params));
      cs.push_back(rng.element(params));
    }
    GroupElement naive = identity(params);
    for (std::size_t i = 0; i < m; ++i) naive = multiply(naive, conjugate(zs[i], cs[i]));
    REQUIRE(product_of_conjugates(zs, cs) == naive);
  }

  std::vector<GroupElement> empty;
  REQUIRE_THROWS_AS(product_of_conjugates(empty, empty), EmptyProduct);
  std::vector<GroupElement> one{identity(params)};
  REQUIRE_THROWS_AS(product_of_conjugates(one, empty), LengthMismatch);
}

TEST_CASE("vector linear combination") {
  const std::vector<Residue> coeffs{2, 1};
  const std::vector<VectorZpn> vectors{{1, 0}, {2, 2}};
  REQUIRE(vec_lincomb(coeffs, vectors, 3) == VectorZpn{1, 2});
  const std::vector<VectorZpn> ragged{{1, 0}, {2}};
  REQUIRE_THROWS_AS(vec_lincomb(coeffs, ragged, 3), LengthMismatch);
}

TEST_CASE("element counting and enumeration") {
  REQUIRE(element_count(make_params(3, 1)) == 6);
  REQUIRE(element_count(make_params(5, 1)) == 20);
  REQUIRE(element_count(make_params(3, 2)) == 18);
  REQUIRE(element_count(make_params(10007, 20)) == 0);  // overflows 64 bits
  REQUIRE_THROWS_AS(all_elements(make_params(10007, 20)), BudgetExceeded);

  // odometer covers Z_p^n exactly once
  VectorZpn v(2, 0);
  std::size_t steps = 1;
  while (next_vector(v, 3)) ++steps;
  REQUIRE(steps == 9);
  REQUIRE(v == VectorZpn{0, 0});
}

TEST_CASE("element serialization") {
  const GroupParams g52 = make_params(5, 2);
  REQUIRE(to_string(el(g52, {1, 2}, 3)) == "1 2 3");
  REQUIRE(to_string(VectorZpn{0, 4}) == "0 4");
}

TEST_CASE("random source determinism and ranges") {
  RandomSource a(42), b(42), c(43);
  REQUIRE(a.raw64() == b.raw64());
  REQUIRE(a.raw64() == b.raw64());
  {
    RandomSource x(42), y(43);
    bool all_equal = true;
    for (int i = 0; i < 8; ++i) all_equal = all_equal && x.raw64() == y.raw64();
    REQUIRE(!all_equal);
  }

  RandomSource rng(1);
  for (int i = 0; i < 1000; ++i) {
    REQUIRE(rng.below(1) == 0);
    REQUIRE(rng.below(7) < 7);
    const Unit u = rng.unit(5);
    REQUIRE(u >= 1);
    REQUIRE(u < 5);
  }
  REQUIRE_THROWS_AS(rng.below(0), InvariantViolation);

  const GroupParams params = make_params(7, 3);
  for (int i = 0; i < 100; ++i) {
    const GroupElement g = rng.element(params);
    REQUIRE_NOTHROW(make_element(params, g.vec, g.unit));
    REQUIRE(rng.central_coefficient(params).unit == 1);
  }
}

TEST_CASE("substreams are reproducible and distinct") {
  const RandomSource root(99);
  RandomSource s0 = root.substream(0);
  RandomSource s0again = root.substream(0);
  RandomSource s1 = root.substream(1);
  REQUIRE(s0.seed() == s0again.seed());
  REQUIRE(s0.raw64() == s0again.raw64());
  REQUIRE(s0.seed() != s1.seed());
  REQUIRE(root.substream(5).seed() != RandomSource(99 + 5).seed());  // mixed, not additive
}
