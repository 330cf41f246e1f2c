#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sphereq/errors.hpp"

namespace sphereq {

using Residue = std::uint64_t;  // value in [0, p)
using Unit = std::uint64_t;     // value in [1, p)
using VectorZpn = std::vector<Residue>;

// ---------------------------------------------------------------------------
// Modular scalar arithmetic. All inputs are assumed reduced; products go
// through 128-bit intermediates before reduction.

inline Residue add_mod(Residue a, Residue b, std::uint64_t p) { return (a + b) % p; }

inline Residue sub_mod(Residue a, Residue b, std::uint64_t p) { return (a + p - b) % p; }

inline Residue neg_mod(Residue a, std::uint64_t p) { return a == 0 ? 0 : p - a; }

inline Residue mul_mod(Residue a, Residue b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

/// Multiplicative inverse modulo a prime, by the extended Euclidean algorithm.
inline Unit inv_mod(Unit a, std::uint64_t p) {
  if (a == 0 || a >= p) throw InvariantViolation("inv_mod: not a unit");
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = static_cast<std::int64_t>(p), new_r = static_cast<std::int64_t>(a);
  while (new_r != 0) {
    std::int64_t q = r / new_r;
    t = std::exchange(new_t, t - q * new_t);
    r = std::exchange(new_r, r - q * new_r);
  }
  if (r != 1) throw InvariantViolation("inv_mod: argument shares a factor with the modulus");
  if (t < 0) t += static_cast<std::int64_t>(p);
  return static_cast<Unit>(t);
}

/// Deterministic primality check by trial division.
inline bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  if (p % 2 == 0) return p == 2;
  for (std::uint64_t d = 3; d * d <= p; d += 2)
    if (p % d == 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// The group G_{p,n} = Z_p^n x| Z_p^*: pairs (vec, unit) with
//   (x, a) * (y, b) = (x + a*y, a*b).

struct GroupParams {
  std::uint64_t p = 0;
  std::size_t n = 0;
  friend bool operator==(const GroupParams&, const GroupParams&) = default;
  friend auto operator<=>(const GroupParams&, const GroupParams&) = default;
};

/// Validates p prime and n >= 1. p = 2 is admitted (G_{2,n} degenerates to
/// Z_2^n); constrained-equation presets reject it downstream.
inline GroupParams make_params(std::uint64_t p, std::size_t n) {
  if (n < 1) throw NonPositiveDimension("dimension must be at least 1");
  if (!is_prime(p)) throw CompositeModulus("modulus " + std::to_string(p) + " is not prime");
  return GroupParams{p, n};
}

struct GroupElement {
  GroupParams params;
  VectorZpn vec;
  Unit unit = 1;
  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  // Lexicographic on (vec digits, then unit); params compare equal in practice.
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
};

inline GroupElement identity(const GroupParams& params) {
  return GroupElement{params, VectorZpn(params.n, 0), 1};
}

/// Validating constructor: components must already be reduced.
inline GroupElement make_element(const GroupParams& params, VectorZpn vec, Unit unit) {
  if (vec.size() != params.n) throw LengthMismatch("element vector length does not match n");
  for (Residue x : vec)
    if (x >= params.p) throw InvariantViolation("vector component not reduced mod p");
  if (unit < 1 || unit >= params.p) throw InvariantViolation("unit component outside [1, p)");
  return GroupElement{params, std::move(vec), unit};
}

inline void require_same_params(const GroupElement& a, const GroupElement& b) {
  if (a.params != b.params) throw ParamMismatch("elements belong to different groups");
}

/// (x, a) * (y, b) = (x + a*y, a*b)
inline GroupElement multiply(const GroupElement& a, const GroupElement& b) {
  require_same_params(a, b);
  const std::uint64_t p = a.params.p;
  GroupElement out{a.params, VectorZpn(a.params.n), mul_mod(a.unit, b.unit, p)};
  for (std::size_t i = 0; i < a.params.n; ++i)
    out.vec[i] = add_mod(a.vec[i], mul_mod(a.unit, b.vec[i], p), p);
  return out;
}

/// (x, a)^{-1} = (-a^{-1} x, a^{-1})
inline GroupElement inverse(const GroupElement& a) {
  const std::uint64_t p = a.params.p;
  const Unit ai = inv_mod(a.unit, p);
  GroupElement out{a.params, VectorZpn(a.params.n), ai};
  for (std::size_t i = 0; i < a.params.n; ++i) out.vec[i] = neg_mod(mul_mod(ai, a.vec[i], p), p);
  return out;
}

/// z^{-1} c z = (a^{-1}((b - 1) x + y), b) for z = (x, a), c = (y, b).
/// The unit component of c is preserved.
inline GroupElement conjugate(const GroupElement& z, const GroupElement& c) {
  require_same_params(z, c);
  const std::uint64_t p = z.params.p;
  const Unit ai = inv_mod(z.unit, p);
  const Residue bm1 = sub_mod(c.unit, 1, p);
  GroupElement out{z.params, VectorZpn(z.params.n), c.unit};
  for (std::size_t i = 0; i < z.params.n; ++i)
    out.vec[i] = mul_mod(ai, add_mod(mul_mod(bm1, z.vec[i], p), c.vec[i], p), p);
  return out;
}

/// prod_i z_i^{-1} c_i z_i evaluated in a single pass: the i-th conjugate is
/// (w_i, b_i) and the running product is (sum_i B_i w_i, prod_i b_i) with
/// B_i = b_1 ... b_{i-1}.
inline GroupElement product_of_conjugates(std::span<const GroupElement> zs,
                                          std::span<const GroupElement> cs) {
  if (zs.size() != cs.size()) throw LengthMismatch("variable/coefficient count mismatch");
  if (zs.empty()) throw EmptyProduct("product over zero conjugates");
  const GroupParams params = cs.front().params;
  const std::uint64_t p = params.p;
  VectorZpn acc(params.n, 0);
  Unit prefix = 1;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (zs[i].params != params || cs[i].params != params)
      throw ParamMismatch("elements belong to different groups");
    const GroupElement w = conjugate(zs[i], cs[i]);
    for (std::size_t k = 0; k < params.n; ++k)
      acc[k] = add_mod(acc[k], mul_mod(prefix, w.vec[k], p), p);
    prefix = mul_mod(prefix, cs[i].unit, p);
  }
  return GroupElement{params, std::move(acc), prefix};
}

/// sum_i coeff_i * v_i mod p
inline VectorZpn vec_lincomb(std::span<const Residue> coeffs, std::span<const VectorZpn> vectors,
                             std::uint64_t p) {
  if (coeffs.size() != vectors.size()) throw LengthMismatch("coefficient/vector count mismatch");
  const std::size_t n = vectors.empty() ? 0 : vectors.front().size();
  VectorZpn out(n, 0);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (vectors[i].size() != n) throw LengthMismatch("vectors of unequal dimension");
    for (std::size_t k = 0; k < n; ++k)
      out[k] = add_mod(out[k], mul_mod(coeffs[i] % p, vectors[i][k], p), p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration helpers used by exhaustive solvers.

/// |G_{p,n}| = p^n (p - 1), or 0 if the count overflows 64 bits.
inline std::uint64_t element_count(const GroupParams& params) {
  unsigned __int128 c = params.p - 1;
  for (std::size_t i = 0; i < params.n; ++i) {
    c *= params.p;
    if (c > ~static_cast<std::uint64_t>(0)) return 0;
  }
  return static_cast<std::uint64_t>(c);
}

/// Advances vec through Z_p^n in lexicographic order (leftmost digit most
/// significant). Returns false after the last vector wraps back to zero.
inline bool next_vector(VectorZpn& vec, std::uint64_t p) {
  for (std::size_t i = vec.size(); i-- > 0;) {
    if (++vec[i] < p) return true;
    vec[i] = 0;
  }
  return false;
}

/// All of G_{p,n} in lexicographic (vec digits, then unit) order.
inline std::vector<GroupElement> all_elements(const GroupParams& params) {
  std::vector<GroupElement> out;
  const std::uint64_t count = element_count(params);
  if (count == 0) throw BudgetExceeded("group too large to enumerate");
  out.reserve(count);
  VectorZpn vec(params.n, 0);
  do {
    for (Unit u = 1; u < params.p; ++u) out.push_back(GroupElement{params, vec, u});
  } while (next_vector(vec, params.p));
  return out;
}

// ---------------------------------------------------------------------------
// Line serialization: "x_1 ... x_n alpha" for elements, "x_1 ... x_n" for
// vectors, all decimal.

inline std::string to_string(const VectorZpn& vec) {
  std::string out;
  for (std::size_t i = 0; i < vec.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(vec[i]);
  }
  return out;
}

inline std::string to_string(const GroupElement& g) {
  std::string out = to_string(g.vec);
  if (!out.empty()) out += ' ';
  out += std::to_string(g.unit);
  return out;
}

}  // namespace sphereq
