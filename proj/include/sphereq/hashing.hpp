#pragma once

#include <cassert>
#include <cstdint>
#include <utility>
#include <vector>

#include "sphereq/equations.hpp"
#include "sphereq/random.hpp"

namespace sphereq {

using BitString = std::vector<std::uint8_t>;  // entries 0/1

// ---------------------------------------------------------------------------
// Spherical functions: f(z_1..z_m) = (z_1^{-1} c_1 z_1) ... (z_m^{-1} c_m z_m).

struct SphericalFnSpec {
  GroupParams params;
  std::vector<GroupElement> coefficients;
};

inline SphericalFnSpec make_spherical_fn(GroupParams params,
                                         std::vector<GroupElement> coefficients) {
  if (coefficients.empty()) throw EmptyProduct("function needs at least one coefficient");
  for (const auto& c : coefficients)
    if (c.params != params) throw ParamMismatch("coefficient under different parameters");
  return SphericalFnSpec{params, std::move(coefficients)};
}

inline GroupElement eval_spherical(const SphericalFnSpec& s, const std::vector<GroupElement>& zs) {
  return product_of_conjugates(zs, s.coefficients);
}

// ---------------------------------------------------------------------------
// 0/1-spherical hash: the variables range over the fixed pair
// g_0 = (0,1), g_1 = (0, 2^{-1}), selected by message bits.

struct Hash01Spec {
  GroupParams params;
  std::vector<GroupElement> coefficients;  // all in C_{p,n}
  GroupElement g0;
  GroupElement g1;
};

/// Canonical family member: g_0 = identity, g_1 = (0, 2^{-1}).
inline Hash01Spec make_hash01(GroupParams params, std::vector<GroupElement> coefficients) {
  if (params.p < 3) throw EvenModulus("hash needs an odd modulus");
  if (coefficients.empty()) throw EmptyProduct("hash needs at least one coefficient");
  for (const auto& c : coefficients) {
    if (c.params != params) throw ParamMismatch("coefficient under different parameters");
    if (c.unit != 1) throw InvariantViolation("hash coefficients must lie in C_{p,n}");
  }
  GroupElement g1{params, VectorZpn(params.n, 0), inv_mod(2, params.p)};
  return Hash01Spec{params, std::move(coefficients), identity(params), std::move(g1)};
}

/// General substitution pair. Only the canonical pair carries the
/// collision/preimage correspondences into constrained equations.
inline Hash01Spec make_hash01_with(GroupParams params, std::vector<GroupElement> coefficients,
                                   GroupElement g0, GroupElement g1) {
  Hash01Spec s = make_hash01(params, std::move(coefficients));
  if (g0.params != params || g1.params != params)
    throw ParamMismatch("substitution pair under different parameters");
  if (g0 == g1) throw InvariantViolation("substitution elements must differ");
  s.g0 = std::move(g0);
  s.g1 = std::move(g1);
  return s;
}

inline bool has_canonical_pair(const Hash01Spec& s) {
  return s.g0 == identity(s.params) &&
         s.g1 == GroupElement{s.params, VectorZpn(s.params.n, 0), inv_mod(2, s.params.p)};
}

/// H(b) in closed form: conjugating a central coefficient by (x, a) scales
/// its vector by a^{-1}, so H(b) = (sum_j u_{b_j}^{-1} c_j, 1); with the
/// canonical pair u_{b}^{-1} = b + 1.
inline GroupElement eval_hash01(const Hash01Spec& s, const BitString& bits) {
  if (bits.size() != s.coefficients.size())
    throw LengthMismatch("bit count does not match coefficient count");
  const std::uint64_t p = s.params.p;
  const Unit scale0 = inv_mod(s.g0.unit, p);
  const Unit scale1 = inv_mod(s.g1.unit, p);
  VectorZpn acc(s.params.n, 0);
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] > 1) throw InvariantViolation("bit outside {0,1}");
    const Unit scale = bits[j] ? scale1 : scale0;
    for (std::size_t k = 0; k < s.params.n; ++k)
      acc[k] = add_mod(acc[k], mul_mod(scale, s.coefficients[j].vec[k], p), p);
  }
  GroupElement out{s.params, std::move(acc), 1};
#ifndef NDEBUG
  {
    std::vector<GroupElement> zs;
    zs.reserve(bits.size());
    for (std::uint8_t b : bits) zs.push_back(b ? s.g1 : s.g0);
    assert(out == product_of_conjugates(zs, s.coefficients) &&
           "closed form disagrees with direct evaluation");
  }
#endif
  return out;
}

/// Uniform member of the family: m independent uniform C_{p,n} coefficients.
inline Hash01Spec sample_hash_family(const GroupParams& params, std::size_t m, RandomSource& rng) {
  if (params.p < 3) throw EvenModulus("hash needs an odd modulus");
  if (m < 1) throw EmptyProduct("hash needs at least one coefficient");
  std::vector<GroupElement> coefficients;
  coefficients.reserve(m);
  for (std::size_t j = 0; j < m; ++j) coefficients.push_back(rng.central_coefficient(params));
  return make_hash01(params, std::move(coefficients));
}

// ---------------------------------------------------------------------------
// Transducer functions: a 2 x m table, bit j selecting table[b_j][j]; the
// value is the plain group product of the selected entries.

struct JcSpec {
  GroupParams params;
  std::vector<GroupElement> row0;  // c_{1,0} .. c_{m,0}
  std::vector<GroupElement> row1;  // c_{1,1} .. c_{m,1}
};

inline JcSpec make_jc(GroupParams params, std::vector<GroupElement> row0,
                      std::vector<GroupElement> row1) {
  if (row0.empty()) throw EmptyProduct("table needs at least one column");
  if (row0.size() != row1.size()) throw LengthMismatch("table rows of unequal length");
  for (const auto& c : row0)
    if (c.params != params) throw ParamMismatch("table entry under different parameters");
  for (const auto& c : row1)
    if (c.params != params) throw ParamMismatch("table entry under different parameters");
  return JcSpec{params, std::move(row0), std::move(row1)};
}

inline GroupElement eval_jc(const JcSpec& s, const BitString& bits) {
  if (bits.size() != s.row0.size())
    throw LengthMismatch("bit count does not match table width");
  GroupElement acc = identity(s.params);
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j] > 1) throw InvariantViolation("bit outside {0,1}");
    acc = multiply(acc, bits[j] ? s.row1[j] : s.row0[j]);
  }
  return acc;
}

/// The table that makes the transducer reproduce a 0/1-spherical hash:
/// c_{j,b} = g_b^{-1} c_j g_b.
inline JcSpec jc_from_hash01(const Hash01Spec& s) {
  std::vector<GroupElement> row0, row1;
  row0.reserve(s.coefficients.size());
  row1.reserve(s.coefficients.size());
  for (const auto& c : s.coefficients) {
    row0.push_back(conjugate(s.g0, c));
    row1.push_back(conjugate(s.g1, c));
  }
  return make_jc(s.params, std::move(row0), std::move(row1));
}

// ---------------------------------------------------------------------------
// Attack surfaces as constrained equations.

struct CollisionCise {
  CiseInstance cise;
  Assignment witness;  // passes verify by construction
};

/// A hash collision (x, y) becomes a constrained equation with candidates
/// {1, 2^{-1}, 3^{-1}}: z_j = (0, (2 + x_j - y_j)^{-1}), rhs (2 sum_j c_j, 1).
inline CollisionCise collision_to_cise(const Hash01Spec& s, const BitString& x,
                                       const BitString& y) {
  if (!has_canonical_pair(s))
    throw InvariantViolation("collision map needs the canonical substitution pair");
  if (s.params.p < 5) throw ModulusTooSmall("candidate unit 3 needs p >= 5");
  if (x.size() != s.coefficients.size() || y.size() != s.coefficients.size())
    throw LengthMismatch("bit count does not match coefficient count");
  if (x == y) throw NotACollision("the two messages are equal");
  if (eval_hash01(s, x) != eval_hash01(s, y)) throw NotACollision("the two messages hash apart");

  const std::uint64_t p = s.params.p;
  VectorZpn rhs_vec(s.params.n, 0);
  for (const auto& c : s.coefficients)
    for (std::size_t k = 0; k < s.params.n; ++k)
      rhs_vec[k] = add_mod(rhs_vec[k], mul_mod(2, c.vec[k], p), p);

  const std::size_t m = s.coefficients.size();
  CiseInstance cise =
      make_cise(make_spherical(s.params, s.coefficients, GroupElement{s.params, rhs_vec, 1}),
                std::vector<VariableConstraint>(m, VariableConstraint::preset123()));

  Assignment witness;
  witness.values.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const Unit shift = static_cast<Unit>(2 + x[j] - y[j]);  // in {1,2,3}
    witness.values.push_back(GroupElement{s.params, VectorZpn(s.params.n, 0), inv_mod(shift, p)});
  }
  if (!verify(cise, witness)) throw std::logic_error("collision witness failed verification");
  return CollisionCise{std::move(cise), std::move(witness)};
}

/// Preimage search as a constrained equation with candidates {1, 2^{-1}}:
/// bits b hit the target iff z_j = g_{b_j} verifies.
inline CiseInstance preimage_to_cise(const Hash01Spec& s, const GroupElement& target) {
  if (!has_canonical_pair(s))
    throw InvariantViolation("preimage map needs the canonical substitution pair");
  if (target.params != s.params) throw ParamMismatch("target under different parameters");
  if (target.unit != 1) throw TargetOutsideRange("hash values lie in C_{p,n}");
  const std::size_t m = s.coefficients.size();
  return make_cise(make_spherical(s.params, s.coefficients, target),
                   std::vector<VariableConstraint>(m, VariableConstraint::preset12()));
}

/// Bits from a Preset12 witness: z_j = g_0 reads 0, z_j = g_1 reads 1.
inline BitString bits_from_assignment(const Hash01Spec& s, const Assignment& a) {
  BitString out;
  out.reserve(a.values.size());
  for (const auto& z : a.values) {
    if (z == s.g0)
      out.push_back(0);
    else if (z == s.g1)
      out.push_back(1);
    else
      throw WrongVariant("assignment outside the substitution pair");
  }
  return out;
}

}  // namespace sphereq
