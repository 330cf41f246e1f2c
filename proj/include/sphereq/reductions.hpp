#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sphereq/agwp.hpp"
#include "sphereq/equations.hpp"

namespace sphereq {

// x-vectors over small alphabets ({0,1} or {-1,0,1}) and subset-sum epsilons.
using ShortVector = std::vector<std::int8_t>;

// ---------------------------------------------------------------------------
// Subset sum over Z_p^n: does some subset of v_1..v_m sum to the target?

struct SspInstance {
  GroupParams params;  // the ambient Z_p^n; unit part of the group unused
  std::vector<VectorZpn> vectors;
  VectorZpn target;
};

inline SspInstance make_ssp(GroupParams params, std::vector<VectorZpn> vectors, VectorZpn target) {
  if (vectors.empty()) throw EmptyProduct("subset-sum instance needs at least one vector");
  for (const auto& v : vectors)
    if (v.size() != params.n) throw LengthMismatch("vector length does not match n");
  if (target.size() != params.n) throw LengthMismatch("target length does not match n");
  auto reduced = [&](Residue x) { return x < params.p; };
  for (const auto& v : vectors)
    if (!std::all_of(v.begin(), v.end(), reduced)) throw InvariantViolation("entry not reduced mod p");
  if (!std::all_of(target.begin(), target.end(), reduced))
    throw InvariantViolation("entry not reduced mod p");
  return SspInstance{params, std::move(vectors), std::move(target)};
}

/// First epsilon-tuple (ascending binary order, leftmost slot most
/// significant) with sum_i eps_i v_i = target, or absent.
inline std::optional<ShortVector> ssp_bruteforce(const SspInstance& inst,
                                                 std::uint64_t budget = 1u << 24) {
  const std::size_t m = inst.vectors.size();
  if (m < 64 && (1ull << m) > budget)
    throw BudgetExceeded("subset space exceeds budget");
  if (m >= 64) throw BudgetExceeded("subset space exceeds budget");
  const std::uint64_t p = inst.params.p;
  ShortVector eps(m, 0);
  for (;;) {
    VectorZpn sum(inst.params.n, 0);
    for (std::size_t i = 0; i < m; ++i)
      if (eps[i])
        for (std::size_t k = 0; k < inst.params.n; ++k)
          sum[k] = add_mod(sum[k], inst.vectors[i][k], p);
    if (sum == inst.target) return eps;
    std::size_t i = m;
    while (i-- > 0) {
      if (eps[i] == 0) {
        eps[i] = 1;
        break;
      }
      eps[i] = 0;
      if (i == 0) return std::nullopt;
    }
  }
}

struct SspReduction {
  SphericalInstance instance;
  bool equivalence_exact;  // the two-sided correspondence holds only at p = 3
};

/// Subset sum -> spherical equation: coefficients (v_i, 1), rhs
/// (target + sum_i v_i, 1). A subset summing to the target yields a solution
/// for any p; the converse direction needs Z_p^* = {1, 2}, i.e. p = 3.
inline SspReduction ssp_to_spherical(const SspInstance& inst) {
  const std::uint64_t p = inst.params.p;
  std::vector<GroupElement> coefficients;
  coefficients.reserve(inst.vectors.size());
  for (const auto& v : inst.vectors) coefficients.push_back(GroupElement{inst.params, v, 1});
  VectorZpn rhs_vec = inst.target;
  for (const auto& v : inst.vectors)
    for (std::size_t k = 0; k < inst.params.n; ++k) rhs_vec[k] = add_mod(rhs_vec[k], v[k], p);
  SphericalInstance out =
      make_spherical(inst.params, std::move(coefficients), GroupElement{inst.params, rhs_vec, 1});
  return SspReduction{std::move(out), p == 3};
}

// ---------------------------------------------------------------------------
// Short integer solutions over Z_p. Matrices are stored column-major
// (columns v_1..v_m); m = 0 arises from the degenerate guess reduction.

enum class SisVariant { ZeroOne, PlusMinusOne };

struct SisInstance {
  std::uint64_t p = 0;
  std::size_t n = 0;
  std::vector<VectorZpn> columns;  // v_1 .. v_m
  SisVariant variant = SisVariant::ZeroOne;
};

inline SisInstance make_sis(std::uint64_t p, std::size_t n, std::vector<VectorZpn> columns,
                            SisVariant variant) {
  if (!is_prime(p)) throw CompositeModulus("modulus " + std::to_string(p) + " is not prime");
  if (n < 1) throw NonPositiveDimension("dimension must be at least 1");
  for (const auto& v : columns) {
    if (v.size() != n) throw LengthMismatch("column length does not match n");
    for (Residue x : v)
      if (x >= p) throw InvariantViolation("entry not reduced mod p");
  }
  return SisInstance{p, n, std::move(columns), variant};
}

struct IsisInstance {
  SisInstance base;
  VectorZpn target;  // find x with A x = target
};

inline IsisInstance make_isis(SisInstance base, VectorZpn target) {
  if (target.size() != base.n) throw LengthMismatch("target length does not match n");
  for (Residue x : target)
    if (x >= base.p) throw InvariantViolation("entry not reduced mod p");
  return IsisInstance{std::move(base), std::move(target)};
}

/// A x over Z_p, with x over the variant's alphabet.
inline VectorZpn sis_apply(const SisInstance& inst, const ShortVector& x) {
  if (x.size() != inst.columns.size()) throw LengthMismatch("x length does not match column count");
  VectorZpn out(inst.n, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Residue coeff = x[i] >= 0 ? static_cast<Residue>(x[i]) : inst.p - 1;  // -1 = p-1
    for (std::size_t k = 0; k < inst.n; ++k)
      out[k] = add_mod(out[k], mul_mod(coeff, inst.columns[i][k], inst.p), inst.p);
  }
  return out;
}

inline bool sis_trivial(const ShortVector& x) {
  return std::all_of(x.begin(), x.end(), [](std::int8_t e) { return e == 0; });
}

namespace detail {

inline const std::vector<std::int8_t>& sis_alphabet(SisVariant variant) {
  // Ranked "shortness-first": 0, then 1, then -1.
  static const std::vector<std::int8_t> zero_one{0, 1};
  static const std::vector<std::int8_t> pm_one{0, 1, -1};
  return variant == SisVariant::ZeroOne ? zero_one : pm_one;
}

/// Full sweep keeping the minimum under (nonzero count, then positionwise
/// rank 0 < 1 < -1) — the "shortest-lexicographic" witness order.
template <typename Accept>
std::optional<ShortVector> sis_sweep(const SisInstance& inst, std::uint64_t budget, Accept accept) {
  const auto& alphabet = sis_alphabet(inst.variant);
  const std::size_t m = inst.columns.size();
  unsigned __int128 total = 1;
  for (std::size_t i = 0; i < m; ++i) {
    total *= alphabet.size();
    if (total > budget) throw BudgetExceeded("alphabet space exceeds budget");
  }
  std::vector<std::size_t> index(m, 0);
  ShortVector x(m, alphabet[0]);
  std::optional<ShortVector> best;
  auto weight = [](const ShortVector& v) {
    return std::count_if(v.begin(), v.end(), [](std::int8_t e) { return e != 0; });
  };
  auto better = [&](const ShortVector& a, const ShortVector& b) {
    const auto wa = weight(a), wb = weight(b);
    if (wa != wb) return wa < wb;
    // positionwise rank order: 0 < 1 < -1
    auto rank = [](std::int8_t e) { return e == 0 ? 0 : (e == 1 ? 1 : 2); };
    for (std::size_t i = 0; i < a.size(); ++i)
      if (rank(a[i]) != rank(b[i])) return rank(a[i]) < rank(b[i]);
    return false;
  };
  for (;;) {
    if (accept(x) && (!best || better(x, *best))) best = x;
    std::size_t i = m;
    bool done = m == 0;
    while (i-- > 0) {
      if (++index[i] < alphabet.size()) {
        x[i] = alphabet[index[i]];
        break;
      }
      index[i] = 0;
      x[i] = alphabet[0];
      if (i == 0) done = true;
    }
    if (done) return best;
  }
}

}  // namespace detail

/// Homogeneous SIS oracle: shortest-lexicographic nontrivial x with A x = 0.
inline std::optional<ShortVector> sis_bruteforce(const SisInstance& inst,
                                                 std::uint64_t budget = 1u << 24) {
  return detail::sis_sweep(inst, budget, [&](const ShortVector& x) {
    if (sis_trivial(x)) return false;
    const VectorZpn v = sis_apply(inst, x);
    return std::all_of(v.begin(), v.end(), [](Residue r) { return r == 0; });
  });
}

/// Inhomogeneous oracle: shortest-lexicographic x with A x = target
/// (trivial x allowed).
inline std::optional<ShortVector> sis_bruteforce(const IsisInstance& inst,
                                                 std::uint64_t budget = 1u << 24) {
  return detail::sis_sweep(inst.base, budget,
                           [&](const ShortVector& x) { return sis_apply(inst.base, x) == inst.target; });
}

// ---------------------------------------------------------------------------
// ISIS_{0,1} -> CISE with candidate sets {(0,1), (0,2^{-1})}: x_i picks the
// unit (x_i + 1)^{-1}, so conjugation scales column i by x_i + 1 and the
// equation reads  A x + sum_i v_i  =  target + sum_i v_i.

struct IsisCiseReduction {
  CiseInstance cise;
  std::function<Assignment(const ShortVector&)> x_to_z;
  std::function<ShortVector(const Assignment&)> z_to_x;
};

inline IsisCiseReduction isis_to_cise(const IsisInstance& inst) {
  if (inst.base.variant != SisVariant::ZeroOne)
    throw WrongVariant("reduction needs the {0,1} variant");
  if (inst.base.p == 2) throw EvenModulus("2 is not a unit mod 2");
  const GroupParams params = make_params(inst.base.p, inst.base.n);
  const std::uint64_t p = params.p;

  std::vector<GroupElement> coefficients;
  coefficients.reserve(inst.base.columns.size());
  VectorZpn rhs_vec = inst.target;
  for (const auto& v : inst.base.columns) {
    coefficients.push_back(GroupElement{params, v, 1});
    for (std::size_t k = 0; k < params.n; ++k) rhs_vec[k] = add_mod(rhs_vec[k], v[k], p);
  }
  const std::size_t m = coefficients.size();
  CiseInstance cise =
      make_cise(make_spherical(params, std::move(coefficients), GroupElement{params, rhs_vec, 1}),
                std::vector<VariableConstraint>(m, VariableConstraint::preset12()));

  auto x_to_z = [params, m](const ShortVector& x) {
    if (x.size() != m) throw LengthMismatch("x length does not match variable count");
    Assignment a;
    a.values.reserve(m);
    for (std::int8_t e : x) {
      if (e != 0 && e != 1) throw WrongVariant("entry outside {0,1}");
      a.values.push_back(GroupElement{params, VectorZpn(params.n, 0),
                                      inv_mod(static_cast<Unit>(e) + 1, params.p)});
    }
    return a;
  };
  auto z_to_x = [params, m](const Assignment& a) {
    if (a.values.size() != m) throw LengthMismatch("assignment length does not match variable count");
    ShortVector x;
    x.reserve(m);
    const Unit half = inv_mod(2, params.p);
    for (const auto& z : a.values) {
      if (z.unit == 1)
        x.push_back(0);
      else if (z.unit == half)
        x.push_back(1);
      else
        throw WrongVariant("assignment outside the {1, 2^-1} candidate set");
    }
    return x;
  };
  return IsisCiseReduction{std::move(cise), std::move(x_to_z), std::move(z_to_x)};
}

// ---------------------------------------------------------------------------
// Homogeneous SIS_{-1,0,1} -> CISE with candidates {1, 2^{-1}, 3^{-1}}:
// x_i picks the unit (x_i + 2)^{-1}, so the equation reads
// A x + 2 sum_i v_i = 2 sum_i v_i. The all-zero x corresponds to every
// z_i = (0, 2^{-1}) and stays "trivial" through the map.

struct SisCiseReduction {
  CiseInstance cise;
  std::function<Assignment(const ShortVector&)> x_to_z;
  std::function<ShortVector(const Assignment&)> z_to_x;
};

inline SisCiseReduction sis_to_cise123(const SisInstance& inst) {
  if (inst.variant != SisVariant::PlusMinusOne)
    throw WrongVariant("reduction needs the {-1,0,1} variant");
  if (inst.p < 5) throw ModulusTooSmall("candidate unit 3 needs p >= 5");
  const GroupParams params = make_params(inst.p, inst.n);
  const std::uint64_t p = params.p;

  std::vector<GroupElement> coefficients;
  coefficients.reserve(inst.columns.size());
  VectorZpn rhs_vec(params.n, 0);
  for (const auto& v : inst.columns) {
    coefficients.push_back(GroupElement{params, v, 1});
    for (std::size_t k = 0; k < params.n; ++k)
      rhs_vec[k] = add_mod(rhs_vec[k], mul_mod(2, v[k], p), p);
  }
  const std::size_t m = coefficients.size();
  CiseInstance cise =
      make_cise(make_spherical(params, std::move(coefficients), GroupElement{params, rhs_vec, 1}),
                std::vector<VariableConstraint>(m, VariableConstraint::preset123()));

  auto x_to_z = [params, m](const ShortVector& x) {
    if (x.size() != m) throw LengthMismatch("x length does not match variable count");
    Assignment a;
    a.values.reserve(m);
    for (std::int8_t e : x) {
      if (e < -1 || e > 1) throw WrongVariant("entry outside {-1,0,1}");
      a.values.push_back(GroupElement{params, VectorZpn(params.n, 0),
                                      inv_mod(static_cast<Unit>(e + 2), params.p)});
    }
    return a;
  };
  auto z_to_x = [params, m](const Assignment& a) {
    if (a.values.size() != m) throw LengthMismatch("assignment length does not match variable count");
    ShortVector x;
    x.reserve(m);
    const Unit half = inv_mod(2, params.p);
    const Unit third = inv_mod(3, params.p);
    for (const auto& z : a.values) {
      if (z.unit == 1)
        x.push_back(-1);
      else if (z.unit == half)
        x.push_back(0);
      else if (z.unit == third)
        x.push_back(1);
      else
        throw WrongVariant("assignment outside the {1, 2^-1, 3^-1} candidate set");
    }
    return x;
  };
  return SisCiseReduction{std::move(cise), std::move(x_to_z), std::move(z_to_x)};
}

// ---------------------------------------------------------------------------
// Guess-an-index: a homogeneous {0,1} solution with x_i = 1 survives deleting
// column i and retargeting to -v_i. guessed_index is 1-based (a position).

struct GuessReduction {
  IsisInstance instance;
  std::size_t guessed_index;  // 1-based position of the deleted column
  std::function<ShortVector(const ShortVector&)> reinsert;
};

inline GuessReduction isis_from_sis_guess(const SisInstance& inst, std::size_t guessed_index) {
  if (inst.variant != SisVariant::ZeroOne)
    throw WrongVariant("guess reduction needs the {0,1} variant");
  if (guessed_index < 1 || guessed_index > inst.columns.size())
    throw IndexOutOfRange("guessed index outside 1.." + std::to_string(inst.columns.size()));
  const std::size_t at = guessed_index - 1;

  std::vector<VectorZpn> columns;
  columns.reserve(inst.columns.size() - 1);
  for (std::size_t i = 0; i < inst.columns.size(); ++i)
    if (i != at) columns.push_back(inst.columns[i]);
  VectorZpn target(inst.n);
  for (std::size_t k = 0; k < inst.n; ++k) target[k] = neg_mod(inst.columns[at][k], inst.p);

  IsisInstance out = make_isis(make_sis(inst.p, inst.n, std::move(columns), SisVariant::ZeroOne),
                               std::move(target));
  auto reinsert = [at](const ShortVector& x) {
    ShortVector full = x;
    full.insert(full.begin() + static_cast<std::ptrdiff_t>(at), 1);
    return full;
  };
  return GuessReduction{std::move(out), guessed_index, std::move(reinsert)};
}

// ---------------------------------------------------------------------------
// CISE -> acyclic-graph word problem: vertices 0..m+1 in a line; the j-th
// layer has one edge per candidate z, labeled z^{-1} c_j z; the final edge is
// labeled rhs^{-1}. The equation holds iff some path product is the identity.

inline AgwpInstance cise_to_agwp(const CiseInstance& inst, std::uint64_t budget = 1u << 22) {
  const std::size_t m = inst.base.coefficients.size();
  unsigned __int128 edge_count = 1;  // the closing rhs edge
  for (const auto& c : inst.constraints) {
    const std::uint64_t k = c.candidate_count(inst.base.params);
    if (k == 0) throw BudgetExceeded("candidate set too large to materialize");
    edge_count += k;
    if (edge_count > budget) throw BudgetExceeded("edge count exceeds budget");
  }

  AgwpInstance out;
  out.params = inst.base.params;
  out.vertex_count = m + 2;
  out.alpha = 0;
  out.omega = m + 1;
  out.edges.reserve(static_cast<std::size_t>(edge_count));
  for (std::size_t j = 0; j < m; ++j)
    for (const auto& z : inst.constraints[j].candidates(inst.base.params))
      out.edges.push_back(AgwpEdge{j, j + 1, conjugate(z, inst.base.coefficients[j]),
                                   "z=" + to_string(z)});
  out.edges.push_back(AgwpEdge{m, m + 1, inverse(inst.base.rhs), "rhs"});
  return out;
}

/// Maps an agwp_solve witness path back to a CISE assignment. Relies on the
/// layered edge layout of cise_to_agwp: the edges for variable j form a
/// contiguous block in candidate order.
inline Assignment assignment_from_agwp_path(const CiseInstance& inst,
                                            const std::vector<std::size_t>& path) {
  const std::size_t m = inst.base.coefficients.size();
  if (path.size() != m + 1) throw LengthMismatch("path length does not match variable count + 1");
  Assignment a;
  a.values.reserve(m);
  std::size_t offset = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const auto candidates = inst.constraints[j].candidates(inst.base.params);
    const std::size_t e = path[j];
    if (e < offset || e >= offset + candidates.size())
      throw IndexOutOfRange("path edge outside the layer for its variable");
    a.values.push_back(candidates[e - offset]);
    offset += candidates.size();
  }
  return a;
}

}  // namespace sphereq
