#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sphereq/algebra.hpp"

namespace sphereq {

// ---------------------------------------------------------------------------
// An equation z_1^{-1} c_1 z_1 ... z_m^{-1} c_m z_m = rhs over G_{p,n}.

struct SphericalInstance {
  GroupParams params;
  std::vector<GroupElement> coefficients;  // c_1 .. c_m
  GroupElement rhs;                        // identity for the homogeneous case
};

inline SphericalInstance make_spherical(GroupParams params, std::vector<GroupElement> coefficients,
                                        GroupElement rhs) {
  if (coefficients.empty()) throw EmptyProduct("equation needs at least one coefficient");
  for (const auto& c : coefficients)
    if (c.params != params) throw ParamMismatch("coefficient under different parameters");
  if (rhs.params != params) throw ParamMismatch("rhs under different parameters");
  return SphericalInstance{params, std::move(coefficients), std::move(rhs)};
}

/// True iff every coefficient lies in the abelian subgroup C_{p,n} = Z_p^n x {1}.
inline bool all_coefficients_central(const SphericalInstance& inst) {
  return std::all_of(inst.coefficients.begin(), inst.coefficients.end(),
                     [](const GroupElement& c) { return c.unit == 1; });
}

// ---------------------------------------------------------------------------
// Per-variable candidate sets for constrained equations.

class VariableConstraint {
 public:
  enum class Kind { Free, Explicit, Preset12, Preset123 };

  static VariableConstraint free() { return VariableConstraint(Kind::Free, {}); }

  /// Arbitrary candidate set; duplicates removed, order normalized.
  static VariableConstraint explicit_set(std::vector<GroupElement> elements) {
    if (elements.empty()) throw InvariantViolation("constraint set must be nonempty");
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
    return VariableConstraint(Kind::Explicit, std::move(elements));
  }

  /// z in {(0,1), (0, 2^{-1})}. Needs p >= 3 so that 2 is a unit.
  static VariableConstraint preset12() { return VariableConstraint(Kind::Preset12, {}); }

  /// z in {(0,1), (0, 2^{-1}), (0, 3^{-1})}. Needs p >= 5 so that 3 is a unit.
  static VariableConstraint preset123() { return VariableConstraint(Kind::Preset123, {}); }

  Kind kind() const { return kind_; }

  /// Candidates in ascending element order. Free enumerates all of G_{p,n}.
  std::vector<GroupElement> candidates(const GroupParams& params) const {
    switch (kind_) {
      case Kind::Free:
        return all_elements(params);
      case Kind::Explicit: {
        for (const auto& g : elements_)
          if (g.params != params) throw ParamMismatch("constraint element under different parameters");
        return elements_;
      }
      case Kind::Preset12: {
        if (params.p < 3) throw ModulusTooSmall("preset {1,2^-1} needs p >= 3");
        std::vector<GroupElement> out{identity(params),
                                      GroupElement{params, VectorZpn(params.n, 0), inv_mod(2, params.p)}};
        std::sort(out.begin(), out.end());
        return out;
      }
      case Kind::Preset123: {
        if (params.p < 5) throw ModulusTooSmall("preset {1,2^-1,3^-1} needs p >= 5");
        std::vector<GroupElement> out{identity(params),
                                      GroupElement{params, VectorZpn(params.n, 0), inv_mod(2, params.p)},
                                      GroupElement{params, VectorZpn(params.n, 0), inv_mod(3, params.p)}};
        std::sort(out.begin(), out.end());
        return out;
      }
    }
    throw InvariantViolation("unreachable constraint kind");
  }

  std::uint64_t candidate_count(const GroupParams& params) const {
    switch (kind_) {
      case Kind::Free:
        return element_count(params);
      case Kind::Explicit:
        return elements_.size();
      case Kind::Preset12:
        if (params.p < 3) throw ModulusTooSmall("preset {1,2^-1} needs p >= 3");
        return 2;
      case Kind::Preset123:
        if (params.p < 5) throw ModulusTooSmall("preset {1,2^-1,3^-1} needs p >= 5");
        return 3;
    }
    throw InvariantViolation("unreachable constraint kind");
  }

  bool contains(const GroupElement& g) const {
    switch (kind_) {
      case Kind::Free:
        return true;
      case Kind::Explicit:
        return std::binary_search(elements_.begin(), elements_.end(), g);
      case Kind::Preset12: {
        if (g.unit != 1 && g.unit != inv_mod(2, g.params.p)) return false;
        return std::all_of(g.vec.begin(), g.vec.end(), [](Residue x) { return x == 0; });
      }
      case Kind::Preset123: {
        if (g.params.p < 5) throw ModulusTooSmall("preset {1,2^-1,3^-1} needs p >= 5");
        if (g.unit != 1 && g.unit != inv_mod(2, g.params.p) && g.unit != inv_mod(3, g.params.p))
          return false;
        return std::all_of(g.vec.begin(), g.vec.end(), [](Residue x) { return x == 0; });
      }
    }
    throw InvariantViolation("unreachable constraint kind");
  }

  /// The explicit element list (only meaningful for Kind::Explicit).
  const std::vector<GroupElement>& explicit_elements() const { return elements_; }

 private:
  VariableConstraint(Kind kind, std::vector<GroupElement> elements)
      : kind_(kind), elements_(std::move(elements)) {}

  Kind kind_;
  std::vector<GroupElement> elements_;
};

struct CiseInstance {
  SphericalInstance base;
  std::vector<VariableConstraint> constraints;  // one per variable
};

inline CiseInstance make_cise(SphericalInstance base, std::vector<VariableConstraint> constraints) {
  if (constraints.size() != base.coefficients.size())
    throw LengthMismatch("constraint count does not match variable count");
  return CiseInstance{std::move(base), std::move(constraints)};
}

/// Every variable Free: plain spherical equation viewed as a CISE.
inline CiseInstance unconstrained(SphericalInstance base) {
  std::vector<VariableConstraint> cs(base.coefficients.size(), VariableConstraint::free());
  return CiseInstance{std::move(base), std::move(cs)};
}

struct Assignment {
  std::vector<GroupElement> values;  // z_1 .. z_m
};

enum class Status { Solvable, Unsolvable, Unknown };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::Solvable: return "solvable";
    case Status::Unsolvable: return "unsolvable";
    case Status::Unknown: return "unknown";
  }
  return "unknown";
}

struct SolveReport {
  Status status = Status::Unknown;
  std::optional<Assignment> witness;
  std::string method;  // tag of the deciding procedure
  std::string note;    // diagnostics (budget exhaustion etc.)
};

// ---------------------------------------------------------------------------
// Verification. The cheap route checks the two product-law conditions
//   S1:  prod_i beta_i = rhs unit
//   S2:  sum_i B_i a_i^{-1}((beta_i - 1) z_i + c_i)  = rhs vector
// with B_i = beta_1...beta_{i-1}; the direct route multiplies out the
// conjugates. verify() runs both and insists they agree.

namespace detail {

/// S1/S2-only check, no allocation; the hot path for exhaustive search.
inline bool verify_conditions(const SphericalInstance& inst, const Assignment& a) {
  const std::uint64_t p = inst.params.p;
  const std::size_t m = inst.coefficients.size();
  Unit prod_beta = 1;
  for (const auto& c : inst.coefficients) prod_beta = mul_mod(prod_beta, c.unit, p);
  if (prod_beta != inst.rhs.unit) return false;  // S1
  VectorZpn acc(inst.params.n, 0);
  Unit prefix = 1;
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint64_t coeff = mul_mod(prefix, inv_mod(a.values[i].unit, p), p);
    const Residue bm1 = sub_mod(inst.coefficients[i].unit, 1, p);
    for (std::size_t k = 0; k < inst.params.n; ++k) {
      const Residue term = add_mod(mul_mod(bm1, a.values[i].vec[k], p), inst.coefficients[i].vec[k], p);
      acc[k] = add_mod(acc[k], mul_mod(coeff, term, p), p);
    }
    prefix = mul_mod(prefix, inst.coefficients[i].unit, p);
  }
  return acc == inst.rhs.vec;  // S2
}

inline void check_assignment_shape(const SphericalInstance& inst, const Assignment& a) {
  if (a.values.size() != inst.coefficients.size())
    throw LengthMismatch("assignment length does not match variable count");
  for (const auto& z : a.values)
    if (z.params != inst.params) throw ParamMismatch("assignment element under different parameters");
}

}  // namespace detail

inline bool verify(const SphericalInstance& inst, const Assignment& a) {
  detail::check_assignment_shape(inst, a);
  const bool by_conditions = detail::verify_conditions(inst, a);
  const bool by_product = product_of_conjugates(a.values, inst.coefficients) == inst.rhs;
  if (by_conditions != by_product)
    throw std::logic_error("verification routes disagree: product law vs direct evaluation");
  return by_product;
}

inline bool verify(const CiseInstance& inst, const Assignment& a) {
  detail::check_assignment_shape(inst.base, a);
  for (std::size_t i = 0; i < a.values.size(); ++i)
    if (!inst.constraints[i].contains(a.values[i])) return false;
  return verify(inst.base, a);
}

// ---------------------------------------------------------------------------
// Closed-form solver for the unconstrained equation. Requires rhs with unit
// part 1 (inhomogeneous vector part is fine); general rhs goes through
// homogenize() first, see solve_auto.

inline SolveReport solve_generic(const SphericalInstance& inst);

namespace detail {

/// Fold a rhs with nontrivial unit part into an extra coefficient, solve the
/// homogeneous equation, and map the witness back.
inline SolveReport solve_generic_homogenized(const SphericalInstance& inst);

}  // namespace detail

inline SolveReport solve_generic(const SphericalInstance& inst) {
  const std::uint64_t p = inst.params.p;
  const std::size_t m = inst.coefficients.size();

  Unit prod_beta = 1;
  for (const auto& c : inst.coefficients) prod_beta = mul_mod(prod_beta, c.unit, p);
  if (prod_beta != inst.rhs.unit)
    return SolveReport{Status::Unsolvable, std::nullopt, "generic", "unit-product condition fails"};

  if (inst.rhs.unit != 1) return detail::solve_generic_homogenized(inst);

  // Pick the first i with beta_i != 1. With alpha_j = 1 and z_j = 0 for
  // j != i, condition S2 collapses to B_i (beta_i - 1) z_i = r - sum_j B_j c_j,
  // where r is the rhs vector.
  std::size_t pivot = m;
  Unit b_pivot = 1;
  VectorZpn drift(inst.params.n, 0);
  Unit prefix = 1;
  for (std::size_t i = 0; i < m; ++i) {
    if (pivot == m && inst.coefficients[i].unit != 1) {
      pivot = i;
      b_pivot = prefix;
    }
    for (std::size_t k = 0; k < inst.params.n; ++k)
      drift[k] = add_mod(drift[k], mul_mod(prefix, inst.coefficients[i].vec[k], p), p);
    prefix = mul_mod(prefix, inst.coefficients[i].unit, p);
  }
  if (pivot == m)
    return SolveReport{Status::Unknown, std::nullopt, "generic",
                       "all coefficients central: closed form inapplicable"};

  const Unit beta = inst.coefficients[pivot].unit;
  const Unit scale = inv_mod(mul_mod(b_pivot, sub_mod(beta, 1, p), p), p);
  Assignment witness{std::vector<GroupElement>(m, identity(inst.params))};
  for (std::size_t k = 0; k < inst.params.n; ++k)
    witness.values[pivot].vec[k] = mul_mod(scale, sub_mod(inst.rhs.vec[k], drift[k], p), p);

  if (!verify(inst, witness))
    throw std::logic_error("closed-form witness failed verification");
  return SolveReport{Status::Solvable, std::move(witness), "generic", ""};
}

// ---------------------------------------------------------------------------
// Exhaustive search over the constraint sets, lexicographic candidate order
// per variable, variables left to right (leftmost varies slowest).

inline SolveReport solve_bruteforce(const CiseInstance& inst, std::uint64_t budget) {
  const std::size_t m = inst.base.coefficients.size();

  unsigned __int128 total = 1;
  for (const auto& c : inst.constraints) {
    const std::uint64_t k = c.candidate_count(inst.base.params);
    if (k == 0) throw BudgetExceeded("candidate set too large to enumerate");
    total *= k;
    if (total > budget)
      return SolveReport{Status::Unknown, std::nullopt, "brute",
                         "search space exceeds budget of " + std::to_string(budget)};
  }

  std::vector<std::vector<GroupElement>> candidates;
  candidates.reserve(m);
  for (const auto& c : inst.constraints) candidates.push_back(c.candidates(inst.base.params));

  std::vector<std::size_t> index(m, 0);
  Assignment a{std::vector<GroupElement>{}};
  a.values.reserve(m);
  for (std::size_t i = 0; i < m; ++i) a.values.push_back(candidates[i][0]);

  for (;;) {
    if (detail::verify_conditions(inst.base, a)) {
      if (!verify(inst, a)) throw std::logic_error("brute-force witness failed verification");
      return SolveReport{Status::Solvable, a, "brute", ""};
    }
    std::size_t i = m;
    while (i-- > 0) {
      if (++index[i] < candidates[i].size()) {
        a.values[i] = candidates[i][index[i]];
        break;
      }
      index[i] = 0;
      a.values[i] = candidates[i][0];
      if (i == 0) return SolveReport{Status::Unsolvable, std::nullopt, "brute", ""};
    }
  }
}

// ---------------------------------------------------------------------------
// The nonzero-combination problem: units (a_1..a_m) with
// sum_i a_i^{-1} y_i = 0, or nothing. Exhaustive over (Z_p^*)^m.

inline std::optional<std::vector<Unit>> solve_nonzero_combination(
    const std::vector<VectorZpn>& vectors, std::uint64_t p,
    std::uint64_t budget = 100'000'000ull) {
  if (vectors.empty()) throw EmptyProduct("nonzero combination needs at least one vector");
  const std::size_t m = vectors.size();
  const std::size_t n = vectors.front().size();
  for (const auto& v : vectors)
    if (v.size() != n) throw LengthMismatch("vectors of unequal dimension");

  unsigned __int128 total = 1;
  for (std::size_t i = 0; i < m; ++i) {
    total *= (p - 1);
    if (total > budget) throw BudgetExceeded("unit-tuple space exceeds budget");
  }

  std::vector<Unit> alpha(m, 1);
  for (;;) {
    VectorZpn sum(n, 0);
    for (std::size_t i = 0; i < m; ++i) {
      const Unit inv = inv_mod(alpha[i], p);
      for (std::size_t k = 0; k < n; ++k)
        sum[k] = add_mod(sum[k], mul_mod(inv, vectors[i][k], p), p);
    }
    if (std::all_of(sum.begin(), sum.end(), [](Residue x) { return x == 0; })) return alpha;
    std::size_t i = m;
    while (i-- > 0) {
      if (++alpha[i] < p) break;
      alpha[i] = 1;
      if (i == 0) return std::nullopt;
    }
  }
}

// ---------------------------------------------------------------------------
// Inhomogeneous <-> homogeneous translation: append coefficient rhs^{-1} with
// a fresh variable u. A homogeneous witness (z_1..z_m, u) maps to the
// inhomogeneous witness (z_1 u^{-1}, ..., z_m u^{-1}); the reverse embedding
// sets u = identity.

struct Homogenized {
  SphericalInstance instance;  // m+1 coefficients, identity rhs
  std::function<Assignment(const Assignment&)> embed;    // original witness -> homogeneous
  std::function<Assignment(const Assignment&)> extract;  // homogeneous witness -> original
};

inline Homogenized homogenize(const SphericalInstance& inst) {
  SphericalInstance out = inst;
  out.coefficients.push_back(inverse(inst.rhs));
  out.rhs = identity(inst.params);
  const std::size_t m = inst.coefficients.size();
  const GroupParams params = inst.params;

  auto embed = [m, params](const Assignment& a) {
    if (a.values.size() != m) throw LengthMismatch("witness length does not match variable count");
    Assignment out_a = a;
    out_a.values.push_back(identity(params));
    return out_a;
  };
  auto extract = [m](const Assignment& a) {
    if (a.values.size() != m + 1)
      throw LengthMismatch("witness length does not match variable count");
    const GroupElement u_inv = inverse(a.values.back());
    Assignment out_a;
    out_a.values.reserve(m);
    for (std::size_t i = 0; i < m; ++i) out_a.values.push_back(multiply(a.values[i], u_inv));
    return out_a;
  };
  return Homogenized{std::move(out), std::move(embed), std::move(extract)};
}

namespace detail {

inline SolveReport solve_generic_homogenized(const SphericalInstance& inst) {
  const Homogenized h = homogenize(inst);
  SolveReport inner = solve_generic(h.instance);
  if (inner.status != Status::Solvable) return inner;  // cannot happen once S1 holds
  Assignment mapped = h.extract(*inner.witness);
  if (!verify(inst, mapped)) throw std::logic_error("homogenized witness failed to map back");
  return SolveReport{Status::Solvable, std::move(mapped), "generic", "via homogenization"};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Decision policy combining all three procedures, mirroring the case split:
// closed form when some beta differs from 1; the nonzero-combination search
// when every coefficient is central; brute force as the budgeted fallback.

inline SolveReport solve_auto(const SphericalInstance& inst, std::uint64_t budget) {
  SolveReport direct = solve_generic(inst);
  if (direct.status != Status::Unknown) return direct;

  // Unknown leaves exactly the central case: rhs unit 1, every beta_i = 1.
  if (all_coefficients_central(inst)) {
    // Solvable iff some unit combination of the homogenized coefficient
    // vectors vanishes: conjugation scales each central coefficient by
    // alpha_i^{-1} and the variables' vector parts never enter.
    std::vector<VectorZpn> vectors;
    vectors.reserve(inst.coefficients.size() + 1);
    for (const auto& c : inst.coefficients) vectors.push_back(c.vec);
    const bool inhomogeneous =
        std::any_of(inst.rhs.vec.begin(), inst.rhs.vec.end(), [](Residue x) { return x != 0; });
    if (inhomogeneous) vectors.push_back(inverse(inst.rhs).vec);
    try {
      auto alpha = solve_nonzero_combination(vectors, inst.params.p, budget);
      if (!alpha)
        return SolveReport{Status::Unsolvable, std::nullopt, "nonzero-combination", ""};
      Assignment witness{std::vector<GroupElement>{}};
      witness.values.reserve(inst.coefficients.size());
      for (std::size_t i = 0; i < inst.coefficients.size(); ++i)
        witness.values.push_back(GroupElement{inst.params, VectorZpn(inst.params.n, 0), (*alpha)[i]});
      if (inhomogeneous) {
        // The appended slot played the homogenizing variable u; shift the
        // witness back to the inhomogeneous equation.
        const GroupElement u{inst.params, VectorZpn(inst.params.n, 0), alpha->back()};
        const GroupElement u_inv = inverse(u);
        for (auto& z : witness.values) z = multiply(z, u_inv);
      }
      if (!verify(inst, witness))
        throw std::logic_error("nonzero-combination witness failed verification");
      return SolveReport{Status::Solvable, std::move(witness), "nonzero-combination", ""};
    } catch (const BudgetExceeded&) {
      // fall through to brute force
    }
  }

  return solve_bruteforce(unconstrained(inst), budget);
}

}  // namespace sphereq
