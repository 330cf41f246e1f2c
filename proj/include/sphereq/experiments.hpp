#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sphereq/equations.hpp"
#include "sphereq/hashing.hpp"
#include "sphereq/random.hpp"

namespace sphereq {

// ---------------------------------------------------------------------------
// Parameter regime: the working window  n log2(p) < m < p / (2 n^4).

struct ParamRegime {
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t p = 0;
  bool natural_log = false;  // sensitivity switch; the convention is base 2
  double lower = 0;          // n * log(p)
  double upper = 0;          // p / (2 n^4)
  bool valid = false;
  std::vector<std::string> violations;
};

inline ParamRegime validate_params(std::size_t n, std::size_t m, std::uint64_t p,
                                   bool natural_log = false) {
  ParamRegime r;
  r.n = n;
  r.m = m;
  r.p = p;
  r.natural_log = natural_log;
  if (n < 1) {
    r.violations.push_back("dimension must be at least 1");
    return r;
  }
  if (!is_prime(p)) r.violations.push_back("modulus " + std::to_string(p) + " is not prime");
  const double logp = natural_log ? std::log(static_cast<double>(p))
                                  : std::log2(static_cast<double>(p));
  r.lower = static_cast<double>(n) * logp;
  const double n4 = std::pow(static_cast<double>(n), 4.0);
  r.upper = static_cast<double>(p) / (2.0 * n4);
  if (!(r.lower < static_cast<double>(m)))
    r.violations.push_back("lower bound fails: need n*log(p) < m");
  if (!(static_cast<double>(m) < r.upper))
    r.violations.push_back("upper bound fails: need m < p/(2 n^4)");
  r.valid = r.violations.empty();
  return r;
}

// ---------------------------------------------------------------------------
// The stratified instance set: all (coefficient tuple, group) pairs with
// p, n, m <= s, under the uniform distribution. Cell (p,n,m) holds
// (p^n (p-1))^m instances — masses span orders of magnitude, so we carry
// exact arbitrary-precision counts and sample categorically.

/// |G_{p,n}|^m as an exact integer.
inline mpz_class sphere_count(std::uint64_t p, std::size_t n, std::size_t m) {
  mpz_class order;
  mpz_ui_pow_ui(order.get_mpz_t(), static_cast<unsigned long>(p),
                static_cast<unsigned long>(n));
  order *= static_cast<unsigned long>(p - 1);
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), order.get_mpz_t(), static_cast<unsigned long>(m));
  return out;
}

struct IsCell {
  std::uint64_t p = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  mpz_class count;
};

struct StratifiedIndex {
  std::uint64_t s = 0;
  std::vector<IsCell> cells;  // (p, n, m) ascending
  mpz_class total;            // |I_s|
};

inline StratifiedIndex make_stratified_index(std::uint64_t s) {
  if (s < 2) throw InvariantViolation("stratification bound must be at least 2");
  StratifiedIndex idx;
  idx.s = s;
  idx.total = 0;
  for (std::uint64_t p = 2; p <= s; ++p) {
    if (!is_prime(p)) continue;
    for (std::size_t n = 1; n <= s; ++n)
      for (std::size_t m = 1; m <= s; ++m) {
        IsCell cell{p, n, m, sphere_count(p, n, m)};
        idx.total += cell.count;
        idx.cells.push_back(std::move(cell));
      }
  }
  return idx;
}

/// Uniform arbitrary-precision draw in [0, bound), by rejection on the
/// bit-length of bound; consumes whole 64-bit engine words.
inline mpz_class mpz_below(RandomSource& rng, const mpz_class& bound) {
  if (bound <= 0) throw InvariantViolation("mpz_below: empty range");
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  for (;;) {
    mpz_class r = 0;
    std::size_t remaining = bits;
    while (remaining > 0) {
      const std::size_t take = remaining >= 64 ? 64 : remaining;
      std::uint64_t draw = rng.raw64();
      if (take < 64) draw &= (1ull << take) - 1;
      r <<= take;
      r += mpz_class(static_cast<unsigned long>(draw));
      remaining -= take;
    }
    if (r < bound) return r;
  }
}

struct IsSample {
  GroupParams params;
  std::size_t m = 0;
  SphericalInstance instance;  // homogeneous: uniform coefficients, identity rhs
};

inline IsSample sample_Is(const StratifiedIndex& idx, RandomSource& rng) {
  mpz_class r = mpz_below(rng, idx.total);
  const IsCell* chosen = nullptr;
  for (const auto& cell : idx.cells) {
    if (r < cell.count) {
      chosen = &cell;
      break;
    }
    r -= cell.count;
  }
  if (!chosen) throw InvariantViolation("categorical draw fell off the cell table");
  const GroupParams params{chosen->p, chosen->n};
  std::vector<GroupElement> coefficients;
  coefficients.reserve(chosen->m);
  for (std::size_t i = 0; i < chosen->m; ++i) coefficients.push_back(rng.element(params));
  return IsSample{params, chosen->m,
                  make_spherical(params, std::move(coefficients), identity(params))};
}

inline IsSample sample_Is(std::uint64_t s, RandomSource& rng) {
  return sample_Is(make_stratified_index(s), rng);
}

// ---------------------------------------------------------------------------
// Seeded frequency experiments.

struct StatReport {
  std::string name;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double point_estimate = 0;
  std::optional<double> exact_value;  // when the probability is computable
  double band_low = 0;                // acceptance band (exact +- 4 sigma)
  double band_high = 1;
};

namespace detail {

inline StatReport make_stat_report(std::string name, std::uint64_t trials, std::uint64_t successes,
                                   std::optional<double> exact) {
  StatReport r;
  r.name = std::move(name);
  r.trials = trials;
  r.successes = successes;
  r.point_estimate = trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
  r.exact_value = exact;
  if (exact && trials) {
    const double q = *exact;
    const double sigma = std::sqrt(q * (1.0 - q) / static_cast<double>(trials));
    r.band_low = std::max(0.0, q - 4.0 * sigma);
    r.band_high = std::min(1.0, q + 4.0 * sigma);
  }
  return r;
}

}  // namespace detail

/// Pr[all beta_i = 1] for a uniform coefficient tuple at fixed (p, m).
inline mpq_class pr_all_beta_one(std::uint64_t p, std::size_t m) {
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(p - 1),
                static_cast<unsigned long>(m));
  mpq_class q(1, den);
  q.canonicalize();
  return q;
}

struct GenericStats {
  StatReport m_large;          // event { 2m >= s }
  StatReport beta_nontrivial;  // event { some beta_i != 1 }
};

/// Samples `trials` instances from the stratified set (one substream per
/// trial) and tallies the two generic-case events. Exact event probabilities
/// come from the cell table, so the reports carry tight 4-sigma bands.
inline GenericStats generic_stats(std::uint64_t s, std::uint64_t trials, const RandomSource& rng) {
  const StratifiedIndex idx = make_stratified_index(s);

  mpq_class q_m(0), q_beta(0);
  for (const auto& cell : idx.cells) {
    mpq_class mass(cell.count, idx.total);
    mass.canonicalize();
    if (2 * cell.m >= s) q_m += mass;
    mpq_class beta_hit = mpq_class(1) - pr_all_beta_one(cell.p, cell.m);
    q_beta += mass * beta_hit;
  }

  std::uint64_t hits_m = 0, hits_beta = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomSource sub = rng.substream(t);
    const IsSample sample = sample_Is(idx, sub);
    if (2 * sample.m >= s) ++hits_m;
    const bool nontrivial =
        std::any_of(sample.instance.coefficients.begin(), sample.instance.coefficients.end(),
                    [](const GroupElement& c) { return c.unit != 1; });
    if (nontrivial) ++hits_beta;
  }

  return GenericStats{
      detail::make_stat_report("m-large", trials, hits_m, q_m.get_d()),
      detail::make_stat_report("beta-nontrivial", trials, hits_beta, q_beta.get_d())};
}

// ---------------------------------------------------------------------------
// Exact hash-distribution computations (full enumeration, rational output).

namespace detail {

/// Odometer over a list of base-p digit strings; leftmost digit most
/// significant within each vector, earlier vectors vary slowest.
inline bool next_tuple(std::vector<VectorZpn>& tuple, std::uint64_t p) {
  for (std::size_t j = tuple.size(); j-- > 0;)
    if (next_vector(tuple[j], p)) return true;
  return false;
}

inline std::size_t vector_index(const VectorZpn& v, std::uint64_t p) {
  std::size_t idx = 0;
  for (Residue d : v) idx = idx * static_cast<std::size_t>(p) + static_cast<std::size_t>(d);
  return idx;
}

}  // namespace detail

struct UniformityReport {
  mpq_class average_tv;             // mean over tuples of TV(H_c(uniform bits), uniform)
  bool unconditional_uniform = false;  // joint (tuple, bits) output exactly uniform
};

/// For every coefficient tuple in C_{p,n}^m, the exact total-variation
/// distance between the hash of uniform bits and the uniform distribution on
/// C_{p,n}; returns the exact average and whether the mixture over tuples is
/// exactly uniform.
inline UniformityReport hash_uniformity(const GroupParams& params, std::size_t m,
                                        std::uint64_t budget = 1u << 26) {
  if (params.p < 3) throw EvenModulus("hash needs an odd modulus");
  if (m < 1) throw EmptyProduct("hash needs at least one coefficient");
  const std::uint64_t p = params.p;

  unsigned __int128 outputs = 1;
  for (std::size_t i = 0; i < params.n; ++i) {
    outputs *= p;
    if (outputs > budget) throw BudgetExceeded("output space exceeds budget");
  }
  const std::size_t out_size = static_cast<std::size_t>(outputs);
  unsigned __int128 work = 1;
  for (std::size_t j = 0; j < m; ++j) {
    work *= out_size;  // tuple count
    if (work > budget) throw BudgetExceeded("tuple space exceeds budget");
  }
  if (m >= 64) throw BudgetExceeded("bit space exceeds budget");
  const std::uint64_t nbits = 1ull << m;
  if (work * nbits > budget) throw BudgetExceeded("enumeration exceeds budget");

  std::vector<VectorZpn> tuple(m, VectorZpn(params.n, 0));
  std::vector<std::uint64_t> counts(out_size);
  std::vector<mpz_class> global(out_size);
  mpz_class tv_sum = 0;
  mpz_class tuples = 0;

  do {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::uint64_t b = 0; b < nbits; ++b) {
      VectorZpn acc(params.n, 0);
      for (std::size_t j = 0; j < m; ++j) {
        const Residue scale = (b >> j) & 1 ? 2 : 1;
        for (std::size_t k = 0; k < params.n; ++k)
          acc[k] = add_mod(acc[k], mul_mod(scale, tuple[j][k], p), p);
      }
      ++counts[detail::vector_index(acc, p)];
    }
    std::uint64_t tv_num = 0;  // sum_g |count_g * p^n - 2^m|
    for (std::size_t g = 0; g < out_size; ++g) {
      const std::uint64_t scaled = counts[g] * static_cast<std::uint64_t>(out_size);
      tv_num += scaled > nbits ? scaled - nbits : nbits - scaled;
      global[g] += static_cast<unsigned long>(counts[g]);
    }
    tv_sum += static_cast<unsigned long>(tv_num);
    ++tuples;
  } while (detail::next_tuple(tuple, p));

  // TV(tuple) = tv_num / (2 * 2^m * p^n); average over all tuples.
  mpz_class denom = tuples * 2;
  denom *= static_cast<unsigned long>(nbits);
  denom *= static_cast<unsigned long>(out_size);
  mpq_class avg(tv_sum, denom);
  avg.canonicalize();

  mpz_class expected = tuples;
  expected *= static_cast<unsigned long>(nbits);
  expected /= static_cast<unsigned long>(out_size);
  bool uniform = true;
  for (const auto& g : global)
    if (g != expected) uniform = false;
  return UniformityReport{std::move(avg), uniform};
}

/// Exact Pr over a uniform coefficient tuple that two fixed distinct
/// messages collide. For this family the answer is p^{-n} on the nose.
inline mpq_class universality_check(const GroupParams& params, std::size_t m, const BitString& x,
                                    const BitString& y, std::uint64_t budget = 1u << 26) {
  if (params.p < 3) throw EvenModulus("hash needs an odd modulus");
  if (x.size() != m || y.size() != m)
    throw LengthMismatch("bit count does not match coefficient count");
  if (x == y) throw EqualInputs("the two messages are equal");
  const std::uint64_t p = params.p;

  unsigned __int128 work = 1;
  for (std::size_t j = 0; j < m * params.n; ++j) {
    work *= p;
    if (work > budget) throw BudgetExceeded("tuple space exceeds budget");
  }

  std::vector<VectorZpn> tuple(m, VectorZpn(params.n, 0));
  mpz_class hits = 0, tuples = 0;
  do {
    VectorZpn diff(params.n, 0);
    for (std::size_t j = 0; j < m; ++j) {
      // (x_j + 1) - (y_j + 1) in {-1, 0, 1}
      const Residue scale = x[j] >= y[j] ? static_cast<Residue>(x[j] - y[j]) : p - 1;
      for (std::size_t k = 0; k < params.n; ++k)
        diff[k] = add_mod(diff[k], mul_mod(scale, tuple[j][k], p), p);
    }
    if (std::all_of(diff.begin(), diff.end(), [](Residue r) { return r == 0; })) ++hits;
    ++tuples;
  } while (detail::next_tuple(tuple, p));

  mpq_class out(hits, tuples);
  out.canonicalize();
  return out;
}

// ---------------------------------------------------------------------------
// Sampling devices.

struct DeviceSample {
  BitString bits;
  GroupElement value;  // eval_hash01(spec, bits)
};

/// One draw from the hidden-function device: uniform bits, hashed.
inline DeviceSample hidden_function_device(const Hash01Spec& spec, RandomSource& rng) {
  BitString bits(spec.coefficients.size());
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.below(2));
  GroupElement value = eval_hash01(spec, bits);
  return DeviceSample{std::move(bits), std::move(value)};
}

/// Uniform constrained instance: coefficients then rhs drawn uniformly from
/// C_{p,n}, all variables under the given preset.
inline CiseInstance random_cise(const GroupParams& params, std::size_t m,
                                VariableConstraint::Kind preset, RandomSource& rng) {
  if (params.p < 3) throw EvenModulus("constrained instances need an odd modulus");
  if (m < 1) throw EmptyProduct("equation needs at least one coefficient");
  VariableConstraint constraint = VariableConstraint::free();
  switch (preset) {
    case VariableConstraint::Kind::Preset12:
      constraint = VariableConstraint::preset12();
      break;
    case VariableConstraint::Kind::Preset123:
      if (params.p < 5) throw ModulusTooSmall("candidate unit 3 needs p >= 5");
      constraint = VariableConstraint::preset123();
      break;
    default:
      throw InvariantViolation("random instances use a candidate preset");
  }
  std::vector<GroupElement> coefficients;
  coefficients.reserve(m);
  for (std::size_t i = 0; i < m; ++i) coefficients.push_back(rng.central_coefficient(params));
  GroupElement rhs = rng.central_coefficient(params);
  return make_cise(make_spherical(params, std::move(coefficients), std::move(rhs)),
                   std::vector<VariableConstraint>(m, constraint));
}

}  // namespace sphereq
