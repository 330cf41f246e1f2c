#include <catch2/catch_amalgamated.hpp>

#include "sphereq/agwp.hpp"
#include "sphereq/equations.hpp"
#include "sphereq/random.hpp"
#include "sphereq/reductions.hpp"

using namespace sphereq;

namespace {

// every x over the variant alphabet, in sweep-independent enumeration order
std::vector<ShortVector> all_short_vectors(std::size_t m, SisVariant variant) {
  const std::vector<std::int8_t> alphabet =
      variant == SisVariant::ZeroOne ? std::vector<std::int8_t>{0, 1}
                                     : std::vector<std::int8_t>{-1, 0, 1};
  std::vector<ShortVector> out;
  std::vector<std::size_t> idx(m, 0);
  for (;;) {
    ShortVector x;
    for (std::size_t i = 0; i < m; ++i) x.push_back(alphabet[idx[i]]);
    out.push_back(std::move(x));
    std::size_t i = m;
    bool done = true;
    while (i-- > 0) {
      if (++idx[i] < alphabet.size()) {
        done = false;
        break;
      }
      idx[i] = 0;
    }
    if (done || m == 0) return out;
  }
}

}  // namespace

TEST_CASE("subset-sum construction and oracle") {
  const GroupParams g31 = make_params(3, 1);
  REQUIRE_THROWS_AS(make_ssp(g31, {}, {0}), EmptyProduct);
  REQUIRE_THROWS_AS(make_ssp(g31, {{1, 0}}, {0}), LengthMismatch);
  REQUIRE_THROWS_AS(make_ssp(g31, {{4}}, {0}), InvariantViolation);

  const auto inst = make_ssp(g31, {{1}, {2}}, {0});
  // enumeration is ascending binary with the leftmost slot most significant,
  // so the empty subset comes first and matches target 0
  REQUIRE(ssp_bruteforce(inst) == ShortVector{0, 0});

  const auto inst2 = make_ssp(g31, {{1}, {2}}, {1});
  REQUIRE(ssp_bruteforce(inst2) == ShortVector{1, 0});  // (0,1) sums to 2, (1,0) hits first
  const auto inst3 = make_ssp(g31, {{1}, {1}}, {2});
  REQUIRE(ssp_bruteforce(inst3) == ShortVector{1, 1});
  const auto inst4 = make_ssp(g31, {{1}}, {2});
  REQUIRE(!ssp_bruteforce(inst4));

  REQUIRE_THROWS_AS(ssp_bruteforce(inst, 2), BudgetExceeded);
}

TEST_CASE("subset sum to spherical equation") {
  const GroupParams g31 = make_params(3, 1);
  const auto red = ssp_to_spherical(make_ssp(g31, {{1}, {2}}, {0}));
  REQUIRE(red.equivalence_exact);
  // coefficients (v_i, 1); rhs = target + sum v_i = 0 + 1 + 2 = 0
  REQUIRE(red.instance.coefficients == std::vector<GroupElement>{GroupElement{g31, {1}, 1}, GroupElement{g31, {2}, 1}});
  REQUIRE(red.instance.rhs == identity(g31));

  const GroupParams g51 = make_params(5, 1);
  REQUIRE(!ssp_to_spherical(make_ssp(g51, {{1}}, {0})).equivalence_exact);

  // exhaustive two-sided agreement at p = 3, n = 1, m = 2
  for (Residue v1 = 0; v1 < 3; ++v1)
    for (Residue v2 = 0; v2 < 3; ++v2)
      for (Residue t = 0; t < 3; ++t) {
        const auto ssp = make_ssp(g31, {{v1}, {v2}}, {t});
        const bool ssp_solvable = ssp_bruteforce(ssp).has_value();
        const auto spherical = ssp_to_spherical(ssp).instance;
        const auto report = solve_bruteforce(unconstrained(spherical), 1u << 20);
        REQUIRE(report.status != Status::Unknown);
        REQUIRE(ssp_solvable == (report.status == Status::Solvable));
      }
}

TEST_CASE("short-vector arithmetic") {
  const auto sis = make_sis(5, 2, {{1, 0}, {0, 1}, {2, 3}}, SisVariant::PlusMinusOne);
  REQUIRE(sis_apply(sis, {1, 0, -1}) == VectorZpn{4, 2});  // (1,0) - (2,3) = (-1,-3)
  REQUIRE_THROWS_AS(sis_apply(sis, {1, 0}), LengthMismatch);
  REQUIRE(sis_trivial({0, 0, 0}));
  REQUIRE(!sis_trivial({0, 1, 0}));
  REQUIRE_THROWS_AS(make_sis(4, 1, {}, SisVariant::ZeroOne), CompositeModulus);
  REQUIRE_THROWS_AS(make_sis(5, 1, {{6}}, SisVariant::ZeroOne), InvariantViolation);
}

TEST_CASE("short-vector oracles prefer fewer nonzeros") {
  // homogeneous: trivial solutions are excluded
  const auto hom = make_sis(3, 1, {{1}, {2}}, SisVariant::PlusMinusOne);
  REQUIRE(sis_bruteforce(hom) == ShortVector{1, 1});

  // weight beats position: (0,0,1)+... vs heavier earlier tuples
  const auto hom2 = make_sis(5, 1, {{1}, {2}, {0}}, SisVariant::PlusMinusOne);
  REQUIRE(sis_bruteforce(hom2) == ShortVector{0, 0, 1});

  // at equal weight, rank order 0 < 1 < -1 per position: of the four
  // weight-2 solutions, (0,1,0,-1) precedes (1,0,-1,0) under that order
  const auto hom3 = make_sis(5, 1, {{2}, {1}, {2}, {1}}, SisVariant::PlusMinusOne);
  REQUIRE(sis_bruteforce(hom3) == ShortVector{0, 1, 0, -1});

  const auto none = make_sis(5, 1, {{1}}, SisVariant::ZeroOne);
  REQUIRE(!sis_bruteforce(none));

  // inhomogeneous: the trivial vector is a legal answer
  const auto isis = make_isis(make_sis(3, 1, {{1}, {2}}, SisVariant::ZeroOne), {0});
  REQUIRE(sis_bruteforce(isis) == ShortVector{0, 0});
}

TEST_CASE("isis to constrained equation, pinned example") {
  const auto isis = make_isis(make_sis(3, 1, {{1}, {2}}, SisVariant::ZeroOne), {0});
  const auto red = isis_to_cise(isis);
  const GroupParams g31 = make_params(3, 1);

  REQUIRE(red.cise.base.coefficients ==
          std::vector<GroupElement>{GroupElement{g31, {1}, 1}, GroupElement{g31, {2}, 1}});
  REQUIRE(red.cise.base.rhs == identity(g31));  // 0 + 1 + 2 = 0 mod 3
  for (const auto& c : red.cise.constraints) REQUIRE(c.kind() == VariableConstraint::Kind::Preset12);

  // x = (1, 1): A x = 0 = target; the mapped assignment solves the equation
  const Assignment a = red.x_to_z(ShortVector{1, 1});
  REQUIRE(a.values == std::vector<GroupElement>{GroupElement{g31, {0}, 2}, GroupElement{g31, {0}, 2}});
  REQUIRE(verify(red.cise, a));
  REQUIRE(red.z_to_x(a) == ShortVector{1, 1});
}

TEST_CASE("isis to constrained equation, solution sets coincide") {
  RandomSource rng(17);
  for (std::uint64_t p : {3ull, 5ull}) {
    for (std::size_t n = 1; n <= 2; ++n) {
      const GroupParams params = make_params(p, n);
      for (std::size_t m = 1; m <= 4; ++m) {
        for (int trial = 0; trial < 10; ++trial) {
          std::vector<VectorZpn> columns;
          for (std::size_t i = 0; i < m; ++i) columns.push_back(rng.vector(params));
          const auto isis = make_isis(make_sis(p, n, std::move(columns), SisVariant::ZeroOne),
                                      rng.vector(params));
          const auto red = isis_to_cise(isis);

          for (const auto& x : all_short_vectors(m, SisVariant::ZeroOne)) {
            const bool solves_isis = sis_apply(isis.base, x) == isis.target;
            const Assignment a = red.x_to_z(x);
            REQUIRE(solves_isis == verify(red.cise, a));
            REQUIRE(red.z_to_x(a) == x);  // bijective on the candidate cube
          }
        }
      }
    }
  }

  REQUIRE_THROWS_AS(isis_to_cise(make_isis(make_sis(3, 1, {{1}}, SisVariant::PlusMinusOne), {0})),
                    WrongVariant);
  REQUIRE_THROWS_AS(isis_to_cise(make_isis(make_sis(2, 1, {{1}}, SisVariant::ZeroOne), {0})),
                    EvenModulus);
}

TEST_CASE("homogeneous sis to three-candidate equation") {
  RandomSource rng(23);
  const std::uint64_t p = 5;
  for (std::size_t n = 1; n <= 2; ++n) {
    const GroupParams params = make_params(p, n);
    for (std::size_t m = 1; m <= 4; ++m) {
      for (int trial = 0; trial < 10; ++trial) {
        std::vector<VectorZpn> columns;
        for (std::size_t i = 0; i < m; ++i) columns.push_back(rng.vector(params));
        const auto sis = make_sis(p, n, std::move(columns), SisVariant::PlusMinusOne);
        const auto red = sis_to_cise123(sis);
        for (const auto& c : red.cise.constraints)
          REQUIRE(c.kind() == VariableConstraint::Kind::Preset123);

        for (const auto& x : all_short_vectors(m, SisVariant::PlusMinusOne)) {
          const bool solves = sis_apply(sis, x) == VectorZpn(n, 0);
          const Assignment a = red.x_to_z(x);
          REQUIRE(solves == verify(red.cise, a));
          REQUIRE(red.z_to_x(a) == x);
        }
      }
    }
  }

  REQUIRE_THROWS_AS(sis_to_cise123(make_sis(5, 1, {{1}}, SisVariant::ZeroOne)), WrongVariant);
  REQUIRE_THROWS_AS(sis_to_cise123(make_sis(3, 1, {{1}}, SisVariant::PlusMinusOne)),
                    ModulusTooSmall);
}

TEST_CASE("guess-an-index reduction") {
  const auto sis = make_sis(3, 1, {{1}, {2}}, SisVariant::ZeroOne);

  SECTION("pinned example: delete column 1, retarget to its negation") {
    const auto red = isis_from_sis_guess(sis, 1);
    REQUIRE(red.guessed_index == 1);
    REQUIRE(red.instance.base.columns == std::vector<VectorZpn>{{2}});
    REQUIRE(red.instance.target == VectorZpn{2});  // -1 mod 3
    REQUIRE(red.reinsert(ShortVector{1}) == ShortVector{1, 1});
  }

  SECTION("index bounds are 1-based") {
    REQUIRE_THROWS_AS(isis_from_sis_guess(sis, 0), IndexOutOfRange);
    REQUIRE_THROWS_AS(isis_from_sis_guess(sis, 3), IndexOutOfRange);
    REQUIRE_THROWS_AS(isis_from_sis_guess(make_sis(3, 1, {{1}}, SisVariant::PlusMinusOne), 1),
                      WrongVariant);
  }

  SECTION("reinserted solutions solve the original system") {
    RandomSource rng(31);
    const GroupParams params = make_params(5, 2);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t m = 2 + rng.below(3);
      std::vector<VectorZpn> columns;
      for (std::size_t i = 0; i < m; ++i) columns.push_back(rng.vector(params));
      const auto full = make_sis(5, 2, std::move(columns), SisVariant::ZeroOne);
      for (std::size_t guess = 1; guess <= m; ++guess) {
        const auto red = isis_from_sis_guess(full, guess);
        REQUIRE(red.instance.base.columns.size() == m - 1);
        const auto sol = sis_bruteforce(red.instance);
        if (!sol) continue;
        const ShortVector x = red.reinsert(*sol);
        REQUIRE(x.size() == m);
        REQUIRE(x[guess - 1] == 1);
        REQUIRE(sis_apply(full, x) == VectorZpn(2, 0));
      }
    }
  }

  SECTION("single column degenerates to an empty system") {
    const auto red = isis_from_sis_guess(make_sis(3, 1, {{0}}, SisVariant::ZeroOne), 1);
    REQUIRE(red.instance.base.columns.empty());
    const auto sol = sis_bruteforce(red.instance);  // empty x, target must be 0
    REQUIRE(sol == ShortVector{});
    REQUIRE(red.reinsert(*sol) == ShortVector{1});
  }
}

TEST_CASE("constrained equation to graph word problem") {
  const GroupParams g31 = make_params(3, 1);
  const auto base = make_spherical(g31, {GroupElement{g31, {1}, 1}, GroupElement{g31, {2}, 1}},
                                   identity(g31));
  const auto cise = make_cise(base, {VariableConstraint::preset12(), VariableConstraint::preset12()});
  const auto agwp = cise_to_agwp(cise);

  REQUIRE(agwp.vertex_count == 4);
  REQUIRE(agwp.alpha == 0);
  REQUIRE(agwp.omega == 3);
  REQUIRE(agwp.edges.size() == 5);  // 2 + 2 candidates + the closing rhs edge
  REQUIRE(agwp.edges[0].tag == "z=0 1");
  REQUIRE(agwp.edges[1].tag == "z=0 2");
  REQUIRE(agwp.edges.back().tag == "rhs");
  REQUIRE(agwp.edges.back().label == inverse(base.rhs));
  REQUIRE_NOTHROW(validate_dag(agwp));

  const auto report = agwp_solve(agwp, 1u << 20);
  REQUIRE(report.status == Status::Solvable);
  const Assignment a = assignment_from_agwp_path(cise, *report.witness_edges);
  REQUIRE(verify(cise, a));

  // malformed paths are rejected
  REQUIRE_THROWS_AS(assignment_from_agwp_path(cise, {0, 1}), LengthMismatch);
  REQUIRE_THROWS_AS(assignment_from_agwp_path(cise, {0, 0, 4}), IndexOutOfRange);

  // tight budget trips the edge-count guard
  REQUIRE_THROWS_AS(cise_to_agwp(cise, 2), BudgetExceeded);
}

TEST_CASE("equation and graph decisions agree on random instances") {
  RandomSource rng(47);
  const GroupParams g31 = make_params(3, 1);
  const auto all = all_elements(g31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + rng.below(2);
    std::vector<GroupElement> cs;
    std::vector<VariableConstraint> constraints;
    for (std::size_t i = 0; i < m; ++i) {
      cs.push_back(rng.element(g31));
      // explicit candidate set of size 1 or 2
      std::vector<GroupElement> set{all[rng.below(all.size())]};
      if (rng.below(2)) set.push_back(all[rng.below(all.size())]);
      constraints.push_back(VariableConstraint::explicit_set(std::move(set)));
    }
    const auto cise = make_cise(make_spherical(g31, std::move(cs), rng.element(g31)),
                                std::move(constraints));
    const auto brute = solve_bruteforce(cise, 1u << 20);
    const auto graph = agwp_solve(cise_to_agwp(cise), 1u << 20);
    REQUIRE(brute.status == graph.status);
    if (graph.status == Status::Solvable)
      REQUIRE(verify(cise, assignment_from_agwp_path(cise, *graph.witness_edges)));
  }
}
