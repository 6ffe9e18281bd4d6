#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mmfloor/domination.hpp"
#include "mmfloor/examples.hpp"
#include "test_support.hpp"

using namespace mmfloor;

namespace {

SpacePtr half_half() { return make_space({"a", "b"}, {Rat(1, 2), Rat(1, 2)}); }

MarketCone one_gen(SpacePtr s, std::vector<Rat> g, ConeMode mode) {
  std::vector<RandomVariable> gens;
  gens.emplace_back(s, std::move(g));
  return MarketCone(std::move(s), std::move(gens), mode);
}

}  // namespace

TEST_CASE("third family unit-ball sup matches the closed form") {
  // Trading gamma_1 down to its floor -1/2 frees budget for gamma_N, giving
  // 5/4 - 3 * 2^-(N+1) for N >= 2 and 1/2 at N = 1; always under 4/3.
  for (int N = 1; N <= 6; ++N) {
    const Example3Market market = build_example3(N);
    const SupResult s = sup_over_truncation(market.cone, market.f, TruncationSpec::unit_ball());
    REQUIRE_FALSE(s.unbounded);
    const Rat expected = N == 1 ? Rat(1, 2) : Rat(5, 4) - 3 * pow2(-(N + 1));
    CHECK(s.value == expected);
    CHECK(s.value <= Rat(4, 3));
    REQUIRE(s.maximizer.has_value());
    CHECK(s.maximizer->min_value() >= -1);
    CHECK(pairing(*s.maximizer, market.f) == s.value);
  }
}

TEST_CASE("first family discretization: the half-space cone caps the sup at one") {
  // The half-space {x : <x, P> + x(core) <= 0} is kernel(w) - positives for
  // w = p + e_core, which is exactly expressible in cone-minus-positives
  // mode. Its unit-ball sup against f = 1 is 1 = the mass of the extra
  // point charge, and g = 1 + e_core / p_core dominates f in the polar.
  std::vector<Rat> eps = {Rat(1, 2), Rat(1, 4), Rat(1, 8)};
  const Example1Family fam = build_example1(3, eps);
  const std::size_t core = 3;  // left, L1, L2, core, ...
  REQUIRE(fam.space->label(core) == "core");

  std::vector<Rat> w(fam.space->size());
  for (std::size_t i = 0; i < fam.space->size(); ++i) w[i] = fam.space->prob(i);
  w[core] += 1;

  std::vector<RandomVariable> kernel_basis;
  for (std::size_t i = 0; i < fam.space->size(); ++i) {
    if (i == core) continue;
    std::vector<Rat> v(fam.space->size(), Rat(0));
    v[i] = 1;
    v[core] = -w[i] / w[core];
    kernel_basis.emplace_back(fam.space, std::move(v));
  }
  MarketCone cone(fam.space, std::move(kernel_basis), ConeMode::ConeMinusPositives);

  const RandomVariable ones = RandomVariable::constant(fam.space, Rat(1));
  const SupResult s = sup_over_truncation(cone, ones, TruncationSpec::unit_ball());
  REQUIRE_FALSE(s.unbounded);
  CHECK(s.value == 1);

  const DominationReport report = find_dominating_density(cone, ones);
  REQUIRE(report.dominating_g.has_value());
  CHECK(*report.min_mass == 2);  // E[f] + sup = 1 + 1

  // The density footprint of the point charge: 1 + e_core / p_core.
  std::vector<Rat> gv(fam.space->size(), Rat(1));
  gv[core] += Rat(1) / fam.space->prob(core);
  RandomVariable g(fam.space, std::move(gv));
  for (const RandomVariable& gen : cone.generators()) CHECK(pairing(gen, g) <= 0);
  CHECK(expectation(g) == 2);
}

TEST_CASE("sup over the zero cone is zero") {
  SpacePtr s = half_half();
  MarketCone zero(s, {}, ConeMode::Cone);
  RandomVariable f(s, {Rat(3), Rat(-1)});
  const SupResult res = sup_over_truncation(zero, f, TruncationSpec::unit_ball());
  REQUIRE_FALSE(res.unbounded);
  CHECK(res.value == 0);

  const DominationReport report = find_dominating_density(zero, f);
  REQUIRE(report.dominating_g.has_value());
  CHECK(*report.sup_c1 == 0);
  CHECK((*report.dominating_g)[0] >= f[0]);
  CHECK((*report.dominating_g)[1] >= f[1]);
}

TEST_CASE("paired market: explicit density is optimal for the odd-ones floor") {
  // With f = 1 on odd atoms, eliminating g(2n) = 2^n g(2n-1) via the polar
  // equalities decouples the program; the corner g(2n-1) = 1 is optimal and
  // the minimal mass is (N + 1 - 2^-N)/2. At N = 4 that is 79/32.
  const Example2Market market = build_example2(4);
  auto ones_odd = [](int k) { return k % 2 == 1 ? Rat(1) : Rat(0); };
  const RandomVariable f = market.density(ones_odd);

  const DominationReport report = find_dominating_density(market.cone, f);
  REQUIRE(report.dominating_g.has_value());
  CHECK(*report.min_l1_norm == Rat(79, 32));
  CHECK(*report.min_mass == Rat(79, 32));
  CHECK(*report.sup_c1 == 2);  // N/2, from min_mass - E[f]

  // Independent corner-point oracle over the eliminated program.
  Rat oracle(0);
  for (int n = 1; n <= market.level; ++n) {
    const Rat odd_weight = pow2(-n - 1), even_weight = pow2(-n - 1) * pow2(n);
    oracle += (odd_weight + even_weight) * 1;  // g(2n-1) at its floor 1
  }
  CHECK(oracle == *report.min_l1_norm);

  // The explicit density is feasible with the same mass here.
  const RandomVariable g = example2_g(market, ones_odd);
  CHECK(expectation(g) == *report.min_mass);
}

TEST_CASE("paired market with the all-ones floor, residual included or not") {
  const Example2Market market = build_example2(4);
  auto all_ones = [](int) { return Rat(1); };

  const DominationReport without = find_dominating_density(market.cone, market.density(all_ones));
  REQUIRE(without.dominating_g.has_value());
  CHECK(*without.min_l1_norm == Rat(79, 32));

  const DominationReport with_res =
      find_dominating_density(market.cone, market.density(all_ones, Rat(1)));
  REQUIRE(with_res.dominating_g.has_value());
  CHECK(*with_res.min_l1_norm == Rat(79, 32) + pow2(-4));  // the residual atom adds its mass
}

TEST_CASE("two equal atoms, martingale floor is its own density") {
  SpacePtr s = half_half();
  MarketCone sub = one_gen(s, {Rat(1), Rat(-1)}, ConeMode::Subspace);
  RandomVariable f(s, {Rat(1), Rat(1)});
  const DominationReport report = find_dominating_density(sub, f);
  REQUIRE(report.dominating_g.has_value());
  CHECK(report.dominating_g->values() == std::vector<Rat>{Rat(1), Rat(1)});
  CHECK(*report.min_l1_norm == 1);
}

TEST_CASE("negative floors route through the L1 stage") {
  SpacePtr s = half_half();
  MarketCone sub = one_gen(s, {Rat(1), Rat(-1)}, ConeMode::Subspace);
  RandomVariable f(s, {Rat(-2), Rat(-2)});
  const DominationReport report = find_dominating_density(sub, f);
  REQUIRE(report.dominating_g.has_value());
  // Polar forces g_1 = g_2 >= -2; the L1-smallest choice is g = 0.
  CHECK(report.dominating_g->values() == std::vector<Rat>{Rat(0), Rat(0)});
  CHECK(*report.min_l1_norm == 0);
  CHECK(*report.min_mass == -2);  // mass objective prefers the floor corner
  CHECK(*report.sup_c1 == *report.min_mass - expectation(f));
}

TEST_CASE("infeasible floor under arbitrage yields a scaling certificate") {
  SpacePtr s = half_half();
  MarketCone bad = one_gen(s, {Rat(1), Rat(0)}, ConeMode::Cone);
  RandomVariable f(s, {Rat(1), Rat(1)});
  const DominationReport report = find_dominating_density(bad, f);
  CHECK(report.sup_unbounded);
  CHECK_FALSE(report.dominating_g.has_value());
  REQUIRE(report.certificate.has_value());
  CHECK(report.certificate->nonnegative());
  CHECK_FALSE(report.certificate->is_zero());
  CHECK(report.certificate->max_value() == 1);  // normalized
  CHECK(contains(bad, *report.certificate));
  CHECK(*report.certificate_pairing > 0);

  // The sup side agrees: the unit-ball program is unbounded with a ray.
  const SupResult sup = sup_over_truncation(bad, f, TruncationSpec::unit_ball());
  CHECK(sup.unbounded);
  REQUIRE(sup.ray.has_value());
  CHECK(sup.ray->nonnegative());
  CHECK(pairing(*sup.ray, f) > 0);

  CHECK(duality_check(bad, f));
}

TEST_CASE("arbitrage with a nonpositive floor can still be dominated") {
  // The ray of the arbitrage never pays against this f, so the sup stays
  // finite and a density exists; equivalence must hold on this side too.
  SpacePtr s = half_half();
  MarketCone bad = one_gen(s, {Rat(1), Rat(0)}, ConeMode::Cone);
  RandomVariable f(s, {Rat(-1), Rat(-1)});
  const DominationReport report = find_dominating_density(bad, f);
  REQUIRE(report.dominating_g.has_value());
  CHECK_FALSE(report.sup_unbounded);
  CHECK(duality_check(bad, f));
}

TEST_CASE("duality equivalence on randomized markets") {
  testing::Gen gen(8001);
  for (int trial = 0; trial < 200; ++trial) {
    SpacePtr s = gen.space(gen.uniform(1, 6));
    MarketCone cone = gen.cone(s, 3);
    RandomVariable f = gen.rv(s);
    CHECK(duality_check(cone, f));
  }
}

TEST_CASE("sup scales linearly and domination is scale-invariant") {
  testing::Gen gen(8002);
  for (int trial = 0; trial < 40; ++trial) {
    SpacePtr s = gen.space(gen.uniform(1, 5));
    MarketCone cone = gen.cone(s, 3);
    RandomVariable f = gen.rv(s);
    const Rat alpha = gen.positive_dyadic();
    const SupResult a = sup_over_truncation(cone, f, TruncationSpec::unit_ball());
    const SupResult b = sup_over_truncation(cone, f.scaled(alpha), TruncationSpec::unit_ball());
    CHECK(a.unbounded == b.unbounded);
    if (!a.unbounded) CHECK(b.value == alpha * a.value);
    CHECK(find_dominating_density(cone, f).dominating_g.has_value() ==
          find_dominating_density(cone, f.scaled(alpha)).dominating_g.has_value());
  }
}

TEST_CASE("witness sup grows with the eps budget") {
  const Example3Market market = build_example3(8);
  std::vector<RandomVariable> candidates;
  for (int m = 1; m <= 6; ++m) {
    auto w = divergence_witness_eps(market.cone, market.f,
                                    EpsSequence({Rat(1, 2), Rat(1, 4)}), Rat(m) - Rat(3, 2));
    if (w) candidates.push_back(*w);
  }
  const EpsSequence tight({Rat(1, 32), Rat(1, 32)});
  const EpsSequence loose({Rat(1, 2), Rat(1, 2)});
  const SupResult small = sup_over_truncation(
      market.cone, market.f, TruncationSpec::eps_sequence(tight), candidates);
  const SupResult big = sup_over_truncation(
      market.cone, market.f, TruncationSpec::eps_sequence(loose), candidates);
  CHECK(small.value <= big.value);

  // On instances whose unit ball sits inside the eps set, the sup can only
  // grow when passing from the ball to the eps truncation over members.
  const SupResult ball = sup_over_truncation(market.cone, market.f, TruncationSpec::unit_ball());
  REQUIRE(ball.maximizer.has_value());
  if (membership_in_truncation(market.cone, TruncationSpec::eps_sequence(loose),
                               *ball.maximizer)) {
    const SupResult with_ball_opt =
        sup_over_truncation(market.cone, market.f, TruncationSpec::eps_sequence(loose),
                            std::vector<RandomVariable>{*ball.maximizer});
    CHECK(with_ball_opt.value >= ball.value);
  }
}

TEST_CASE("divergence witness construction") {
  SUBCASE("beta 3 with dyadic eps") {
    const Example3Market market = build_example3(12);
    std::vector<Rat> eps;
    for (long k = 1; k <= 5; ++k) eps.push_back(pow2(-k));
    const auto w = divergence_witness_eps(market.cone, market.f, EpsSequence(eps), Rat(3));
    REQUIRE(w.has_value());
    // m = 5, smallest budget-fitting indices are 6..10.
    CHECK(pairing(*w, market.f) == Rat(5) - (pow2(-5) - pow2(-10)));
    CHECK(pairing(*w, market.f) > 4);
    CHECK(membership_in_truncation(market.cone, TruncationSpec::eps_sequence(EpsSequence(eps)),
                                   *w));
  }
  SUBCASE("beta 0 with unit eps") {
    const Example3Market market = build_example3(3);
    const auto w = divergence_witness_eps(market.cone, market.f,
                                          EpsSequence({Rat(1), Rat(1)}), Rat(0));
    REQUIRE(w.has_value());
    // m = 2, indices 1 and 2.
    CHECK(pairing(*w, market.f) == Rat(2) - Rat(3, 4));
    CHECK(pairing(*w, market.f) >= 1);
  }
  SUBCASE("level too small") {
    const Example3Market market = build_example3(1);
    CHECK_FALSE(divergence_witness_eps(market.cone, market.f,
                                       EpsSequence({Rat(1, 2), Rat(1, 4)}), Rat(3))
                    .has_value());
  }
}

TEST_CASE("sweep trajectories") {
  std::vector<int> levels;
  for (int l = 1; l <= 8; ++l) levels.push_back(l);

  SUBCASE("odd-ones floor diverges in L1") {
    const SweepResult sweep = truncation_sweep(ExampleKind::Example2, ex2_rule_ones_odd(),
                                               TruncationSpec::unit_ball(), levels);
    REQUIRE(sweep.rows.size() == levels.size());
    for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
      REQUIRE(sweep.rows[i].min_l1.has_value());
      const int N = sweep.rows[i].level;
      CHECK(*sweep.rows[i].min_l1 == (Rat(N + 1) - pow2(-N)) / 2);
      if (i) CHECK(*sweep.rows[i].min_l1 > *sweep.rows[i - 1].min_l1);
    }
    CHECK(sweep.min_l1_diverging);
    CHECK(sweep.sup_diverging);  // sup is N/2
  }

  SUBCASE("geometric floor stays bounded by the explicit density") {
    const SweepResult sweep = truncation_sweep(ExampleKind::Example2, ex2_rule_geometric_odd(),
                                               TruncationSpec::unit_ball(), levels);
    const Ex2DensityRule rule = ex2_rule_geometric_odd();
    for (const SweepRow& row : sweep.rows) {
      REQUIRE(row.min_l1.has_value());
      const Example2Market market = build_example2(row.level);
      const RandomVariable g = example2_g(market, rule.f, rule.residual);
      CHECK(*row.min_l1 <= expectation(g.abs()));
      CHECK(*row.min_l1 <= Rat(2, 3));
    }
  }

  SUBCASE("third family unit-ball sup stays under 4/3") {
    const SweepResult sweep = truncation_sweep(ExampleKind::Example3, ex2_rule_ones_odd(),
                                               TruncationSpec::unit_ball(), levels);
    for (const SweepRow& row : sweep.rows) {
      REQUIRE(row.sup.has_value());
      CHECK(*row.sup <= Rat(4, 3));
    }
  }

  SUBCASE("third family witness ladder climbs through the eps truncation") {
    std::vector<int> big_levels = {4, 6, 8, 10};
    std::vector<Rat> eps;
    for (long k = 1; k <= 4; ++k) eps.push_back(pow2(-k));
    const SweepResult sweep =
        truncation_sweep(ExampleKind::Example3, ex2_rule_ones_odd(),
                         TruncationSpec::eps_sequence(EpsSequence(eps)), big_levels);
    for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
      REQUIRE(sweep.rows[i].sup.has_value());
      CHECK(*sweep.rows[i].sup > *sweep.rows[i - 1].sup);
    }
    CHECK(sweep.sup_diverging);
  }

  SUBCASE("input validation") {
    CHECK_THROWS_AS(truncation_sweep(ExampleKind::Example1, ex2_rule_ones_odd(),
                                     TruncationSpec::unit_ball(), levels),
                    std::invalid_argument);
    std::vector<int> bad = {3, 2};
    CHECK_THROWS_AS(truncation_sweep(ExampleKind::Example2, ex2_rule_ones_odd(),
                                     TruncationSpec::unit_ball(), bad),
                    std::invalid_argument);
  }
}
