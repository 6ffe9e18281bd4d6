#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mmfloor/cone.hpp"
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

TEST_CASE("containment by LP feasibility") {
  SpacePtr s = half_half();
  MarketCone cone = one_gen(s, {Rat(1), Rat(-1)}, ConeMode::Cone);
  MarketCone sub = one_gen(s, {Rat(1), Rat(-1)}, ConeMode::Subspace);

  CHECK(contains(cone, RandomVariable(s, {Rat(2), Rat(-2)})));
  CHECK_FALSE(contains(cone, RandomVariable(s, {Rat(-1), Rat(1)})));
  CHECK(contains(sub, RandomVariable(s, {Rat(-1), Rat(1)})));
  CHECK(contains(cone, RandomVariable::zero(s)));
  CHECK(contains(sub, RandomVariable::zero(s)));

  MarketCone cmp = one_gen(s, {Rat(1), Rat(-1)}, ConeMode::ConeMinusPositives);
  CHECK(contains(cmp, RandomVariable(s, {Rat(0), Rat(-3)})));
  CHECK_FALSE(contains(cmp, RandomVariable(s, {Rat(2), Rat(-1)})));

  SpacePtr other = half_half();
  CHECK_THROWS_AS(contains(cone, RandomVariable::zero(other)), std::invalid_argument);
}

TEST_CASE("no-arbitrage detection") {
  SpacePtr s = half_half();
  MarketCone bad = one_gen(s, {Rat(1), Rat(0)}, ConeMode::Cone);
  const NoArbitrageResult res = no_arbitrage_check(bad);
  CHECK_FALSE(res.no_arbitrage);
  REQUIRE(res.witness.has_value());
  CHECK(res.witness->nonnegative());
  CHECK_FALSE(res.witness->is_zero());
  CHECK(res.witness->values() == std::vector<Rat>{Rat(1), Rat(0)});
  CHECK(contains(bad, *res.witness));

  MarketCone good = one_gen(s, {Rat(1), Rat(-1)}, ConeMode::Cone);
  CHECK(no_arbitrage_check(good).no_arbitrage);

  // The built-in families are arbitrage-free at every level.
  for (int level = 1; level <= 5; ++level) {
    CHECK(no_arbitrage_check(build_example2(level).cone).no_arbitrage);
    CHECK(no_arbitrage_check(build_example3(level).cone).no_arbitrage);
  }

  // The empty cone {0} trivially passes.
  MarketCone zero(s, {}, ConeMode::Cone);
  CHECK(no_arbitrage_check(zero).no_arbitrage);
}

TEST_CASE("no-arbitrage is invariant under positive generator rescaling") {
  testing::Gen gen(6001);
  for (int trial = 0; trial < 30; ++trial) {
    SpacePtr s = gen.space(gen.uniform(2, 5));
    MarketCone cone = gen.cone(s, 3);
    std::vector<RandomVariable> scaled;
    for (const RandomVariable& g : cone.generators())
      scaled.push_back(g.scaled(gen.positive_dyadic()));
    MarketCone cone2(s, std::move(scaled), cone.mode());
    CHECK(no_arbitrage_check(cone).no_arbitrage == no_arbitrage_check(cone2).no_arbitrage);
  }
}

TEST_CASE("unit-ball membership is the atomwise floor at -1") {
  testing::Gen gen(6002);
  const TruncationSpec ball = TruncationSpec::unit_ball();
  for (int trial = 0; trial < 40; ++trial) {
    SpacePtr s = gen.space(gen.uniform(1, 6));
    MarketCone cone(s, {}, ConeMode::Subspace);
    RandomVariable x = gen.rv(s);
    CHECK(membership_in_truncation(cone, ball, x) == (x.min_value() >= -1));
  }
}

TEST_CASE("eps-sequence membership thresholds are non-strict") {
  SpacePtr s = make_space({"a", "b"}, {Rat(1, 4), Rat(3, 4)});
  MarketCone cone(s, {}, ConeMode::Subspace);
  RandomVariable x(s, {Rat(-2), Rat(0)});  // P(x- >= 1) = P(x- >= 2) = 1/4
  CHECK(membership_in_truncation(cone, TruncationSpec::eps_sequence(EpsSequence({Rat(1, 4), Rat(1, 4)})), x));
  CHECK_FALSE(membership_in_truncation(
      cone, TruncationSpec::eps_sequence(EpsSequence({Rat(1, 4), Rat(1, 8)})), x));
  // Levels beyond the list length are unconstrained.
  CHECK(membership_in_truncation(cone, TruncationSpec::eps_sequence(EpsSequence({Rat(1, 4)})), x));

  // Nonnegative elements belong to every truncation.
  RandomVariable up(s, {Rat(100), Rat(0)});
  CHECK(membership_in_truncation(cone, TruncationSpec::unit_ball(), up));
  CHECK(membership_in_truncation(
      cone, TruncationSpec::eps_sequence(EpsSequence({Rat(1, 64)})), up));
  CHECK(membership_in_truncation(
      cone,
      TruncationSpec::orlicz(NFunction({{Rat(0), Rat(0)}, {Rat(1, 2), Rat(0)}, {Rat(1), Rat(1)}},
                                       Rat(2), Rat(1))),
      up));
}

TEST_CASE("third family: unit-ball members obey the coefficient bounds") {
  // z = gamma_1 x_1 + gamma_N x_N with gamma_1 = -1/2, gamma_N = 3/2 touches
  // the floor -1 on B_1 and on the joint event; it is a unit-ball member and
  // the induced bounds -gamma_n 2^n <= 1 and sum gamma_n <= 1 hold.
  const Example3Market market = build_example3(4);
  const auto& gens = market.cone.generators();
  const RandomVariable z = gens[0].scaled(Rat(-1, 2)) + gens[3].scaled(Rat(3, 2));
  CHECK(membership_in_truncation(market.cone, TruncationSpec::unit_ball(), z));
  CHECK(z.min_value() >= -1);
  const std::vector<Rat> gamma = {Rat(-1, 2), Rat(0), Rat(0), Rat(3, 2)};
  Rat total(0);
  for (std::size_t n = 0; n < gamma.size(); ++n) {
    CHECK(-gamma[n] * pow2(static_cast<long>(n + 1)) <= 1);
    total += gamma[n];
  }
  CHECK(total <= 1);
}

TEST_CASE("third family: small index sums clear the eps truncations") {
  // x_{n_1} + ... + x_{n_m} with sum 2^-n_i below every eps level.
  const Example3Market market = build_example3(6);
  const auto& gens = market.cone.generators();
  const RandomVariable x = gens[3] + gens[4] + gens[5];  // indices 4, 5, 6
  // Tail budget: 2^-4 + 2^-5 + 2^-6 = 7/64 <= min(eps_1..eps_3) below.
  const EpsSequence eps({Rat(1, 8), Rat(1, 8), Rat(7, 64)});
  CHECK(membership_in_truncation(market.cone, TruncationSpec::eps_sequence(eps), x));
}

TEST_CASE("split identity holds on random cone elements for all three kinds") {
  testing::Gen gen(6003);
  const NFunction phi({{Rat(0), Rat(0)}, {Rat(1, 2), Rat(0)}, {Rat(1), Rat(1)}}, Rat(2), Rat(1));
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    SpacePtr s = gen.space(gen.uniform(2, 5));
    MarketCone cone = gen.cone(s, 3);
    std::vector<RandomVariable> samples;
    for (int i = 0; i < 3; ++i) samples.push_back(gen.cone_element(cone));
    CHECK(verify_cv_identity(cone, TruncationSpec::unit_ball(), samples));
    CHECK(verify_cv_identity(
        cone, TruncationSpec::eps_sequence(EpsSequence({Rat(1, 2), Rat(1, 4), Rat(1, 8)})),
        samples));
    CHECK(verify_cv_identity(cone, TruncationSpec::orlicz(phi), samples));
    ++checked;
  }
  CHECK(checked == 100);

  SpacePtr s = half_half();
  MarketCone cone = one_gen(s, {Rat(1), Rat(-1)}, ConeMode::Cone);
  const RandomVariable outside(s, {Rat(-1), Rat(1)});
  CHECK_THROWS_AS(
      verify_cv_identity(cone, TruncationSpec::unit_ball(), std::vector{outside}),
      std::invalid_argument);
}

TEST_CASE("canonical split is optimal: brute force over clipped h grids") {
  // On tiny spaces, enumerate h over a dyadic grid and confirm that no
  // split beats h = x+ for eps-sequence membership of x - h.
  testing::Gen gen(6004);
  for (int trial = 0; trial < 8; ++trial) {
    SpacePtr s = gen.space(gen.uniform(2, 3));
    RandomVariable x = gen.rv(s, 1);
    const EpsSequence eps({Rat(1, 2), Rat(1, 4)});

    const RandomVariable canonical = -x.neg_part();
    bool canonical_ok = true;
    for (std::size_t k = 1; k <= eps.size(); ++k)
      if (tail_probability(canonical.abs(), Rat(static_cast<long>(k))) > eps[k - 1])
        canonical_ok = false;

    bool any_ok = false;
    const int steps = 8;
    const Rat span = x.abs().max_value() + 2;
    std::vector<int> grid(s->size(), 0);
    while (true) {
      std::vector<Rat> h(s->size());
      for (std::size_t i = 0; i < s->size(); ++i) h[i] = Rat(grid[i]) * span / steps;
      RandomVariable v = x - RandomVariable(s, std::move(h));
      bool ok = true;
      for (std::size_t k = 1; k <= eps.size(); ++k)
        if (tail_probability(v.abs(), Rat(static_cast<long>(k))) > eps[k - 1]) ok = false;
      if (ok) {
        any_ok = true;
        break;
      }
      std::size_t d = 0;
      while (d < grid.size() && ++grid[d] > steps) grid[d++] = 0;
      if (d == grid.size()) break;
    }
    CHECK(any_ok == canonical_ok);
  }
}

TEST_CASE("truncations are solid along the scaling family") {
  testing::Gen gen(6005);
  const NFunction phi({{Rat(0), Rat(0)}, {Rat(1, 2), Rat(0)}, {Rat(1), Rat(1)}}, Rat(2), Rat(1));
  const TruncationSpec specs[] = {
      TruncationSpec::unit_ball(),
      TruncationSpec::eps_sequence(EpsSequence({Rat(1, 2), Rat(1, 4)})),
      TruncationSpec::orlicz(phi)};
  for (int trial = 0; trial < 30; ++trial) {
    SpacePtr s = gen.space(gen.uniform(2, 5));
    MarketCone cone = gen.cone(s, 3);
    RandomVariable x = gen.cone_element(cone);
    const Rat alpha(gen.uniform(0, 4), 4);
    const RandomVariable y = x.scaled(alpha);  // y in C, y- <= x- atomwise
    for (const TruncationSpec& t : specs)
      if (membership_in_truncation(cone, t, x)) CHECK(membership_in_truncation(cone, t, y));
  }
}
