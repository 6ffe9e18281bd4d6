#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mmfloor/cone.hpp"
#include "mmfloor/prob.hpp"

namespace mmfloor {

enum class ExampleKind { Example1, Example2, Example3 };

// A member of one of the built-in market families, cut at a finite level.
struct TruncatedFamily {
  ExampleKind kind;
  int level;  // >= 1
};

// Two-period market on paired atoms:
//   atoms "1".."2N" plus a residual atom "rest" carrying the leftover mass
//   2^-N on which every asset pays zero,
//   P{2n-1} = P{2n} = 2^-(n+1),
//   generator n pays +1 on atom 2n-1 and -2^-n on atom 2n (subspace mode:
//   portfolios are signed).
// The residual atom keeps the total mass exactly 1 without renormalizing,
// which would perturb every identity the family is built to exhibit.
struct Example2Market {
  SpacePtr space;
  AtomPartition pair_blocks;  // {2n-1, 2n} blocks plus the residual block
  MarketCone cone;
  int level;

  // Density with value f_market(k) on market atom k (1-based, k <= 2N) and
  // the given value on the residual atom.
  RandomVariable density(const std::function<Rat(int)>& f_market,
                         const Rat& residual = Rat(0)) const;
};

Example2Market build_example2(int level);

// The explicit dominating density of this family:
//   g(2n-1) = max{f(2n-1), 2^-n f(2n)},  g(2n) = 2^n g(2n-1),
// and g = residual on the residual atom.
RandomVariable example2_g(const Example2Market& market, const std::function<Rat(int)>& f_market,
                          const Rat& residual = Rat(0));

// Named density rules for sweeps and the CLI.
struct Ex2DensityRule {
  std::string name;
  std::function<Rat(int)> f;  // on market atoms 1..2N
  Rat residual = Rat(0);
};
Ex2DensityRule ex2_rule_ones_odd();       // f(2n-1) = 1, f(2n) = 0
Ex2DensityRule ex2_rule_geometric_odd();  // f(2n-1) = 2^-n, f(2n) = 0
Ex2DensityRule ex2_rule_ones();           // f = 1 on all market atoms

// Market with N assets on a refinement of [0, 1]:
//   - event atoms inside [0, 1/2]: one per joint outcome of the indicator
//     variables xi_2..xi_N (xi_1 is almost surely 1, so its zero outcomes
//     carry no mass and are not atoms), at half the product probability;
//     the events A_n = {xi_n = 1}/2 then have P(A_n) = 2^-n,
//   - payoff intervals B_n = (b_{n-1}, b_n], b_0 = 1/2, b_n = b_{n-1} + 4^-n,
//   - a gap atom (b_N, 5/6] and a top atom (5/6, 1].
// Generators x_n = 2^n 1_{B_n} - 1_{A_n} (subspace mode). The density floor
// f is 2^n on B_n, 1 on [0,1/2] and on the top atom, 0 on the gap.
struct Example3Market {
  SpacePtr space;
  MarketCone cone;
  RandomVariable f;
  int level;
};

Example3Market build_example3(int level);

// Step-function discretization of [0, 1] by the nested windows
// |t - 1/2| < eps_n / 2: a left and right outer atom, one ring per pair of
// consecutive windows, and a core atom inside the smallest window. Returns
// the space and the sequence x_1..x_M with x_n = -n inside window n and +n
// outside it. No cone: the defining measure of this family's cone has no
// finite-dimensional counterpart, so only the witness statistics are built.
struct Example1Family {
  SpacePtr space;
  std::vector<RandomVariable> x;
  std::vector<Rat> eps;
};

// eps must be strictly decreasing, positive, with eps_1 < 1, of length M.
Example1Family build_example1(int level, std::vector<Rat> eps);

}  // namespace mmfloor
