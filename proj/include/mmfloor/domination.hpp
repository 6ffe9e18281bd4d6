#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mmfloor/cone.hpp"
#include "mmfloor/examples.hpp"
#include "mmfloor/prob.hpp"

namespace mmfloor {

// sup { <x, f> : x in the truncated cone }.
struct SupResult {
  bool unbounded = false;
  Rat value;                                // valid when bounded
  std::optional<RandomVariable> maximizer;  // element attaining value
  std::optional<RandomVariable> ray;        // when unbounded: x in C, x >= 0, <x,f> > 0
};

// Unit-ball truncation solves the exact LP over the generator coefficients.
// Eps-sequence and Orlicz truncations are not polyhedra, so the supremum is
// evaluated over {0} and the supplied candidates that pass membership; the
// result is then a certified lower bound, exact on the candidate set.
SupResult sup_over_truncation(const MarketCone& cone, const RandomVariable& f,
                              const TruncationSpec& trunc,
                              std::span<const RandomVariable> candidates = {});

// Answer to the floor question for one market: either a dominating density
// g >= f in the polar of the cone, with the minimal mass and L1 norm, or a
// certificate element of C1 whose scalings push <x, f> beyond any bound.
struct DominationReport {
  bool sup_unbounded = false;
  std::optional<Rat> sup_c1;  // sup over the unit-ball truncation, when finite
  std::optional<RandomVariable> dominating_g;
  std::optional<Rat> min_mass;     // min of E[g] over feasible g
  std::optional<Rat> min_l1_norm;  // min of E[|g|] over feasible g
  std::optional<RandomVariable> certificate;
  std::optional<Rat> certificate_pairing;  // <certificate, f>
};

// Minimizes E[g] subject to g >= f atomwise and <generator, g> <= 0 (= 0 in
// subspace mode; g >= 0 added in cone-minus-positives mode). When feasible,
// sup_c1 = min_mass - E[f] by LP duality of the pair of programs. When
// infeasible, the Farkas multipliers of the generator rows assemble into a
// nonnegative element of the cone with positive pairing against f, returned
// scaled to unit maximum.
DominationReport find_dominating_density(const MarketCone& cone, const RandomVariable& f);

// Solves both sides independently (sup LP over coefficients, density LP
// over g) and checks that finiteness of the sup, existence of g, and the
// exact identity sup = min_mass - E[f] all agree.
bool duality_check(const MarketCone& cone, const RandomVariable& f);

// The explicit element x = x_{n_1} + ... + x_{n_m} of the eps-truncations
// with <x, f> > beta, built the way the third family allows: m = floor(beta)
// + 2 and the lexicographically smallest index set whose tail masses fit the
// eps budget. Returns nothing when the truncation level cannot host the
// construction (or the cone is not of that family).
std::optional<RandomVariable> divergence_witness_eps(const MarketCone& cone,
                                                     const RandomVariable& f,
                                                     const EpsSequence& eps, const Rat& beta);

struct SweepRow {
  int level;
  bool sup_unbounded = false;
  std::optional<Rat> sup;
  std::optional<Rat> min_l1;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  // Strictly increasing across all consecutive levels and above the
  // threshold at the last level. A heuristic verdict about a finite
  // prefix, never a limit statement.
  bool sup_diverging = false;
  bool min_l1_diverging = false;
};

struct SweepOptions {
  Rat divergence_threshold = Rat(0);
};

// Rebuilds the family at each level, evaluates the truncated sup and the
// minimal dominating density, and reports the trajectories. The density
// rule applies to the second family; the third family carries its own f.
// For the third family under an eps-sequence truncation the sup column is
// evaluated over the ladder of divergence witnesses constructible at that
// level.
SweepResult truncation_sweep(ExampleKind kind, const Ex2DensityRule& f_rule,
                             const TruncationSpec& trunc, std::span<const int> levels,
                             const SweepOptions& options = {});

}  // namespace mmfloor
