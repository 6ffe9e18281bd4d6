#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mmfloor/orlicz.hpp"
#include "mmfloor/prob.hpp"

namespace mmfloor {

// What kind of combination of the generators the cone admits:
//   Cone:               { sum lam_j g_j : lam_j >= 0 }
//   Subspace:           lam_j free
//   ConeMinusPositives: { sum lam_j g_j - h : lam_j >= 0, h >= 0 atomwise }
enum class ConeMode { Cone, Subspace, ConeMinusPositives };

// Finitely generated set of attainable trading gains.
class MarketCone {
 public:
  MarketCone(SpacePtr space, std::vector<RandomVariable> generators, ConeMode mode);

  const SpacePtr& space() const { return space_; }
  const std::vector<RandomVariable>& generators() const { return generators_; }
  ConeMode mode() const { return mode_; }

 private:
  SpacePtr space_;
  std::vector<RandomVariable> generators_;
  ConeMode mode_;
};

// Which bounded subset of the cone a query ranges over, via a cap on the
// negative part x-:
//   UnitBall:     x- <= 1 atomwise
//   EpsSequence:  P(x- >= k) <= eps_k for k = 1..K (levels beyond K free)
//   Orlicz:       ||x-||_phi <= 1  (decided exactly as modular at 1)
class TruncationSpec {
 public:
  enum class Kind { UnitBall, EpsSequence, Orlicz };

  static TruncationSpec unit_ball();
  static TruncationSpec eps_sequence(EpsSequence eps);
  static TruncationSpec orlicz(NFunction phi);

  Kind kind() const { return kind_; }
  const EpsSequence& eps() const;
  const NFunction& phi() const;

 private:
  explicit TruncationSpec(Kind kind) : kind_(kind) {}
  Kind kind_;
  std::optional<EpsSequence> eps_;
  std::optional<NFunction> phi_;
};

// Exact membership x in C, decided by LP feasibility over the generator
// coefficients. Throws on a space mismatch.
bool contains(const MarketCone& cone, const RandomVariable& x);

struct NoArbitrageResult {
  bool no_arbitrage;
  // A nonzero, nonnegative element of the cone when arbitrage exists.
  std::optional<RandomVariable> witness;
};

// Solves max sum_i x_i over {x in C : 0 <= x <= 1}; the optimum is zero
// exactly when C meets the nonnegative orthant only at the origin.
NoArbitrageResult no_arbitrage_check(const MarketCone& cone);

// Does x (assumed in C) lie in the truncated set? Only x- is consulted.
bool membership_in_truncation(const MarketCone& cone, const TruncationSpec& trunc,
                              const RandomVariable& x);

// Checks, sample by sample, that truncation membership is equivalent to the
// existence of a split x = v + h with v in the truncating set V and h >= 0.
// The unit-ball and Orlicz splits are decided by an independent LP; the
// eps-sequence split reduces to the canonical one (h = x+), which is optimal
// because any split has |x - h| >= x- atomwise and V is solid. Samples must
// lie in the cone.
bool verify_cv_identity(const MarketCone& cone, const TruncationSpec& trunc,
                        std::span<const RandomVariable> samples);

}  // namespace mmfloor
