#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mmfloor/prob.hpp"
#include "mmfloor/rational.hpp"

namespace mmfloor {

// Piecewise-linear convex function with a flat start and a quadratic tail:
//
//   phi(t) = 0                     on [0, t_flat]   (t_flat = knots[1].t > 0)
//   phi(t) = linear interpolation  between knots
//   phi(t) = y_last + s (t - t_last) + q (t - t_last)^2   beyond the last knot
//
// Segment slopes strictly increase, s >= the last segment slope, q > 0.
// That shape gives phi(t)/t -> 0 at 0 and -> infinity at infinity
// structurally, so no limit checks are ever needed.
class NFunction {
 public:
  NFunction(std::vector<std::pair<Rat, Rat>> knots, Rat tail_slope, Rat tail_quad);

  // Exact evaluation; throws std::invalid_argument for t < 0.
  Rat operator()(const Rat& t) const;

  const std::vector<std::pair<Rat, Rat>>& knots() const { return knots_; }
  const Rat& tail_slope() const { return tail_slope_; }
  const Rat& tail_quad() const { return tail_quad_; }
  const Rat& initial_flat() const { return knots_[1].first; }

 private:
  std::vector<std::pair<Rat, Rat>> knots_;
  Rat tail_slope_, tail_quad_;
};

Rat evaluate(const NFunction& phi, const Rat& t);

// Finite positive sequence eps_1..eps_K of tail budgets; levels beyond K
// are unconstrained.
class EpsSequence {
 public:
  explicit EpsSequence(std::vector<Rat> values);
  const std::vector<Rat>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  const Rat& operator[](std::size_t k) const { return values_[k]; }

 private:
  std::vector<Rat> values_;
};

// sum_i p_i phi(|x_i| / lambda), exact. lambda must be positive.
Rat modular(const RandomVariable& x, const NFunction& phi, const Rat& lambda);

// Certified bracket around the Luxemburg norm inf{lambda > 0 :
// modular(x, phi, lambda) <= 1}: modular(hi) <= 1 < modular(lo) and
// hi - lo <= tol. For x = 0 both ends are 0.
struct NormBracket {
  Rat lo, hi;
};
NormBracket luxemburg_norm(const RandomVariable& x, const NFunction& phi, const Rat& tol);

// Exact unit-ball membership: ||x||_phi <= 1 iff modular(x, phi, 1) <= 1.
// (The modular is continuous and nonincreasing in lambda, so the infimum
// is attained from the right and the predicate is decidable at lambda = 1.)
bool luxemburg_le_one(const RandomVariable& x, const NFunction& phi);

// Builds phi with phi(t) >= max{1/eps_1, .., 1/eps_k} for all t >= k,
// k = 1..K: flat on [0, 1/2], knots at the integers 1..K, each knot value
// the smallest that satisfies the constraint while keeping slopes strictly
// increasing (each new slope at least doubles).
NFunction eps_to_nfunction(const EpsSequence& eps);

// eps_k = k^-2 / phi(k+1) for k = 1..K. Throws std::invalid_argument when
// phi(k+1) = 0 for some required k (initial flat too wide; shift indices).
EpsSequence nfunction_to_eps(const NFunction& phi, int K);

}  // namespace mmfloor
