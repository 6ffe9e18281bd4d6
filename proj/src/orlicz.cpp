#include "mmfloor/orlicz.hpp"

#include <stdexcept>

namespace mmfloor {

NFunction::NFunction(std::vector<std::pair<Rat, Rat>> knots, Rat tail_slope, Rat tail_quad)
    : knots_(std::move(knots)), tail_slope_(std::move(tail_slope)),
      tail_quad_(std::move(tail_quad)) {
  if (knots_.size() < 2) throw std::invalid_argument("NFunction: need at least two knots");
  if (knots_[0].first != 0 || knots_[0].second != 0)
    throw std::invalid_argument("NFunction: first knot must be (0, 0)");
  if (knots_[1].first <= 0 || knots_[1].second != 0)
    throw std::invalid_argument("NFunction: second knot must be (t, 0) with t > 0");
  Rat prev_slope(0);  // slope of the flat segment
  for (std::size_t i = 1; i + 1 < knots_.size(); ++i) {
    const Rat dt = knots_[i + 1].first - knots_[i].first;
    if (dt <= 0) throw std::invalid_argument("NFunction: knot abscissas must increase");
    const Rat slope = (knots_[i + 1].second - knots_[i].second) / dt;
    if (slope <= prev_slope)
      throw std::invalid_argument("NFunction: segment slopes must strictly increase");
    prev_slope = slope;
  }
  if (tail_slope_ < prev_slope)
    throw std::invalid_argument("NFunction: tail slope below last segment slope");
  if (tail_quad_ <= 0) throw std::invalid_argument("NFunction: tail quadratic must be > 0");
}

Rat NFunction::operator()(const Rat& t) const {
  if (t < 0) throw std::invalid_argument("NFunction: negative argument");
  const auto& last = knots_.back();
  if (t >= last.first) {
    const Rat dt = t - last.first;
    return last.second + tail_slope_ * dt + tail_quad_ * dt * dt;
  }
  // Find the segment [knots_[i], knots_[i+1]) containing t.
  std::size_t lo = 0, hi = knots_.size() - 1;
  while (lo + 1 < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (knots_[mid].first <= t)
      lo = mid;
    else
      hi = mid;
  }
  const Rat dt = knots_[lo + 1].first - knots_[lo].first;
  const Rat slope = (knots_[lo + 1].second - knots_[lo].second) / dt;
  return knots_[lo].second + slope * (t - knots_[lo].first);
}

Rat evaluate(const NFunction& phi, const Rat& t) { return phi(t); }

EpsSequence::EpsSequence(std::vector<Rat> values) : values_(std::move(values)) {
  for (const Rat& e : values_)
    if (e <= 0) throw std::invalid_argument("EpsSequence: entries must be > 0");
}

Rat modular(const RandomVariable& x, const NFunction& phi, const Rat& lambda) {
  if (lambda <= 0) throw std::invalid_argument("modular: lambda must be > 0");
  Rat s(0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Rat a = ::abs(x[i]) / lambda;
    if (a == 0) continue;
    s += x.space()->prob(i) * phi(a);
  }
  return s;
}

NormBracket luxemburg_norm(const RandomVariable& x, const NFunction& phi, const Rat& tol) {
  if (tol <= 0) throw std::invalid_argument("luxemburg_norm: tolerance must be > 0");
  if (x.is_zero()) return {Rat(0), Rat(0)};
  const Rat peak = x.abs().max_value();
  // At hi all rescaled values sit inside the flat piece, so the modular is 0.
  Rat hi = peak / phi.initial_flat();
  Rat lo = hi;
  do {
    lo /= 2;
  } while (modular(x, phi, lo) <= 1);
  while (hi - lo > tol) {
    const Rat mid = (lo + hi) / 2;
    if (modular(x, phi, mid) <= 1)
      hi = mid;
    else
      lo = mid;
  }
  return {lo, hi};
}

bool luxemburg_le_one(const RandomVariable& x, const NFunction& phi) {
  return modular(x, phi, Rat(1)) <= 1;
}

NFunction eps_to_nfunction(const EpsSequence& eps) {
  const std::size_t K = eps.size();
  if (K == 0) throw std::invalid_argument("eps_to_nfunction: empty sequence");
  std::vector<std::pair<Rat, Rat>> knots;
  knots.emplace_back(Rat(0), Rat(0));
  knots.emplace_back(Rat(1, 2), Rat(0));
  Rat floor_req(0);  // running max_{i<=k} 1/eps_i
  Rat v(0), slope(0);
  for (std::size_t k = 1; k <= K; ++k) {
    const Rat inv = Rat(1) / eps[k - 1];
    if (inv > floor_req) floor_req = inv;
    if (k == 1) {
      v = floor_req;           // phi(1) = M_1, reached from (1/2, 0)
      slope = 2 * floor_req;   // M_1 over a half-unit step
    } else {
      // Smallest value meeting the constraint; the slope at least doubles,
      // which keeps the segment slopes strictly increasing.
      Rat next_slope = floor_req - v;
      if (next_slope < 2 * slope) next_slope = 2 * slope;
      v += next_slope;
      slope = next_slope;
    }
    knots.emplace_back(Rat(static_cast<long>(k)), v);
  }
  return NFunction(std::move(knots), 2 * slope, Rat(1));
}

EpsSequence nfunction_to_eps(const NFunction& phi, int K) {
  if (K < 1) throw std::invalid_argument("nfunction_to_eps: K must be >= 1");
  std::vector<Rat> eps;
  eps.reserve(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    const Rat denom = phi(Rat(k + 1));
    if (denom == 0)
      throw std::invalid_argument(
          "nfunction_to_eps: phi(k+1) = 0 at k = " + std::to_string(k) +
          " (initial flat too wide; shift indices)");
    eps.push_back(Rat(1) / (Rat(k) * Rat(k) * denom));
  }
  return EpsSequence(std::move(eps));
}

}  // namespace mmfloor
