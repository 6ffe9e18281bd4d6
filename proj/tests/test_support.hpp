#pragma once

#include <random>
#include <vector>

#include "mmfloor/cone.hpp"
#include "mmfloor/prob.hpp"

namespace mmfloor::testing {

// Deterministic generators for the randomized suites. Everything is dyadic
// so all the exact identities under test stay exact.
class Gen {
 public:
  explicit Gen(unsigned seed) : rng_(seed) {}

  int uniform(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }

  // num/den in lowest terms; the two-argument mpq constructor does not
  // canonicalize on its own.
  static Rat frac(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
  }

  // k / 2^j with k in [-4*2^j, 4*2^j], j in [0, denom_bits].
  Rat dyadic(int denom_bits = 4) {
    const int j = uniform(0, denom_bits);
    const int scale = 1 << j;
    return frac(uniform(-4 * scale, 4 * scale), scale);
  }

  Rat positive_dyadic(int denom_bits = 4) {
    const int j = uniform(0, denom_bits);
    const int scale = 1 << j;
    return frac(uniform(1, 4 * scale), scale);
  }

  // Dyadic probabilities: a composition of 64 into `atoms` positive parts.
  SpacePtr space(int atoms) {
    std::vector<int> parts(static_cast<std::size_t>(atoms), 1);
    for (int rest = 64 - atoms; rest > 0; --rest)
      ++parts[static_cast<std::size_t>(uniform(0, atoms - 1))];
    std::vector<std::string> labels;
    std::vector<Rat> probs;
    for (int i = 0; i < atoms; ++i) {
      labels.push_back("w" + std::to_string(i));
      probs.push_back(frac(parts[static_cast<std::size_t>(i)], 64));
    }
    return make_space(std::move(labels), std::move(probs));
  }

  RandomVariable rv(const SpacePtr& space, int denom_bits = 4) {
    std::vector<Rat> v(space->size());
    for (Rat& x : v) x = dyadic(denom_bits);
    return RandomVariable(space, std::move(v));
  }

  MarketCone cone(const SpacePtr& space, int max_gens) {
    const int gens = uniform(0, max_gens);
    std::vector<RandomVariable> g;
    for (int j = 0; j < gens; ++j) g.push_back(rv(space));
    const int mode = uniform(0, 2);
    return MarketCone(space, std::move(g),
                      mode == 0   ? ConeMode::Cone
                      : mode == 1 ? ConeMode::Subspace
                                  : ConeMode::ConeMinusPositives);
  }

  // A random element of the cone: a mode-respecting combination.
  RandomVariable cone_element(const MarketCone& cone) {
    std::vector<Rat> v(cone.space()->size(), Rat(0));
    for (const RandomVariable& g : cone.generators()) {
      Rat lam = frac(uniform(0, 8), 1 << uniform(0, 2));
      if (cone.mode() == ConeMode::Subspace && uniform(0, 1)) lam = -lam;
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += lam * g[i];
    }
    if (cone.mode() == ConeMode::ConeMinusPositives)
      for (Rat& x : v)
        if (uniform(0, 3) == 0) x -= frac(uniform(0, 4), 1 << uniform(0, 2));
    return RandomVariable(cone.space(), std::move(v));
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace mmfloor::testing
