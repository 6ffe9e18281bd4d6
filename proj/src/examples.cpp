#include "mmfloor/examples.hpp"

#include <stdexcept>

namespace mmfloor {

Example2Market build_example2(int level) {
  if (level < 1) throw std::invalid_argument("build_example2: level must be >= 1");
  const int N = level;
  std::vector<std::string> labels;
  std::vector<Rat> probs;
  for (int n = 1; n <= N; ++n) {
    for (int k : {2 * n - 1, 2 * n}) {
      labels.push_back(std::to_string(k));
      probs.push_back(pow2(-n - 1));
    }
  }
  labels.emplace_back("rest");
  probs.push_back(pow2(-N));
  SpacePtr space = make_space(std::move(labels), std::move(probs));

  std::vector<std::vector<std::size_t>> blocks;
  for (int n = 1; n <= N; ++n)
    blocks.push_back({static_cast<std::size_t>(2 * n - 2), static_cast<std::size_t>(2 * n - 1)});
  blocks.push_back({static_cast<std::size_t>(2 * N)});
  AtomPartition pair_blocks(space->size(), std::move(blocks));

  std::vector<RandomVariable> gens;
  for (int n = 1; n <= N; ++n) {
    std::vector<Rat> v(space->size(), Rat(0));
    v[static_cast<std::size_t>(2 * n - 2)] = 1;
    v[static_cast<std::size_t>(2 * n - 1)] = -pow2(-n);
    gens.emplace_back(space, std::move(v));
  }
  MarketCone cone(space, std::move(gens), ConeMode::Subspace);
  return {space, std::move(pair_blocks), std::move(cone), N};
}

RandomVariable Example2Market::density(const std::function<Rat(int)>& f_market,
                                       const Rat& residual) const {
  std::vector<Rat> v(space->size());
  for (int k = 1; k <= 2 * level; ++k) v[static_cast<std::size_t>(k - 1)] = f_market(k);
  v.back() = residual;
  return RandomVariable(space, std::move(v));
}

RandomVariable example2_g(const Example2Market& market, const std::function<Rat(int)>& f_market,
                          const Rat& residual) {
  std::vector<Rat> v(market.space->size());
  for (int n = 1; n <= market.level; ++n) {
    Rat odd = f_market(2 * n - 1);
    const Rat scaled_even = pow2(-n) * f_market(2 * n);
    if (scaled_even > odd) odd = scaled_even;
    v[static_cast<std::size_t>(2 * n - 2)] = odd;
    v[static_cast<std::size_t>(2 * n - 1)] = pow2(n) * odd;
  }
  v.back() = residual;
  return RandomVariable(market.space, std::move(v));
}

Ex2DensityRule ex2_rule_ones_odd() {
  return {"ones-odd", [](int k) { return k % 2 == 1 ? Rat(1) : Rat(0); }, Rat(0)};
}

Ex2DensityRule ex2_rule_geometric_odd() {
  // f(2n-1) = 2^-n, f(2n) = 0; n = (k+1)/2 on odd atoms.
  return {"geometric-odd", [](int k) { return k % 2 == 1 ? pow2(-(k + 1) / 2) : Rat(0); },
          Rat(0)};
}

Ex2DensityRule ex2_rule_ones() {
  return {"ones", [](int) { return Rat(1); }, Rat(0)};
}

Example3Market build_example3(int level) {
  if (level < 1) throw std::invalid_argument("build_example3: level must be >= 1");
  if (level > 20)
    throw std::invalid_argument(
        "build_example3: level capped at 20; the event atoms grow as 2^(level-1)");
  const int N = level;
  const std::size_t patterns = std::size_t{1} << (N - 1);  // joint outcomes of xi_2..xi_N

  std::vector<std::string> labels;
  std::vector<Rat> probs;
  std::vector<std::vector<bool>> in_a(patterns, std::vector<bool>(static_cast<std::size_t>(N)));
  for (std::size_t j = 0; j < patterns; ++j) {
    std::string bits = "1";  // xi_1 = 1 almost surely
    Rat p(1, 2);             // the [0, 1/2] half of the product measure
    in_a[j][0] = true;
    for (int n = 2; n <= N; ++n) {
      const bool hit = (j >> (n - 2)) & 1;
      in_a[j][static_cast<std::size_t>(n - 1)] = hit;
      const Rat pn = pow2(-(n - 1));  // P(xi_n = 1)
      p *= hit ? pn : Rat(1) - pn;
      bits += hit ? '1' : '0';
    }
    labels.push_back("A:" + bits);
    probs.push_back(p);
  }
  for (int n = 1; n <= N; ++n) {
    labels.push_back("B" + std::to_string(n));
    probs.push_back(pow2(-2 * n));
  }
  labels.emplace_back("gap");
  probs.push_back(pow2(-2 * N) / 3);  // (b_N, 5/6]
  labels.emplace_back("top");
  probs.emplace_back(1, 6);  // (5/6, 1]
  SpacePtr space = make_space(std::move(labels), std::move(probs));

  std::vector<RandomVariable> gens;
  std::vector<Rat> f(space->size(), Rat(0));
  for (std::size_t j = 0; j < patterns; ++j) f[j] = 1;
  for (int n = 1; n <= N; ++n) {
    std::vector<Rat> v(space->size(), Rat(0));
    for (std::size_t j = 0; j < patterns; ++j)
      if (in_a[j][static_cast<std::size_t>(n - 1)]) v[j] = -1;
    v[patterns + static_cast<std::size_t>(n - 1)] = pow2(n);
    f[patterns + static_cast<std::size_t>(n - 1)] = pow2(n);
    gens.emplace_back(space, std::move(v));
  }
  f.back() = 1;  // top atom; the gap atom keeps f = 0
  MarketCone cone(space, std::move(gens), ConeMode::Subspace);
  return {space, std::move(cone), RandomVariable(space, std::move(f)), N};
}

Example1Family build_example1(int level, std::vector<Rat> eps) {
  if (level < 1) throw std::invalid_argument("build_example1: level must be >= 1");
  const std::size_t M = static_cast<std::size_t>(level);
  if (eps.size() != M) throw std::invalid_argument("build_example1: need one eps per index");
  for (std::size_t i = 0; i < M; ++i) {
    if (eps[i] <= 0) throw std::invalid_argument("build_example1: eps must be positive");
    if (i > 0 && eps[i] >= eps[i - 1])
      throw std::invalid_argument("build_example1: eps must be strictly decreasing");
  }
  if (eps[0] >= 1) throw std::invalid_argument("build_example1: eps_1 must be < 1");

  // Geometric order: left outer, left rings, core, right rings, right outer.
  std::vector<std::string> labels;
  std::vector<Rat> probs;
  labels.emplace_back("left");
  probs.push_back((Rat(1) - eps[0]) / 2);
  for (std::size_t k = 1; k < M; ++k) {
    labels.push_back("L" + std::to_string(k));
    probs.push_back((eps[k - 1] - eps[k]) / 2);
  }
  labels.emplace_back("core");
  probs.push_back(eps[M - 1]);
  for (std::size_t k = M - 1; k >= 1; --k) {
    labels.push_back("R" + std::to_string(k));
    probs.push_back((eps[k - 1] - eps[k]) / 2);
  }
  labels.emplace_back("right");
  probs.push_back((Rat(1) - eps[0]) / 2);
  SpacePtr space = make_space(std::move(labels), std::move(probs));

  // Ring k lies between windows k and k+1, so x_n = -n there exactly when
  // n <= k; the core is inside every window.
  std::vector<RandomVariable> xs;
  for (std::size_t n = 1; n <= M; ++n) {
    std::vector<Rat> v(space->size());
    std::size_t idx = 0;
    const Rat plus(static_cast<long>(n)), minus(-static_cast<long>(n));
    v[idx++] = plus;  // left outer
    for (std::size_t k = 1; k < M; ++k) v[idx++] = n <= k ? minus : plus;
    v[idx++] = minus;  // core
    for (std::size_t k = M - 1; k >= 1; --k) v[idx++] = n <= k ? minus : plus;
    v[idx] = plus;  // right outer
    xs.emplace_back(space, std::move(v));
  }
  return {space, std::move(xs), std::move(eps)};
}

}  // namespace mmfloor
