#include "mmfloor/domination.hpp"

#include <stdexcept>

#include "mmfloor/lp.hpp"

namespace mmfloor {

namespace {

void require_on_space(const MarketCone& cone, const RandomVariable& x, const char* op) {
  if (x.space().get() != cone.space().get())
    throw std::invalid_argument(std::string(op) + ": argument on a different space");
}

RandomVariable combine(const MarketCone& cone, std::span<const Rat> lambda,
                       std::span<const Rat> slack) {
  std::vector<Rat> v(cone.space()->size(), Rat(0));
  for (std::size_t j = 0; j < cone.generators().size(); ++j) {
    if (lambda[j] == 0) continue;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += lambda[j] * cone.generators()[j][i];
  }
  for (std::size_t i = 0; i < slack.size(); ++i) v[i] -= slack[i];
  return RandomVariable(cone.space(), std::move(v));
}

SupResult sup_unit_ball_lp(const MarketCone& cone, const RandomVariable& f) {
  const std::size_t atoms = cone.space()->size();
  const std::size_t gens = cone.generators().size();
  const bool slack = cone.mode() == ConeMode::ConeMinusPositives;
  const std::size_t nvars = gens + (slack ? atoms : 0);

  lp::LinearProgram prog(nvars);
  std::vector<Rat> objective(nvars, Rat(0));
  for (std::size_t j = 0; j < gens; ++j) objective[j] = pairing(cone.generators()[j], f);
  if (slack)
    for (std::size_t i = 0; i < atoms; ++i)
      objective[gens + i] = -(cone.space()->prob(i) * f[i]);
  prog.set_objective(std::move(objective));
  for (std::size_t i = 0; i < atoms; ++i) {
    std::vector<Rat> row(nvars, Rat(0));
    for (std::size_t j = 0; j < gens; ++j) row[j] = cone.generators()[j][i];
    if (slack) row[gens + i] = -1;
    prog.add_constraint(std::move(row), lp::Relation::GE, Rat(-1));
  }
  if (cone.mode() != ConeMode::Subspace)
    for (std::size_t j = 0; j < gens; ++j) prog.set_lower(j, Rat(0));
  if (slack)
    for (std::size_t i = 0; i < atoms; ++i) prog.set_lower(gens + i, Rat(0));

  const lp::LpOutcome out = lp::solve(prog);
  SupResult res;
  if (out.status == lp::LpStatus::Unbounded) {
    res.unbounded = true;
    res.ray = combine(cone, std::span(out.ray).first(gens),
                      std::span(out.ray).subspan(gens));
    return res;
  }
  if (out.status != lp::LpStatus::Optimal)
    throw std::logic_error("sup_over_truncation: zero is feasible, program cannot be infeasible");
  res.value = *out.objective_value;
  res.maximizer = combine(cone, std::span(out.primal).first(gens),
                          std::span(out.primal).subspan(gens));
  return res;
}

}  // namespace

SupResult sup_over_truncation(const MarketCone& cone, const RandomVariable& f,
                              const TruncationSpec& trunc,
                              std::span<const RandomVariable> candidates) {
  require_on_space(cone, f, "sup_over_truncation");
  if (trunc.kind() == TruncationSpec::Kind::UnitBall) return sup_unit_ball_lp(cone, f);

  // Witness evaluation: zero is in every truncation, so the sup starts at 0.
  SupResult res;
  res.value = 0;
  res.maximizer = RandomVariable::zero(cone.space());
  for (const RandomVariable& x : candidates) {
    require_on_space(cone, x, "sup_over_truncation");
    if (!membership_in_truncation(cone, trunc, x)) continue;
    const Rat v = pairing(x, f);
    if (v > res.value) {
      res.value = v;
      res.maximizer = x;
    }
  }
  return res;
}

DominationReport find_dominating_density(const MarketCone& cone, const RandomVariable& f) {
  require_on_space(cone, f, "find_dominating_density");
  const std::size_t atoms = cone.space()->size();
  const std::size_t gens = cone.generators().size();
  const bool cmp = cone.mode() == ConeMode::ConeMinusPositives;
  const lp::Relation polar_rel =
      cone.mode() == ConeMode::Subspace ? lp::Relation::EQ : lp::Relation::LE;

  auto add_polar_rows = [&](lp::LinearProgram& prog, std::size_t stride) {
    for (std::size_t j = 0; j < gens; ++j) {
      std::vector<Rat> row(stride, Rat(0));
      for (std::size_t i = 0; i < atoms; ++i)
        row[i] = cone.space()->prob(i) * cone.generators()[j][i];
      prog.add_constraint(std::move(row), polar_rel, Rat(0));
    }
  };
  auto floor_at = [&](std::size_t i) {
    // cone-minus-positives polars are nonnegative, so the floor is f+ there
    return cmp && f[i] < 0 ? Rat(0) : f[i];
  };

  lp::LinearProgram mass(atoms);
  {
    std::vector<Rat> objective(atoms);
    for (std::size_t i = 0; i < atoms; ++i) {
      objective[i] = -cone.space()->prob(i);
      mass.set_lower(i, floor_at(i));
    }
    mass.set_objective(std::move(objective));
    add_polar_rows(mass, atoms);
  }
  const lp::LpOutcome out = lp::solve(mass);

  DominationReport report;
  if (out.status == lp::LpStatus::Infeasible) {
    // farkas = [mu (gens) | lamL (atoms) | lamU (atoms)]; the generator
    // multipliers combine to x = sum mu_j g_j with p_i x_i = lamL_i >= 0,
    // so x is a nonnegative element of the cone and <x, floor> = 1 > 0.
    std::vector<Rat> v(atoms, Rat(0));
    for (std::size_t j = 0; j < gens; ++j) {
      const Rat& mu = out.farkas[j];
      if (mu == 0) continue;
      for (std::size_t i = 0; i < atoms; ++i) v[i] += mu * cone.generators()[j][i];
    }
    if (cmp)  // keep only the atoms where the floor bites, staying in C
      for (std::size_t i = 0; i < atoms; ++i)
        if (f[i] <= 0) v[i] = 0;
    Rat peak(0);
    for (const Rat& x : v)
      if (x > peak) peak = x;
    if (peak > 0)
      for (Rat& x : v) x /= peak;
    RandomVariable cert(cone.space(), std::move(v));
    report.sup_unbounded = true;
    report.certificate_pairing = pairing(cert, f);
    report.certificate = std::move(cert);
    return report;
  }
  if (out.status != lp::LpStatus::Optimal)
    throw std::logic_error("find_dominating_density: mass objective is bounded below");

  report.min_mass = -*out.objective_value;
  report.sup_c1 = *report.min_mass - expectation(f);

  bool f_nonneg_floor = true;
  for (std::size_t i = 0; i < atoms; ++i)
    if (floor_at(i) < 0) f_nonneg_floor = false;

  if (f_nonneg_floor) {
    report.dominating_g = RandomVariable(cone.space(), out.primal);
    report.min_l1_norm = report.min_mass;
  } else {
    // Minimize E[|g|] with envelope variables u >= |g|.
    lp::LinearProgram l1(2 * atoms);
    std::vector<Rat> objective(2 * atoms, Rat(0));
    for (std::size_t i = 0; i < atoms; ++i) {
      objective[atoms + i] = -cone.space()->prob(i);
      l1.set_lower(i, floor_at(i));
      std::vector<Rat> above(2 * atoms, Rat(0)), below(2 * atoms, Rat(0));
      above[atoms + i] = 1;
      above[i] = -1;
      l1.add_constraint(std::move(above), lp::Relation::GE, Rat(0));  // u_i >= g_i
      below[atoms + i] = 1;
      below[i] = 1;
      l1.add_constraint(std::move(below), lp::Relation::GE, Rat(0));  // u_i >= -g_i
    }
    l1.set_objective(std::move(objective));
    add_polar_rows(l1, 2 * atoms);
    const lp::LpOutcome l1out = lp::solve(l1);
    if (l1out.status != lp::LpStatus::Optimal)
      throw std::logic_error("find_dominating_density: L1 stage lost feasibility");
    report.dominating_g = RandomVariable(
        cone.space(), std::vector<Rat>(l1out.primal.begin(),
                                       l1out.primal.begin() + static_cast<std::ptrdiff_t>(atoms)));
    report.min_l1_norm = -*l1out.objective_value;
  }

  // Post-hoc substitution of the reported density into its contracts.
  for (std::size_t i = 0; i < atoms; ++i)
    if ((*report.dominating_g)[i] < f[i])
      throw std::logic_error("find_dominating_density: density below the floor");
  for (std::size_t j = 0; j < gens; ++j) {
    const Rat v = pairing(cone.generators()[j], *report.dominating_g);
    if (polar_rel == lp::Relation::EQ ? v != 0 : v > 0)
      throw std::logic_error("find_dominating_density: density violates the polar");
  }
  return report;
}

bool duality_check(const MarketCone& cone, const RandomVariable& f) {
  const SupResult sup = sup_over_truncation(cone, f, TruncationSpec::unit_ball());
  const DominationReport report = find_dominating_density(cone, f);
  if (sup.unbounded != report.sup_unbounded) return false;
  if (sup.unbounded) return !report.dominating_g.has_value();
  if (!report.dominating_g.has_value()) return false;
  return sup.value == *report.sup_c1;  // strong duality, exact
}

namespace {

// Lexicographically smallest m distinct indices in [1, max_index] whose
// dyadic tail masses 2^-n fit the budget; empty when impossible.
std::vector<int> smallest_indices(int m, int max_index, const Rat& budget) {
  std::vector<int> picked;
  Rat remaining = budget;
  int prev = 0;
  for (int slot = 0; slot < m; ++slot) {
    const int still_needed = m - slot - 1;
    bool found = false;
    for (int n = prev + 1; n + still_needed <= max_index; ++n) {
      // The cheapest completion takes the largest available indices.
      Rat tail_min(0);
      if (still_needed > 0)
        tail_min = pow2(-(max_index - still_needed)) - pow2(-max_index);
      if (pow2(-n) + tail_min <= remaining) {
        picked.push_back(n);
        remaining -= pow2(-n);
        prev = n;
        found = true;
        break;
      }
    }
    if (!found) return {};
  }
  return picked;
}

}  // namespace

std::optional<RandomVariable> divergence_witness_eps(const MarketCone& cone,
                                                     const RandomVariable& f,
                                                     const EpsSequence& eps, const Rat& beta) {
  require_on_space(cone, f, "divergence_witness_eps");
  const int gens = static_cast<int>(cone.generators().size());
  if (gens == 0) return std::nullopt;

  long m_long = mpz_get_si(rat_floor(beta).get_num_mpz_t()) + 2;
  if (m_long < 1) m_long = 1;
  const int m = static_cast<int>(m_long);

  Rat budget = eps[0];
  for (std::size_t k = 1; k < std::min<std::size_t>(eps.size(), static_cast<std::size_t>(m)); ++k)
    if (eps[k] < budget) budget = eps[k];

  const std::vector<int> indices = smallest_indices(m, gens, budget);
  if (indices.empty()) return std::nullopt;

  RandomVariable x = RandomVariable::zero(cone.space());
  for (int n : indices) x = x + cone.generators()[static_cast<std::size_t>(n - 1)];

  // The construction is only guaranteed on the third family; verify rather
  // than trust.
  if (!membership_in_truncation(cone, TruncationSpec::eps_sequence(eps), x)) return std::nullopt;
  if (pairing(x, f) <= beta) return std::nullopt;
  return x;
}

SweepResult truncation_sweep(ExampleKind kind, const Ex2DensityRule& f_rule,
                             const TruncationSpec& trunc, std::span<const int> levels,
                             const SweepOptions& options) {
  if (kind == ExampleKind::Example1)
    throw std::invalid_argument("truncation_sweep: the first family has no cone");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1])
      throw std::invalid_argument("truncation_sweep: levels must increase");

  SweepResult result;
  for (const int level : levels) {
    SpacePtr space;
    std::optional<MarketCone> cone;
    std::optional<RandomVariable> f;
    if (kind == ExampleKind::Example2) {
      Example2Market market = build_example2(level);
      f = market.density(f_rule.f, f_rule.residual);
      cone = std::move(market.cone);
    } else {
      Example3Market market = build_example3(level);
      f = std::move(market.f);
      cone = std::move(market.cone);
    }

    SweepRow row;
    row.level = level;
    if (trunc.kind() == TruncationSpec::Kind::EpsSequence && kind == ExampleKind::Example3) {
      // Ladder of explicit witnesses: largest m the level can host wins.
      std::vector<RandomVariable> candidates;
      for (int m = 1; m <= level; ++m) {
        std::optional<RandomVariable> w =
            divergence_witness_eps(*cone, *f, trunc.eps(), Rat(m) - Rat(3, 2));
        if (!w) break;
        candidates.push_back(std::move(*w));
      }
      const SupResult s = sup_over_truncation(*cone, *f, trunc, candidates);
      row.sup = s.value;
    } else {
      const SupResult s = sup_over_truncation(*cone, *f, trunc);
      row.sup_unbounded = s.unbounded;
      if (!s.unbounded) row.sup = s.value;
    }
    const DominationReport report = find_dominating_density(*cone, *f);
    if (report.min_l1_norm) row.min_l1 = *report.min_l1_norm;
    result.rows.push_back(std::move(row));
  }

  auto diverging = [&](auto&& get) {
    if (result.rows.empty()) return false;
    for (const SweepRow& row : result.rows)
      if (!get(row)) return false;
    for (std::size_t i = 1; i < result.rows.size(); ++i)
      if (*get(result.rows[i]) <= *get(result.rows[i - 1])) return false;
    return *get(result.rows.back()) > options.divergence_threshold;
  };
  result.sup_diverging = diverging([](const SweepRow& r) { return r.sup; });
  result.min_l1_diverging = diverging([](const SweepRow& r) { return r.min_l1; });
  return result;
}

}  // namespace mmfloor
