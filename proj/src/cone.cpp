#include "mmfloor/cone.hpp"

#include <stdexcept>

#include "mmfloor/lp.hpp"

namespace mmfloor {

MarketCone::MarketCone(SpacePtr space, std::vector<RandomVariable> generators, ConeMode mode)
    : space_(std::move(space)), generators_(std::move(generators)), mode_(mode) {
  if (!space_) throw std::invalid_argument("MarketCone: null space");
  for (const RandomVariable& g : generators_)
    if (g.space().get() != space_.get())
      throw std::invalid_argument("MarketCone: generator on a different space");
}

TruncationSpec TruncationSpec::unit_ball() { return TruncationSpec(Kind::UnitBall); }

TruncationSpec TruncationSpec::eps_sequence(EpsSequence eps) {
  TruncationSpec t(Kind::EpsSequence);
  t.eps_ = std::move(eps);
  return t;
}

TruncationSpec TruncationSpec::orlicz(NFunction phi) {
  TruncationSpec t(Kind::Orlicz);
  t.phi_ = std::move(phi);
  return t;
}

const EpsSequence& TruncationSpec::eps() const {
  if (!eps_) throw std::logic_error("TruncationSpec: no eps payload");
  return *eps_;
}

const NFunction& TruncationSpec::phi() const {
  if (!phi_) throw std::logic_error("TruncationSpec: no phi payload");
  return *phi_;
}

namespace {

void require_on_space(const MarketCone& cone, const RandomVariable& x, const char* op) {
  if (x.space().get() != cone.space().get())
    throw std::invalid_argument(std::string(op) + ": argument on a different space");
}

}  // namespace

bool contains(const MarketCone& cone, const RandomVariable& x) {
  require_on_space(cone, x, "contains");
  const std::size_t atoms = cone.space()->size();
  const std::size_t gens = cone.generators().size();
  const bool slack = cone.mode() == ConeMode::ConeMinusPositives;
  const std::size_t nvars = gens + (slack ? atoms : 0);

  lp::LinearProgram prog(nvars);
  for (std::size_t i = 0; i < atoms; ++i) {
    std::vector<Rat> row(nvars, Rat(0));
    for (std::size_t j = 0; j < gens; ++j) row[j] = cone.generators()[j][i];
    if (slack) row[gens + i] = -1;
    prog.add_constraint(std::move(row), lp::Relation::EQ, x[i]);
  }
  if (cone.mode() != ConeMode::Subspace)
    for (std::size_t j = 0; j < gens; ++j) prog.set_lower(j, Rat(0));
  if (slack)
    for (std::size_t i = 0; i < atoms; ++i) prog.set_lower(gens + i, Rat(0));

  return lp::solve(prog).status == lp::LpStatus::Optimal;
}

NoArbitrageResult no_arbitrage_check(const MarketCone& cone) {
  const std::size_t atoms = cone.space()->size();
  const std::size_t gens = cone.generators().size();
  const bool slack = cone.mode() == ConeMode::ConeMinusPositives;
  const std::size_t nvars = gens + (slack ? atoms : 0);

  // x_i = sum_j lam_j g_j(i) (- h_i), boxed into 0 <= x_i <= 1; the box
  // makes the program bounded without cutting off any arbitrage direction.
  lp::LinearProgram prog(nvars);
  std::vector<Rat> objective(nvars, Rat(0));
  for (std::size_t i = 0; i < atoms; ++i) {
    std::vector<Rat> row(nvars, Rat(0));
    for (std::size_t j = 0; j < gens; ++j) {
      row[j] = cone.generators()[j][i];
      objective[j] += cone.generators()[j][i];
    }
    if (slack) {
      row[gens + i] = -1;
      objective[gens + i] = -1;
    }
    prog.add_constraint(row, lp::Relation::GE, Rat(0));
    prog.add_constraint(std::move(row), lp::Relation::LE, Rat(1));
  }
  prog.set_objective(std::move(objective));
  if (cone.mode() != ConeMode::Subspace)
    for (std::size_t j = 0; j < gens; ++j) prog.set_lower(j, Rat(0));
  if (slack)
    for (std::size_t i = 0; i < atoms; ++i) prog.set_lower(gens + i, Rat(0));

  const lp::LpOutcome out = lp::solve(prog);
  if (out.status != lp::LpStatus::Optimal)
    throw std::logic_error("no_arbitrage_check: box-bounded program not optimal");
  if (*out.objective_value == 0) return {true, std::nullopt};

  std::vector<Rat> witness(atoms, Rat(0));
  for (std::size_t i = 0; i < atoms; ++i) {
    for (std::size_t j = 0; j < gens; ++j) witness[i] += out.primal[j] * cone.generators()[j][i];
    if (slack) witness[i] -= out.primal[gens + i];
  }
  return {false, RandomVariable(cone.space(), std::move(witness))};
}

bool membership_in_truncation(const MarketCone& cone, const TruncationSpec& trunc,
                              const RandomVariable& x) {
  require_on_space(cone, x, "membership_in_truncation");
  const RandomVariable neg = x.neg_part();
  switch (trunc.kind()) {
    case TruncationSpec::Kind::UnitBall:
      return neg.max_value() <= 1;
    case TruncationSpec::Kind::EpsSequence: {
      for (std::size_t k = 1; k <= trunc.eps().size(); ++k)
        if (tail_probability(neg, Rat(static_cast<long>(k))) > trunc.eps()[k - 1]) return false;
      return true;
    }
    case TruncationSpec::Kind::Orlicz:
      return luxemburg_le_one(neg, trunc.phi());
  }
  return false;
}

namespace {

// Decides whether some h >= 0 gives -1 <= x - h <= 1, by LP.
bool unit_ball_split_exists(const RandomVariable& x) {
  const std::size_t atoms = x.size();
  lp::LinearProgram prog(atoms);
  for (std::size_t i = 0; i < atoms; ++i) {
    prog.set_lower(i, Rat(0));
    std::vector<Rat> row(atoms, Rat(0));
    row[i] = -1;
    prog.add_constraint(row, lp::Relation::GE, Rat(-1) - x[i]);  // x_i - h_i >= -1
    prog.add_constraint(std::move(row), lp::Relation::LE, Rat(1) - x[i]);  // x_i - h_i <= 1
  }
  return lp::solve(prog).status == lp::LpStatus::Optimal;
}

// Decides whether some h >= 0 gives modular(x - h, phi, 1) <= 1. phi(|v|)
// enters through epigraph variables t_i over supporting cuts: every linear
// segment of phi underestimates it globally (convexity), and a tangent is
// added at each x-_i beyond the last knot so the cut maximum equals phi
// exactly at the canonical split, which has the atomwise-smallest |v|.
bool orlicz_split_exists(const RandomVariable& x, const NFunction& phi) {
  std::vector<std::pair<Rat, Rat>> cuts;  // t >= a * |v| + b, a >= 0
  const auto& knots = phi.knots();
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const Rat a = (knots[i + 1].second - knots[i].second) / (knots[i + 1].first - knots[i].first);
    cuts.emplace_back(a, knots[i].second - a * knots[i].first);
  }
  const RandomVariable neg = x.neg_part();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (neg[i] > knots.back().first) {
      const Rat d = neg[i] - knots.back().first;
      const Rat a = phi.tail_slope() + 2 * phi.tail_quad() * d;
      cuts.emplace_back(a, phi(neg[i]) - a * neg[i]);
    }
  }

  const std::size_t atoms = x.size();
  // Variables: h_0..h_{atoms-1}, t_0..t_{atoms-1}.
  lp::LinearProgram prog(2 * atoms);
  for (std::size_t i = 0; i < atoms; ++i) {
    prog.set_lower(i, Rat(0));
    for (const auto& [a, b] : cuts) {
      for (const Rat& sign : {Rat(1), Rat(-1)}) {
        // t_i >= sign * a * (x_i - h_i) + b
        std::vector<Rat> row(2 * atoms, Rat(0));
        row[atoms + i] = 1;
        row[i] = sign * a;
        prog.add_constraint(std::move(row), lp::Relation::GE, sign * a * x[i] + b);
      }
    }
  }
  std::vector<Rat> budget(2 * atoms, Rat(0));
  for (std::size_t i = 0; i < atoms; ++i) budget[atoms + i] = x.space()->prob(i);
  prog.add_constraint(std::move(budget), lp::Relation::LE, Rat(1));
  return lp::solve(prog).status == lp::LpStatus::Optimal;
}

}  // namespace

bool verify_cv_identity(const MarketCone& cone, const TruncationSpec& trunc,
                        std::span<const RandomVariable> samples) {
  for (const RandomVariable& x : samples) {
    require_on_space(cone, x, "verify_cv_identity");
    if (!contains(cone, x))
      throw std::invalid_argument("verify_cv_identity: sample not in the cone");
    const bool member = membership_in_truncation(cone, trunc, x);
    bool split = false;
    switch (trunc.kind()) {
      case TruncationSpec::Kind::UnitBall:
        split = unit_ball_split_exists(x);
        break;
      case TruncationSpec::Kind::Orlicz:
        split = orlicz_split_exists(x, trunc.phi());
        break;
      case TruncationSpec::Kind::EpsSequence: {
        // Any split has |x - h| >= x- atomwise, so h = x+ (giving v = -x-)
        // minimizes every tail probability simultaneously.
        const RandomVariable canonical = -x.neg_part();
        split = true;
        for (std::size_t k = 1; k <= trunc.eps().size(); ++k) {
          if (tail_probability(canonical.abs(), Rat(static_cast<long>(k))) > trunc.eps()[k - 1]) {
            split = false;
            break;
          }
        }
        break;
      }
    }
    if (member != split) return false;
  }
  return true;
}

}  // namespace mmfloor
