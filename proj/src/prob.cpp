#include "mmfloor/prob.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mmfloor {

Rat parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  const auto slash = text.find('/');
  if (slash != std::string::npos && text.find('/', slash + 1) != std::string::npos)
    throw std::invalid_argument("malformed rational literal: " + text);
  Rat r;
  if (mpq_set_str(r.get_mpq_t(), text.c_str(), 10) != 0)
    throw std::invalid_argument("malformed rational literal: " + text);
  if (mpz_sgn(mpq_denref(r.get_mpq_t())) == 0)
    throw std::invalid_argument("zero denominator in rational literal: " + text);
  r.canonicalize();
  return r;
}

std::string to_fraction(const Rat& r) { return r.get_str(); }

std::string to_decimal(const Rat& r, int significant) {
  const double d = r.get_d();
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", significant, d);
  return buf;
}

Rat rat_floor(const Rat& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return Rat(q);
}

Rat pow2(long k) {
  mpz_class z(1);
  mpz_mul_2exp(z.get_mpz_t(), z.get_mpz_t(), static_cast<mp_bitcnt_t>(k >= 0 ? k : -k));
  return k >= 0 ? Rat(z) : Rat(1) / Rat(z);
}

std::vector<std::string> to_fraction_vector(std::span<const Rat> v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const Rat& r : v) out.push_back(to_fraction(r));
  return out;
}

ProbSpace::ProbSpace(std::vector<std::string> labels, std::vector<Rat> probs)
    : labels_(std::move(labels)), probs_(std::move(probs)) {
  if (labels_.size() != probs_.size())
    throw std::invalid_argument("ProbSpace: label/prob count mismatch");
  if (probs_.empty()) throw std::invalid_argument("ProbSpace: no atoms");
  Rat total(0);
  for (const Rat& p : probs_) {
    if (p <= 0) throw std::invalid_argument("ProbSpace: atom probability must be > 0");
    total += p;
  }
  if (total != 1) throw std::invalid_argument("ProbSpace: probabilities sum to " +
                                              to_fraction(total) + ", expected 1");
  std::set<std::string> seen;
  for (const std::string& l : labels_)
    if (!seen.insert(l).second)
      throw std::invalid_argument("ProbSpace: duplicate atom label '" + l + "'");
}

SpacePtr make_space(std::vector<std::string> labels, std::vector<Rat> probs) {
  return std::make_shared<const ProbSpace>(std::move(labels), std::move(probs));
}

RandomVariable::RandomVariable(SpacePtr space, std::vector<Rat> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw std::invalid_argument("RandomVariable: null space");
  if (values_.size() != space_->size())
    throw std::invalid_argument("RandomVariable: expected one value per atom");
}

static void require_same_space(const RandomVariable& a, const RandomVariable& b) {
  if (!a.same_space(b))
    throw std::invalid_argument("random variables live on different spaces");
}

RandomVariable RandomVariable::operator+(const RandomVariable& o) const {
  require_same_space(*this, o);
  std::vector<Rat> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + o.values_[i];
  return RandomVariable(space_, std::move(v));
}

RandomVariable RandomVariable::operator-(const RandomVariable& o) const {
  require_same_space(*this, o);
  std::vector<Rat> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] - o.values_[i];
  return RandomVariable(space_, std::move(v));
}

RandomVariable RandomVariable::operator-() const {
  std::vector<Rat> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = -values_[i];
  return RandomVariable(space_, std::move(v));
}

RandomVariable RandomVariable::scaled(const Rat& a) const {
  std::vector<Rat> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a * values_[i];
  return RandomVariable(space_, std::move(v));
}

RandomVariable RandomVariable::pos_part() const {
  std::vector<Rat> v(values_.size(), Rat(0));
  for (std::size_t i = 0; i < v.size(); ++i)
    if (values_[i] > 0) v[i] = values_[i];
  return RandomVariable(space_, std::move(v));
}

RandomVariable RandomVariable::neg_part() const {
  std::vector<Rat> v(values_.size(), Rat(0));
  for (std::size_t i = 0; i < v.size(); ++i)
    if (values_[i] < 0) v[i] = -values_[i];
  return RandomVariable(space_, std::move(v));
}

RandomVariable RandomVariable::abs() const {
  std::vector<Rat> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = ::abs(values_[i]);
  return RandomVariable(space_, std::move(v));
}

Rat RandomVariable::max_value() const {
  Rat m = values_[0];
  for (const Rat& v : values_)
    if (v > m) m = v;
  return m;
}

Rat RandomVariable::min_value() const {
  Rat m = values_[0];
  for (const Rat& v : values_)
    if (v < m) m = v;
  return m;
}

bool RandomVariable::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](const Rat& v) { return v == 0; });
}

bool RandomVariable::nonnegative() const {
  return std::all_of(values_.begin(), values_.end(), [](const Rat& v) { return v >= 0; });
}

RandomVariable RandomVariable::constant(SpacePtr space, const Rat& c) {
  std::vector<Rat> v(space->size(), c);
  return RandomVariable(std::move(space), std::move(v));
}

RandomVariable RandomVariable::zero(SpacePtr space) { return constant(std::move(space), Rat(0)); }

AtomPartition::AtomPartition(std::size_t atom_count,
                             std::vector<std::vector<std::size_t>> blocks)
    : atom_count_(atom_count), blocks_(std::move(blocks)) {
  std::vector<bool> seen(atom_count_, false);
  std::size_t covered = 0;
  for (const auto& block : blocks_) {
    if (block.empty()) throw std::invalid_argument("AtomPartition: empty block");
    for (std::size_t i : block) {
      if (i >= atom_count_) throw std::invalid_argument("AtomPartition: index out of range");
      if (seen[i]) throw std::invalid_argument("AtomPartition: blocks overlap");
      seen[i] = true;
      ++covered;
    }
  }
  if (covered != atom_count_)
    throw std::invalid_argument("AtomPartition: blocks do not cover all atoms");
}

AtomPartition AtomPartition::trivial(std::size_t atom_count) {
  std::vector<std::size_t> all(atom_count);
  for (std::size_t i = 0; i < atom_count; ++i) all[i] = i;
  return AtomPartition(atom_count, {all});
}

AtomPartition AtomPartition::singletons(std::size_t atom_count) {
  std::vector<std::vector<std::size_t>> blocks;
  blocks.reserve(atom_count);
  for (std::size_t i = 0; i < atom_count; ++i) blocks.push_back({i});
  return AtomPartition(atom_count, std::move(blocks));
}

Rat expectation(const RandomVariable& x) {
  Rat s(0);
  for (std::size_t i = 0; i < x.size(); ++i) s += x.space()->prob(i) * x[i];
  return s;
}

Rat pairing(const RandomVariable& x, const RandomVariable& f) {
  require_same_space(x, f);
  Rat s(0);
  for (std::size_t i = 0; i < x.size(); ++i) s += x.space()->prob(i) * x[i] * f[i];
  return s;
}

std::pair<RandomVariable, RandomVariable> pos_neg_parts(const RandomVariable& x) {
  return {x.pos_part(), x.neg_part()};
}

RandomVariable conditional_expectation(const RandomVariable& x, const AtomPartition& part) {
  if (part.atom_count() != x.size())
    throw std::invalid_argument("conditional_expectation: partition size mismatch");
  std::vector<Rat> out(x.size(), Rat(0));
  for (const auto& block : part.blocks()) {
    Rat mass(0), sum(0);
    for (std::size_t i : block) {
      mass += x.space()->prob(i);
      sum += x.space()->prob(i) * x[i];
    }
    const Rat avg = sum / mass;  // mass > 0 by the space invariant
    for (std::size_t i : block) out[i] = avg;
  }
  return RandomVariable(x.space(), std::move(out));
}

Rat tail_probability(const RandomVariable& x, const Rat& k) {
  Rat s(0);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= k) s += x.space()->prob(i);
  return s;
}

}  // namespace mmfloor
