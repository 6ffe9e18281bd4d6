#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmfloor/rational.hpp"

namespace mmfloor {

// Finite atomic probability space. Atom order is fixed at construction and
// defines the vector layout of every random variable on the space.
//
// Invariants, enforced by the constructor:
//   - every probability is strictly positive (zero-mass atoms are rejected),
//   - probabilities sum exactly to 1,
//   - atom labels are unique.
class ProbSpace {
 public:
  ProbSpace(std::vector<std::string> labels, std::vector<Rat> probs);

  std::size_t size() const { return probs_.size(); }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  const Rat& prob(std::size_t i) const { return probs_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Rat>& probs() const { return probs_; }

 private:
  std::vector<std::string> labels_;
  std::vector<Rat> probs_;
};

using SpacePtr = std::shared_ptr<const ProbSpace>;

SpacePtr make_space(std::vector<std::string> labels, std::vector<Rat> probs);

// A real (rational) vector indexed by the atoms of a ProbSpace. Immutable
// value semantics; the space is shared, identity decides compatibility.
class RandomVariable {
 public:
  RandomVariable(SpacePtr space, std::vector<Rat> values);

  const SpacePtr& space() const { return space_; }
  std::size_t size() const { return values_.size(); }
  const Rat& operator[](std::size_t i) const { return values_[i]; }
  const std::vector<Rat>& values() const { return values_; }

  bool same_space(const RandomVariable& other) const {
    return space_.get() == other.space_.get();
  }

  RandomVariable operator+(const RandomVariable& o) const;
  RandomVariable operator-(const RandomVariable& o) const;
  RandomVariable operator-() const;
  RandomVariable scaled(const Rat& a) const;

  RandomVariable pos_part() const;  // x+ = max(x, 0) atomwise
  RandomVariable neg_part() const;  // x- = max(-x, 0) atomwise
  RandomVariable abs() const;       // |x| = x+ + x-

  Rat max_value() const;
  Rat min_value() const;
  bool is_zero() const;
  bool nonnegative() const;

  static RandomVariable constant(SpacePtr space, const Rat& c);
  static RandomVariable zero(SpacePtr space);

 private:
  SpacePtr space_;
  std::vector<Rat> values_;
};

// Partition of the atom index set into disjoint, covering, nonempty blocks.
// Plays the role of a sub-sigma-algebra when conditioning.
class AtomPartition {
 public:
  AtomPartition(std::size_t atom_count, std::vector<std::vector<std::size_t>> blocks);

  std::size_t atom_count() const { return atom_count_; }
  const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }

  static AtomPartition trivial(std::size_t atom_count);
  static AtomPartition singletons(std::size_t atom_count);

 private:
  std::size_t atom_count_;
  std::vector<std::vector<std::size_t>> blocks_;
};

// E[x] = sum_i p_i x_i, exact.
Rat expectation(const RandomVariable& x);

// <x, f> = E[x f]. Throws std::invalid_argument if the spaces differ.
Rat pairing(const RandomVariable& x, const RandomVariable& f);

// (x+, x-) with x = x+ - x- and x+ . x- = 0 atomwise.
std::pair<RandomVariable, RandomVariable> pos_neg_parts(const RandomVariable& x);

// Blockwise average: constant on each block, equal to the block's
// probability-weighted mean. Expectation is preserved.
RandomVariable conditional_expectation(const RandomVariable& x, const AtomPartition& part);

// P(x >= k). Callers pass |x| or x- as needed.
Rat tail_probability(const RandomVariable& x, const Rat& k);

}  // namespace mmfloor
