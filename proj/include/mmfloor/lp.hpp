#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "mmfloor/rational.hpp"

namespace mmfloor::lp {

enum class Relation { LE, EQ, GE };

struct Constraint {
  std::vector<Rat> coeffs;
  Relation rel;
  Rat rhs;
};

// maximize objective . x  subject to the constraint rows and per-variable
// bounds. Bounds are optional on each side; an absent bound means free.
class LinearProgram {
 public:
  explicit LinearProgram(std::size_t num_vars);

  std::size_t num_vars() const { return n_; }

  void set_objective(std::vector<Rat> c);
  void add_constraint(std::vector<Rat> coeffs, Relation rel, Rat rhs);
  void set_lower(std::size_t var, Rat bound);
  void set_upper(std::size_t var, Rat bound);

  const std::vector<Rat>& objective() const { return objective_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::optional<Rat>& lower(std::size_t j) const { return lower_[j]; }
  const std::optional<Rat>& upper(std::size_t j) const { return upper_[j]; }

 private:
  std::size_t n_;
  std::vector<Rat> objective_;
  std::vector<Constraint> constraints_;
  std::vector<std::optional<Rat>> lower_, upper_;
};

enum class LpStatus { Optimal, Unbounded, Infeasible };

// Certified outcome. With m constraint rows and n variables, `dual` and
// `farkas` use a fixed layout of m + 2n multipliers:
//
//   [ mu_0 .. mu_{m-1} | lamL_0 .. lamL_{n-1} | lamU_0 .. lamU_{n-1} ]
//
// mu_i multiplies constraint row i (mu_i >= 0 for <=, mu_i <= 0 for >=,
// free for =), lamL_j >= 0 multiplies the bound x_j >= l_j and lamU_j >= 0
// multiplies x_j <= u_j (zero where the bound is absent). The certified
// identities, all exact:
//
//   Optimal:    primal feasible, objective_value = c . primal, and
//               sum_i mu_i a_i - lamL + lamU = c with
//               sum_i mu_i b_i - lamL . l + lamU . u = objective_value.
//   Unbounded:  primal feasible, and the ray r satisfies a_i . r <= 0
//               (= 0, >= 0) per row relation, r_j >= 0 where l_j exists,
//               r_j <= 0 where u_j exists, and c . r > 0.
//   Infeasible: farkas multipliers satisfy the sign conditions,
//               sum_i mu_i a_i - lamL + lamU = 0 componentwise, and
//               sum_i mu_i b_i - lamL . l + lamU . u = -1,
//               i.e. the combination reads 0 <= -1.
struct LpOutcome {
  LpStatus status;
  std::vector<Rat> primal;
  std::optional<Rat> objective_value;
  std::vector<Rat> ray;
  std::vector<Rat> farkas;
  std::vector<Rat> dual;
};

// Exact two-phase dense simplex with Bland's anti-cycling rule. Every
// returned outcome has already passed verify_outcome; a failure there is a
// solver bug and raises std::logic_error.
LpOutcome solve(const LinearProgram& lp);

// Re-derives every certificate identity of `out` directly from `lp`, using
// none of the solver's internals. Exact comparisons throughout.
bool verify_outcome(const LinearProgram& lp, const LpOutcome& out);

// Process-wide tally of solves and self-verification failures, used by the
// acceptance suite to confirm that every LP run in a scenario was certified.
struct SolveStats {
  unsigned long long solves = 0;
  unsigned long long verify_failures = 0;
};
SolveStats solve_stats();
void reset_solve_stats();

// When set, each pivot dumps the working tableau (debug aid for the CLI's
// --debug-lp). Not for concurrent use.
void set_trace_stream(std::ostream* os);

}  // namespace mmfloor::lp
