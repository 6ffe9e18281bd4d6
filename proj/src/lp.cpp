#include "mmfloor/lp.hpp"

#include <atomic>
#include <ostream>
#include <stdexcept>

namespace mmfloor::lp {

namespace {

std::atomic<unsigned long long> g_solves{0};
std::atomic<unsigned long long> g_verify_failures{0};
std::ostream* g_trace = nullptr;

// How an original variable x_j maps into the nonnegative simplex variables.
//   Free:       x_j = y_pos - y_neg
//   LowerShift: x_j = y + lower_j           (upper bound, if any, becomes a row)
//   UpperFlip:  x_j = upper_j - y           (no lower bound present)
struct VarMap {
  enum Kind { Free, LowerShift, UpperFlip } kind;
  std::size_t col = 0;
  std::size_t col_neg = 0;  // Free only
  Rat shift;                // lower_j or upper_j
};

struct RowProv {
  enum Kind { FromConstraint, FromUpperBound } kind;
  std::size_t index;  // constraint index or variable index
  int sign;           // +1 as written, -1 negated (>= and second half of =)
};

// The expanded system is "A x <= b" over the original variables: relations
// normalized, equalities split, upper bounds of lower-shifted variables
// turned into rows.
struct Expanded {
  std::vector<std::vector<Rat>> rows;
  std::vector<Rat> rhs;
  std::vector<RowProv> prov;
};

Expanded expand(const LinearProgram& lp, const std::vector<VarMap>& vmap) {
  Expanded ex;
  const std::size_t n = lp.num_vars();
  for (std::size_t i = 0; i < lp.constraints().size(); ++i) {
    const Constraint& c = lp.constraints()[i];
    if (c.rel == Relation::LE || c.rel == Relation::EQ) {
      ex.rows.push_back(c.coeffs);
      ex.rhs.push_back(c.rhs);
      ex.prov.push_back({RowProv::FromConstraint, i, +1});
    }
    if (c.rel == Relation::GE || c.rel == Relation::EQ) {
      std::vector<Rat> neg(n);
      for (std::size_t j = 0; j < n; ++j) neg[j] = -c.coeffs[j];
      ex.rows.push_back(std::move(neg));
      ex.rhs.push_back(-c.rhs);
      ex.prov.push_back({RowProv::FromConstraint, i, -1});
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (vmap[j].kind == VarMap::LowerShift && lp.upper(j).has_value()) {
      std::vector<Rat> row(n, Rat(0));
      row[j] = 1;
      ex.rows.push_back(std::move(row));
      ex.rhs.push_back(*lp.upper(j));
      ex.prov.push_back({RowProv::FromUpperBound, j, +1});
    }
  }
  return ex;
}

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : cols_(cols), entering_limit_(cols) {
    t_.assign(rows, std::vector<Rat>(cols, Rat(0)));
    rhs_.assign(rows, Rat(0));
    basis_.assign(rows, 0);
  }

  std::size_t rows() const { return t_.size(); }
  std::size_t cols() const { return cols_; }
  Rat& at(std::size_t r, std::size_t c) { return t_[r][c]; }
  const Rat& at(std::size_t r, std::size_t c) const { return t_[r][c]; }
  Rat& rhs(std::size_t r) { return rhs_[r]; }
  const Rat& rhs(std::size_t r) const { return rhs_[r]; }
  std::size_t& basis(std::size_t r) { return basis_[r]; }
  std::size_t basis(std::size_t r) const { return basis_[r]; }

  // Columns >= limit are never picked to enter the basis.
  void set_entering_limit(std::size_t limit) { entering_limit_ = limit; }

  void set_objective(std::vector<Rat> c) {
    obj_ = std::move(c);
    obj_.resize(cols_, Rat(0));
    objval_ = 0;
    for (std::size_t r = 0; r < rows(); ++r) {
      const std::size_t b = basis_[r];
      if (obj_[b] == 0) continue;
      const Rat f = obj_[b];
      for (std::size_t j = 0; j < cols_; ++j) obj_[j] -= f * t_[r][j];
      objval_ += f * rhs_[r];
    }
  }

  const Rat& reduced_cost(std::size_t j) const { return obj_[j]; }
  const Rat& objective_value() const { return objval_; }

  enum class StepResult { Optimal, Pivoted, Unbounded };

  // One Bland step: entering = lowest-index column with positive reduced
  // cost, leaving = lowest-basis-index row among the minimal ratios.
  StepResult step(std::size_t* entering_out) {
    std::size_t e = cols_;
    for (std::size_t j = 0; j < entering_limit_; ++j) {
      if (obj_[j] > 0) {
        e = j;
        break;
      }
    }
    if (e == cols_) return StepResult::Optimal;
    std::size_t leave = rows();
    Rat best_ratio;
    for (std::size_t r = 0; r < rows(); ++r) {
      if (t_[r][e] > 0) {
        Rat ratio = rhs_[r] / t_[r][e];
        if (leave == rows() || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
    }
    if (leave == rows()) {
      *entering_out = e;
      return StepResult::Unbounded;
    }
    pivot(leave, e);
    return StepResult::Pivoted;
  }

  void pivot(std::size_t r, std::size_t e) {
    const Rat piv = t_[r][e];
    for (std::size_t j = 0; j < cols_; ++j) t_[r][j] /= piv;
    rhs_[r] /= piv;
    for (std::size_t r2 = 0; r2 < rows(); ++r2) {
      if (r2 == r || t_[r2][e] == 0) continue;
      const Rat f = t_[r2][e];
      for (std::size_t j = 0; j < cols_; ++j) t_[r2][j] -= f * t_[r][j];
      rhs_[r2] -= f * rhs_[r];
    }
    if (obj_[e] != 0) {
      const Rat f = obj_[e];
      for (std::size_t j = 0; j < cols_; ++j) obj_[j] -= f * t_[r][j];
      objval_ += f * rhs_[r];
    }
    basis_[r] = e;
    if (g_trace) dump(*g_trace);
  }

  void dump(std::ostream& os) const {
    os << "tableau (" << rows() << " rows, " << cols_ << " cols)\n";
    for (std::size_t r = 0; r < rows(); ++r) {
      os << "  b" << basis_[r] << " |";
      for (std::size_t j = 0; j < cols_; ++j) os << ' ' << t_[r][j].get_str();
      os << " | " << rhs_[r].get_str() << '\n';
    }
    os << "  z  |";
    for (std::size_t j = 0; j < cols_; ++j) os << ' ' << obj_[j].get_str();
    os << " | " << objval_.get_str() << '\n';
  }

 private:
  std::size_t cols_;
  std::size_t entering_limit_;
  std::vector<std::vector<Rat>> t_;
  std::vector<Rat> rhs_;
  std::vector<std::size_t> basis_;
  std::vector<Rat> obj_;
  Rat objval_;
};

struct Multipliers {
  std::vector<Rat> mu;    // per constraint, signed per relation
  std::vector<Rat> lamL;  // per variable, >= 0
  std::vector<Rat> lamU;  // per variable, >= 0
};

std::vector<Rat> pack(const Multipliers& m) {
  std::vector<Rat> out;
  out.reserve(m.mu.size() + m.lamL.size() + m.lamU.size());
  out.insert(out.end(), m.mu.begin(), m.mu.end());
  out.insert(out.end(), m.lamL.begin(), m.lamL.end());
  out.insert(out.end(), m.lamU.begin(), m.lamU.end());
  return out;
}

}  // namespace

LinearProgram::LinearProgram(std::size_t num_vars)
    : n_(num_vars), objective_(num_vars, Rat(0)), lower_(num_vars), upper_(num_vars) {}

void LinearProgram::set_objective(std::vector<Rat> c) {
  if (c.size() != n_) throw std::invalid_argument("LinearProgram: objective size mismatch");
  objective_ = std::move(c);
}

void LinearProgram::add_constraint(std::vector<Rat> coeffs, Relation rel, Rat rhs) {
  if (coeffs.size() != n_) throw std::invalid_argument("LinearProgram: row size mismatch");
  constraints_.push_back({std::move(coeffs), rel, std::move(rhs)});
}

void LinearProgram::set_lower(std::size_t var, Rat bound) { lower_.at(var) = std::move(bound); }
void LinearProgram::set_upper(std::size_t var, Rat bound) { upper_.at(var) = std::move(bound); }

SolveStats solve_stats() { return {g_solves.load(), g_verify_failures.load()}; }

void reset_solve_stats() {
  g_solves = 0;
  g_verify_failures = 0;
}

void set_trace_stream(std::ostream* os) { g_trace = os; }

LpOutcome solve(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars();

  std::vector<VarMap> vmap(n);
  std::size_t ycols = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (lp.lower(j).has_value()) {
      vmap[j] = {VarMap::LowerShift, ycols++, 0, *lp.lower(j)};
    } else if (lp.upper(j).has_value()) {
      vmap[j] = {VarMap::UpperFlip, ycols++, 0, *lp.upper(j)};
    } else {
      vmap[j].kind = VarMap::Free;
      vmap[j].col = ycols++;
      vmap[j].col_neg = ycols++;
      vmap[j].shift = 0;
    }
  }

  const Expanded ex = expand(lp, vmap);
  const std::size_t m = ex.rows.size();

  // y-space rows: row_y . y <= rhs_y under x = S y + t.
  std::vector<std::vector<Rat>> yrows(m);
  std::vector<Rat> yrhs(m);
  for (std::size_t r = 0; r < m; ++r) {
    yrows[r].assign(ycols, Rat(0));
    yrhs[r] = ex.rhs[r];
    for (std::size_t j = 0; j < n; ++j) {
      const Rat& a = ex.rows[r][j];
      if (a == 0) continue;
      switch (vmap[j].kind) {
        case VarMap::Free:
          yrows[r][vmap[j].col] += a;
          yrows[r][vmap[j].col_neg] -= a;
          break;
        case VarMap::LowerShift:
          yrows[r][vmap[j].col] += a;
          yrhs[r] -= a * vmap[j].shift;
          break;
        case VarMap::UpperFlip:
          yrows[r][vmap[j].col] -= a;
          yrhs[r] -= a * vmap[j].shift;
          break;
      }
    }
  }

  std::vector<Rat> cy(ycols, Rat(0));
  Rat offset(0);
  for (std::size_t j = 0; j < n; ++j) {
    const Rat& c = lp.objective()[j];
    if (c == 0) continue;
    switch (vmap[j].kind) {
      case VarMap::Free:
        cy[vmap[j].col] += c;
        cy[vmap[j].col_neg] -= c;
        break;
      case VarMap::LowerShift:
        cy[vmap[j].col] += c;
        offset += c * vmap[j].shift;
        break;
      case VarMap::UpperFlip:
        cy[vmap[j].col] -= c;
        offset += c * vmap[j].shift;
        break;
    }
  }

  std::size_t num_arts = 0;
  for (std::size_t r = 0; r < m; ++r)
    if (yrhs[r] < 0) ++num_arts;
  const std::size_t slack0 = ycols;
  const std::size_t art0 = ycols + m;
  const std::size_t total_cols = art0 + num_arts;

  Tableau tab(m, total_cols);
  {
    std::size_t art = art0;
    for (std::size_t r = 0; r < m; ++r) {
      const bool neg = yrhs[r] < 0;
      for (std::size_t j = 0; j < ycols; ++j) tab.at(r, j) = neg ? Rat(-yrows[r][j]) : yrows[r][j];
      tab.at(r, slack0 + r) = neg ? Rat(-1) : Rat(1);
      tab.rhs(r) = neg ? Rat(-yrhs[r]) : yrhs[r];
      if (neg) {
        tab.at(r, art) = 1;
        tab.basis(r) = art++;
      } else {
        tab.basis(r) = slack0 + r;
      }
    }
  }

  auto run_simplex = [&](Tableau& t) -> std::optional<std::size_t> {
    while (true) {
      std::size_t e = 0;
      const Tableau::StepResult s = t.step(&e);
      if (s == Tableau::StepResult::Optimal) return std::nullopt;
      if (s == Tableau::StepResult::Unbounded) return e;
    }
  };

  // q_r = -reduced cost of the slack column of expanded row r: the simplex
  // multipliers of the expanded <= system, nonnegative at optimality.
  auto multipliers_from_objrow = [&](const Tableau& t) {
    std::vector<Rat> q(m);
    for (std::size_t r = 0; r < m; ++r) q[r] = -t.reduced_cost(slack0 + r);
    return q;
  };

  // Collapses expanded-row multipliers into signed constraint multipliers
  // plus bound multipliers, via the variable-transform algebra.
  auto assemble = [&](const std::vector<Rat>& q, const std::vector<Rat>& against_c) {
    Multipliers mult;
    mult.mu.assign(lp.constraints().size(), Rat(0));
    mult.lamL.assign(n, Rat(0));
    mult.lamU.assign(n, Rat(0));
    std::vector<Rat> M(n, Rat(0));  // q^T A over all expanded rows
    std::vector<Rat> U(n, Rat(0));  // the upper-bound-row part of M
    for (std::size_t r = 0; r < m; ++r) {
      if (q[r] == 0) continue;
      if (ex.prov[r].kind == RowProv::FromConstraint) {
        mult.mu[ex.prov[r].index] += Rat(ex.prov[r].sign) * q[r];
      } else {
        U[ex.prov[r].index] += q[r];
      }
      for (std::size_t j = 0; j < n; ++j) M[j] += q[r] * ex.rows[r][j];
    }
    for (std::size_t j = 0; j < n; ++j) {
      switch (vmap[j].kind) {
        case VarMap::Free:
          break;  // M_j = c_j exactly at optimality; no bound multipliers
        case VarMap::LowerShift:
          mult.lamL[j] = M[j] - against_c[j];
          mult.lamU[j] = U[j];
          break;
        case VarMap::UpperFlip:
          mult.lamU[j] = against_c[j] - M[j];
          break;
      }
    }
    return mult;
  };

  auto certificate_value = [&](const Multipliers& mult) {
    Rat v(0);
    for (std::size_t i = 0; i < lp.constraints().size(); ++i)
      v += mult.mu[i] * lp.constraints()[i].rhs;
    for (std::size_t j = 0; j < n; ++j) {
      if (lp.lower(j)) v -= mult.lamL[j] * *lp.lower(j);
      if (lp.upper(j)) v += mult.lamU[j] * *lp.upper(j);
    }
    return v;
  };

  auto finish = [&](LpOutcome out) {
    ++g_solves;
    if (!verify_outcome(lp, out)) {
      ++g_verify_failures;
      throw std::logic_error("lp: outcome failed certificate self-check");
    }
    return out;
  };

  if (num_arts > 0) {
    std::vector<Rat> phase1(total_cols, Rat(0));
    for (std::size_t a = art0; a < total_cols; ++a) phase1[a] = -1;
    tab.set_objective(std::move(phase1));
    if (g_trace) tab.dump(*g_trace);
    if (run_simplex(tab))
      throw std::logic_error("lp: the artificial objective cannot be unbounded");
    if (tab.objective_value() < 0) {
      const std::vector<Rat> zeros(n, Rat(0));
      Multipliers mult = assemble(multipliers_from_objrow(tab), zeros);
      const Rat gap = certificate_value(mult);  // < 0 here
      const Rat scale = Rat(-1) / gap;
      for (Rat& v : mult.mu) v *= scale;
      for (Rat& v : mult.lamL) v *= scale;
      for (Rat& v : mult.lamU) v *= scale;
      LpOutcome out;
      out.status = LpStatus::Infeasible;
      out.farkas = pack(mult);
      return finish(std::move(out));
    }
    // Pivot artificials out of the basis where possible. A row with no
    // nonzero entry left of the artificial block is inert: its artificial
    // stays basic at zero and no later pivot can touch the row.
    for (std::size_t r = 0; r < tab.rows(); ++r) {
      if (tab.basis(r) < art0) continue;
      for (std::size_t j = 0; j < art0; ++j) {
        if (tab.at(r, j) != 0) {
          tab.pivot(r, j);
          break;
        }
      }
    }
  }

  tab.set_entering_limit(art0);
  tab.set_objective(cy);
  if (g_trace) tab.dump(*g_trace);
  const std::optional<std::size_t> unbounded_col = run_simplex(tab);

  std::vector<Rat> y(ycols, Rat(0));
  for (std::size_t r = 0; r < tab.rows(); ++r)
    if (tab.basis(r) < ycols) y[tab.basis(r)] = tab.rhs(r);
  auto y_to_x = [&](const std::vector<Rat>& yv, bool with_shift) {
    std::vector<Rat> x(n, Rat(0));
    for (std::size_t j = 0; j < n; ++j) {
      switch (vmap[j].kind) {
        case VarMap::Free:
          x[j] = yv[vmap[j].col] - yv[vmap[j].col_neg];
          break;
        case VarMap::LowerShift:
          x[j] = yv[vmap[j].col];
          if (with_shift) x[j] += vmap[j].shift;
          break;
        case VarMap::UpperFlip:
          x[j] = -yv[vmap[j].col];
          if (with_shift) x[j] += vmap[j].shift;
          break;
      }
    }
    return x;
  };

  LpOutcome out;
  out.primal = y_to_x(y, true);
  if (unbounded_col) {
    std::vector<Rat> d(ycols, Rat(0));
    if (*unbounded_col < ycols) d[*unbounded_col] = 1;
    for (std::size_t r = 0; r < tab.rows(); ++r)
      if (tab.basis(r) < ycols) d[tab.basis(r)] = -tab.at(r, *unbounded_col);
    out.status = LpStatus::Unbounded;
    out.ray = y_to_x(d, false);
  } else {
    out.status = LpStatus::Optimal;
    out.objective_value = tab.objective_value() + offset;
    out.dual = pack(assemble(multipliers_from_objrow(tab), lp.objective()));
  }
  return finish(std::move(out));
}

namespace {

bool feasible_point(const LinearProgram& lp, const std::vector<Rat>& x) {
  const std::size_t n = lp.num_vars();
  if (x.size() != n) return false;
  for (const Constraint& c : lp.constraints()) {
    Rat lhs(0);
    for (std::size_t j = 0; j < n; ++j) lhs += c.coeffs[j] * x[j];
    if (c.rel == Relation::LE && lhs > c.rhs) return false;
    if (c.rel == Relation::GE && lhs < c.rhs) return false;
    if (c.rel == Relation::EQ && lhs != c.rhs) return false;
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (lp.lower(j) && x[j] < *lp.lower(j)) return false;
    if (lp.upper(j) && x[j] > *lp.upper(j)) return false;
  }
  return true;
}

// Unpacks multipliers, checks their sign conditions, and accumulates the
// combination sum mu_i a_i - lamL + lamU along with the rhs-side value.
bool check_multipliers(const LinearProgram& lp, const std::vector<Rat>& packed,
                       std::vector<Rat>* combo, Rat* value) {
  const std::size_t n = lp.num_vars();
  const std::size_t m = lp.constraints().size();
  if (packed.size() != m + 2 * n) return false;
  combo->assign(n, Rat(0));
  *value = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const Rat& mu = packed[i];
    const Relation rel = lp.constraints()[i].rel;
    if (rel == Relation::LE && mu < 0) return false;
    if (rel == Relation::GE && mu > 0) return false;
    if (mu == 0) continue;
    for (std::size_t j = 0; j < n; ++j) (*combo)[j] += mu * lp.constraints()[i].coeffs[j];
    *value += mu * lp.constraints()[i].rhs;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const Rat& lamL = packed[m + j];
    const Rat& lamU = packed[m + n + j];
    if (lamL < 0 || lamU < 0) return false;
    if (lamL != 0 && !lp.lower(j)) return false;
    if (lamU != 0 && !lp.upper(j)) return false;
    (*combo)[j] -= lamL;
    (*combo)[j] += lamU;
    if (lp.lower(j)) *value -= lamL * *lp.lower(j);
    if (lp.upper(j)) *value += lamU * *lp.upper(j);
  }
  return true;
}

}  // namespace

bool verify_outcome(const LinearProgram& lp, const LpOutcome& out) {
  const std::size_t n = lp.num_vars();
  switch (out.status) {
    case LpStatus::Optimal: {
      if (!out.objective_value) return false;
      if (!feasible_point(lp, out.primal)) return false;
      Rat val(0);
      for (std::size_t j = 0; j < n; ++j) val += lp.objective()[j] * out.primal[j];
      if (val != *out.objective_value) return false;
      if (!out.dual.empty()) {
        std::vector<Rat> combo;
        Rat dual_value;
        if (!check_multipliers(lp, out.dual, &combo, &dual_value)) return false;
        for (std::size_t j = 0; j < n; ++j)
          if (combo[j] != lp.objective()[j]) return false;
        if (dual_value != *out.objective_value) return false;
      }
      return true;
    }
    case LpStatus::Unbounded: {
      if (out.ray.size() != n) return false;
      if (!feasible_point(lp, out.primal)) return false;
      for (const Constraint& c : lp.constraints()) {
        Rat d(0);
        for (std::size_t j = 0; j < n; ++j) d += c.coeffs[j] * out.ray[j];
        if (c.rel == Relation::LE && d > 0) return false;
        if (c.rel == Relation::GE && d < 0) return false;
        if (c.rel == Relation::EQ && d != 0) return false;
      }
      Rat gain(0);
      for (std::size_t j = 0; j < n; ++j) {
        if (lp.lower(j) && out.ray[j] < 0) return false;
        if (lp.upper(j) && out.ray[j] > 0) return false;
        gain += lp.objective()[j] * out.ray[j];
      }
      return gain > 0;
    }
    case LpStatus::Infeasible: {
      std::vector<Rat> combo;
      Rat value;
      if (!check_multipliers(lp, out.farkas, &combo, &value)) return false;
      for (std::size_t j = 0; j < n; ++j)
        if (combo[j] != 0) return false;
      return value < 0;  // the combination reads 0 <= value with value < 0
    }
  }
  return false;
}

}  // namespace mmfloor::lp
