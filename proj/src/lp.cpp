#include "coqr/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coqr {

namespace {
constexpr double kPivotTol = 1e-9;   // reduced-cost and ratio-test comparisons
constexpr double kEjectTol = 1e-7;   // minimum pivot magnitude when ejecting artificials
}  // namespace

SimplexSolver::SimplexSolver(LPProblem problem) : problem_(std::move(problem)) {
  const auto& lp = problem_;
  n_rows_ = static_cast<int>(lp.aeq.rows());
  n_cols_ = static_cast<int>(lp.aeq.cols());
  if (lp.cost.size() != n_cols_)
    throw DimensionMismatch("lp: cost length " + std::to_string(lp.cost.size()) +
                            " != " + std::to_string(n_cols_) + " columns");
  if (lp.beq.size() != n_rows_)
    throw DimensionMismatch("lp: rhs length " + std::to_string(lp.beq.size()) +
                            " != " + std::to_string(n_rows_) + " rows");
  if (n_rows_ > n_cols_)
    throw DimensionMismatch("lp: more equality rows than variables (" +
                            std::to_string(n_rows_) + " > " + std::to_string(n_cols_) + ")");
  if (n_rows_ == 0 || n_cols_ == 0)
    throw DimensionMismatch("lp: empty problem");
  if (!lp.cost.allFinite() || !lp.aeq.allFinite() || !lp.beq.allFinite())
    throw NonFiniteInput("lp: non-finite entry in problem data");

  b_scale_ = 1.0 + lp.beq.cwiseAbs().maxCoeff();
  build_tableau();
}

void SimplexSolver::build_tableau() {
  const int k = n_rows_;
  const int m = n_cols_;

  // Row signs flipped so the right-hand side is nonnegative.
  Eigen::VectorXd row_sign = Eigen::VectorXd::Ones(k);
  for (int i = 0; i < k; ++i)
    if (problem_.beq[i] < 0.0) row_sign[i] = -1.0;

  // Crash basis: a column whose only nonzero sits in row i with positive
  // sign (after the flip) can serve as the basic column of row i directly.
  // The slack blocks of quantile-regression programs are all of this form,
  // so phase one typically needs artificials for at most a couple of rows.
  std::vector<int> crash_col(k, -1);
  {
    std::vector<int> nnz_row(m, -1);  // row of the single nonzero, -2 if several
    for (int j = 0; j < m; ++j) {
      int where = -1;
      for (int i = 0; i < k; ++i) {
        if (problem_.aeq(i, j) != 0.0) {
          if (where >= 0) { where = -2; break; }
          where = i;
        }
      }
      nnz_row[j] = where;
    }
    std::vector<bool> used(m, false);
    for (int j = 0; j < m; ++j) {
      const int i = nnz_row[j];
      if (i < 0 || crash_col[i] >= 0) continue;
      if (row_sign[i] * problem_.aeq(i, j) > kPivotTol && !used[j]) {
        crash_col[i] = j;
        used[j] = true;
      }
    }
  }

  n_art_ = 0;
  for (int i = 0; i < k; ++i)
    if (crash_col[i] < 0) ++n_art_;

  const int width = m + n_art_ + 1;
  rhs_col_ = width - 1;
  tableau_.setZero(k + 2, width);
  basis_.assign(k, -1);
  row_active_.assign(k, true);
  is_basic_.assign(m + n_art_, false);

  int next_art = 0;
  for (int i = 0; i < k; ++i) {
    // Normalize so the basic entry is exactly 1; the crash-column sign rule
    // keeps the scaled right-hand side nonnegative.
    const double scale =
        crash_col[i] >= 0 ? 1.0 / problem_.aeq(i, crash_col[i]) : row_sign[i];
    tableau_.row(i).head(m) = scale * problem_.aeq.row(i);
    tableau_(i, rhs_col_) = scale * problem_.beq[i];
    if (crash_col[i] >= 0) {
      basis_[i] = crash_col[i];
      tableau_(i, crash_col[i]) = 1.0;
    } else {
      const int art = m + next_art++;
      basis_[i] = art;
      tableau_(i, art) = 1.0;
    }
    is_basic_[basis_[i]] = true;
  }

  // Phase-one cost row: reduced costs of minimizing the artificial sum.
  const int p1 = k;
  for (int i = 0; i < k; ++i) {
    if (basis_[i] >= m) tableau_.row(p1).head(width) -= tableau_.row(i).head(width);
  }
  for (int a = 0; a < n_art_; ++a) tableau_(p1, m + a) = 0.0;

  // Phase-two cost row: reduced against the crash basis.
  const int p2 = k + 1;
  tableau_.row(p2).head(m) = problem_.cost.transpose();
  for (int i = 0; i < k; ++i) {
    const double cb = basis_[i] < m ? problem_.cost[basis_[i]] : 0.0;
    if (cb != 0.0) tableau_.row(p2).head(width) -= cb * tableau_.row(i).head(width);
  }

  pivot_budget_ = 50L * (k + m);
  pivots_used_ = 0;
}

void SimplexSolver::pivot(int pivot_row, int pivot_col) {
  if (++pivots_used_ > pivot_budget_)
    throw IterationLimitExceeded("lp: pivot budget of " + std::to_string(pivot_budget_) +
                                 " exhausted; likely cycling");
  const int width = rhs_col_ + 1;
  auto prow = tableau_.row(pivot_row).head(width);
  prow /= tableau_(pivot_row, pivot_col);
  tableau_(pivot_row, pivot_col) = 1.0;
  for (int r = 0; r < n_rows_ + 2; ++r) {
    if (r == pivot_row) continue;
    if (r < n_rows_ && !row_active_[r]) continue;
    const double f = tableau_(r, pivot_col);
    if (f != 0.0) {
      tableau_.row(r).head(width) -= f * prow;
      tableau_(r, pivot_col) = 0.0;
    }
  }
  is_basic_[basis_[pivot_row]] = false;
  basis_[pivot_row] = pivot_col;
  is_basic_[pivot_col] = true;
}

int SimplexSolver::choose_entering(int cost_row, int col_limit) const {
  if (bland_mode_) {
    for (int j = 0; j < col_limit; ++j)
      if (!is_basic_[j] && tableau_(cost_row, j) < -kPivotTol) return j;
    return -1;
  }
  int best = -1;
  double best_val = -kPivotTol;
  for (int j = 0; j < col_limit; ++j) {
    if (is_basic_[j]) continue;
    const double r = tableau_(cost_row, j);
    if (r < best_val) {
      best_val = r;
      best = j;
    }
  }
  return best;
}

int SimplexSolver::choose_leaving(int col) const {
  int best = -1;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_rows_; ++i) {
    if (!row_active_[i]) continue;
    const double a = tableau_(i, col);
    if (a <= kPivotTol) continue;
    const double ratio = std::max(tableau_(i, rhs_col_), 0.0) / a;
    if (best < 0) {
      best_ratio = ratio;
      best = i;
      continue;
    }
    const double tie = kPivotTol * (1.0 + std::abs(best_ratio));
    if (ratio < best_ratio - tie) {
      best_ratio = ratio;
      best = i;
    } else if (ratio <= best_ratio + tie && basis_[i] < basis_[best]) {
      best = i;  // lowest basic index on ties keeps Bland's rule valid
    }
  }
  return best;
}

bool SimplexSolver::run_phase(int cost_row, int col_limit) {
  long since_improvement = 0;
  const long stall_limit = 10L * (n_rows_ + n_cols_);
  double last_obj = -tableau_(cost_row, rhs_col_);
  while (true) {
    const int enter = choose_entering(cost_row, col_limit);
    if (enter < 0) return true;
    const int leave = choose_leaving(enter);
    if (leave < 0) return false;  // entering column unbounded
    pivot(leave, enter);
    const double obj = -tableau_(cost_row, rhs_col_);
    if (obj < last_obj - 1e-12 * (1.0 + std::abs(last_obj))) {
      last_obj = obj;
      since_improvement = 0;
    } else if (++since_improvement > stall_limit) {
      bland_mode_ = true;
    }
  }
}

void SimplexSolver::eject_artificials() {
  const int m = n_cols_;
  for (int i = 0; i < n_rows_; ++i) {
    if (!row_active_[i] || basis_[i] < m) continue;
    int best = -1;
    double best_mag = kEjectTol;
    for (int j = 0; j < m; ++j) {
      if (is_basic_[j]) continue;
      const double mag = std::abs(tableau_(i, j));
      if (mag > best_mag) {
        best_mag = mag;
        best = j;
      }
    }
    if (best >= 0) {
      pivot(i, best);
    } else {
      // The row is a linear combination of the others; drop it.
      row_active_[i] = false;
    }
  }
}

void SimplexSolver::refresh_phase2_row() {
  const int m = n_cols_;
  const int width = rhs_col_ + 1;
  const int p2 = n_rows_ + 1;
  tableau_.row(p2).setZero();
  tableau_.row(p2).head(m) = problem_.cost.transpose();
  for (int i = 0; i < n_rows_; ++i) {
    if (!row_active_[i]) continue;
    const double cb = basis_[i] < m ? problem_.cost[basis_[i]] : 0.0;
    if (cb != 0.0) tableau_.row(p2).head(width) -= cb * tableau_.row(i).head(width);
  }
}

void SimplexSolver::extract_solution() {
  const int m = n_cols_;
  std::vector<int> rows, cols;
  for (int i = 0; i < n_rows_; ++i) {
    if (!row_active_[i]) continue;
    rows.push_back(i);
    cols.push_back(basis_[i]);
  }
  const int ka = static_cast<int>(rows.size());

  // Re-solve the basis system against the original data; the tableau values
  // carry rounding from every pivot, the refined ones only from one solve.
  Eigen::VectorXd values(ka);
  for (int i = 0; i < ka; ++i) values[i] = tableau_(rows[i], rhs_col_);
  {
    Eigen::MatrixXd basis_mat(ka, ka);
    Eigen::VectorXd rhs(ka);
    for (int i = 0; i < ka; ++i) {
      rhs[i] = problem_.beq[rows[i]];
      for (int j = 0; j < ka; ++j) basis_mat(i, j) = problem_.aeq(rows[i], cols[j]);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_mat);
    const Eigen::VectorXd refined = lu.solve(rhs);
    if (refined.allFinite() &&
        (basis_mat * refined - rhs).cwiseAbs().maxCoeff() <= 1e-9 * b_scale_)
      values = refined;
  }

  solution_.gamma = Eigen::VectorXd::Zero(m);
  solution_.basis.clear();
  for (int i = 0; i < ka; ++i) {
    double val = values[i];
    if (val < 0.0) {
      if (val < -1e-8 * b_scale_)
        throw NumericalError("lp: basic variable negative beyond tolerance: " +
                             std::to_string(val));
      val = 0.0;
    }
    if (cols[i] < m) {
      solution_.gamma[cols[i]] = val;
      solution_.basis.push_back(cols[i]);
    }
  }
  std::sort(solution_.basis.begin(), solution_.basis.end());
  solution_.objective = problem_.cost.dot(solution_.gamma);
  solution_.status = LpStatus::Optimal;
}

const LPSolution& SimplexSolver::solve() {
  solved_ = true;
  if (n_art_ > 0) {
    if (!run_phase(n_rows_, n_cols_))
      throw NumericalError("lp: phase one reported an unbounded direction");
    const double infeasibility = -tableau_(n_rows_, rhs_col_);
    if (infeasibility > 1e-8 * b_scale_) {
      solution_ = LPSolution{};
      solution_.gamma = Eigen::VectorXd::Zero(n_cols_);
      solution_.status = LpStatus::Infeasible;
      return solution_;
    }
    eject_artificials();
  }
  bland_mode_ = false;
  if (!run_phase(n_rows_ + 1, n_cols_)) {
    solution_ = LPSolution{};
    solution_.gamma = Eigen::VectorXd::Zero(n_cols_);
    solution_.status = LpStatus::Unbounded;
    return solution_;
  }
  extract_solution();
  return solution_;
}

const LPSolution& SimplexSolver::resolve_with_cost(const Eigen::VectorXd& new_cost) {
  if (!solved_ || solution_.status != LpStatus::Optimal)
    throw NumericalError("lp: resolve_with_cost requires a prior optimal solve");
  if (new_cost.size() != n_cols_)
    throw DimensionMismatch("lp: resolve cost length mismatch");
  if (!new_cost.allFinite()) throw NonFiniteInput("lp: non-finite resolve cost");
  problem_.cost = new_cost;
  refresh_phase2_row();
  bland_mode_ = false;
  pivots_used_ = 0;
  if (!run_phase(n_rows_ + 1, n_cols_)) {
    solution_ = LPSolution{};
    solution_.gamma = Eigen::VectorXd::Zero(n_cols_);
    solution_.status = LpStatus::Unbounded;
    return solution_;
  }
  extract_solution();
  return solution_;
}

LPSolution solve_lp(const LPProblem& problem) {
  SimplexSolver solver(problem);
  return solver.solve();
}

}  // namespace coqr
