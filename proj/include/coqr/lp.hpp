#ifndef COQR_LP_HPP
#define COQR_LP_HPP

#include <Eigen/Dense>
#include <vector>

#include "coqr/errors.hpp"

namespace coqr {

// Equality-constrained linear program in standard form:
//   minimize cost . gamma   subject to  aeq * gamma = beq,  gamma >= 0.
struct LPProblem {
  Eigen::VectorXd cost;  // length m
  Eigen::MatrixXd aeq;   // k x m
  Eigen::VectorXd beq;   // length k
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LPSolution {
  Eigen::VectorXd gamma;   // length m, nonnegative when Optimal
  double objective = 0.0;  // cost . gamma
  std::vector<int> basis;  // basic column indices, ascending; |basis| = rank used
  LpStatus status = LpStatus::Infeasible;
};

// Two-phase dense primal simplex.
//
// Pivoting uses the Dantzig rule (most negative reduced cost, lowest index on
// ties) and permanently switches to Bland's rule after 10*(k+m) pivots
// without objective improvement. Ratio-test and reduced-cost comparisons use
// a 1e-9 tolerance. The total pivot budget is 50*(k+m); exceeding it throws
// IterationLimitExceeded. All tie-breaking is index-based, so identical
// input bits produce identical output bits.
//
// Phase one starts from a crash basis of signed unit columns where available
// and introduces artificial variables only for uncovered rows. Rows whose
// artificial variable cannot be pivoted out at value zero are linearly
// dependent and are dropped.
class SimplexSolver {
public:
  explicit SimplexSolver(LPProblem problem);

  // Solve from the initial crash state. Call once.
  const LPSolution& solve();

  // Re-optimize after replacing the cost vector, continuing from the current
  // optimal basis (primal feasibility is unaffected by cost changes). Only
  // valid after a solve() that returned Optimal status.
  const LPSolution& resolve_with_cost(const Eigen::VectorXd& new_cost);

  const LPSolution& solution() const { return solution_; }

private:
  using Tableau =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  void build_tableau();
  void pivot(int pivot_row, int pivot_col);
  int choose_entering(int cost_row, int col_limit) const;
  int choose_leaving(int col) const;
  bool run_phase(int cost_row, int col_limit);
  void eject_artificials();
  void refresh_phase2_row();
  void extract_solution();

  LPProblem problem_;
  int n_rows_ = 0;  // constraint rows k
  int n_cols_ = 0;  // structural columns m
  int n_art_ = 0;   // artificial columns appended after the structural block
  int rhs_col_ = 0;

  Tableau tableau_;             // (k + 2) x (m + n_art + 1); last two rows are cost rows
  std::vector<int> basis_;      // basic column per constraint row
  std::vector<bool> row_active_;
  std::vector<bool> is_basic_;
  double b_scale_ = 1.0;        // 1 + max|beq|, for feasibility tolerances
  long pivot_budget_ = 0;
  long pivots_used_ = 0;
  bool bland_mode_ = false;
  bool solved_ = false;

  LPSolution solution_;
};

// One-shot convenience wrapper around SimplexSolver.
LPSolution solve_lp(const LPProblem& problem);

}  // namespace coqr

#endif  // COQR_LP_HPP
