#pragma once

#include <Eigen/SparseCore>
#include <string>
#include <vector>

namespace icoord::conic {

/// Cone tags for slack blocks of the standard form
///   min c'x  s.t.  A x + s = b,  s in K.
/// Free blocks pin the slack to zero, i.e. those rows are equalities and the
/// corresponding dual variables are unrestricted.
enum class ConeTag { Free, NonNeg, Soc, Rsoc };

/// Rsoc convention, used everywhere: {(a, b, w) : 2 a b >= ||w||^2, a, b >= 0}.

struct ConeBlock {
  ConeTag tag;
  int dim;
};

struct Triplet {
  int row;
  int col;
  double value;
};

struct ConicProgram {
  int n = 0;
  std::vector<double> cost;
  int rows = 0;
  std::vector<Triplet> entries;
  std::vector<double> rhs;
  std::vector<ConeBlock> cones;
  std::vector<std::string> var_names;   // optional, size n when present
  std::vector<std::string> block_tags;  // optional, size cones.size() when present

  int add_variable(double cost_coeff = 0.0, std::string name = {}) {
    cost.push_back(cost_coeff);
    if (!name.empty() || !var_names.empty()) {
      var_names.resize(static_cast<size_t>(n), "");
      var_names.push_back(std::move(name));
    }
    return n++;
  }

  /// Appends a cone block of `dim` zero rows; returns the first row index.
  int add_block(ConeTag tag, int dim, std::string tag_name = {}) {
    const int first = rows;
    cones.push_back({tag, dim});
    rhs.resize(static_cast<size_t>(rows + dim), 0.0);
    block_tags.resize(cones.size() - 1, "");
    block_tags.push_back(std::move(tag_name));
    rows += dim;
    return first;
  }

  void add_entry(int row, int col, double value) {
    if (value != 0.0) entries.push_back({row, col, value});
  }

  void set_rhs(int row, double value) { rhs[static_cast<size_t>(row)] = value; }

  /// Tag of the block containing `row` (empty when untagged).
  std::string row_tag(int row) const;

  void validate() const;

  Eigen::SparseMatrix<double> matrix() const;
};

enum class SolverStatus { Optimal, InfeasibleLikely, MaxIters };

const char* to_string(SolverStatus s);

struct SolverSettings {
  int max_iters = 200000;
  double eps_primal = 1e-6;
  double eps_dual = 1e-6;
  double eps_gap = 1e-6;
  double eps_infeasible = 1e-7;
  bool scaling = true;
  int ruiz_iters = 10;
  double relaxation = 1.6;  // over-relaxation, in (0, 2)
  double rho = 0.1;
  double rho_eq_scale = 1e3;  // stiffer dual step on equality rows
  double sigma = 1e-6;
  int check_interval = 25;
  // Rebalance rho against the primal/dual residual ratio, refactorizing the
  // KKT system when the step change is large enough to matter.
  bool adaptive_rho = true;
  int adaptive_rho_interval = 250;
  double adaptive_rho_tolerance = 5.0;
  bool verbose = false;
};

struct SolverResult {
  SolverStatus status = SolverStatus::MaxIters;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd s;
  double objective = 0.0;
  double res_primal = 0.0;
  double res_dual = 0.0;
  double res_gap = 0.0;
  int iterations = 0;
  double solve_seconds = 0.0;
  /// Row index with the largest relative primal residual; -1 when clean.
  int worst_row = -1;
};

SolverResult solve(const ConicProgram& prog, const SolverSettings& settings = {});

}  // namespace icoord::conic
