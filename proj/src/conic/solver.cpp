#include <Eigen/SparseCholesky>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "icoord/conic/program.hpp"
#include "icoord/conic/projections.hpp"

namespace icoord::conic {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

struct Scaling {
  Vec row;     // D
  Vec col;     // E
  double cost = 1.0;
};

Vec row_inf_norms(const SpMat& a, int rows) {
  Vec r = Vec::Zero(rows);
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it)
      r(it.row()) = std::max(r(it.row()), std::abs(it.value()));
  return r;
}

Vec col_inf_norms(const SpMat& a) {
  Vec c = Vec::Zero(a.cols());
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it)
      c(it.col()) = std::max(c(it.col()), std::abs(it.value()));
  return c;
}

void apply_diag(SpMat& a, const Vec& d_row, const Vec& d_col) {
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it)
      it.valueRef() *= d_row(it.row()) * d_col(it.col());
}

// Ruiz equilibration with cone-block-uniform row scales, so that scaled
// slacks stay inside their cones.
Scaling equilibrate(SpMat& a, const std::vector<ConeBlock>& cones, const Vec& cost,
                    int iters) {
  const int rows = static_cast<int>(a.rows());
  const int cols = static_cast<int>(a.cols());
  Scaling sc;
  sc.row = Vec::Ones(rows);
  sc.col = Vec::Ones(cols);
  for (int it = 0; it < iters; ++it) {
    Vec rn = row_inf_norms(a, rows);
    Vec cn = col_inf_norms(a);
    int at = 0;
    for (const ConeBlock& blk : cones) {
      if (blk.tag == ConeTag::Soc || blk.tag == ConeTag::Rsoc) {
        double logsum = 0.0;
        int nz = 0;
        for (int i = 0; i < blk.dim; ++i)
          if (rn(at + i) > 0) {
            logsum += std::log(rn(at + i));
            ++nz;
          }
        const double g = nz > 0 ? std::exp(logsum / nz) : 1.0;
        for (int i = 0; i < blk.dim; ++i) rn(at + i) = g;
      }
      at += blk.dim;
    }
    Vec dr = rn.unaryExpr([](double v) { return v > 1e-12 ? 1.0 / std::sqrt(v) : 1.0; });
    Vec dc = cn.unaryExpr([](double v) { return v > 1e-12 ? 1.0 / std::sqrt(v) : 1.0; });
    apply_diag(a, dr, dc);
    sc.row.array() *= dr.array();
    sc.col.array() *= dc.array();
  }
  const double cnorm = (sc.col.array() * cost.array()).abs().maxCoeff();
  sc.cost = cnorm > 1e-12 ? 1.0 / cnorm : 1.0;
  return sc;
}

struct Residuals {
  double primal = 0.0;  // max of relative l2 and per-row relative linf
  double dual = 0.0;
  double gap = 0.0;
  int worst_row = -1;
};

Residuals compute_residuals(const SpMat& a, const Vec& cost, const Vec& rhs,
                            const Vec& x, const Vec& y, const Vec& s, double& obj) {
  Residuals r;
  const Vec ax = a * x;
  const Vec rp = ax + s - rhs;
  const double rp2 = rp.norm() / (1.0 + rhs.norm());
  double rpinf = 0.0;
  for (int i = 0; i < rp.size(); ++i) {
    const double scale = 1.0 + std::abs(rhs(i)) + std::abs(ax(i)) + std::abs(s(i));
    const double v = std::abs(rp(i)) / scale;
    if (v > rpinf) {
      rpinf = v;
      r.worst_row = i;
    }
  }
  r.primal = std::max(rp2, rpinf);

  const Vec aty = a.transpose() * y;
  const Vec rd = cost + aty;
  const double rd2 = rd.norm() / (1.0 + cost.norm());
  double rdinf = 0.0;
  for (int j = 0; j < rd.size(); ++j) {
    const double scale = 1.0 + std::abs(cost(j)) + std::abs(aty(j));
    rdinf = std::max(rdinf, std::abs(rd(j)) / scale);
  }
  r.dual = std::max(rd2, rdinf);

  obj = cost.dot(x);
  const double by = rhs.dot(y);
  r.gap = std::abs(obj + by) / (1.0 + std::abs(obj) + std::abs(by));
  return r;
}

bool primal_infeasibility_certificate(const SpMat& a, const Vec& rhs,
                                      const std::vector<ConeBlock>& cones,
                                      const Vec& dy, double eps) {
  const double nrm = dy.lpNorm<Eigen::Infinity>();
  if (nrm < 1e-14) return false;
  Vec v = dy / nrm;
  Vec inside = v;
  project_dual_cones(cones, inside);
  if ((v - inside).lpNorm<Eigen::Infinity>() > 10 * eps) return false;
  if ((a.transpose() * v).lpNorm<Eigen::Infinity>() > eps) return false;
  return rhs.dot(v) < -eps;
}

bool dual_infeasibility_certificate(const SpMat& a, const Vec& cost,
                                    const std::vector<ConeBlock>& cones,
                                    const Vec& dx, double eps) {
  const double nrm = dx.lpNorm<Eigen::Infinity>();
  if (nrm < 1e-14) return false;
  Vec v = dx / nrm;
  if (cost.dot(v) > -eps) return false;
  // s recedes along -A v, which must stay inside the cone.
  Vec dir = -(a * v);
  Vec inside = dir;
  project_cones(cones, inside);
  return (dir - inside).lpNorm<Eigen::Infinity>() <= 10 * eps;
}

}  // namespace

std::string ConicProgram::row_tag(int row) const {
  if (block_tags.empty()) return {};
  int at = 0;
  for (size_t i = 0; i < cones.size(); ++i) {
    at += cones[i].dim;
    if (row < at) return i < block_tags.size() ? block_tags[i] : std::string{};
  }
  return {};
}

void ConicProgram::validate() const {
  if (static_cast<int>(cost.size()) != n)
    throw std::invalid_argument("conic program: cost size != n");
  if (static_cast<int>(rhs.size()) != rows)
    throw std::invalid_argument("conic program: rhs size != rows");
  int dim_sum = 0;
  for (const ConeBlock& blk : cones) {
    if (blk.dim <= 0) throw std::invalid_argument("conic program: non-positive cone dim");
    if (blk.tag == ConeTag::Rsoc && blk.dim < 2)
      throw std::invalid_argument("conic program: rotated cone needs dim >= 2");
    dim_sum += blk.dim;
  }
  if (dim_sum != rows)
    throw std::invalid_argument("conic program: cone dims do not sum to row count");
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= n)
      throw std::invalid_argument("conic program: entry out of bounds");
    if (!std::isfinite(t.value))
      throw std::invalid_argument("conic program: non-finite entry");
  }
}

Eigen::SparseMatrix<double> ConicProgram::matrix() const {
  std::vector<Eigen::Triplet<double>> ts;
  ts.reserve(entries.size());
  for (const Triplet& t : entries) ts.emplace_back(t.row, t.col, t.value);
  SpMat a(rows, n);
  a.setFromTriplets(ts.begin(), ts.end());
  return a;
}

const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::Optimal: return "optimal";
    case SolverStatus::InfeasibleLikely: return "infeasible_likely";
    case SolverStatus::MaxIters: return "max_iters";
  }
  return "unknown";
}

SolverResult solve(const ConicProgram& prog, const SolverSettings& settings) {
  const auto t_start = std::chrono::steady_clock::now();
  prog.validate();

  SolverResult res;
  const int n = prog.n;
  const int m = prog.rows;
  const Vec cost = Eigen::Map<const Vec>(prog.cost.data(), n);
  const Vec rhs = Eigen::Map<const Vec>(prog.rhs.data(), m);

  auto finish = [&](SolverStatus st) {
    res.status = st;
    res.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
  };

  if (m == 0) {
    res.x = Vec::Zero(n);
    res.y = Vec(0);
    res.s = Vec(0);
    res.objective = 0.0;
    const bool bounded = n == 0 || cost.lpNorm<Eigen::Infinity>() == 0.0;
    return finish(bounded ? SolverStatus::Optimal : SolverStatus::InfeasibleLikely);
  }

  const SpMat a_orig = prog.matrix();

  if (n == 0) {
    Vec s = rhs;
    project_cones(prog.cones, s);
    res.x = Vec(0);
    res.y = Vec::Zero(m);
    res.s = s;
    res.objective = 0.0;
    res.res_primal = (s - rhs).norm() / (1.0 + rhs.norm());
    const bool ok = res.res_primal <= settings.eps_primal;
    return finish(ok ? SolverStatus::Optimal : SolverStatus::InfeasibleLikely);
  }

  // Scale.
  SpMat a = a_orig;
  Scaling sc;
  if (settings.scaling) {
    sc = equilibrate(a, prog.cones, cost, settings.ruiz_iters);
  } else {
    sc.row = Vec::Ones(m);
    sc.col = Vec::Ones(n);
  }
  const Vec c_hat = sc.cost * (sc.col.array() * cost.array()).matrix();
  const Vec b_hat = (sc.row.array() * rhs.array()).matrix();

  // Per-row dual step, stiffer on equality rows.
  double rho_scalar = settings.rho;
  Vec eq_mask = Vec::Ones(m);
  {
    int at = 0;
    for (const ConeBlock& blk : prog.cones) {
      if (blk.tag == ConeTag::Free)
        eq_mask.segment(at, blk.dim).setConstant(settings.rho_eq_scale);
      at += blk.dim;
    }
  }
  Vec rho = rho_scalar * eq_mask;
  Vec rho_inv = rho.cwiseInverse();

  // KKT matrix [[sigma I, A'], [A, -diag(1/rho)]]; the sparsity pattern is
  // fixed, so rho updates only refactorize numerically.
  const int dim = n + m;
  SpMat kkt(dim, dim);
  auto fill_kkt = [&]() {
    std::vector<Eigen::Triplet<double>> ts;
    ts.reserve(2 * a.nonZeros() + dim);
    for (int j = 0; j < n; ++j) ts.emplace_back(j, j, settings.sigma);
    for (int k = 0; k < a.outerSize(); ++k)
      for (SpMat::InnerIterator it(a, k); it; ++it) {
        ts.emplace_back(n + it.row(), it.col(), it.value());
        ts.emplace_back(it.col(), n + it.row(), it.value());
      }
    for (int i = 0; i < m; ++i) ts.emplace_back(n + i, n + i, -rho_inv(i));
    kkt.setFromTriplets(ts.begin(), ts.end());
  };
  fill_kkt();
  Eigen::SimplicialLDLT<SpMat> ldlt;
  ldlt.analyzePattern(kkt);
  ldlt.factorize(kkt);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("conic solve: KKT factorization failed");

  Vec x = Vec::Zero(n);
  Vec z = Vec::Zero(m);
  Vec y = Vec::Zero(m);
  Vec s_hat = Vec::Zero(m);
  Vec kkt_rhs(dim), kkt_sol(dim), z_tilde(m), w(m), u(m);
  Vec y_prev_check = y;
  Vec x_prev_check = x;
  int infeasible_hits = 0;
  const double alpha = settings.relaxation;

  for (int iter = 1; iter <= settings.max_iters; ++iter) {
    kkt_rhs.head(n) = settings.sigma * x - c_hat;
    kkt_rhs.tail(m) = z - rho_inv.cwiseProduct(y);
    kkt_sol = ldlt.solve(kkt_rhs);
    z_tilde = z + rho_inv.cwiseProduct(kkt_sol.tail(m) - y);

    x = alpha * kkt_sol.head(n) + (1.0 - alpha) * x;
    w = alpha * z_tilde + (1.0 - alpha) * z + rho_inv.cwiseProduct(y);
    u = b_hat - w;
    project_cones(prog.cones, u);  // u becomes the scaled slack
    s_hat = u;
    z = b_hat - s_hat;
    y = rho.cwiseProduct(w - z);

    const bool last = iter == settings.max_iters;
    if (iter % settings.check_interval == 0 || last) {
      res.x = sc.col.cwiseProduct(x);
      res.y = sc.row.cwiseProduct(y) / sc.cost;
      res.s = s_hat.cwiseQuotient(sc.row);
      double obj = 0.0;
      const Residuals rr =
          compute_residuals(a_orig, cost, rhs, res.x, res.y, res.s, obj);
      res.objective = obj;
      res.res_primal = rr.primal;
      res.res_dual = rr.dual;
      res.res_gap = rr.gap;
      res.worst_row = rr.worst_row;
      res.iterations = iter;
      if (settings.verbose)
        std::printf("iter %7d  pres %9.2e  dres %9.2e  gap %9.2e\n", iter, rr.primal,
                    rr.dual, rr.gap);
      if (rr.primal <= settings.eps_primal && rr.dual <= settings.eps_dual &&
          rr.gap <= settings.eps_gap) {
        res.worst_row = -1;
        return finish(SolverStatus::Optimal);
      }

      const Vec dy = sc.row.cwiseProduct(y - y_prev_check) / sc.cost;
      const Vec dx = sc.col.cwiseProduct(x - x_prev_check);
      const bool pinf = primal_infeasibility_certificate(a_orig, rhs, prog.cones, dy,
                                                         settings.eps_infeasible);
      const bool dinf = dual_infeasibility_certificate(a_orig, cost, prog.cones, dx,
                                                       settings.eps_infeasible);
      infeasible_hits = (pinf || dinf) ? infeasible_hits + 1 : 0;
      if (infeasible_hits >= 2) return finish(SolverStatus::InfeasibleLikely);
      y_prev_check = y;
      x_prev_check = x;

      if (settings.adaptive_rho && iter % settings.adaptive_rho_interval == 0 && !last) {
        const double ratio = std::sqrt(std::max(rr.primal, 1e-16) /
                                       std::max(rr.dual, 1e-16));
        const double proposed =
            std::clamp(rho_scalar * ratio, 1e-6, 1e6);
        const double change = proposed / rho_scalar;
        if (change > settings.adaptive_rho_tolerance ||
            change < 1.0 / settings.adaptive_rho_tolerance) {
          rho_scalar = proposed;
          rho = rho_scalar * eq_mask;
          rho_inv = rho.cwiseInverse();
          fill_kkt();
          ldlt.factorize(kkt);
          if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("conic solve: KKT refactorization failed");
          if (settings.verbose) std::printf("  rho -> %.3e\n", rho_scalar);
        }
      }
    }
  }
  return finish(SolverStatus::MaxIters);
}

}  // namespace icoord::conic
