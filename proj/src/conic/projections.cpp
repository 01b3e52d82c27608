#include "icoord/conic/projections.hpp"

#include <cmath>

namespace icoord::conic {

namespace {

void project_soc(Eigen::Ref<Eigen::VectorXd> v) {
  const int d = static_cast<int>(v.size());
  if (d == 1) {
    v(0) = std::max(v(0), 0.0);
    return;
  }
  const double t = v(0);
  const double nu = v.tail(d - 1).norm();
  if (nu <= t) return;
  if (nu <= -t) {
    v.setZero();
    return;
  }
  const double a = 0.5 * (t + nu);
  v(0) = a;
  v.tail(d - 1) *= a / nu;
}

// Orthogonal involution mapping the rotated cone onto the standard cone:
// (a, b, w) <-> ((a+b)/sqrt2, (a-b)/sqrt2, w).
void rsoc_to_soc(Eigen::Ref<Eigen::VectorXd> v) {
  const double inv_sqrt2 = M_SQRT1_2;
  const double a = v(0);
  const double b = v(1);
  v(0) = (a + b) * inv_sqrt2;
  v(1) = (a - b) * inv_sqrt2;
}

void project_rsoc(Eigen::Ref<Eigen::VectorXd> v) {
  rsoc_to_soc(v);
  project_soc(v);
  rsoc_to_soc(v);
}

}  // namespace

void project_block(ConeTag tag, Eigen::Ref<Eigen::VectorXd> v) {
  switch (tag) {
    case ConeTag::Free:
      v.setZero();  // slack of an equality row
      return;
    case ConeTag::NonNeg:
      v = v.cwiseMax(0.0);
      return;
    case ConeTag::Soc:
      project_soc(v);
      return;
    case ConeTag::Rsoc:
      project_rsoc(v);
      return;
  }
}

void project_dual_block(ConeTag tag, Eigen::Ref<Eigen::VectorXd> v) {
  if (tag == ConeTag::Free) return;  // dual of {0} is everything
  project_block(tag, v);             // the other cones are self-dual
}

void project_cones(const std::vector<ConeBlock>& cones, Eigen::Ref<Eigen::VectorXd> v) {
  int at = 0;
  for (const ConeBlock& blk : cones) {
    project_block(blk.tag, v.segment(at, blk.dim));
    at += blk.dim;
  }
}

void project_dual_cones(const std::vector<ConeBlock>& cones,
                        Eigen::Ref<Eigen::VectorXd> v) {
  int at = 0;
  for (const ConeBlock& blk : cones) {
    project_dual_block(blk.tag, v.segment(at, blk.dim));
    at += blk.dim;
  }
}

}  // namespace icoord::conic
