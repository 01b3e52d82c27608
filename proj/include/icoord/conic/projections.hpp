#pragma once

#include <Eigen/Core>

#include "icoord/conic/program.hpp"

namespace icoord::conic {

/// Euclidean projection onto the cone, in place. `v` holds one block.
void project_block(ConeTag tag, Eigen::Ref<Eigen::VectorXd> v);

/// Projection onto the dual cone K*. Identical to project_block except for
/// Free blocks, whose dual is the whole space.
void project_dual_block(ConeTag tag, Eigen::Ref<Eigen::VectorXd> v);

/// Applies project_block to every block of the partition, in place.
void project_cones(const std::vector<ConeBlock>& cones, Eigen::Ref<Eigen::VectorXd> v);

void project_dual_cones(const std::vector<ConeBlock>& cones, Eigen::Ref<Eigen::VectorXd> v);

}  // namespace icoord::conic
