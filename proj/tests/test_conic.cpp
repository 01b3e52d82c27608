#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "icoord/conic/io.hpp"
#include "icoord/conic/program.hpp"
#include "icoord/conic/projections.hpp"

using namespace icoord::conic;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// min t  s.t.  ||(3,4)|| <= t
ConicProgram norm_epigraph_toy() {
  ConicProgram p;
  const int t = p.add_variable(1.0, "t");
  const int r = p.add_block(ConeTag::Soc, 3, "epigraph");
  p.add_entry(r, t, -1.0);
  p.set_rhs(r + 1, 3.0);
  p.set_rhs(r + 2, 4.0);
  return p;
}

ConicProgram feasibility_toy() {
  // min x  s.t.  x = 1, x >= 0
  ConicProgram p;
  const int x = p.add_variable(1.0, "x");
  const int eq = p.add_block(ConeTag::Free, 1, "pin");
  p.add_entry(eq, x, -1.0);
  p.set_rhs(eq, -1.0);  // slack = -1 + x = 0
  const int nn = p.add_block(ConeTag::NonNeg, 1, "sign");
  p.add_entry(nn, x, -1.0);
  return p;
}

ConicProgram rsoc_epigraph_toy() {
  // min q  s.t.  2 q r >= F^2 with r = 1 and F = 3 fixed.
  ConicProgram p;
  const int q = p.add_variable(1.0, "q");
  const int blk = p.add_block(ConeTag::Rsoc, 3, "square");
  p.add_entry(blk, q, -1.0);
  p.set_rhs(blk + 1, 1.0);
  p.set_rhs(blk + 2, 3.0);
  return p;
}

struct RandomProgram {
  ConicProgram prog;
};

RandomProgram make_random_feasible(std::mt19937& rng) {
  std::uniform_int_distribution<int> n_dist(5, 20);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.5, 2.0);

  ConicProgram p;
  const int n = n_dist(rng);
  for (int j = 0; j < n; ++j) p.add_variable(0.0);

  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_int_distribution<int> small(1, 4);
  std::uniform_int_distribution<int> cone_dim(3, 5);
  while (p.rows < n) {
    switch (kind(rng)) {
      case 0: p.add_block(ConeTag::Free, small(rng)); break;
      case 1: p.add_block(ConeTag::NonNeg, small(rng)); break;
      case 2: p.add_block(ConeTag::Soc, cone_dim(rng)); break;
      default: p.add_block(ConeTag::Rsoc, cone_dim(rng)); break;
    }
  }
  const int m = p.rows;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (unit(rng) > 0.4) p.add_entry(i, j, unit(rng));

  // Interior primal (x0, s0) and interior dual y0 guarantee strong duality.
  VectorXd x0(n);
  for (int j = 0; j < n; ++j) x0(j) = unit(rng);

  auto interior_point = [&](bool dual) {
    VectorXd s = VectorXd::Zero(m);
    int at = 0;
    for (const ConeBlock& blk : p.cones) {
      auto seg = s.segment(at, blk.dim);
      switch (blk.tag) {
        case ConeTag::Free:
          if (dual)
            for (int i = 0; i < blk.dim; ++i) seg(i) = unit(rng);
          break;
        case ConeTag::NonNeg:
          for (int i = 0; i < blk.dim; ++i) seg(i) = pos(rng);
          break;
        case ConeTag::Soc: {
          for (int i = 1; i < blk.dim; ++i) seg(i) = unit(rng);
          seg(0) = seg.tail(blk.dim - 1).norm() + pos(rng);
          break;
        }
        case ConeTag::Rsoc: {
          for (int i = 2; i < blk.dim; ++i) seg(i) = unit(rng);
          seg(0) = pos(rng);
          seg(1) = seg.tail(blk.dim - 2).squaredNorm() / (2.0 * seg(0)) + pos(rng);
          break;
        }
      }
      at += blk.dim;
    }
    return s;
  };

  const VectorXd s0 = interior_point(false);
  const VectorXd y0 = interior_point(true);
  const auto a = p.matrix();
  const VectorXd b = a * x0 + s0;
  const VectorXd c = -(a.transpose() * y0);
  for (int i = 0; i < m; ++i) p.set_rhs(i, b(i));
  for (int j = 0; j < n; ++j) p.cost[static_cast<size_t>(j)] = c(j);
  return {std::move(p)};
}

}  // namespace

TEST_CASE("cone projections, closed forms") {
  VectorXd nn = vec({-1.0, 2.0});
  project_block(ConeTag::NonNeg, nn);
  CHECK(nn(0) == 0.0);
  CHECK(nn(1) == 2.0);

  VectorXd soc = vec({0.0, 3.0, 4.0});
  project_block(ConeTag::Soc, soc);
  CHECK(soc(0) == doctest::Approx(2.5));
  CHECK(soc(1) == doctest::Approx(1.5));
  CHECK(soc(2) == doctest::Approx(2.0));

  VectorXd interior = vec({6.0, 3.0, 4.0});
  project_block(ConeTag::Soc, interior);
  CHECK(interior(0) == 6.0);
  CHECK(interior(1) == 3.0);
  CHECK(interior(2) == 4.0);

  VectorXd deep = vec({-6.0, 3.0, 4.0});
  project_block(ConeTag::Soc, deep);
  CHECK(deep.norm() == 0.0);

  VectorXd free = vec({1.0, -2.0});
  project_block(ConeTag::Free, free);
  CHECK(free.norm() == 0.0);

  VectorXd rs = vec({1.0, 1.0, 1.0});  // 2ab = 2 >= 1: inside already
  project_block(ConeTag::Rsoc, rs);
  CHECK(rs(0) == doctest::Approx(1.0));
  CHECK(rs(1) == doctest::Approx(1.0));
  CHECK(rs(2) == doctest::Approx(1.0));
}

TEST_CASE("projection idempotence and nonexpansiveness") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unit(-3.0, 3.0);
  const ConeTag tags[] = {ConeTag::Free, ConeTag::NonNeg, ConeTag::Soc, ConeTag::Rsoc};
  for (ConeTag tag : tags) {
    for (int trial = 0; trial < 200; ++trial) {
      VectorXd p(4), q(4);
      for (int i = 0; i < 4; ++i) {
        p(i) = unit(rng);
        q(i) = unit(rng);
      }
      VectorXd pp = p, qq = q;
      project_block(tag, pp);
      project_block(tag, qq);
      VectorXd pp2 = pp;
      project_block(tag, pp2);
      CHECK((pp2 - pp).lpNorm<Eigen::Infinity>() <= 1e-14);
      CHECK((pp - qq).norm() <= (p - q).norm() + 1e-12);
    }
  }
}

TEST_CASE("rotated cone projection lands inside the cone") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(-5.0, 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    VectorXd v(5);
    for (int i = 0; i < 5; ++i) v(i) = unit(rng);
    project_block(ConeTag::Rsoc, v);
    CHECK(v(0) >= -1e-12);
    CHECK(v(1) >= -1e-12);
    CHECK(2.0 * v(0) * v(1) + 1e-9 >= v.tail(3).squaredNorm());
  }
}

TEST_CASE("norm epigraph toy solves to t* = 5") {
  const auto res = solve(norm_epigraph_toy());
  REQUIRE(res.status == SolverStatus::Optimal);
  CHECK(std::abs(res.x(0) - 5.0) < 1e-5);
  CHECK(std::abs(res.objective - 5.0) < 1e-5);
}

TEST_CASE("pinned variable toy") {
  const auto res = solve(feasibility_toy());
  REQUIRE(res.status == SolverStatus::Optimal);
  CHECK(std::abs(res.x(0) - 1.0) < 1e-6);
  CHECK(std::abs(res.objective - 1.0) < 1e-6);
}

TEST_CASE("rotated-cone epigraph gives q* = F^2/2") {
  const auto res = solve(rsoc_epigraph_toy());
  REQUIRE(res.status == SolverStatus::Optimal);
  CHECK(std::abs(res.x(0) - 4.5) < 1e-5);
}

TEST_CASE("empty program is trivially optimal") {
  ConicProgram p;
  const auto res = solve(p);
  CHECK(res.status == SolverStatus::Optimal);
  CHECK(res.objective == 0.0);
}

TEST_CASE("random feasible programs satisfy the KKT checks") {
  std::mt19937 rng(2024);
  SolverSettings settings;
  for (int trial = 0; trial < 20; ++trial) {
    const auto rp = make_random_feasible(rng);
    const auto res = solve(rp.prog, settings);
    INFO("trial ", trial, " iterations ", res.iterations);
    REQUIRE(res.status == SolverStatus::Optimal);

    const auto a = rp.prog.matrix();
    const Eigen::Map<const VectorXd> b(rp.prog.rhs.data(), rp.prog.rows);
    const Eigen::Map<const VectorXd> c(rp.prog.cost.data(), rp.prog.n);
    const double rp_norm = (a * res.x + res.s - b).norm() / (1.0 + b.norm());
    const double rd_norm = (c + a.transpose() * res.y).norm() / (1.0 + c.norm());
    const double cx = c.dot(res.x);
    const double by = b.dot(res.y);
    const double gap = std::abs(cx + by) / (1.0 + std::abs(cx) + std::abs(by));
    CHECK(rp_norm <= settings.eps_primal);
    CHECK(rd_norm <= settings.eps_dual);
    CHECK(gap <= settings.eps_gap);

    // The returned slack must live in the cone.
    VectorXd s_proj = res.s;
    project_cones(rp.prog.cones, s_proj);
    CHECK((s_proj - res.s).lpNorm<Eigen::Infinity>() <= 1e-9);
  }
}

TEST_CASE("identical inputs give identical results") {
  const auto prog = norm_epigraph_toy();
  const auto r1 = solve(prog);
  const auto r2 = solve(prog);
  CHECK(r1.iterations == r2.iterations);
  CHECK(r1.x(0) == r2.x(0));
  CHECK(r1.objective == r2.objective);
}

TEST_CASE("json round trip is bit exact and solves identically") {
  auto prog = norm_epigraph_toy();
  prog.entries.push_back({1, 0, 0.1 + 0.2});  // awkward decimal on purpose
  prog.set_rhs(1, 3.0 - (0.1 + 0.2) * 5.0);

  const std::string text = export_json(prog);
  const ConicProgram back = import_json(text);
  REQUIRE(back.n == prog.n);
  REQUIRE(back.rows == prog.rows);
  REQUIRE(back.entries.size() == prog.entries.size());
  for (size_t i = 0; i < prog.entries.size(); ++i) {
    CHECK(back.entries[i].row == prog.entries[i].row);
    CHECK(back.entries[i].col == prog.entries[i].col);
    CHECK(back.entries[i].value == prog.entries[i].value);  // exact
  }
  for (int i = 0; i < prog.rows; ++i) CHECK(back.rhs[i] == prog.rhs[i]);

  const auto r1 = solve(prog);
  const auto r2 = solve(back);
  CHECK(r1.status == SolverStatus::Optimal);
  CHECK(r1.objective == r2.objective);
  CHECK(r1.iterations == r2.iterations);
}

TEST_CASE("empty program round trips through json") {
  ConicProgram p;
  const ConicProgram back = import_json(export_json(p));
  const auto res = solve(back);
  CHECK(res.status == SolverStatus::Optimal);
  CHECK(res.objective == 0.0);
}

TEST_CASE("malformed json is rejected") {
  CHECK_THROWS_AS(import_json("{not json"), std::invalid_argument);
  CHECK_THROWS_AS(import_json(R"({"n":1,"cost":[0],"rows":1,"b":[0],"A":[],"cones":[{"tag":"bogus","dim":1}]})"),
                  std::invalid_argument);
}
