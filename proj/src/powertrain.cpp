#include "icoord/powertrain.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <tuple>

#include "icoord/conic/program.hpp"
#include "json.hpp"

namespace icoord {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return out;
}

double loss_power(const LossCoefficients& c, double omega, double torque) {
  return c.c0 + c.c1 * std::abs(omega) + c.c2 * omega * omega + c.c3 * torque * torque;
}

int lower_cell(const std::vector<double>& grid, double v) {
  const auto it = std::upper_bound(grid.begin(), grid.end(), v);
  int i = static_cast<int>(it - grid.begin()) - 1;
  return std::clamp(i, 0, static_cast<int>(grid.size()) - 2);
}

}  // namespace

double efficiency_formula(const LossCoefficients& loss, double omega, double torque) {
  const double transfer = std::abs(torque * omega);
  if (transfer == 0.0) return 1.0;  // zero power transfer convention
  return transfer / (transfer + loss_power(loss, omega, torque));
}

EfficiencyMap synthesize_efficiency_map(const VehicleParams& params,
                                        const LossCoefficients& loss,
                                        int n_omega, int n_torque) {
  if (n_omega < 2 || n_torque < 2)
    throw std::invalid_argument("efficiency map: degenerate grid");
  if (loss.c0 < 0 || loss.c1 < 0 || loss.c2 < 0 || loss.c3 < 0)
    throw std::invalid_argument("efficiency map: negative loss coefficient");
  if (n_torque % 2 != 0)
    throw std::invalid_argument("efficiency map: torque grid must skip zero (even count)");

  EfficiencyMap map;
  map.loss = loss;
  // Cover the whole constant-torque band (up to the ~2800 rpm knee), which
  // comfortably contains the speeds reachable inside the control zone.
  const double omega_knee = 2800.0 * 2.0 * M_PI / 60.0;
  map.omega_grid = linspace(0.1, omega_knee, n_omega);
  map.torque_grid = linspace(-params.torque_max, params.torque_max, n_torque);
  map.eta.resize(static_cast<size_t>(n_omega) * n_torque);
  for (int i = 0; i < n_omega; ++i)
    for (int j = 0; j < n_torque; ++j) {
      const double e = efficiency_formula(loss, map.omega_grid[i], map.torque_grid[j]);
      if (!(e > 0.0 && e <= 1.0))
        throw std::runtime_error("efficiency map: eta outside (0, 1]");
      map.eta[static_cast<size_t>(i) * n_torque + j] = e;
    }
  return map;
}

double EfficiencyMap::at(double omega, double torque) const {
  const int nt = static_cast<int>(torque_grid.size());
  const int i = lower_cell(omega_grid, omega);
  const int j = lower_cell(torque_grid, torque);
  const double wo = std::clamp((omega - omega_grid[i]) / (omega_grid[i + 1] - omega_grid[i]), 0.0, 1.0);
  const double wt = std::clamp((torque - torque_grid[j]) / (torque_grid[j + 1] - torque_grid[j]), 0.0, 1.0);
  const double e00 = eta[static_cast<size_t>(i) * nt + j];
  const double e01 = eta[static_cast<size_t>(i) * nt + j + 1];
  const double e10 = eta[static_cast<size_t>(i + 1) * nt + j];
  const double e11 = eta[static_cast<size_t>(i + 1) * nt + j + 1];
  return (1 - wo) * ((1 - wt) * e00 + wt * e01) + wo * ((1 - wt) * e10 + wt * e11);
}

double EfficiencyMap::peak() const {
  double pk = 0.0;
  for (double e : eta) pk = std::max(pk, e);
  return pk;
}

uint64_t EfficiencyMap::hash() const {
  uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto mix = [&h](const std::vector<double>& v) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(v.data());
    for (size_t i = 0; i < v.size() * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  mix(omega_grid);
  mix(torque_grid);
  mix(eta);
  return h;
}

double map_battery_power(const EfficiencyMap& map, const VehicleParams& params,
                         double f_t, double v) {
  if (f_t == 0.0) return 0.0;
  const double eta = map.at(params.motor_speed(v), params.motor_torque(f_t));
  return f_t >= 0.0 ? f_t * v / eta : f_t * v * eta;
}

void PowerFit::integrand(FitVariant variant, double& q1, double& q2, double& q3) const {
  switch (variant) {
    case FitVariant::Nominal:
      // P/v for the nominal model: b1 F^2 / v is not affine in the states, so
      // the nominal form never enters a transcription; this path serves
      // reporting only, at the domain's terminal speed scale.
      throw std::logic_error("nominal fit has no space-domain integrand");
    case FitVariant::Upper: q1 = ub1; q2 = ub2; q3 = ub3; return;
    case FitVariant::Lower: q1 = lb1; q2 = lb2; q3 = lb3; return;
  }
}

double electric_power(const PowerFit& fit, double f_t, double v, FitVariant variant) {
  if (!fit.fitted) throw std::logic_error("power fit not fitted yet");
  switch (variant) {
    case FitVariant::Nominal: return fit.b1 * f_t * f_t + fit.b2 * f_t * v;
    case FitVariant::Upper: return (fit.ub1 * f_t * f_t + fit.ub2 * f_t + fit.ub3) * v;
    case FitVariant::Lower: return (fit.lb1 * f_t * f_t + fit.lb2 * f_t + fit.lb3) * v;
  }
  throw std::logic_error("unknown fit variant");
}

namespace {

struct Samples {
  std::vector<double> f, v, p;  // force, speed, map battery power
};

Samples sample_map(const EfficiencyMap& map, const VehicleParams& params, int n_f,
                   int n_v) {
  Samples s;
  const double f_max = params.wheel_force_max();
  const auto f_grid = linspace(-f_max, f_max, n_f);
  const auto v_grid = linspace(params.v_min, params.v_max_f, n_v);
  s.f.reserve(static_cast<size_t>(n_f) * n_v);
  for (double f : f_grid)
    for (double v : v_grid) {
      s.f.push_back(f);
      s.v.push_back(v);
      s.p.push_back(map_battery_power(map, params, f, v));
    }
  return s;
}

double r_squared(const Samples& s, const std::vector<double>& fitted) {
  double mean = 0.0;
  for (double p : s.p) mean += p;
  mean /= static_cast<double>(s.p.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t k = 0; k < s.p.size(); ++k) {
    ss_res += (s.p[k] - fitted[k]) * (s.p[k] - fitted[k]);
    ss_tot += (s.p[k] - mean) * (s.p[k] - mean);
  }
  return 1.0 - ss_res / ss_tot;
}

// Least squares of v (q1 F^2 + q2 F + q3) against p, with the residual sign
// constrained (+1: fit from above, -1: from below). Features are normalized
// to unit scale before entering the conic program.
void tangential_fit(const Samples& s, int sign, double& q1, double& q2, double& q3) {
  const int nk = static_cast<int>(s.p.size());
  double f_scale = 0.0, v_scale = 0.0, p_scale = 0.0;
  for (int k = 0; k < nk; ++k) {
    f_scale = std::max(f_scale, std::abs(s.f[k]));
    v_scale = std::max(v_scale, std::abs(s.v[k]));
    p_scale = std::max(p_scale, std::abs(s.p[k]));
  }
  if (p_scale == 0.0) p_scale = 1.0;

  conic::ConicProgram prog;
  const int vu = prog.add_variable(1.0, "residual_norm");
  const int v1 = prog.add_variable(0.0, "q1");
  const int v2 = prog.add_variable(0.0, "q2");
  const int v3 = prog.add_variable(0.0, "q3");

  const double sgn = static_cast<double>(sign);
  const int soc = prog.add_block(conic::ConeTag::Soc, nk + 1, "lsq");
  prog.add_entry(soc, vu, -1.0);
  const int nn = prog.add_block(conic::ConeTag::NonNeg, nk, "side");
  for (int k = 0; k < nk; ++k) {
    const double fn = s.f[k] / f_scale;
    const double vn = s.v[k] / v_scale;
    const double pn = s.p[k] / p_scale;
    // slack = model_k - p_k in normalized units; same rows feed both blocks.
    prog.add_entry(soc + 1 + k, v1, -vn * fn * fn);
    prog.add_entry(soc + 1 + k, v2, -vn * fn);
    prog.add_entry(soc + 1 + k, v3, -vn);
    prog.set_rhs(soc + 1 + k, -pn);
    prog.add_entry(nn + k, v1, -sgn * vn * fn * fn);
    prog.add_entry(nn + k, v2, -sgn * vn * fn);
    prog.add_entry(nn + k, v3, -sgn * vn);
    prog.set_rhs(nn + k, -sgn * pn);
  }

  conic::SolverSettings settings;
  settings.eps_primal = settings.eps_dual = settings.eps_gap = 1e-9;
  const auto res = conic::solve(prog, settings);
  if (res.status != conic::SolverStatus::Optimal)
    throw std::runtime_error("power fit: tangential regression did not converge");
  q1 = res.x(v1) * p_scale / (v_scale * f_scale * f_scale);
  q2 = res.x(v2) * p_scale / (v_scale * f_scale);
  q3 = res.x(v3) * p_scale / v_scale;

  // Nudge the offset so the side constraint holds exactly on every sample.
  double worst = 0.0;
  for (int k = 0; k < nk; ++k) {
    const double model = s.v[k] * (q1 * s.f[k] * s.f[k] + q2 * s.f[k] + q3);
    worst = std::max(worst, sign * (s.p[k] - model) / s.v[k]);
  }
  q3 += sign * worst;
}

}  // namespace

std::pair<double, double> fit_nominal(const EfficiencyMap& map,
                                      const VehicleParams& params, int n_f, int n_v) {
  const Samples s = sample_map(map, params, n_f, n_v);
  Eigen::MatrixXd m(s.p.size(), 2);
  Eigen::VectorXd rhs(s.p.size());
  for (size_t k = 0; k < s.p.size(); ++k) {
    m(static_cast<int>(k), 0) = s.f[k] * s.f[k];
    m(static_cast<int>(k), 1) = s.f[k] * s.v[k];
    rhs(static_cast<int>(k)) = s.p[k];
  }
  const Eigen::Vector2d sol = m.colPivHouseholderQr().solve(rhs);
  return {sol(0), sol(1)};
}

PowerFit fit_power_models(const EfficiencyMap& map, const VehicleParams& params,
                          int n_f, int n_v) {
  const Samples s = sample_map(map, params, n_f, n_v);
  PowerFit fit;
  fit.f_lo = -params.wheel_force_max();
  fit.f_hi = params.wheel_force_max();
  fit.v_lo = params.v_min;
  fit.v_hi = params.v_max_f;

  std::tie(fit.b1, fit.b2) = fit_nominal(map, params, n_f, n_v);

  tangential_fit(s, +1, fit.ub1, fit.ub2, fit.ub3);
  tangential_fit(s, -1, fit.lb1, fit.lb2, fit.lb3);
  if (fit.ub1 <= 0.0 || fit.lb1 <= 0.0)
    throw std::runtime_error("power fit: non-convex quadratic fit, map rejected");
  fit.fitted = true;

  std::vector<double> fitted(s.p.size());
  for (size_t k = 0; k < s.p.size(); ++k)
    fitted[k] = electric_power(fit, s.f[k], s.v[k], FitVariant::Nominal);
  fit.r2_nominal = r_squared(s, fitted);
  for (size_t k = 0; k < s.p.size(); ++k)
    fitted[k] = electric_power(fit, s.f[k], s.v[k], FitVariant::Upper);
  fit.r2_upper = r_squared(s, fitted);
  for (size_t k = 0; k < s.p.size(); ++k)
    fitted[k] = electric_power(fit, s.f[k], s.v[k], FitVariant::Lower);
  fit.r2_lower = r_squared(s, fitted);
  return fit;
}

std::string map_to_json(const EfficiencyMap& map) {
  nlohmann::json j;
  j["omega_grid"] = map.omega_grid;
  j["torque_grid"] = map.torque_grid;
  j["eta"] = map.eta;
  j["loss"] = {{"c0", map.loss.c0}, {"c1", map.loss.c1}, {"c2", map.loss.c2}, {"c3", map.loss.c3}};
  j["hash"] = map.hash();
  return j.dump();
}

std::string fit_to_json(const PowerFit& fit) {
  nlohmann::json j;
  j["nominal"] = {{"b1", fit.b1}, {"b2", fit.b2}, {"r2", fit.r2_nominal}};
  j["upper"] = {{"b1", fit.ub1}, {"b2", fit.ub2}, {"b3", fit.ub3}, {"r2", fit.r2_upper}};
  j["lower"] = {{"b1", fit.lb1}, {"b2", fit.lb2}, {"b3", fit.lb3}, {"r2", fit.r2_lower}};
  j["domain"] = {{"f_lo", fit.f_lo}, {"f_hi", fit.f_hi}, {"v_lo", fit.v_lo}, {"v_hi", fit.v_hi}};
  return j.dump();
}

}  // namespace icoord
