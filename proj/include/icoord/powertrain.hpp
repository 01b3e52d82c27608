#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "icoord/params.hpp"

namespace icoord {

/// Loss model behind the synthesized efficiency map:
///   P_loss(omega, T) = c0 + c1 |omega| + c2 omega^2 + c3 T^2.
struct LossCoefficients {
  double c0 = 30.0;    // W
  double c1 = 1.2;     // W s/rad
  double c2 = 0.02;    // W s^2/rad^2
  double c3 = 0.0335;  // W / (N m)^2
};

/// Static powertrain efficiency lookup on an (omega, torque) grid. Positive
/// torque discharges the battery, negative torque charges it.
struct EfficiencyMap {
  std::vector<double> omega_grid;   // rad/s, ascending, > 0
  std::vector<double> torque_grid;  // N m, ascending, excludes 0
  std::vector<double> eta;          // row-major [omega][torque], in (0, 1]
  LossCoefficients loss;

  double at(double omega, double torque) const;  // bilinear, clamped to the grid box
  double peak() const;
  uint64_t hash() const;
};

/// eta = |T w| / (|T w| + P_loss); exactly 1 at zero power transfer.
double efficiency_formula(const LossCoefficients& loss, double omega, double torque);

EfficiencyMap synthesize_efficiency_map(const VehicleParams& params,
                                        const LossCoefficients& loss,
                                        int n_omega = 64, int n_torque = 60);

/// Battery-side power implied by the map: F v / eta when driving,
/// F v eta when regenerating.
double map_battery_power(const EfficiencyMap& map, const VehicleParams& params,
                         double f_t, double v);

enum class FitVariant { Nominal, Upper, Lower };

/// Quadratic battery-power surrogates:
///   nominal: P = b1 F^2 + b2 F v
///   upper:   P = (ub1 F^2 + ub2 F + ub3) v, >= map power on every sample
///   lower:   P = (lb1 F^2 + lb2 F + lb3) v, <= map power on every sample
struct PowerFit {
  double b1 = 0.0, b2 = 0.0;
  double ub1 = 0.0, ub2 = 0.0, ub3 = 0.0;
  double lb1 = 0.0, lb2 = 0.0, lb3 = 0.0;
  double r2_nominal = 0.0, r2_upper = 0.0, r2_lower = 0.0;
  double f_lo = 0.0, f_hi = 0.0, v_lo = 0.0, v_hi = 0.0;  // sample domain
  bool fitted = false;

  /// Energy integrand coefficients (q1 F^2 + q2 F + q3, J/m) of the variant.
  void integrand(FitVariant variant, double& q1, double& q2, double& q3) const;
};

double electric_power(const PowerFit& fit, double f_t, double v, FitVariant variant);

/// Plain least squares of the nominal model; returns (b1, b2).
std::pair<double, double> fit_nominal(const EfficiencyMap& map,
                                      const VehicleParams& params, int n_f = 50,
                                      int n_v = 50);

/// Nominal unconstrained least squares plus conic-solved tangential fits on an
/// n_f x n_v sample grid spanning the full force envelope and speed band.
PowerFit fit_power_models(const EfficiencyMap& map, const VehicleParams& params,
                          int n_f = 50, int n_v = 50);

std::string map_to_json(const EfficiencyMap& map);
std::string fit_to_json(const PowerFit& fit);

}  // namespace icoord
