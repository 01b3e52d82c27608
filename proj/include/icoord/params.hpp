#pragma once

#include <cmath>
#include <stdexcept>

namespace icoord {

inline constexpr double kGravity = 9.81;  // m/s^2

/// Physical constants of the homogeneous battery-electric fleet.
struct VehicleParams {
  double mass = 1200.0;        // kg
  double wheel_radius = 0.3;   // m
  double gear_ratio = 3.5;     // transmission ratio, motor:wheel
  double rolling_coeff = 0.01;
  double drag_coeff = 0.47;    // kg/m
  double v_min = 0.1;          // m/s
  double v_max_f = 15.0;       // m/s, straight-running speed limit
  double a_min = -6.5;         // m/s^2, peak braking deceleration (< 0)
  double length = 4.0;         // m
  double torque_max = 300.0;   // N m, constant below the field-weakening knee
  double v_terminal = 10.0;    // m/s, common CZ exit speed

  double rolling_force() const { return rolling_coeff * mass * kGravity; }

  // Motor force limits on the wheels; torque limits are symmetric in the
  // operating band, so F_t in [-wheel_force_max, wheel_force_max].
  double wheel_force_max() const { return gear_ratio / wheel_radius * torque_max; }
  double wheel_force_min() const { return mass * a_min; }

  double motor_speed(double v) const { return v * gear_ratio / wheel_radius; }
  double motor_torque(double wheel_force) const {
    return wheel_force * wheel_radius / gear_ratio;
  }

  double kinetic_energy(double v) const { return 0.5 * mass * v * v; }
  double speed_from_energy(double e) const {
    return std::sqrt(std::max(0.0, 2.0 * e / mass));
  }

  void validate() const {
    if (mass <= 0 || wheel_radius <= 0 || gear_ratio <= 0)
      throw std::invalid_argument("vehicle params: non-positive drivetrain constant");
    if (a_min >= 0) throw std::invalid_argument("vehicle params: a_min must be negative");
    if (!(0 < v_min && v_min < v_max_f))
      throw std::invalid_argument("vehicle params: need 0 < v_min < v_max_f");
    if (v_terminal < v_min || v_terminal > v_max_f)
      throw std::invalid_argument("vehicle params: terminal speed outside speed band");
    if (length <= 0) throw std::invalid_argument("vehicle params: non-positive length");
  }
};

}  // namespace icoord
