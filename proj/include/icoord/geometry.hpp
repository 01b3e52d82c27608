#pragma once

#include <utility>

#include "icoord/params.hpp"

namespace icoord {

/// Branch a vehicle arrives from (one lane per branch, left-hand traffic).
enum class Approach { North, East, South, West };

enum class Decision : int { Left = -1, Straight = 0, Right = +1 };

/// Four-branch unsignalized intersection. The merging zone is the central
/// S x S square; the control zone extends L upstream and downstream of it.
struct IntersectionGeometry {
  double cz_length = 150.0;    // L, m
  double mz_side = 10.0;       // S, m
  double comm_radius = 300.0;  // communication range, m; not used by the optimizer

  double r_left() const { return mz_side / 4.0; }
  double r_right() const { return 3.0 * mz_side / 4.0; }

  void validate() const {
    if (!(mz_side > 0 && cz_length > mz_side && comm_radius > cz_length))
      throw std::invalid_argument("geometry: need comm_radius > L > S > 0");
  }
};

/// Driving distance inside the MZ: S straight, pi*S/8 left, 3*pi*S/8 right.
double mz_path_length(Decision d, const IntersectionGeometry& g);

/// One vehicle's path through the intersection, parameterized by arc length
/// s in [0, 2L + delta(d)] with s = 0 at the CZ entry.
struct Route {
  Approach approach;
  Decision decision;
  double mz_length;  // delta(d), m
  double horizon;    // 2L + delta(d), m

  Route(Approach a, Decision d, const IntersectionGeometry& g)
      : approach(a), decision(d), mz_length(mz_path_length(d, g)),
        horizon(2.0 * g.cz_length + mz_length) {}
};

/// Cornering speed limit from the acceleration-diamond bound with the
/// longitudinal axis saturated at +-wheel_force_max/mass.
double cornering_speed_limit(double wheel_force_max, double mass, double radius);

/// (v_max_left, v_max_right) for the given fleet and intersection.
std::pair<double, double> cornering_speed_limits(const VehicleParams& p,
                                                 const IntersectionGeometry& g);

/// Piecewise-constant speed limit over s: v_max_f outside the MZ, the
/// decision's cornering limit on the closed interval [L, L + delta].
struct SpeedLimitProfile {
  double v_min = 0.0;
  double v_max_f = 0.0;
  double v_max_l = 0.0;
  double v_max_r = 0.0;

  double cornering_limit(Decision d) const {
    switch (d) {
      case Decision::Left: return v_max_l;
      case Decision::Right: return v_max_r;
      default: return v_max_f;
    }
  }
  double at(const Route& route, const IntersectionGeometry& g, double s) const;
};

SpeedLimitProfile make_speed_limit_profile(const VehicleParams& p,
                                           const IntersectionGeometry& g);

/// Branch a vehicle leaves toward, given where it came from and its turn.
Approach outbound_branch(Approach a, Decision d);

/// Replay-only planar mapping of a route (approach axis plus quarter-circle
/// arcs); the optimizer itself only ever sees arc lengths.
struct PathPoint {
  double x = 0.0;  // m, east
  double y = 0.0;  // m, north
};

PathPoint route_point(const Route& route, const IntersectionGeometry& g, double s);

}  // namespace icoord
