#include "icoord/geometry.hpp"

#include <cmath>

namespace icoord {

namespace {

struct Vec2 {
  double x, y;
};

Vec2 heading_of(Approach a) {
  switch (a) {
    case Approach::North: return {0.0, -1.0};
    case Approach::South: return {0.0, 1.0};
    case Approach::East: return {-1.0, 0.0};
    case Approach::West: return {1.0, 0.0};
  }
  throw std::invalid_argument("unknown approach");
}

Approach branch_toward(Vec2 h) {
  if (h.y < -0.5) return Approach::South;
  if (h.y > 0.5) return Approach::North;
  if (h.x > 0.5) return Approach::East;
  return Approach::West;
}

Vec2 rot_left(Vec2 v) { return {-v.y, v.x}; }
Vec2 rot_right(Vec2 v) { return {v.y, -v.x}; }

}  // namespace

double mz_path_length(Decision d, const IntersectionGeometry& g) {
  if (g.mz_side <= 0) throw std::invalid_argument("mz_path_length: S must be positive");
  switch (d) {
    case Decision::Straight: return g.mz_side;
    case Decision::Left: return M_PI * g.mz_side / 8.0;
    case Decision::Right: return 3.0 * M_PI * g.mz_side / 8.0;
  }
  throw std::invalid_argument("unknown decision");
}

double cornering_speed_limit(double wheel_force_max, double mass, double radius) {
  const double ax_max = kGravity;
  const double ay_max = kGravity;
  const double margin = 1.0 - (wheel_force_max / mass) / ax_max;
  if (margin <= 0.0)
    throw std::domain_error("cornering limit: wheel force saturates the acceleration diamond");
  return std::sqrt(margin * ay_max * radius);
}

std::pair<double, double> cornering_speed_limits(const VehicleParams& p,
                                                 const IntersectionGeometry& g) {
  const double fw = p.wheel_force_max();
  return {cornering_speed_limit(fw, p.mass, g.r_left()),
          cornering_speed_limit(fw, p.mass, g.r_right())};
}

SpeedLimitProfile make_speed_limit_profile(const VehicleParams& p,
                                           const IntersectionGeometry& g) {
  auto [vl, vr] = cornering_speed_limits(p, g);
  return SpeedLimitProfile{p.v_min, p.v_max_f, vl, vr};
}

double SpeedLimitProfile::at(const Route& route, const IntersectionGeometry& g,
                             double s) const {
  if (s < -1e-9 || s > route.horizon + 1e-9)
    throw std::out_of_range("speed limit query outside the route horizon");
  const double l = g.cz_length;
  if (s >= l && s <= l + route.mz_length) return cornering_limit(route.decision);
  return v_max_f;
}

Approach outbound_branch(Approach a, Decision d) {
  Vec2 h = heading_of(a);
  if (d == Decision::Left) h = rot_left(h);
  if (d == Decision::Right) h = rot_right(h);
  return branch_toward(h);
}

PathPoint route_point(const Route& route, const IntersectionGeometry& g, double s) {
  if (s < -1e-9 || s > route.horizon + 1e-9)
    throw std::out_of_range("route point outside the horizon");
  s = std::min(std::max(s, 0.0), route.horizon);

  const double half = g.mz_side / 2.0;
  const Vec2 h = heading_of(route.approach);
  const Vec2 left = rot_left(h);
  // Lane centerlines sit a quarter side to the left of the road axis.
  const Vec2 entry = {-h.x * half + left.x * g.mz_side / 4.0,
                      -h.y * half + left.y * g.mz_side / 4.0};

  const double l = g.cz_length;
  if (s <= l) {
    const double back = l - s;
    return {entry.x - h.x * back, entry.y - h.y * back};
  }

  if (route.decision == Decision::Straight) {
    const double u = std::min(s - l, route.mz_length);
    const Vec2 inside = {entry.x + h.x * u, entry.y + h.y * u};
    if (s <= l + route.mz_length) return {inside.x, inside.y};
    const double past = s - l - route.mz_length;
    return {inside.x + h.x * past, inside.y + h.y * past};
  }

  const bool is_left = route.decision == Decision::Left;
  const double radius = is_left ? g.r_left() : g.r_right();
  const Vec2 to_center = is_left ? left : rot_right(h);
  const Vec2 center = {entry.x + to_center.x * radius, entry.y + to_center.y * radius};
  const double angle0 = std::atan2(entry.y - center.y, entry.x - center.x);
  const double sweep = std::min(s - l, route.mz_length) / radius;
  const double angle = is_left ? angle0 + sweep : angle0 - sweep;
  const PathPoint on_arc{center.x + radius * std::cos(angle),
                         center.y + radius * std::sin(angle)};
  if (s <= l + route.mz_length) return on_arc;

  const Vec2 h_out = is_left ? rot_left(h) : rot_right(h);
  const double past = s - l - route.mz_length;
  return {on_arc.x + h_out.x * past, on_arc.y + h_out.y * past};
}

}  // namespace icoord
