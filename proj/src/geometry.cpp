#include "segman/geometry.hpp"

namespace segman {

double point_rect_distance(const Vec2& p, const Rect& r) {
  double dx = std::max(r.lo.x - p.x, p.x - r.hi.x);
  double dy = std::max(r.lo.y - p.y, p.y - r.hi.y);
  if (dx > 0 || dy > 0) {
    return std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
  }
  return std::max(dx, dy);  // negative inside
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  double len2 = ab.squared_norm();
  if (len2 <= 0) return distance(p, a);
  double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

namespace {

Vec2 point_rect_grad(const Vec2& p, const Rect& r) {
  double dx = std::max(r.lo.x - p.x, p.x - r.hi.x);
  double dy = std::max(r.lo.y - p.y, p.y - r.hi.y);
  if (dx > 0 || dy > 0) {
    double gx = p.x > r.hi.x ? p.x - r.hi.x : (p.x < r.lo.x ? p.x - r.lo.x : 0.0);
    double gy = p.y > r.hi.y ? p.y - r.hi.y : (p.y < r.lo.y ? p.y - r.lo.y : 0.0);
    double n = std::hypot(gx, gy);
    if (n <= 0) return {0, 0};
    return {gx / n, gy / n};
  }
  // Inside: distance changes along the axis with the smallest penetration.
  if (dx > dy) {
    return {p.x >= r.center().x ? 1.0 : -1.0, 0.0};
  }
  return {0.0, p.y >= r.center().y ? 1.0 : -1.0};
}

double rect_rect_sd(const Shape& a, const Shape& b) {
  double gx = std::max((a.center.x - a.half.x) - (b.center.x + b.half.x),
                       (b.center.x - b.half.x) - (a.center.x + a.half.x));
  double gy = std::max((a.center.y - a.half.y) - (b.center.y + b.half.y),
                       (b.center.y - b.half.y) - (a.center.y + a.half.y));
  if (gx > 0 || gy > 0) {
    return std::hypot(std::max(gx, 0.0), std::max(gy, 0.0));
  }
  return std::max(gx, gy);
}

Vec2 rect_rect_grad(const Shape& a, const Shape& b) {
  double gx = std::max((a.center.x - a.half.x) - (b.center.x + b.half.x),
                       (b.center.x - b.half.x) - (a.center.x + a.half.x));
  double gy = std::max((a.center.y - a.half.y) - (b.center.y + b.half.y),
                       (b.center.y - b.half.y) - (a.center.y + a.half.y));
  double sx = a.center.x >= b.center.x ? 1.0 : -1.0;
  double sy = a.center.y >= b.center.y ? 1.0 : -1.0;
  if (gx > 0 || gy > 0) {
    double wx = std::max(gx, 0.0);
    double wy = std::max(gy, 0.0);
    double n = std::hypot(wx, wy);
    if (n <= 0) return {0, 0};
    return {sx * wx / n, sy * wy / n};
  }
  if (gx > gy) return {sx, 0.0};
  return {0.0, sy};
}

// Minkowski-inflate the rectangle by the disc radius is not exact at corners;
// use exact point-to-rect distance minus radius instead.
double disc_rect_sd(const Shape& disc, const Shape& rect) {
  Rect r = Rect::from_center(rect.center, rect.half.x, rect.half.y);
  return point_rect_distance(disc.center, r) - disc.radius;
}

}  // namespace

double signed_distance(const Shape& a, const Shape& b) {
  using K = Shape::Kind;
  if (a.kind == K::Disc && b.kind == K::Disc) {
    return distance(a.center, b.center) - a.radius - b.radius;
  }
  if (a.kind == K::Disc && b.kind == K::Rect) return disc_rect_sd(a, b);
  if (a.kind == K::Rect && b.kind == K::Disc) return disc_rect_sd(b, a);
  return rect_rect_sd(a, b);
}

Vec2 signed_distance_grad(const Shape& a, const Shape& b) {
  using K = Shape::Kind;
  if (a.kind == K::Disc && b.kind == K::Disc) {
    Vec2 d = a.center - b.center;
    double n = d.norm();
    if (n <= 0) return {0, 0};
    return d / n;
  }
  if (a.kind == K::Disc && b.kind == K::Rect) {
    return point_rect_grad(a.center, Rect::from_center(b.center, b.half.x, b.half.y));
  }
  if (a.kind == K::Rect && b.kind == K::Disc) {
    Vec2 g = point_rect_grad(b.center, Rect::from_center(a.center, a.half.x, a.half.y));
    return g * -1.0;
  }
  return rect_rect_grad(a, b);
}

double segment_rect_distance(const Vec2& a, const Vec2& b, const Rect& r) {
  // Quick accept: either endpoint inside, or the segment crosses the rect.
  if (r.contains(a) || r.contains(b)) return 0.0;
  // Clip test against the four rect edges via slab intersection.
  Vec2 d = b - a;
  double t0 = 0.0, t1 = 1.0;
  bool hit = true;
  for (int axis = 0; axis < 2 && hit; ++axis) {
    double p = axis == 0 ? a.x : a.y;
    double dd = axis == 0 ? d.x : d.y;
    double lo = axis == 0 ? r.lo.x : r.lo.y;
    double hi = axis == 0 ? r.hi.x : r.hi.y;
    if (std::abs(dd) < 1e-15) {
      if (p < lo || p > hi) hit = false;
    } else {
      double ta = (lo - p) / dd;
      double tb = (hi - p) / dd;
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 > t1) hit = false;
    }
  }
  if (hit) return 0.0;
  double best = std::min(point_rect_distance(a, r), point_rect_distance(b, r));
  const Vec2 corners[4] = {r.lo, {r.hi.x, r.lo.y}, r.hi, {r.lo.x, r.hi.y}};
  for (const auto& c : corners) {
    best = std::min(best, point_segment_distance(c, a, b));
  }
  return std::max(best, 0.0);
}

}  // namespace segman
