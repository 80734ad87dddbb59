#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace segman {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
  Vec2 normalized() const {
    double n = norm();
    return n > 0 ? Vec2{x / n, y / n} : Vec2{0, 0};
  }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Axis-aligned rectangle, lo <= hi componentwise.
struct Rect {
  Vec2 lo;
  Vec2 hi;

  Rect() = default;
  Rect(Vec2 lo_, Vec2 hi_) : lo(lo_), hi(hi_) {}
  static Rect from_center(Vec2 c, double half_x, double half_y) {
    return {{c.x - half_x, c.y - half_y}, {c.x + half_x, c.y + half_y}};
  }
  static Rect square(Vec2 c, double side) { return from_center(c, side / 2, side / 2); }

  Vec2 center() const { return {(lo.x + hi.x) / 2, (lo.y + hi.y) / 2}; }
  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
  bool contains(const Vec2& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
  bool contains(const Rect& r) const {
    return r.lo.x >= lo.x && r.hi.x <= hi.x && r.lo.y >= lo.y && r.hi.y <= hi.y;
  }
  Rect inflated(double m) const { return {{lo.x - m, lo.y - m}, {hi.x + m, hi.y + m}}; }
  Rect merged(const Rect& r) const {
    return {{std::min(lo.x, r.lo.x), std::min(lo.y, r.lo.y)},
            {std::max(hi.x, r.hi.x), std::max(hi.y, r.hi.y)}};
  }
};

// Collision primitive: disc or axis-aligned rectangle.
struct Shape {
  enum class Kind { Disc, Rect };
  Kind kind = Kind::Disc;
  Vec2 center;
  double radius = 0.0;  // disc
  Vec2 half;            // rect half extents

  static Shape disc(Vec2 c, double r) {
    Shape s;
    s.kind = Kind::Disc;
    s.center = c;
    s.radius = r;
    return s;
  }
  static Shape rect(const Rect& r) {
    Shape s;
    s.kind = Kind::Rect;
    s.center = r.center();
    s.half = {r.width() / 2, r.height() / 2};
    return s;
  }
  static Shape square(Vec2 c, double side) {
    Shape s;
    s.kind = Kind::Rect;
    s.center = c;
    s.half = {side / 2, side / 2};
    return s;
  }
  Rect aabb() const {
    if (kind == Kind::Disc) return Rect::from_center(center, radius, radius);
    return Rect::from_center(center, half.x, half.y);
  }
  Shape at(Vec2 c) const {
    Shape s = *this;
    s.center = c;
    return s;
  }
};

// Signed distance: > 0 separated, 0 touching, < 0 penetrating. Symmetric.
double signed_distance(const Shape& a, const Shape& b);

// Gradient of signed_distance(a, b) with respect to a.center.
Vec2 signed_distance_grad(const Shape& a, const Shape& b);

// Signed distance of point p to rectangle r (negative inside).
double point_rect_distance(const Vec2& p, const Rect& r);

// Minimum distance between segment [a,b] and rectangle r (0 if intersecting).
double segment_rect_distance(const Vec2& a, const Vec2& b, const Rect& r);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

}  // namespace segman
