#include "segman/svg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace segman {

namespace {

constexpr double kScale = 50.0;

struct Mapper {
  const Scene& scene;
  // World -> pixel, y axis flipped.
  double px(double x) const { return (x - scene.bounds.lo.x) * kScale; }
  double py(double y) const { return (scene.bounds.hi.y - y) * kScale; }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void emit_rect(std::ostringstream& out, const Mapper& m, const Rect& r, const std::string& style) {
  out << "<rect x=\"" << fmt(m.px(r.lo.x)) << "\" y=\"" << fmt(m.py(r.hi.y)) << "\" width=\""
      << fmt(r.width() * kScale) << "\" height=\"" << fmt(r.height() * kScale) << "\" " << style
      << "/>\n";
}

void emit_polyline(std::ostringstream& out, const Mapper& m, const std::vector<Vec2>& pts,
                   const std::string& color) {
  if (pts.size() < 2) return;
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"3\" points=\"";
  for (size_t i = 0; i < pts.size(); ++i) {
    if (i) out << ' ';
    out << fmt(m.px(pts[i].x)) << ',' << fmt(m.py(pts[i].y));
  }
  out << "\"/>\n";
  // Arrowheads every 10 waypoints.
  for (size_t i = 10; i < pts.size(); i += 10) {
    Vec2 d = pts[i] - pts[i - 1];
    double n = d.norm();
    if (n < 1e-9) continue;
    Vec2 u = d / n;
    Vec2 perp{-u.y, u.x};
    Vec2 tip = pts[i];
    Vec2 b1 = tip - u * 0.18 + perp * 0.09;
    Vec2 b2 = tip - u * 0.18 - perp * 0.09;
    out << "<polygon fill=\"" << color << "\" points=\"" << fmt(m.px(tip.x)) << ','
        << fmt(m.py(tip.y)) << ' ' << fmt(m.px(b1.x)) << ',' << fmt(m.py(b1.y)) << ' '
        << fmt(m.px(b2.x)) << ',' << fmt(m.py(b2.y)) << "\"/>\n";
  }
}

}  // namespace

std::string render_svg(const Scene& scene, const Plan& plan) {
  Mapper m{scene};
  std::ostringstream out;
  double w = scene.bounds.width() * kScale;
  double h = scene.bounds.height() * kScale;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
      << "\" viewBox=\"0 0 " << fmt(w) << ' ' << fmt(h) << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
      << "\" fill=\"white\" stroke=\"black\" stroke-width=\"2\"/>\n";
  for (const auto& wall : scene.walls) {
    emit_rect(out, m, wall, "fill=\"#444444\"");
  }
  // Goal marker: red square outline sized like the goal object.
  emit_rect(out, m, Rect::square(scene.goal_pos, scene.goal_object().side),
            "fill=\"none\" stroke=\"red\" stroke-width=\"3\"");
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& o = scene.objects[i];
    std::string style = static_cast<int>(i) == scene.goal_index
                            ? "fill=\"#3366cc\" stroke=\"black\" stroke-width=\"2\""
                            : "fill=\"white\" stroke=\"black\" stroke-width=\"2\"";
    emit_rect(out, m, Rect::square(o.start, o.side), style);
  }
  out << "<circle cx=\"" << fmt(m.px(scene.agent_start.x)) << "\" cy=\""
      << fmt(m.py(scene.agent_start.y)) << "\" r=\"" << fmt(scene.agent_radius * kScale)
      << "\" fill=\"#f2c200\" stroke=\"black\" stroke-width=\"2\"/>\n";

  for (const auto& seg : plan.segments) {
    if (seg.phase != Phase::Place) continue;
    std::vector<Vec2> pts;
    for (const auto& st : seg.states) pts.push_back(st.object_pos[seg.object]);
    emit_polyline(out, m, pts, seg.object == scene.goal_index ? "#1d9e3a" : "#20b2aa");
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace segman
