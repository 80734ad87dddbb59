#include "segman/rrt.hpp"

#include <cmath>

#include "segman/rng.hpp"

namespace segman {

double Path::length() const {
  double len = 0;
  for (size_t i = 1; i < waypoints.size(); ++i) len += distance(waypoints[i], waypoints[i - 1]);
  return len;
}

namespace {

constexpr double kGoalBias = 0.1;
constexpr double kEdgeStep = 0.02;   // collision sampling along edges
constexpr double kEdgePad = 0.01;    // covers the dip between edge samples
constexpr double kContactRamp = 0.3; // near start/goal, contact is allowed
constexpr double kTouchTol = 1e-9;

struct MoverShapes {
  Shape primary;             // agent disc or object square
  std::optional<Shape> carried;  // agent disc for AttachedPair
};

MoverShapes shapes_at(const PathQuery& q, const Scene& scene, Vec2 pos) {
  MoverShapes m;
  switch (q.mover.type) {
    case Mover::Type::Agent:
      m.primary = scene.agent_shape(pos);
      break;
    case Mover::Type::ObjectAsAgent:
      m.primary = scene.object_shape(q.mover.object, pos);
      break;
    case Mover::Type::AttachedPair:
      m.primary = scene.object_shape(q.mover.object, pos);
      m.carried = scene.agent_shape(pos - q.mover.offset);
      break;
  }
  return m;
}

bool is_removed(const PathQuery& q, int obj) {
  for (int r : q.removed) {
    if (r == obj) return true;
  }
  return false;
}

// Clearance check with edge padding and contact ramps near start/goal.
bool free_at(const PathQuery& q, const Scene& scene, Vec2 pos, double pad) {
  bool near_start = distance(pos, q.start) < kContactRamp;
  bool near_goal = distance(pos, q.goal) < kContactRamp;
  MoverShapes m = shapes_at(q, scene, pos);
  auto check = [&](const Shape& obstacle, bool touchable) -> bool {
    double thr;
    if ((touchable && near_goal) || near_start) {
      thr = -kTouchTol;
    } else if (touchable) {
      thr = 0.0;
    } else {
      thr = q.clearance + pad;
    }
    if (signed_distance(m.primary, obstacle) < thr) return false;
    if (m.carried && signed_distance(*m.carried, obstacle) < thr) return false;
    return true;
  };
  for (const auto& w : scene.walls) {
    if (!check(Shape::rect(w), false)) return false;
  }
  for (const auto& b : scene.boundary_walls()) {
    if (!check(Shape::rect(b), false)) return false;
  }
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    int oi = static_cast<int>(i);
    if (oi == q.mover.object &&
        (q.mover.type == Mover::Type::ObjectAsAgent || q.mover.type == Mover::Type::AttachedPair)) {
      continue;
    }
    if (is_removed(q, oi)) continue;
    if (!check(scene.object_shape(oi, q.frozen.object_pos[i]), oi == q.touch_object)) return false;
  }
  // The parked agent is an obstacle when an object moves on its own.
  if (q.mover.type == Mover::Type::ObjectAsAgent) {
    // Spec: the agent is removed in the auxiliary configuration.
  }
  return true;
}

bool edge_free(const PathQuery& q, const Scene& scene, Vec2 a, Vec2 b) {
  double len = distance(a, b);
  int n = std::max(1, static_cast<int>(std::ceil(len / kEdgeStep)));
  for (int i = 0; i <= n; ++i) {
    Vec2 p = a + (b - a) * (static_cast<double>(i) / n);
    if (!free_at(q, scene, p, kEdgePad)) return false;
  }
  return true;
}

struct Tree {
  std::vector<Vec2> pos;
  std::vector<int> parent;
  void add(Vec2 p, int par) {
    pos.push_back(p);
    parent.push_back(par);
  }
  int nearest(Vec2 p) const {
    int best = 0;
    double bd = 1e18;
    for (size_t i = 0; i < pos.size(); ++i) {
      double d = (pos[i] - p).squared_norm();
      if (d < bd) {
        bd = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  }
  std::vector<Vec2> trace(int idx) const {
    std::vector<Vec2> out;
    for (int i = idx; i >= 0; i = parent[i]) out.push_back(pos[i]);
    return out;  // node -> root order
  }
};

std::vector<Vec2> shortcut(const PathQuery& q, const Scene& scene, std::vector<Vec2> pts, Rng& rng) {
  for (int attempt = 0; attempt < 100 && pts.size() > 2; ++attempt) {
    int i = rng.uniform_int(static_cast<int>(pts.size()) - 1);
    int j = rng.uniform_int(static_cast<int>(pts.size()));
    if (j <= i + 1) continue;
    if (edge_free(q, scene, pts[i], pts[j])) {
      pts.erase(pts.begin() + i + 1, pts.begin() + j);
    }
  }
  return pts;
}

}  // namespace

bool mover_free(const PathQuery& q, const Scene& scene, Vec2 pos, double clearance) {
  PathQuery qq = q;
  qq.clearance = clearance;
  return free_at(qq, scene, pos, 0.0);
}

Path resample_path(const Path& path, double resolution) {
  Path out;
  out.resolution = resolution;
  if (path.waypoints.empty()) return out;
  out.waypoints.push_back(path.waypoints.front());
  for (size_t i = 1; i < path.waypoints.size(); ++i) {
    Vec2 a = path.waypoints[i - 1];
    Vec2 b = path.waypoints[i];
    double len = distance(a, b);
    if (len <= 0) continue;
    int n = std::max(1, static_cast<int>(std::ceil(len / resolution - 1e-12)));
    for (int k = 1; k <= n; ++k) {
      out.waypoints.push_back(k == n ? b : a + (b - a) * (static_cast<double>(k) / n));
    }
  }
  return out;
}

std::optional<Path> plan_birrt(const PathQuery& q, const Scene& scene, uint64_t seed,
                               int max_iters, double resolution) {
  if (resolution <= 0) resolution = scene.agent_radius;
  if (max_iters <= 0) return std::nullopt;
  if (!free_at(q, scene, q.start, 0.0) || !free_at(q, scene, q.goal, 0.0)) return std::nullopt;

  Rng rng(Rng::derive(seed, 0xb1a2));
  const double step = scene.agent_radius;

  std::vector<Vec2> raw;
  if (edge_free(q, scene, q.start, q.goal)) {
    raw = {q.start, q.goal};
  } else {
    Tree ta, tb;
    ta.add(q.start, -1);
    tb.add(q.goal, -1);
    Tree* a = &ta;
    Tree* b = &tb;
    bool connected = false;
    int join_a = -1, join_b = -1;
    for (int it = 0; it < max_iters && !connected; ++it) {
      Vec2 sample;
      if (rng.uniform() < kGoalBias) {
        sample = b->pos[0];
      } else {
        sample = {rng.uniform(scene.bounds.lo.x, scene.bounds.hi.x),
                  rng.uniform(scene.bounds.lo.y, scene.bounds.hi.y)};
      }
      int ni = a->nearest(sample);
      Vec2 npos = a->pos[ni];
      Vec2 dir = sample - npos;
      double len = dir.norm();
      if (len < 1e-12) continue;
      Vec2 newp = len <= step ? sample : npos + dir * (step / len);
      if (!edge_free(q, scene, npos, newp)) continue;
      a->add(newp, ni);
      // Greedy connect from the other tree.
      int mi = b->nearest(newp);
      Vec2 cur = b->pos[mi];
      int cur_idx = mi;
      for (int c = 0; c < 256; ++c) {
        Vec2 to = newp - cur;
        double d = to.norm();
        if (d <= step) {
          if (edge_free(q, scene, cur, newp)) {
            connected = true;
            join_a = static_cast<int>(a->pos.size()) - 1;
            join_b = cur_idx;
          }
          break;
        }
        Vec2 nxt = cur + to * (step / d);
        if (!edge_free(q, scene, cur, nxt)) break;
        b->add(nxt, cur_idx);
        cur_idx = static_cast<int>(b->pos.size()) - 1;
        cur = nxt;
      }
      if (!connected) std::swap(a, b);
    }
    if (!connected) return std::nullopt;
    // Assemble start -> goal.
    std::vector<Vec2> part_a = a->trace(join_a);
    std::vector<Vec2> part_b = b->trace(join_b);
    bool a_is_start = (a == &ta);
    std::vector<Vec2> pts;
    if (a_is_start) {
      pts.assign(part_a.rbegin(), part_a.rend());
      pts.insert(pts.end(), part_b.begin(), part_b.end());
    } else {
      pts.assign(part_b.rbegin(), part_b.rend());
      pts.insert(pts.end(), part_a.begin(), part_a.end());
    }
    raw = std::move(pts);
  }

  raw = shortcut(q, scene, std::move(raw), rng);
  Path p;
  p.waypoints = std::move(raw);
  p.resolution = resolution;
  return resample_path(p, resolution);
}

bool path_exists(const PathQuery& q, const Scene& scene, uint64_t seed, int budget) {
  return plan_birrt(q, scene, seed, budget).has_value();
}

}  // namespace segman
