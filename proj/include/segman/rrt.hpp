#pragma once

#include <optional>
#include <vector>

#include "segman/scene.hpp"

namespace segman {

// Who moves during a path query. Position semantics:
//   Agent          -> agent disc center
//   ObjectAsAgent  -> the object's square center, agent absent from the world
//   AttachedPair   -> the carried object's center; agent disc at center - offset
struct Mover {
  enum class Type { Agent, ObjectAsAgent, AttachedPair };
  Type type = Type::Agent;
  int object = -1;
  Vec2 offset;  // AttachedPair: object center - agent center

  static Mover agent() { return {}; }
  static Mover object_as_agent(int obj) { return {Type::ObjectAsAgent, obj, {}}; }
  static Mover attached_pair(int obj, Vec2 offset) { return {Type::AttachedPair, obj, offset}; }
};

struct PathQuery {
  Mover mover;
  Vec2 start;
  Vec2 goal;
  std::vector<int> removed;  // object indices treated as absent
  Configuration frozen;      // positions of the remaining objects
  double clearance = 0.02;
  int touch_object = -1;  // this object may be touched (zero clearance)
};

struct Path {
  std::vector<Vec2> waypoints;
  double resolution = 0.0;  // max inter-waypoint gap
  double length() const;
};

// True iff the mover placed at `pos` keeps `clearance` to everything it can
// collide with. Points near the query start are only required to be
// penetration-free, so a plan can depart from a contact configuration.
bool mover_free(const PathQuery& q, const Scene& scene, Vec2 pos, double clearance);

// Bidirectional RRT-connect with shortcut smoothing, deterministic in `seed`.
// Returns waypoints resampled at `resolution` (agent_radius if <= 0).
std::optional<Path> plan_birrt(const PathQuery& q, const Scene& scene, uint64_t seed,
                               int max_iters = 20000, double resolution = 0.0);

bool path_exists(const PathQuery& q, const Scene& scene, uint64_t seed, int budget);

// Same polyline, gaps <= resolution, endpoints preserved exactly.
Path resample_path(const Path& path, double resolution);

}  // namespace segman
