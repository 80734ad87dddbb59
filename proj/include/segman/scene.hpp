#pragma once

#include <optional>
#include <string>
#include <vector>

#include "segman/geometry.hpp"

namespace segman {

struct MovableObject {
  std::string id;
  double side = 0.0;  // axis-aligned square, never rotates
  Vec2 start;
};

struct Attachment {
  int object = -1;
  Vec2 offset;  // object center - agent center, frozen at grasp
};

struct Configuration {
  Vec2 agent_pos;
  std::vector<Vec2> object_pos;  // aligned with Scene::objects
  std::optional<Attachment> attachment;
};

// Immutable world description. Safe to share across threads after load.
struct Scene {
  std::string name;
  Rect bounds;
  std::vector<Rect> walls;
  double agent_radius = 0.0;
  Vec2 agent_start;
  std::vector<MovableObject> objects;
  int goal_index = -1;
  Vec2 goal_pos;
  double goal_tol = 0.0;
  double vmax = 1.0;
  double dt = 0.1;

  const MovableObject& goal_object() const { return objects[goal_index]; }
  int index_of(const std::string& id) const;
  Configuration initial_configuration() const;
  Shape agent_shape(Vec2 pos) const { return Shape::disc(pos, agent_radius); }
  Shape object_shape(int i, Vec2 pos) const { return Shape::square(pos, objects[i].side); }
  // Four rects just outside the bounds, so "stay inside bounds" is a plain
  // shape-vs-rect check everywhere.
  std::vector<Rect> boundary_walls() const;
};

enum class Phase { Pick, Place };

struct PlanSegment {
  Phase phase = Phase::Pick;
  int object = -1;
  double dt = 0.1;
  std::vector<Configuration> states;
};

struct Plan {
  std::vector<PlanSegment> segments;
  int pnp_count() const;
};

struct ValidationFailure {
  int segment = -1;  // -1 for terminal/global checks
  std::string kind;
  double magnitude = 0.0;
};

struct ValidationReport {
  bool valid = false;
  std::vector<ValidationFailure> failures;
  std::string to_json() const;
};

// True iff any non-exempt pairwise signed distance is below `clearance`.
// The attached object vs agent pair is always exempt.
bool collides(const Configuration& config, const Scene& scene, double clearance);

// Worst (minimum) pairwise signed distance over all non-exempt pairs.
double min_separation(const Configuration& config, const Scene& scene);

Scene load_scene(const std::string& text);
Scene load_scene_file(const std::string& path);
std::string save_scene(const Scene& scene);

std::string save_plan(const Scene& scene, const Plan& plan);
Plan load_plan(const Scene& scene, const std::string& text);

// Independent replay of a plan against the contact rules: penetration,
// velocity limit, attachment consistency, unattached objects static,
// segment continuity, terminal goal check.
ValidationReport validate_plan(const Scene& scene, const Plan& plan);

}  // namespace segman
