#include "segman/scene.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace segman {

using json = nlohmann::ordered_json;

int Scene::index_of(const std::string& id) const {
  for (size_t i = 0; i < objects.size(); ++i) {
    if (objects[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

Configuration Scene::initial_configuration() const {
  Configuration c;
  c.agent_pos = agent_start;
  c.object_pos.reserve(objects.size());
  for (const auto& o : objects) c.object_pos.push_back(o.start);
  return c;
}

std::vector<Rect> Scene::boundary_walls() const {
  const double t = 1.0;
  Rect outer = bounds.inflated(t);
  return {
      {{outer.lo.x, outer.lo.y}, {bounds.lo.x, outer.hi.y}},  // left
      {{bounds.hi.x, outer.lo.y}, {outer.hi.x, outer.hi.y}},  // right
      {{outer.lo.x, outer.lo.y}, {outer.hi.x, bounds.lo.y}},  // bottom
      {{outer.lo.x, bounds.hi.y}, {outer.hi.x, outer.hi.y}},  // top
  };
}

int Plan::pnp_count() const {
  int n = 0;
  for (const auto& s : segments) {
    if (s.phase == Phase::Pick) ++n;
  }
  return n;
}

namespace {

struct NamedShape {
  Shape shape;
  std::string name;
  int object = -1;  // index if a movable object
};

std::vector<NamedShape> static_shapes(const Scene& scene) {
  std::vector<NamedShape> out;
  int wi = 0;
  for (const auto& w : scene.walls) {
    out.push_back({Shape::rect(w), "wall" + std::to_string(wi++), -1});
  }
  int bi = 0;
  for (const auto& b : scene.boundary_walls()) {
    out.push_back({Shape::rect(b), "bounds" + std::to_string(bi++), -1});
  }
  return out;
}

double worst_separation(const Configuration& config, const Scene& scene, std::string* pair_name) {
  double worst = 1e18;
  auto note = [&](double sd, const std::string& a, const std::string& b) {
    if (sd < worst) {
      worst = sd;
      if (pair_name) *pair_name = a + "/" + b;
    }
  };
  int attached = config.attachment ? config.attachment->object : -1;
  auto statics = static_shapes(scene);
  Shape agent = scene.agent_shape(config.agent_pos);
  for (const auto& s : statics) note(signed_distance(agent, s.shape), "agent", s.name);
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    Shape oi = scene.object_shape(static_cast<int>(i), config.object_pos[i]);
    if (static_cast<int>(i) != attached) {
      note(signed_distance(agent, oi), "agent", scene.objects[i].id);
    }
    for (const auto& s : statics) note(signed_distance(oi, s.shape), scene.objects[i].id, s.name);
    for (size_t j = i + 1; j < scene.objects.size(); ++j) {
      Shape oj = scene.object_shape(static_cast<int>(j), config.object_pos[j]);
      note(signed_distance(oi, oj), scene.objects[i].id, scene.objects[j].id);
    }
  }
  return worst;
}

Vec2 parse_vec2(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) {
    throw std::runtime_error("scene parse error: field '" + field + "' must be [x,y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Rect parse_rect(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 4) {
    throw std::runtime_error("scene parse error: field '" + field + "' must be [x0,y0,x1,y1]");
  }
  Rect r{{j[0].get<double>(), j[1].get<double>()}, {j[2].get<double>(), j[3].get<double>()}};
  if (r.lo.x >= r.hi.x || r.lo.y >= r.hi.y) {
    throw std::runtime_error("scene parse error: degenerate rectangle in '" + field + "'");
  }
  return r;
}

}  // namespace

bool collides(const Configuration& config, const Scene& scene, double clearance) {
  return worst_separation(config, scene, nullptr) < clearance;
}

double min_separation(const Configuration& config, const Scene& scene) {
  return worst_separation(config, scene, nullptr);
}

Scene load_scene(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("scene parse error: invalid JSON: ") + e.what());
  }
  Scene s;
  if (!j.contains("bounds")) throw std::runtime_error("scene parse error: missing field 'bounds'");
  s.bounds = parse_rect(j["bounds"], "bounds");
  s.name = j.value("name", std::string{});
  if (!j.contains("agent")) throw std::runtime_error("scene parse error: missing field 'agent'");
  s.agent_radius = j["agent"].value("radius", 0.0);
  if (s.agent_radius <= 0) throw std::runtime_error("scene parse error: agent.radius must be > 0");
  s.agent_start = parse_vec2(j["agent"].at("start"), "agent.start");
  for (size_t i = 0; i < j.value("walls", json::array()).size(); ++i) {
    s.walls.push_back(parse_rect(j["walls"][i], "walls[" + std::to_string(i) + "]"));
  }
  for (const auto& jo : j.value("objects", json::array())) {
    MovableObject o;
    o.id = jo.at("id").get<std::string>();
    o.side = jo.at("side").get<double>();
    o.start = parse_vec2(jo.at("start"), "objects." + o.id + ".start");
    if (o.side <= 0) throw std::runtime_error("scene parse error: object '" + o.id + "' side must be > 0");
    if (s.index_of(o.id) >= 0) throw std::runtime_error("scene parse error: duplicate id '" + o.id + "'");
    s.objects.push_back(o);
  }
  if (!j.contains("goal_object")) throw std::runtime_error("scene parse error: missing field 'goal_object'");
  std::string gid = j["goal_object"].get<std::string>();
  s.goal_index = s.index_of(gid);
  if (s.goal_index < 0) {
    throw std::runtime_error("scene parse error: goal_object '" + gid + "' not found");
  }
  s.goal_pos = parse_vec2(j.at("goal"), "goal");
  s.goal_tol = j.value("goal_tol", 0.0);
  if (s.goal_tol <= 0) throw std::runtime_error("scene parse error: goal_tol must be > 0");
  s.vmax = j.value("vmax", 1.0);
  s.dt = j.value("dt", 0.1);
  if (s.vmax <= 0 || s.dt <= 0) throw std::runtime_error("scene parse error: vmax and dt must be > 0");

  // Invariants.
  if (!s.bounds.contains(Rect::from_center(s.agent_start, s.agent_radius, s.agent_radius))) {
    throw std::runtime_error("scene parse error: agent start outside bounds");
  }
  for (size_t i = 0; i < s.objects.size(); ++i) {
    Rect fp = Rect::square(s.objects[i].start, s.objects[i].side);
    if (!s.bounds.contains(fp)) {
      throw std::runtime_error("scene parse error: object '" + s.objects[i].id + "' outside bounds");
    }
  }
  std::string pair;
  double sep = worst_separation(s.initial_configuration(), s, &pair);
  if (sep < -1e-9) {
    throw std::runtime_error("scene parse error: initial collision: " + pair);
  }
  return s;
}

Scene load_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scene(ss.str());
}

std::string save_scene(const Scene& s) {
  json j;
  if (!s.name.empty()) j["name"] = s.name;
  j["bounds"] = {s.bounds.lo.x, s.bounds.lo.y, s.bounds.hi.x, s.bounds.hi.y};
  j["agent"] = {{"radius", s.agent_radius}, {"start", {s.agent_start.x, s.agent_start.y}}};
  j["walls"] = json::array();
  for (const auto& w : s.walls) j["walls"].push_back({w.lo.x, w.lo.y, w.hi.x, w.hi.y});
  j["objects"] = json::array();
  for (const auto& o : s.objects) {
    j["objects"].push_back({{"id", o.id}, {"side", o.side}, {"start", {o.start.x, o.start.y}}});
  }
  j["goal_object"] = s.goal_object().id;
  j["goal"] = {s.goal_pos.x, s.goal_pos.y};
  j["goal_tol"] = s.goal_tol;
  j["vmax"] = s.vmax;
  j["dt"] = s.dt;
  return j.dump(2) + "\n";
}

namespace {

json config_to_json(const Scene& scene, const Configuration& c) {
  json j;
  j["agent"] = {c.agent_pos.x, c.agent_pos.y};
  json objs = json::array();
  for (const auto& p : c.object_pos) objs.push_back({p.x, p.y});
  j["objects"] = std::move(objs);
  if (c.attachment) {
    j["attach"] = {{"object", scene.objects[c.attachment->object].id},
                   {"offset", {c.attachment->offset.x, c.attachment->offset.y}}};
  }
  return j;
}

Configuration config_from_json(const Scene& scene, const json& j) {
  Configuration c;
  c.agent_pos = parse_vec2(j.at("agent"), "agent");
  const auto& objs = j.at("objects");
  if (objs.size() != scene.objects.size()) {
    throw std::runtime_error("plan parse error: object count mismatch with scene");
  }
  for (size_t i = 0; i < objs.size(); ++i) c.object_pos.push_back(parse_vec2(objs[i], "objects"));
  if (j.contains("attach") && !j["attach"].is_null()) {
    Attachment a;
    int idx = scene.index_of(j["attach"].at("object").get<std::string>());
    if (idx < 0) throw std::runtime_error("plan parse error: unknown attached object id");
    a.object = idx;
    a.offset = parse_vec2(j["attach"].at("offset"), "attach.offset");
    c.attachment = a;
  }
  return c;
}

}  // namespace

std::string save_plan(const Scene& scene, const Plan& plan) {
  json j;
  j["scene"] = scene.name;
  j["segments"] = json::array();
  for (const auto& seg : plan.segments) {
    json js;
    js["phase"] = seg.phase == Phase::Pick ? "pick" : "place";
    js["object"] = scene.objects[seg.object].id;
    js["dt"] = seg.dt;
    js["states"] = json::array();
    for (const auto& st : seg.states) js["states"].push_back(config_to_json(scene, st));
    j["segments"].push_back(std::move(js));
  }
  return j.dump() + "\n";
}

Plan load_plan(const Scene& scene, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("plan parse error: invalid JSON: ") + e.what());
  }
  if (j.contains("scene") && !scene.name.empty() && j["scene"].get<std::string>() != scene.name) {
    throw std::runtime_error("plan parse error: plan was produced for scene '" +
                             j["scene"].get<std::string>() + "', not '" + scene.name + "'");
  }
  Plan plan;
  for (const auto& js : j.at("segments")) {
    PlanSegment seg;
    std::string phase = js.at("phase").get<std::string>();
    if (phase == "pick") {
      seg.phase = Phase::Pick;
    } else if (phase == "place") {
      seg.phase = Phase::Place;
    } else {
      throw std::runtime_error("plan parse error: unknown phase '" + phase + "'");
    }
    seg.object = scene.index_of(js.at("object").get<std::string>());
    if (seg.object < 0) throw std::runtime_error("plan parse error: unknown object id in segment");
    seg.dt = js.value("dt", scene.dt);
    for (const auto& st : js.at("states")) seg.states.push_back(config_from_json(scene, st));
    plan.segments.push_back(std::move(seg));
  }
  return plan;
}

ValidationReport validate_plan(const Scene& scene, const Plan& plan) {
  ValidationReport rep;
  const double kPenetrationTol = 1e-6;
  const double kPoseTol = 1e-9;
  auto fail = [&](int seg, const std::string& kind, double mag) {
    rep.failures.push_back({seg, kind, mag});
  };

  const Configuration init = scene.initial_configuration();
  const Configuration* prev_state = nullptr;

  for (size_t si = 0; si < plan.segments.size(); ++si) {
    const auto& seg = plan.segments[si];
    int s = static_cast<int>(si);
    if (seg.states.empty()) {
      fail(s, "empty_segment", 0);
      continue;
    }
    // Alternation: pick/place pairs per object.
    if (si % 2 == 0 && seg.phase != Phase::Pick) fail(s, "alternation", 0);
    if (si % 2 == 1) {
      if (seg.phase != Phase::Place) fail(s, "alternation", 0);
      if (seg.object != plan.segments[si - 1].object) fail(s, "alternation_object", 0);
    }
    // Continuity with previous segment (or the scene's initial configuration).
    const Configuration& first = seg.states.front();
    const Configuration& ref = prev_state ? *prev_state : init;
    double jump = distance(first.agent_pos, ref.agent_pos);
    for (size_t i = 0; i < ref.object_pos.size(); ++i) {
      jump = std::max(jump, distance(first.object_pos[i], ref.object_pos[i]));
    }
    if (jump > kPoseTol) fail(s, prev_state ? "continuity" : "initial_state", jump);

    double vlimit = scene.vmax * seg.dt + 1e-9;
    double max_pen = 0;
    for (size_t t = 0; t < seg.states.size(); ++t) {
      const auto& st = seg.states[t];
      if (st.object_pos.size() != scene.objects.size()) {
        fail(s, "state_shape", 0);
        break;
      }
      max_pen = std::max(max_pen, -worst_separation(st, scene, nullptr));
      // Attachment rules.
      if (seg.phase == Phase::Place) {
        if (!st.attachment || st.attachment->object != seg.object) {
          fail(s, "attachment_missing", static_cast<double>(t));
        } else {
          Vec2 expect = st.agent_pos + st.attachment->offset;
          double err = distance(st.object_pos[st.attachment->object], expect);
          if (err > kPoseTol) fail(s, "attachment_offset", err);
        }
      } else if (st.attachment) {
        fail(s, "attachment_in_pick", static_cast<double>(t));
      }
      if (t > 0) {
        const auto& pr = seg.states[t - 1];
        double step = distance(st.agent_pos, pr.agent_pos);
        if (step > vlimit) fail(s, "velocity", step);
        int moving = st.attachment ? st.attachment->object : -1;
        for (size_t i = 0; i < st.object_pos.size(); ++i) {
          if (static_cast<int>(i) == moving) continue;
          double d = distance(st.object_pos[i], pr.object_pos[i]);
          if (d > kPoseTol) fail(s, "object_teleport", d);
        }
      }
    }
    if (max_pen >= kPenetrationTol) fail(s, "penetration", max_pen);
    prev_state = &seg.states.back();
  }

  // Terminal check.
  Vec2 final_pos = prev_state ? prev_state->object_pos[scene.goal_index] : init.object_pos[scene.goal_index];
  double dist_goal = distance(final_pos, scene.goal_pos);
  if (dist_goal > scene.goal_tol) fail(-1, "terminal", dist_goal);

  rep.valid = rep.failures.empty();
  return rep;
}

std::string ValidationReport::to_json() const {
  json j;
  j["valid"] = valid;
  j["failures"] = json::array();
  for (const auto& f : failures) {
    j["failures"].push_back({{"segment", f.segment}, {"kind", f.kind}, {"magnitude", f.magnitude}});
  }
  return j.dump(2) + "\n";
}

}  // namespace segman
