#include "segman/pipeline.hpp"

#include <chrono>
#include <memory>
#include <variant>

#include <json.hpp>

#include "segman/rng.hpp"

namespace segman {

namespace {

using Clock = std::chrono::steady_clock;

TrajoptParams trajopt_params(const Scene& scene, const SolverParams& p) {
  TrajoptParams tp;
  tp.clearance = p.clearance;
  tp.vmax = scene.vmax;
  tp.dt = scene.dt;
  tp.grasp_samples = p.grasp_trials;
  return tp;
}

PlanSegment path_to_pick_segment(const Scene& scene, const Configuration& config, int object,
                                 const Path& path) {
  PlanSegment seg;
  seg.phase = Phase::Pick;
  seg.object = object;
  seg.dt = scene.dt;
  for (const auto& wp : path.waypoints) {
    Configuration c = config;
    c.agent_pos = wp;
    seg.states.push_back(c);
  }
  return seg;
}

std::vector<int> all_movables_except(const Scene& scene, int keep) {
  std::vector<int> out;
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    if (static_cast<int>(i) != keep) out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace

std::variant<PickOutcome, Blocked> plan_pick(const Configuration& config, const Scene& scene,
                                             int object, const SolverParams& params,
                                             uint64_t seed) {
  TrajoptParams tp = trajopt_params(scene, params);
  double res = std::min(0.9 * scene.vmax * scene.dt, scene.agent_radius);
  for (int trial = 0; trial < params.grasp_trials; ++trial) {
    uint64_t tseed = Rng::derive(seed, 0x41c + static_cast<uint64_t>(trial));
    auto grasp = solve_grasp(config, scene, object, tseed, tp);
    if (!grasp) continue;
    PathQuery q;
    q.mover = Mover::agent();
    q.start = config.agent_pos;
    q.goal = grasp->agent_pos;
    q.frozen = config;
    q.clearance = params.clearance;
    q.touch_object = object;
    auto path = plan_birrt(q, scene, tseed, params.rrt_budget, res);
    if (!path) continue;
    PickOutcome out;
    out.segment = path_to_pick_segment(scene, config, object, *path);
    out.attached = config;
    out.attached.agent_pos = grasp->agent_pos;
    out.attached.attachment = Attachment{object, config.object_pos[object] - grasp->agent_pos};
    return out;
  }
  // Could not pick: the reach route (to the object's own cell) is the query
  // the obstacle-removal search must open.
  Blocked b;
  b.query.mover = Mover::agent();
  b.query.start = config.agent_pos;
  b.query.goal = config.object_pos[object];
  b.query.removed = {object};
  b.query.frozen = config;
  b.query.clearance = params.clearance;
  PathQuery clear = b.query;
  clear.removed = all_movables_except(scene, -1);
  b.hard = !path_exists(clear, scene, Rng::derive(seed, 0xdead), params.rrt_budget);
  return b;
}

std::variant<Path, Blocked> plan_aux(const Configuration& config, const Scene& scene,
                                     const SolverParams& params, uint64_t seed) {
  PathQuery q;
  q.mover = Mover::object_as_agent(scene.goal_index);
  q.start = config.object_pos[scene.goal_index];
  q.goal = scene.goal_pos;
  q.frozen = config;
  q.clearance = params.clearance;
  auto path = plan_birrt(q, scene, seed, params.rrt_budget, scene.agent_radius);
  if (path) return *path;
  Blocked b;
  b.query = q;
  PathQuery clear = q;
  clear.removed = all_movables_except(scene, scene.goal_index);
  b.hard = !path_exists(clear, scene, Rng::derive(seed, 0xbeef), params.rrt_budget);
  return b;
}

Solution solve_task(const Scene& scene_in, const SolverParams& params) {
  Scene scene = scene_in;
  if (params.vmax > 0) scene.vmax = params.vmax;
  if (params.dt > 0) scene.dt = params.dt;

  auto t0 = Clock::now();
  auto elapsed = [&]() {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };
  auto timed_out = [&]() { return elapsed() > params.time_budget; };

  Solution sol;
  sol.stats.seed = params.seed;
  TrajoptParams tp = trajopt_params(scene, params);
  Configuration config = scene.initial_configuration();

  auto finish = [&](bool ok, const std::string& reason) {
    sol.stats.success = ok;
    sol.stats.failure_reason = ok ? "" : reason;
    sol.stats.pnp_count = sol.plan.pnp_count();
    sol.stats.wall_time_s = elapsed();
    if (ok) {
      auto rep = validate_plan(scene, sol.plan);
      if (!rep.valid) {
        sol.stats.success = false;
        sol.stats.failure_reason = "internal: produced plan failed validation";
      }
    }
    return sol;
  };

  if (distance(config.object_pos[scene.goal_index], scene.goal_pos) <= scene.goal_tol) {
    return finish(true, "");
  }

  auto run_removal = [&](const PathQuery& blocked, uint64_t seed) -> bool {
    SearchParams sp;
    sp.alpha = params.alpha;
    sp.gamma = params.gamma;
    sp.y = params.y;
    sp.depth_threshold = params.depth_threshold;
    sp.k_subgoals = params.k_subgoals;
    sp.node_budget = params.node_budget;
    sp.max_subset_size = std::min<int>(params.max_subset_size,
                                       static_cast<int>(scene.objects.size()));
    sp.tau = params.tau;
    sp.rrt_budget = params.rrt_budget;
    sp.seed = seed;
    sp.trajopt = tp;
    sp.should_abort = timed_out;
    SearchResult sr = run_search(scene, config, blocked, sp);
    sol.stats.nodes_expanded += sr.nodes_expanded;
    if (!sr.success) return false;
    for (const auto& seg : sr.relocations) {
      sol.plan.segments.push_back(seg);
      if (seg.phase == Phase::Pick) {
        sol.stats.relocated.push_back(scene.objects[seg.object].id);
      }
    }
    sol.stats.solved_subset.clear();
    for (int o : sr.solved_subset) sol.stats.solved_subset.push_back(scene.objects[o].id);
    config = sr.config;
    return true;
  };

  for (int cycle = 0; cycle < params.outer_cycles; ++cycle) {
    if (timed_out()) return finish(false, "time budget exceeded");
    uint64_t cseed = Rng::derive(params.seed, 0x100 + static_cast<uint64_t>(cycle));

    // Auxiliary path for the goal object (independent of the grasp).
    auto aux = plan_aux(config, scene, params, Rng::derive(cseed, 0x300));
    if (std::holds_alternative<Blocked>(aux)) {
      const Blocked& b = std::get<Blocked>(aux);
      if (b.hard) return finish(false, "goal position sealed by walls");
      if (!run_removal(b.query, Rng::derive(cseed, 0x400))) {
        return finish(false, "obstacle removal failed for place leg");
      }
      continue;
    }
    Path aux_path = std::get<Path>(aux);

    // Several grasps per cycle: the contact face decides the footprint of the
    // attached pair, and narrow sections often admit only one face.
    const int kPickTries = 4;
    bool cycle_done = false;
    for (int gp = 0; gp < kPickTries && !cycle_done; ++gp) {
      if (timed_out()) return finish(false, "time budget exceeded");
      auto pick = plan_pick(config, scene, scene.goal_index, params,
                            Rng::derive(cseed, 0x600 + static_cast<uint64_t>(gp)));
      if (std::holds_alternative<Blocked>(pick)) {
        const Blocked& b = std::get<Blocked>(pick);
        if (b.hard) return finish(false, "goal object unreachable through walls");
        if (path_exists(b.query, scene, Rng::derive(cseed, 0x77 + gp), params.rrt_budget)) {
          continue;  // route open but grasping failed; retry with fresh seeds
        }
        if (!run_removal(b.query, Rng::derive(cseed, 0x200 + gp))) {
          return finish(false, "obstacle removal failed for pick leg");
        }
        cycle_done = true;  // configuration changed; replan the aux path
        continue;
      }
      PickOutcome po = std::get<PickOutcome>(pick);

      // Adaptive placement episode along the auxiliary path.
      struct Episode {
        Configuration cur;
        std::vector<Configuration> states;
        const Path* path = nullptr;
      };
      auto ep = std::make_shared<Episode>();
      HopSolverFactory factory = [&, ep, po](const Path& path) -> HopSolver {
        ep->cur = po.attached;
        ep->states = {po.attached};
        ep->path = &path;
        return [&, ep](int index) -> bool {
          if (timed_out()) return false;
          auto hop = solve_transport_hop(ep->cur, scene, ep->path->waypoints[index], false, tp);
          if (!hop) return false;
          for (size_t i = 1; i < hop->size(); ++i) ep->states.push_back((*hop)[i]);
          ep->cur = hop->back();
          return true;
        };
      };
      PathRegenerator regen = [&](int retry) -> std::optional<Path> {
        auto fresh = plan_aux(config, scene, params, Rng::derive(cseed, 0x500 + 7 * gp + retry));
        if (std::holds_alternative<Path>(fresh)) return std::get<Path>(fresh);
        return std::nullopt;
      };
      RefinementOutcome ro = place_with_refinement(aux_path, factory, params.theta,
                                                   params.max_refinements, params.max_retries,
                                                   regen);
      sol.stats.refinements_used += ro.refinements_used;
      if (ro.success) {
        sol.plan.segments.push_back(po.segment);
        PlanSegment place;
        place.phase = Phase::Place;
        place.object = scene.goal_index;
        place.dt = scene.dt;
        place.states = ep->states;
        sol.plan.segments.push_back(std::move(place));
        return finish(true, "");
      }
      if (timed_out()) return finish(false, "time budget exceeded");
      // Placement failed at every granularity: try another grasp before
      // burning the whole cycle.
    }
  }
  return finish(false, "trial limit reached");
}

std::string solution_to_json(const Scene& scene, const Solution& sol) {
  nlohmann::ordered_json j;
  j["success"] = sol.stats.success;
  j["pnp_count"] = sol.stats.pnp_count;
  j["nodes_expanded"] = sol.stats.nodes_expanded;
  j["refinements_used"] = sol.stats.refinements_used;
  j["seed"] = sol.stats.seed;
  j["relocated"] = sol.stats.relocated;
  j["solved_subset"] = sol.stats.solved_subset;
  if (!sol.stats.failure_reason.empty()) j["failure_reason"] = sol.stats.failure_reason;
  j["plan"] = nlohmann::ordered_json::parse(save_plan(scene, sol.plan));
  return j.dump() + "\n";
}

}  // namespace segman
