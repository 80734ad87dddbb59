// Acceptance harness: runs the release gate checks end to end and prints one
// PASS/FAIL line per criterion. Exits nonzero if any criterion fails.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "segman/pipeline.hpp"
#include "segman/rng.hpp"
#include "segman/svg.hpp"
#include "support/floodfill.hpp"
#include "support/scenegen.hpp"

using namespace segman;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", id.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

const std::set<std::string> kObstacleTasks = {
    "maze_hard",  "wall",       "wall_hard",   "pcg_2", "pcg_1_hard",
    "two_blocks", "four_blocks", "multi_block", "lock"};

struct RunCell {
  std::string task;
  uint64_t seed = 0;
  Solution sol;
  bool valid = false;
};

struct Grid {
  std::map<std::string, Scene> scenes;
  std::vector<RunCell> cells;
  double wall_s = 0;
};

Grid run_grid(const std::string& tasks_dir, int n_seeds, double budget) {
  Grid g;
  for (const auto& e : fs::directory_iterator(tasks_dir)) {
    if (e.path().extension() != ".json") continue;
    Scene s = load_scene_file(e.path().string());
    g.scenes.emplace(s.name, s);
  }
  for (const auto& [name, scene] : g.scenes) {
    for (int seed = 0; seed < n_seeds; ++seed) {
      RunCell c;
      c.task = name;
      c.seed = static_cast<uint64_t>(seed);
      g.cells.push_back(std::move(c));
    }
  }
  auto t0 = std::chrono::steady_clock::now();
  std::atomic<size_t> next{0};
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&]() {
      for (size_t i = next.fetch_add(1); i < g.cells.size(); i = next.fetch_add(1)) {
        RunCell& c = g.cells[i];
        SolverParams params;
        params.seed = c.seed;
        params.time_budget = budget;
        c.sol = solve_task(g.scenes.at(c.task), params);
        if (c.sol.stats.success) {
          c.valid = validate_plan(g.scenes.at(c.task), c.sol.plan).valid;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  g.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return g;
}

// Minimum-cardinality removal subsets that open the goal-object route,
// computed with the independent flood-fill oracle.
std::vector<std::vector<int>> oracle_min_subsets(const Scene& s, int* k_min) {
  PathQuery q;
  q.mover = Mover::object_as_agent(s.goal_index);
  q.start = s.objects[s.goal_index].start;
  q.goal = s.goal_pos;
  q.frozen = s.initial_configuration();
  q.clearance = 0.02;
  std::vector<int> pool;
  for (size_t i = 0; i < s.objects.size(); ++i) {
    if (static_cast<int>(i) != s.goal_index) pool.push_back(static_cast<int>(i));
  }
  for (int k = 0; k <= static_cast<int>(pool.size()); ++k) {
    std::vector<std::vector<int>> found;
    std::vector<int> idx(k);
    std::function<void(int, int)> rec = [&](int start, int depth) {
      if (depth == k) {
        PathQuery qq = q;
        for (int i : idx) qq.removed.push_back(pool[i]);
        if (testsupport::flood_fill_path_exists(s, qq)) found.push_back(qq.removed);
        return;
      }
      for (int i = start; i < static_cast<int>(pool.size()); ++i) {
        idx[depth] = i;
        rec(i + 1, depth + 1);
      }
    };
    rec(0, 0);
    if (!found.empty()) {
      *k_min = k;
      return found;
    }
  }
  *k_min = -1;
  return {};
}

// Straight-from-the-pseudocode reference for the index selector.
struct RefTrace {
  bool success = false;
  std::vector<int> accepted;
  std::vector<int> queried;
};

RefTrace reference_selector(int n, const std::function<bool(int)>& feasible, int theta) {
  RefTrace out;
  int step_max = n - 1;
  int p = step_max;
  int step = step_max;
  int p_prev = 0;
  int beta = 0;
  while (true) {
    out.queried.push_back(p);
    if (feasible(p)) {
      beta += 1;
      out.accepted.push_back(p);
      p_prev = p;
      if (p_prev == step_max) {
        out.success = true;
        return out;
      }
      if (beta >= theta) step = std::min(2 * step, step_max);
      p = std::min(p + step, step_max);
    } else {
      beta = 0;
      if (step == 1) return out;
      step = std::max(1, step / 2);
      p = std::min(p_prev + step, step_max);
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

static void ac_1_2_6_10(const std::string& tasks_dir) {
  Grid g = run_grid(tasks_dir, 10, 1000.0);

  // AC-1: every reported success validates; whole grid under 30 minutes.
  int n_success = 0, n_valid = 0;
  for (const auto& c : g.cells) {
    if (c.sol.stats.success) {
      ++n_success;
      if (c.valid) ++n_valid;
    }
  }
  {
    std::ostringstream d;
    d << n_valid << "/" << n_success << " success plans validate; grid wall time " << std::fixed
      << g.wall_s << " s over " << g.cells.size() << " runs";
    report("AC-1", g.scenes.size() == 15 && n_success == n_valid && g.wall_s < 1800.0, d.str());
  }

  // AC-2: per-task success counts by class.
  bool ok2 = true;
  std::ostringstream d2;
  for (const auto& [name, scene] : g.scenes) {
    int solved = 0;
    for (const auto& c : g.cells) {
      if (c.task == name && c.sol.stats.success) ++solved;
    }
    int need = kObstacleTasks.count(name) ? 8 : 9;
    if (solved < need) {
      ok2 = false;
      d2 << name << "=" << solved << "/10(<" << need << ") ";
    }
  }
  report("AC-2", ok2, ok2 ? "all tasks meet the per-class success floor over 10 seeds"
                          : "below floor: " + d2.str());

  // AC-6: solving subset covers an oracle minimum subset; pnp >= |O_min|+1.
  bool ok6 = true;
  std::ostringstream d6;
  for (const auto& name : kObstacleTasks) {
    const Scene& s = g.scenes.at(name);
    int k_min = -1;
    auto mins = oracle_min_subsets(s, &k_min);
    if (k_min < 1) {
      ok6 = false;
      d6 << name << ": oracle says no relocation needed; ";
      continue;
    }
    for (const auto& c : g.cells) {
      if (c.task != name || !c.sol.stats.success) continue;
      std::set<int> oset;
      for (const auto& id : c.sol.stats.solved_subset) oset.insert(s.index_of(id));
      bool covers = false;
      for (const auto& m : mins) {
        if (std::all_of(m.begin(), m.end(), [&](int i) { return oset.count(i) > 0; })) {
          covers = true;
          break;
        }
      }
      if (!covers || c.sol.stats.pnp_count < k_min + 1) {
        ok6 = false;
        d6 << name << " seed " << c.seed << ": o_set/pnp mismatch (k_min=" << k_min << "); ";
      }
    }
  }
  report("AC-6", ok6,
         ok6 ? "solving subsets cover an oracle minimum subset and pnp >= |O_min|+1"
             : d6.str());

  // AC-10: repeat seed-0 runs byte-identical (plan JSON and SVG).
  bool ok10 = true;
  std::ostringstream d10;
  for (const auto& [name, scene] : g.scenes) {
    const RunCell* first = nullptr;
    for (const auto& c : g.cells) {
      if (c.task == name && c.seed == 0) first = &c;
    }
    SolverParams params;
    params.seed = 0;
    params.time_budget = 1000.0;
    Solution again = solve_task(scene, params);
    if (solution_to_json(scene, first->sol) != solution_to_json(scene, again) ||
        render_svg(scene, first->sol.plan) != render_svg(scene, again.plan)) {
      ok10 = false;
      d10 << name << " ";
    }
  }
  report("AC-10", ok10,
         ok10 ? "repeat runs byte-identical (plan JSON and SVG) on all 15 tasks"
              : "nondeterministic on: " + d10.str());
}

static void ac_3() {
  long long divergences = 0;
  long long trials = 100000;
  for (long long trial = 0; trial < trials; ++trial) {
    uint64_t fseed = Rng::derive(0xacce97, trial);
    Rng meta(fseed);
    int n = 2 + meta.uniform_int(63);      // n_waypoints in [2, 64]
    int theta = 1 + meta.uniform_int(8);   // theta in [1, 8]
    double p_ok = 0.15 + 0.85 * meta.uniform();
    auto feasible = [&](int call_no, int index) {
      return Rng(Rng::derive(fseed, 1000 + 37 * call_no + index)).uniform() < p_ok;
    };
    int calls_ref = 0, calls_got = 0;
    RefTrace ref = reference_selector(
        n, [&](int i) { return feasible(calls_ref++, i); }, theta);
    std::vector<int> queried;
    auto got = adaptive_place(n, [&](int i) {
      queried.push_back(i);
      return feasible(calls_got++, i);
    }, theta);
    bool same = got.has_value() == ref.success && queried == ref.queried &&
                (!got || *got == ref.accepted);
    if (!same) ++divergences;
  }
  int calls_all = 0;
  auto all_ok = adaptive_place(16, [&](int) { ++calls_all; return true; }, 2);
  bool edge = all_ok.has_value() && calls_all == 1 &&
              !adaptive_place(16, [&](int) { return false; }, 2).has_value();
  std::ostringstream d;
  d << divergences << " divergences in " << trials << " traces; all-feasible used " << calls_all
    << " call";
  report("AC-3", divergences == 0 && edge, d.str());
}

static void ac_4() {
  bool vals = std::abs(score_node(1, 2, 0.5, 1.0, 1, 1.0, 0.95) - 1.95) <= 1e-9 &&
              std::abs(score_node(4, 2, 0.5, 1.0, 1, 1.0, 0.95) -
                       (0.5 + std::pow(0.95, 4))) <= 1e-9;
  int bad = 0;
  Rng rng(4242);
  for (int i = 0; i < 10000; ++i) {
    int visits = 1 + rng.uniform_int(30);
    double s_r = 1 + rng.uniform_int(5);
    double s_x = rng.uniform(0.05, 0.95);
    double ratio = rng.uniform(0.05, 1.0);
    int size = 1 + rng.uniform_int(4);
    double base = score_node(visits, s_r, s_x, ratio, size, 1.0, 0.95);
    if (!(score_node(visits + 1, s_r, s_x, ratio, size, 1.0, 0.95) < base)) ++bad;
    if (!(score_node(visits, s_r + 1, s_x, ratio, size, 1.0, 0.95) > base)) ++bad;
    if (!(score_node(visits, s_r, s_x * 1.05 + 1e-6, ratio, size, 1.0, 0.95) > base)) ++bad;
  }
  std::ostringstream d;
  d << "hand values " << (vals ? "match" : "MISMATCH") << "; " << bad
    << " monotonicity violations in 10000 tuples";
  report("AC-4", vals && bad == 0, d.str());
}

static void ac_5() {
  auto t0 = std::chrono::steady_clock::now();
  int mismatches = 0;
  for (uint64_t seed = 500; seed < 550; ++seed) {
    testsupport::MazeScene m = testsupport::make_maze(seed, 4, 0.35);
    PathQuery q;
    q.mover = Mover::object_as_agent(0);
    q.start = m.scene.objects[0].start;
    q.goal = m.scene.goal_pos;
    q.frozen = m.scene.initial_configuration();
    q.clearance = 0.02;
    auto candidates = generate_subsets(m.scene, q, 3, seed, 20000);
    std::set<std::vector<int>> planner_sets;
    for (const auto& c : candidates) planner_sets.insert(c.o_set);
    std::set<std::vector<int>> oracle_sets;
    for (int mask = 1; mask < 8; ++mask) {
      std::vector<int> subset;
      for (int b = 0; b < 3; ++b) {
        if (mask & (1 << b)) subset.push_back(b + 1);
      }
      PathQuery qq = q;
      qq.removed = subset;
      if (testsupport::flood_fill_path_exists(m.scene, qq)) oracle_sets.insert(subset);
    }
    if (planner_sets != oracle_sets) ++mismatches;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream d;
  d << mismatches << " mismatches in 50 scenes; " << std::fixed << secs << " s";
  report("AC-5", mismatches == 0 && secs < 120.0, d.str());
}

namespace {

Residual random_residual(ResidualKind kind, Rng& rng, int T) {
  Residual r;
  r.kind = kind;
  r.t = 1 + rng.uniform_int(T - 1);
  r.weight = rng.uniform(0.5, 2.0);
  r.body = rng.uniform() < 0.5 ? BodyRef::Agent : BodyRef::Carried;
  switch (kind) {
    case ResidualKind::Smoothness:
      r.mode = ResidualMode::Cost;
      r.body = BodyRef::Agent;
      break;
    case ResidualKind::Stable:
      r.mode = ResidualMode::Eq;
      r.body = BodyRef::Agent;
      r.target = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
      break;
    case ResidualKind::Touch:
      r.mode = ResidualMode::Eq;
      r.body = BodyRef::Agent;
      r.obstacle = Shape::square({rng.uniform(-1, 1), rng.uniform(-1, 1)}, 0.8);
      break;
    case ResidualKind::PositionDiff:
      r.mode = rng.uniform() < 0.5 ? ResidualMode::Cost : ResidualMode::Ineq;
      r.t2 = rng.uniform() < 0.5 ? r.t - 1 : -1;
      r.target = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
      r.bound = rng.uniform(0.0, 0.5);
      break;
    case ResidualKind::StableOn:
      r.mode = ResidualMode::Ineq;
      r.region = Rect::from_center({rng.uniform(-1, 1), rng.uniform(-1, 1)}, 0.5, 0.7);
      break;
    case ResidualKind::Collision:
      r.mode = ResidualMode::Ineq;
      r.margin = 0.02;
      if (rng.uniform() < 0.5) {
        r.obstacle = Shape::square({rng.uniform(-2, 2), rng.uniform(-2, 2)}, 1.0);
      } else {
        r.obstacle = Shape::disc({rng.uniform(-2, 2), rng.uniform(-2, 2)}, 0.5);
      }
      break;
  }
  return r;
}

// Returns checked points; bumps *bad on any relative FD error above 1e-4.
int fd_check(ResidualKind kind, int want, int* bad) {
  Rng rng(static_cast<uint64_t>(kind) * 131 + 9);
  TrajectoryProblem p;
  p.T = 4;
  p.agent_radius = 0.3;
  p.carried_offset = Vec2{0.6, 0};
  p.carried_side = 0.6;
  const double h = 1e-6;
  int checked = 0;
  for (int trial = 0; trial < 60 * want && checked < want; ++trial) {
    Residual r = random_residual(kind, rng, p.T);
    std::vector<Vec2> z(p.T + 1);
    for (auto& v : z) v = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
    ResidualValue rv = eval_residual(r, p, z);
    bool near_kink = false;
    for (int i = 0; i < rv.nv; ++i) {
      if (std::abs(rv.v[i]) < 1e-3) near_kink = true;
    }
    if (kind == ResidualKind::PositionDiff && r.mode != ResidualMode::Cost) {
      Vec2 dvec = r.t2 >= 0 ? z[r.t] - z[r.t2] : p.body_pos(r.body, z[r.t]) - r.target;
      if (dvec.norm() < 1e-2) near_kink = true;
    }
    if (near_kink) continue;
    bool ok = true;
    for (int t = 0; t <= p.T && ok; ++t) {
      for (int axis = 0; axis < 2 && ok; ++axis) {
        std::vector<Vec2> zp = z, zm = z;
        (axis == 0 ? zp[t].x : zp[t].y) += h;
        (axis == 0 ? zm[t].x : zm[t].y) -= h;
        ResidualValue rp = eval_residual(r, p, zp);
        ResidualValue rm = eval_residual(r, p, zm);
        for (int ci = 0; ci < rv.nv; ++ci) {
          double fd = (rp.v[ci] - rm.v[ci]) / (2 * h);
          double an = 0;
          for (int ji = 0; ji < rv.nj; ++ji) {
            if (rv.jac[ji].comp == ci && rv.jac[ji].t == t) {
              an += axis == 0 ? rv.jac[ji].g.x : rv.jac[ji].g.y;
            }
          }
          if (std::abs(fd - an) / std::max(1.0, std::abs(fd)) > 1e-4) ok = false;
        }
      }
    }
    if (!ok) ++(*bad);
    ++checked;
  }
  return checked;
}

}  // namespace

static void ac_7() {
  int bad = 0, total = 0;
  for (ResidualKind kind : {ResidualKind::Smoothness, ResidualKind::Stable, ResidualKind::Touch,
                            ResidualKind::PositionDiff, ResidualKind::StableOn,
                            ResidualKind::Collision}) {
    total += fd_check(kind, 100, &bad);
  }
  // Converged trajectories keep constraints under tolerance.
  int converged = 0, over_tol = 0;
  Scene s;
  s.bounds = {{0, 0}, {10, 10}};
  s.agent_radius = 0.3;
  s.agent_start = {1, 5};
  s.goal_tol = 0.15;
  s.objects = {{"box", 0.6, {2, 5}}};
  s.goal_index = 0;
  s.goal_pos = {8, 5};
  Rng rng(77);
  for (int i = 0; i < 20; ++i) {
    Configuration c = s.initial_configuration();
    Vec2 agent{rng.uniform(1, 3), rng.uniform(2, 8)};
    c.agent_pos = agent;
    c.object_pos[0] = agent + Vec2{0.6, 0};
    c.attachment = Attachment{0, Vec2{0.6, 0}};
    Vec2 target{rng.uniform(6, 9), rng.uniform(2, 8)};
    auto hop = solve_transport_hop(c, s, target, false);
    if (hop) {
      ++converged;
      for (const auto& st : *hop) {
        if (min_separation(st, s) < -1e-4) ++over_tol;
      }
      if (distance(hop->back().object_pos[0], target) > 1e-3) ++over_tol;
    }
  }
  std::ostringstream d;
  d << bad << " Jacobian mismatches over " << total << " points; " << converged
    << "/20 hops converged with " << over_tol << " tolerance breaches";
  report("AC-7", bad == 0 && total >= 600 && converged >= 15 && over_tol == 0, d.str());
}

static void ac_8() {
  std::vector<Vec2> a{{0, 0}, {1, 0}};
  std::vector<Vec2> b{{0, 0}, {0, 0}, {1, 0}};
  std::vector<Vec2> c{{0, 0}};
  std::vector<Vec2> d{{3, 4}};
  bool ok = dtw_distance(a, a) == 0.0 && dtw_distance(a, b) == 0.0 &&
            dtw_distance(b, a) == dtw_distance(a, b) && dtw_distance(c, d) == 5.0;
  Rng rng(8);
  for (int i = 0; i < 500 && ok; ++i) {
    std::vector<Vec2> p(1 + rng.uniform_int(8)), q(1 + rng.uniform_int(8));
    for (auto& v : p) v = {rng.uniform(0, 5), rng.uniform(0, 5)};
    for (auto& v : q) v = {rng.uniform(0, 5), rng.uniform(0, 5)};
    if (dtw_distance(p, p) != 0.0) ok = false;
    if (std::abs(dtw_distance(p, q) - dtw_distance(q, p)) > 1e-12) ok = false;
    if (dtw_distance(p, q) < 0) ok = false;
  }
  report("AC-8", ok, "identity, symmetry, single-pair Euclidean, repetition case exact");
}

static void ac_9(const std::string& tasks_dir) {
  Scene s = load_scene_file(tasks_dir + "/four_blocks.json");
  PathQuery q;
  q.mover = Mover::object_as_agent(s.goal_index);
  q.start = s.objects[s.goal_index].start;
  q.goal = s.goal_pos;
  q.frozen = s.initial_configuration();
  q.clearance = 0.02;
  auto candidates = generate_subsets(s, q, 4, 0, 20000);
  int blocking = s.index_of("obj4");
  int moved = s.index_of("obj1");
  const SubsetCandidate* node = nullptr;
  for (const auto& c : candidates) {
    if (c.o_set == std::vector<int>{blocking}) node = &c;
  }
  if (!node) {
    report("AC-9", false, "no singleton candidate for the blocking object");
    return;
  }
  Configuration before = s.initial_configuration();
  Configuration after = before;
  after.object_pos[moved] = {1.5, 8.5};
  double sx_before = config_score(before, s, node->o_set, node->witness, s.agent_start);
  double sx_after = config_score(after, s, node->o_set, node->witness, s.agent_start);
  std::ostringstream d;
  d << "S_x " << sx_before << " -> " << sx_after << " after relocating the crowding block";
  report("AC-9", sx_after > sx_before, d.str());
}

static void ac_11() {
  // Open space: every hop feasible; the adaptive selector issues one call,
  // the use-every-waypoint baseline issues one per waypoint.
  Scene s;
  s.bounds = {{0, 0}, {10, 10}};
  s.agent_radius = 0.3;
  s.agent_start = {1, 5};
  s.goal_tol = 0.15;
  s.objects = {{"box", 0.6, {2, 5}}};
  s.goal_index = 0;
  s.goal_pos = {8, 5};
  Path aux;
  for (int i = 0; i <= 12; ++i) aux.waypoints.push_back({2.0 + 0.5 * i, 5.0});
  aux.resolution = 0.5;

  auto make_hop = [](const Scene& scene, const Path& path) {
    auto state = std::make_shared<Configuration>(scene.initial_configuration());
    Vec2 start = path.waypoints.front();
    state->agent_pos = start - Vec2{0.6, 0};
    state->object_pos[0] = start;
    state->attachment = Attachment{0, Vec2{0.6, 0}};
    auto wps = path.waypoints;
    return [state, wps, &scene](int index) {
      auto hop = solve_transport_hop(*state, scene, wps[index], false);
      if (!hop) return false;
      *state = hop->back();
      return true;
    };
  };
  int adaptive_calls = 0;
  {
    auto hop = make_hop(s, aux);
    auto res = adaptive_place(static_cast<int>(aux.waypoints.size()), [&](int i) {
      ++adaptive_calls;
      return hop(i);
    }, 2);
    if (!res) {
      report("AC-11", false, "adaptive selector failed on the open scene");
      return;
    }
  }
  int baseline_calls = 0;
  {
    auto hop = make_hop(s, aux);
    bool ok = true;
    for (int i = 1; i < static_cast<int>(aux.waypoints.size()); ++i) {
      ++baseline_calls;
      if (!hop(i)) ok = false;
    }
    if (!ok) {
      report("AC-11", false, "baseline failed on the open scene");
      return;
    }
  }

  // Narrow gate off the straight start-goal line: long hops that span the
  // gate must bend around a wall lip and fail, so accepted hops land closer
  // together inside the gate band than in the open legs.
  Scene c = s;
  c.objects[0].start = {2.0, 2.0};
  c.goal_pos = {8.0, 2.0};
  c.walls.push_back({{4.7, 0.0}, {5.3, 6.8}});
  c.walls.push_back({{4.7, 8.4}, {5.3, 10.0}});
  Path corridor;
  std::vector<Vec2> knots{{2.0, 2.0}, {4.0, 7.6}, {6.0, 7.6}, {8.0, 2.0}};
  for (size_t k = 0; k + 1 < knots.size(); ++k) {
    Vec2 a = knots[k], b = knots[k + 1];
    int steps = std::max(1, static_cast<int>(std::ceil(distance(a, b) / 0.4)));
    for (int i = (k == 0 ? 0 : 1); i <= steps; ++i) {
      corridor.waypoints.push_back(a + (b - a) * (static_cast<double>(i) / steps));
    }
  }
  corridor.resolution = 0.4;
  auto hop2 = make_hop(c, corridor);
  auto res2 = adaptive_place(static_cast<int>(corridor.waypoints.size()), hop2, 2);
  std::ostringstream d;
  d << "adaptive " << adaptive_calls << " calls vs baseline " << baseline_calls;
  bool fewer = adaptive_calls < baseline_calls;
  bool spacing_ok = true;
  if (res2 && res2->size() >= 2) {
    std::vector<double> in_gap, out_gap;
    double prev = 0;
    std::vector<int> acc{0};
    for (int i : *res2) acc.push_back(i);
    for (size_t i = 1; i < acc.size(); ++i) {
      Vec2 mid = (corridor.waypoints[acc[i]] + corridor.waypoints[acc[i - 1]]) * 0.5;
      double gap = static_cast<double>(acc[i] - acc[i - 1]);
      bool inside = mid.x > 4.2 && mid.x < 5.8;
      (inside ? in_gap : out_gap).push_back(gap);
      prev = gap;
    }
    (void)prev;
    auto mean = [](const std::vector<double>& v) {
      double s = 0;
      for (double x : v) s += x;
      return v.empty() ? 0.0 : s / v.size();
    };
    if (in_gap.empty() || out_gap.empty() || mean(in_gap) >= mean(out_gap)) spacing_ok = false;
    d << "; corridor hop spacing " << mean(in_gap) << " in vs " << mean(out_gap) << " out";
  } else {
    spacing_ok = false;
    d << "; corridor placement failed";
  }
  report("AC-11", fewer && spacing_ok, d.str());
}

int main(int argc, char** argv) {
  std::string tasks_dir = argc > 1 ? argv[1] : "tasks";
  // Optional filter: "fast" skips the solve grid, "grid" runs only the grid.
  std::string mode = argc > 2 ? argv[2] : "all";
  if (mode != "grid") {
    ac_3();
    ac_4();
    ac_8();
    ac_7();
    ac_5();
    ac_9(tasks_dir);
    ac_11();
  }
  if (mode != "fast") ac_1_2_6_10(tasks_dir);
  std::printf("%s\n", g_failures == 0 ? "ALL ACCEPTANCE CRITERIA PASS"
                                      : "ACCEPTANCE FAILURES PRESENT");
  return g_failures == 0 ? 0 : 1;
}
