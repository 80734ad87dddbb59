#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "segman/pipeline.hpp"
#include "segman/svg.hpp"

namespace fs = std::filesystem;
using namespace segman;

namespace {

int log_level() {
  const char* env = std::getenv("SEGMAN_LOG");
  if (!env) return 0;
  std::string v = env;
  if (v == "info") return 1;
  if (v == "trace") return 2;
  return 0;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SolverParams load_params(const std::string& path) {
  SolverParams p;
  auto j = nlohmann::json::parse(read_file(path));
  p.theta = j.value("theta", p.theta);
  p.grasp_trials = j.value("grasp_trials", p.grasp_trials);
  p.max_refinements = j.value("max_refinements", p.max_refinements);
  p.max_retries = j.value("max_retries", p.max_retries);
  p.alpha = j.value("alpha", p.alpha);
  p.gamma = j.value("gamma", p.gamma);
  p.y = j.value("y", p.y);
  p.depth_threshold = j.value("depth_threshold", p.depth_threshold);
  p.k_subgoals = j.value("k_subgoals", p.k_subgoals);
  p.node_budget = j.value("node_budget", p.node_budget);
  p.max_subset_size = j.value("max_subset_size", p.max_subset_size);
  p.tau = j.value("tau", p.tau);
  p.clearance = j.value("clearance", p.clearance);
  p.vmax = j.value("vmax", p.vmax);
  p.dt = j.value("dt", p.dt);
  p.rrt_budget = j.value("rrt_budget", p.rrt_budget);
  p.outer_cycles = j.value("outer_cycles", p.outer_cycles);
  return p;
}

struct BenchRow {
  std::string task;
  double mean_s = 0, std_s = 0, solved_pct = 0, mean_pnp = 0;
  int seeds = 0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"segman: sequential pick-and-place puzzle planner"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "plan one task");
  std::string scene_path, params_path, out_path, svg_path;
  uint64_t seed = 0;
  double time_budget = 1000.0;
  bool trace = false;
  solve_cmd->add_option("scene", scene_path, "scene JSON file")->required();
  solve_cmd->add_option("--seed", seed, "planner seed");
  solve_cmd->add_option("--time-budget", time_budget, "abort budget in seconds");
  solve_cmd->add_option("--params", params_path, "solver parameter JSON");
  solve_cmd->add_option("--out", out_path, "write solution JSON here");
  solve_cmd->add_option("--svg", svg_path, "write trajectory SVG here");
  solve_cmd->add_flag("--trace", trace, "print planner stats to stderr");

  // validate
  auto* val_cmd = app.add_subcommand("validate", "replay a plan through the validator");
  std::string vscene, vplan;
  val_cmd->add_option("scene", vscene, "scene JSON file")->required();
  val_cmd->add_option("plan", vplan, "plan/solution JSON file")->required();

  // render
  auto* render_cmd = app.add_subcommand("render", "render scene + plan to SVG");
  std::string rscene, rplan, rout = "out.svg";
  render_cmd->add_option("scene", rscene, "scene JSON file")->required();
  render_cmd->add_option("plan", rplan, "plan/solution JSON file (optional)");
  render_cmd->add_option("--out", rout, "output SVG path");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run the benchmark protocol over a task directory");
  std::string tasks_dir, report_path;
  int n_seeds = 10;
  double bench_budget = 1000.0;
  int jobs = 0;
  bench_cmd->add_option("--tasks", tasks_dir, "directory of scene files")->required();
  bench_cmd->add_option("--seeds", n_seeds, "seeds per task (0..N-1)");
  bench_cmd->add_option("--time-budget", bench_budget, "per-run abort budget in seconds");
  bench_cmd->add_option("--out", report_path, "write report JSON here");
  bench_cmd->add_option("--jobs", jobs, "parallel workers (0 = hardware)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) {
      Scene scene = load_scene_file(scene_path);
      SolverParams params = params_path.empty() ? SolverParams{} : load_params(params_path);
      params.seed = seed;
      params.time_budget = time_budget;
      Solution sol = solve_task(scene, params);
      std::string js = solution_to_json(scene, sol);
      if (!out_path.empty()) write_file(out_path, js);
      if (!svg_path.empty()) write_file(svg_path, render_svg(scene, sol.plan));
      if (trace || log_level() >= 1) {
        std::cerr << "task=" << scene.name << " seed=" << seed << " success=" << sol.stats.success
                  << " wall_time_s=" << sol.stats.wall_time_s << " pnp=" << sol.stats.pnp_count
                  << " nodes=" << sol.stats.nodes_expanded;
        if (!sol.stats.failure_reason.empty()) std::cerr << " reason=" << sol.stats.failure_reason;
        std::cerr << "\n";
      }
      std::cout << (sol.stats.success ? "SOLVED" : "FAILED") << " pnp=" << sol.stats.pnp_count
                << " time=" << sol.stats.wall_time_s << "s\n";
      return sol.stats.success ? 0 : 2;
    }

    if (*val_cmd) {
      Scene scene = load_scene_file(vscene);
      auto j = nlohmann::json::parse(read_file(vplan));
      std::string plan_text = j.contains("plan") ? j["plan"].dump() : j.dump();
      Plan plan = load_plan(scene, plan_text);
      ValidationReport rep = validate_plan(scene, plan);
      std::cout << rep.to_json();
      return rep.valid ? 0 : 2;
    }

    if (*render_cmd) {
      Scene scene = load_scene_file(rscene);
      Plan plan;
      if (!rplan.empty()) {
        auto j = nlohmann::json::parse(read_file(rplan));
        std::string plan_text = j.contains("plan") ? j["plan"].dump() : j.dump();
        plan = load_plan(scene, plan_text);
      }
      write_file(rout, render_svg(scene, plan));
      return 0;
    }

    if (*bench_cmd) {
      std::vector<std::string> files;
      if (!fs::is_directory(tasks_dir)) {
        std::cerr << "error: not a directory: " << tasks_dir << "\n";
        return 1;
      }
      for (const auto& e : fs::directory_iterator(tasks_dir)) {
        if (e.path().extension() == ".json") files.push_back(e.path().string());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) {
        std::cerr << "error: no scene files in " << tasks_dir << "\n";
        return 1;
      }
      struct Cell {
        std::string task;
        int seed;
        bool success = false;
        double time = 0;
        int pnp = 0;
      };
      std::vector<std::pair<std::string, int>> cells;
      for (const auto& f : files) {
        for (int s = 0; s < n_seeds; ++s) cells.emplace_back(f, s);
      }
      int workers = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
      workers = std::max(1, workers);
      std::vector<Cell> results(cells.size());
      std::atomic<size_t> next{0};
      auto worker = [&]() {
        while (true) {
          size_t i = next.fetch_add(1);
          if (i >= cells.size()) break;
          Scene scene = load_scene_file(cells[i].first);
          SolverParams p;
          p.seed = static_cast<uint64_t>(cells[i].second);
          p.time_budget = bench_budget;
          Solution sol = solve_task(scene, p);
          results[i] = {scene.name.empty() ? fs::path(cells[i].first).stem().string() : scene.name,
                        cells[i].second, sol.stats.success, sol.stats.wall_time_s,
                        sol.stats.pnp_count};
          if (log_level() >= 1) {
            std::cerr << results[i].task << " seed=" << results[i].seed
                      << (results[i].success ? " solved " : " FAILED ") << results[i].time << "s\n";
          }
        }
      };
      std::vector<std::thread> pool;
      for (int wi = 0; wi < workers; ++wi) pool.emplace_back(worker);
      for (auto& t : pool) t.join();

      std::vector<BenchRow> rows;
      for (const auto& f : files) {
        std::string task;
        std::vector<const Cell*> runs;
        for (size_t i = 0; i < cells.size(); ++i) {
          if (cells[i].first == f) {
            runs.push_back(&results[i]);
            task = results[i].task;
          }
        }
        BenchRow row;
        row.task = task;
        row.seeds = static_cast<int>(runs.size());
        int solved = 0;
        double sum = 0, sum2 = 0, pnp = 0;
        for (const auto* c : runs) {
          if (c->success) {
            ++solved;
            sum += c->time;
            sum2 += c->time * c->time;
            pnp += c->pnp;
          }
        }
        row.solved_pct = 100.0 * solved / runs.size();
        if (solved > 0) {
          row.mean_s = sum / solved;
          row.std_s = solved > 1 ? std::sqrt(std::max(0.0, sum2 / solved - row.mean_s * row.mean_s))
                                 : 0.0;
          row.mean_pnp = pnp / solved;
        }
        rows.push_back(row);
      }

      std::printf("%-16s %10s %12s %12s %10s\n", "Task Name", "Mean (s)", "Std Dev (s)",
                  "Solved (%)", "PnP Count");
      nlohmann::ordered_json jr = nlohmann::ordered_json::array();
      for (const auto& r : rows) {
        std::printf("%-16s %10.2f %12.2f %12.1f %10.2f\n", r.task.c_str(), r.mean_s, r.std_s,
                    r.solved_pct, r.mean_pnp);
        jr.push_back({{"task", r.task},
                      {"mean_s", r.mean_s},
                      {"std_s", r.std_s},
                      {"solved_pct", r.solved_pct},
                      {"mean_pnp", r.mean_pnp},
                      {"seeds", r.seeds}});
      }
      if (!report_path.empty()) write_file(report_path, jr.dump(2) + "\n");
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
