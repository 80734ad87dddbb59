#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "segman/rrt.hpp"
#include "segman/trajopt.hpp"

namespace segman {

struct SubsetCandidate {
  std::vector<int> o_set;          // object indices, sorted
  Path witness;                    // path existing once o_set is removed
  std::vector<Vec2> segment;       // witness clipped to the clustering region
  int cluster = -1;
};

struct Cluster {
  int id = 0;
  std::vector<int> members;  // candidate indices
};

// Tri-colored grid around one object. 0 = red (occupied), 1 = green (free),
// 2 = blue (witness path / initial positions). Blue wins over red.
struct LocalOccupancyGrid {
  Vec2 origin;      // lower-left corner
  double cell = 0;  // cell side
  int W = 0;
  std::vector<uint8_t> cells;  // row-major, W*W
  uint8_t at(int ix, int iy) const { return cells[iy * W + ix]; }
  Vec2 cell_center(int ix, int iy) const {
    return {origin.x + (ix + 0.5) * cell, origin.y + (iy + 0.5) * cell};
  }
};

enum class LogAnchor { Initial, Current };

struct SearchNode {
  Configuration config;
  int candidate = -1;  // index into the candidate list (fixes o_set and tree)
  int visits = 1;
  int depth = 0;
  int parent = -1;
  double s_r = 0;  // reachability score, r + 1
  double s_x = 0;  // configuration score in [0, 1]
  long creation_index = 0;
  std::vector<int> reachable;           // reachable members of o_set
  std::vector<PlanSegment> incoming;    // pick+place that created this node
};

struct SearchParams {
  double alpha = 1.0;
  double gamma = 0.95;
  int y = 3;
  int depth_threshold = 5;
  int k_subgoals = 8;
  int node_budget = 500;
  int max_subset_size = 4;
  double tau = -1;  // DTW threshold; < 0 means 2 * agent_radius
  int rrt_budget = 8000;
  int reach_budget = 4000;
  uint64_t seed = 0;
  TrajoptParams trajopt;
  std::function<bool()> should_abort;  // wall-clock budget hook
};

struct SearchResult {
  bool success = false;
  std::vector<PlanSegment> relocations;  // concatenated pick/place pairs
  Configuration config;                  // configuration after relocations
  std::vector<int> solved_subset;        // o_set of the solving node
  int nodes_expanded = 0;
};

// Subset generation with preliminary elimination: keeps exactly the subsets of
// movable objects (excluding the blocked query's mover/goal object) whose
// removal makes the query feasible.
std::vector<SubsetCandidate> generate_subsets(const Scene& scene, const PathQuery& blocked_query,
                                              int max_size, uint64_t seed, int rrt_budget = 8000);

double dtw_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

std::vector<Cluster> cluster_subsets(std::vector<SubsetCandidate>& candidates, const Scene& scene,
                                     double tau);

double subset_priority(const SubsetCandidate& candidate, const std::vector<Cluster>& clusters);

LocalOccupancyGrid build_log(const Configuration& config, const Scene& scene, int object,
                             const std::vector<int>& o_set, const Path& witness,
                             LogAnchor anchor, Vec2 agent_init);

double config_score(const Configuration& config, const Scene& scene, const std::vector<int>& o_set,
                    const Path& witness, Vec2 agent_init);

// r + 1, where r counts objects in o_set that can be grasped and reached.
double reachability_score(const Configuration& config, const Scene& scene,
                          const std::vector<int>& o_set, uint64_t seed, const SearchParams& params,
                          std::vector<int>* reachable = nullptr);

double score_node(int visits, double s_r, double s_x, double cluster_ratio, int subset_size,
                  double alpha, double gamma);

// Full forward search. blocked_query must be infeasible at start_config.
SearchResult run_search(const Scene& scene, const Configuration& start_config,
                        const PathQuery& blocked_query, const SearchParams& params);

}  // namespace segman
