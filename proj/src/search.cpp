#include "segman/search.hpp"

#include <algorithm>
#include <cmath>

#include "segman/rng.hpp"

namespace segman {

namespace {

void combinations(int n, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> idx(k);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k) {
      out.push_back(idx);
      return;
    }
    for (int i = start; i < n; ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

std::vector<int> candidate_pool(const Scene& scene, const PathQuery& q) {
  std::vector<int> pool;
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    int oi = static_cast<int>(i);
    if (oi == q.mover.object && q.mover.type != Mover::Type::Agent) continue;
    if (std::find(q.removed.begin(), q.removed.end(), oi) != q.removed.end()) continue;
    pool.push_back(oi);
  }
  return pool;
}

}  // namespace

std::vector<SubsetCandidate> generate_subsets(const Scene& scene, const PathQuery& blocked_query,
                                              int max_size, uint64_t seed, int rrt_budget) {
  std::vector<SubsetCandidate> out;
  std::vector<int> pool = candidate_pool(scene, blocked_query);
  int n = static_cast<int>(pool.size());
  max_size = std::min(max_size, n);
  uint64_t sub_index = 0;
  for (int k = 1; k <= max_size; ++k) {
    std::vector<std::vector<int>> combos;
    combinations(n, k, combos);
    for (const auto& c : combos) {
      PathQuery q = blocked_query;
      SubsetCandidate cand;
      for (int i : c) {
        q.removed.push_back(pool[i]);
        cand.o_set.push_back(pool[i]);
      }
      auto path = plan_birrt(q, scene, Rng::derive(seed, 0xc0de + sub_index), rrt_budget);
      ++sub_index;
      if (path) {
        cand.witness = *path;
        out.push_back(std::move(cand));
      }
    }
  }
  return out;
}

double dtw_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  size_t n = a.size(), m = b.size();
  if (n == 0 || m == 0) return 0;
  const double inf = 1e18;
  std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
  prev[0] = 0;
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = inf;
    for (size_t j = 1; j <= m; ++j) {
      double c = distance(a[i - 1], b[j - 1]);
      cur[j] = c + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::vector<Cluster> cluster_subsets(std::vector<SubsetCandidate>& candidates, const Scene& scene,
                                     double tau) {
  // Clustering region: bounding box of movable-object start positions,
  // inflated by the agent radius.
  Rect region;
  bool first = true;
  for (const auto& o : scene.objects) {
    Rect r{o.start, o.start};
    region = first ? r : region.merged(r);
    first = false;
  }
  region = region.inflated(scene.agent_radius);

  for (auto& c : candidates) {
    c.segment.clear();
    for (const auto& wp : c.witness.waypoints) {
      if (region.contains(wp)) c.segment.push_back(wp);
    }
    if (c.segment.empty()) c.segment = c.witness.waypoints;
  }

  std::vector<Cluster> clusters;
  for (size_t i = 0; i < candidates.size(); ++i) {
    bool placed = false;
    for (auto& cl : clusters) {
      const auto& medoid = candidates[cl.members.front()].segment;
      if (dtw_distance(candidates[i].segment, medoid) <= tau) {
        cl.members.push_back(static_cast<int>(i));
        candidates[i].cluster = cl.id;
        placed = true;
        break;
      }
    }
    if (!placed) {
      Cluster cl;
      cl.id = static_cast<int>(clusters.size());
      cl.members = {static_cast<int>(i)};
      candidates[i].cluster = cl.id;
      clusters.push_back(std::move(cl));
    }
  }
  return clusters;
}

namespace {

double cluster_ratio(int cluster, const std::vector<Cluster>& clusters) {
  size_t max_size = 1;
  for (const auto& c : clusters) max_size = std::max(max_size, c.members.size());
  if (cluster < 0 || cluster >= static_cast<int>(clusters.size())) return 1.0;
  return static_cast<double>(clusters[cluster].members.size()) / static_cast<double>(max_size);
}

}  // namespace

double subset_priority(const SubsetCandidate& candidate, const std::vector<Cluster>& clusters) {
  return (1.0 / static_cast<double>(candidate.o_set.size())) *
         cluster_ratio(candidate.cluster, clusters);
}

LocalOccupancyGrid build_log(const Configuration& config, const Scene& scene, int object,
                             const std::vector<int>& o_set, const Path& witness, LogAnchor anchor,
                             Vec2 agent_init) {
  const double side = scene.objects[object].side;
  LocalOccupancyGrid g;
  g.W = 16;
  g.cell = side / 4.0;
  Vec2 center = anchor == LogAnchor::Initial ? scene.objects[object].start
                                             : config.object_pos[object];
  g.origin = center - Vec2{2 * side, 2 * side};
  g.cells.assign(g.W * g.W, 1);

  const double eps = 1e-9;
  for (int iy = 0; iy < g.W; ++iy) {
    for (int ix = 0; ix < g.W; ++ix) {
      Rect cellr{{g.origin.x + ix * g.cell, g.origin.y + iy * g.cell},
                 {g.origin.x + (ix + 1) * g.cell, g.origin.y + (iy + 1) * g.cell}};
      Shape cells = Shape::rect(cellr);
      // Blue: witness path swept by the agent disc, o_set start footprints,
      // agent start footprint. Blue takes precedence over red.
      bool blue = false;
      for (size_t i = 0; i + 1 < witness.waypoints.size() && !blue; ++i) {
        if (segment_rect_distance(witness.waypoints[i], witness.waypoints[i + 1], cellr) <
            scene.agent_radius) {
          blue = true;
        }
      }
      for (int o : o_set) {
        if (blue) break;
        if (signed_distance(cells, Shape::square(scene.objects[o].start, scene.objects[o].side)) <
            -eps) {
          blue = true;
        }
      }
      if (!blue && signed_distance(cells, Shape::disc(agent_init, scene.agent_radius)) < -eps) {
        blue = true;
      }
      if (blue) {
        g.cells[iy * g.W + ix] = 2;
        continue;
      }
      bool red = false;
      for (const auto& w : scene.walls) {
        if (signed_distance(cells, Shape::rect(w)) < -eps) {
          red = true;
          break;
        }
      }
      if (!red) {
        for (const auto& b : scene.boundary_walls()) {
          if (signed_distance(cells, Shape::rect(b)) < -eps) {
            red = true;
            break;
          }
        }
      }
      if (!red) {
        for (size_t i = 0; i < scene.objects.size(); ++i) {
          if (signed_distance(cells, scene.object_shape(static_cast<int>(i),
                                                        config.object_pos[i])) < -eps) {
            red = true;
            break;
          }
        }
      }
      if (red) g.cells[iy * g.W + ix] = 0;
    }
  }
  return g;
}

double config_score(const Configuration& config, const Scene& scene, const std::vector<int>& o_set,
                    const Path& witness, Vec2 agent_init) {
  if (o_set.empty()) return 0;
  double sum = 0;
  for (int o : o_set) {
    auto g = build_log(config, scene, o, o_set, witness, LogAnchor::Initial, agent_init);
    int green = 0, blue = 0;
    for (uint8_t c : g.cells) {
      if (c == 1) ++green;
      if (c == 2) ++blue;
    }
    sum += static_cast<double>(green + 2 * blue) / (2.0 * g.W * g.W);
  }
  return sum / static_cast<double>(o_set.size());
}

double reachability_score(const Configuration& config, const Scene& scene,
                          const std::vector<int>& o_set, uint64_t seed, const SearchParams& params,
                          std::vector<int>* reachable) {
  int r = 0;
  if (reachable) reachable->clear();
  for (int o : o_set) {
    // Different seeds sample different contact faces; a far-side grasp must
    // not mark the object unreachable when a near-side one exists.
    for (int trial = 0; trial < params.trajopt.grasp_samples; ++trial) {
      uint64_t tseed = Rng::derive(seed, 0x5ea + 17 * o + trial);
      auto grasp = solve_grasp(config, scene, o, tseed, params.trajopt);
      if (!grasp) continue;
      PathQuery q;
      q.mover = Mover::agent();
      q.start = config.agent_pos;
      q.goal = grasp->agent_pos;
      q.frozen = config;
      q.clearance = params.trajopt.clearance;
      q.touch_object = o;
      if (path_exists(q, scene, Rng::derive(tseed, 0x7ea + o), params.reach_budget)) {
        ++r;
        if (reachable) reachable->push_back(o);
        break;
      }
    }
  }
  return r + 1.0;
}

double score_node(int visits, double s_r, double s_x, double cluster_ratio, int subset_size,
                  double alpha, double gamma) {
  double exploit = (1.0 / subset_size) * s_r * s_x;
  return alpha * std::sqrt(1.0 / visits) +
         std::pow(gamma, visits) * cluster_ratio * exploit * exploit;
}

SearchResult run_search(const Scene& scene, const Configuration& start_config,
                        const PathQuery& blocked_query, const SearchParams& params) {
  SearchResult out;
  if (params.node_budget <= 0) return out;

  auto candidates = generate_subsets(scene, blocked_query, params.max_subset_size, params.seed,
                                     params.rrt_budget);
  if (candidates.empty()) return out;
  double tau = params.tau < 0 ? 2.0 * scene.agent_radius : params.tau;
  auto clusters = cluster_subsets(candidates, scene, tau);

  // Tree-planting order: descending subset priority (soft threshold), ties by
  // smaller subsets then lexicographic ids.
  std::vector<int> order(candidates.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double pa = subset_priority(candidates[a], clusters);
    double pb = subset_priority(candidates[b], clusters);
    if (pa != pb) return pa > pb;
    if (candidates[a].o_set.size() != candidates[b].o_set.size())
      return candidates[a].o_set.size() < candidates[b].o_set.size();
    return candidates[a].o_set < candidates[b].o_set;
  });

  std::vector<SearchNode> nodes;
  long creation = 0;
  size_t planted = 0;
  Vec2 agent_init = start_config.agent_pos;

  auto plant_batch = [&]() {
    for (int i = 0; i < params.y && planted < order.size(); ++i, ++planted) {
      int ci = order[planted];
      SearchNode root;
      root.config = start_config;
      root.candidate = ci;
      root.creation_index = creation++;
      root.s_r = reachability_score(start_config, scene, candidates[ci].o_set,
                                    Rng::derive(params.seed, 0xaa + root.creation_index), params,
                                    &root.reachable);
      root.s_x = config_score(start_config, scene, candidates[ci].o_set, candidates[ci].witness,
                              agent_init);
      nodes.push_back(std::move(root));
    }
  };
  plant_batch();

  int expansions = 0;
  while (expansions < params.node_budget) {
    if (params.should_abort && params.should_abort()) break;
    // Select the highest-scoring expandable node in the forest.
    int best = -1;
    double best_score = -1e18;
    for (size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].reachable.empty()) continue;
      double s = score_node(nodes[i].visits, nodes[i].s_r, nodes[i].s_x,
                            cluster_ratio(candidates[nodes[i].candidate].cluster, clusters),
                            static_cast<int>(candidates[nodes[i].candidate].o_set.size()),
                            params.alpha, params.gamma);
      if (s > best_score + 1e-15 ||
          (std::abs(s - best_score) <= 1e-15 && best >= 0 &&
           nodes[i].creation_index < nodes[best].creation_index)) {
        best_score = s;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) {
      if (planted < order.size()) {
        plant_batch();
        continue;
      }
      break;
    }

    SearchNode& node = nodes[best];
    const SubsetCandidate& cand = candidates[node.candidate];
    ++expansions;
    out.nodes_expanded = expansions;
    node.visits += 1;

    // Node generation: sampled green-cell subgoals, soft pick-and-place.
    struct Child {
      SearchNode n;
      double score;
    };
    std::vector<Child> children;
    for (int o : node.reachable) {
      auto log = build_log(node.config, scene, o, cand.o_set, cand.witness, LogAnchor::Current,
                           agent_init);
      std::vector<Vec2> greens;
      for (int iy = 0; iy < log.W; ++iy) {
        for (int ix = 0; ix < log.W; ++ix) {
          if (log.at(ix, iy) == 1) greens.push_back(log.cell_center(ix, iy));
        }
      }
      Rng rng(Rng::derive(params.seed, 0x9e0 + 31 * node.creation_index + o));
      for (size_t i = greens.size(); i > 1; --i) {
        std::swap(greens[i - 1], greens[rng.uniform_int(static_cast<int>(i))]);
      }
      int tried = 0;
      for (const auto& target : greens) {
        if (tried >= params.k_subgoals) break;
        ++tried;
        if (params.should_abort && params.should_abort()) break;
        uint64_t seed = Rng::derive(params.seed, 0x3c0 + 131 * node.creation_index + 7 * o + tried);
        auto pp = solve_pick_place(node.config, scene, o, target, true, seed, params.trajopt);
        if (!pp) continue;
        Child ch;
        ch.n.config = pp->end;
        ch.n.candidate = node.candidate;
        ch.n.depth = node.depth + 1;
        ch.n.parent = best;
        ch.n.creation_index = creation++;
        ch.n.incoming = {pp->pick, pp->place};
        ch.n.s_r = reachability_score(ch.n.config, scene, cand.o_set,
                                      Rng::derive(params.seed, 0xbb + ch.n.creation_index), params,
                                      &ch.n.reachable);
        ch.n.s_x = config_score(ch.n.config, scene, cand.o_set, cand.witness, agent_init);
        ch.score = score_node(1, ch.n.s_r, ch.n.s_x, cluster_ratio(cand.cluster, clusters),
                              static_cast<int>(cand.o_set.size()), params.alpha, params.gamma);
        children.push_back(std::move(ch));
      }
    }
    std::sort(children.begin(), children.end(), [](const Child& a, const Child& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.n.creation_index < b.n.creation_index;
    });
    size_t keep = children.empty() ? 0 : std::max<size_t>(1, (children.size() + 1) / 2);
    int max_child_depth = 0;
    std::vector<int> kept_indices;
    for (size_t i = 0; i < keep; ++i) {
      max_child_depth = std::max(max_child_depth, children[i].n.depth);
      nodes.push_back(std::move(children[i].n));
      kept_indices.push_back(static_cast<int>(nodes.size()) - 1);
    }

    // Termination test: does the blocked route open up in any child config?
    for (int ci : kept_indices) {
      PathQuery q = blocked_query;
      q.frozen = nodes[ci].config;
      if (q.mover.type == Mover::Type::Agent) {
        q.start = nodes[ci].config.agent_pos;
      } else {
        q.start = nodes[ci].config.object_pos[q.mover.object];
      }
      if (path_exists(q, scene, Rng::derive(params.seed, 0xfe + nodes[ci].creation_index),
                      params.rrt_budget)) {
        out.success = true;
        out.config = nodes[ci].config;
        out.solved_subset = candidates[nodes[ci].candidate].o_set;
        std::vector<int> chain;
        for (int i = ci; i >= 0; i = nodes[i].parent) chain.push_back(i);
        std::reverse(chain.begin(), chain.end());
        for (int i : chain) {
          for (const auto& seg : nodes[i].incoming) out.relocations.push_back(seg);
        }
        return out;
      }
    }

    if (max_child_depth >= params.depth_threshold && planted < order.size()) plant_batch();
  }
  return out;
}

}  // namespace segman
