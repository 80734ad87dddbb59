#include "segman/subgoal.hpp"

#include <stdexcept>

namespace segman {

SelectorState selector_init(int n_waypoints, int theta) {
  if (n_waypoints < 2) throw std::invalid_argument("selector_init: need at least 2 waypoints");
  if (theta < 1) throw std::invalid_argument("selector_init: theta must be >= 1");
  SelectorState s;
  s.step_max = n_waypoints - 1;
  s.p_i = s.step_max;
  s.step_i = s.step_max;
  s.p_prev = 0;
  s.beta = 0;
  s.theta = theta;
  return s;
}

std::pair<SelectorState, Verdict> selector_step(const SelectorState& state, bool feasible) {
  SelectorState s = state;
  if (feasible) {
    s.beta += 1;
    s.p_prev = s.p_i;
    if (s.p_prev == s.step_max) return {s, Verdict::Done};
    if (s.beta >= s.theta) s.step_i = std::min(s.step_i * 2, s.step_max);
    s.p_i = std::min(s.p_i + s.step_i, s.step_max);
    return {s, Verdict::Continue};
  }
  s.beta = 0;
  if (s.step_i == 1) return {s, Verdict::Exhausted};
  s.step_i = std::max(1, s.step_i / 2);
  s.p_i = std::min(s.p_prev + s.step_i, s.step_max);
  return {s, Verdict::Continue};
}

std::optional<std::vector<int>> adaptive_place(int n_waypoints, const HopSolver& solver, int theta,
                                               const SelectorTrace& trace) {
  SelectorState s = selector_init(n_waypoints, theta);
  std::vector<int> accepted;
  // Termination: every failure halves step_i or exhausts; every success
  // strictly advances p_prev.
  while (true) {
    bool feasible = solver(s.p_i);
    auto [next, verdict] = selector_step(s, feasible);
    if (trace) trace(s, feasible, verdict);
    if (feasible) accepted.push_back(s.p_i);
    s = next;
    if (verdict == Verdict::Done) return accepted;
    if (verdict == Verdict::Exhausted) return std::nullopt;
  }
}

RefinementOutcome place_with_refinement(const Path& aux_path, const HopSolverFactory& make_solver,
                                        int theta, int max_refinements, int max_retries,
                                        const PathRegenerator& regen) {
  RefinementOutcome out;
  Path base = aux_path;
  for (int retry = 0; retry <= max_retries; ++retry) {
    if (retry > 0) {
      if (!regen) break;
      auto fresh = regen(retry);
      if (!fresh) continue;
      base = *fresh;
    }
    Path path = base;
    for (int refine = 0; refine <= max_refinements; ++refine) {
      if (refine > 0) path = resample_path(path, path.resolution / 2);
      if (path.waypoints.size() < 2) continue;
      HopSolver solver = make_solver(path);
      auto accepted = adaptive_place(static_cast<int>(path.waypoints.size()), solver, theta);
      if (accepted) {
        out.success = true;
        out.refinements_used = refine;
        out.retries_used = retry;
        out.accepted = *accepted;
        out.final_path = path;
        return out;
      }
    }
  }
  out.success = false;
  out.refinements_used = max_refinements;
  out.retries_used = max_retries;
  return out;
}

}  // namespace segman
