#include "segman/trajopt.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "segman/rng.hpp"

namespace segman {

ResidualValue eval_residual(const Residual& r, const TrajectoryProblem& p,
                            const std::vector<Vec2>& traj) {
  ResidualValue out;
  auto body_at = [&](int t) { return p.body_pos(r.body, traj[t]); };
  switch (r.kind) {
    case ResidualKind::Smoothness: {
      // k=2: acceleration residual at t.
      Vec2 a = (traj[r.t - 1] - traj[r.t] * 2.0 + traj[r.t + 1]) * r.weight;
      out.set({a.x, a.y});
      out.add_jac(0, r.t - 1, {r.weight, 0});
      out.add_jac(0, r.t, {-2 * r.weight, 0});
      out.add_jac(0, r.t + 1, {r.weight, 0});
      out.add_jac(1, r.t - 1, {0, r.weight});
      out.add_jac(1, r.t, {0, -2 * r.weight});
      out.add_jac(1, r.t + 1, {0, r.weight});
      break;
    }
    case ResidualKind::Stable: {
      Vec2 d = body_at(r.t) - r.target;
      out.set({d.x, d.y});
      out.add_jac(0, r.t, {1, 0});
      out.add_jac(1, r.t, {0, 1});
      break;
    }
    case ResidualKind::Touch: {
      Shape agent = Shape::disc(traj[r.t], p.agent_radius);
      out.set({signed_distance(agent, r.obstacle)});
      out.add_jac(0, r.t, signed_distance_grad(agent, r.obstacle));
      break;
    }
    case ResidualKind::PositionDiff: {
      Vec2 d = r.t2 >= 0 ? body_at(r.t) - body_at(r.t2) : body_at(r.t) - r.target;
      if (r.mode == ResidualMode::Cost) {
        out.set({r.weight * d.x, r.weight * d.y});
        out.add_jac(0, r.t, {r.weight, 0});
        out.add_jac(1, r.t, {0, r.weight});
        if (r.t2 >= 0) {
          out.add_jac(0, r.t2, {-r.weight, 0});
          out.add_jac(1, r.t2, {0, -r.weight});
        }
      } else {
        double n = d.norm();
        out.set({n - r.bound});
        Vec2 u = n > 1e-12 ? d / n : Vec2{0, 0};
        out.add_jac(0, r.t, u);
        if (r.t2 >= 0) out.add_jac(0, r.t2, u * -1.0);
      }
      break;
    }
    case ResidualKind::StableOn: {
      Vec2 pos = body_at(r.t);
      out.set({r.region.lo.x - pos.x, pos.x - r.region.hi.x, r.region.lo.y - pos.y,
               pos.y - r.region.hi.y});
      out.add_jac(0, r.t, {-1, 0});
      out.add_jac(1, r.t, {1, 0});
      out.add_jac(2, r.t, {0, -1});
      out.add_jac(3, r.t, {0, 1});
      break;
    }
    case ResidualKind::Collision: {
      Shape body = r.body == BodyRef::Agent
                       ? Shape::disc(traj[r.t], p.agent_radius)
                       : Shape::square(traj[r.t] + *p.carried_offset, p.carried_side);
      out.set({r.margin - signed_distance(body, r.obstacle)});
      out.add_jac(0, r.t, signed_distance_grad(body, r.obstacle) * -1.0);
      break;
    }
  }
  return out;
}

ResidualEval residuals(const std::vector<Vec2>& traj, const TrajectoryProblem& p) {
  ResidualEval e;
  for (const auto& r : p.costs) {
    auto rv = eval_residual(r, p, traj);
    for (int i = 0; i < rv.nv; ++i) {
      e.values.push_back(rv.v[i]);
      e.cost += rv.v[i] * rv.v[i];
    }
  }
  for (const auto& r : p.eq) {
    auto rv = eval_residual(r, p, traj);
    for (int i = 0; i < rv.nv; ++i) {
      e.values.push_back(rv.v[i]);
      e.max_eq_residual = std::max(e.max_eq_residual, std::abs(rv.v[i]));
    }
  }
  for (const auto& r : p.ineq) {
    auto rv = eval_residual(r, p, traj);
    for (int i = 0; i < rv.nv; ++i) {
      double hinged = std::max(0.0, rv.v[i]);
      e.values.push_back(hinged);
      e.max_ineq_violation = std::max(e.max_ineq_violation, hinged);
    }
  }
  return e;
}

namespace {

struct Flat {
  std::vector<double> eq_vals, ineq_vals;
};

constexpr double kTol = 1e-4;

}  // namespace

SolveResult solve(const TrajectoryProblem& p, const std::vector<Vec2>& init) {
  const int n = 2 * (p.T + 1);
  SolveResult res;
  res.trajectory = init;
  if (static_cast<int>(init.size()) != p.T + 1) return res;

  // Count constraint components once.
  auto count_components = [&](const std::vector<Residual>& rs) {
    size_t c = 0;
    for (const auto& r : rs) c += eval_residual(r, p, init).nv;
    return c;
  };
  std::vector<double> lam_eq(count_components(p.eq), 0.0);
  std::vector<double> lam_ineq(count_components(p.ineq), 0.0);
  double mu = 1.0;

  std::vector<Vec2> z = init;

  auto objective = [&](const std::vector<Vec2>& traj, Flat* flat) {
    double F = 0;
    for (const auto& r : p.costs) {
      auto rv = eval_residual(r, p, traj);
      for (int i = 0; i < rv.nv; ++i) F += rv.v[i] * rv.v[i];
    }
    size_t k = 0;
    if (flat) flat->eq_vals.clear();
    for (const auto& r : p.eq) {
      auto rv = eval_residual(r, p, traj);
      for (int i = 0; i < rv.nv; ++i) {
        double h = rv.v[i];
        F += lam_eq[k] * h + 0.5 * mu * h * h;
        if (flat) flat->eq_vals.push_back(h);
        ++k;
      }
    }
    k = 0;
    if (flat) flat->ineq_vals.clear();
    for (const auto& r : p.ineq) {
      auto rv = eval_residual(r, p, traj);
      for (int i = 0; i < rv.nv; ++i) {
        double g = rv.v[i];
        double a = g + lam_ineq[k] / mu;
        if (a > 0) F += 0.5 * mu * a * a;
        if (flat) flat->ineq_vals.push_back(g);
        ++k;
      }
    }
    return F;
  };

  Eigen::MatrixXd H(n, n);
  Eigen::VectorXd grad(n);
  int total_iters = 0;
  double prev_viol = 1e18;

  const int kMaxTotalIters = 160;
  for (int outer = 0; outer < 20; ++outer) {
    double nu = 1e-6;
    for (int inner = 0; inner < 25 && total_iters < kMaxTotalIters; ++inner) {
      ++total_iters;
      H.setZero();
      grad.setZero();
      auto add_block = [&](const ResidualValue& rv, const double* coeff_per_comp,
                           const double* hess_w_per_comp) {
        // coeff_per_comp: dF/dvalue per component; hess_w: GN weight per comp.
        for (int ci = 0; ci < rv.nv; ++ci) {
          // Gather jacobian rows for this component.
          for (int a = 0; a < rv.nj; ++a) {
            if (rv.jac[a].comp != ci) continue;
            const int t = rv.jac[a].t;
            const Vec2 gvec = rv.jac[a].g;
            grad[2 * t] += coeff_per_comp[ci] * gvec.x;
            grad[2 * t + 1] += coeff_per_comp[ci] * gvec.y;
            for (int b = 0; b < rv.nj; ++b) {
              if (rv.jac[b].comp != ci) continue;
              const int t2 = rv.jac[b].t;
              const Vec2 gvec2 = rv.jac[b].g;
              double w = hess_w_per_comp[ci];
              H(2 * t, 2 * t2) += w * gvec.x * gvec2.x;
              H(2 * t, 2 * t2 + 1) += w * gvec.x * gvec2.y;
              H(2 * t + 1, 2 * t2) += w * gvec.y * gvec2.x;
              H(2 * t + 1, 2 * t2 + 1) += w * gvec.y * gvec2.y;
            }
          }
        }
      };

      double c[4], w[4];
      for (const auto& r : p.costs) {
        auto rv = eval_residual(r, p, z);
        for (int i = 0; i < rv.nv; ++i) {
          c[i] = 2.0 * rv.v[i];
          w[i] = 2.0;
        }
        add_block(rv, c, w);
      }
      size_t k = 0;
      for (const auto& r : p.eq) {
        auto rv = eval_residual(r, p, z);
        for (int i = 0; i < rv.nv; ++i) {
          c[i] = mu * rv.v[i] + lam_eq[k];
          w[i] = mu;
          ++k;
        }
        add_block(rv, c, w);
      }
      k = 0;
      for (const auto& r : p.ineq) {
        auto rv = eval_residual(r, p, z);
        for (int i = 0; i < rv.nv; ++i) {
          double a = rv.v[i] + lam_ineq[k] / mu;
          if (a > 0) {
            c[i] = mu * a;
            w[i] = mu;
          } else {
            c[i] = 0;
            w[i] = 0;
          }
          ++k;
        }
        add_block(rv, c, w);
      }

      if (grad.lpNorm<Eigen::Infinity>() < 1e-7) break;

      double F0 = objective(z, nullptr);
      bool stepped = false;
      double step_taken = 0;
      for (int damp = 0; damp < 6 && !stepped; ++damp) {
        Eigen::MatrixXd Hd = H;
        for (int i = 0; i < n; ++i) Hd(i, i) += nu;
        Eigen::VectorXd dz = Hd.ldlt().solve(-grad);
        double alpha = 1.0;
        for (int ls = 0; ls < 10; ++ls) {
          std::vector<Vec2> znew = z;
          for (int i = 0; i <= p.T; ++i) {
            znew[i].x += alpha * dz[2 * i];
            znew[i].y += alpha * dz[2 * i + 1];
          }
          if (objective(znew, nullptr) < F0 - 1e-14) {
            z = std::move(znew);
            stepped = true;
            step_taken = alpha * dz.lpNorm<Eigen::Infinity>();
            break;
          }
          alpha *= 0.5;
        }
        if (!stepped) nu *= 10;
      }
      if (!stepped) break;
      if (step_taken < 1e-8) break;  // stalled; let the multipliers move
      nu = std::max(nu / 5, 1e-9);
    }

    Flat flat;
    objective(z, &flat);
    double viol = 0;
    for (double h : flat.eq_vals) viol = std::max(viol, std::abs(h));
    for (double g : flat.ineq_vals) viol = std::max(viol, std::max(0.0, g));
    res.trajectory = z;
    res.iterations = total_iters;
    res.max_eq_residual = 0;
    res.max_ineq_violation = 0;
    for (double h : flat.eq_vals) res.max_eq_residual = std::max(res.max_eq_residual, std::abs(h));
    for (double g : flat.ineq_vals)
      res.max_ineq_violation = std::max(res.max_ineq_violation, std::max(0.0, g));
    if (viol <= kTol) {
      res.converged = true;
      return res;
    }
    // Multiplier updates, penalty growth when progress stalls.
    size_t k = 0;
    for (double h : flat.eq_vals) lam_eq[k++] += mu * h;
    k = 0;
    for (double g : flat.ineq_vals) {
      lam_ineq[k] = std::max(0.0, lam_ineq[k] + mu * g);
      ++k;
    }
    if (viol > 0.25 * prev_viol) mu = std::min(mu * 5.0, 1e8);
    prev_viol = viol;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Planner-facing helpers.

namespace {

std::vector<Shape> world_obstacles(const Scene& scene, const Configuration& config, int exclude) {
  std::vector<Shape> out;
  for (const auto& w : scene.walls) out.push_back(Shape::rect(w));
  for (const auto& b : scene.boundary_walls()) out.push_back(Shape::rect(b));
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    if (static_cast<int>(i) == exclude) continue;
    out.push_back(scene.object_shape(static_cast<int>(i), config.object_pos[i]));
  }
  return out;
}

void add_collision_residuals(TrajectoryProblem& p, const std::vector<Shape>& obstacles,
                             double margin, const Rect& traj_bbox) {
  // Only obstacles near the trajectory's straight-line bounding box matter;
  // the optimizer cannot move states far outside it.
  Rect roi = traj_bbox.inflated(2.0);
  for (const auto& ob : obstacles) {
    Rect ab = ob.aabb();
    if (ab.hi.x < roi.lo.x || ab.lo.x > roi.hi.x || ab.hi.y < roi.lo.y || ab.lo.y > roi.hi.y)
      continue;
    for (int t = 1; t <= p.T; ++t) {
      double m = t <= 2 ? 1e-3 : margin;
      Residual r;
      r.kind = ResidualKind::Collision;
      r.mode = ResidualMode::Ineq;
      r.t = t;
      r.margin = m;
      r.obstacle = ob;
      r.body = BodyRef::Agent;
      p.ineq.push_back(r);
      if (p.carried_offset) {
        r.body = BodyRef::Carried;
        p.ineq.push_back(r);
      }
    }
  }
}

}  // namespace

std::optional<Configuration> solve_grasp(const Configuration& config, const Scene& scene,
                                         int object, uint64_t seed, const TrajoptParams& params) {
  const auto& obj = scene.objects[object];
  Vec2 center = config.object_pos[object];
  double h = obj.side / 2;
  Rng rng(Rng::derive(seed, 0x67a5 + static_cast<uint64_t>(object)));
  static const Vec2 normals[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int trial = 0; trial < params.grasp_samples; ++trial) {
    int face = rng.uniform_int(4);
    double u = rng.uniform(-0.7, 0.7);
    Vec2 normal = normals[face];
    Vec2 tangent{-normal.y, normal.x};
    Vec2 contact = center + normal * h + tangent * (u * h);
    Vec2 agent = contact + normal * scene.agent_radius;
    // Touch holds by construction; check everything else keeps clearance.
    Shape adisc = scene.agent_shape(agent);
    bool ok = true;
    for (const auto& ob : world_obstacles(scene, config, object)) {
      if (signed_distance(adisc, ob) < params.clearance) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (signed_distance(adisc, scene.object_shape(object, center)) < -1e-9) continue;
    Configuration g = config;
    g.agent_pos = agent;
    g.attachment.reset();
    return g;
  }
  return std::nullopt;
}

std::optional<std::vector<Configuration>> solve_transport_hop(const Configuration& start,
                                                              const Scene& scene,
                                                              Vec2 object_target, bool soft,
                                                              const TrajoptParams& params) {
  if (!start.attachment) return std::nullopt;
  int obj = start.attachment->object;
  Vec2 offset = start.attachment->offset;
  Vec2 agent_start = start.agent_pos;
  Vec2 agent_target = object_target - offset;
  double dist = distance(agent_start, agent_target);
  double step = params.vmax * params.dt;
  int T = static_cast<int>(std::ceil(dist / (step * 0.8))) + 5;
  T = std::min(T, 400);

  TrajectoryProblem p;
  p.T = T;
  p.agent_radius = scene.agent_radius;
  p.carried_offset = offset;
  p.carried_side = scene.objects[obj].side;

  for (int t = 1; t < T; ++t) {
    Residual r;
    r.kind = ResidualKind::Smoothness;
    r.mode = ResidualMode::Cost;
    r.t = t;
    r.weight = 1.0;
    p.costs.push_back(r);
  }
  {
    Residual r;
    r.kind = ResidualKind::Stable;
    r.mode = ResidualMode::Eq;
    r.t = 0;
    r.target = agent_start;
    p.eq.push_back(r);
  }
  for (int t = 0; t < T; ++t) {
    Residual r;
    r.kind = ResidualKind::PositionDiff;
    r.mode = ResidualMode::Ineq;
    r.t = t + 1;
    r.t2 = t;
    r.bound = step - 1e-3;
    p.ineq.push_back(r);
  }
  {
    Residual r;
    r.kind = ResidualKind::PositionDiff;
    r.body = BodyRef::Carried;
    r.t = T;
    r.target = object_target;
    if (soft) {
      r.mode = ResidualMode::Cost;
      r.weight = 2.0;
      p.costs.push_back(r);
    } else {
      r.mode = ResidualMode::Ineq;
      r.bound = 5e-4;
      p.ineq.push_back(r);
    }
  }
  Rect bbox = Rect{agent_start, agent_start}.merged({agent_target, agent_target});
  bbox = bbox.merged(Rect::from_center(agent_start + offset, 0, 0))
             .merged(Rect::from_center(object_target, 0, 0));
  add_collision_residuals(p, world_obstacles(scene, start, obj), params.clearance, bbox);

  std::vector<Vec2> init(T + 1);
  for (int t = 0; t <= T; ++t) {
    init[t] = agent_start + (agent_target - agent_start) * (static_cast<double>(t) / T);
  }
  SolveResult sr = solve(p, init);
  if (!sr.converged) return std::nullopt;

  std::vector<Configuration> out;
  out.reserve(T + 1);
  for (const auto& a : sr.trajectory) {
    Configuration c = start;
    c.agent_pos = a;
    c.object_pos[obj] = a + offset;
    out.push_back(c);
  }
  // Paranoia replay: every state must be penetration-free and velocity-legal.
  for (size_t t = 0; t < out.size(); ++t) {
    if (min_separation(out[t], scene) < -1e-7) return std::nullopt;
    if (t > 0 && distance(out[t].agent_pos, out[t - 1].agent_pos) > step + 1e-9) return std::nullopt;
  }
  return out;
}

std::optional<PickPlaceResult> solve_pick_place(const Configuration& config, const Scene& scene,
                                                int object, Vec2 target, bool soft, uint64_t seed,
                                                const TrajoptParams& params) {
  double res = std::min(0.9 * params.vmax * params.dt, scene.agent_radius);
  for (int attempt = 0; attempt < 4; ++attempt) {
    uint64_t aseed = Rng::derive(seed, 0x9d1 + static_cast<uint64_t>(attempt));
    auto grasp = solve_grasp(config, scene, object, aseed, params);
    if (!grasp) continue;

    PathQuery pickq;
    pickq.mover = Mover::agent();
    pickq.start = config.agent_pos;
    pickq.goal = grasp->agent_pos;
    pickq.frozen = config;
    pickq.clearance = params.clearance;
    pickq.touch_object = object;
    auto pick_path = plan_birrt(pickq, scene, aseed, 8000, res);
    if (!pick_path) continue;

    Vec2 obj_pos = config.object_pos[object];
    Vec2 offset = obj_pos - grasp->agent_pos;

    Configuration attached = config;
    attached.agent_pos = grasp->agent_pos;
    attached.attachment = Attachment{object, offset};

    // Transport: direct hop when the straight corridor is clear, otherwise
    // hop along a Bi-RRT path for the attached pair.
    std::vector<std::vector<Configuration>> hops;
    PathQuery pairq;
    pairq.mover = Mover::attached_pair(object, offset);
    pairq.start = obj_pos;
    pairq.goal = target;
    pairq.frozen = config;
    pairq.clearance = params.clearance;
    bool direct_ok = false;
    {
      bool line_clear = true;
      double len = distance(obj_pos, target);
      int nsamp = std::max(1, static_cast<int>(std::ceil(len / 0.05)));
      for (int i = 0; i <= nsamp && line_clear; ++i) {
        Vec2 pnt = obj_pos + (target - obj_pos) * (static_cast<double>(i) / nsamp);
        if (!mover_free(pairq, scene, pnt, params.clearance)) line_clear = false;
      }
      if (line_clear) {
        auto hop = solve_transport_hop(attached, scene, target, soft, params);
        if (hop) {
          hops.push_back(std::move(*hop));
          direct_ok = true;
        }
      }
    }
    if (!direct_ok) {
      Vec2 goal_pos = target;
      if (!mover_free(pairq, scene, goal_pos, params.clearance)) {
        if (!soft) continue;
        // Nearest feasible pair placement around the requested target.
        bool found = false;
        for (double r = 0.1; r <= 1.6 && !found; r += 0.1) {
          for (int k = 0; k < 16 && !found; ++k) {
            double ang = 2 * M_PI * k / 16;
            Vec2 cand = target + Vec2{std::cos(ang), std::sin(ang)} * r;
            if (mover_free(pairq, scene, cand, params.clearance)) {
              goal_pos = cand;
              found = true;
            }
          }
        }
        if (!found) continue;
        pairq.goal = goal_pos;
      }
      auto pair_path = plan_birrt(pairq, scene, aseed ^ 0x55, 8000, scene.agent_radius);
      if (!pair_path) continue;
      Configuration cur = attached;
      bool ok = true;
      for (size_t i = 1; i < pair_path->waypoints.size() && ok; ++i) {
        bool last = i + 1 == pair_path->waypoints.size();
        auto hop = solve_transport_hop(cur, scene, pair_path->waypoints[i], last && soft, params);
        if (!hop) {
          ok = false;
          break;
        }
        cur = hop->back();
        hops.push_back(std::move(*hop));
      }
      if (!ok || hops.empty()) continue;
    }

    PickPlaceResult out;
    out.pick.phase = Phase::Pick;
    out.pick.object = object;
    out.pick.dt = scene.dt;
    for (const auto& wp : pick_path->waypoints) {
      Configuration c = config;
      c.agent_pos = wp;
      out.pick.states.push_back(c);
    }
    out.place.phase = Phase::Place;
    out.place.object = object;
    out.place.dt = scene.dt;
    for (size_t hi = 0; hi < hops.size(); ++hi) {
      size_t from = hi == 0 ? 0 : 1;  // drop duplicated joints
      for (size_t t = from; t < hops[hi].size(); ++t) out.place.states.push_back(hops[hi][t]);
    }
    out.end = out.place.states.back();
    out.end.attachment.reset();
    return out;
  }
  return std::nullopt;
}

}  // namespace segman
