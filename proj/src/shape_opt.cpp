#include "wallshape/shape_opt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "wallshape/nelder_mead.hpp"

namespace wallshape {

namespace {

struct Evaluation {
  double penalized = 0.0;
  double mean_J = 0.0;
  double mean_J1 = 0.0;
  bool feasible = false;
  bool capped = false;
};

Evaluation evaluate_shape(const ShapeParam& shape, const ObjectiveContext& ctx) {
  const auto violations = validate_shape(shape);

  Evaluation ev;
  try {
    const auto mf = multi_frequency_energy_detail(shape, ctx.omegas, ctx.alphas,
                                                  ctx.weights, ctx.setup);
    ev.mean_J = mf.mean_J;
    ev.mean_J1 = mf.mean_J1;
    ev.penalized = mf.mean_J1;
  } catch (const GeometryError&) {
    ev.penalized = ev.mean_J = ev.mean_J1 = ctx.cap_value;
    ev.capped = true;
    return ev;
  }

  ev.feasible = violations.empty();
  if (!ev.feasible) {
    double penalty = 0.0;
    for (const auto& v : violations) {
      double w = ctx.w_length;
      if (v.kind == ConstraintViolation::Kind::Box) w = ctx.w_box;
      if (v.kind == ConstraintViolation::Kind::Slope) w = ctx.w_slope;
      penalty += w * v.excess * v.excess;
    }
    ev.penalized += penalty;
  }
  return ev;
}

}  // namespace

double penalized_objective(const ShapeParam& shape, const ObjectiveContext& ctx) {
  return evaluate_shape(shape, ctx).penalized;
}

ShapeParam project_box_slope(const ShapeParam& shape) {
  ShapeParam out = shape;
  const int m = out.control_count();
  if (m < 2) throw MalformedShapeError("project_box_slope: need at least 2 control points");
  for (double& s : out.heights) s = std::clamp(s, 0.0, out.box_width);
  // one forward sweep restores the slope bound without leaving the box
  const double step_max = out.slope_max * (2.0 * out.half_height / (m - 1));
  for (int i = 0; i + 1 < m; ++i)
    out.heights[i + 1] =
        std::clamp(out.heights[i + 1], out.heights[i] - step_max, out.heights[i] + step_max);
  return out;
}

OptResult optimize_shape(const OptConfig& cfg, const ObjectiveContext& ctx_in) {
  if (cfg.m < 2) throw MalformedShapeError("optimize_shape: m must be >= 2");
  if (cfg.budget < 1) throw std::invalid_argument("optimize_shape: budget must be >= 1");
  if (ctx_in.base_shape.control_count() != cfg.m)
    throw MalformedShapeError("optimize_shape: base shape control count does not match m");

  ObjectiveContext ctx = ctx_in;
  ctx.w_box = cfg.w_box;
  ctx.w_slope = cfg.w_slope;
  ctx.w_length = cfg.w_length;

  const double omega_mean = std::accumulate(ctx.omegas.begin(), ctx.omegas.end(), 0.0) /
                            static_cast<double>(ctx.omegas.size());

  OptResult result;
  result.best_shape = project_box_slope(ctx.base_shape);
  const Evaluation initial = evaluate_shape(result.best_shape, ctx);
  if (!initial.feasible)
    throw std::invalid_argument("optimize_shape: initial shape is infeasible");
  result.evaluations = 1;
  result.initial_objective = initial.penalized;
  result.final_objective = initial.penalized;
  ctx.cap_value = 1e6 * std::max(1e-30, std::abs(initial.penalized));

  result.history.push_back({0, initial.mean_J, initial.penalized,
                            domain_volume(result.best_shape), shape_length(result.best_shape),
                            omega_mean});
  result.accepted_shapes.push_back(result.best_shape);

  if (cfg.budget == 1) return result;

  double best = initial.penalized;
  auto heights_of = [&](const std::vector<double>& x) {
    ShapeParam s = ctx.base_shape;
    if (cfg.tie_heights)
      std::fill(s.heights.begin(), s.heights.end(), x[0]);
    else
      s.heights = x;
    return project_box_slope(s);
  };

  auto objective = [&](const std::vector<double>& x) {
    const ShapeParam candidate = heights_of(x);
    const Evaluation ev = evaluate_shape(candidate, ctx);
    ++result.evaluations;
    if (ev.feasible && !ev.capped && ev.penalized < best) {
      best = ev.penalized;
      result.best_shape = candidate;
      result.history.push_back({result.evaluations, ev.mean_J, ev.penalized,
                                domain_volume(candidate), shape_length(candidate), omega_mean});
      result.accepted_shapes.push_back(candidate);
    }
    return ev.penalized;
  };

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> jitter(0.75, 1.25);

  std::vector<double> x0(cfg.tie_heights ? 1 : static_cast<std::size_t>(cfg.m));
  if (cfg.tie_heights)
    x0[0] = ctx.base_shape.heights[0];
  else
    x0 = ctx.base_shape.heights;

  if (cfg.tie_heights) {
    // the tied objective is cheap and often multimodal (cavity resonances),
    // so seed the simplex from a coarse deterministic scan of the box
    const int scan = std::min(17, (cfg.budget - result.evaluations) / 2);
    for (int i = 0; i < scan; ++i)
      objective({ctx.base_shape.box_width * i / std::max(1, scan - 1)});
    x0[0] = result.best_shape.heights[0];
  }

  double step = cfg.step;
  for (int round = 0; round <= cfg.restarts; ++round) {
    if (result.evaluations >= cfg.budget) break;
    NelderMeadOptions opt;
    opt.max_evaluations = cfg.budget - result.evaluations;
    opt.init_step = step * jitter(rng);
    opt.f_tol = 1e-12;
    opt.x_tol = 1e-9;
    opt.restarts = 0;
    nelder_mead(objective, x0, opt);
    if (cfg.tie_heights)
      x0[0] = result.best_shape.heights[0];
    else
      x0 = result.best_shape.heights;
    step *= 0.5;
  }

  result.final_objective = best;
  return result;
}

}  // namespace wallshape
