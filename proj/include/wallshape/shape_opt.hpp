#pragma once

#include <cstdint>
#include <vector>

#include "wallshape/energy.hpp"

namespace wallshape {

struct OptConfig {
  int m = 8;              ///< control points
  int budget = 300;       ///< max objective evaluations
  double step = 0.05;     ///< initial simplex edge [m]
  int restarts = 1;
  std::uint64_t seed = 0; ///< perturbation pattern for restart simplices
  bool tie_heights = false;  ///< optimize a single height shared by all stations
  double w_box = 1e4, w_slope = 1e4, w_length = 1e4;  ///< penalty weights
};

struct HistoryRow {
  int iteration = 0;
  double J = 0.0;    ///< mean energy without volume penalty
  double J1 = 0.0;   ///< penalized objective value of the accepted shape
  double vol = 0.0;
  double len = 0.0;
  double omega_mean = 0.0;
};

struct OptResult {
  ShapeParam best_shape;
  std::vector<HistoryRow> history;       ///< accepted best-so-far iterates
  std::vector<ShapeParam> accepted_shapes;  ///< shapes behind the history rows
  double initial_objective = 0.0;
  double final_objective = 0.0;
  int evaluations = 0;
};

/// Everything a shape evaluation needs: the constraint template (all
/// ShapeParam fields except the heights), the frequency set with fitted
/// alphas, the energy weights and the meshing/problem setup.
struct ObjectiveContext {
  ShapeParam base_shape;
  std::vector<double> omegas;
  std::vector<cplx> alphas;
  EnergyWeights weights;
  ProblemSetup setup;
  double w_box = 1e4, w_slope = 1e4, w_length = 1e4;
  double cap_value = 1e12;  ///< returned when the solve pipeline cannot run
};

/// multi_frequency_energy plus weighted squared constraint violations;
/// finite for any well-formed shape (degenerate geometry short-circuits to
/// cap_value, never a solver call).
double penalized_objective(const ShapeParam& shape, const ObjectiveContext& ctx);

/// Clamp heights into the box and propagate the slope bound; leaves feasible
/// shapes untouched.
ShapeParam project_box_slope(const ShapeParam& shape);

/// Nelder-Mead over the control heights from the flat shape, with hard
/// box/slope projection and soft length/volume penalties.  Accepted history
/// is monotone and every accepted shape is fully feasible.
OptResult optimize_shape(const OptConfig& cfg, const ObjectiveContext& ctx);

}  // namespace wallshape
