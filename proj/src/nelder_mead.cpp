#include "wallshape/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wallshape {

namespace {

struct Simplex {
  std::vector<std::vector<double>> pts;
  std::vector<double> vals;

  void sort() {
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<std::vector<double>> p2(pts.size());
    std::vector<double> v2(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      p2[i] = std::move(pts[order[i]]);
      v2[i] = vals[order[i]];
    }
    pts = std::move(p2);
    vals = std::move(v2);
  }

  double diameter() const {
    double d = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      for (std::size_t c = 0; c < pts[0].size(); ++c)
        d = std::max(d, std::abs(pts[i][c] - pts[0][c]));
    return d;
  }
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const NelderMeadOptions& opt) {
  const std::size_t n = x0.size();
  NelderMeadResult res;
  res.x = x0;
  res.fx = f(x0);
  res.evaluations = 1;

  double step = opt.init_step;
  for (int round = 0; round <= opt.restarts; ++round) {
    Simplex sx;
    sx.pts.assign(n + 1, res.x);
    sx.vals.assign(n + 1, 0.0);
    sx.vals[0] = res.fx;
    for (std::size_t i = 0; i < n; ++i) {
      sx.pts[i + 1][i] += step;
      if (res.evaluations >= opt.max_evaluations) break;
      sx.vals[i + 1] = f(sx.pts[i + 1]);
      ++res.evaluations;
    }
    if (res.evaluations >= opt.max_evaluations) {
      sx.sort();
      if (sx.vals[0] < res.fx) { res.x = sx.pts[0]; res.fx = sx.vals[0]; }
      break;
    }
    sx.sort();

    bool round_converged = false;
    while (res.evaluations < opt.max_evaluations) {
      const double fspread = std::abs(sx.vals[n] - sx.vals[0]);
      double xscale = step;
      for (double c : sx.pts[0]) xscale = std::max(xscale, std::abs(c));
      // objectives with an exact zero minimum never pass a relative f-test,
      // so a collapsed simplex counts as converged on its own
      if (fspread <= opt.f_tol * (std::abs(sx.vals[0]) + opt.f_tol) ||
          sx.diameter() <= opt.x_tol * xscale) {
        round_converged = true;
        break;
      }

      std::vector<double> centroid(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < n; ++c) centroid[c] += sx.pts[i][c];
      for (double& c : centroid) c /= static_cast<double>(n);

      auto blend = [&](double t) {
        std::vector<double> p(n);
        for (std::size_t c = 0; c < n; ++c)
          p[c] = centroid[c] + t * (sx.pts[n][c] - centroid[c]);
        return p;
      };

      auto reflected = blend(-1.0);
      const double fr = f(reflected);
      ++res.evaluations;

      if (fr < sx.vals[0]) {
        auto expanded = blend(-2.0);
        const double fe = f(expanded);
        ++res.evaluations;
        if (fe < fr) { sx.pts[n] = std::move(expanded); sx.vals[n] = fe; }
        else         { sx.pts[n] = std::move(reflected); sx.vals[n] = fr; }
      } else if (fr < sx.vals[n - 1]) {
        sx.pts[n] = std::move(reflected);
        sx.vals[n] = fr;
      } else {
        const bool outside = fr < sx.vals[n];
        auto contracted = blend(outside ? -0.5 : 0.5);
        const double fc = f(contracted);
        ++res.evaluations;
        if (fc < std::min(fr, sx.vals[n])) {
          sx.pts[n] = std::move(contracted);
          sx.vals[n] = fc;
        } else {
          // shrink toward the best vertex
          for (std::size_t i = 1; i <= n && res.evaluations < opt.max_evaluations; ++i) {
            for (std::size_t c = 0; c < n; ++c)
              sx.pts[i][c] = 0.5 * (sx.pts[i][c] + sx.pts[0][c]);
            sx.vals[i] = f(sx.pts[i]);
            ++res.evaluations;
          }
        }
      }
      sx.sort();
      ++res.iterations;
    }

    if (sx.vals[0] < res.fx) {
      res.x = sx.pts[0];
      res.fx = sx.vals[0];
    }
    res.converged = round_converged;
    step *= 0.25;  // tighter simplex for each restart round
    if (res.evaluations >= opt.max_evaluations) break;
  }
  return res;
}

}  // namespace wallshape
