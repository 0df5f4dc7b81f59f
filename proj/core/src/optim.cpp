#include "oilsignal/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace oilsignal {

namespace {

double guarded(const std::function<double(const std::vector<double>&)>& f,
               const std::vector<double>& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::max();
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start,
                             const NelderMeadOptions& options) {
  const std::size_t n = start.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: empty start point");

  std::vector<std::vector<double>> simplex(n + 1, start);
  std::vector<double> value(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    double step = options.initial_step;
    if (simplex[i + 1][i] != 0.0) step *= std::max(1.0, std::fabs(simplex[i + 1][i]));
    simplex[i + 1][i] += step;
  }
  for (std::size_t i = 0; i <= n; ++i) value[i] = guarded(objective, simplex[i]);

  std::vector<std::size_t> order(n + 1);
  NelderMeadResult result;
  result.best_trace.reserve(static_cast<std::size_t>(options.max_iterations));

  auto sort_order = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
  };

  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    sort_order();
    const std::size_t best = order[0];
    const std::size_t worst = order[n];
    const std::size_t second_worst = order[n - 1];
    result.best_trace.push_back(value[best]);

    double diameter = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        diameter = std::max(diameter, std::fabs(simplex[order[i]][j] - simplex[best][j]));
      }
    }
    // Relative value spread, so large-magnitude objectives are not held to a
    // sub-ulp bar; the diameter test alone also suffices (flat plateaus keep
    // the spread at zero while the simplex still wanders in x).
    const double spread = std::fabs(value[worst] - value[best]);
    if (spread < options.f_tolerance * (1.0 + std::fabs(value[best])) ||
        diameter < options.x_tolerance) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
      return p;
    };

    std::vector<double> reflected = blend(-1.0);
    const double f_reflected = guarded(objective, reflected);

    if (f_reflected < value[best]) {
      std::vector<double> expanded = blend(-2.0);
      const double f_expanded = guarded(objective, expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = std::move(expanded);
        value[worst] = f_expanded;
      } else {
        simplex[worst] = std::move(reflected);
        value[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < value[second_worst]) {
      simplex[worst] = std::move(reflected);
      value[worst] = f_reflected;
      continue;
    }

    const bool outside = f_reflected < value[worst];
    std::vector<double> contracted = blend(outside ? -0.5 : 0.5);
    const double f_contracted = guarded(objective, contracted);
    if (f_contracted < std::min(f_reflected, value[worst])) {
      simplex[worst] = std::move(contracted);
      value[worst] = f_contracted;
      continue;
    }

    for (std::size_t i = 1; i <= n; ++i) {
      const std::size_t k = order[i];
      for (std::size_t j = 0; j < n; ++j) {
        simplex[k][j] = simplex[order[0]][j] + 0.5 * (simplex[k][j] - simplex[order[0]][j]);
      }
      value[k] = guarded(objective, simplex[k]);
    }
  }

  sort_order();
  result.x = simplex[order[0]];
  result.value = value[order[0]];
  result.iterations = iter;
  if (!result.best_trace.empty()) result.best_trace.push_back(result.value);
  return result;
}

}  // namespace oilsignal
