#include "zograd/numeric.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <numeric>

#include "zograd/errors.hpp"

namespace zograd {

double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

ScalarMinimum golden_section_minimize(const std::function<double(double)>& objective, double lo, double hi,
                                      double x_tol, int max_iter) {
  if (!(lo < hi)) throw InputError("golden_section_minimize: empty bracket");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  for (int it = 0; it < max_iter && (b - a) > x_tol * std::max(1.0, std::abs(c) + std::abs(d)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  return fc < fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};
}

ScalarMinimum log_golden_section_minimize(const std::function<double(double)>& objective, double lo, double hi,
                                          double rel_tol) {
  if (!(lo > 0.0)) throw InputError("log_golden_section_minimize: lower bound must be positive");
  auto in_log = [&](double t) { return objective(std::exp(t)); };
  auto m = golden_section_minimize(in_log, std::log(lo), std::log(hi), rel_tol);
  return {std::exp(m.x), m.value};
}

SimplexMinimum nelder_mead_minimize(const std::function<double(std::span<const double>)>& objective,
                                    std::vector<double> start, double initial_step, double f_tol, int max_iter) {
  const std::size_t dim = start.size();
  if (dim == 0) throw InputError("nelder_mead_minimize: empty start point");

  std::vector<std::vector<double>> simplex(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += initial_step;
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) values[i] = objective(simplex[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  int it = 0;
  for (; it < max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[dim - 1];

    const double spread = values[worst] - values[best];
    if (std::isfinite(spread) && spread <= f_tol * std::max(1.0, std::abs(values[best]))) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < dim; ++k) {
      const auto& v = simplex[order[k]];
      for (std::size_t i = 0; i < dim; ++i) centroid[i] += v[i] / static_cast<double>(dim);
    }
    auto along = [&](double t, std::vector<double>& out) {
      for (std::size_t i = 0; i < dim; ++i) out[i] = centroid[i] + t * (simplex[worst][i] - centroid[i]);
      return objective(out);
    };

    const double f_reflect = along(-1.0, trial);
    if (f_reflect < values[best]) {
      const double f_expand = along(-2.0, trial2);
      if (f_expand < f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[second]) {
      simplex[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }
    const bool outside = f_reflect < values[worst];
    const double f_contract = along(outside ? -0.5 : 0.5, trial2);
    if (f_contract < (outside ? f_reflect : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = f_contract;
      continue;
    }
    for (std::size_t k = 1; k <= dim; ++k) {
      auto& v = simplex[order[k]];
      for (std::size_t i = 0; i < dim; ++i) v[i] = simplex[best][i] + 0.5 * (v[i] - simplex[best][i]);
      values[order[k]] = objective(v);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  return {simplex[best], values[best], it};
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace zograd
