#include "zograd/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zograd/errors.hpp"

namespace zograd {

namespace {

void require_finite(std::span<const double> x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v)) throw InputError(std::string(what) + ": non-finite coordinate");
  }
}

}  // namespace

Norm parse_norm(std::string_view text) {
  if (text == "1" || text == "l1") return Norm::l1;
  if (text == "2" || text == "l2") return Norm::l2;
  if (text == "inf" || text == "linf" || text == "infinity" || text == "Inf") return Norm::linf;
  throw InputError("unsupported norm selector '" + std::string(text) + "' (expected 1, 2 or inf)");
}

std::string to_string(Norm q) {
  switch (q) {
    case Norm::l1: return "1";
    case Norm::l2: return "2";
    case Norm::linf: return "inf";
  }
  return "?";
}

double norm(std::span<const double> x, Norm q) noexcept {
  double acc = 0.0;
  switch (q) {
    case Norm::l1:
      for (double v : x) acc += std::abs(v);
      return acc;
    case Norm::l2:
      if (x.size() == 1) return std::abs(x[0]);
      for (double v : x) acc += v * v;
      return std::sqrt(acc);
    case Norm::linf:
      for (double v : x) acc = std::max(acc, std::abs(v));
      return acc;
  }
  return acc;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::quadratic_form(std::span<const double> v) const {
  if (v.size() != rows_ || v.size() != cols_) throw InputError("quadratic_form: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) row += (*this)(i, j) * v[j];
    acc += v[i] * row;
  }
  return acc;
}

FunctionClassSpec::FunctionClassSpec(double a, Point x0, Norm q) : a_(a), x0_(std::move(x0)), q_(q) {
  if (!(a > 0.0) || !std::isfinite(a)) throw InputError("FunctionClassSpec: a must be positive and finite");
  if (x0_.empty()) throw InputError("FunctionClassSpec: dimension p must be at least 1");
  require_finite(x0_, "FunctionClassSpec x0");
}

FunctionClassSpec FunctionClassSpec::centered(double a, int p, Norm q) {
  if (p < 1) throw InputError("FunctionClassSpec: dimension p must be at least 1");
  return FunctionClassSpec(a, Point(static_cast<std::size_t>(p), 0.0), q);
}

double FunctionClassSpec::remainder_bound(std::span<const double> x) const {
  if (x.size() != x0_.size()) throw InputError("remainder_bound: dimension mismatch");
  Point d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - x0_[i];
  const double r = norm(d, q_);
  return a_ / 6.0 * r * r * r;
}

NoiseSpec::NoiseSpec(Kind kind, double b, Variance variance) : kind_(kind), b_(b), variance_(std::move(variance)) {}

NoiseSpec NoiseSpec::none() { return NoiseSpec(Kind::none, 0.0, {}); }

NoiseSpec NoiseSpec::gaussian(double b) {
  if (!(b >= 0.0) || !std::isfinite(b)) throw InputError("NoiseSpec: b must be nonnegative and finite");
  return NoiseSpec(Kind::gaussian_constant, b, {});
}

NoiseSpec NoiseSpec::custom(double b, Variance variance) {
  if (!(b >= 0.0) || !std::isfinite(b)) throw InputError("NoiseSpec: b must be nonnegative and finite");
  if (!variance) throw InputError("NoiseSpec: custom variance callable is empty");
  return NoiseSpec(Kind::custom, b, std::move(variance));
}

double NoiseSpec::variance_at(std::span<const double> x) const {
  switch (kind_) {
    case Kind::none: return 0.0;
    case Kind::gaussian_constant: return b_;
    case Kind::custom: {
      const double v = variance_(x);
      if (!(v >= 0.0) || v > b_ * (1.0 + 1e-12)) {
        throw ContractError("custom noise variance " + std::to_string(v) + " outside [0, b=" +
                            std::to_string(b_) + "]");
      }
      return v;
    }
  }
  return 0.0;
}

Oracle::Oracle(Function f, NoiseSpec noise, std::uint64_t seed)
    : f_(std::move(f)), noise_(std::move(noise)), seed_(seed) {
  if (!f_) throw InputError("Oracle: function is empty");
}

double Oracle::sample(std::span<const double> x) {
  require_finite(x, "oracle_sample");
  require(1);
  const double variance = noise_.variance_at(x);
  const std::uint64_t query = eval_count_++;
  const double mean = f_(x);
  if (variance == 0.0) return mean;
  return mean + std::sqrt(variance) * standard_normal(stream(domain::noise), query);
}

double Oracle::value(std::span<const double> x) const {
  require_finite(x, "Oracle::value");
  return f_(x);
}

Oracle Oracle::fork(std::uint64_t replication) const {
  Oracle copy(*this);
  copy.restart(replication);
  return copy;
}

std::optional<std::uint64_t> Oracle::remaining() const noexcept {
  if (!budget_) return std::nullopt;
  return *budget_ > eval_count_ ? *budget_ - eval_count_ : 0;
}

void Oracle::require(std::uint64_t count) const {
  if (budget_ && (eval_count_ > *budget_ || *budget_ - eval_count_ < count)) {
    throw BudgetError("oracle budget exhausted: " + std::to_string(count) + " evaluations requested, " +
                      std::to_string(*remaining()) + " remaining");
  }
}

std::uint64_t total_eval_count(std::span<const Oracle> oracles) noexcept {
  std::uint64_t total = 0;
  for (const auto& o : oracles) total += o.eval_count();
  return total;
}

double remainder_violation(const Function& f, std::span<const double> grad, const Matrix& hess,
                           const FunctionClassSpec& spec, std::span<const Point> probes) {
  if (probes.empty()) throw InputError("remainder_violation: probe list is empty");
  const auto p = static_cast<std::size_t>(spec.p());
  if (grad.size() != p) throw InputError("remainder_violation: gradient dimension mismatch");
  if (hess.rows() != p || hess.cols() != p) throw InputError("remainder_violation: Hessian dimension mismatch");

  const double f0 = f(spec.x0());
  double worst = 0.0;
  Point d(p);
  for (const auto& x : probes) {
    if (x.size() != p) throw InputError("remainder_violation: probe dimension mismatch");
    double linear = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      d[i] = x[i] - spec.x0()[i];
      linear += grad[i] * d[i];
    }
    const double quadratic = 0.5 * hess.quadratic_form(d);
    const double fx = f(x);
    const double remainder = std::abs(fx - f0 - linear - quadratic);
    const double bound = spec.remainder_bound(x);
    const double scale = std::max({std::abs(fx), std::abs(f0), std::abs(linear), std::abs(quadratic), bound});
    const double excess = remainder - bound;
    if (excess > kContractRelTol * scale) worst = std::max(worst, excess);
  }
  return worst;
}

std::vector<Point> default_probe_grid(const FunctionClassSpec& spec, double scale, std::size_t points_per_axis,
                                      std::size_t max_points) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InputError("default_probe_grid: scale must be positive");
  if (points_per_axis < 2) throw InputError("default_probe_grid: need at least 2 points per axis");
  const auto p = static_cast<std::size_t>(spec.p());

  std::size_t per_axis = points_per_axis;
  auto total_for = [p](std::size_t k) {
    double t = 1.0;
    for (std::size_t i = 0; i < p; ++i) t *= static_cast<double>(k);
    return t;
  };
  while (per_axis > 3 && total_for(per_axis) > static_cast<double>(max_points)) {
    per_axis = static_cast<std::size_t>(std::pow(static_cast<double>(max_points), 1.0 / static_cast<double>(p)));
    if (per_axis % 2 == 0) --per_axis;
    if (per_axis < 3) per_axis = 3;
  }

  std::vector<double> axis(per_axis);
  for (std::size_t k = 0; k < per_axis; ++k) {
    axis[k] = -3.0 * scale + 6.0 * scale * static_cast<double>(k) / static_cast<double>(per_axis - 1);
  }

  const auto total = static_cast<std::size_t>(total_for(per_axis));
  std::vector<Point> grid;
  grid.reserve(total);
  std::vector<std::size_t> idx(p, 0);
  for (std::size_t n = 0; n < total; ++n) {
    Point x(p);
    for (std::size_t i = 0; i < p; ++i) x[i] = spec.x0()[i] + axis[idx[i]];
    grid.push_back(std::move(x));
    for (std::size_t i = 0; i < p; ++i) {
      if (++idx[i] < per_axis) break;
      idx[i] = 0;
    }
  }
  return grid;
}

}  // namespace zograd
