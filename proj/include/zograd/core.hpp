#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zograd/rng.hpp"

namespace zograd {

using Point = std::vector<double>;

/// A black-box objective R^p -> R.
using Function = std::function<double(std::span<const double>)>;

/// Relative tolerance for every exact-equality contract check in the library.
inline constexpr double kContractRelTol = 1e-9;

enum class Norm { l1, l2, linf };

/// Accepts "1", "2", "inf" (also "l1", "l2", "linf", "infinity").
Norm parse_norm(std::string_view text);
std::string to_string(Norm q);

/// The l_q norm of a vector.
double norm(std::span<const double> x, Norm q) noexcept;

/// Dense row-major matrix, only as much as the library needs.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix zeros(std::size_t n) { return Matrix(n, n); }
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  /// v^T M v
  double quadratic_form(std::span<const double> v) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Parameters of the class of functions whose second-order Taylor remainder
/// at x0 is bounded by (a/6) ||x - x0||_q^3. The dimension p is x0.size().
class FunctionClassSpec {
 public:
  FunctionClassSpec(double a, Point x0, Norm q = Norm::l2);

  /// Origin-centred class of dimension p.
  static FunctionClassSpec centered(double a, int p, Norm q = Norm::l2);

  double a() const noexcept { return a_; }
  int p() const noexcept { return static_cast<int>(x0_.size()); }
  Norm q() const noexcept { return q_; }
  const Point& x0() const noexcept { return x0_; }

  /// (a/6) ||x - x0||_q^3
  double remainder_bound(std::span<const double> x) const;

 private:
  double a_;
  Point x0_;
  Norm q_;
};

/// Noise model of the oracle: Gaussian with variance sigma^2(x) <= b.
class NoiseSpec {
 public:
  enum class Kind { none, gaussian_constant, custom };
  using Variance = std::function<double(std::span<const double>)>;

  static NoiseSpec none();
  static NoiseSpec gaussian(double b);
  /// Variance is checked against b at every evaluated point.
  static NoiseSpec custom(double b, Variance variance);

  Kind kind() const noexcept { return kind_; }
  double b() const noexcept { return b_; }

  /// sigma^2(x); throws ContractError for a custom law exceeding b.
  double variance_at(std::span<const double> x) const;

 private:
  NoiseSpec(Kind kind, double b, Variance variance);

  Kind kind_;
  double b_;
  Variance variance_;
};

/// Budgeted noisy evaluation oracle Y(x) = f(x) + eta.
///
/// The j-th sample drawn by an oracle uses the random stream keyed by
/// (seed, replication, j), so the sample sequence depends only on the seed,
/// the replication index and the sequence of query points.
class Oracle {
 public:
  Oracle(Function f, NoiseSpec noise, std::uint64_t seed = 0);

  /// One noisy sample at x; increments eval_count.
  double sample(std::span<const double> x);

  /// Noise-free f(x). Does not consume budget.
  double value(std::span<const double> x) const;

  /// Same function, noise and seed on replication stream `replication`,
  /// with a fresh eval counter. Used to hand one oracle to each worker.
  Oracle fork(std::uint64_t replication) const;

  /// In-place variant of fork: switch to another replication stream and
  /// reset the eval counter (the budget cap is kept).
  void restart(std::uint64_t replication) noexcept {
    replication_ = replication;
    eval_count_ = 0;
  }

  std::uint64_t eval_count() const noexcept { return eval_count_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t replication() const noexcept { return replication_; }
  const NoiseSpec& noise() const noexcept { return noise_; }

  /// Caps the number of samples; std::nullopt removes the cap.
  void set_budget(std::optional<std::uint64_t> max_evals) noexcept { budget_ = max_evals; }
  std::optional<std::uint64_t> remaining() const noexcept;

  /// Throws BudgetError unless `count` more samples are available.
  void require(std::uint64_t count) const;

  void set_true_gradient(Point gradient) { true_gradient_ = std::move(gradient); }
  const std::optional<Point>& true_gradient() const noexcept { return true_gradient_; }

  StreamKey stream(std::uint64_t stream_domain) const noexcept {
    return StreamKey{seed_, replication_, stream_domain};
  }

 private:
  Function f_;
  NoiseSpec noise_;
  std::uint64_t seed_;
  std::uint64_t replication_ = 0;
  std::uint64_t eval_count_ = 0;
  std::optional<std::uint64_t> budget_;
  std::optional<Point> true_gradient_;
};

/// Sum of eval counts across per-worker oracle clones.
std::uint64_t total_eval_count(std::span<const Oracle> oracles) noexcept;

/// Free-function spelling of Oracle::sample.
inline double oracle_sample(Oracle& oracle, std::span<const double> x) { return oracle.sample(x); }

/// Largest excess of the second-order Taylor remainder over (a/6)||x-x0||_q^3
/// across `probes`, clamped at zero. `grad` and `hess` are the caller's
/// claimed derivatives of f at spec.x0(). An excess within kContractRelTol of
/// the magnitude of the terms involved counts as zero.
double remainder_violation(const Function& f, std::span<const double> grad, const Matrix& hess,
                           const FunctionClassSpec& spec, std::span<const Point> probes);

/// Tensor grid with `points_per_axis` equispaced points per axis on
/// [x0 - 3 scale, x0 + 3 scale]. When points_per_axis^p exceeds `max_points`
/// the per-axis count is reduced to the largest odd count that fits.
std::vector<Point> default_probe_grid(const FunctionClassSpec& spec, double scale,
                                      std::size_t points_per_axis = 1001,
                                      std::size_t max_points = 2'000'000);

}  // namespace zograd
