#include "zograd/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <thread>

#include "zograd/errors.hpp"
#include "zograd/numeric.hpp"
#include "zograd/risk.hpp"

namespace zograd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

unsigned resolve_workers(unsigned requested, std::uint64_t reps) {
  unsigned w = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::uint64_t>(w, reps));
}

std::size_t estimator_dimension(const Estimator& estimator, std::size_t fallback) {
  if (const auto* design = std::get_if<LinearDesign>(&estimator)) return static_cast<std::size_t>(design->dimension());
  return fallback;
}

}  // namespace

RiskReport mc_mse(const Estimator& estimator, const Function& f, std::span<const double> grad, const NoiseSpec& noise,
                  std::span<const double> x0, const McOptions& options) {
  if (options.reps < 100) throw InputError("mc_mse: reps must be at least 100");
  const std::size_t p = x0.size();
  if (p == 0) throw InputError("mc_mse: x0 is empty");
  if (grad.size() != p) throw InputError("mc_mse: gradient dimension does not match x0");
  if (estimator_dimension(estimator, p) != p) throw InputError("mc_mse: design dimension does not match x0");
  if (const auto* sp = std::get_if<SPConfig>(&estimator)) sp->validate();

  const std::uint64_t reps = options.reps;
  const unsigned workers = resolve_workers(options.workers, reps);
  std::vector<double> estimates(reps * p);
  std::vector<std::uint64_t> evals(workers, 0);
  std::vector<std::exception_ptr> failures(workers);
  const Oracle prototype(f, noise, options.seed);

  auto run_chunk = [&](unsigned w) {
    try {
      const std::uint64_t begin = reps * w / workers;
      const std::uint64_t end = reps * (w + 1) / workers;
      Oracle oracle = prototype;
      for (std::uint64_t r = begin; r < end; ++r) {
        oracle.restart(r);
        const Point est = std::visit(
            [&](const auto& e) -> Point {
              using T = std::decay_t<decltype(e)>;
              if constexpr (std::is_same_v<T, LinearDesign>) {
                return linear_estimate(e, oracle, x0);
              } else {
                return sp_estimate(e, oracle, x0);
              }
            },
            estimator);
        std::copy(est.begin(), est.end(), estimates.begin() + static_cast<std::ptrdiff_t>(r * p));
        evals[w] += oracle.eval_count();
      }
    } catch (...) {
      failures[w] = std::current_exception();
    }
  };

  if (workers == 1) {
    run_chunk(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_chunk, w);
  }
  for (const auto& e : failures) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<CompensatedSum> mean_acc(p);
  CompensatedSum sq_acc;
  for (std::uint64_t r = 0; r < reps; ++r) {
    double sq = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double v = estimates[r * p + i];
      mean_acc[i].add(v);
      const double e = v - grad[i];
      sq += e * e;
    }
    sq_acc.add(sq);
  }
  const auto reps_d = static_cast<double>(reps);
  Point mean(p);
  double bias_sq = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    mean[i] = mean_acc[i].value() / reps_d;
    bias_sq += (mean[i] - grad[i]) * (mean[i] - grad[i]);
  }
  const double mse = sq_acc.value() / reps_d;

  CompensatedSum var_acc;
  CompensatedSum dev_acc;
  for (std::uint64_t r = 0; r < reps; ++r) {
    double sq = 0.0;
    double centred = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double v = estimates[r * p + i];
      sq += (v - grad[i]) * (v - grad[i]);
      centred += (v - mean[i]) * (v - mean[i]);
    }
    var_acc.add(centred);
    dev_acc.add((sq - mse) * (sq - mse));
  }

  RiskReport report;
  report.mse = mse;
  report.bias_sq = bias_sq;
  report.variance = var_acc.value() / reps_d;
  report.std_error = std::sqrt(dev_acc.value() / (reps_d - 1.0)) / std::sqrt(reps_d);
  report.reps = reps;
  report.seed = options.seed;
  for (auto e : evals) report.evals_consumed += e;
  return report;
}

double fixed_function_mse(const LinearDesign& design, const Function& f, std::span<const double> grad,
                          std::span<const double> x0, double b) {
  const auto p = static_cast<std::size_t>(design.dimension());
  if (x0.size() != p || grad.size() != p) throw InputError("fixed_function_mse: dimension mismatch");
  if (!(b >= 0.0)) throw InputError("fixed_function_mse: b must be nonnegative");
  std::vector<CompensatedSum> acc(p);
  Point x(p);
  for (std::size_t j = 0; j < design.size(); ++j) {
    for (std::size_t i = 0; i < p; ++i) x[i] = x0[i] + design.deltas()[j][i];
    const double fx = f(x);
    for (std::size_t i = 0; i < p; ++i) acc[i].add(design.weights()[j][i] * fx);
  }
  double bias_sq = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    const double e = acc[i].value() - grad[i];
    bias_sq += e * e;
  }
  return bias_sq + b * design.weight_energy();
}

namespace {

// Brute force over 1-d designs. A design is a set of k distinct support
// points with multiplicities m_g summing to n; the per-sample weight at a
// point is its total weight W_g / m_g, which is the variance-minimizing split.
// The moment conditions fix W given the support when k == 3, and leave one
// free direction when k == 4. With k == 2 they force the support to be {-d, d}.
class BruteForce {
 public:
  BruteForce(int n, double a, double b, const BruteForceOptions& options)
      : n_(n), a_(a), b_(b), options_(options), scale_(std::pow(b / (a * a), 1.0 / 6.0)) {}

  BruteForceResult run() {
    for (int k = 2; k <= n_; ++k) {
      for (const auto& mult : compositions(n_, k)) {
        if (k == 2) search_pair(mult);
        if (k == 3) search_triple(mult);
        if (k == 4) search_quad(mult);
      }
    }
    if (n_ == 2) scan_asymmetric();
    if (!best_design_) {
      return {kInf, LinearDesign({{0.0}}, {{0.0}}), kInf, evaluated_, asymmetric_min_};
    }
    return {best_value_, *best_design_, min_evaluated_, evaluated_, asymmetric_min_};
  }

 private:
  static std::vector<std::vector<int>> compositions(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int left, int parts) {
      if (parts == 1) {
        cur.push_back(left);
        out.push_back(cur);
        cur.pop_back();
        return;
      }
      for (int m = 1; m <= left - parts + 1; ++m) {
        cur.push_back(m);
        rec(left - m, parts - 1);
        cur.pop_back();
      }
    };
    rec(n, k);
    return out;
  }

  static LinearDesign expand(std::span<const double> support, std::span<const double> total_weight,
                             std::span<const int> mult) {
    std::vector<Point> deltas;
    std::vector<Point> weights;
    for (std::size_t g = 0; g < support.size(); ++g) {
      for (int c = 0; c < mult[g]; ++c) {
        deltas.push_back({support[g]});
        weights.push_back({total_weight[g] / mult[g]});
      }
    }
    return LinearDesign(std::move(deltas), std::move(weights));
  }

  double evaluate(std::span<const double> support, std::span<const double> total_weight, std::span<const int> mult) {
    for (double w : total_weight) {
      if (!std::isfinite(w)) return kInf;
    }
    const LinearDesign design = expand(support, total_weight, mult);
    const double value = exact_worst_case_risk_linear(design, a_, b_, Norm::l2).value();
    ++evaluated_;
    if (std::isfinite(value)) min_evaluated_ = std::min(min_evaluated_, value);
    if (value < best_value_) {
      best_value_ = value;
      best_design_ = design;
    }
    return value;
  }

  // Derivative-at-zero weights of the quadratic interpolating three nodes.
  static std::array<double, 3> lagrange_derivative(std::span<const double> x) {
    std::array<double, 3> w{};
    for (int j = 0; j < 3; ++j) {
      const int k = (j + 1) % 3;
      const int m = (j + 2) % 3;
      w[j] = -(x[k] + x[m]) / ((x[j] - x[k]) * (x[j] - x[m]));
    }
    return w;
  }

  // Lagrange basis of three nodes evaluated at t.
  static std::array<double, 3> lagrange_value(std::span<const double> x, double t) {
    std::array<double, 3> l{};
    for (int j = 0; j < 3; ++j) {
      const int k = (j + 1) % 3;
      const int m = (j + 2) % 3;
      l[j] = (t - x[k]) * (t - x[m]) / ((x[j] - x[k]) * (x[j] - x[m]));
    }
    return l;
  }

  bool well_separated(std::span<const double> x) const {
    for (std::size_t i = 1; i < x.size(); ++i) {
      if (!(x[i] - x[i - 1] > 1e-9 * scale_)) return false;
    }
    return true;
  }

  void search_pair(const std::vector<int>& mult) {
    auto objective = [&](double d) {
      const std::array<double, 2> support{-d, d};
      const std::array<double, 2> weight{-1.0 / (2.0 * d), 1.0 / (2.0 * d)};
      return evaluate(support, weight, mult);
    };
    const double lo = 1e-2 * scale_;
    const double hi = 1e2 * scale_;
    const int g = options_.grid_points;
    double best_d = lo;
    double best = kInf;
    for (int i = 0; i < g; ++i) {
      const double d = lo * std::pow(hi / lo, static_cast<double>(i) / (g - 1));
      const double v = objective(d);
      if (v < best) {
        best = v;
        best_d = d;
      }
    }
    const double step = std::pow(hi / lo, 1.0 / (g - 1));
    log_golden_section_minimize(objective, best_d / step, best_d * step, 1e-13);
  }

  void search_triple(const std::vector<int>& mult) {
    auto objective = [&](std::span<const double> x) {
      if (!well_separated(x)) return kInf;
      const auto w = lagrange_derivative(x);
      return evaluate(x, w, mult);
    };
    const int g = std::max(21, std::min(options_.grid_points, 61));
    std::vector<std::pair<double, std::vector<double>>> starts;
    std::vector<double> x(3);
    for (int i = 0; i < g; ++i) {
      for (int j = i + 1; j < g; ++j) {
        for (int k = j + 1; k < g; ++k) {
          x = {grid_at(i, g), grid_at(j, g), grid_at(k, g)};
          keep_best(starts, objective(x), x);
        }
      }
    }
    refine(starts, objective);
  }

  void search_quad(const std::vector<int>& mult) {
    // Parameters: four sorted nodes and the coefficient t along the null
    // direction of the moment system.
    auto objective = [&](std::span<const double> v) {
      const std::span<const double> x = v.first(4);
      if (!well_separated(x)) return kInf;
      const auto w3 = lagrange_derivative(x.first(3));
      const auto l = lagrange_value(x.first(3), x[3]);
      const double t = v[4];
      const std::array<double, 4> w{w3[0] - t * l[0], w3[1] - t * l[1], w3[2] - t * l[2], t};
      return evaluate(x, w, mult);
    };
    const int g = std::max(11, std::min(options_.grid_points, 21));
    const int gt = 41;
    std::vector<std::pair<double, std::vector<double>>> starts;
    std::vector<double> v(5);
    const double t_range = 2.0 / scale_;
    for (int i = 0; i < g; ++i) {
      for (int j = i + 1; j < g; ++j) {
        for (int k = j + 1; k < g; ++k) {
          for (int m = k + 1; m < g; ++m) {
            for (int s = 0; s < gt; ++s) {
              v = {grid_at(i, g), grid_at(j, g), grid_at(k, g), grid_at(m, g),
                   -t_range + 2.0 * t_range * s / (gt - 1)};
              keep_best(starts, objective(v), v);
            }
          }
        }
      }
    }
    refine(starts, objective);
  }

  double grid_at(int i, int g) const { return -4.0 * scale_ + 8.0 * scale_ * i / (g - 1); }

  void keep_best(std::vector<std::pair<double, std::vector<double>>>& starts, double value,
                 const std::vector<double>& x) const {
    if (!std::isfinite(value)) return;
    const auto limit = static_cast<std::size_t>(std::max(1, options_.refine_starts));
    if (starts.size() < limit || value < starts.back().first) {
      starts.emplace_back(value, x);
      std::sort(starts.begin(), starts.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
      if (starts.size() > limit) starts.pop_back();
    }
  }

  void refine(const std::vector<std::pair<double, std::vector<double>>>& starts,
              const std::function<double(std::span<const double>)>& objective) {
    for (const auto& [value, x] : starts) {
      auto m = nelder_mead_minimize(objective, x, 0.1 * scale_, 1e-15, 20000);
      nelder_mead_minimize(objective, m.x, 0.01 * scale_, 1e-15, 20000);
    }
  }

  // Designs with delta_1 != -delta_2 satisfy the first two moment conditions
  // with w = (1, -1) / (delta_1 - delta_2) but never the quadratic one.
  void scan_asymmetric() {
    const int g = 201;
    for (int i = 0; i < g; ++i) {
      for (int j = 0; j < g; ++j) {
        const double d1 = grid_at(i, g);
        const double d2 = grid_at(j, g) * 1.0001;
        if (d1 == d2 || d1 == -d2) continue;
        const double w = 1.0 / (d1 - d2);
        const LinearDesign design({{d1}, {d2}}, {{w}, {-w}});
        const double value = exact_worst_case_risk_linear(design, a_, b_, Norm::l2).value();
        ++evaluated_;
        asymmetric_min_ = std::min(asymmetric_min_, value);
      }
    }
  }

  int n_;
  double a_;
  double b_;
  BruteForceOptions options_;
  double scale_;
  double best_value_ = kInf;
  std::optional<LinearDesign> best_design_;
  double min_evaluated_ = kInf;
  double asymmetric_min_ = kInf;
  std::uint64_t evaluated_ = 0;
};

}  // namespace

BruteForceResult brute_force_linear_minimax(int n, double a, double b, const BruteForceOptions& options) {
  if (n < 1) throw InputError("brute_force_linear_minimax: n must be at least 1");
  if (n > 4) throw InputError("brute_force_linear_minimax: n > 4 is unsupported");
  if (!(a > 0.0) || !(b > 0.0)) throw InputError("brute_force_linear_minimax: a and b must be positive");
  if (options.grid_points < 3) throw InputError("brute_force_linear_minimax: grid_points must be at least 3");
  return BruteForce(n, a, b, options).run();
}

RateFit rate_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw InputError("rate_fit: need at least 3 points");
  for (const auto& [n, risk] : points) {
    if (!(n > 0.0) || !std::isfinite(n)) throw InputError("rate_fit: budgets must be positive");
    if (!(risk > 0.0) || !std::isfinite(risk)) throw InputError("rate_fit: risks must be positive and finite");
  }
  const auto m = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [n, risk] : points) {
    sx += std::log(n);
    sy += std::log(risk);
  }
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [n, risk] : points) {
    const double dx = std::log(n) - mx;
    const double dy = std::log(risk) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw InputError("rate_fit: budgets must not all be equal");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  fit.points.assign(points.begin(), points.end());
  return fit;
}

std::vector<BlowupPoint> sp_blowup_curve(std::span<const double> rho_list, int p, int n, double h,
                                         std::uint64_t reps, std::uint64_t seed, unsigned workers) {
  if (p < 1) throw InputError("sp_blowup_curve: p must be at least 1");
  SPConfig config;
  config.h = h;
  config.n = n;
  config.validate();
  const Point x0(static_cast<std::size_t>(p), 0.0);
  std::vector<BlowupPoint> out;
  for (double rho : rho_list) {
    if (!std::isfinite(rho)) throw InputError("sp_blowup_curve: rho must be finite");
    Function f = [rho, x0](std::span<const double> x) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += x[i] - x0[i];
      return rho * s;
    };
    const Point grad(static_cast<std::size_t>(p), rho);
    const RiskReport report = mc_mse(config, f, grad, NoiseSpec::none(), x0, {reps, seed, workers});
    const double analytic = 2.0 * rho * rho * p * (p - 1) / static_cast<double>(n);
    out.push_back({rho, report, analytic});
  }
  return out;
}

TwoPointRisk two_point_risk(const LinearDesign& design, double eps, double a, double b, const McOptions& options) {
  if (design.dimension() != 1) throw InputError("two_point_risk: the design must be one-dimensional");
  const ExtremalFunction positive = f_star_1d(eps, a);
  const ExtremalFunction negative = positive.negated();
  const Point x0{0.0};
  const NoiseSpec noise = NoiseSpec::gaussian(b);
  TwoPointRisk out;
  out.positive = mc_mse(design, positive.as_function(), positive.gradient(), noise, x0, options);
  out.negative = mc_mse(design, negative.as_function(), negative.gradient(), noise, x0, options);
  return out;
}

RiskReport spike_mc_mse(const LinearDesign& design, const FunctionClassSpec& spec, double b, const McOptions& options) {
  const SpikeSign rule = is_same_sign(design) ? SpikeSign::common_sign() : SpikeSign::automatic();
  const SpikeAdversary adversary = spike_adversary(design, spec, rule);
  return mc_mse(design, adversary.as_function(), adversary.gradient(), NoiseSpec::gaussian(b), spec.x0(), options);
}

}  // namespace zograd
