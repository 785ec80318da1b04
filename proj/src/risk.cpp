#include "zograd/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "zograd/errors.hpp"
#include "zograd/numeric.hpp"

namespace zograd {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string(what) + " must be positive and finite");
}

void require_budget(int n, int p, const char* what) {
  if (n < 1) throw InputError(std::string(what) + ": n must be at least 1");
  if (p < 1) throw InputError(std::string(what) + ": p must be at least 1");
}

// m = p^(3/2) for q = 1, else 1.
double modulus_dimension_factor(int p, Norm q) {
  return q == Norm::l1 ? std::pow(static_cast<double>(p), 1.5) : 1.0;
}

}  // namespace

BoundFlavor parse_bound_flavor(std::string_view text) {
  if (text == "linear-lower") return BoundFlavor::linear_lower;
  if (text == "linear-lower-same-sign") return BoundFlavor::linear_lower_same_sign;
  if (text == "cfd-upper") return BoundFlavor::cfd_upper;
  if (text == "general-lower") return BoundFlavor::general_lower;
  throw InputError("unknown bound flavor '" + std::string(text) + "'");
}

std::string to_string(BoundFlavor flavor) {
  switch (flavor) {
    case BoundFlavor::linear_lower: return "linear-lower";
    case BoundFlavor::linear_lower_same_sign: return "linear-lower-same-sign";
    case BoundFlavor::cfd_upper: return "cfd-upper";
    case BoundFlavor::general_lower: return "general-lower";
  }
  return "?";
}

void BoundQuery::validate() const {
  require_budget(n, p, "BoundQuery");
  require_positive(a, "BoundQuery: a");
  require_positive(b, "BoundQuery: b");
  if (flavor == BoundFlavor::cfd_upper && n % (2 * p) != 0) {
    throw InputError("BoundQuery: the CFD upper bound needs n to be a multiple of 2p");
  }
}

double linear_risk_constant(double a, double b) { return std::cbrt(3.0 * a * a * b * b / 16.0); }

double linear_minimax_lower(const BoundQuery& query) {
  query.validate();
  const double p = static_cast<double>(query.p);
  const bool wide = query.q != Norm::linf;
  double factor = 1.0;
  switch (query.flavor) {
    case BoundFlavor::linear_lower:
      factor = wide ? std::pow(p, 4.0 / 3.0) : std::pow(p, 2.0 / 3.0);
      break;
    case BoundFlavor::linear_lower_same_sign:
      factor = wide ? std::pow(p, 5.0 / 3.0) : p;
      break;
    default:
      throw InputError("linear_minimax_lower: flavor " + to_string(query.flavor) + " is not a linear lower bound");
  }
  return factor * linear_risk_constant(query.a, query.b) * std::pow(static_cast<double>(query.n), -2.0 / 3.0);
}

double cfd_worst_case_mse(int n, double a, double b, int p, double delta) {
  require_budget(n, p, "cfd_worst_case_mse");
  if (n % (2 * p) != 0) throw InputError("cfd_worst_case_mse: n must be a multiple of 2p");
  require_positive(a, "cfd_worst_case_mse: a");
  if (!(b >= 0.0) || !std::isfinite(b)) throw InputError("cfd_worst_case_mse: b must be nonnegative");
  require_positive(delta, "cfd_worst_case_mse: delta");
  const double pd = static_cast<double>(p);
  const double d2 = delta * delta;
  return pd * (a * a / 36.0 * d2 * d2 + b * pd / (static_cast<double>(n) * d2));
}

double general_minimax_lower(int n, double a, double b, int p, Norm q) {
  require_budget(n, p, "general_minimax_lower");
  require_positive(a, "general_minimax_lower: a");
  require_positive(b, "general_minimax_lower: b");
  const double m = modulus_dimension_factor(p, q);
  return std::exp(-2.0 / 3.0) / 16.0 * std::pow(3.0 * a * b * m / static_cast<double>(n), 2.0 / 3.0);
}

double bound_value(const BoundQuery& query) {
  query.validate();
  switch (query.flavor) {
    case BoundFlavor::linear_lower:
    case BoundFlavor::linear_lower_same_sign:
      return linear_minimax_lower(query);
    case BoundFlavor::cfd_upper:
      return std::pow(static_cast<double>(query.p), 5.0 / 3.0) * linear_risk_constant(query.a, query.b) *
             std::pow(static_cast<double>(query.n), -2.0 / 3.0);
    case BoundFlavor::general_lower:
      return general_minimax_lower(query.n, query.a, query.b, query.p, query.q);
  }
  return 0.0;
}

bool WorstCaseRisk::bounded() const noexcept { return std::isfinite(upper); }

WorstCaseRisk exact_worst_case_risk_linear(const LinearDesign& design, double a, double b, Norm q) {
  require_positive(a, "exact_worst_case_risk_linear: a");
  if (!(b >= 0.0) || !std::isfinite(b)) throw InputError("exact_worst_case_risk_linear: b must be nonnegative");
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (!moment_conditions(design).matched) return {inf, inf, false};

  const auto p = static_cast<std::size_t>(design.dimension());
  // Coinciding design points see the same remainder value, so their weights
  // act on the bias as one merged weight.
  std::map<Point, Point> merged;
  for (std::size_t j = 0; j < design.size(); ++j) {
    auto [it, inserted] = merged.try_emplace(design.deltas()[j], Point(p, 0.0));
    for (std::size_t i = 0; i < p; ++i) it->second[i] += design.weights()[j][i];
  }

  std::vector<CompensatedSum> mass(p);
  bool same_sign = true;
  for (const auto& [delta, w] : merged) {
    const double r = norm(delta, q);
    const double cube = r * r * r;
    bool pos = false;
    bool neg = false;
    for (std::size_t i = 0; i < p; ++i) {
      mass[i].add(std::abs(w[i]) * cube);
      pos = pos || w[i] > 0.0;
      neg = neg || w[i] < 0.0;
    }
    same_sign = same_sign && !(pos && neg);
  }

  const double variance = b * design.weight_energy();
  double largest = 0.0;
  CompensatedSum total;
  for (const auto& m : mass) {
    const double v = m.value() * m.value();
    largest = std::max(largest, v);
    total.add(v);
  }
  const double scale = a * a / 36.0;
  const double upper = scale * total.value() + variance;
  if (p == 1 || same_sign) return {upper, upper, true};
  return {scale * largest + variance, upper, false};
}

double le_cam_bound(double eps, int n, double a, double b, int p, Norm q) {
  require_positive(eps, "le_cam_bound: eps");
  require_budget(n, p, "le_cam_bound");
  require_positive(a, "le_cam_bound: a");
  require_positive(b, "le_cam_bound: b");
  const double m = modulus_dimension_factor(p, q);
  return eps * eps / 16.0 * std::exp(-2.0 * static_cast<double>(n) * eps * eps * eps / (9.0 * a * b * m));
}

double le_cam_optimal_eps(int n, double a, double b, int p, Norm q) {
  require_budget(n, p, "le_cam_optimal_eps");
  require_positive(a, "le_cam_optimal_eps: a");
  require_positive(b, "le_cam_optimal_eps: b");
  return std::cbrt(3.0 * a * b * modulus_dimension_factor(p, q) / static_cast<double>(n));
}

double kl_gaussian(std::span<const double> mu1, std::span<const double> mu2, double b) {
  if (mu1.size() != mu2.size()) throw InputError("kl_gaussian: mean vectors differ in length");
  require_positive(b, "kl_gaussian: b");
  CompensatedSum acc;
  for (std::size_t i = 0; i < mu1.size(); ++i) {
    const double d = mu2[i] - mu1[i];
    acc.add(d * d);
  }
  return acc.value() / (2.0 * b);
}

MinIntegral min_integral_gaussian(double separation) {
  if (!(separation >= 0.0)) throw InputError("min_integral_gaussian: separation must be nonnegative");
  return {2.0 * normal_cdf(-separation / 2.0), 0.5 * std::exp(-separation * separation / 2.0)};
}

MinIntegral min_integral_gaussian(std::span<const double> mu1, std::span<const double> mu2, double b) {
  const double kl = kl_gaussian(mu1, mu2, b);
  return min_integral_gaussian(std::sqrt(2.0 * kl));
}

}  // namespace zograd
