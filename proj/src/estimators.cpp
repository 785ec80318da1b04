#include "zograd/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "zograd/errors.hpp"
#include "zograd/numeric.hpp"

namespace zograd {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string(what) + " must be positive and finite");
}

}  // namespace

LinearDesign::LinearDesign(std::vector<Point> deltas, std::vector<Point> weights)
    : deltas_(std::move(deltas)), weights_(std::move(weights)) {
  if (deltas_.empty()) throw InputError("LinearDesign: budget n must be at least 1");
  if (deltas_.size() != weights_.size()) throw InputError("LinearDesign: deltas and weights differ in length");
  const std::size_t p = deltas_.front().size();
  if (p == 0) throw InputError("LinearDesign: dimension must be at least 1");
  for (std::size_t j = 0; j < deltas_.size(); ++j) {
    if (deltas_[j].size() != p || weights_[j].size() != p) {
      throw InputError("LinearDesign: design point " + std::to_string(j) + " has the wrong dimension");
    }
    for (std::size_t i = 0; i < p; ++i) {
      if (!std::isfinite(deltas_[j][i]) || !std::isfinite(weights_[j][i])) {
        throw InputError("LinearDesign: non-finite entry at design point " + std::to_string(j));
      }
    }
  }
}

double LinearDesign::weight_energy() const noexcept {
  CompensatedSum acc;
  for (const auto& w : weights_) {
    for (double v : w) acc.add(v * v);
  }
  return acc.value();
}

LinearDesign cfd_design_1d(int n, double delta) {
  if (n < 2 || n % 2 != 0) throw InputError("cfd_design_1d: budget n must be even and at least 2");
  require_positive(delta, "cfd_design_1d: delta");
  std::vector<Point> deltas;
  std::vector<Point> weights;
  deltas.reserve(static_cast<std::size_t>(n));
  weights.reserve(static_cast<std::size_t>(n));
  const double w = 1.0 / (static_cast<double>(n) * delta);
  for (int j = 1; j <= n; ++j) {
    const double s = (j % 2 == 1) ? 1.0 : -1.0;
    deltas.push_back({s * delta});
    weights.push_back({s * w});
  }
  return LinearDesign(std::move(deltas), std::move(weights));
}

LinearDesign cfd_design_multi(int n, int p, double delta) {
  if (p < 1) throw InputError("cfd_design_multi: dimension p must be at least 1");
  if (n < 2 * p || n % (2 * p) != 0) throw InputError("cfd_design_multi: budget n must be a multiple of 2p");
  require_positive(delta, "cfd_design_multi: delta");
  if (p == 1) return cfd_design_1d(n, delta);

  const int per_axis = n / p;
  const double w = static_cast<double>(p) / (static_cast<double>(n) * delta);
  std::vector<Point> deltas;
  std::vector<Point> weights;
  for (int i = 0; i < p; ++i) {
    for (int j = 1; j <= per_axis; ++j) {
      const double s = (j % 2 == 1) ? 1.0 : -1.0;
      Point d(static_cast<std::size_t>(p), 0.0);
      Point wt(static_cast<std::size_t>(p), 0.0);
      d[static_cast<std::size_t>(i)] = s * delta;
      wt[static_cast<std::size_t>(i)] = s * w;
      deltas.push_back(std::move(d));
      weights.push_back(std::move(wt));
    }
  }
  return LinearDesign(std::move(deltas), std::move(weights));
}

LinearDesign forward_difference_design(int n, double delta) {
  if (n < 2 || n % 2 != 0) throw InputError("forward_difference_design: budget n must be even and at least 2");
  require_positive(delta, "forward_difference_design: delta");
  const double w = 2.0 / (static_cast<double>(n) * delta);
  std::vector<Point> deltas;
  std::vector<Point> weights;
  for (int j = 0; j < n / 2; ++j) {
    deltas.push_back({delta});
    weights.push_back({w});
    deltas.push_back({0.0});
    weights.push_back({-w});
  }
  return LinearDesign(std::move(deltas), std::move(weights));
}

double optimal_delta(double a, double b, int n, int p) {
  require_positive(a, "optimal_delta: a");
  if (!(b >= 0.0) || !std::isfinite(b)) throw InputError("optimal_delta: b must be nonnegative");
  if (b == 0.0) throw DegenerateError("optimal_delta: zero noise sends the optimal step to 0; use a noiseless rule");
  if (n < 1 || p < 1) throw InputError("optimal_delta: n and p must be at least 1");
  const double per_axis = static_cast<double>(n) / static_cast<double>(p);
  return std::pow(18.0 * b / (a * a), 1.0 / 6.0) * std::pow(per_axis, -1.0 / 6.0);
}

MomentReport moment_conditions(const LinearDesign& design) {
  const auto p = static_cast<std::size_t>(design.dimension());
  const auto& ds = design.deltas();
  const auto& ws = design.weights();

  double constant_sq = 0.0;
  double constant_scale = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    CompensatedSum acc;
    for (const auto& w : ws) acc.add(w[i]);
    constant_sq += acc.value() * acc.value();
  }
  for (const auto& w : ws) constant_scale += norm(w, Norm::l2);

  double linear_sq = 0.0;
  double linear_scale = 1.0;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t k = 0; k < p; ++k) {
      CompensatedSum acc;
      for (std::size_t j = 0; j < ds.size(); ++j) acc.add(ws[j][i] * ds[j][k]);
      const double r = acc.value() - (i == k ? 1.0 : 0.0);
      linear_sq += r * r;
    }
  }
  for (std::size_t j = 0; j < ds.size(); ++j) linear_scale += norm(ws[j], Norm::l2) * norm(ds[j], Norm::l2);

  double quadratic = 0.0;
  double quadratic_scale = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    double sq = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      for (std::size_t l = 0; l < p; ++l) {
        CompensatedSum acc;
        for (std::size_t j = 0; j < ds.size(); ++j) acc.add(ws[j][i] * ds[j][k] * ds[j][l]);
        sq += acc.value() * acc.value();
      }
    }
    quadratic = std::max(quadratic, std::sqrt(sq));
  }
  for (std::size_t j = 0; j < ds.size(); ++j) {
    const double r = norm(ds[j], Norm::l2);
    quadratic_scale += norm(ws[j], Norm::linf) * r * r;
  }

  MomentReport report{std::sqrt(constant_sq), std::sqrt(linear_sq), quadratic, false};
  report.matched = report.constant <= kContractRelTol * constant_scale &&
                   report.linear <= kContractRelTol * linear_scale &&
                   report.quadratic <= kContractRelTol * quadratic_scale;
  return report;
}

bool is_same_sign(const LinearDesign& design) noexcept {
  for (const auto& w : design.weights()) {
    bool pos = false;
    bool neg = false;
    for (double v : w) {
      pos = pos || v > 0.0;
      neg = neg || v < 0.0;
    }
    if (pos && neg) return false;
  }
  return true;
}

Point linear_estimate(const LinearDesign& design, Oracle& oracle, std::span<const double> x0) {
  const auto p = static_cast<std::size_t>(design.dimension());
  if (x0.size() != p) throw InputError("linear_estimate: x0 dimension does not match the design");
  oracle.require(design.size());

  std::vector<CompensatedSum> acc(p);
  Point x(p);
  for (std::size_t j = 0; j < design.size(); ++j) {
    const auto& d = design.deltas()[j];
    for (std::size_t i = 0; i < p; ++i) x[i] = x0[i] + d[i];
    const double y = oracle.sample(x);
    const auto& w = design.weights()[j];
    for (std::size_t i = 0; i < p; ++i) acc[i].add(w[i] * y);
  }
  Point out(p);
  for (std::size_t i = 0; i < p; ++i) out[i] = acc[i].value();
  return out;
}

PerturbationLaw PerturbationLaw::rademacher() {
  return {"rademacher", [](double u) { return u < 0.5 ? -1.0 : 1.0; }};
}

void SPConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("SPConfig: h must be positive and finite");
  if (n < 2 || n % 2 != 0) throw InputError("SPConfig: budget n must be even and at least 2");
  if (!law.from_uniform) throw InputError("SPConfig: perturbation law is empty");
}

Point sp_estimate(const SPConfig& config, Oracle& oracle, std::span<const double> x0) {
  config.validate();
  const std::size_t p = x0.size();
  if (p == 0) throw InputError("sp_estimate: x0 is empty");
  oracle.require(static_cast<std::uint64_t>(config.n));

  const StreamKey key = oracle.stream(domain::perturbation);
  const int pairs = config.n / 2;
  std::vector<CompensatedSum> acc(p);
  Point delta(p), plus(p), minus(p);
  for (int j = 0; j < pairs; ++j) {
    for (std::size_t i = 0; i < p; ++i) {
      delta[i] = config.law.from_uniform(uniform_open(key, static_cast<std::uint64_t>(j), static_cast<std::uint32_t>(i)));
      if (delta[i] == 0.0 || !std::isfinite(delta[i])) {
        throw DistributionError("sp_estimate: perturbation law '" + config.law.name + "' drew " +
                                std::to_string(delta[i]) + " in coordinate " + std::to_string(i));
      }
      plus[i] = x0[i] + config.h * delta[i];
      minus[i] = x0[i] - config.h * delta[i];
    }
    const double difference = (oracle.sample(plus) - oracle.sample(minus)) / (2.0 * config.h);
    for (std::size_t i = 0; i < p; ++i) acc[i].add(difference / delta[i]);
  }
  Point out(p);
  for (std::size_t i = 0; i < p; ++i) out[i] = acc[i].value() / static_cast<double>(pairs);
  return out;
}

}  // namespace zograd
