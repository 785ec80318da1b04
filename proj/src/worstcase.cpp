#include "zograd/worstcase.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "zograd/errors.hpp"

namespace zograd {

namespace {

double sign_of(double v) noexcept { return v < 0.0 ? -1.0 : 1.0; }

}  // namespace

ExtremalFunction::ExtremalFunction(double eps, FunctionClassSpec spec)
    : eps_(eps),
      spec_(std::move(spec)),
      direction_(spec_.p() > 1 && spec_.q() == Norm::linf ? Direction::first_axis : Direction::diagonal) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InputError("extremal function: eps must be positive and finite");
}

double ExtremalFunction::operator()(std::span<const double> x) const {
  const auto p = static_cast<std::size_t>(spec_.p());
  if (x.size() != p) throw InputError("extremal function: dimension mismatch");
  Point d(p);
  for (std::size_t i = 0; i < p; ++i) d[i] = x[i] - spec_.x0()[i];

  double s = 0.0;
  double slope = 0.0;
  if (direction_ == Direction::first_axis) {
    s = d[0];
    slope = eps_ / 2.0;
  } else {
    for (double v : d) s += v;
    slope = eps_ / (2.0 * std::sqrt(static_cast<double>(p)));
  }
  const double r = norm(d, spec_.q());
  const double excess = slope * std::abs(s) - spec_.a() / 6.0 * r * r * r;
  if (!(excess > 0.0)) return 0.0;
  return static_cast<double>(orientation_) * sign_of(s) * excess;
}

Function ExtremalFunction::as_function() const {
  return [f = std::make_shared<const ExtremalFunction>(*this)](std::span<const double> x) { return (*f)(x); };
}

Point ExtremalFunction::gradient() const {
  const auto p = static_cast<std::size_t>(spec_.p());
  Point xi(p, 0.0);
  if (direction_ == Direction::first_axis) {
    xi[0] = eps_ / 2.0;
  } else {
    std::fill(xi.begin(), xi.end(), eps_ / (2.0 * std::sqrt(static_cast<double>(p))));
  }
  for (double& v : xi) v *= orientation_;
  return xi;
}

double ExtremalFunction::sup_abs() const { return inverse_modulus(eps_, spec_.a(), spec_.p(), spec_.q()) / 2.0; }

// Along x0 + t v with ||v||_q = 1 the function is c t - (a/6) t^3 where
// c = xi . v; it peaks at t = sqrt(2c/a) and returns to zero at sqrt(6c/a).
double ExtremalFunction::ray_length_at(double ratio) const {
  const auto p = static_cast<double>(spec_.p());
  double c = eps_ / 2.0;
  if (direction_ == Direction::diagonal && spec_.q() == Norm::l1) c = eps_ / (2.0 * std::sqrt(p));
  return std::sqrt(ratio * c / spec_.a());
}

namespace {

Point along_ray(const ExtremalFunction& f, double t) {
  const auto& spec = f.spec();
  const auto p = static_cast<std::size_t>(spec.p());
  Point x = spec.x0();
  if (f.direction() == ExtremalFunction::Direction::first_axis) {
    x[0] += t;
    return x;
  }
  // Unit-q-norm diagonal: 1/p per axis for q = 1, 1/sqrt(p) for q = 2,
  // and 1 for q = inf (only reached when p == 1).
  double per_axis = 1.0;
  if (spec.q() == Norm::l1) per_axis = 1.0 / static_cast<double>(p);
  if (spec.q() == Norm::l2) per_axis = 1.0 / std::sqrt(static_cast<double>(p));
  for (std::size_t i = 0; i < p; ++i) x[i] += t * per_axis;
  return x;
}

}  // namespace

Point ExtremalFunction::maximizer() const { return along_ray(*this, ray_length_at(2.0)); }

Point ExtremalFunction::zero_boundary() const { return along_ray(*this, ray_length_at(6.0)); }

ExtremalFunction ExtremalFunction::negated() const {
  ExtremalFunction copy(*this);
  copy.orientation_ = -orientation_;
  return copy;
}

ExtremalFunction f_star_1d(double eps, double a, double x0) {
  if (!(a > 0.0)) throw InputError("f_star_1d: a must be positive");
  return ExtremalFunction(eps, FunctionClassSpec(a, Point{x0}, Norm::l2));
}

ExtremalFunction f_star_multi(double eps, const FunctionClassSpec& spec) { return ExtremalFunction(eps, spec); }

double inverse_modulus(double eps, double a, int p, Norm q) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InputError("inverse_modulus: eps must be positive and finite");
  if (!(a > 0.0) || !std::isfinite(a)) throw InputError("inverse_modulus: a must be positive and finite");
  if (p < 1) throw InputError("inverse_modulus: p must be at least 1");
  const double base = 2.0 * eps / 3.0 * std::sqrt(eps / a);
  if (q == Norm::l1 && p > 1) return base * std::pow(static_cast<double>(p), -0.75);
  return base;
}

double grid_sup_abs(const ExtremalFunction& f, std::size_t points) {
  if (points < 2) throw InputError("grid_sup_abs: need at least 2 grid points");
  const Point& x0 = f.spec().x0();
  const Point end = f.zero_boundary();
  Point x(x0.size());
  double best = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = x0[i] + t * (end[i] - x0[i]);
    best = std::max(best, std::abs(f(x)));
  }
  return best;
}

double SpikeAdversary::operator()(std::span<const double> x) const {
  const auto it = heights_.find(Point(x.begin(), x.end()));
  return it == heights_.end() ? 0.0 : it->second;
}

Function SpikeAdversary::as_function() const {
  return [f = std::make_shared<const SpikeAdversary>(*this)](std::span<const double> x) { return (*f)(x); };
}

SpikeAdversary spike_adversary(const LinearDesign& design, const FunctionClassSpec& spec, SpikeSign sign) {
  const int p = spec.p();
  if (design.dimension() != p) throw InputError("spike_adversary: design dimension does not match the class");
  const auto& ds = design.deltas();
  const auto& ws = design.weights();

  int component = -1;
  switch (sign.rule) {
    case SpikeSign::Rule::component:
      if (sign.component < 0 || sign.component >= p) {
        throw InputError("spike_adversary: component " + std::to_string(sign.component) + " outside [0, p)");
      }
      component = sign.component;
      break;
    case SpikeSign::Rule::auto_component: {
      double best = -1.0;
      for (int i = 0; i < p; ++i) {
        double mass = 0.0;
        for (std::size_t j = 0; j < ds.size(); ++j) {
          const double r = norm(ds[j], spec.q());
          mass += std::abs(ws[j][static_cast<std::size_t>(i)]) * r * r * r;
        }
        if (mass > best) {
          best = mass;
          component = i;
        }
      }
      break;
    }
    case SpikeSign::Rule::common:
      break;
  }

  SpikeAdversary adversary(spec);
  adversary.component_ = component;
  const auto pu = static_cast<std::size_t>(p);
  std::map<Point, const Point*> weight_at;
  for (std::size_t j = 0; j < ds.size(); ++j) {
    Point x(pu);
    for (std::size_t i = 0; i < pu; ++i) x[i] = spec.x0()[i] + ds[j][i];

    const auto [it, inserted] = weight_at.emplace(x, &ws[j]);
    if (!inserted && *it->second != ws[j]) {
      throw InputError("spike_adversary: design point " + std::to_string(j) +
                       " repeats an earlier point with a different weight");
    }

    double key_weight = 0.0;
    bool silent = true;  // the governing weight is zero, so the spike has no height
    if (component >= 0) {
      key_weight = ws[j][static_cast<std::size_t>(component)];
      silent = key_weight == 0.0;
    } else {
      for (double v : ws[j]) {
        key_weight += v;
        silent = silent && v == 0.0;
      }
    }
    const int s = key_weight < 0.0 ? -1 : 1;
    const double r = norm(ds[j], spec.q());
    adversary.heights_[x] = silent ? 0.0 : spec.a() / 6.0 * r * r * r * s;
    adversary.signs_.push_back(s);
    adversary.support_.push_back(std::move(x));
  }
  return adversary;
}

}  // namespace zograd
