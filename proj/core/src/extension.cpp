#include "colombeau/extension.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "colombeau/box.hpp"
#include "colombeau/errors.hpp"

namespace colombeau {

namespace {

double e_side(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }
double e_side_d(double s) { return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0; }

}  // namespace

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double p = e_side(s), q = e_side(1.0 - s);
  return p / (p + q);
}

double smooth_step_derivative(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double p = e_side(s), q = e_side(1.0 - s);
  const double dp = e_side_d(s), dq = -e_side_d(1.0 - s);
  const double den = p + q;
  return (dp * den - p * (dp + dq)) / (den * den);
}

ExtendedTrajectory::ExtendedTrajectory(std::shared_ptr<const Trajectory> f, double a, double b, double eta)
    : f_(std::move(f)), a_(a), b_(b), a1_(f_->t_lo()), b1_(f_->t_hi()), eta_(eta) {
  fa1_ = (*f_)(a1_);
  fb1_ = (*f_)(b1_);
}

double ExtendedTrajectory::cutoff(double t) const {
  if (t <= a1_ + eta_ || t >= b1_ - eta_) return 0.0;
  if (t >= a1_ + 2 * eta_ && t <= b1_ - 2 * eta_) return 1.0;
  if (t < a1_ + 2 * eta_) return smooth_step((t - a1_ - eta_) / eta_);
  return smooth_step((b1_ - eta_ - t) / eta_);
}

void ExtendedTrajectory::eval(double t, std::span<double> out) const {
  const std::size_t n = dim();
  if (t <= a1_ + eta_) {
    std::copy(fa1_.begin(), fa1_.end(), out.begin());
    return;
  }
  if (t >= b1_ - eta_) {
    std::copy(fb1_.begin(), fb1_.end(), out.begin());
    return;
  }
  if (t >= a1_ + 2 * eta_ && t <= b1_ - 2 * eta_) {
    f_->eval(t, out);
    return;
  }
  const double psi = cutoff(t);
  const auto& c = t < a1_ + 2 * eta_ ? fa1_ : fb1_;
  f_->eval(t, out);
  for (std::size_t i = 0; i < n; ++i) out[i] = psi * out[i] + (1.0 - psi) * c[i];
}

void ExtendedTrajectory::derivative(double t, std::span<double> out) const {
  const std::size_t n = dim();
  if (t <= a1_ + eta_ || t >= b1_ - eta_) {
    std::fill(out.begin(), out.begin() + n, 0.0);
    return;
  }
  if (t >= a1_ + 2 * eta_ && t <= b1_ - 2 * eta_) {
    f_->derivative(t, out);
    return;
  }
  const bool left = t < a1_ + 2 * eta_;
  const double psi = cutoff(t);
  const double dpsi = left ? smooth_step_derivative((t - a1_ - eta_) / eta_) / eta_
                           : -smooth_step_derivative((b1_ - eta_ - t) / eta_) / eta_;
  const auto& c = left ? fa1_ : fb1_;
  std::vector<double> x(n);
  f_->eval(t, x);
  f_->derivative(t, out);
  for (std::size_t i = 0; i < n; ++i) out[i] = psi * out[i] + dpsi * (x[i] - c[i]);
}

std::shared_ptr<ExtendedTrajectory> extend_smoothly(std::shared_ptr<const Trajectory> f, double a, double b,
                                                    double a2, double b2, double delta,
                                                    const ExtensionOptions& opt) {
  const double a1 = f->t_lo(), b1 = f->t_hi();
  if (!(a <= a1 && a1 < a2 && a2 < b2 && b2 < b1 && b1 <= b) || !(delta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "extend_smoothly needs a <= a1 < a2 < b2 < b1 <= b and delta > 0");
  }
  const double eta_max = 0.999 * std::min(a2 - a1, b1 - b2) / 3.0;
  const auto fa = (*f)(a1);
  const auto fb = (*f)(b1);

  auto fits = [&](double eta) {
    for (std::size_t k = 0; k <= opt.probes; ++k) {
      const double s = 2.0 * eta * double(k) / double(opt.probes);
      if (sup_distance((*f)(a1 + s), fa) >= delta) return false;
      if (sup_distance((*f)(b1 - s), fb) >= delta) return false;
    }
    return true;
  };

  double eta = 0.0;
  if (opt.speed_bound && *opt.speed_bound > 0.0) {
    eta = std::min(eta_max, 0.99 * delta / (2.0 * *opt.speed_bound));
  } else if (opt.speed_bound) {
    eta = eta_max;  // constant trajectory
  } else if (fits(eta_max)) {
    eta = eta_max;
  } else {
    double lo = 0.0, hi = eta_max;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (fits(mid) ? lo : hi) = mid;
    }
    eta = lo;
  }
  // an eta below the resolution of t would not separate the seams
  const double eta_min = 64.0 * DBL_EPSILON * std::max({1.0, std::abs(a1), std::abs(b1)});
  if (!(eta > eta_min)) {
    throw Error(ErrorCode::EtaNotFound, "no eta keeps the trajectory within delta = " + std::to_string(delta) +
                                            " of its end values");
  }
  return std::make_shared<ExtendedTrajectory>(std::move(f), a, b, eta);
}

}  // namespace colombeau
