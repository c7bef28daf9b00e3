#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "colombeau/integrator.hpp"

namespace colombeau {

/// Smooth step: 0 for s <= 0, 1 for s >= 1, built from exp(-1/s).
double smooth_step(double s);
double smooth_step_derivative(double s);

/// f~ on [a, b] from f on [a1, b1] = [f.t_lo(), f.t_hi()]:
///   f(a1)                        on [a, a1 + eta]
///   psi f + (1 - psi) f(a1)      on [a1 + eta, a1 + 2 eta]
///   f                            on [a1 + 2 eta, b1 - 2 eta]
/// and symmetrically on the right, psi rising over [a1 + eta, a1 + 2 eta].
class ExtendedTrajectory : public Trajectory {
 public:
  ExtendedTrajectory(std::shared_ptr<const Trajectory> f, double a, double b, double eta);
  std::size_t dim() const override { return f_->dim(); }
  double t_lo() const override { return a_; }
  double t_hi() const override { return b_; }
  void eval(double t, std::span<double> out) const override;
  void derivative(double t, std::span<double> out) const override;

  double eta() const { return eta_; }
  const Trajectory& inner() const { return *f_; }
  /// psi(t)
  double cutoff(double t) const;

 private:
  std::shared_ptr<const Trajectory> f_;
  double a_, b_, a1_, b1_, eta_;
  std::vector<double> fa1_, fb1_;
};

struct ExtensionOptions {
  /// Known bound on |f'|. With it eta is taken from |f(t) - f(a1)| <= a |t - a1|.
  std::optional<double> speed_bound;
  /// Samples used to test the ball condition on [a1, a1 + 2 eta].
  std::size_t probes = 64;
};

/// Extends f (defined on [a1, b1]) to [a, b] so that it equals f on a
/// neighbourhood of [a2, b2] and stays within f([a1, b1]) union the
/// delta-balls around f(a1), f(b1). Throws EtaNotFound.
std::shared_ptr<ExtendedTrajectory> extend_smoothly(std::shared_ptr<const Trajectory> f, double a,
                                                    double b, double a2, double b2, double delta,
                                                    const ExtensionOptions& options = {});

}  // namespace colombeau
