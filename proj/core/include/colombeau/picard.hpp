#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "colombeau/integrator.hpp"

namespace colombeau {

struct PicardOptions {
  std::size_t panels_per_side = 8;
  std::size_t degree = 16;
  std::size_t max_iterations = 60;
  double tol = 1e-13;
};

/// Piecewise polynomial on Chebyshev-Lobatto panels. Derivatives come from
/// the right-hand side, u'(t) = f(t, u(t)).
class PicardTrajectory : public Trajectory {
 public:
  PicardTrajectory(OdeSystem sys, std::vector<double> breaks, std::vector<double> nodes,
                   std::vector<double> values);
  std::size_t dim() const override { return sys_.dim; }
  double t_lo() const override { return breaks_.front(); }
  double t_hi() const override { return breaks_.back(); }
  void eval(double t, std::span<double> out) const override;
  void derivative(double t, std::span<double> out) const override;

 private:
  OdeSystem sys_;
  std::vector<double> breaks_;   // panel ends, increasing
  std::vector<double> nodes_;    // reference nodes on [-1, 1]
  std::vector<double> weights_;  // barycentric weights
  std::vector<double> values_;   // panel-major: (panel, node, component)
};

struct PicardResult {
  std::shared_ptr<PicardTrajectory> trajectory;
  std::size_t iterations = 0;
  /// Sup-norm size of the last update.
  double last_update = 0.0;
};

/// Iterates (T f)(t) = x0 + int_{t_start}^t f(s, f(s)) ds on [lo, hi] until
/// the update falls below tol (relative). Throws PicardNotConverged.
PicardResult picard_solve(const OdeSystem& sys, double t_start, std::span<const double> x0, double lo,
                          double hi, const PicardOptions& options = {});

}  // namespace colombeau
