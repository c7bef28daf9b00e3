#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "colombeau/box.hpp"
#include "colombeau/function_net.hpp"

namespace colombeau {

/// x' = f(t, x) in R^dim, with optional t-windows holding sharp features.
struct OdeSystem {
  std::size_t dim = 0;
  std::function<void(double t, std::span<const double> x, std::span<double> dx)> rhs;
  std::vector<Window> windows;
};

/// A continuous trajectory on [t_lo, t_hi] with derivative access.
class Trajectory {
 public:
  virtual ~Trajectory() = default;
  virtual std::size_t dim() const = 0;
  virtual double t_lo() const = 0;
  virtual double t_hi() const = 0;
  virtual void eval(double t, std::span<double> out) const = 0;
  virtual void derivative(double t, std::span<double> out) const = 0;

  std::vector<double> operator()(double t) const {
    std::vector<double> v(dim());
    eval(t, v);
    return v;
  }
};

struct IntegratorOptions {
  double rtol = 1e-9;
  double atol = 1e-9;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0: automatic
  std::size_t max_steps = 2'000'000;
  /// Leaving this (closed) box stops integration with an EscapeError.
  std::optional<Box> stay_in;
};

/// Dormand-Prince 5(4) trajectory with continuous extension. Integration may
/// run backwards (t_end < t_start).
class DenseTrajectory : public Trajectory {
 public:
  DenseTrajectory(std::size_t dim, double t_start) : dim_(dim), t_start_(t_start), t_end_(t_start) {}

  std::size_t dim() const override { return dim_; }
  double t_lo() const override { return std::min(t_start_, t_end_); }
  double t_hi() const override { return std::max(t_start_, t_end_); }
  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  void eval(double t, std::span<double> out) const override;
  void derivative(double t, std::span<double> out) const override;

  /// Step boundaries t_0 = t_start, ..., t_K = t_end.
  std::vector<double> mesh() const;
  std::size_t steps() const { return times_.size(); }
  std::size_t rejected() const { return rejected_; }

  // used by the stepper
  void push_step(double t, double h, std::span<const double> coeffs);
  void set_start_value(std::span<const double> x0) { x0_.assign(x0.begin(), x0.end()); }
  void note_rejection() { ++rejected_; }

 private:
  std::size_t locate(double t) const;
  std::size_t dim_;
  double t_start_, t_end_;
  std::vector<double> times_;   // step start times
  std::vector<double> hs_;      // signed step sizes
  std::vector<double> coeffs_;  // 5 * dim per step
  std::vector<double> x0_;
  std::size_t rejected_ = 0;
};

/// Adaptive integration from (t_start, x0) to t_end. Throws EscapeError when
/// options.stay_in is left and StiffnessFailure on step-size underflow.
std::shared_ptr<DenseTrajectory> integrate(const OdeSystem& sys, double t_start,
                                           std::span<const double> x0, double t_end,
                                           const IntegratorOptions& options = {});

/// Fixed steps on a given mesh (the mesh of an earlier solve). Used for
/// finite differences in parameters, where both solves must share the mesh.
std::shared_ptr<DenseTrajectory> integrate_on_mesh(const OdeSystem& sys, std::span<const double> x0,
                                                   std::span<const double> mesh);

/// Joins a backward and a forward trajectory that start at the same point.
class TwoSidedTrajectory : public Trajectory {
 public:
  TwoSidedTrajectory(std::shared_ptr<const Trajectory> backward,
                     std::shared_ptr<const Trajectory> forward, double t_split,
                     std::vector<double> x_split);
  std::size_t dim() const override { return forward_->dim(); }
  double t_lo() const override { return backward_->t_lo(); }
  double t_hi() const override { return forward_->t_hi(); }
  void eval(double t, std::span<double> out) const override;
  void derivative(double t, std::span<double> out) const override;
  const Trajectory& backward() const { return *backward_; }
  const Trajectory& forward() const { return *forward_; }

 private:
  std::shared_ptr<const Trajectory> backward_, forward_;
  double t_split_;
  std::vector<double> x_split_;
};

/// Integrates both ways from (t_start, x0) to cover [lo, hi].
std::shared_ptr<TwoSidedTrajectory> integrate_both_ways(const OdeSystem& sys, double t_start,
                                                        std::span<const double> x0, double lo,
                                                        double hi, const IntegratorOptions& options = {});

/// Replays the meshes of a two-sided reference solve.
std::shared_ptr<TwoSidedTrajectory> integrate_both_ways_on_mesh(const OdeSystem& sys,
                                                                std::span<const double> x0,
                                                                const TwoSidedTrajectory& reference);

}  // namespace colombeau
