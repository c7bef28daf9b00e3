#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colombeau/box.hpp"

namespace colombeau {

/// Finite set of eps values on which every net is sampled. Values are
/// strictly decreasing in (0, 1]; hypotheses are asserted for eps <= eps0.
class EpsGrid {
 public:
  /// The default dyadic grid.
  EpsGrid() : EpsGrid(dyadic()) {}
  EpsGrid(std::vector<double> values, double eps0);

  /// eps_k = 2^{-k}, k = k0..k1.
  static EpsGrid dyadic(int k0 = 0, int k1 = 24, double eps0 = 0.125);

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double eps0() const noexcept { return eps0_; }

  bool active(std::size_t i) const { return values_[i] <= eps0_; }
  /// Indices with eps <= eps0, largest eps first.
  std::vector<std::size_t> active_indices() const;
  std::size_t active_count() const;

  std::optional<std::size_t> find(double eps) const;
  std::size_t index_of(double eps) const;

  EpsGrid with_eps0(double eps0) const { return EpsGrid(values_, eps0); }
  /// The grid restricted to eps <= eps0.
  EpsGrid restricted() const;

  friend bool operator==(const EpsGrid&, const EpsGrid&) = default;

  static constexpr std::size_t kMinActivePoints = 8;

 private:
  std::vector<double> values_;
  double eps0_ = 1.0;
};

/// A representative (r_eps)_eps of a generalized number, sampled on a grid.
class NumberNet {
 public:
  /// Empty placeholder (no samples).
  NumberNet() = default;
  NumberNet(EpsGrid grid, std::vector<double> samples);

  static NumberNet from(const EpsGrid& grid, const std::function<double(double)>& f);
  static NumberNet constant(const EpsGrid& grid, double c);

  const EpsGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& samples() const noexcept { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const noexcept { return samples_.size(); }

  /// |a - b| sample-wise.
  friend NumberNet abs_difference(const NumberNet& a, const NumberNet& b);
  friend NumberNet operator+(const NumberNet& a, const NumberNet& b);

 private:
  EpsGrid grid_;
  std::vector<double> samples_;
};

/// A representative (x_eps)_eps of a generalized point.
class PointNet {
 public:
  /// Empty placeholder.
  PointNet() : dim_(0) {}
  PointNet(EpsGrid grid, std::size_t dim, std::vector<double> samples,
           std::optional<Box> ambient = std::nullopt);

  static PointNet from(const EpsGrid& grid, std::size_t dim,
                       const std::function<void(double, std::span<double>)>& f,
                       std::optional<Box> ambient = std::nullopt);
  static PointNet constant(const EpsGrid& grid, std::span<const double> x);

  const EpsGrid& grid() const noexcept { return grid_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> operator[](std::size_t i) const {
    return {samples_.data() + i * dim_, dim_};
  }
  const std::optional<Box>& ambient() const noexcept { return ambient_; }
  NumberNet component(std::size_t c) const;

  /// Bounding box of the samples with eps <= eps0.
  Box active_hull() const;

 private:
  EpsGrid grid_;
  std::size_t dim_;
  std::vector<double> samples_;
  std::optional<Box> ambient_;
};

enum class GrowthKind { Moderate, Negligible, SuperPolynomial, Inconclusive };

std::string to_string(GrowthKind kind);

/// Least-squares line through (log eps, log |r_eps|).
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// RMS deviation from the line in log space.
  double residual = 0.0;
  std::size_t points = 0;
};

struct GrowthClass {
  GrowthKind kind = GrowthKind::Inconclusive;
  /// N for Moderate (|r| <= C eps^-N), m_max for Negligible.
  int order = 0;
  /// Witness constant C of the Moderate bound.
  double constant = 0.0;
  LogLogFit fit;
  /// Samples at or below the noise floor (treated as zero).
  std::size_t floor_points = 0;

  bool moderate() const { return kind == GrowthKind::Moderate || kind == GrowthKind::Negligible; }
  bool negligible_to(int m) const { return kind == GrowthKind::Negligible && order >= m; }
  std::string describe() const;
};

struct GrowthOptions {
  /// Absolute floor: |r_eps| at or below it is indistinguishable from zero.
  double noise_floor = 0.0;
  /// Optional per-grid-index floor, combined with noise_floor by max.
  std::vector<double> floor_per_eps;
  double max_residual = 0.1;
  /// Relative slack of the witness constant (taken at the three largest eps).
  /// Lets ratios |r| eps^N that converge from below pass; over the default
  /// grid 2% still separates orders that differ by ~0.0015.
  double relative_slack = 0.02;
};

std::vector<int> default_orders(int max_order = 10);

GrowthClass classify_growth(const NumberNet& net, std::span<const int> orders_to_test,
                            const GrowthOptions& options = {});

LogLogFit fit_loglog(const NumberNet& net, const GrowthOptions& options = {});

/// Linear least squares of r_eps against log(1/eps) over eps <= eps0.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  std::size_t points = 0;
};
LinearFit fit_vs_log_inverse(const NumberNet& net);

/// Numerical surrogate for "sup is bounded uniformly in eps <= eps0":
/// no growth trend in log-log (slope >= -0.05) and no late rise (the max
/// over the smaller half of the eps values stays within 5% of the max over
/// the larger half).
struct BoundednessReport {
  bool bounded = false;
  double max_value = 0.0;
  /// Fitted N in |r| ~ eps^{-N}; 0 when no growth.
  double growth_order = 0.0;
  LogLogFit fit;
};
BoundednessReport check_bounded(const NumberNet& net);

struct EquivalenceReport {
  bool equivalent = false;
  GrowthClass difference;
};

EquivalenceReport nets_equivalent(const NumberNet& a, const NumberNet& b, int m_test);

struct NearStandardResult {
  std::optional<std::vector<double>> limit;
  bool standard = false;
};

std::vector<double> default_tolerance_schedule();

NearStandardResult near_standard_limit(const PointNet& p,
                                       std::span<const double> tol_schedule);
inline NearStandardResult near_standard_limit(const PointNet& p) {
  const auto tol = default_tolerance_schedule();
  return near_standard_limit(p, tol);
}

}  // namespace colombeau
