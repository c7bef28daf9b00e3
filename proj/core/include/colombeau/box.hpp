#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace colombeau {

/// Axis-aligned box [lower, upper]. Stands in for open sets (interior) and
/// compacts (closure). Bounds may be infinite, which is how all of R^n is
/// spelled. Degenerate sides (lower == upper) describe compacts such as {x0}.
class Box {
 public:
  Box() = default;
  Box(std::vector<double> lower, std::vector<double> upper);

  static Box point(std::span<const double> x);
  static Box cube(std::span<const double> center, double radius);
  static Box whole_space(std::size_t dim);
  static Box interval(double lo, double hi) { return Box({lo}, {hi}); }

  std::size_t dim() const noexcept { return lower_.size(); }
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }
  double lower(std::size_t i) const { return lower_[i]; }
  double upper(std::size_t i) const { return upper_[i]; }
  double width(std::size_t i) const { return upper_[i] - lower_[i]; }

  bool bounded() const noexcept;
  /// Every side has positive width, so the interior is a non-empty open set.
  bool has_interior() const noexcept;

  bool contains(std::span<const double> x) const;
  bool contains_interior(std::span<const double> x) const;
  bool contains(const Box& inner) const;

  /// Signed distance from x to the complement of the interior (max-norm);
  /// positive iff x lies in the open box.
  double depth(std::span<const double> x) const;

  /// Smallest gap between the sides of `inner` and the sides of this box.
  /// Positive iff inner is compactly contained in the interior.
  double margin_of(const Box& inner) const;
  bool compactly_contains(const Box& inner) const { return margin_of(inner) > 0.0; }

  Box expanded(double r) const;
  Box scaled_about_center(double factor) const;
  std::vector<double> center() const;

  /// Compact member V_j of the exhaustion of the open box: finite sides move
  /// inwards by width * 2^{-(j+1)}, infinite sides are cut at +-2^j.
  Box exhaustion(int j) const;

  std::string to_string() const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

Box product(const Box& a, const Box& b);

/// Flat storage for a list of points of fixed dimension.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? count_ : coords_.size() / dim_; }
  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  void push_back(std::span<const double> x);

 private:
  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  std::vector<double> coords_;
};

/// Points per axis used for sup estimates: 257 for dim <= 2, 33 for dim 3,
/// then progressively coarser so the lattice stays below ~10^5 points.
std::size_t lattice_points_per_axis(std::size_t dim);

/// Deterministic sample of a closed bounded box: a tensor lattice with
/// `per_axis` points per axis (0 picks lattice_points_per_axis) plus
/// `interior_probes` Halton points from the interior.
PointSet sample_box(const Box& box, std::size_t per_axis = 0, std::size_t interior_probes = 64);

/// Radical-inverse Halton sequence element `index` (1-based) in base `prime`.
double halton(std::size_t index, unsigned prime);
unsigned nth_prime(std::size_t i);

double sup_norm(std::span<const double> x);
double sup_distance(std::span<const double> a, std::span<const double> b);

}  // namespace colombeau
