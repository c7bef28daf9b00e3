#include "colombeau/box.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "colombeau/errors.hpp"

namespace colombeau {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Box::Box(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) {
    throw Error(ErrorCode::InvalidArgument, "box bounds have different dimensions");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (std::isnan(lower_[i]) || std::isnan(upper_[i]) || lower_[i] > upper_[i]) {
      throw Error(ErrorCode::InvalidArgument, "box side " + std::to_string(i) + " is empty");
    }
  }
}

Box Box::point(std::span<const double> x) {
  return Box(std::vector<double>(x.begin(), x.end()), std::vector<double>(x.begin(), x.end()));
}

Box Box::cube(std::span<const double> center, double radius) {
  std::vector<double> lo(center.begin(), center.end());
  std::vector<double> hi = lo;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    lo[i] -= radius;
    hi[i] += radius;
  }
  return Box(std::move(lo), std::move(hi));
}

Box Box::whole_space(std::size_t dim) {
  return Box(std::vector<double>(dim, -kInf), std::vector<double>(dim, kInf));
}

bool Box::bounded() const noexcept {
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i])) return false;
  }
  return true;
}

bool Box::has_interior() const noexcept {
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!(lower_[i] < upper_[i])) return false;
  }
  return true;
}

bool Box::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) return false;
  }
  return true;
}

bool Box::contains_interior(std::span<const double> x) const {
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!(x[i] > lower_[i] && x[i] < upper_[i])) return false;
  }
  return true;
}

bool Box::contains(const Box& inner) const {
  for (std::size_t i = 0; i < dim(); ++i) {
    if (inner.lower_[i] < lower_[i] || inner.upper_[i] > upper_[i]) return false;
  }
  return true;
}

double Box::depth(std::span<const double> x) const {
  double d = kInf;
  for (std::size_t i = 0; i < dim(); ++i) {
    d = std::min({d, x[i] - lower_[i], upper_[i] - x[i]});
  }
  return d;
}

double Box::margin_of(const Box& inner) const {
  double m = kInf;
  for (std::size_t i = 0; i < dim(); ++i) {
    m = std::min({m, inner.lower_[i] - lower_[i], upper_[i] - inner.upper_[i]});
  }
  return m;
}

Box Box::expanded(double r) const {
  std::vector<double> lo = lower_, hi = upper_;
  for (std::size_t i = 0; i < dim(); ++i) {
    lo[i] -= r;
    hi[i] += r;
  }
  return Box(std::move(lo), std::move(hi));
}

Box Box::scaled_about_center(double factor) const {
  std::vector<double> lo = lower_, hi = upper_;
  for (std::size_t i = 0; i < dim(); ++i) {
    const double c = 0.5 * (lower_[i] + upper_[i]);
    const double half = 0.5 * (upper_[i] - lower_[i]) * factor;
    lo[i] = c - half;
    hi[i] = c + half;
  }
  return Box(std::move(lo), std::move(hi));
}

std::vector<double> Box::center() const {
  std::vector<double> c(dim());
  for (std::size_t i = 0; i < dim(); ++i) c[i] = 0.5 * (lower_[i] + upper_[i]);
  return c;
}

Box Box::exhaustion(int j) const {
  std::vector<double> lo = lower_, hi = upper_;
  const double cut = std::ldexp(1.0, j);
  for (std::size_t i = 0; i < dim(); ++i) {
    const bool lo_fin = std::isfinite(lower_[i]);
    const bool hi_fin = std::isfinite(upper_[i]);
    if (lo_fin && hi_fin) {
      const double step = (upper_[i] - lower_[i]) * std::ldexp(1.0, -(j + 1));
      lo[i] = lower_[i] + step;
      hi[i] = upper_[i] - step;
      continue;
    }
    // Half-infinite sides: the finite end moves in by 2^{-(j+1)}, the open
    // end is cut at distance 2^j from it.
    if (lo_fin) {
      lo[i] = lower_[i] + std::ldexp(1.0, -(j + 1));
      hi[i] = lower_[i] + cut;
    } else if (hi_fin) {
      hi[i] = upper_[i] - std::ldexp(1.0, -(j + 1));
      lo[i] = upper_[i] - cut;
    } else {
      lo[i] = -cut;
      hi[i] = cut;
    }
  }
  return Box(std::move(lo), std::move(hi));
}

std::string Box::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < dim(); ++i) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s[%.6g, %.6g]", i ? " x " : "", lower_[i], upper_[i]);
    s += buf;
  }
  return s;
}

Box product(const Box& a, const Box& b) {
  std::vector<double> lo = a.lower(), hi = a.upper();
  lo.insert(lo.end(), b.lower().begin(), b.lower().end());
  hi.insert(hi.end(), b.upper().begin(), b.upper().end());
  return Box(std::move(lo), std::move(hi));
}

void PointSet::push_back(std::span<const double> x) {
  if (dim_ == 0) {
    ++count_;
    return;
  }
  coords_.insert(coords_.end(), x.begin(), x.end());
}

std::size_t lattice_points_per_axis(std::size_t dim) {
  switch (dim) {
    case 0:
      return 1;
    case 1:
    case 2:
      return 257;
    case 3:
      return 33;
    case 4:
      return 15;
    case 5:
      return 9;
    case 6:
      return 7;
    default:
      return 3;
  }
}

unsigned nth_prime(std::size_t i) {
  static constexpr unsigned primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                        41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};
  return primes[i % (sizeof primes / sizeof primes[0])];
}

double halton(std::size_t index, unsigned prime) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= prime;
    r += f * static_cast<double>(index % prime);
    index /= prime;
  }
  return r;
}

PointSet sample_box(const Box& box, std::size_t per_axis, std::size_t interior_probes) {
  if (!box.bounded()) {
    throw Error(ErrorCode::InvalidArgument, "cannot sample an unbounded box " + box.to_string());
  }
  const std::size_t d = box.dim();
  if (per_axis == 0) per_axis = lattice_points_per_axis(d);
  PointSet out(d);
  if (d == 0) {
    out.push_back({});
    return out;
  }

  std::vector<std::size_t> counts(d);
  for (std::size_t i = 0; i < d; ++i) counts[i] = box.width(i) > 0.0 ? per_axis : 1;

  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  while (true) {
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = counts[i] == 1
                 ? box.lower(i)
                 : box.lower(i) + box.width(i) * static_cast<double>(idx[i]) /
                                      static_cast<double>(counts[i] - 1);
    }
    out.push_back(x);
    std::size_t k = 0;
    while (k < d && ++idx[k] == counts[k]) idx[k++] = 0;
    if (k == d) break;
  }

  for (std::size_t n = 1; n <= interior_probes; ++n) {
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = box.lower(i) + box.width(i) * halton(n, nth_prime(i));
    }
    out.push_back(x);
  }
  return out;
}

double sup_norm(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace colombeau
