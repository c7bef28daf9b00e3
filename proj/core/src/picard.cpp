#include "colombeau/picard.hpp"

#include <algorithm>
#include <cmath>

#include "colombeau/errors.hpp"
#include "colombeau/quadrature.hpp"

namespace colombeau {

PicardTrajectory::PicardTrajectory(OdeSystem sys, std::vector<double> breaks, std::vector<double> nodes,
                                   std::vector<double> values)
    : sys_(std::move(sys)), breaks_(std::move(breaks)), nodes_(std::move(nodes)), values_(std::move(values)) {
  weights_ = barycentric_weights(nodes_);
}

void PicardTrajectory::eval(double t, std::span<double> out) const {
  const std::size_t n = sys_.dim;
  const std::size_t np = nodes_.size();
  const double slack = 1e-12 * (1.0 + std::abs(t_lo()) + std::abs(t_hi()));
  if (t < t_lo() - slack || t > t_hi() + slack) {
    throw Error(ErrorCode::InvalidArgument, "Picard trajectory evaluated outside its interval");
  }
  t = std::clamp(t, t_lo(), t_hi());
  const std::size_t panels = breaks_.size() - 1;
  std::size_t k = static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), t) - breaks_.begin());
  k = std::min(k == 0 ? 0 : k - 1, panels - 1);
  const double a = breaks_[k], b = breaks_[k + 1];
  const double s = (2.0 * t - a - b) / (b - a);
  const double* v = values_.data() + k * np * n;
  // exact hit on a node
  for (std::size_t j = 0; j < np; ++j) {
    const double tj = j == 0 ? a : j + 1 == np ? b : 0.5 * (a + b) + 0.5 * (b - a) * nodes_[j];
    if (t == tj) {
      std::copy(v + j * n, v + (j + 1) * n, out.begin());
      return;
    }
  }
  std::vector<double> l;
  lagrange_basis(nodes_, weights_, s, l);
  std::fill(out.begin(), out.begin() + n, 0.0);
  for (std::size_t j = 0; j < np; ++j) {
    for (std::size_t i = 0; i < n; ++i) out[i] += l[j] * v[j * n + i];
  }
}

void PicardTrajectory::derivative(double t, std::span<double> out) const {
  std::vector<double> x(sys_.dim);
  eval(t, x);
  sys_.rhs(t, x, out);
}

PicardResult picard_solve(const OdeSystem& sys, double t_start, std::span<const double> x0, double lo,
                          double hi, const PicardOptions& opt) {
  const std::size_t n = sys.dim;
  if (!(lo <= t_start && t_start <= hi)) {
    throw Error(ErrorCode::InvalidArgument, "Picard start time outside the interval");
  }
  const auto nodes = chebyshev_lobatto(opt.degree);
  const std::size_t np = nodes.size();
  const auto S = spectral_integration_matrix(nodes);

  // panels: the backward side first (increasing t), then the forward side
  std::vector<double> breaks;
  const std::size_t m = opt.panels_per_side;
  const bool has_back = t_start > lo, has_fwd = hi > t_start;
  if (has_back) {
    for (std::size_t k = 0; k < m; ++k) breaks.push_back(lo + (t_start - lo) * double(k) / double(m));
  }
  breaks.push_back(t_start);
  if (has_fwd) {
    for (std::size_t k = 1; k <= m; ++k) breaks.push_back(k == m ? hi : t_start + (hi - t_start) * double(k) / double(m));
  }
  // sharp features get panels of their own, 16 per window
  for (const Window& w : sys.windows) {
    for (std::size_t j = 0; j <= 16; ++j) {
      const double s = w.lo + (w.hi - w.lo) * double(j) / 16.0;
      if (s > lo && s < hi && s != t_start) breaks.push_back(s);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  const double min_gap = 1e-13 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  std::vector<double> kept;
  for (double b : breaks) {
    if (!kept.empty() && b - kept.back() < min_gap) {
      // keep t_start and the interval ends exactly
      if (b == t_start || b == hi) kept.back() = b;
      continue;
    }
    kept.push_back(b);
  }
  breaks.swap(kept);
  if (breaks.size() == 1) breaks.push_back(t_start);
  const std::size_t panels = breaks.size() - 1;
  const std::size_t first_fwd =
      has_back ? static_cast<std::size_t>(std::find(breaks.begin(), breaks.end(), t_start) - breaks.begin()) : 0;

  std::vector<double> times(panels * np);
  for (std::size_t k = 0; k < panels; ++k) {
    const double a = breaks[k], b = breaks[k + 1];
    for (std::size_t j = 0; j < np; ++j) {
      times[k * np + j] = j == 0 ? a : j + 1 == np ? b : 0.5 * (a + b) + 0.5 * (b - a) * nodes[j];
    }
  }

  std::vector<double> u(panels * np * n), un(u.size()), f(u.size());
  for (std::size_t p = 0; p < panels * np; ++p) std::copy(x0.begin(), x0.end(), u.begin() + p * n);

  PicardResult res;
  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    for (std::size_t p = 0; p < panels * np; ++p) {
      sys.rhs(times[p], std::span<const double>(u.data() + p * n, n), std::span<double>(f.data() + p * n, n));
    }
    // forward: integrate from each panel's left end
    std::vector<double> start(x0.begin(), x0.end());
    for (std::size_t k = first_fwd; k < panels && has_fwd; ++k) {
      const double half = 0.5 * (breaks[k + 1] - breaks[k]);
      for (std::size_t i = 0; i < np; ++i) {
        for (std::size_t c = 0; c < n; ++c) {
          double s = 0.0;
          for (std::size_t j = 0; j < np; ++j) s += S[i * np + j] * f[(k * np + j) * n + c];
          un[(k * np + i) * n + c] = i == 0 ? start[c] : start[c] + half * s;
        }
      }
      std::copy(un.begin() + ((k * np + np - 1) * n), un.begin() + ((k * np + np) * n), start.begin());
    }
    // backward: integrate from each panel's right end
    start.assign(x0.begin(), x0.end());
    for (std::size_t kk = first_fwd; kk-- > 0;) {
      const double half = 0.5 * (breaks[kk + 1] - breaks[kk]);
      for (std::size_t i = 0; i < np; ++i) {
        for (std::size_t c = 0; c < n; ++c) {
          double s = 0.0;
          for (std::size_t j = 0; j < np; ++j) s += (S[(np - 1) * np + j] - S[i * np + j]) * f[(kk * np + j) * n + c];
          un[(kk * np + i) * n + c] = i + 1 == np ? start[c] : start[c] - half * s;
        }
      }
      std::copy(un.begin() + (kk * np * n), un.begin() + ((kk * np + 1) * n), start.begin());
    }
    if (!has_back && !has_fwd) un = u;

    double diff = 0.0, size = 0.0;
    for (std::size_t q = 0; q < u.size(); ++q) {
      diff = std::max(diff, std::abs(un[q] - u[q]));
      size = std::max(size, std::abs(un[q]));
    }
    u.swap(un);
    res.iterations = it;
    res.last_update = diff;
    if (!std::isfinite(diff)) break;
    if (diff <= opt.tol * (1.0 + size)) {
      res.trajectory = std::make_shared<PicardTrajectory>(sys, breaks, nodes, u);
      return res;
    }
  }
  throw Error(ErrorCode::PicardNotConverged,
              "Picard iteration did not converge in " + std::to_string(opt.max_iterations) +
                  " iterations (last update " + std::to_string(res.last_update) + ")");
}

}  // namespace colombeau
