#include "colombeau/integrator.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "colombeau/errors.hpp"

namespace colombeau {

namespace {

// Dormand-Prince 5(4)
constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
constexpr double a21 = 0.2;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct Work {
  explicit Work(std::size_t n)
      : k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y(n), ynew(n), err(n), coeffs(5 * n) {}
  std::vector<double> k1, k2, k3, k4, k5, k6, k7, y, ynew, err, coeffs;
};

bool finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

// Calls the right-hand side; a DomainEvaluationError or a non-finite value
// counts as a failed evaluation.
bool call(const OdeSystem& sys, double t, std::span<const double> x, std::span<double> dx) {
  try {
    sys.rhs(t, x, dx);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DomainEvaluationError) return false;
    throw;
  }
  return finite(dx);
}

// One DP5 step from (t, y) with k1 = f(t, y) already in w.k1. Fills ynew,
// k7 = f(t + h, ynew), err (embedded difference) and the dense coefficients.
bool dp_step(const OdeSystem& sys, double t, double h, Work& w) {
  const std::size_t n = sys.dim;
  std::vector<double> tmp(n);
  auto& y = w.y;
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * w.k1[i];
  if (!call(sys, t + c2 * h, tmp, w.k2)) return false;
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * w.k1[i] + a32 * w.k2[i]);
  if (!call(sys, t + c3 * h, tmp, w.k3)) return false;
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a41 * w.k1[i] + a42 * w.k2[i] + a43 * w.k3[i]);
  if (!call(sys, t + c4 * h, tmp, w.k4)) return false;
  for (std::size_t i = 0; i < n; ++i)
    tmp[i] = y[i] + h * (a51 * w.k1[i] + a52 * w.k2[i] + a53 * w.k3[i] + a54 * w.k4[i]);
  if (!call(sys, t + c5 * h, tmp, w.k5)) return false;
  for (std::size_t i = 0; i < n; ++i)
    tmp[i] = y[i] + h * (a61 * w.k1[i] + a62 * w.k2[i] + a63 * w.k3[i] + a64 * w.k4[i] + a65 * w.k5[i]);
  if (!call(sys, t + h, tmp, w.k6)) return false;
  for (std::size_t i = 0; i < n; ++i)
    w.ynew[i] = y[i] + h * (a71 * w.k1[i] + a73 * w.k3[i] + a74 * w.k4[i] + a75 * w.k5[i] + a76 * w.k6[i]);
  if (!finite(w.ynew)) return false;
  if (!call(sys, t + h, w.ynew, w.k7)) return false;
  for (std::size_t i = 0; i < n; ++i) {
    w.err[i] = h * (e1 * w.k1[i] + e3 * w.k3[i] + e4 * w.k4[i] + e5 * w.k5[i] + e6 * w.k6[i] + e7 * w.k7[i]);
    const double r2 = w.ynew[i] - y[i];
    const double r3 = h * w.k1[i] - r2;
    const double r4 = r2 - h * w.k7[i] - r3;
    const double r5 = h * (d1 * w.k1[i] + d3 * w.k3[i] + d4 * w.k4[i] + d5 * w.k5[i] + d6 * w.k6[i] + d7 * w.k7[i]);
    w.coeffs[i] = y[i];
    w.coeffs[n + i] = r2;
    w.coeffs[2 * n + i] = r3;
    w.coeffs[3 * n + i] = r4;
    w.coeffs[4 * n + i] = r5;
  }
  return true;
}

void dense_value(std::span<const double> c, std::size_t n, double th, std::span<double> out) {
  const double th1 = 1.0 - th;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = c[i] + th * (c[n + i] + th1 * (c[2 * n + i] + th * (c[3 * n + i] + th1 * c[4 * n + i])));
  }
}

double error_norm(const Work& w, const IntegratorOptions& o) {
  double s = 0.0;
  const std::size_t n = w.y.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = o.atol + o.rtol * std::max(std::abs(w.y[i]), std::abs(w.ynew[i]));
    const double r = w.err[i] / sk;
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(n));
}

double initial_step(const OdeSystem& sys, double t, std::span<const double> y,
                    std::span<const double> f0, double dir, const IntegratorOptions& o) {
  const std::size_t n = sys.dim;
  double d0 = 0, d1n = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = o.atol + o.rtol * std::abs(y[i]);
    d0 += (y[i] / sk) * (y[i] / sk);
    d1n += (f0[i] / sk) * (f0[i] / sk);
  }
  d0 = std::sqrt(d0 / n);
  d1n = std::sqrt(d1n / n);
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  h0 = std::min(h0, o.max_step);
  std::vector<double> y1(n), f1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y[i] + dir * h0 * f0[i];
  if (!call(sys, t + dir * h0, y1, f1)) return h0 * 1e-3;
  double d2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = o.atol + o.rtol * std::abs(y[i]);
    d2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
  }
  d2 = std::sqrt(d2 / n) / h0;
  const double dm = std::max(d1n, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100 * h0, h1, o.max_step});
}

}  // namespace

void DenseTrajectory::push_step(double t, double h, std::span<const double> coeffs) {
  times_.push_back(t);
  hs_.push_back(h);
  coeffs_.insert(coeffs_.end(), coeffs.begin(), coeffs.end());
  t_end_ = t + h;
}

std::size_t DenseTrajectory::locate(double t) const {
  const bool forward = t_end_ >= t_start_;
  // times_ is monotone in the integration direction
  std::size_t lo = 0, hi = times_.size();
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    const bool before = forward ? times_[mid] <= t : times_[mid] >= t;
    if (before) lo = mid;
    else hi = mid;
  }
  return lo;
}

void DenseTrajectory::eval(double t, std::span<double> out) const {
  if (times_.empty() || t == t_start_) {
    for (std::size_t i = 0; i < dim_; ++i) out[i] = x0_[i];
    return;
  }
  const double slack = 1e-12 * (1.0 + std::abs(t_lo()) + std::abs(t_hi()));
  if (t < t_lo() - slack || t > t_hi() + slack) {
    throw Error(ErrorCode::InvalidArgument, "trajectory evaluated outside [" + std::to_string(t_lo()) +
                                                ", " + std::to_string(t_hi()) + "] at t = " + std::to_string(t));
  }
  const std::size_t k = locate(t);
  const double th = std::clamp((t - times_[k]) / hs_[k], 0.0, 1.0);
  dense_value(std::span<const double>(coeffs_.data() + 5 * dim_ * k, 5 * dim_), dim_, th, out);
}

void DenseTrajectory::derivative(double t, std::span<double> out) const {
  if (times_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "derivative of an empty trajectory");
  }
  const std::size_t k = locate(t);
  const double h = hs_[k];
  const double th = std::clamp((t - times_[k]) / h, 0.0, 1.0);
  const double th1 = 1.0 - th;
  const double* c = coeffs_.data() + 5 * dim_ * k;
  const std::size_t n = dim_;
  for (std::size_t i = 0; i < n; ++i) {
    const double dth = c[n + i] + (1.0 - 2.0 * th) * c[2 * n + i] + th * (2.0 - 3.0 * th) * c[3 * n + i] +
                       2.0 * th * th1 * (th1 - th) * c[4 * n + i];
    out[i] = dth / h;
  }
}

std::vector<double> DenseTrajectory::mesh() const {
  std::vector<double> m(times_.begin(), times_.end());
  m.push_back(t_end_);
  if (times_.empty()) m = {t_start_};
  return m;
}

std::shared_ptr<DenseTrajectory> integrate(const OdeSystem& sys, double t_start,
                                           std::span<const double> x0, double t_end,
                                           const IntegratorOptions& opt) {
  const std::size_t n = sys.dim;
  if (x0.size() != n) throw Error(ErrorCode::InvalidArgument, "initial value has the wrong dimension");
  auto traj = std::make_shared<DenseTrajectory>(n, t_start);
  traj->set_start_value(x0);
  if (t_end == t_start) return traj;
  const double dir = t_end > t_start ? 1.0 : -1.0;

  // breakpoints from feature windows, in integration order
  std::vector<double> breaks;
  std::vector<Window> windows;
  for (const Window& w : sys.windows) {
    const double lo = std::max(w.lo, std::min(t_start, t_end));
    const double hi = std::min(w.hi, std::max(t_start, t_end));
    if (lo > hi) continue;
    windows.push_back({lo, hi});
    for (double b : {w.lo, w.hi}) {
      if (dir * (b - t_start) > 0 && dir * (t_end - b) > 0) breaks.push_back(b);
    }
  }
  std::sort(breaks.begin(), breaks.end(), [dir](double a, double b) { return dir * a < dir * b; });

  Work w(n);
  std::copy(x0.begin(), x0.end(), w.y.begin());
  if (!call(sys, t_start, w.y, w.k1)) {
    throw Error(ErrorCode::DomainEvaluationError, "right-hand side is not finite at the initial point");
  }

  double t = t_start;
  double h = opt.initial_step > 0 ? opt.initial_step : initial_step(sys, t, w.y, w.k1, dir, opt);
  bool last_rejected = false;
  std::size_t steps = 0;
  std::size_t next_break = 0;

  std::optional<Box> fence;
  if (opt.stay_in) {
    // unbounded sides (unconstrained components) do not set the scale
    double scale = 0.0;
    for (const auto* side : {&opt.stay_in->lower(), &opt.stay_in->upper()}) {
      for (double v : *side) {
        if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
      }
    }
    fence = opt.stay_in->expanded(1e-12 * (1.0 + scale));
  }

  while (dir * (t_end - t) > 0) {
    if (++steps > opt.max_steps) {
      throw Error(ErrorCode::StiffnessFailure, "step budget exhausted at t = " + std::to_string(t));
    }
    while (next_break < breaks.size() && dir * (breaks[next_break] - t) <= 0) ++next_break;

    double hmax = opt.max_step;
    for (const Window& win : windows) {
      const bool inside = dir > 0 ? (t >= win.lo && t < win.hi) : (t > win.lo && t <= win.hi);
      if (inside) hmax = std::min(hmax, std::max((win.hi - win.lo) / 8.0, 1e-300));
    }
    double habs = std::min({std::abs(h), hmax, std::abs(t_end - t)});
    bool clipped = false;
    if (next_break < breaks.size() && habs >= std::abs(breaks[next_break] - t)) {
      habs = std::abs(breaks[next_break] - t);
      clipped = true;
    }
    const double hmin = 16.0 * DBL_EPSILON * std::max(1.0, std::abs(t));
    if (habs < hmin) {
      throw Error(ErrorCode::StiffnessFailure,
                  "step size underflow at t = " + std::to_string(t));
    }
    const double hs = dir * habs;

    if (!dp_step(sys, t, hs, w)) {
      traj->note_rejection();
      h = 0.25 * habs;
      last_rejected = true;
      continue;
    }
    const double err = error_norm(w, opt);
    if (!(err <= 1.0)) {
      traj->note_rejection();
      h = habs * std::max(0.2, 0.9 * std::pow(err, -0.2));
      last_rejected = true;
      continue;
    }

    if (fence) {
      std::vector<double> probe(n);
      double inside_th = 0.0;
      for (double th : {0.25, 0.5, 0.75, 1.0}) {
        dense_value(w.coeffs, n, th, probe);
        if (fence->contains(probe)) {
          inside_th = th;
          continue;
        }
        double lo = inside_th, hi = th;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          dense_value(w.coeffs, n, mid, probe);
          (fence->contains(probe) ? lo : hi) = mid;
        }
        traj->push_step(t, hs * lo, w.coeffs);  // partial step up to the exit
        const double t_exit = t + hs * hi;
        throw EscapeError(std::numeric_limits<double>::quiet_NaN(), t_exit,
                          "trajectory leaves " + opt.stay_in->to_string() + " at t = " + std::to_string(t_exit));
      }
    }

    traj->push_step(t, hs, w.coeffs);
    t = (clipped || habs == std::abs(t_end - t)) ? (clipped ? breaks[next_break] : t_end) : t + hs;
    std::swap(w.y, w.ynew);
    std::swap(w.k1, w.k7);

    double fac = std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
    if (last_rejected) fac = std::min(fac, 1.0);
    last_rejected = false;
    // keep the pre-clip step size when a breakpoint forced a short step
    h = clipped ? std::max(std::abs(h), habs) : habs * fac;
  }
  return traj;
}

std::shared_ptr<DenseTrajectory> integrate_on_mesh(const OdeSystem& sys, std::span<const double> x0,
                                                   std::span<const double> mesh) {
  const std::size_t n = sys.dim;
  if (mesh.empty()) throw Error(ErrorCode::InvalidArgument, "empty mesh");
  auto traj = std::make_shared<DenseTrajectory>(n, mesh[0]);
  traj->set_start_value(x0);
  Work w(n);
  std::copy(x0.begin(), x0.end(), w.y.begin());
  if (mesh.size() == 1) return traj;
  if (!call(sys, mesh[0], w.y, w.k1)) {
    throw Error(ErrorCode::DomainEvaluationError, "right-hand side is not finite at the initial point");
  }
  for (std::size_t k = 0; k + 1 < mesh.size(); ++k) {
    const double h = mesh[k + 1] - mesh[k];
    if (!dp_step(sys, mesh[k], h, w)) {
      throw Error(ErrorCode::DomainEvaluationError,
                  "right-hand side is not finite on the replayed step at t = " + std::to_string(mesh[k]));
    }
    traj->push_step(mesh[k], h, w.coeffs);
    std::swap(w.y, w.ynew);
    std::swap(w.k1, w.k7);
  }
  return traj;
}

TwoSidedTrajectory::TwoSidedTrajectory(std::shared_ptr<const Trajectory> backward,
                                       std::shared_ptr<const Trajectory> forward, double t_split,
                                       std::vector<double> x_split)
    : backward_(std::move(backward)), forward_(std::move(forward)), t_split_(t_split), x_split_(std::move(x_split)) {}

void TwoSidedTrajectory::eval(double t, std::span<double> out) const {
  if (t == t_split_) {
    std::copy(x_split_.begin(), x_split_.end(), out.begin());
  } else if (t < t_split_) {
    backward_->eval(t, out);
  } else {
    forward_->eval(t, out);
  }
}

void TwoSidedTrajectory::derivative(double t, std::span<double> out) const {
  if (t < t_split_ || forward_->t_hi() == t_split_) {
    backward_->derivative(t, out);
  } else {
    forward_->derivative(t, out);
  }
}

std::shared_ptr<TwoSidedTrajectory> integrate_both_ways(const OdeSystem& sys, double t_start,
                                                        std::span<const double> x0, double lo,
                                                        double hi, const IntegratorOptions& options) {
  auto fwd = integrate(sys, t_start, x0, hi, options);
  auto bwd = integrate(sys, t_start, x0, lo, options);
  return std::make_shared<TwoSidedTrajectory>(bwd, fwd, t_start, std::vector<double>(x0.begin(), x0.end()));
}

std::shared_ptr<TwoSidedTrajectory> integrate_both_ways_on_mesh(const OdeSystem& sys,
                                                                std::span<const double> x0,
                                                                const TwoSidedTrajectory& reference) {
  const auto* f = dynamic_cast<const DenseTrajectory*>(&reference.forward());
  const auto* b = dynamic_cast<const DenseTrajectory*>(&reference.backward());
  if (!f || !b) throw Error(ErrorCode::InvalidArgument, "reference is not a Runge-Kutta trajectory");
  const auto fm = f->mesh();
  const auto bm = b->mesh();
  auto fwd = integrate_on_mesh(sys, x0, fm);
  auto bwd = integrate_on_mesh(sys, x0, bm);
  return std::make_shared<TwoSidedTrajectory>(bwd, fwd, fm.front(), std::vector<double>(x0.begin(), x0.end()));
}

}  // namespace colombeau
