#include "colombeau/dsl/mollifier.hpp"

#include <cmath>

#include "colombeau/errors.hpp"
#include "colombeau/quadrature.hpp"

namespace colombeau::dsl {

namespace {

constexpr int kIntervals = 2048;

double poly_eval(const std::vector<double>& c, double x) {
  double s = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) s = s * x + c[i];
  return s;
}

// Unnormalised phi^(k)(x) = Q_k(x) / s^{2k} * exp(-1/s), s = 1 - x^2.
double phi_derivative(const std::vector<std::vector<double>>& q, double x, int k) {
  if (!(std::abs(x) < 1.0)) return 0.0;
  const double s = 1.0 - x * x;
  const double log_mag = -1.0 / s - 2.0 * k * std::log(s);
  return poly_eval(q[k], x) * std::exp(log_mag);
}

}  // namespace

Mollifier::Mollifier() {
  // Q_0 = 1, Q_{k+1} = Q_k' s^2 + 4k x s Q_k - 2x Q_k.
  q_.push_back({1.0});
  const std::vector<double> s{1.0, 0.0, -1.0};
  const std::vector<double> s2{1.0, 0.0, -2.0, 0.0, 1.0};
  auto mul = [](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
  };
  auto plus = [](std::vector<double> a, const std::vector<double>& b) {
    if (a.size() < b.size()) a.resize(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
  };
  for (int k = 0; k < kMaxDerivative; ++k) {
    const auto& qk = q_[k];
    std::vector<double> dq(std::max<std::size_t>(1, qk.size() - 1), 0.0);
    for (std::size_t i = 1; i < qk.size(); ++i) dq[i - 1] = qk[i] * static_cast<double>(i);
    auto t1 = mul(dq, s2);
    auto t2 = mul(mul(std::vector<double>{0.0, 4.0 * k}, s), qk);
    auto t3 = mul(std::vector<double>{0.0, -2.0}, qk);
    q_.push_back(plus(plus(t1, t2), t3));
  }

  // Cumulative integral of the unnormalised bump on each interval.
  const GaussRule& g = gauss_legendre(12);
  table_.assign(kIntervals + 1, 0.0);
  const double w = 2.0 / kIntervals;
  for (int i = 0; i < kIntervals; ++i) {
    const double lo = -1.0 + i * w;
    double sum = 0.0;
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      sum += g.weights[j] * phi_derivative(q_, lo + 0.5 * w * (g.nodes[j] + 1.0), 0);
    }
    table_[i + 1] = table_[i] + 0.5 * w * sum;
  }
  c_ = 1.0 / table_[kIntervals];
  for (double& v : table_) v *= c_;
  table_[kIntervals] = 1.0;
}

const Mollifier& Mollifier::instance() {
  static const Mollifier m;
  return m;
}

double Mollifier::rho(double x, int k) const {
  if (k < 0 || k > kMaxDerivative) {
    throw Error(ErrorCode::InvalidArgument, "mollifier derivative order out of range");
  }
  return c_ * phi_derivative(q_, x, k);
}

double Mollifier::ramp(double x) const {
  if (!(x > -1.0)) return 0.0;
  if (!(x < 1.0)) return 1.0;
  const double w = 2.0 / kIntervals;
  int i = static_cast<int>((x + 1.0) / w);
  if (i >= kIntervals) i = kIntervals - 1;
  const double x0 = -1.0 + i * w;
  const double t = (x - x0) / w;
  // quintic Hermite with R, R' = rho, R'' = rho' at both ends
  const double p0 = table_[i], p1 = table_[i + 1];
  const double m0 = rho(x0) * w, m1 = rho(x0 + w) * w;
  const double a0 = rho(x0, 1) * w * w, a1 = rho(x0 + w, 1) * w * w;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
  const double h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
  const double h3 = 0.5 * t3 - t4 + 0.5 * t5;
  const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
  const double h5 = 10 * t3 - 15 * t4 + 6 * t5;
  return h0 * p0 + h1 * m0 + h2 * a0 + h3 * a1 + h4 * m1 + h5 * p1;
}

double Mollifier::mass() const {
  return integrate([this](double x) { return rho(x); }, -1.0, 1.0, 256, 12);
}

double heaviside_mollified(double u, double eps) { return Mollifier::instance().ramp(u / eps); }

double mollifier_scaled(double u, double eps, int k) {
  return Mollifier::instance().rho(u / eps, k) * std::pow(eps, -(k + 1));
}

}  // namespace colombeau::dsl
