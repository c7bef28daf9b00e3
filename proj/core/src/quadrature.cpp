#include "colombeau/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace colombeau {

namespace {

GaussRule build_rule(std::size_t n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(n));
  return *slot;
}

double integrate(const std::function<double(double)>& f, double a, double b, std::size_t panels,
                 std::size_t order) {
  const GaussRule& g = gauss_legendre(order);
  const double w = (b - a) / panels;
  double sum = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + p * w;
    double s = 0.0;
    for (std::size_t k = 0; k < order; ++k) s += g.weights[k] * f(lo + 0.5 * w * (g.nodes[k] + 1.0));
    sum += 0.5 * w * s;
  }
  return sum;
}

std::vector<double> chebyshev_lobatto(std::size_t degree) {
  std::vector<double> x(degree + 1);
  for (std::size_t j = 0; j <= degree; ++j) {
    x[j] = -std::cos(std::numbers::pi * static_cast<double>(j) / static_cast<double>(degree));
  }
  return x;
}

std::vector<double> barycentric_weights(const std::vector<double>& nodes) {
  std::vector<double> w(nodes.size(), 1.0);
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (k != j) w[j] /= (nodes[j] - nodes[k]);
    }
  }
  return w;
}

void lagrange_basis(const std::vector<double>& nodes, const std::vector<double>& weights, double x,
                    std::vector<double>& out) {
  out.assign(nodes.size(), 0.0);
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (x == nodes[j]) {
      out[j] = 1.0;
      return;
    }
  }
  double denom = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    out[j] = weights[j] / (x - nodes[j]);
    denom += out[j];
  }
  for (double& v : out) v /= denom;
}

std::vector<double> spectral_integration_matrix(const std::vector<double>& nodes) {
  const std::size_t n = nodes.size();
  const auto w = barycentric_weights(nodes);
  const GaussRule& g = gauss_legendre(n + 4);
  std::vector<double> S(n * n, 0.0);
  std::vector<double> basis;
  for (std::size_t i = 0; i < n; ++i) {
    const double hi = nodes[i];
    const double half = 0.5 * (hi + 1.0);
    if (half == 0.0) continue;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      const double s = -1.0 + half * (g.nodes[k] + 1.0);
      lagrange_basis(nodes, w, s, basis);
      for (std::size_t j = 0; j < n; ++j) S[i * n + j] += half * g.weights[k] * basis[j];
    }
  }
  return S;
}

}  // namespace colombeau
