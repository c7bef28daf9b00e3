#pragma once

#include <vector>

namespace colombeau::dsl {

/// The fixed bump rho(x) = c exp(-1/(1 - x^2)) on (-1, 1), normalised to unit
/// mass, and its antiderivative R with R(-1) = 0, R(1) = 1.
///
/// rho is nonnegative and compactly supported; its higher moments do not
/// vanish. Everything the mollified Heaviside needs (unit mass, the L1
/// bound, smoothness) holds regardless.
class Mollifier {
 public:
  static const Mollifier& instance();

  /// k-th derivative of rho.
  double rho(double x, int k = 0) const;
  /// Antiderivative of rho.
  double ramp(double x) const;

  double normalisation() const { return c_; }
  /// Quadrature of rho over [-1, 1] (should be 1).
  double mass() const;
  /// rho >= 0 and the normalisation makes the tabulated mass exactly 1.
  double l1_norm() const { return 1.0; }
  double max_value() const { return rho(0.0); }

  static constexpr int kMaxDerivative = 24;

 private:
  Mollifier();
  double c_ = 1.0;
  // Q_k coefficients (ascending powers of x).
  std::vector<std::vector<double>> q_;
  // Ramp table on 2048 uniform intervals of [-1, 1].
  std::vector<double> table_;
};

/// Mollified Heaviside H_eps(u) = R(u/eps).
double heaviside_mollified(double u, double eps);
/// eps^-(k+1) rho^(k)(u/eps).
double mollifier_scaled(double u, double eps, int k = 0);

}  // namespace colombeau::dsl
