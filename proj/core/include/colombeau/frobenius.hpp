#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "colombeau/param.hpp"

namespace colombeau {

/// Du(x) = F(x, u(x)), u(x0~) = y0~ with F on U x V, matrix-valued (m x n,
/// stored row-major as m*n components).
struct FrobeniusProblem {
  Box U;  // n-dim
  Box V;  // m-dim
  FunctionNet F;
  PointNet x0_net;
  PointNet y0_net;
  double alpha = 0.0;
  Box L;
  double beta = 0.0;
  /// Ray-assembly constants: U(x0~, y0~) = B_{lambda r}(x0) with r = r_fraction h.
  double lambda = 0.9;
  double r_fraction = 0.9;

  std::size_t n() const { return U.dim(); }
  std::size_t m() const { return V.dim(); }
  const EpsGrid& grid() const { return F.grid(); }
  Box L_beta() const { return L.expanded(beta); }
};

/// out = F(v) for a row-major m x n matrix.
void contract(std::span<const double> F, std::size_t m, std::size_t n, std::span<const double> v, std::span<double> out);

/// The standard limit of x0~; throws InvalidProblem when there is none.
std::vector<double> frobenius_x0(const FrobeniusProblem& prob);

void validate(const FrobeniusProblem& prob);

/// S(v1, v2) = DF(x, y)(v1, F(x, y) v1)(v2). `magnitude` receives the sum of
/// the absolute values of the terms (a rounding scale).
void integrability_form(const FrobeniusProblem& prob, double eps, std::span<const double> x,
                        std::span<const double> y, std::span<const double> v1, std::span<const double> v2,
                        std::span<double> out, double* magnitude = nullptr);

struct AsymmetryProbe {
  std::vector<double> x, y, v1, v2;
  /// |S(v1, v2) - S(v2, v1)| per grid index (NaN for inactive eps).
  std::vector<double> values;
};

struct IntegrabilityReport {
  NumberNet max_asymmetry;
  std::vector<AsymmetryProbe> probes;
  /// Rounding floor per grid index.
  std::vector<double> floor;
  GrowthClass classification;
  /// Negligible at m_test = 3.
  bool integrable = false;
};

/// Halton points (x, y) in Q, paired with the basis pairs (e_i, e_j), i < j,
/// and `random_pairs` seeded random pairs of unit vectors.
IntegrabilityReport check_integrability(const FrobeniusProblem& prob, std::size_t probe_count = 64,
                                        std::size_t random_pairs = 4, std::uint64_t seed = 1);

struct FrobeniusCertificate {
  double a = 0.0;
  double delta = 0.0, gamma = 0.0, eta = 0.0, h = 0.0, r = 0.0, lambda = 0.0;
  std::vector<double> x0;
  Box Q;
  /// eps0 shrunk until |x0~ - x0| < min(delta, (1 - lambda) r).
  EpsGrid grid;
  /// Per-eps sup over Q of the row-sum norm of F_eps.
  NumberNet sup_F;
  double lattice_max = 0.0;
  LogBound log_bound;
};

/// Throws UnboundedRhsError or MissingLogBound.
FrobeniusCertificate certify_frobenius(const FrobeniusProblem& prob, const CertifyOptions& options = {});

/// Per-(eps, v) solves of f' = G(t, f, v), f(0) = y0~ together with the
/// variation Phi = d f / d v, cached.
class RaySolver {
 public:
  RaySolver(FrobeniusProblem prob, FrobeniusCertificate cert, IntegratorOptions integrator);

  /// State (f, Phi) on [-h, h]; Phi is row-major m x n.
  std::shared_ptr<const TwoSidedTrajectory> get(std::size_t i, std::span<const double> v) const;
  void f(std::size_t i, std::span<const double> v, double t, std::span<double> out) const;
  void dfdv(std::size_t i, std::span<const double> v, double t, std::span<double> out) const;

  const FrobeniusProblem& problem() const { return prob_; }
  const FrobeniusCertificate& certificate() const { return cert_; }
  const IntegratorOptions& integrator() const { return integrator_; }
  static constexpr std::size_t kCacheLimit = 1 << 14;

 private:
  FrobeniusProblem prob_;
  FrobeniusCertificate cert_;
  IntegratorOptions integrator_;
  std::vector<FunctionNet> dx_, dy_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<std::size_t, std::vector<double>>, std::shared_ptr<const TwoSidedTrajectory>> cache_;
};

struct FrobeniusOptions {
  IntegratorOptions integrator;
  CertifyOptions certify;
  std::size_t probe_count = 64;
  /// Solve even when the integrability check fails (negative controls).
  bool require_integrable = true;
  bool diagnostics = true;
};

struct FrobeniusSolution {
  FrobeniusCertificate cert;
  IntegrabilityReport integrability;
  /// G(t, y, v) = F(x0~ + t v, y) v on [-gamma, gamma] x V x B_0.999(0).
  ParamIvpProblem ray_problem;
  ParamSolutionNet f;
  std::shared_ptr<const RaySolver> rays;
  /// closed B_{lambda r}(x0)
  Box domain;
  /// u(x) = f((x - x0~) / r, r); partials from the variation.
  FunctionNet u;
  /// sup over a lattice of the domain of |Du - F(x, u)| (max entry).
  NumberNet residual;
  GrowthClass residual_class;
  NumberNet initial_error;
};

/// Throws IntegrabilityRejected unless the integrability check passes.
FrobeniusSolution solve_total(const FrobeniusProblem& prob, const FrobeniusOptions& options = {});

struct KNetReport {
  /// sup over probes and a t-lattice of (-h, h) of |k_eps|.
  NumberNet sup_k;
  /// sup |k(t) - int_0^t A k ds|.
  NumberNet linear_defect;
  /// sup over probes and t of the row-sum norm of A_v(t).
  NumberNet sup_A;
  bool A_log_bounded = false;
  /// Negligible at m_test = 3 above the integrator tolerance.
  GrowthClass classification;
  double tolerance_floor = 0.0;
  /// "zero", "tolerance-limited" or the growth description.
  std::string label;
};

KNetReport k_net_residual(const FrobeniusProblem& prob, const FrobeniusSolution& sol,
                          const std::vector<std::pair<std::vector<double>, std::vector<double>>>& probes);

}  // namespace colombeau
