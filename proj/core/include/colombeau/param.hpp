#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colombeau/ivp.hpp"

namespace colombeau {

/// u' = F(t, u, p) with p in an open box P. F lives on I x U x P.
struct ParamIvpProblem {
  IvpProblem base;
  Box P;

  std::size_t dim() const { return base.dim(); }
  std::size_t pdim() const { return P.dim(); }
  /// Compact of P used for the log bound and the default p-lattice.
  Box P_compact() const { return P.scaled_about_center(0.9); }
};

/// Certifies the uniform bound over Q x P (NonUniformBound when every
/// p-slice is bounded but the joint sup grows) and the log bound over
/// Q x P_compact (mandatory, MissingLogBound).
HypothesisCertificate certify_parameters(const ParamIvpProblem& prob, const CertifyOptions& options = {});

/// 9 points per axis over P_compact.
std::vector<std::vector<double>> default_p_lattice(const ParamIvpProblem& prob, std::size_t per_axis = 9);

/// Per-(eps, p) classical solves, computed on demand and cached.
class ParamSolver {
 public:
  ParamSolver(ParamIvpProblem prob, HypothesisCertificate cert, IntegratorOptions integrator);

  struct Entry {
    std::shared_ptr<const TwoSidedTrajectory> classical;
    std::shared_ptr<const Trajectory> extended;
    double eta = 0.0;
  };
  /// The solution for grid index i and parameter p.
  std::shared_ptr<const Entry> get(std::size_t i, std::span<const double> p) const;
  /// Replays the mesh of get(i, p) with the parameter q and applies the same
  /// extension; used for finite differences in p.
  std::shared_ptr<const Trajectory> replay(std::size_t i, std::span<const double> p, std::span<const double> q) const;
  /// As replay, without the extension (valid on J_eps).
  std::shared_ptr<const TwoSidedTrajectory> replay_classical(std::size_t i, std::span<const double> p,
                                                             std::span<const double> q) const;
  /// Finite-difference step for parameter k at p.
  static double fd_step(std::span<const double> p, std::size_t k);
  /// d u / d p_k at (p, t) by central differences on the shared mesh.
  void dp(std::size_t i, std::span<const double> p, std::size_t k, double t, std::span<double> out) const;

  const ParamIvpProblem& problem() const { return prob_; }
  const HypothesisCertificate& certificate() const { return cert_; }
  std::size_t solves() const;
  /// Drops cached solves beyond this many entries.
  static constexpr std::size_t kCacheLimit = 1 << 14;

 private:
  std::shared_ptr<const Entry> solve(std::size_t i, std::span<const double> p) const;
  ParamIvpProblem prob_;
  HypothesisCertificate cert_;
  IntegratorOptions integrator_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<std::size_t, std::vector<double>>, std::shared_ptr<const Entry>> cache_;
  mutable std::size_t solves_ = 0;
};

struct ParamSolutionNet {
  /// u on closure(P) x [t0 - h, t0 + h]; inputs (p, t).
  FunctionNet base;
  HypothesisCertificate cert;
  std::shared_ptr<const ParamSolver> solver;
  std::vector<std::vector<double>> p_samples;
  /// Max over the samples of sup |u' - F(t, u, p)| on J~_eps.
  NumberNet residual;
  /// Max over the samples of |u(t0~) - x0~|.
  NumberNet initial_error;
  /// Sensitivity residual at the first sample and t0 + h/2.
  NumberNet sensitivity_check;
};

struct ParamSolveOptions {
  IntegratorOptions integrator;
  CertifyOptions certify;
  std::optional<HypothesisCertificate> certificate;
  bool diagnostics = true;
};

ParamSolutionNet solve_with_parameters(const ParamIvpProblem& prob, const std::vector<std::vector<double>>& p_samples,
                                       const ParamSolveOptions& options = {});

/// |LHS - RHS| of d_p u(p, t) = int (d_x F d_p u + d_p F) ds per eps, max over
/// components and parameter directions. LHS by replayed finite differences,
/// RHS by Gauss-Legendre quadrature along the trajectory.
NumberNet sensitivity_residual(const ParamSolutionNet& sol, const ParamIvpProblem& prob, std::span<const double> p,
                               double t);

/// The family u(t1, x1, p, t) of solutions with u(t1) = x1.
struct InitialValueFamily {
  double lambda = 0.5, mu = 0.0, gamma = 0.0, delta = 0.0, eta = 0.0, sigma = 0.5;
  double a = 0.0, h_hat = 0.0, h = 0.0, h1 = 0.0;
  /// Uniqueness radius r in (0, h) and rho = (h - r) / 2.
  double r = 0.0, rho = 0.0;
  double t0 = 0.0;
  std::vector<double> x0;
  Box I_hat, I1, U_hat, U1, J1, J;
  /// Which of delta and eta / a sets h_hat.
  std::string binding;
  /// The translated problem and its parameterised solution v(t1, x1, p, s).
  ParamIvpProblem translated;
  ParamSolutionNet v;
  /// u on J1 x U1 x P x J, inputs (t1, x1, p, t).
  FunctionNet solution;
  /// u(t1, x1, p, t1) == x1 bit for bit on the checked samples.
  bool exact_at_t1 = false;
};

InitialValueFamily solve_with_initial_data(const ParamIvpProblem& prob, double h_target,
                                           const ParamSolveOptions& options = {});

}  // namespace colombeau
