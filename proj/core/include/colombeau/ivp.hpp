#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "colombeau/box.hpp"
#include "colombeau/eps_calculus.hpp"
#include "colombeau/function_net.hpp"
#include "colombeau/gf_core.hpp"
#include "colombeau/integrator.hpp"
#include "colombeau/picard.hpp"

namespace colombeau {

/// u' = F(t, u), u(t0~) = x0~ with the geometry (alpha, L, beta).
struct IvpProblem {
  Box I;             // open interval, dim 1
  Box U;             // open box, dim n
  FunctionNet F;     // on I x U, codim n
  double t0 = 0.0;   // limit of t0_net
  PointNet t0_net;   // dim 1
  PointNet x0_net;   // dim n
  double alpha = 0.0;
  Box L;             // compact, contains x0 samples
  double beta = 0.0;
  /// Overrides the computed bound a (used by derived problems that inherit it).
  std::optional<double> a_override;

  std::size_t dim() const { return U.dim(); }
  const EpsGrid& grid() const { return F.grid(); }
  Box L_beta() const { return L.expanded(beta); }
  Box Q() const { return product(Box::interval(t0 - alpha, t0 + alpha), L_beta()); }
};

/// Throws InvalidProblem (or GridMismatch) naming the failed condition.
void validate(const IvpProblem& prob);

struct LogBound {
  double C1 = 0.0;
  /// sup |d_x F_eps| / log(1/eps) per eps (NaN where undefined).
  NumberNet ratio;
  NumberNet sup_dxF;
};

struct HypothesisCertificate {
  double a = 0.0;
  double h = 0.0;
  double t0 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  Box J;   // [t0 - h, t0 + h]; the open interval is its interior
  Box W;   // L + B_beta, open
  Box L;
  Box Q;
  /// Grid with eps0 shrunk until |t0~_eps - t0| <= h/4.
  EpsGrid grid;
  NumberNet sup_F;
  double lattice_max = 0.0;
  /// Interval-arithmetic bound of sup_Q |F_eps| when available.
  std::optional<double> interval_bound;
  std::optional<LogBound> log_bound;
  /// delta_eps per grid index (NaN for inactive eps).
  std::vector<double> delta_eps;

  /// J_eps = [t0 - h + delta, t0 + h - delta]
  Box J_eps(std::size_t i) const;
  /// [t0 - h + 2 delta, t0 + h - 2 delta]
  Box J_tilde(std::size_t i) const;
};

struct CertifyOptions {
  SupOptions sup;
};

/// Throws UnboundedRhsError when sup_Q |F_eps| grows as eps -> 0.
HypothesisCertificate certify_hypotheses(const IvpProblem& prob, const CertifyOptions& options = {});

enum class Method { AdaptiveRK, Picard };
std::string to_string(Method m);

struct ClassicalSolution {
  std::shared_ptr<const Trajectory> trajectory;  // on J_eps
  double t_start = 0.0;
  /// max over the sampled trajectory of |u(t) - x0| - a |t - t0~|, clipped at 0.
  double cone_excess = 0.0;
  std::size_t steps = 0;
  std::size_t rejected = 0;
  /// Picard: iterations and the budget e^{h gamma} with the measured gamma.
  std::size_t picard_iterations = 0;
  double lipschitz = 0.0;
  double picard_budget = 0.0;
};

struct SolveOptions {
  Method method = Method::AdaptiveRK;
  IntegratorOptions integrator;
  PicardOptions picard;
  /// Reuse this certificate instead of certifying again.
  std::optional<HypothesisCertificate> certificate;
};

/// The per-eps system x' = F_eps(t, x, params) with the t-windows of F's
/// sharp features (taken along the t axis through (0, x_ref, params)).
OdeSystem ode_system(const FunctionNet& F, double eps, std::size_t n, std::span<const double> params,
                     std::span<const double> x_ref);

/// Sup over a lattice of Q of the row-sum norm of d_x F_eps (x = inputs 1..n).
double lipschitz_on(const FunctionNet& F, const Box& Q, double eps, std::size_t n,
                    const SupOptions& opt = {});

ClassicalSolution solve_classical_per_eps(const IvpProblem& prob, const HypothesisCertificate& cert,
                                          std::size_t eps_index, const SolveOptions& options = {});

/// Integrates forward from t0~ towards t_end inside L_beta without a
/// certificate; returns the time the trajectory leaves L_beta, if it does.
std::optional<double> escape_time(const IvpProblem& prob, std::size_t eps_index, double t_end,
                                  const IntegratorOptions& options = {});

struct SolutionNet {
  FunctionNet base;  // on [t0 - h, t0 + h], codim n
  FunctionNet rhs;   // the F it solves
  HypothesisCertificate cert;
  Method method = Method::AdaptiveRK;
  /// Per grid index; null for inactive eps.
  std::vector<std::shared_ptr<const Trajectory>> per_eps;
  /// The classical solutions before extension (meshes for replay).
  std::vector<std::shared_ptr<const Trajectory>> classical;
  std::vector<double> t_start;
  std::vector<Box> inner_intervals;
  std::optional<CBoundCertificate> cbound_cert;
  /// Per eps: u~(J dagger) within L + closed ball a (h' + delta_eps).
  bool jdagger_containment = false;
  NumberNet residual;
  NumberNet cone_excess;
  GrowthClass value_growth, d1_growth, d2_growth;
  bool moderateness_uncertified = false;
  std::vector<std::string> warnings;
  std::size_t total_steps = 0;

  double h_dagger() const { return 0.75 * cert.h; }
  Box J_dagger() const { return Box::interval(cert.t0 - h_dagger(), cert.t0 + h_dagger()); }
};

struct GeneralizedSolveOptions : SolveOptions {
  /// Replays the step meshes of this solution (same problem geometry).
  const SolutionNet* replay = nullptr;
  bool diagnostics = true;
};

SolutionNet solve_generalized(const IvpProblem& prob, const GeneralizedSolveOptions& options = {});

/// Sup over a lattice of K of |u1 - u2| together with the Gronwall envelope
/// (n~ + T n + 2 floor) exp(C4 log(1/eps) T). C4 = C' C1 with the surrogate
/// C' = 1; C3 = 0.
struct GapReport {
  NumberNet gap;
  NumberNet envelope;
  std::vector<double> floor;
  double C1 = 0.0;
  double C4 = 0.0;
  double h = 0.0;
  GrowthClass classification;
  bool within_envelope = false;
  /// m - h C4 with m the fitted decay order of the data (n~, n).
  double envelope_exponent = 0.0;
  double data_order = 0.0;
  std::string note;
};

namespace detail {

/// Certification with optional parameter slots: the uniform bound runs over
/// Q x p_sup, the log bound over [t0 - h, t0 + h] x L_beta x p_log.
HypothesisCertificate certify_on(const IvpProblem& prob, const std::optional<Box>& p_sup,
                                 const std::optional<Box>& p_log, const CertifyOptions& options);

/// Applies the smooth extension to a classical solution on J_eps when
/// delta_eps > 0; returns u unchanged otherwise. `eta` receives the cutoff
/// scale (0 without extension).
std::shared_ptr<const Trajectory> extend_classical(const HypothesisCertificate& c, std::size_t i,
                                                   std::shared_ptr<const Trajectory> u, double* eta = nullptr);

std::vector<double> time_lattice(double lo, double hi, std::size_t n = 257);

}  // namespace detail

GapReport uniqueness_gap(const SolutionNet& sol1, const SolutionNet& sol2, const HypothesisCertificate& cert,
                         const Box& K, int m_test = 3);

}  // namespace colombeau
