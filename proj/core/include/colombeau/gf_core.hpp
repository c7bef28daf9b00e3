#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colombeau/box.hpp"
#include "colombeau/eps_calculus.hpp"
#include "colombeau/function_net.hpp"

namespace colombeau {

struct SupOptions {
  /// Lattice points per axis (0: lattice_points_per_axis(dim)).
  std::size_t per_axis = 0;
  std::size_t interior_probes = 64;
};

/// Per-eps sup over a lattice of K of |d^alpha f_eps| (max over components).
/// `deriv_vars` lists the variables to differentiate by, with repetition.
/// Samples for eps > eps0 are left as NaN. This is a lower bound of the true sup.
NumberNet sup_on_compact(const FunctionNet& f, const Box& K,
                         std::span<const std::size_t> deriv_vars = {}, const SupOptions& opt = {});

struct CBoundCertificate {
  Box source;  // K
  Box target;  // L, compactly contained in V
  double eps0_used = 0.0;
  /// Distance from the sampled image hull to the boundary of L.
  double margin = 0.0;
};

struct CBoundFailure {
  double eps = 0.0;
  std::vector<double> point;  // sample point in K
  std::vector<double> value;  // f_eps(point)
  /// Number of exhaustion members V_1..V_12 of V that the value leaves.
  int escaped_levels = 0;
  std::string reason;
};

struct CBoundResult {
  std::optional<CBoundCertificate> certificate;
  std::optional<CBoundFailure> failure;
  /// sup |f_eps| over K per eps.
  NumberNet sup_norm;
  bool ok() const { return certificate.has_value(); }
};

CBoundResult check_cbounded(const FunctionNet& f, const Box& K, const Box& V,
                            const SupOptions& opt = {});

/// (v_eps o u_eps)_eps on u's domain. Refused without a certificate; every
/// evaluation asserts u_eps(x) lies in v's domain.
FunctionNet compose(const FunctionNet& v, const FunctionNet& u,
                    const std::optional<CBoundCertificate>& cert);

/// |d^k v(x)| <= C (1 + |x|)^N for derivatives of order k.
struct GrowthWitness {
  double C = 1.0;
  int N = 0;
};

struct SlowlyIncreasing {
  FunctionNet v;  // eps-independent map, evaluated at eps = 1
  std::vector<GrowthWitness> witnesses;  // index = derivative order
};

/// Checks the witnesses on a large probe cube (radius `probe_radius`) and
/// composes without a c-bound certificate.
FunctionNet compose_slowly_increasing(const SlowlyIncreasing& v, const FunctionNet& u,
                                      double probe_radius = 100.0);

/// Checks the witnesses only.
void check_growth_witnesses(const SlowlyIncreasing& v, double probe_radius = 100.0);

/// (f_eps(x_eps))_eps; the samples must stay in f's domain for eps <= eps0.
PointNet point_value(const FunctionNet& f, const PointNet& p);

struct PointEqualityReport {
  bool equal = false;
  std::vector<GrowthClass> per_probe;
  std::vector<std::vector<double>> probe_limits;
  /// Stated coverage: the test is finite, it does not quantify over all points.
  std::string coverage;
};

/// Tests f = g on U x V through slices x -> f(x, y_eps) - g(x, y_eps) for the
/// given near-standard probes in the V slot. `u_dim` is the dimension of U.
/// Each slice is tested on compacts V_1..V_3 of the exhaustion of U.
PointEqualityReport equal_by_points(const FunctionNet& f, const FunctionNet& g, std::size_t u_dim,
                                    const std::vector<PointNet>& probes, int m_test,
                                    const SupOptions& opt = {});

}  // namespace colombeau
