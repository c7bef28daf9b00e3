#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace colombeau {

struct GaussRule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, cached.
const GaussRule& gauss_legendre(std::size_t n);

/// Composite Gauss-Legendre on [a, b] with `panels` equal panels.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::size_t panels = 16, std::size_t order = 10);

/// Chebyshev-Lobatto nodes -cos(pi j / degree), j = 0..degree, on [-1, 1].
std::vector<double> chebyshev_lobatto(std::size_t degree);

/// Barycentric weights for arbitrary distinct nodes.
std::vector<double> barycentric_weights(const std::vector<double>& nodes);

/// Lagrange basis values l_j(x) at x for the given nodes/weights.
void lagrange_basis(const std::vector<double>& nodes, const std::vector<double>& weights,
                    double x, std::vector<double>& out);

/// S[i][j] = integral from -1 to nodes[i] of l_j, row-major.
std::vector<double> spectral_integration_matrix(const std::vector<double>& nodes);

}  // namespace colombeau
