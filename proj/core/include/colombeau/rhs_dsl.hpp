#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "colombeau/dsl/expr.hpp"
#include "colombeau/dsl/mollifier.hpp"
#include "colombeau/dsl/program.hpp"
#include "colombeau/function_net.hpp"

namespace colombeau {

/// Backend for nets written in the expression language. Derivatives are
/// symbolic and cached per variable.
class DslNetImpl : public NetImpl {
 public:
  DslNetImpl(dsl::Signature sig, std::vector<dsl::Expr> components);

  void eval(double eps, std::span<const double> x, std::span<double> out) const override;
  std::shared_ptr<const NetImpl> partial(std::size_t var) const override;
  std::vector<Window> feature_windows(double eps, std::span<const double> base,
                                      std::span<const double> dir) const override;
  bool symbolic() const override { return true; }

  const dsl::Signature& signature() const noexcept { return sig_; }
  const std::vector<dsl::Expr>& components() const noexcept { return exprs_; }
  /// Derivative with respect to eps, still symbolic.
  std::shared_ptr<const DslNetImpl> eps_partial() const;

 private:
  dsl::Signature sig_;
  std::vector<dsl::Expr> exprs_;
  std::vector<dsl::Program> programs_;
  std::vector<dsl::Program> features_;
  mutable std::mutex mu_;
  mutable std::map<std::size_t, std::shared_ptr<const NetImpl>> partials_;
};

/// Builds a net from expressions and validates it on a coarse lattice of the
/// domain for every eps <= eps0 (DomainEvaluationError otherwise).
FunctionNet to_function_net(const std::vector<dsl::Expr>& components, const dsl::Signature& sig,
                            const EpsGrid& grid, const Box& domain);
FunctionNet to_function_net(const dsl::Expr& e, const dsl::Signature& sig, const EpsGrid& grid,
                            const Box& domain);

/// Parses and converts in one step.
FunctionNet parse_net(const std::vector<std::string>& sources, const dsl::Signature& sig,
                      const EpsGrid& grid, const Box& domain, const dsl::Definitions& defs = {});

/// Parses `name = expression` style definitions in order; later ones may use
/// earlier ones.
dsl::Definitions parse_definitions(const std::vector<std::pair<std::string, std::string>>& defs);

/// Evaluates an eps-only expression on the grid.
NumberNet number_net(const std::string& source, const EpsGrid& grid, const dsl::Definitions& defs = {});
PointNet point_net(const std::vector<std::string>& sources, const EpsGrid& grid,
                   const dsl::Definitions& defs = {}, std::optional<Box> ambient = std::nullopt);

}  // namespace colombeau
