#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "colombeau/box.hpp"
#include "colombeau/eps_calculus.hpp"

namespace colombeau {

/// Closed interval [lo, hi] on a line, used for sharp features of a net.
struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

using EvalFn = std::function<void(double eps, std::span<const double> x, std::span<double> out)>;

/// Evaluation backend of a FunctionNet. Implementations are immutable.
class NetImpl : public std::enable_shared_from_this<NetImpl> {
 public:
  NetImpl(std::size_t dim, std::size_t codim) : dim_(dim), codim_(codim) {}
  virtual ~NetImpl() = default;

  std::size_t dim() const noexcept { return dim_; }
  std::size_t codim() const noexcept { return codim_; }

  virtual void eval(double eps, std::span<const double> x, std::span<double> out) const = 0;

  /// Partial derivative with respect to input `var`. The default is a
  /// central difference with step cbrt(machine eps) * max(1, |x_var|).
  virtual std::shared_ptr<const NetImpl> partial(std::size_t var) const;

  /// Parameters s for which base + s * dir meets a sharp feature (a
  /// mollified step or bump of width ~eps). Empty when unknown.
  virtual std::vector<Window> feature_windows(double eps, std::span<const double> base,
                                              std::span<const double> dir) const;

  virtual bool symbolic() const { return false; }

 private:
  std::size_t dim_;
  std::size_t codim_;
};

/// A representative (u_eps)_eps: per-eps smooth maps from a box into R^codim.
class FunctionNet {
 public:
  FunctionNet() = default;
  FunctionNet(EpsGrid grid, Box domain, std::shared_ptr<const NetImpl> impl);

  static FunctionNet from_lambda(EpsGrid grid, Box domain, std::size_t codim, EvalFn f);

  const EpsGrid& grid() const noexcept { return grid_; }
  const Box& domain() const noexcept { return domain_; }
  std::size_t dim() const { return impl_->dim(); }
  std::size_t codim() const { return impl_->codim(); }
  const std::shared_ptr<const NetImpl>& impl() const noexcept { return impl_; }

  void eval(double eps, std::span<const double> x, std::span<double> out) const {
    impl_->eval(eps, x, out);
  }
  std::vector<double> operator()(double eps, std::span<const double> x) const;
  double scalar(double eps, std::span<const double> x) const;

  FunctionNet partial(std::size_t var) const;
  FunctionNet partial(std::span<const std::size_t> vars) const;

  std::vector<Window> feature_windows(double eps, std::span<const double> base,
                                      std::span<const double> dir) const {
    return impl_->feature_windows(eps, base, dir);
  }
  bool symbolic() const { return impl_->symbolic(); }

  FunctionNet with_domain(Box domain) const { return FunctionNet(grid_, std::move(domain), impl_); }
  FunctionNet with_grid(EpsGrid grid) const { return FunctionNet(std::move(grid), domain_, impl_); }

 private:
  EpsGrid grid_ = EpsGrid::dyadic();
  Box domain_;
  std::shared_ptr<const NetImpl> impl_;
};

/// Backend wrapping a plain callable; derivatives by finite differences.
class LambdaImpl : public NetImpl {
 public:
  LambdaImpl(std::size_t dim, std::size_t codim, EvalFn f)
      : NetImpl(dim, codim), f_(std::move(f)) {}
  void eval(double eps, std::span<const double> x, std::span<double> out) const override {
    f_(eps, x, out);
  }

 private:
  EvalFn f_;
};

/// Central-difference partial of another backend.
class FdPartialImpl : public NetImpl {
 public:
  FdPartialImpl(std::shared_ptr<const NetImpl> parent, std::size_t var);
  void eval(double eps, std::span<const double> x, std::span<double> out) const override;
  std::vector<Window> feature_windows(double eps, std::span<const double> base,
                                      std::span<const double> dir) const override {
    return parent_->feature_windows(eps, base, dir);
  }

 private:
  std::shared_ptr<const NetImpl> parent_;
  std::size_t var_;
};

/// sum_k c_k f_k for backends of equal shape.
class LinearCombinationImpl : public NetImpl {
 public:
  LinearCombinationImpl(std::vector<double> coeffs, std::vector<std::shared_ptr<const NetImpl>> terms);
  void eval(double eps, std::span<const double> x, std::span<double> out) const override;
  std::shared_ptr<const NetImpl> partial(std::size_t var) const override;
  std::vector<Window> feature_windows(double eps, std::span<const double> base,
                                      std::span<const double> dir) const override;

 private:
  std::vector<double> coeffs_;
  std::vector<std::shared_ptr<const NetImpl>> terms_;
};

/// y -> f(A y + b_eps), with A a dense (f.dim x dim) matrix and b an
/// eps-dependent offset. Partials follow the chain rule exactly.
class AffineReparamImpl : public NetImpl {
 public:
  using OffsetFn = std::function<void(double eps, std::span<double> b)>;
  AffineReparamImpl(std::shared_ptr<const NetImpl> f, std::size_t dim, std::vector<double> matrix,
                    OffsetFn offset);
  void eval(double eps, std::span<const double> y, std::span<double> out) const override;
  std::shared_ptr<const NetImpl> partial(std::size_t var) const override;
  std::vector<Window> feature_windows(double eps, std::span<const double> base,
                                      std::span<const double> dir) const override;
  bool symbolic() const override { return f_->symbolic(); }

 private:
  void map(double eps, std::span<const double> y, std::span<double> x) const;
  std::shared_ptr<const NetImpl> f_;
  std::vector<double> matrix_;
  OffsetFn offset_;
};

/// a * f - b * g style helper.
FunctionNet linear_combination(std::span<const double> coeffs, std::span<const FunctionNet> nets);

}  // namespace colombeau
