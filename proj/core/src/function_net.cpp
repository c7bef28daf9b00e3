#include "colombeau/function_net.hpp"

#include <cfloat>
#include <cmath>

#include "colombeau/errors.hpp"

namespace colombeau {

std::shared_ptr<const NetImpl> NetImpl::partial(std::size_t var) const {
  if (var >= dim()) throw Error(ErrorCode::InvalidArgument, "partial: variable out of range");
  return std::make_shared<FdPartialImpl>(shared_from_this(), var);
}

std::vector<Window> NetImpl::feature_windows(double, std::span<const double>,
                                             std::span<const double>) const {
  return {};
}

FunctionNet::FunctionNet(EpsGrid grid, Box domain, std::shared_ptr<const NetImpl> impl)
    : grid_(std::move(grid)), domain_(std::move(domain)), impl_(std::move(impl)) {
  if (!impl_) throw Error(ErrorCode::InvalidArgument, "function net without backend");
  if (domain_.dim() != impl_->dim()) {
    throw Error(ErrorCode::InvalidArgument, "domain dimension " + std::to_string(domain_.dim()) +
                                                " does not match net input dimension " +
                                                std::to_string(impl_->dim()));
  }
}

FunctionNet FunctionNet::from_lambda(EpsGrid grid, Box domain, std::size_t codim, EvalFn f) {
  const std::size_t d = domain.dim();
  return FunctionNet(std::move(grid), std::move(domain),
                     std::make_shared<LambdaImpl>(d, codim, std::move(f)));
}

std::vector<double> FunctionNet::operator()(double eps, std::span<const double> x) const {
  std::vector<double> out(codim());
  eval(eps, x, out);
  return out;
}

double FunctionNet::scalar(double eps, std::span<const double> x) const {
  double out = 0.0;
  eval(eps, x, std::span<double>(&out, 1));
  return out;
}

FunctionNet FunctionNet::partial(std::size_t var) const {
  return FunctionNet(grid_, domain_, impl_->partial(var));
}

FunctionNet FunctionNet::partial(std::span<const std::size_t> vars) const {
  FunctionNet f = *this;
  for (std::size_t v : vars) f = f.partial(v);
  return f;
}

FdPartialImpl::FdPartialImpl(std::shared_ptr<const NetImpl> parent, std::size_t var)
    : NetImpl(parent->dim(), parent->codim()), parent_(std::move(parent)), var_(var) {}

void FdPartialImpl::eval(double eps, std::span<const double> x, std::span<double> out) const {
  static const double base_step = std::cbrt(DBL_EPSILON);
  std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
  std::vector<double> fp(codim()), fm(codim());
  const double h = base_step * std::max(1.0, std::abs(x[var_]));
  xp[var_] += h;
  xm[var_] -= h;
  const double dx = xp[var_] - xm[var_];
  parent_->eval(eps, xp, fp);
  parent_->eval(eps, xm, fm);
  for (std::size_t i = 0; i < codim(); ++i) out[i] = (fp[i] - fm[i]) / dx;
}

LinearCombinationImpl::LinearCombinationImpl(std::vector<double> coeffs,
                                             std::vector<std::shared_ptr<const NetImpl>> terms)
    : NetImpl(terms.at(0)->dim(), terms.at(0)->codim()),
      coeffs_(std::move(coeffs)),
      terms_(std::move(terms)) {
  if (coeffs_.size() != terms_.size()) {
    throw Error(ErrorCode::InvalidArgument, "linear combination: coefficient count mismatch");
  }
  for (const auto& t : terms_) {
    if (t->dim() != dim() || t->codim() != codim()) {
      throw Error(ErrorCode::InvalidArgument, "linear combination: shape mismatch");
    }
  }
}

void LinearCombinationImpl::eval(double eps, std::span<const double> x,
                                 std::span<double> out) const {
  std::vector<double> tmp(codim());
  for (std::size_t i = 0; i < codim(); ++i) out[i] = 0.0;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    terms_[k]->eval(eps, x, tmp);
    for (std::size_t i = 0; i < codim(); ++i) out[i] += coeffs_[k] * tmp[i];
  }
}

std::shared_ptr<const NetImpl> LinearCombinationImpl::partial(std::size_t var) const {
  std::vector<std::shared_ptr<const NetImpl>> d;
  for (const auto& t : terms_) d.push_back(t->partial(var));
  return std::make_shared<LinearCombinationImpl>(coeffs_, std::move(d));
}

std::vector<Window> LinearCombinationImpl::feature_windows(double eps,
                                                           std::span<const double> base,
                                                           std::span<const double> dir) const {
  std::vector<Window> all;
  for (const auto& t : terms_) {
    auto w = t->feature_windows(eps, base, dir);
    all.insert(all.end(), w.begin(), w.end());
  }
  return all;
}

FunctionNet linear_combination(std::span<const double> coeffs, std::span<const FunctionNet> nets) {
  if (nets.empty()) throw Error(ErrorCode::InvalidArgument, "linear combination of nothing");
  std::vector<std::shared_ptr<const NetImpl>> impls;
  for (const auto& n : nets) impls.push_back(n.impl());
  return FunctionNet(nets[0].grid(), nets[0].domain(),
                     std::make_shared<LinearCombinationImpl>(
                         std::vector<double>(coeffs.begin(), coeffs.end()), std::move(impls)));
}

AffineReparamImpl::AffineReparamImpl(std::shared_ptr<const NetImpl> f, std::size_t dim,
                                     std::vector<double> matrix, OffsetFn offset)
    : NetImpl(dim, f->codim()), f_(std::move(f)), matrix_(std::move(matrix)), offset_(std::move(offset)) {
  if (matrix_.size() != f_->dim() * dim) {
    throw Error(ErrorCode::InvalidArgument, "affine reparametrisation: matrix has wrong size");
  }
}

void AffineReparamImpl::map(double eps, std::span<const double> y, std::span<double> x) const {
  const std::size_t n = f_->dim();
  for (std::size_t i = 0; i < n; ++i) x[i] = 0.0;
  if (offset_) offset_(eps, x);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim(); ++j) s += matrix_[i * dim() + j] * y[j];
    x[i] += s;
  }
}

void AffineReparamImpl::eval(double eps, std::span<const double> y, std::span<double> out) const {
  std::vector<double> x(f_->dim());
  map(eps, y, x);
  f_->eval(eps, x, out);
}

std::shared_ptr<const NetImpl> AffineReparamImpl::partial(std::size_t var) const {
  // d/dy_var f(Ay + b) = sum_i A_{i,var} (d_i f)(Ay + b)
  std::vector<double> coeffs;
  std::vector<std::shared_ptr<const NetImpl>> terms;
  for (std::size_t i = 0; i < f_->dim(); ++i) {
    const double a = matrix_[i * dim() + var];
    if (a == 0.0) continue;
    coeffs.push_back(a);
    terms.push_back(std::make_shared<AffineReparamImpl>(f_->partial(i), dim(), matrix_, offset_));
  }
  if (terms.empty()) {
    const std::size_t d = dim(), m = codim();
    return std::make_shared<LambdaImpl>(d, m, [m](double, std::span<const double>, std::span<double> out) {
      for (std::size_t i = 0; i < m; ++i) out[i] = 0.0;
    });
  }
  if (terms.size() == 1 && coeffs[0] == 1.0) return terms[0];
  return std::make_shared<LinearCombinationImpl>(std::move(coeffs), std::move(terms));
}

std::vector<Window> AffineReparamImpl::feature_windows(double eps, std::span<const double> base,
                                                       std::span<const double> dir) const {
  std::vector<double> xb(f_->dim()), xd(f_->dim());
  map(eps, base, xb);
  for (std::size_t i = 0; i < f_->dim(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim(); ++j) s += matrix_[i * dim() + j] * dir[j];
    xd[i] = s;
  }
  return f_->feature_windows(eps, xb, xd);
}

}  // namespace colombeau
