#include "kgreedy/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace kgreedy {

namespace {

void check_shape(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape))
    throw std::invalid_argument("kernel: shape must be positive and finite");
}

}  // namespace

KernelSpec KernelSpec::matern_basic(double shape) {
  check_shape(shape);
  KernelSpec k;
  k.family_ = KernelFamily::MaternBasic;
  k.shape_ = shape;
  return k;
}

KernelSpec KernelSpec::matern_linear(double shape, MaternLinearVariant variant) {
  check_shape(shape);
  KernelSpec k;
  k.family_ = KernelFamily::MaternLinear;
  k.shape_ = shape;
  k.variant_ = variant;
  return k;
}

KernelSpec KernelSpec::matern_quadratic(double shape) {
  check_shape(shape);
  KernelSpec k;
  k.family_ = KernelFamily::MaternQuadratic;
  k.shape_ = shape;
  return k;
}

KernelSpec KernelSpec::gaussian(double shape) {
  check_shape(shape);
  KernelSpec k;
  k.family_ = KernelFamily::Gaussian;
  k.shape_ = shape;
  return k;
}

KernelSpec KernelSpec::composite(KernelSpec outer, KernelSpec inner,
                                 DomainSpec indicator) {
  KernelSpec k;
  k.family_ = KernelFamily::Composite;
  k.outer_ = std::make_shared<KernelSpec>(std::move(outer));
  k.inner_ = std::make_shared<KernelSpec>(std::move(inner));
  k.indicator_ = std::make_shared<DomainSpec>(std::move(indicator));
  return k;
}

const KernelSpec& KernelSpec::outer() const {
  if (!outer_) throw std::logic_error("kernel: not a composite");
  return *outer_;
}

const KernelSpec& KernelSpec::inner() const {
  if (!inner_) throw std::logic_error("kernel: not a composite");
  return *inner_;
}

const DomainSpec& KernelSpec::indicator() const {
  if (!indicator_) throw std::logic_error("kernel: not a composite");
  return *indicator_;
}

double eval(const KernelSpec& k, PointView x, PointView y) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("eval: dimension mismatch");
  if (k.family() == KernelFamily::Composite) {
    double v = eval(k.outer(), x, y);
    if (k.indicator().contains(x) && k.indicator().contains(y))
      v += eval(k.inner(), x, y);
    return KernelSpec::kCompositeNormalization * v;
  }
  const double r = k.shape() * euclidean_distance(x, y);
  switch (k.family()) {
    case KernelFamily::MaternBasic:
      return std::exp(-r);
    case KernelFamily::MaternLinear:
      return k.linear_variant() == MaternLinearVariant::OnePlusR
                 ? std::exp(-r) * (1.0 + r)
                 : std::exp(-r) * (1.0 - r);
    case KernelFamily::MaternQuadratic:
      return std::exp(-r) * (3.0 + r * (3.0 + r)) / 3.0;
    case KernelFamily::Gaussian:
      return std::exp(-r * r);
    default:
      throw std::logic_error("eval: unknown kernel family");
  }
}

std::vector<double> diag(const KernelSpec& k, const PointList& pts) {
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    out[i] = eval(k, pts.point(i), pts.point(i));
  return out;
}

Eigen::MatrixXd gram(const KernelSpec& k, const PointList& pts) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  if (n == 0) throw std::invalid_argument("gram: empty point set");
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, i) = eval(k, pts.point(i), pts.point(i));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (euclidean_distance(pts.point(i), pts.point(j)) == 0.0)
        throw std::invalid_argument("gram: duplicate points");
      const double v = eval(k, pts.point(i), pts.point(j));
      A(i, j) = v;
      A(j, i) = v;
    }
  }
  return A;
}

}  // namespace kgreedy
