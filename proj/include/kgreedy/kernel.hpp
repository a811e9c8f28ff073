#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "kgreedy/domain.hpp"
#include "kgreedy/geometry.hpp"

namespace kgreedy {

enum class KernelFamily {
  MaternBasic,      // e^{-r}
  MaternLinear,     // e^{-r} (1 + r)
  MaternQuadratic,  // e^{-r} (3 + 3r + r^2) / 3
  Gaussian,         // e^{-r^2}
  Composite,        // (outer + chi chi' inner) / 2
};

// OnePlusR is the positive definite C^2 Matern correlation. OneMinusR is
// indefinite and exists only so runs against it can be compared; the
// kernels module rejects nothing, the Gram factorizations downstream fail.
enum class MaternLinearVariant { OnePlusR, OneMinusR };

class KernelSpec {
 public:
  // r = shape * ||x - y||_2 throughout; shape must be positive.
  static KernelSpec matern_basic(double shape = 1.0);
  static KernelSpec matern_linear(
      double shape = 1.0,
      MaternLinearVariant variant = MaternLinearVariant::OnePlusR);
  static KernelSpec matern_quadratic(double shape = 1.0);
  static KernelSpec gaussian(double shape = 1.0);

  // normalization * (outer(x,y) + chi(x) chi(y) inner(x,y)) with chi the
  // indicator of `indicator`. The factor keeps k(x,x) <= 1 when both parts
  // have unit diagonal.
  static KernelSpec composite(KernelSpec outer, KernelSpec inner,
                              DomainSpec indicator);
  static constexpr double kCompositeNormalization = 0.5;

  KernelFamily family() const { return family_; }
  double shape() const { return shape_; }
  MaternLinearVariant linear_variant() const { return variant_; }

  // Composite parts; throw for the radial families.
  const KernelSpec& outer() const;
  const KernelSpec& inner() const;
  const DomainSpec& indicator() const;

 private:
  KernelSpec() = default;

  KernelFamily family_ = KernelFamily::MaternBasic;
  double shape_ = 1.0;
  MaternLinearVariant variant_ = MaternLinearVariant::OnePlusR;
  std::shared_ptr<const KernelSpec> outer_;
  std::shared_ptr<const KernelSpec> inner_;
  std::shared_ptr<const DomainSpec> indicator_;
};

double eval(const KernelSpec& k, PointView x, PointView y);

// k(x_i, x_i) for every point.
std::vector<double> diag(const KernelSpec& k, const PointList& pts);

// Symmetric kernel matrix; rejects duplicate points.
Eigen::MatrixXd gram(const KernelSpec& k, const PointList& pts);

}  // namespace kgreedy
