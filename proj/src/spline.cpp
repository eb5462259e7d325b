#include "profile_sampler/spline.hpp"

#include <algorithm>
#include <cmath>

namespace profile_sampler {

SplineBasis::SplineBasis(double lo, double hi, std::vector<double> interior_knots)
    : lo_(lo), hi_(hi), interior_(std::move(interior_knots)) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw DomainError("spline basis: need finite lo < hi");
  for (std::size_t i = 0; i < interior_.size(); ++i) {
    if (!(interior_[i] > lo && interior_[i] < hi))
      throw DomainError("spline basis: interior knot outside (lo, hi)");
    if (i > 0 && !(interior_[i] > interior_[i - 1]))
      throw DomainError("spline basis: interior knots must be strictly increasing");
  }
  knots_.assign(kDegree + 1, lo_);
  knots_.insert(knots_.end(), interior_.begin(), interior_.end());
  knots_.insert(knots_.end(), kDegree + 1, hi_);
}

Vector SplineBasis::eval(double z, int deriv) const {
  const int nb = size();
  Vector out = Vector::Zero(nb);
  if (deriv > kDegree) return out;
  const double x = std::clamp(z, lo_, hi_);
  const auto& t = knots_;
  const int m = static_cast<int>(t.size());

  // Degree-0 indicators on half-open spans; the last nonempty span is closed on the right.
  std::vector<double> a(static_cast<std::size_t>(m - 1), 0.0);
  int span = -1;
  for (int i = 0; i < m - 1; ++i) {
    if (t[i] < t[i + 1] && t[i] <= x && x < t[i + 1]) span = i;
  }
  if (span < 0) {
    for (int i = m - 2; i >= 0; --i) {
      if (t[i] < t[i + 1]) {
        span = i;
        break;
      }
    }
  }
  a[static_cast<std::size_t>(span)] = 1.0;

  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };

  const int value_degree = kDegree - deriv;
  for (int k = 1; k <= value_degree; ++k) {
    for (int i = 0; i < m - 1 - k; ++i) {
      a[static_cast<std::size_t>(i)] =
          ratio(x - t[i], t[i + k] - t[i]) * a[static_cast<std::size_t>(i)] +
          ratio(t[i + k + 1] - x, t[i + k + 1] - t[i + 1]) * a[static_cast<std::size_t>(i + 1)];
    }
  }
  for (int k = value_degree + 1; k <= kDegree; ++k) {
    for (int i = 0; i < m - 1 - k; ++i) {
      a[static_cast<std::size_t>(i)] =
          k * (ratio(a[static_cast<std::size_t>(i)], t[i + k] - t[i]) -
               ratio(a[static_cast<std::size_t>(i + 1)], t[i + k + 1] - t[i + 1]));
    }
  }
  for (int i = 0; i < nb; ++i) out[i] = a[static_cast<std::size_t>(i)];
  return out;
}

Matrix SplineBasis::design(const std::vector<double>& z, int deriv) const {
  Matrix b(static_cast<Eigen::Index>(z.size()), size());
  for (std::size_t i = 0; i < z.size(); ++i)
    b.row(static_cast<Eigen::Index>(i)) = eval(z[i], deriv).transpose();
  return b;
}

Matrix SplineBasis::penalty() const {
  // Second derivatives of a cubic spline are linear between knots and continuous
  // across simple knots, so Simpson's rule per span integrates the products exactly.
  const int nb = size();
  Matrix omega = Matrix::Zero(nb, nb);
  std::vector<double> breaks{lo_};
  breaks.insert(breaks.end(), interior_.begin(), interior_.end());
  breaks.push_back(hi_);
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s];
    const double b = breaks[s + 1];
    const double mid = 0.5 * (a + b);
    // Evaluate just inside the span to stay on the correct polynomial piece.
    const double eps = 1e-14 * (b - a);
    const Vector fa = eval(a + eps, 2);
    const Vector fm = eval(mid, 2);
    const Vector fb = eval(b - eps, 2);
    omega += (b - a) / 6.0 * (fa * fa.transpose() + 4.0 * fm * fm.transpose() + fb * fb.transpose());
  }
  return 0.5 * (omega + omega.transpose());
}

SplineCurve::SplineCurve(SplineBasis basis, Vector coefficients, double centering_offset)
    : basis_(std::move(basis)), coef_(std::move(coefficients)), offset_(centering_offset) {
  if (coef_.size() != basis_.size())
    throw DomainError("spline curve: coefficient count does not match basis");
}

double SplineCurve::operator()(double z) const { return basis_.eval(z).dot(coef_) - offset_; }

double SplineCurve::j2() const {
  const double q = coef_.dot(basis_.penalty() * coef_);
  return std::sqrt(std::max(q, 0.0));
}

double SplineCurve::sup_norm(int grid) const {
  double best = 0.0;
  for (int g = 0; g < grid; ++g) {
    const double z = basis_.lo() + (basis_.hi() - basis_.lo()) * g / (grid - 1);
    best = std::max(best, std::abs((*this)(z)));
  }
  return best;
}

}  // namespace profile_sampler
