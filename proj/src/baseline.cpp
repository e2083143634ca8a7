#include "birdcast/baseline.hpp"

#include <stdexcept>
#include <string>

namespace birdcast::baseline {

namespace {

double normalize(double t, double lo, double hi) {
  return 2.0 * (t - lo) / (hi - lo) - 1.0;
}

}  // namespace

double PolyModel::eval(double t) const {
  const double u = normalize(t, t_lo, t_hi);
  double acc = 0.0;
  for (Index k = coeffs.size() - 1; k >= 0; --k) acc = acc * u + coeffs(k);
  return acc;
}

Vector PolyModel::eval(const Vector& t) const {
  Vector out(t.size());
  for (Index i = 0; i < t.size(); ++i) out(i) = eval(t(i));
  return out;
}

PolyModel fit_poly(const Vector& t, const Vector& y, Index degree) {
  if (degree < 0) throw std::invalid_argument("degree must be >= 0");
  if (t.size() != y.size())
    throw std::invalid_argument("time and value lengths differ");
  if (t.size() < degree + 1)
    throw std::invalid_argument("need at least " + std::to_string(degree + 1) +
                                " samples to fit degree " +
                                std::to_string(degree));
  PolyModel m;
  m.degree = degree;
  m.t_lo = t.minCoeff();
  m.t_hi = t.maxCoeff();
  if (!(m.t_hi > m.t_lo))
    throw std::invalid_argument("time samples must span a nonzero range");

  Matrix vand(t.size(), degree + 1);
  for (Index i = 0; i < t.size(); ++i) {
    const double u = normalize(t(i), m.t_lo, m.t_hi);
    double p = 1.0;
    for (Index j = 0; j <= degree; ++j) {
      vand(i, j) = p;
      p *= u;
    }
  }
  m.coeffs = vand.colPivHouseholderQr().solve(y);
  return m;
}

}  // namespace birdcast::baseline
