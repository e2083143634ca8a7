#ifndef BIRDCAST_BASELINE_HPP
#define BIRDCAST_BASELINE_HPP

#include "birdcast/numerics.hpp"

namespace birdcast::baseline {

// Polynomial in the time index, fitted by least squares. The abscissa is
// mapped affinely onto [-1, 1] before building the Vandermonde matrix so the
// quartic stays well conditioned over multi-thousand-second spans.
struct PolyModel {
  Index degree = 1;
  Vector coeffs;  // constant term first, in the normalized variable
  double t_lo = 0.0;
  double t_hi = 1.0;

  double eval(double t) const;
  Vector eval(const Vector& t) const;
};

PolyModel fit_poly(const Vector& t, const Vector& y, Index degree);

}  // namespace birdcast::baseline

#endif  // BIRDCAST_BASELINE_HPP
