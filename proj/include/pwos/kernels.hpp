#pragma once

#include "pwos/core.hpp"
#include "pwos/rng.hpp"

namespace pwos {

// Green's functions of the 3d ball of radius R (homogeneous Dirichlet data on
// the sphere), for the Laplace/Poisson and screened Poisson operators, plus
// their gradients and the importance samplers used to integrate against them.
//
// Ratios of hyperbolic functions are evaluated in exponential form once the
// arguments are large enough to overflow sinh/cosh (screening strengths like
// sigma = 1/(c dt)^2 make this a practical concern, not a theoretical one).

namespace detail {

inline double sinhRatio(double a, double b) {
  // sinh(a)/sinh(b) for a >= 0, b > 0
  if (b < 350.0 && a < 350.0) return std::sinh(a) / std::sinh(b);
  return std::exp(a - b) * (1.0 - std::exp(-2.0 * a)) / (1.0 - std::exp(-2.0 * b));
}

inline double coshOverSinh(double a, double b) {
  // cosh(a)/sinh(b) for a >= 0, b > 0
  if (b < 350.0 && a < 350.0) return std::cosh(a) / std::sinh(b);
  return std::exp(a - b) * (1.0 + std::exp(-2.0 * a)) / (1.0 - std::exp(-2.0 * b));
}

inline double coth(double x) {
  if (x < 350.0) return std::cosh(x) / std::sinh(x);
  return (1.0 + std::exp(-2.0 * x)) / (1.0 - std::exp(-2.0 * x));
}

}  // namespace detail

// G(x, y) for x at the ball center; s = |y - x|. Negative inside the ball.
inline double greenBall(double s, double R) {
  return (s - R) / (4.0 * kPi * s * R);
}

inline double greenBallScreened(double s, double R, double sigma) {
  if (sigma <= 0.0) return greenBall(s, R);
  double rs = std::sqrt(sigma);
  return -detail::sinhRatio((R - s) * rs, R * rs) / (4.0 * kPi * s);
}

// Gradient with respect to the evaluation point x, at the ball center.
// rvec = y - x, with |rvec| = s.
inline Vec3 greenGradCenter(const Vec3& rvec, double R) {
  double s = norm(rvec);
  double s3 = s * s * s;
  return rvec * (-(1.0 / s3 - 1.0 / (R * R * R)) / (4.0 * kPi));
}

namespace detail {

// x*cosh(x) - sinh(x), series-stabilized near zero where the direct form
// cancels catastrophically.
inline double xCoshMinusSinh(double x) {
  if (x < 0.1) {
    double x2 = x * x;
    return x * x2 * (1.0 / 3.0 + x2 * (1.0 / 30.0 + x2 * (1.0 / 840.0 + x2 / 45360.0)));
  }
  return x * std::cosh(x) - std::sinh(x);
}

}  // namespace detail

inline Vec3 greenGradCenterScreened(const Vec3& rvec, double R, double sigma) {
  if (sigma <= 0.0) return greenGradCenter(rvec, R);
  double s = norm(rvec);
  double a = std::sqrt(sigma);
  double x = a * s, X = a * R;
  // Exact center gradient, from the l=1 term of the modified spherical Bessel
  // expansion of the ball kernel:
  //   grad = -(1 / (4 pi s^2)) [ e^{-x}(1+x)
  //            - e^{-X}(1+X) (x cosh x - sinh x) / (X cosh X - sinh X) ] rhat
  double imagePart;
  if (X < 350.0) {
    imagePart = std::exp(-X) * (1.0 + X) * detail::xCoshMinusSinh(x) / detail::xCoshMinusSinh(X);
  } else {
    // exponential form of the same ratio, safe against cosh/sinh overflow
    double numer = (x - 1.0) * std::exp(x - X) + (x + 1.0) * std::exp(-x - X);
    double denom = (X - 1.0) + (X + 1.0) * std::exp(-2.0 * X);
    imagePart = (1.0 + X) * numer / denom;
  }
  double num = std::exp(-x) * (1.0 + x) - imagePart;
  return rvec * (-num / (4.0 * kPi * s * s * s));
}

// Gradient of the Poisson G with respect to x at a general position inside the
// ball. Coordinates are ball-centered: x and y are offsets from the center.
inline Vec3 greenGradOffcenter(const Vec3& x, const Vec3& y, double R) {
  Vec3 rvec = y - x;
  double s = norm(rvec);
  double yl = norm(y);
  if (yl < 1e-12 * R) {
    // Image term vanishes in the y -> 0 limit; only the free-space part is left.
    double xl = norm(x);
    return x / (4.0 * kPi * xl * xl * xl);
  }
  Vec3 q = x * yl - y * (R * R / yl);
  double ql = norm(q);
  return (rvec / (s * s * s) + q * (R * yl / (ql * ql * ql))) * (-1.0 / (4.0 * kPi));
}

// Survival weight c_{r,sigma} of one step of radius r; equals 1 for sigma = 0.
inline double screenedWeight(double r, double sigma) {
  if (sigma <= 0.0) return 1.0;
  double x = r * std::sqrt(sigma);
  if (x < 1e-12) return 1.0;
  if (x < 350.0) return x / std::sinh(x);
  return 2.0 * x * std::exp(-x) / (1.0 - std::exp(-2.0 * x));
}

struct BallSample {
  Vec3 point;
  double pdf = 0;
};

// Uniform point on the sphere of radius r about `center`.
inline Vec3 sampleSphere(Rng& rng, const Vec3& center, double r) {
  return center + rng.unitVector() * r;
}

// Ball sample with density p(z) proportional to 1/|z - center| (cancels the
// integrable singularity of G at the center). pdf = 1/(2 pi r^2 s).
inline BallSample sampleBallInvDist(Rng& rng, const Vec3& center, double r) {
  double s;
  int guard = 0;
  do {
    s = r * std::sqrt(rng.uniform());
  } while (s < 1e-9 * r && ++guard < 100);
  if (s < 1e-9 * r) s = 1e-9 * r;
  Vec3 dir = rng.unitVector();
  return {center + dir * s, 1.0 / (2.0 * kPi * r * r * s)};
}

// Ball sample with density p(z) proportional to 1/|z - center|^2 (cancels the
// gradient-kernel singularity). pdf = 1/(4 pi r s^2).
inline BallSample sampleBallInvDist2(Rng& rng, const Vec3& center, double r) {
  double s;
  int guard = 0;
  do {
    s = r * rng.uniform();
  } while (s < 1e-9 * r && ++guard < 100);
  if (s < 1e-9 * r) s = 1e-9 * r;
  Vec3 dir = rng.unitVector();
  return {center + dir * s, 1.0 / (4.0 * kPi * r * s * s)};
}

}  // namespace pwos
