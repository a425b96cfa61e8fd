/// Shared vocabulary types, tolerances and the error type used across the library.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace he1 {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Tolerance on |w^2 - P(z)| (scaled by 1+|z|^3) for points on the curve.
inline constexpr double eps_curve = 1e-10;
/// Minimum distance a regular path segment keeps from branch points and poles.
inline constexpr double delta_path = 1e-3;

enum class ErrorKind {
  path_too_close,
  continuation_failed,
  degenerate_basis,
  reroute_failed,
  invalid_params,
  quadrature_failure,
  bad_contour,
  no_root,
  reality_violation,
  io_error,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::path_too_close: return "path-too-close";
    case ErrorKind::continuation_failed: return "continuation-failed";
    case ErrorKind::degenerate_basis: return "degenerate-basis";
    case ErrorKind::reroute_failed: return "reroute-failed";
    case ErrorKind::invalid_params: return "invalid-params";
    case ErrorKind::quadrature_failure: return "quadrature-failure";
    case ErrorKind::bad_contour: return "bad-contour";
    case ErrorKind::no_root: return "no-root";
    case ErrorKind::reality_violation: return "reality-violation";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

/// Every failure in the library is reported as an Error carrying its kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Quadrature that did not reach its tolerance; keeps the best estimate around.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, cplx estimate, double bound)
      : Error(ErrorKind::quadrature_failure, what), estimate_(estimate), bound_(bound) {}
  cplx estimate() const noexcept { return estimate_; }
  double bound() const noexcept { return bound_; }

 private:
  cplx estimate_;
  double bound_;
};

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) {
  const double n = norm(a);
  return n > 0 ? (1.0 / n) * a : a;
}

/// Unit normal from the stereographic Gauss map value; g = infinity maps to the north pole.
inline Vec3 normal_from_gauss(cplx g) {
  if (!std::isfinite(std::abs(g))) return {0.0, 0.0, 1.0};
  const double m = std::norm(g);
  return {2.0 * g.real() / (m + 1.0), 2.0 * g.imag() / (m + 1.0), (m - 1.0) / (m + 1.0)};
}

}  // namespace he1
