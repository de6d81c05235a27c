#include "poincavec/geometry.hpp"

#include <cmath>

namespace poincavec::geometry {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(std::span<const double> v) { return dot(v, v); }

double norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

double conformal_factor(std::span<const double> z) {
  return 2.0 / (1.0 - squared_norm(z));
}

double distance(std::span<const double> u, std::span<const double> v) {
  double diff2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double d = u[i] - v[i];
    diff2 += d * d;
  }
  double denom = (1.0 - squared_norm(u)) * (1.0 - squared_norm(v));
  double arg = 1.0 + 2.0 * diff2 / denom;
  if (arg < 1.0) arg = 1.0;
  return std::acosh(arg);
}

double distance_with_grad(std::span<const double> u, std::span<const double> v,
                          std::span<double> grad_u, std::span<double> grad_v) {
  const std::size_t n = u.size();
  double uu = squared_norm(u);
  double vv = squared_norm(v);
  double uv = dot(u, v);
  double diff2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = u[i] - v[i];
    diff2 += d * d;
  }
  double alpha = 1.0 - uu;
  double beta = 1.0 - vv;
  double gamma = 1.0 + 2.0 * diff2 / (alpha * beta);
  if (gamma < 1.0) gamma = 1.0;
  double d = std::acosh(gamma);
  double root = std::sqrt(gamma * gamma - 1.0);
  if (root <= 0.0) {
    // coincident points: d = 0 and the metric gradient is undefined; use 0
    for (double& g : grad_u) g = 0.0;
    for (double& g : grad_v) g = 0.0;
    return d;
  }
  if (!grad_u.empty()) {
    double cu = 4.0 / (beta * root);
    double su = (vv - 2.0 * uv + 1.0) / (alpha * alpha);
    for (std::size_t i = 0; i < n; ++i) {
      grad_u[i] = cu * (su * u[i] - v[i] / alpha);
    }
  }
  if (!grad_v.empty()) {
    double cv = 4.0 / (alpha * root);
    double sv = (uu - 2.0 * uv + 1.0) / (beta * beta);
    for (std::size_t i = 0; i < n; ++i) {
      grad_v[i] = cv * (sv * v[i] - u[i] / beta);
    }
  }
  return d;
}

void mobius_add(std::span<const double> u, std::span<const double> v,
                std::span<double> out, const GeometryConfig& cfg) {
  double uu = squared_norm(u);
  double vv = squared_norm(v);
  double uv = dot(u, v);
  double denom = 1.0 + 2.0 * uv + uu * vv;
  double cu = (1.0 + 2.0 * uv + vv) / denom;
  double cv = (1.0 - uu) / denom;
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] = cu * u[i] + cv * v[i];
  }
  project(out, cfg);
}

void project(std::span<double> z, const GeometryConfig& cfg) {
  double n = norm(z);
  double scale = (1.0 - cfg.eps_boundary) / (n + cfg.eps_boundary);
  if (scale >= 1.0) return;
  for (double& x : z) x *= scale;
}

void log0(std::span<const double> z, std::span<double> out) {
  double n = norm(z);
  if (n == 0.0) {
    for (double& x : out) x = 0.0;
    return;
  }
  double scale = 2.0 * std::atanh(n) / n;
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = scale * z[i];
}

void exp0(std::span<const double> t, std::span<double> out,
          const GeometryConfig& cfg) {
  double n = norm(t);
  double scale = std::tanh(n / 2.0) / (n + cfg.delta_stab);
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = scale * t[i];
  project(out, cfg);
}

double radius(std::span<const double> z) { return 2.0 * std::atanh(norm(z)); }

BallPoint BallPoint::projected(std::vector<double> v,
                               const GeometryConfig& cfg) {
  BallPoint p{std::move(v)};
  project(p.coords, cfg);
  return p;
}

}  // namespace poincavec::geometry
