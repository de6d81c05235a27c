// Poincare ball (curvature -1) primitives. Everything operates on raw
// double spans; callers own storage and dimension bookkeeping.
#pragma once

#include <span>
#include <vector>

namespace poincavec::geometry {

struct GeometryConfig {
  // boundary clamp: projection caps norms at 1 - eps_boundary
  double eps_boundary = 1e-5;
  // guards divisions by a vanishing norm
  double delta_stab = 1e-15;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> v);
double squared_norm(std::span<const double> v);

// lambda_z = 2 / (1 - |z|^2)
double conformal_factor(std::span<const double> z);

// arcosh(1 + 2|u-v|^2 / ((1-|u|^2)(1-|v|^2))), argument clamped to >= 1
double distance(std::span<const double> u, std::span<const double> v);

// d and its Euclidean gradients; coincident points get zero gradients.
// grad_u / grad_v may be empty spans when not needed.
double distance_with_grad(std::span<const double> u, std::span<const double> v,
                          std::span<double> grad_u, std::span<double> grad_v);

// u (+) v into out; both inputs must already be inside the ball
void mobius_add(std::span<const double> u, std::span<const double> v,
                std::span<double> out, const GeometryConfig& cfg = {});

// rescales z onto the closed ball of radius 1 - eps_boundary (no-op inside)
void project(std::span<double> z, const GeometryConfig& cfg = {});

// tangent map at the origin and its inverse
void log0(std::span<const double> z, std::span<double> out);
void exp0(std::span<const double> t, std::span<double> out,
          const GeometryConfig& cfg = {});

// hyperbolic distance from the origin: 2 artanh(|z|)
double radius(std::span<const double> z);

// convenience value type for call sites that want owned storage
struct BallPoint {
  std::vector<double> coords;

  static BallPoint projected(std::vector<double> v,
                             const GeometryConfig& cfg = {});
  operator std::span<const double>() const { return coords; }
};

}  // namespace poincavec::geometry
