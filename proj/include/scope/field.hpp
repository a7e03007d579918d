#pragma once

#include <string>

#include "scope/types.hpp"

namespace scope {

enum class FieldKind { poly_sigma, sin_sigma, linear_state };

// Synthetic velocity fields with known structure:
//   poly_sigma:   v_i(sigma) = a_i + b_i*sigma + c_i*sigma^2
//   sin_sigma:    v_i(sigma) = amp * sin(omega * sigma)      (every dimension)
//   linear_state: v(x, sigma) = coupling .* x + drift
struct VelocityField {
  FieldKind kind = FieldKind::sin_sigma;
  int dim = default_latent_dim;
  Vector a, b, c;        // poly_sigma coefficients, one entry per dimension
  double amp = 1.0;      // sin_sigma
  double omega = 1.0;    // sin_sigma
  Vector coupling;       // linear_state
  Vector drift;          // linear_state

  void validate() const;
};

VelocityField make_poly_field(Vector a, Vector b, Vector c);
VelocityField make_sin_field(int dim, double amp, double omega);
VelocityField make_linear_state_field(Vector coupling, Vector drift);

Velocity eval_field(const VelocityField& field, const Vector& x, double sigma);

// Supremum over sigma in [0, 1] of |d^order v_i / d sigma^order| taken
// per dimension, maximized across dimensions. Defined for the
// sigma-only fields; linear_state depends on the trajectory and is
// rejected.
double sigma_derivative_bound(const VelocityField& field, int order);

// Same bound in the Euclidean norm of the full velocity vector.
double sigma_derivative_bound_l2(const VelocityField& field, int order);

const char* field_kind_name(FieldKind kind);
FieldKind field_kind_from_name(const std::string& name);

}  // namespace scope
