#include "scope/field.hpp"

#include <cmath>
#include <stdexcept>

namespace scope {

void VelocityField::validate() const {
  if (dim < 1) throw std::invalid_argument("field dim must be >= 1");
  switch (kind) {
    case FieldKind::poly_sigma:
      if (a.size() != dim || b.size() != dim || c.size() != dim)
        throw std::invalid_argument("poly_sigma coefficients must have length dim");
      if (!a.allFinite() || !b.allFinite() || !c.allFinite())
        throw std::invalid_argument("poly_sigma coefficients must be finite");
      break;
    case FieldKind::sin_sigma:
      if (!std::isfinite(amp) || !std::isfinite(omega) || !(omega > 0.0))
        throw std::invalid_argument("sin_sigma needs finite amp and omega > 0");
      break;
    case FieldKind::linear_state:
      if (coupling.size() != dim || drift.size() != dim)
        throw std::invalid_argument("linear_state vectors must have length dim");
      if (!coupling.allFinite() || !drift.allFinite())
        throw std::invalid_argument("linear_state vectors must be finite");
      break;
  }
}

VelocityField make_poly_field(Vector a, Vector b, Vector c) {
  VelocityField f;
  f.kind = FieldKind::poly_sigma;
  f.dim = static_cast<int>(a.size());
  f.a = std::move(a);
  f.b = std::move(b);
  f.c = std::move(c);
  f.validate();
  return f;
}

VelocityField make_sin_field(int dim, double amp, double omega) {
  VelocityField f;
  f.kind = FieldKind::sin_sigma;
  f.dim = dim;
  f.amp = amp;
  f.omega = omega;
  f.validate();
  return f;
}

VelocityField make_linear_state_field(Vector coupling, Vector drift) {
  VelocityField f;
  f.kind = FieldKind::linear_state;
  f.dim = static_cast<int>(coupling.size());
  f.coupling = std::move(coupling);
  f.drift = std::move(drift);
  f.validate();
  return f;
}

Velocity eval_field(const VelocityField& field, const Vector& x, double sigma) {
  switch (field.kind) {
    case FieldKind::poly_sigma:
      return field.a + field.b * sigma + field.c * (sigma * sigma);
    case FieldKind::sin_sigma:
      return Vector::Constant(field.dim, field.amp * std::sin(field.omega * sigma));
    case FieldKind::linear_state:
      if (x.size() != field.dim) throw std::invalid_argument("latent dimension mismatch");
      return (field.coupling.array() * x.array()).matrix() + field.drift;
  }
  throw std::logic_error("unreachable");
}

double sigma_derivative_bound(const VelocityField& field, int order) {
  if (order < 1 || order > 3) throw std::invalid_argument("derivative order must be in [1, 3]");
  switch (field.kind) {
    case FieldKind::poly_sigma: {
      // v' = b + 2c*sigma on [0, 1]; v'' = 2c; v''' = 0.
      if (order == 1) {
        double best = 0.0;
        for (Eigen::Index i = 0; i < field.b.size(); ++i) {
          double at0 = std::abs(field.b[i]);
          double at1 = std::abs(field.b[i] + 2.0 * field.c[i]);
          best = std::max({best, at0, at1});
        }
        return best;
      }
      if (order == 2) return 2.0 * field.c.cwiseAbs().maxCoeff();
      return 0.0;
    }
    case FieldKind::sin_sigma:
      return std::abs(field.amp) * std::pow(field.omega, order);
    case FieldKind::linear_state:
      throw std::invalid_argument("linear_state has no sigma-only derivative bound");
  }
  throw std::logic_error("unreachable");
}

double sigma_derivative_bound_l2(const VelocityField& field, int order) {
  switch (field.kind) {
    case FieldKind::poly_sigma: {
      if (order == 1) {
        double sq = 0.0;
        for (Eigen::Index i = 0; i < field.b.size(); ++i) {
          double at = std::max(std::abs(field.b[i]), std::abs(field.b[i] + 2.0 * field.c[i]));
          sq += at * at;
        }
        return std::sqrt(sq);
      }
      if (order == 2) return 2.0 * field.c.norm();
      if (order == 3) return 0.0;
      throw std::invalid_argument("derivative order must be in [1, 3]");
    }
    default:
      return std::sqrt(static_cast<double>(field.dim)) * sigma_derivative_bound(field, order);
  }
}

const char* field_kind_name(FieldKind kind) {
  switch (kind) {
    case FieldKind::poly_sigma:
      return "poly_sigma";
    case FieldKind::sin_sigma:
      return "sin_sigma";
    case FieldKind::linear_state:
      return "linear_state";
  }
  return "?";
}

FieldKind field_kind_from_name(const std::string& name) {
  if (name == "poly_sigma") return FieldKind::poly_sigma;
  if (name == "sin_sigma") return FieldKind::sin_sigma;
  if (name == "linear_state") return FieldKind::linear_state;
  throw std::invalid_argument("unknown field kind: " + name);
}

}  // namespace scope
