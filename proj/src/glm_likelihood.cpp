#include "svam/glm_likelihood.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace svam {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be finite");
  }
}

void require_phi(double phi) {
  if (!(phi > 0.0 && phi < 1.0)) {
    throw DomainError("gamma shape phi must lie in (0, 1), got " + std::to_string(phi));
  }
}

// Numerically stable logistic sigmoid.
double sigmoid(double m) {
  if (m >= 0.0) {
    return 1.0 / (1.0 + std::exp(-m));
  }
  const double e = std::exp(m);
  return e / (1.0 + e);
}

}  // namespace

FamilySpec FamilySpec::gamma(double phi) {
  FamilySpec spec{FamilyKind::gamma, phi};
  spec.validate();
  return spec;
}

void FamilySpec::validate() const {
  if (kind == FamilyKind::gamma) {
    require_phi(gamma_shape_phi);
  }
}

double clamp_underflow(double weight) noexcept {
  return weight < kWeightFloor ? 0.0 : weight;
}

double gaussian_weight(double y, double eta, Scale beta, bool normalized) {
  require_finite(y, "label y");
  require_finite(eta, "parameter eta");
  const double b = beta.value();
  const double r = y - eta;
  double w = std::exp(-0.5 * b * r * r);
  if (normalized) {
    w *= std::sqrt(b / (2.0 * std::numbers::pi));
  }
  return w;
}

double gaussian_weight_sq(double squared_distance, Scale beta) {
  require_finite(squared_distance, "squared distance");
  if (squared_distance < 0.0) {
    throw DomainError("squared distance must be nonnegative");
  }
  return std::exp(-0.5 * beta.value() * squared_distance);
}

double bernoulli_weight(double y, double eta, Scale beta) {
  if (y != 1.0 && y != -1.0) {
    throw DomainError("bernoulli label must be -1 or +1, got " + std::to_string(y));
  }
  require_finite(eta, "parameter eta");
  return sigmoid(beta.value() * y * eta);
}

GammaAlteredParams gamma_altered_params(double eta, double phi, Scale beta) {
  require_phi(phi);
  if (!std::isfinite(eta) || eta <= 0.0) {
    throw DomainError("gamma parameter eta must be finite and > 0");
  }
  const double b = beta.value();
  const double denom = phi + b * (1.0 - phi);
  return {eta * b / denom, phi / denom, b * (1.0 - phi) / denom};
}

double gamma_log_density(double y, double eta, double phi) {
  require_phi(phi);
  if (!std::isfinite(y) || y <= 0.0) {
    throw DomainError("gamma label y must be finite and > 0");
  }
  if (!std::isfinite(eta) || eta <= 0.0) {
    throw DomainError("gamma parameter eta must be finite and > 0");
  }
  const double shape = 1.0 / phi;
  const double t = y * eta / phi;
  return -std::log(y) - std::lgamma(shape) + shape * std::log(t) - t;
}

double gamma_density(double y, double eta, double phi) {
  return std::exp(gamma_log_density(y, eta, phi));
}

double altered_gamma_density(double y, double eta, double phi, Scale beta) {
  const auto p = gamma_altered_params(eta, phi, beta);
  return gamma_density(y, p.eta_tilde, p.phi_tilde);
}

double altered_variance(const FamilySpec& spec, double eta, Scale beta) {
  spec.validate();
  require_finite(eta, "parameter eta");
  const double b = beta.value();
  switch (spec.kind) {
    case FamilyKind::gaussian:
      return 1.0 / b;
    case FamilyKind::bernoulli: {
      const double p = sigmoid(b * eta);
      return p * (1.0 - p);
    }
    case FamilyKind::gamma: {
      if (eta <= 0.0) {
        throw DomainError("gamma parameter eta must be > 0");
      }
      const double phi = spec.gamma_shape_phi;
      return (phi / (eta * eta)) * (phi + b * (1.0 - phi)) / (b * b);
    }
  }
  throw DomainError("unsupported family");
}

double altered_density(const FamilySpec& spec, double y, double eta, Scale beta) {
  spec.validate();
  switch (spec.kind) {
    case FamilyKind::gaussian:
      return gaussian_weight(y, eta, beta, /*normalized=*/true);
    case FamilyKind::bernoulli:
      return bernoulli_weight(y, eta, beta);
    case FamilyKind::gamma:
      return altered_gamma_density(y, eta, spec.gamma_shape_phi, beta);
  }
  throw DomainError("unsupported family");
}

double altered_mode(const FamilySpec& spec, double eta) {
  spec.validate();
  switch (spec.kind) {
    case FamilyKind::gaussian:
      return eta;
    case FamilyKind::bernoulli:
      return eta >= 0.0 ? 1.0 : -1.0;
    case FamilyKind::gamma:
      if (eta <= 0.0) {
        throw DomainError("gamma parameter eta must be > 0");
      }
      return (1.0 - spec.gamma_shape_phi) / eta;
  }
  throw DomainError("unsupported family");
}

}  // namespace svam
