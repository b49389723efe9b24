#pragma once

// Variance-altered exponential-family likelihoods.
//
// Raising a density to the power beta and renormalising keeps its shape,
// its mode and the ordering of likelihood values, while the variance decays
// like 1/beta. For the three supported families the altered density has a
// closed form:
//
//   gaussian   sqrt(beta/2pi) exp(-beta/2 (y - eta)^2)          variance 1/beta
//   bernoulli  P(y | eta) = 1 / (1 + exp(-beta y eta)),  y in {-1,+1}
//   gamma      G(y | eta~, phi~) with
//                phi~ = phi / (phi + beta (1 - phi))
//                eta~ = eta beta / (phi + beta (1 - phi))
//              where G(y | eta, phi) = (y eta / phi)^(1/phi) exp(-y eta / phi)
//                                      / (y Gamma(1/phi)),   0 < phi < 1
//
// All functions are pure and thread-safe.

#include "svam/types.hpp"

namespace svam {

enum class FamilyKind { gaussian, bernoulli, gamma };

struct FamilySpec {
  FamilyKind kind = FamilyKind::gaussian;
  /// Gamma shape parameter phi in (0, 1). Ignored by the other families.
  double gamma_shape_phi = 0.5;

  static FamilySpec gaussian() { return {FamilyKind::gaussian, 0.5}; }
  static FamilySpec bernoulli() { return {FamilyKind::bernoulli, 0.5}; }
  static FamilySpec gamma(double phi);

  /// Throws DomainError if phi is outside (0, 1) for the gamma family.
  void validate() const;
};

struct GammaAlteredParams {
  double eta_tilde;
  double phi_tilde;
  /// 1 - phi_tilde without the cancellation near phi_tilde = 1.
  double one_minus_phi_tilde;
};

/// Weights below this value are treated as exact zeros.
inline constexpr double kWeightFloor = 1e-300;

/// Clamp values below kWeightFloor to 0.
double clamp_underflow(double weight) noexcept;

/// exp(-beta/2 (y - eta)^2), times sqrt(beta / 2pi) when `normalized`.
/// The unnormalised form is what SVAM uses as a weight: the normaliser is the
/// same for every point at a fixed beta.
double gaussian_weight(double y, double eta, Scale beta, bool normalized = false);

/// Product-of-coordinates multivariate form exp(-beta/2 ||y - eta||^2),
/// given the squared distance.
double gaussian_weight_sq(double squared_distance, Scale beta);

/// (1 + exp(-beta y eta))^-1 for y in {-1, +1}, evaluated without overflow.
double bernoulli_weight(double y, double eta, Scale beta);

GammaAlteredParams gamma_altered_params(double eta, double phi, Scale beta);

/// log G(y | eta, phi); requires y > 0, eta > 0, phi in (0, 1).
double gamma_log_density(double y, double eta, double phi);
double gamma_density(double y, double eta, double phi);

/// Density of the beta-altered gamma form at y (log space, exponentiated).
double altered_gamma_density(double y, double eta, double phi, Scale beta);

/// Variance of the beta-altered distribution.
///   gaussian   1/beta
///   bernoulli  p (1 - p) with p = (1 + exp(-beta eta))^-1, bounded above by
///              1/(beta |eta|)
///   gamma      (phi / eta^2) (phi + beta (1 - phi)) / beta^2
double altered_variance(const FamilySpec& spec, double eta, Scale beta);

/// Altered density (mass for bernoulli) of label y. The gaussian form is
/// normalised here, so beta = 1 reproduces the standard density exactly.
double altered_density(const FamilySpec& spec, double y, double eta, Scale beta);

/// Mode of the altered distribution; the same for every beta.
/// gaussian: eta, gamma: (1 - phi)/eta, bernoulli: sign(eta) (+1 at 0).
double altered_mode(const FamilySpec& spec, double eta);

}  // namespace svam
