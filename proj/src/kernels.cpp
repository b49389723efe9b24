#include "svam/kernels.hpp"

#include "svam/glm_likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace svam::kernels {

namespace {

void check_rows(const Matrix& X, Index n, const char* what) {
  if (X.rows() != n) {
    throw ParameterError(std::string(what) + ": length " + std::to_string(n) +
                         " does not match " + std::to_string(X.rows()) + " rows");
  }
}

void check_cols(const Matrix& X, const Vector& w) {
  if (X.cols() != w.size()) {
    throw ParameterError("model dimension " + std::to_string(w.size()) +
                         " does not match " + std::to_string(X.cols()) + " columns");
  }
}

Index chunk_count(Index n) { return (n + kChunkRows - 1) / kChunkRows; }

// Runs fn(begin, length) for each row chunk in parallel and folds the
// partial results in chunk order.
template <class Partial, class ChunkFn, class Fold>
Partial chunked_reduce(Index n, Partial init, ChunkFn fn, Fold fold) {
  const Index chunks = chunk_count(n);
  std::vector<Partial> partials(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < chunks; ++c) {
    const Index begin = c * kChunkRows;
    partials[static_cast<std::size_t>(c)] = fn(begin, std::min(kChunkRows, n - begin));
  }
  for (auto& p : partials) {
    fold(init, p);
  }
  return init;
}

double row_dot(const Matrix& X, Index i, const Vector& w) {
  double acc = 0.0;
  for (Index j = 0; j < X.cols(); ++j) {
    acc += X(i, j) * w(j);
  }
  return acc;
}

double stable_sigmoid(double m) {
  if (m >= 0.0) return 1.0 / (1.0 + std::exp(-m));
  const double e = std::exp(m);
  return e / (1.0 + e);
}

// log(1 + exp(-m)) without overflow.
double softplus_neg(double m) {
  if (m > 0.0) return std::log1p(std::exp(-m));
  return -m + std::log1p(std::exp(m));
}

// log G(y | eta~, phi~) where log(eta) = z; everything stays in log space so
// that neither exp(z) nor a huge beta overflows before the final exp.
struct GammaLogWeight {
  double phi;
  double log_beta_ratio;  // log(beta / (phi + beta (1 - phi)))
  double phi_tilde;
  double shape;           // 1 / phi_tilde
  double lgamma_shape;

  GammaLogWeight(double phi_in, double beta)
      : phi(phi_in),
        log_beta_ratio(std::log(beta) - std::log(phi_in + beta * (1.0 - phi_in))),
        phi_tilde(phi_in / (phi_in + beta * (1.0 - phi_in))),
        shape(1.0 / phi_tilde),
        lgamma_shape(std::lgamma(shape)) {}

  double operator()(double y, double z) const {
    const double log_eta_tilde = z + log_beta_ratio;
    const double log_t = std::log(y) + log_eta_tilde - std::log(phi_tilde);
    const double t = std::exp(log_t);
    const double lw = -std::log(y) - lgamma_shape + shape * log_t - t;
    return std::isnan(lw) ? -std::numeric_limits<double>::infinity() : lw;
  }
};

void validate_bernoulli_labels(const Vector& y) {
  for (Index i = 0; i < y.size(); ++i) {
    if (y(i) != 1.0 && y(i) != -1.0) {
      throw DomainError("bernoulli label at row " + std::to_string(i) + " is not -1/+1");
    }
  }
}

void validate_positive_labels(const Vector& y) {
  for (Index i = 0; i < y.size(); ++i) {
    if (!(y(i) > 0.0) || !std::isfinite(y(i))) {
      throw DomainError("gamma label at row " + std::to_string(i) + " is not a positive real");
    }
  }
}

void validate_phi(double phi) {
  if (!(phi > 0.0 && phi < 1.0)) {
    throw DomainError("gamma shape phi must lie in (0, 1)");
  }
}

Vector clamp_all(Vector s) {
  for (Index i = 0; i < s.size(); ++i) s(i) = clamp_underflow(s(i));
  return s;
}

}  // namespace

Vector gaussian_weights(const Matrix& X, const Vector& y, const Vector& w, double beta,
                        Exec exec) {
  check_rows(X, y.size(), "labels");
  check_cols(X, w);
  const double b = Scale(beta).value();
  const Index n = X.rows();
  Vector s(n);
  if (exec == Exec::serial) {
    for (Index i = 0; i < n; ++i) {
      const double r = y(i) - row_dot(X, i, w);
      s(i) = std::exp(-0.5 * b * r * r);
    }
    return clamp_all(std::move(s));
  }
  const Vector eta = X * w;
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const double r = y(i) - eta(i);
    s(i) = clamp_underflow(std::exp(-0.5 * b * r * r));
  }
  return s;
}

Vector point_weights(const Matrix& points, const Vector& mu, double beta, Exec exec) {
  check_cols(points, mu);
  const double b = Scale(beta).value();
  const Index n = points.rows();
  Vector s(n);
  if (exec == Exec::serial) {
    for (Index i = 0; i < n; ++i) {
      double sq = 0.0;
      for (Index j = 0; j < points.cols(); ++j) {
        const double diff = points(i, j) - mu(j);
        sq += diff * diff;
      }
      s(i) = std::exp(-0.5 * b * sq);
    }
    return clamp_all(std::move(s));
  }
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const double sq = (points.row(i).transpose() - mu).squaredNorm();
    s(i) = clamp_underflow(std::exp(-0.5 * b * sq));
  }
  return s;
}

Vector bernoulli_weights(const Matrix& X, const Vector& y, const Vector& w, double beta,
                         Exec exec) {
  check_rows(X, y.size(), "labels");
  check_cols(X, w);
  validate_bernoulli_labels(y);
  const double b = Scale(beta).value();
  const Index n = X.rows();
  Vector s(n);
  if (exec == Exec::serial) {
    for (Index i = 0; i < n; ++i) {
      s(i) = stable_sigmoid(b * y(i) * row_dot(X, i, w));
    }
    return clamp_all(std::move(s));
  }
  const Vector eta = X * w;
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    s(i) = clamp_underflow(stable_sigmoid(b * y(i) * eta(i)));
  }
  return s;
}

Vector gamma_weights(const Matrix& X, const Vector& y, const Vector& w, double phi,
                     double beta, Exec exec) {
  check_rows(X, y.size(), "labels");
  check_cols(X, w);
  validate_phi(phi);
  validate_positive_labels(y);
  const GammaLogWeight log_weight(phi, Scale(beta).value());
  const Index n = X.rows();
  Vector lw(n);
  if (exec == Exec::serial) {
    for (Index i = 0; i < n; ++i) lw(i) = log_weight(y(i), row_dot(X, i, w));
  } else {
    const Vector z = X * w;
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) lw(i) = log_weight(y(i), z(i));
  }
  const double top = lw.maxCoeff();
  if (!std::isfinite(top)) {
    return Vector::Zero(n);
  }
  Vector s(n);
  for (Index i = 0; i < n; ++i) s(i) = clamp_underflow(std::exp(lw(i) - top));
  return s;
}

Matrix weighted_gram(const Matrix& X, const Vector& s, Exec exec) {
  check_rows(X, s.size(), "weights");
  const Index d = X.cols();
  if (exec == Exec::serial) {
    Matrix G = Matrix::Zero(d, d);
    for (Index i = 0; i < X.rows(); ++i) {
      if (s(i) == 0.0) continue;
      for (Index a = 0; a < d; ++a) {
        const double sa = s(i) * X(i, a);
        for (Index b = 0; b < d; ++b) G(a, b) += sa * X(i, b);
      }
    }
    return G;
  }
  return chunked_reduce(
      X.rows(), Matrix(Matrix::Zero(d, d)),
      [&](Index begin, Index len) -> Matrix {
        const auto Xc = X.middleRows(begin, len);
        return Xc.transpose() * s.segment(begin, len).asDiagonal() * Xc;
      },
      [](Matrix& acc, const Matrix& part) { acc += part; });
}

Vector weighted_moment(const Matrix& X, const Vector& s, const Vector& y, Exec exec) {
  check_rows(X, s.size(), "weights");
  check_rows(X, y.size(), "labels");
  const Index d = X.cols();
  if (exec == Exec::serial) {
    Vector m = Vector::Zero(d);
    for (Index i = 0; i < X.rows(); ++i) {
      if (s(i) == 0.0) continue;
      for (Index a = 0; a < d; ++a) m(a) += s(i) * y(i) * X(i, a);
    }
    return m;
  }
  return chunked_reduce(
      X.rows(), Vector(Vector::Zero(d)),
      [&](Index begin, Index len) -> Vector {
        const Vector sy = s.segment(begin, len).cwiseProduct(y.segment(begin, len));
        return X.middleRows(begin, len).transpose() * sy;
      },
      [](Vector& acc, const Vector& part) { acc += part; });
}

Vector weighted_row_sum(const Matrix& points, const Vector& s, Exec exec) {
  check_rows(points, s.size(), "weights");
  const Index d = points.cols();
  if (exec == Exec::serial) {
    Vector m = Vector::Zero(d);
    for (Index i = 0; i < points.rows(); ++i) {
      for (Index a = 0; a < d; ++a) m(a) += s(i) * points(i, a);
    }
    return m;
  }
  return chunked_reduce(
      points.rows(), Vector(Vector::Zero(d)),
      [&](Index begin, Index len) -> Vector {
        return points.middleRows(begin, len).transpose() * s.segment(begin, len);
      },
      [](Vector& acc, const Vector& part) { acc += part; });
}

namespace {

// Per-point first and second derivative of a loss l(z) in z = <x, w>.
struct PointTerms {
  double loss;
  double d1;
  double d2;
};

template <class Terms>
Derivatives accumulate_objective(const Matrix& X, const Vector& s, const Vector& w,
                                 bool with_hessian, Exec exec, Terms terms) {
  const Index d = X.cols();
  if (exec == Exec::serial) {
    Derivatives out;
    out.gradient = Vector::Zero(d);
    if (with_hessian) out.hessian = Matrix::Zero(d, d);
    for (Index i = 0; i < X.rows(); ++i) {
      if (s(i) == 0.0) continue;
      const PointTerms t = terms(i, row_dot(X, i, w));
      out.value += s(i) * t.loss;
      for (Index a = 0; a < d; ++a) {
        out.gradient(a) += s(i) * t.d1 * X(i, a);
        if (with_hessian) {
          for (Index b = 0; b < d; ++b) out.hessian(a, b) += s(i) * t.d2 * X(i, a) * X(i, b);
        }
      }
    }
    return out;
  }

  Derivatives init;
  init.gradient = Vector::Zero(d);
  if (with_hessian) init.hessian = Matrix::Zero(d, d);
  return chunked_reduce(
      X.rows(), init,
      [&](Index begin, Index len) -> Derivatives {
        const auto Xc = X.middleRows(begin, len);
        const Vector z = Xc * w;
        Vector g1 = Vector::Zero(len);
        Vector g2 = Vector::Zero(len);
        Derivatives part;
        for (Index k = 0; k < len; ++k) {
          const double si = s(begin + k);
          if (si == 0.0) continue;
          const PointTerms t = terms(begin + k, z(k));
          part.value += si * t.loss;
          g1(k) = si * t.d1;
          g2(k) = si * t.d2;
        }
        part.gradient = Xc.transpose() * g1;
        if (with_hessian) part.hessian = Xc.transpose() * g2.asDiagonal() * Xc;
        return part;
      },
      [with_hessian](Derivatives& acc, const Derivatives& part) {
        acc.value += part.value;
        acc.gradient += part.gradient;
        if (with_hessian) acc.hessian += part.hessian;
      });
}

}  // namespace

Derivatives logistic_objective(const Matrix& X, const Vector& y, const Vector& s,
                               const Vector& w, double ridge, bool with_hessian, Exec exec) {
  check_rows(X, y.size(), "labels");
  check_rows(X, s.size(), "weights");
  check_cols(X, w);
  Derivatives out = accumulate_objective(X, s, w, with_hessian, exec, [&](Index i, double z) {
    const double m = y(i) * z;
    const double p = stable_sigmoid(m);
    return PointTerms{softplus_neg(m), -y(i) * (1.0 - p), p * (1.0 - p)};
  });
  if (ridge != 0.0) {
    out.value += ridge * w.squaredNorm();
    out.gradient += 2.0 * ridge * w;
    if (with_hessian) out.hessian.diagonal().array() += 2.0 * ridge;
  }
  return out;
}

Derivatives gamma_objective(const Matrix& X, const Vector& y, const Vector& s,
                            const Vector& w, double phi, bool with_hessian, Exec exec) {
  check_rows(X, y.size(), "labels");
  check_rows(X, s.size(), "weights");
  check_cols(X, w);
  validate_phi(phi);
  const double log_scale = -std::log1p(-phi);  // log (1 - phi)^-1
  return accumulate_objective(X, s, w, with_hessian, exec, [&](Index i, double z) {
    const double e = std::exp(z + std::log(y(i)) + log_scale);
    return PointTerms{e - z, e - 1.0, e};
  });
}

}  // namespace svam::kernels
