#include "svam/diagnostics.hpp"

#include "svam/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace svam::diagnostics {

namespace {

double min_eigenvalue(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw DomainError("eigenvalue solve failed");
  return std::max(0.0, eig.eigenvalues().minCoeff());
}

void check(const Dataset& data, const Vector& s, const Vector& w) {
  if (s.size() != data.n()) throw ParameterError("weight vector length does not match data");
  if (w.size() != data.d()) throw ParameterError("model dimension does not match data");
}

kernels::Derivatives derivatives(const Dataset& data, Task task, const Vector& s,
                                 const Vector& w, double gamma_phi, bool hessian) {
  check(data, s, w);
  const auto serial = kernels::Exec::serial;
  switch (task) {
    case Task::rr: {
      kernels::Derivatives D;
      const Vector r = data.y - data.X * w;
      D.value = 0.5 * (s.array() * r.array().square()).sum();
      D.gradient = -kernels::weighted_moment(data.X, s, r, serial);
      if (hessian) D.hessian = kernels::weighted_gram(data.X, s, serial);
      return D;
    }
    case Task::me: {
      kernels::Derivatives D;
      const Matrix diff = data.X.rowwise() - w.transpose();
      D.value = 0.5 * (s.array() * diff.rowwise().squaredNorm().array()).sum();
      D.gradient = -kernels::weighted_row_sum(diff, s, serial);
      if (hessian) D.hessian = s.sum() * Matrix::Identity(data.d(), data.d());
      return D;
    }
    case Task::lr:
      return kernels::logistic_objective(data.X, data.y, s, w, 0.0, hessian, serial);
    case Task::gamma:
      return kernels::gamma_objective(data.X, data.y, s, w, gamma_phi, hessian, serial);
  }
  throw ParameterError("unknown task");
}

}  // namespace

double lwsc_probe(const Matrix& X, const Vector& s) {
  if (s.size() != X.rows()) throw ParameterError("weight vector length does not match data");
  return min_eigenvalue(kernels::weighted_gram(X, s, kernels::Exec::serial));
}

Matrix weighted_hessian(const Dataset& data, Task task, const Vector& s, const Vector& w,
                        double gamma_phi) {
  return derivatives(data, task, s, w, gamma_phi, true).hessian;
}

Vector weighted_gradient(const Dataset& data, Task task, const Vector& s, const Vector& w,
                         double gamma_phi) {
  return derivatives(data, task, s, w, gamma_phi, false).gradient;
}

double weighted_objective(const Dataset& data, Task task, const Vector& s, const Vector& w,
                          double gamma_phi) {
  return derivatives(data, task, s, w, gamma_phi, false).value;
}

double lwsc_probe(const Dataset& data, Task task, const Vector& s, const Vector& w,
                  double gamma_phi) {
  return min_eigenvalue(weighted_hessian(data, task, s, w, gamma_phi));
}

double lwlc_probe(const Dataset& data, Task task, const Vector& w_star, const Vector& w_current,
                  double beta, double gamma_phi) {
  validate_labels(data, task);
  const Vector s =
      svam_weights(data, task, w_current, beta, gamma_phi, kernels::Exec::serial);
  return weighted_gradient(data, task, s, w_star, gamma_phi).norm();
}

DiagnosticsReport contraction_report(const RunTrace& trace, const Dataset& data, Task task,
                                     double gamma_phi, double tol) {
  if (!data.w_true) throw ParameterError("contraction report needs the ground truth");
  const Vector& w_star = *data.w_true;
  DiagnosticsReport report;
  report.invariant_violations = trace.invariant_violations;
  for (std::size_t k = 0; k + 1 < trace.records.size(); ++k) {
    const IterationRecord& cur = trace.records[k];
    const IterationRecord& next = trace.records[k + 1];
    const Vector s =
        svam_weights(data, task, cur.model, cur.beta, gamma_phi, kernels::Exec::serial);
    ContractionRow row;
    row.t = cur.t;
    row.beta = cur.beta;
    row.lambda_min = lwsc_probe(data, task, s, w_star, gamma_phi);
    if (task == Task::lr || task == Task::gamma) {
      row.lambda_min =
          std::min(row.lambda_min, lwsc_probe(data, task, s, next.model, gamma_phi));
    }
    row.grad_norm = weighted_gradient(data, task, s, w_star, gamma_phi).norm();
    row.lambda_zero = !(row.lambda_min > 0.0);
    row.bound = row.lambda_zero ? std::numeric_limits<double>::infinity()
                                : 2.0 * row.grad_norm / row.lambda_min;
    row.observed = (next.model - w_star).norm();
    row.holds = row.lambda_zero || row.observed <= row.bound + tol * (1.0 + row.bound);
    if (!row.holds || row.lambda_zero) report.violations.push_back(row.t);
    report.rows.push_back(row);
  }
  return report;
}

void write_report_csv(std::ostream& out, const DiagnosticsReport& report) {
  out << "t,beta,lambda_min,grad_norm,bound,observed,lambda_zero,holds\n";
  char buf[256];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d\n", r.t, r.beta,
                  r.lambda_min, r.grad_norm, r.bound, r.observed, r.lambda_zero ? 1 : 0,
                  r.holds ? 1 : 0);
    out << buf;
  }
}

}  // namespace svam::diagnostics
