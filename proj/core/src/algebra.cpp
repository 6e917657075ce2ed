#include "rieffel/algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace rieffel {

MatrixElement::MatrixElement(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) {
    throw std::invalid_argument("MatrixElement: entries must be a square k x k array, k >= 1");
  }
}

MatrixElement MatrixElement::identity(int k) {
  return MatrixElement(Eigen::MatrixXcd::Identity(k, k));
}

MatrixElement MatrixElement::zero(int k) {
  return MatrixElement(Eigen::MatrixXcd::Zero(k, k));
}

MatrixElement MatrixElement::scalar(int k, Complex c) {
  return MatrixElement(c * Eigen::MatrixXcd::Identity(k, k));
}

MatrixElement operator+(const MatrixElement& a, const MatrixElement& b) {
  return MatrixElement(a.entries_ + b.entries_);
}

MatrixElement operator-(const MatrixElement& a, const MatrixElement& b) {
  return MatrixElement(a.entries_ - b.entries_);
}

MatrixElement operator*(const MatrixElement& a, const MatrixElement& b) {
  return MatrixElement(a.entries_ * b.entries_);
}

MatrixElement operator*(Complex c, const MatrixElement& a) {
  return MatrixElement(c * a.entries_);
}

double cstar_norm(const MatrixElement& m) {
  // Spectral norm via the largest eigenvalue of M*M; k is small (desk scale)
  // so a dense self-adjoint eigensolve is exact enough and cheap.
  const Eigen::MatrixXcd& a = m.entries();
  Eigen::MatrixXcd gram = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
  double top = es.eigenvalues().maxCoeff();
  return std::sqrt(std::max(top, 0.0));
}

MatrixElement adjoint(const MatrixElement& m) { return m.adjoint(); }

}  // namespace rieffel
