#pragma once

#include <complex>
#include <Eigen/Dense>

namespace rieffel {

using Complex = std::complex<double>;

/// Element of the coefficient algebra M_k(C): a k x k complex matrix with
/// the conjugate-transpose involution and the spectral norm as C*-norm.
/// Values are immutable once constructed and safe to share across threads.
class MatrixElement {
 public:
  MatrixElement() : entries_(Eigen::MatrixXcd::Zero(1, 1)) {}
  explicit MatrixElement(Eigen::MatrixXcd entries);

  static MatrixElement identity(int k);
  static MatrixElement zero(int k);
  /// Scalar c embedded as c * 1_C.
  static MatrixElement scalar(int k, Complex c);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  Complex operator()(int r, int c) const { return entries_(r, c); }

  MatrixElement adjoint() const { return MatrixElement(entries_.adjoint()); }

  friend MatrixElement operator+(const MatrixElement& a, const MatrixElement& b);
  friend MatrixElement operator-(const MatrixElement& a, const MatrixElement& b);
  friend MatrixElement operator*(const MatrixElement& a, const MatrixElement& b);
  friend MatrixElement operator*(Complex c, const MatrixElement& a);

 private:
  Eigen::MatrixXcd entries_;
};

/// C*-norm: largest singular value, computed from the eigenvalues of M*M.
double cstar_norm(const MatrixElement& m);

/// Involution: conjugate transpose.
MatrixElement adjoint(const MatrixElement& m);

}  // namespace rieffel
