#include "gif/linalg.hpp"

#include <cmath>
#include <string>

#include "gif/errors.hpp"

namespace gif {

double asymmetry(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

Matrix lower_cholesky(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    throw DomainError(std::string(what) + ": matrix is not square");
  }
  if (!m.allFinite()) {
    throw NumericalError(std::string(what) + ": matrix has non-finite entries");
  }
  Eigen::LLT<Matrix> llt(symmetrized(m));
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": Cholesky factorization failed");
  }
  return llt.matrixL();
}

Matrix psd_sqrt(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    throw DomainError(std::string(what) + ": matrix is not square");
  }
  if (!m.allFinite()) {
    throw NumericalError(std::string(what) + ": matrix has non-finite entries");
  }
  const Matrix sym = symmetrized(m);
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  Eigen::LDLT<Matrix> ldlt(sym);
  if (ldlt.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": LDL^T factorization failed");
  }
  const Vector d = ldlt.vectorD();
  const double scale = std::max(1.0, sym.cwiseAbs().maxCoeff());
  if (d.minCoeff() < -1e-12 * scale) {
    throw NumericalError(std::string(what) + ": matrix is not positive semidefinite");
  }
  const Matrix l = ldlt.matrixL();
  Matrix s = l * d.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  // Undo the symmetric pivoting: sym = P^T L D L^T P.
  return ldlt.transpositionsP().transpose() * s;
}

bool is_symmetric_psd(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || !m.allFinite()) return false;
  if (asymmetry(m) > tol) return false;
  try {
    (void)psd_sqrt(m, "psd check");
  } catch (const Error&) {
    return false;
  }
  return true;
}

}  // namespace gif
