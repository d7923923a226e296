#pragma once

#include <Eigen/Dense>
#include <string_view>

namespace gif {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Largest |m - m^T| entry relative to the largest |m| entry.
double asymmetry(const Matrix& m);

// Lower Cholesky factor of a symmetric positive-definite matrix (symmetrized first).
// Throws NumericalError naming `what` when the factorization fails.
Matrix lower_cholesky(const Matrix& m, std::string_view what);

// Lower-triangular-like square root S with S S^T = m for symmetric positive
// semidefinite m. Uses Cholesky when possible and falls back to a pivoted
// LDL^T so that singular inputs (e.g. a zero process noise) are accepted.
Matrix psd_sqrt(const Matrix& m, std::string_view what);

// True when m is symmetric within `tol` (relative) and its symmetrized
// version admits a square root.
bool is_symmetric_psd(const Matrix& m, double tol = 1e-12);

}  // namespace gif
