#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace gridlat {

using Complex = std::complex<double>;

/// Sorts eigenvalues canonically: ascending real part, then imaginary part.
void sort_spectrum(std::vector<Complex>& values);

/// Eigenvalues of a real matrix, canonically sorted.
[[nodiscard]] std::vector<Complex> spectrum(const Eigen::MatrixXd& A);

[[nodiscard]] bool is_stable(const std::vector<Complex>& eigs);

/// P(k, i) = |right_ki * left_ik|, columns normalized to sum one, so column i describes
/// how strongly each state participates in mode i. Throws when the eigenvector basis is
/// numerically defective.
[[nodiscard]] Eigen::MatrixXd participation_factors(const Eigen::MatrixXd& A);

}  // namespace gridlat
