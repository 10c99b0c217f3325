#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace gridlat {

using Complex = std::complex<double>;

// Polynomials are stored ascending: v[k] multiplies s^k. A "full" vector includes the
// leading coefficient; a "monic low" vector of length n carries c_0..c_{n-1} with the
// leading 1 implied.

/// Product of two full coefficient vectors.
template <typename DerivedA, typename DerivedB>
Eigen::Vector<typename DerivedA::Scalar, Eigen::Dynamic> conv(const Eigen::MatrixBase<DerivedA>& a,
                                                              const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    Eigen::Vector<Scalar, Eigen::Dynamic> out = Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(a.size() + b.size() - 1);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        for (Eigen::Index j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

/// Horner evaluation of a full coefficient vector at z.
template <typename Derived>
Complex poly_eval(const Eigen::MatrixBase<Derived>& coeffs, Complex z) {
    Complex acc(0.0, 0.0);
    for (Eigen::Index k = coeffs.size() - 1; k >= 0; --k) acc = acc * z + Complex(coeffs[k]);
    return acc;
}

/// Evaluation of a monic polynomial given by its low coefficients.
template <typename Derived>
Complex poly_eval_monic(const Eigen::MatrixBase<Derived>& low, Complex z) {
    Complex acc(1.0, 0.0);
    for (Eigen::Index k = low.size() - 1; k >= 0; --k) acc = acc * z + Complex(low[k]);
    return acc;
}

/// Companion matrix of a monic polynomial given by its low coefficients.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> companion_matrix(
    const Eigen::MatrixBase<Derived>& low) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = low.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> C =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    C.bottomLeftCorner(n - 1, n - 1).diagonal().setOnes();
    C.col(n - 1) = -low;
    return C;
}

/// Real coefficients (full, monic) of the polynomial with the given conjugate-closed roots.
[[nodiscard]] Eigen::VectorXd poly_from_roots(std::vector<Complex> roots);

/// Characteristic polynomial of A as monic low coefficients (length n), assembled from
/// the eigenvalues by stable factor accumulation. Rejects matrices above 64 states.
[[nodiscard]] Eigen::VectorXd char_poly(const Eigen::MatrixXd& A);

/// Roots of a monic polynomial via its companion matrix.
[[nodiscard]] std::vector<Complex> roots_of_monic(const Eigen::VectorXd& low);

}  // namespace gridlat
