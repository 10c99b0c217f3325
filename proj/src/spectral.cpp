#include "gridlat/spectral.hpp"

#include <algorithm>

#include <Eigen/Eigenvalues>

#include "gridlat/error.hpp"

namespace gridlat {

void sort_spectrum(std::vector<Complex>& values) {
    std::sort(values.begin(), values.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

std::vector<Complex> spectrum(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw Error("spectrum", "matrix is not square");
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw Error("spectrum", "eigenvalue iteration failed");
    std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + A.rows());
    sort_spectrum(out);
    return out;
}

bool is_stable(const std::vector<Complex>& eigs) {
    for (Complex v : eigs)
        if (!(v.real() < 0.0)) return false;
    return true;
}

Eigen::MatrixXd participation_factors(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw Error("spectrum", "matrix is not square");
    const Eigen::Index n = A.rows();
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw Error("spectrum", "eigenvalue iteration failed");
    const Eigen::MatrixXcd V = es.eigenvectors();

    Eigen::FullPivLU<Eigen::MatrixXcd> lu(V);
    if (!lu.isInvertible()) throw Error("spectrum", "eigenvector basis is numerically defective");
    const Eigen::MatrixXcd Vinv = lu.inverse();

    Eigen::MatrixXd P(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k) P(k, i) = std::abs(V(k, i) * Vinv(i, k));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = P.col(i).sum();
        if (s > 0.0) P.col(i) /= s;
    }
    return P;
}

}  // namespace gridlat
