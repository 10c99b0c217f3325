#include "gridlat/poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "gridlat/error.hpp"

namespace gridlat {

namespace {

// Multiply the accumulated real coefficients by (s - r) for a real root, or by the
// real quadratic s^2 - 2 Re(r) s + |r|^2 for one root of a conjugate pair.
Eigen::VectorXd accumulate_factor(const Eigen::VectorXd& acc, Complex r, bool paired) {
    if (paired) {
        Eigen::Vector3d quad(std::norm(r), -2.0 * r.real(), 1.0);
        return conv(acc, quad);
    }
    Eigen::Vector2d lin(-r.real(), 1.0);
    return conv(acc, lin);
}

}  // namespace

Eigen::VectorXd poly_from_roots(std::vector<Complex> roots) {
    // Smallest factors first keeps intermediate coefficients balanced.
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });

    Eigen::VectorXd acc(1);
    acc << 1.0;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        const Complex r = roots[i];
        if (std::abs(r.imag()) <= 1e-12 * std::max(1.0, std::abs(r.real()))) {
            acc = accumulate_factor(acc, r, false);
            continue;
        }
        // Pair with the nearest unused conjugate.
        std::size_t mate = i;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(roots[j] - std::conj(r));
            if (d < best) {
                best = d;
                mate = j;
            }
        }
        if (mate == i || best > 1e-6 * std::max(1.0, std::abs(r)))
            throw Error("poly", "roots are not closed under conjugation");
        used[mate] = true;
        acc = accumulate_factor(acc, r, true);
    }
    return acc;
}

Eigen::VectorXd char_poly(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw Error("poly", "characteristic polynomial needs a square matrix");
    const Eigen::Index n = A.rows();
    if (n > 64) throw Error("poly", "matrix above 64 states");
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw Error("poly", "eigenvalue iteration failed");
    std::vector<Complex> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);
    const Eigen::VectorXd full = poly_from_roots(std::move(roots));
    return full.head(n);
}

std::vector<Complex> roots_of_monic(const Eigen::VectorXd& low) {
    const Eigen::MatrixXd C = companion_matrix(low);
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw Error("poly", "companion eigenvalue iteration failed");
    return {es.eigenvalues().data(), es.eigenvalues().data() + low.size()};
}

}  // namespace gridlat
