#include "gridlat/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "gridlat/error.hpp"
#include "gridlat/spectral.hpp"
#include "gridlat/vuln.hpp"

namespace gridlat {

Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& A, const Eigen::VectorXd& B) {
    if (A.rows() != A.cols() || B.size() != A.rows()) throw Error("placement", "A and B dimensions disagree");
    const Eigen::Index n = A.rows();
    Eigen::MatrixXd Mc(n, n);
    Eigen::VectorXd col = B;
    for (Eigen::Index k = 0; k < n; ++k) {
        Mc.col(k) = col;
        col = A * col;
    }
    return Mc;
}

int numerical_rank(const Eigen::MatrixXd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double tol = static_cast<double>(std::max(M.rows(), M.cols())) *
                       std::numeric_limits<double>::epsilon() * sv[0];
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > tol) ++rank;
    return rank;
}

Eigen::MatrixXd hankel_from_charpoly(const Eigen::VectorXd& o) {
    const Eigen::Index n = o.size();
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index k = i + j + 1;
            if (k < n)
                W(i, j) = o[k];
            else if (k == n)
                W(i, j) = 1.0;
        }
    }
    return W;
}

QuotientMaps quotient_maps(const Eigen::VectorXd& a, int n) {
    const int m = static_cast<int>(a.size());
    if (m < 1 || m > n) throw Error("placement", "target factor degree must lie in 1..n");
    if (std::abs(a[0]) < 1e-300) throw Error("placement", "target factor has a root at the origin");

    const int q = n - m;
    QuotientMaps maps;
    maps.F = Eigen::MatrixXd::Zero(q + 1, n);
    maps.g = Eigen::VectorXd::Zero(q + 1);
    maps.g[q] = 1.0;

    // r_j = (p_j - sum_{i=1..min(j,m)} a_i r_{j-i}) / a_0, rows built in place.
    for (int j = 0; j < q; ++j) {
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
        row[j] = 1.0;
        for (int i = 1; i <= std::min(j, m); ++i) {
            const double ai = (i == m) ? 1.0 : a[i];
            row -= ai * maps.F.row(j - i);
        }
        maps.F.row(j) = row / a[0];
    }
    return maps;
}

PlacementConditions placement_conditions(const Eigen::VectorXd& a, const Eigen::VectorXd& o,
                                         const Eigen::MatrixXd& Mc) {
    const int n = static_cast<int>(o.size());
    const int m = static_cast<int>(a.size());
    if (Mc.rows() != n || Mc.cols() != n) throw Error("placement", "controllability matrix dimension mismatch");

    const QuotientMaps maps = quotient_maps(a, n);
    const int q = n - m;

    // Convolution by the full target factor, truncated to the n non-leading
    // coefficients; the leading coefficient matches identically.
    Eigen::MatrixXd Ca = Eigen::MatrixXd::Zero(n, q + 1);
    for (int k = 0; k <= q; ++k) {
        for (int i = 0; i <= m; ++i) {
            const int deg = i + k;
            if (deg >= n) continue;
            Ca(deg, k) += (i == m) ? 1.0 : a[i];
        }
    }

    // Coefficient sensitivity of the closed loop: p(k) = o + G k.
    const Eigen::MatrixXd W = hankel_from_charpoly(o);
    const Eigen::MatrixXd G = W * Mc.transpose();

    const Eigen::MatrixXd D = Ca * maps.F - Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd S = D * G;
    const Eigen::VectorXd t = D * o + Ca * maps.g;

    // The division consumed the q lowest-degree balances to define r, leaving
    // the top m as the conditions on the gain. Each row is normalized; that
    // rescales equations without moving their solution set.
    PlacementConditions out;
    out.V.resize(m, n);
    out.h.resize(m);
    out.rows.resize(m);
    for (int i = 0; i < m; ++i) {
        const int r = q + i;
        out.rows[i] = r;
        double scale = S.row(r).norm();
        if (!(scale > 0.0)) scale = 1.0;
        out.V.row(i) = S.row(r) / scale;
        out.h[i] = t[r] / scale;
    }
    return out;
}

Eigen::VectorXd solve_min_norm(const Eigen::MatrixXd& V, const Eigen::VectorXd& h) {
    if (V.rows() != h.size()) throw Error("placement", "condition dimensions disagree");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.solve(-h);
}

PlacementContext::PlacementContext(const StateSpaceModel& model)
    : PlacementContext(model.A, model.B) {}

PlacementContext::PlacementContext(Eigen::MatrixXd A_in, Eigen::VectorXd B_in)
    : A(std::move(A_in)), B(std::move(B_in)) {
    o = char_poly(A);
    W = hankel_from_charpoly(o);
    Mc = controllability_matrix(A, B);
    open_eigs = spectrum(A);
}

AttackPlan synthesize_attack(const PlacementContext& ctx, const std::vector<Complex>& targets,
                             const Eigen::VectorXd& x, double cap_pu, const UncertaintySpec& u,
                             double base_mva) {
    const int n = static_cast<int>(ctx.A.rows());
    if (targets.empty()) throw Error("synthesize", "no target eigenvalues");
    if (static_cast<int>(targets.size()) > n) throw Error("synthesize", "more targets than states");
    if (x.size() != n) throw Error("synthesize", "operating state dimension mismatch");

    const Eigen::VectorXd a_full = poly_from_roots(targets);
    const Eigen::VectorXd a_low = a_full.head(a_full.size() - 1);

    const PlacementConditions pc = placement_conditions(a_low, ctx.o, ctx.Mc);
    const Eigen::VectorXd k = solve_min_norm(pc.V, pc.h);
    if (!k.allFinite()) throw Error("synthesize", "gain is not finite");

    AttackPlan plan;
    plan.gain = -k;  // demand deviation is fed back as u = gain . x
    plan.targets = targets;

    const Eigen::MatrixXd A_closed = ctx.A + ctx.B * plan.gain.transpose();
    plan.achieved = spectrum(A_closed);
    plan.epsilon = relocation_error(targets, plan.achieved);

    plan.delta_p_pu = std::abs(plan.gain.dot(x));
    plan.delta_p_mw = plan.delta_p_pu * base_mva;
    plan.alpha_pu = chance_margin(u);
    if (!std::isfinite(plan.delta_p_pu)) throw Error("synthesize", "required demand is not finite");

    const double budget = cap_pu - plan.alpha_pu;
    plan.feasible = plan.delta_p_pu <= budget;
    plan.violation_pu = std::max(0.0, plan.delta_p_pu - budget);
    return plan;
}

}  // namespace gridlat
