#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gridlat/poly.hpp"
#include "gridlat/quantile.hpp"
#include "gridlat/state_space.hpp"

namespace gridlat {

/// Controllability matrix [B, AB, ..., A^{n-1}B] for single-input systems.
[[nodiscard]] Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& A,
                                                     const Eigen::VectorXd& B);

/// Numerical rank from singular values with tolerance n * eps * sigma_max.
[[nodiscard]] int numerical_rank(const Eigen::MatrixXd& M);

/// Hankel matrix of characteristic polynomial coefficients. o holds the n
/// low-order monic coefficients ascending; W(i, j) = o[i + j + 1] with the
/// convention o[n] = 1 and zero beyond.
[[nodiscard]] Eigen::MatrixXd hankel_from_charpoly(const Eigen::VectorXd& o);

/// When only m of the n eigenvalues are pinned the closed-loop polynomial
/// p(s) must factor as a(s) r(s) with a(s) the degree-m target factor. The
/// residual factor follows from p by division from the constant term upward,
/// which is linear: r_full = F p_low + g, including r's leading one.
struct QuotientMaps {
    Eigen::MatrixXd F;  // (n - m + 1) x n
    Eigen::VectorXd g;  // n - m + 1
};

/// Build the elimination maps for target factor a (length m, low-order monic
/// coefficients ascending, a[m] = 1 implied). Requires a[0] != 0 so division
/// from the bottom is well defined. n is the state dimension.
[[nodiscard]] QuotientMaps quotient_maps(const Eigen::VectorXd& a, int n);

/// Linear conditions V k = -h that any gain achieving the m pinned eigenvalues
/// must satisfy. The n coefficient balances of p = a r are stacked; the lowest
/// n - m of them define the residual factor, and the top m survive as the
/// conditions, each normalized to unit row norm.
struct PlacementConditions {
    Eigen::MatrixXd V;  // m x n
    Eigen::VectorXd h;  // m
    std::vector<int> rows;  // coefficient degrees the conditions came from
};

[[nodiscard]] PlacementConditions placement_conditions(const Eigen::VectorXd& a,
                                                       const Eigen::VectorXd& o,
                                                       const Eigen::MatrixXd& Mc);

/// Synthesized feedback and its demand requirement.
struct AttackPlan {
    Eigen::VectorXd gain;            // k, length n
    double delta_p_pu = 0.0;         // |k . x| at the captured operating state
    double delta_p_mw = 0.0;
    std::vector<Complex> targets;    // requested eigenvalues
    std::vector<Complex> achieved;   // full post-attack spectrum
    double epsilon = 0.0;            // sqrt(sum |achieved - target|^2)
    double alpha_pu = 0.0;           // chance margin applied to the cap
    bool feasible = false;
    double violation_pu = 0.0;       // max(0, delta_p - (cap - alpha))
};

/// Minimum-norm solution of V k = -h via SVD pseudoinverse. The returned gain
/// lies in the row space of V, so no smaller gain satisfies the conditions.
[[nodiscard]] Eigen::VectorXd solve_min_norm(const Eigen::MatrixXd& V,
                                             const Eigen::VectorXd& h);

/// Open-loop data reused across many synthesis calls on the same model.
struct PlacementContext {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;
    Eigen::VectorXd o;       // open-loop characteristic coefficients
    Eigen::MatrixXd W;       // hankel_from_charpoly(o)
    Eigen::MatrixXd Mc;      // controllability matrix
    std::vector<Complex> open_eigs;

    explicit PlacementContext(const StateSpaceModel& model);
    PlacementContext(Eigen::MatrixXd A_in, Eigen::VectorXd B_in);
};

/// Relocate the eigenvalues in `targets` (conjugate-closed set) and evaluate
/// the demand the gain requires at operating state x against the compromised
/// capacity cap_pu, backed off by the chance margin for `u`.
[[nodiscard]] AttackPlan synthesize_attack(const PlacementContext& ctx,
                                           const std::vector<Complex>& targets,
                                           const Eigen::VectorXd& x,
                                           double cap_pu,
                                           const UncertaintySpec& u,
                                           double base_mva);

}  // namespace gridlat
