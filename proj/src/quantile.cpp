#include "gridlat/quantile.hpp"

#include <cmath>

#include "gridlat/error.hpp"

namespace gridlat {

// Rational initial guess (Acklam's approximation) polished with one Halley step
// against the exact CDF via erfc; the composite is accurate to ~1e-15 over (0, 1).
double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) throw Error("quantile", "probability must lie strictly inside (0, 1)");

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,  -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01, -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    static constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    const double sqrt2 = std::sqrt(2.0);
    const double sqrt2pi = std::sqrt(2.0 * M_PI);
    const double e = 0.5 * std::erfc(-x / sqrt2) - p;
    const double u = e * sqrt2pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double chance_margin(const UncertaintySpec& u) {
    if (!(u.eta > 0.0) || !(u.eta < 0.5)) throw Error("quantile", "eta must lie in (0, 0.5)");
    if (u.stdev_pu < 0.0) throw Error("quantile", "stdev must be nonnegative");
    if (u.stdev_pu == 0.0) return 0.0;
    return normal_quantile(1.0 - u.eta) * u.stdev_pu;
}

}  // namespace gridlat
