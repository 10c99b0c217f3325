#pragma once

namespace gridlat {

/// Demand uncertainty at the attacked node: exceedance probability eta and the
/// standard deviation of the compromisable demand.
struct UncertaintySpec {
    double eta = 0.005;  // required in (0, 0.5)
    double stdev_pu = 0.0;
};

/// Inverse standard normal CDF, accurate to full double precision.
[[nodiscard]] double normal_quantile(double p);

/// Back-off that keeps the demand bound satisfied with probability 1 - eta:
/// quantile(1 - eta) * stdev. Nonnegative for eta < 0.5.
[[nodiscard]] double chance_margin(const UncertaintySpec& u);

}  // namespace gridlat
