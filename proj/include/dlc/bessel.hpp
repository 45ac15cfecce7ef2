#pragma once

namespace dlc {

/// Ratio K_{nu+1}(q)/K_nu(q) of modified Bessel functions of the second
/// kind, for real order |nu| <= 1e6 and q > 0. Relative error <= 1e-10 on
/// that domain. Negative orders are folded with K_{-nu} = K_nu; the ratio is
/// computed in scaled/log space throughout, so no intermediate K value can
/// overflow. Throws std::domain_error for q <= 0 or out-of-range nu.
double bessel_k_ratio(double nu, double q);

}  // namespace dlc
