#pragma once

#include "dlc/model.hpp"

namespace dlc {

/// Large-width expansion of a learning curve about the kernel limit,
/// eps ~ base + scale * sum_j coeffs[j-1] lambda^j with lambda = alpha/gamma.
struct SeriesExpansion {
    double base = 0.0;   // eps_LR at the scenario
    double scale = 0.0;  // 1 - alpha + eta^2
    int order = 0;
    std::vector<double> coeffs;  // c_1 .. c_order

    /// Horner evaluation of the truncated series at lambda.
    double eval(double lambda) const;
    double eval_at_width(double gamma, double alpha) const { return eval(alpha / gamma); }
};

/// Leading large-width correction, [(1-alpha)(1-sigma2) + eta^2] sum_l alpha/gamma_l.
/// Identical for RF and NN models; computed through sigma_tilde so the two
/// routes agree to the last bit.
double rf_first_order(const Architecture& arch, const Scenario& s);

/// All-order equal-width RF series: c_j = (-1)^j sigma_tilde^2 C(ell,j) + ell,
/// with C(ell,j) = 0 for j > ell.
SeriesExpansion rf_series(double gamma, int ell, const Scenario& s, int order);

/// Equal-width NN expansion through second order:
/// c_1 = (1 - sigma_tilde^2) ell,
/// c_2 = ell(ell-1) sigma_tilde^2/2 - ell(ell+1)/(2 sigma_tilde^2) + ell.
SeriesExpansion nn_second_order(double gamma, int ell, const Scenario& s);

/// Leading-order generalization gap eps_RF - eps_NN for equal widths:
/// (1 - alpha + eta^2) ell(ell+1)/(2 sigma_tilde^2) (alpha/gamma)^2.
double rf_nn_gap_leading(double gamma, int ell, const Scenario& s);

/// Exact eps_RF - eps_NN for a single hidden layer, from the closed forms.
/// Non-negative on alpha < min(1, gamma1), vanishing only at alpha -> 0 or
/// gamma1 -> infinity.
double gap_exact_two_layer(double gamma1, const Scenario& s);

}  // namespace dlc
