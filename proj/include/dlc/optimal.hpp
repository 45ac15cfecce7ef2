#pragma once

#include "dlc/model.hpp"

namespace dlc {

/// How generalization responds to growing the free architecture axis. For
/// width reports, Wider/Narrower refer to the hidden-layer width; for depth
/// reports NarrowerAlwaysBetter means shallower models always win (the
/// continued depth-0 model, plain LR, is optimal).
enum class WidthRegime { WiderAlwaysBetter, WidthIrrelevant, FiniteOptimum, NarrowerAlwaysBetter };

std::string to_string(WidthRegime r);

struct WidthRegimeReport {
    WidthRegime regime = WidthRegime::WidthIrrelevant;
    /// Present only for FiniteOptimum: { gamma_star } for width reports, and
    /// { ell_star } or the two-point tie { j, j-1 } for depth reports.
    std::vector<double> optimum;
    double sigma_tilde2 = 0.0;
};

/// Optimal equal width at fixed depth. sigma_tilde <= 1: wider always better.
/// sigma_tilde > 1: finite optimum at
/// gamma_star = t/(t-1) * alpha with t = sigma_tilde^{2/(ell+1)}.
WidthRegimeReport rf_optimal_width(int ell, const Scenario& s);

/// Optimal depth at fixed equal width gamma. sigma_tilde <= 1: shallower
/// always better. sigma_tilde > 1: ell_star = floor(log sigma_tilde^2 /
/// log(gamma/(gamma-alpha))), with both {j, j-1} reported when the ratio is a
/// positive integer j (the two depths give identical error).
WidthRegimeReport rf_optimal_depth(double gamma, const Scenario& s);

/// Sign classification of d eps_NN / d gamma by sigma_tilde: wider better
/// below 1, width-independent at 1, narrower better above 1. NN models never
/// have a finite interior optimum.
WidthRegimeReport nn_width_monotonicity(const Scenario& s);

struct StationarityReport {
    double gamma_star = 0.0;
    double grad_max_abs = 0.0;
    double grad_tol = 0.0;
    std::vector<double> hessian_eigenvalues;  // ascending
    double analytic_small = 0.0;   // eigenvalue of multiplicity ell-1
    double analytic_large = 0.0;   // eigenvalue of multiplicity one
    double max_eig_rel_err = 0.0;
    bool gradient_ok = false;
    bool eigenvalues_ok = false;
    bool ok() const { return gradient_ok && eigenvalues_ok; }
};

/// Checks by central finite differences that gamma_star is a stationary point
/// of eps_RF with the analytic positive-definite Hessian structure
/// { lambda (multiplicity ell-1), lambda (ell+1) },
/// lambda = alpha^2 (1-alpha+eta^2) sigma_tilde^{6/(ell+1)} / gamma_star^4.
/// Requires sigma_tilde > 1 and alpha < 1.
StationarityReport verify_stationarity(int ell, const Scenario& s);

}  // namespace dlc
