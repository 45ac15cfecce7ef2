#pragma once

#include "dlc/model.hpp"

namespace dlc {

/// Raised when no root of the order-parameter condition passes the
/// physicality filters. Not expected on the supported parameter domain.
struct NoPhysicalRootError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The order-parameter root condition for an NN model in the under-sampled
/// phase, z^{depth+1} = prefactor * prod_l (a[l] z + b[l]), with
///   a[l] = (gamma_l - alpha)/gamma_l,
///   b[l] = alpha (1 - alpha + eta^2)/gamma_l,
///   prefactor = sigma2 (1 - alpha).
struct RootCondition {
    int depth = 0;
    std::vector<double> a;
    std::vector<double> b;
    double prefactor = 0.0;
};

/// Throws std::domain_error for alpha >= 1; the condition governs only the
/// under-sampled branch.
RootCondition build_root_condition(const Architecture& arch, const Scenario& s);

struct RootSolve {
    double z = 0.0;
    RootDiagnostics diag;
};

/// Solve for the physical non-negative root. Uses the closed quadratic for
/// depth 1 and the bracketed solver with homotopy branch tracking otherwise.
/// Throws NoPhysicalRootError if no candidate passes the filters.
RootSolve solve_z(const RootCondition& rc);

/// Generic path for any depth: locate sign changes of
/// f(z) = z^{depth+1} - prefactor * prod(a z + b) on (0, z_max], polish by
/// bisection, filter by physicality, and select the root continuously
/// connected to z = prefactor at large width via a 32-step width homotopy.
RootSolve solve_z_bracketed(const RootCondition& rc);

/// Closed quadratic root for depth 1 (under-sampled branch).
double solve_z_quadratic(const RootCondition& rc);

TheoryResult epsilon_lr(const Scenario& s);
TheoryResult epsilon_rf(const Architecture& arch, const Scenario& s);
TheoryResult epsilon_nn(const Architecture& arch, const Scenario& s);

/// Equal-width RF learning curve analytically continued in depth:
/// eps_LR + (1-alpha+eta^2) [ sigma_tilde^2 (psi^ell - 1) + ell (1/psi - 1) ]
/// with psi = (gamma-alpha)/gamma. Valid for alpha < min(1, gamma), ell >= 0
/// real. ell = 0 recovers the LR curve.
double epsilon_rf_equal_width(double gamma, double ell, const Scenario& s);

}  // namespace dlc
