#include "dlc/optimal.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "dlc/theory.hpp"

namespace dlc {

namespace {

constexpr double kRegimeTol = 1e-12;   // sigma_tilde^2 vs 1 comparison
constexpr double kIntegerTol = 1e-9;   // depth-ratio integrality detection

double sigma_tilde2_checked(const Scenario& s) {
    if (s.alpha >= 1.0)
        throw std::domain_error("optimal: requires alpha < 1");
    return sigma_tilde(s).value;
}

}  // namespace

std::string to_string(WidthRegime r) {
    switch (r) {
        case WidthRegime::WiderAlwaysBetter: return "wider_always_better";
        case WidthRegime::WidthIrrelevant: return "width_irrelevant";
        case WidthRegime::FiniteOptimum: return "finite_optimum";
        case WidthRegime::NarrowerAlwaysBetter: return "narrower_always_better";
    }
    return "?";
}

WidthRegimeReport rf_optimal_width(int ell, const Scenario& s) {
    if (ell < 1) throw std::domain_error("rf_optimal_width: depth must be >= 1");
    const double st2 = sigma_tilde2_checked(s);
    if (st2 <= 1.0 + kRegimeTol) return {WidthRegime::WiderAlwaysBetter, {}, st2};
    const double t = std::pow(st2, 1.0 / (ell + 1));
    return {WidthRegime::FiniteOptimum, {t / (t - 1.0) * s.alpha}, st2};
}

WidthRegimeReport rf_optimal_depth(double gamma, const Scenario& s) {
    const double st2 = sigma_tilde2_checked(s);
    if (!(s.alpha < gamma))
        throw std::domain_error("rf_optimal_depth: requires alpha < gamma");
    if (st2 <= 1.0 + kRegimeTol) return {WidthRegime::NarrowerAlwaysBetter, {}, st2};
    // Guard digits on the log ratio so exact integer cases are detected.
    const long double ratio = std::log(static_cast<long double>(st2)) /
                              std::log(static_cast<long double>(gamma) / (gamma - s.alpha));
    const long double nearest = std::round(ratio);
    if (nearest >= 1.0L && std::abs(ratio - nearest) <= kIntegerTol * std::max(1.0L, ratio)) {
        const double j = static_cast<double>(nearest);
        return {WidthRegime::FiniteOptimum, {j, j - 1.0}, st2};
    }
    return {WidthRegime::FiniteOptimum, {std::floor(static_cast<double>(ratio))}, st2};
}

WidthRegimeReport nn_width_monotonicity(const Scenario& s) {
    const double st2 = sigma_tilde2_checked(s);
    if (std::abs(st2 - 1.0) <= kRegimeTol) return {WidthRegime::WidthIrrelevant, {}, st2};
    if (st2 < 1.0) return {WidthRegime::WiderAlwaysBetter, {}, st2};
    return {WidthRegime::NarrowerAlwaysBetter, {}, st2};
}

StationarityReport verify_stationarity(int ell, const Scenario& s) {
    const double st2 = sigma_tilde2_checked(s);
    if (st2 <= 1.0)
        throw std::domain_error("verify_stationarity: requires sigma_tilde > 1");
    const auto report = rf_optimal_width(ell, s);
    const double gstar = report.optimum.at(0);

    StationarityReport out;
    out.gamma_star = gstar;

    auto eps = [&](const std::vector<double>& w) { return epsilon_rf(Architecture(w), s).epsilon; };
    const std::vector<double> center(static_cast<std::size_t>(ell), gstar);
    const double h = std::max(1e-5, 1e-5 * gstar);

    const double scale = s.alpha * (1.0 - s.alpha + s.eta * s.eta) * std::max(1.0, st2) /
                         (gstar * gstar);
    out.grad_tol = 1e-6 * scale;
    for (int l = 0; l < ell; ++l) {
        auto wp = center, wm = center;
        wp[l] += h;
        wm[l] -= h;
        out.grad_max_abs = std::max(out.grad_max_abs, std::abs((eps(wp) - eps(wm)) / (2.0 * h)));
    }
    out.gradient_ok = out.grad_max_abs <= out.grad_tol;

    Eigen::MatrixXd H(ell, ell);
    for (int i = 0; i < ell; ++i)
        for (int j = i; j < ell; ++j) {
            double v;
            if (i == j) {
                auto wp = center, wm = center;
                wp[i] += h;
                wm[i] -= h;
                v = (eps(wp) - 2.0 * eps(center) + eps(wm)) / (h * h);
            } else {
                auto wpp = center, wpm = center, wmp = center, wmm = center;
                wpp[i] += h; wpp[j] += h;
                wpm[i] += h; wpm[j] -= h;
                wmp[i] -= h; wmp[j] += h;
                wmm[i] -= h; wmm[j] -= h;
                v = (eps(wpp) - eps(wpm) - eps(wmp) + eps(wmm)) / (4.0 * h * h);
            }
            H(i, j) = v;
            H(j, i) = v;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    out.hessian_eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + ell);

    const double lambda = s.alpha * s.alpha * (1.0 - s.alpha + s.eta * s.eta) *
                          std::pow(st2, 3.0 / (ell + 1)) / std::pow(gstar, 4.0);
    out.analytic_small = lambda;
    out.analytic_large = lambda * (ell + 1);
    out.eigenvalues_ok = true;
    for (int i = 0; i < ell; ++i) {
        const double expected = (i < ell - 1) ? out.analytic_small : out.analytic_large;
        const double rel = std::abs(out.hessian_eigenvalues[i] - expected) / expected;
        out.max_eig_rel_err = std::max(out.max_eig_rel_err, rel);
        if (!(out.hessian_eigenvalues[i] > 0.0) || rel > 1e-3) out.eigenvalues_ok = false;
    }
    return out;
}

}  // namespace dlc
