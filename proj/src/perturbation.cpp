#include "dlc/perturbation.hpp"

#include <cmath>

#include "dlc/theory.hpp"

namespace dlc {

namespace {

void require_under_sampled(const Scenario& s) {
    if (s.alpha >= 1.0)
        throw std::domain_error("perturbation: expansions are defined for alpha < 1");
}

void require_wide(double gamma, const Scenario& s) {
    require_under_sampled(s);
    if (!(s.alpha < gamma))
        throw std::domain_error("perturbation: requires alpha < gamma");
}

double noise_scale(const Scenario& s) { return 1.0 - s.alpha + s.eta * s.eta; }

}  // namespace

double SeriesExpansion::eval(double lambda) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = (acc + *it) * lambda;
    return base + scale * acc;
}

double rf_first_order(const Architecture& arch, const Scenario& s) {
    require_under_sampled(s);
    const double coeff = (1.0 - sigma_tilde(s).value) * noise_scale(s);
    double sum = 0.0;
    for (double g : arch.widths()) sum += s.alpha / g;
    return coeff * sum;
}

SeriesExpansion rf_series(double gamma, int ell, const Scenario& s, int order) {
    require_wide(gamma, s);
    if (ell < 1) throw std::domain_error("rf_series: depth must be >= 1");
    if (order < 1) throw std::domain_error("rf_series: order must be >= 1");
    const double st2 = sigma_tilde(s).value;
    SeriesExpansion se;
    se.base = epsilon_lr(s).epsilon;
    se.scale = noise_scale(s);
    se.order = order;
    se.coeffs.resize(order);
    // c_1 is written as (1 - st2) ell, the exact expression the NN expansion
    // uses; the leading corrections of the two models are the same object.
    se.coeffs[0] = (1.0 - st2) * ell;
    double binom = ell;  // C(ell, j) by multiplicative recurrence
    double sign = -1.0;
    for (int j = 2; j <= order; ++j) {
        binom = (j <= ell) ? binom * (ell - j + 1) / j : 0.0;
        sign = -sign;
        se.coeffs[j - 1] = sign * st2 * binom + ell;
    }
    return se;
}

SeriesExpansion nn_second_order(double gamma, int ell, const Scenario& s) {
    require_wide(gamma, s);
    if (ell < 1) throw std::domain_error("nn_second_order: depth must be >= 1");
    const double st2 = sigma_tilde(s).value;
    const double L = ell;
    SeriesExpansion se;
    se.base = epsilon_lr(s).epsilon;
    se.scale = noise_scale(s);
    se.order = 2;
    se.coeffs = {(1.0 - st2) * L,
                 L * (L - 1.0) * st2 / 2.0 - L * (L + 1.0) / (2.0 * st2) + L};
    return se;
}

double rf_nn_gap_leading(double gamma, int ell, const Scenario& s) {
    require_wide(gamma, s);
    if (ell < 1) throw std::domain_error("rf_nn_gap_leading: depth must be >= 1");
    const double st2 = sigma_tilde(s).value;
    const double lambda = s.alpha / gamma;
    return noise_scale(s) * ell * (ell + 1.0) / (2.0 * st2) * lambda * lambda;
}

double gap_exact_two_layer(double gamma1, const Scenario& s) {
    require_wide(gamma1, s);
    const Architecture arch({gamma1});
    return epsilon_rf(arch, s).epsilon - epsilon_nn(arch, s).epsilon;
}

}  // namespace dlc
