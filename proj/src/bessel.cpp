#include "dlc/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace dlc {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 100000;
constexpr double kPi = 3.141592653589793238462643383279502884;

// gam1 = [1/Gamma(1-mu) - 1/Gamma(1+mu)]/(2 mu)  (-> -EulerGamma as mu -> 0)
// gam2 = [1/Gamma(1-mu) + 1/Gamma(1+mu)]/2
void gamma_pair(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
    gampl = 1.0 / std::tgamma(1.0 + mu);
    gammi = 1.0 / std::tgamma(1.0 - mu);
    if (std::abs(mu) < 1e-4) {
        // Odd-part series of 1/Gamma(1+x); keeps gam1 accurate through the
        // cancellation at small mu.
        constexpr double kGammaE = 0.5772156649015329;
        constexpr double kC3 = -0.0420026350340952;  // x^3 coefficient of 1/Gamma(1+x)
        gam1 = -kGammaE - kC3 * mu * mu;
    } else {
        gam1 = (gammi - gampl) / (2.0 * mu);
    }
    gam2 = 0.5 * (gammi + gampl);
}

// Temme's series for K_mu(x) and K_{mu+1}(x), x <= 2, |mu| <= 1/2.
void temme_k(double mu, double x, double& k_mu, double& k_mu1) {
    const double mu2 = mu * mu;
    const double x2 = 0.5 * x;
    const double pimu = kPi * mu;
    const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    gamma_pair(mu, gam1, gam2, gampl, gammi);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    for (int i = 1; i <= kMaxIter; ++i) {
        ff = (i * ff + p + q) / (i * i - mu2);
        c *= d / i;
        p /= i - mu;
        q /= i + mu;
        const double del = c * ff;
        sum += del;
        sum1 += c * (p - i * ff);
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    k_mu = sum;
    k_mu1 = sum1 * 2.0 / x;
}

// Thompson-Barnett CF2 for the ratio K_{mu+1}(x)/K_mu(x), x >= 2, |mu| <= 1/2.
double cf2_ratio(double mu, double x) {
    const double a1 = 0.25 - mu * mu;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double a = -a1;
    for (int i = 2; i <= kMaxIter; ++i) {
        a -= 2.0 * (i - 1);
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        if (std::abs(delh / h) < kEps) break;
    }
    h *= a1;
    return (mu + x + 0.5 - h) / x;
}

double base_ratio(double mu, double q) {
    if (q >= 2.0) return cf2_ratio(mu, q);
    double k_mu, k_mu1;
    temme_k(mu, q, k_mu, k_mu1);
    return k_mu1 / k_mu;
}

double logaddexp(double a, double b) {
    const double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

double bessel_k_ratio(double nu, double q) {
    if (!(q > 0.0)) throw std::domain_error("bessel_k_ratio: requires q > 0");
    if (!(std::abs(nu) <= 1e6 + 1.0) || !std::isfinite(nu))
        throw std::domain_error("bessel_k_ratio: order out of supported range");
    // K_{-nu} = K_nu folds negative orders onto the reciprocal ratio.
    if (nu < -0.5) return 1.0 / bessel_k_ratio(-nu - 1.0, q);

    const int steps = static_cast<int>(std::floor(nu + 0.5));
    const double mu = nu - steps;  // in [-1/2, 1/2)

    // Upward recurrence on ratios, r(v+1) = 2(v+1)/q + 1/r(v), is the stable
    // direction for K. Switch to log space when the terms could overflow.
    if (2.0 * (nu + 1.0) / q < 1e280) {
        double r = base_ratio(mu, q);
        for (int j = 1; j <= steps; ++j) r = 2.0 * (mu + j) / q + 1.0 / r;
        return r;
    }
    double lr = std::log(base_ratio(mu, q));
    for (int j = 1; j <= steps; ++j)
        lr = logaddexp(std::log(2.0 * (mu + j)) - std::log(q), -lr);
    return std::exp(lr);
}

}  // namespace dlc
