#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "dlc/bessel.hpp"
#include "dlc/rng.hpp"
#include "support/oracles.hpp"

using dlc::bessel_k_ratio;

namespace {

// Half-integer closed form: K_{n+1/2}(q) = sqrt(pi/2q) e^{-q} S_n(q) with
// S_n(q) = sum_k (n+k)!/(k! (n-k)!) (2q)^{-k}, so the ratio is S_{n+1}/S_n.
double half_integer_ratio(int n, double q) {
    const auto s = [&](int m) {
        double term = 1.0, sum = 1.0;
        for (int k = 1; k <= m; ++k) {
            term *= static_cast<double>((m + k) * (m - k + 1)) / (2.0 * k * q);
            sum += term;
        }
        return sum;
    };
    return s(n + 1) / s(n);
}

}  // namespace

TEST_CASE("half-integer closed forms") {
    CHECK(bessel_k_ratio(0.5, 2.0) == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(2.0 * bessel_k_ratio(0.5, 2.0) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(bessel_k_ratio(0.5, 10.0) == doctest::Approx(1.1).epsilon(1e-13));
    for (int n : {0, 1, 2, 5, 12}) {
        for (double q : {0.1, 0.7, 2.0, 9.5, 120.0}) {
            CHECK(bessel_k_ratio(n + 0.5, q) ==
                  doctest::Approx(half_integer_ratio(n, q)).epsilon(1e-12));
        }
    }
}

TEST_CASE("quadrature oracle is itself sound") {
    for (int n : {0, 1, 4}) {
        for (double q : {0.3, 1.5, 8.0}) {
            CHECK(oracles::bessel_ratio_quadrature(n + 0.5, q) ==
                  doctest::Approx(half_integer_ratio(n, q)).epsilon(1e-9));
        }
    }
    // K_1(1)/K_0(1) from tabulated values.
    CHECK(oracles::bessel_ratio_quadrature(0.0, 1.0) ==
          doctest::Approx(0.6019072301972346 / 0.4210244382407083).epsilon(1e-9));
}

TEST_CASE("general order matches quadrature") {
    CHECK(bessel_k_ratio(7.3, 4.2) ==
          doctest::Approx(oracles::bessel_ratio_quadrature(7.3, 4.2)).epsilon(1e-8));
    dlc::Rng rng(31, 0, 60);
    for (int trial = 0; trial < 60; ++trial) {
        const double nu = 40.0 * rng.uniform() - 10.0;
        const double q = std::exp(std::log(0.05) + rng.uniform() * std::log(2000.0));
        CHECK(bessel_k_ratio(nu, q) ==
              doctest::Approx(oracles::bessel_ratio_quadrature(nu, q)).epsilon(1e-8));
    }
}

TEST_CASE("ratio properties") {
    // Above 1 for nu >= 0, decreasing in q, limiting to 1.
    for (double nu : {0.0, 0.5, 3.0, 40.0}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double q : {0.1, 1.0, 10.0, 100.0, 1e4}) {
            const double r = bessel_k_ratio(nu, q);
            CHECK(r > 1.0);
            CHECK(r < prev);
            prev = r;
        }
        CHECK(bessel_k_ratio(nu, 1e7) == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("negative order symmetry") {
    // K_{-nu} = K_nu: ratio(nu) = 1 / ratio(-nu - 1).
    for (double nu : {0.7, 3.2, 15.0}) {
        CHECK(bessel_k_ratio(-nu - 1.0, 2.5) ==
              doctest::Approx(1.0 / bessel_k_ratio(nu, 2.5)).epsilon(1e-12));
    }
    CHECK(bessel_k_ratio(-7.3, 4.2) ==
          doctest::Approx(oracles::bessel_ratio_quadrature(-7.3, 4.2)).epsilon(1e-8));
}

TEST_CASE("large order stays finite and near its asymptote") {
    // Uniform large-order behavior: ratio ~ (nu + 1/2 + sqrt((nu+1/2)^2 + q^2))/q.
    for (double nu : {1e3, 1e5, 1e6}) {
        for (double q : {0.5, 3.0, 1e3}) {
            const double r = bessel_k_ratio(nu, q);
            CHECK(std::isfinite(r));
            const double c = nu + 0.5;
            const double approx = (c + std::sqrt(c * c + q * q)) / q;
            CHECK(r == doctest::Approx(approx).epsilon(5e-3));
        }
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(bessel_k_ratio(0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(bessel_k_ratio(0.5, -1.0), std::domain_error);
    CHECK_THROWS_AS(bessel_k_ratio(2e6, 1.0), std::domain_error);
}
