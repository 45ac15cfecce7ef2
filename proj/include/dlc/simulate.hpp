#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "dlc/model.hpp"

namespace dlc {

struct IllConditionedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RegimeAmbiguousError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One draw of the quenched disorder: Gaussian inputs X (p x d), teacher on
/// the sphere of radius sqrt(d), label noise, and (RF only) the hidden
/// feature matrices U_1: d x n_1, U_2: n_1 x n_2, ... Bit-for-bit
/// reproducible from (seed, replicate).
struct DisorderSample {
    Eigen::MatrixXd X;
    Eigen::VectorXd w_star;
    Eigen::VectorXd xi;
    std::vector<Eigen::MatrixXd> U;
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;

    Eigen::VectorXd labels(double eta) const;
};

DisorderSample draw_disorder(const std::vector<int>& widths, int d, int p,
                             std::uint64_t seed, std::uint64_t replicate);

/// Teacher vector alone, for fixed-(X, xi) re-draw experiments.
Eigen::VectorXd draw_teacher(int d, std::uint64_t seed, std::uint64_t replicate);

/// Monte Carlo mean and standard error over independent replicates.
struct SimEstimate {
    double mean = 0.0;
    double se = 0.0;
    int n = 0;
    int d = 0;
    int p = 0;
    std::vector<int> widths;
    std::uint64_t seed = 0;
};

/// Zero-temperature thermal bias-variance split of one replicate's error.
struct BiasVariance {
    double bias = 0.0;
    double variance = 0.0;
    double total() const { return bias + variance; }
};

/// The invertibility regime deciding which closed posterior expression
/// applies: PseudoInverse (all n_l >= d, p > d; zero thermal variance),
/// Woodbury (p < min(d, n_l); nonzero variance), Bottleneck (p > n_min with
/// n_min < d; zero variance). Throws RegimeAmbiguousError on the exact size
/// boundaries p == d (with n_min >= d) and p == n_min (with n_min < d).
enum class RfRegime { PseudoInverse, Woodbury, Bottleneck };

RfRegime classify_rf_regime(const std::vector<int>& widths, int d, int p);

BiasVariance lr_replicate(const DisorderSample& ds, double sigma2, double eta);
BiasVariance rf_replicate(const DisorderSample& ds, double sigma2, double eta);
/// Two-layer NN via the Bessel-ratio estimator. Requires p < d; for p > d the
/// NN error equals the LR bias and lr_replicate applies.
BiasVariance nn_replicate_two_layer(const DisorderSample& ds, int n1, double sigma2, double eta);

/// Trace of (X X^T)^{-1} for a sample's input matrix (p < d).
double inverse_wishart_trace(const DisorderSample& ds);

SimEstimate simulate_lr_error(int d, int p, const Scenario& s, int n_reps, std::uint64_t seed);
SimEstimate simulate_rf_error(const std::vector<int>& widths, int d, int p, const Scenario& s,
                              int n_reps, std::uint64_t seed);
SimEstimate simulate_nn_error_two_layer(int n1, int d, int p, const Scenario& s, int n_reps,
                                        std::uint64_t seed);

}  // namespace dlc
