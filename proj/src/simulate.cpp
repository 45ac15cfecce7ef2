#include "dlc/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "dlc/bessel.hpp"
#include "dlc/rng.hpp"

namespace dlc {

namespace {

constexpr double kRcondFloor = 1e-12;  // condition number cap 1e12

void fill_normal(Eigen::Ref<Eigen::MatrixXd> m, Rng& rng) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
}

Eigen::LLT<Eigen::MatrixXd> checked_llt(const Eigen::MatrixXd& m, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success || llt.rcond() < kRcondFloor)
        throw IllConditionedError(std::string("simulate: ill-conditioned system in ") + what);
    return llt;
}

// sqrt(d) * X^T (X X^T)^{-1} y, the interpolating minimum-norm predictor
// shared by the LR (p < d) and NN bias terms.
Eigen::VectorXd min_norm_weights(const DisorderSample& ds, const Eigen::VectorXd& y) {
    const auto llt = checked_llt(ds.X * ds.X.transpose(), "X X^T");
    return std::sqrt(static_cast<double>(ds.X.cols())) * ds.X.transpose() * llt.solve(y);
}

double bias_from(const DisorderSample& ds, const Eigen::VectorXd& w_hat) {
    return (w_hat - ds.w_star).squaredNorm() / static_cast<double>(ds.X.cols());
}

int min_width(const std::vector<int>& widths) {
    return *std::min_element(widths.begin(), widths.end());
}

struct Accumulator {
    double sum = 0.0, sumsq = 0.0;
    int n = 0;
    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++n;
    }
    double mean() const { return sum / n; }
    double se() const {
        const double var = (sumsq - sum * sum / n) / (n - 1);
        return std::sqrt(std::max(var, 0.0) / n);
    }
};

}  // namespace

Eigen::VectorXd DisorderSample::labels(double eta) const {
    return X * w_star / std::sqrt(static_cast<double>(X.cols())) + eta * xi;
}

Eigen::VectorXd draw_teacher(int d, std::uint64_t seed, std::uint64_t replicate) {
    Rng rng(seed, replicate, kTagTeacher);
    Eigen::VectorXd g(d);
    for (int i = 0; i < d; ++i) g(i) = rng.normal();
    return g * (std::sqrt(static_cast<double>(d)) / g.norm());
}

DisorderSample draw_disorder(const std::vector<int>& widths, int d, int p,
                             std::uint64_t seed, std::uint64_t replicate) {
    if (d < 1 || p < 1) throw std::invalid_argument("draw_disorder: d, p must be >= 1");
    for (int n : widths)
        if (n < 1) throw std::invalid_argument("draw_disorder: widths must be >= 1");
    DisorderSample ds;
    ds.seed = seed;
    ds.replicate = replicate;
    ds.X.resize(p, d);
    Rng rx(seed, replicate, kTagX);
    fill_normal(ds.X, rx);
    ds.w_star = draw_teacher(d, seed, replicate);
    ds.xi.resize(p);
    Rng rn(seed, replicate, kTagNoise);
    for (int i = 0; i < p; ++i) ds.xi(i) = rn.normal();
    int rows = d;
    for (std::size_t l = 0; l < widths.size(); ++l) {
        Eigen::MatrixXd u(rows, widths[l]);
        Rng ru(seed, replicate, kTagU + l);
        fill_normal(u, ru);
        ds.U.push_back(std::move(u));
        rows = widths[l];
    }
    return ds;
}

RfRegime classify_rf_regime(const std::vector<int>& widths, int d, int p) {
    if (widths.empty()) throw std::invalid_argument("classify_rf_regime: empty width list");
    const int nmin = min_width(widths);
    if (nmin < d) {
        if (p == nmin)
            throw RegimeAmbiguousError("simulate: p == n_min sits on a regime boundary");
        return p < nmin ? RfRegime::Woodbury : RfRegime::Bottleneck;
    }
    if (p == d) throw RegimeAmbiguousError("simulate: p == d sits on a regime boundary");
    return p < d ? RfRegime::Woodbury : RfRegime::PseudoInverse;
}

BiasVariance lr_replicate(const DisorderSample& ds, double sigma2, double eta) {
    const int d = static_cast<int>(ds.X.cols());
    const int p = static_cast<int>(ds.X.rows());
    if (p == d) throw RegimeAmbiguousError("simulate: p == d sits on a regime boundary");
    const Eigen::VectorXd y = ds.labels(eta);
    if (p < d) {
        // Interpolating phase: the posterior covariance trace reduces to
        // sigma2 (1 - p/d) for identity features.
        const double ev = sigma2 * (1.0 - static_cast<double>(p) / d);
        return {bias_from(ds, min_norm_weights(ds, y)), ev};
    }
    const auto llt = checked_llt(ds.X.transpose() * ds.X, "X^T X");
    const Eigen::VectorXd w_hat =
        std::sqrt(static_cast<double>(d)) * llt.solve(ds.X.transpose() * y);
    return {bias_from(ds, w_hat), 0.0};
}

BiasVariance rf_replicate(const DisorderSample& ds, double sigma2, double eta) {
    const int d = static_cast<int>(ds.X.cols());
    const int p = static_cast<int>(ds.X.rows());
    std::vector<int> widths;
    for (const auto& u : ds.U) widths.push_back(static_cast<int>(u.cols()));
    const RfRegime regime = classify_rf_regime(widths, d, p);
    const Eigen::VectorXd y = ds.labels(eta);
    const double sqd = std::sqrt(static_cast<double>(d));

    switch (regime) {
        case RfRegime::PseudoInverse: {
            const auto llt = checked_llt(ds.X.transpose() * ds.X, "X^T X");
            return {bias_from(ds, sqd * llt.solve(ds.X.transpose() * y)), 0.0};
        }
        case RfRegime::Woodbury: {
            double norm = static_cast<double>(d);
            Eigen::MatrixXd f = ds.U.front();
            for (std::size_t l = 1; l < ds.U.size(); ++l) f = f * ds.U[l];
            for (int n : widths) norm *= n;
            f *= std::sqrt(sigma2 / norm);
            const Eigen::MatrixXd g = f * f.transpose();          // d x d
            const Eigen::MatrixXd xg = ds.X * g;                  // p x d
            const auto llt = checked_llt(xg * ds.X.transpose(), "X F F^T X^T");
            const double eb = bias_from(ds, sqd * g * ds.X.transpose() * llt.solve(y));
            const double ev = g.trace() - xg.cwiseProduct(llt.solve(xg)).sum();
            return {eb, ev};
        }
        case RfRegime::Bottleneck: {
            const auto lmin = static_cast<std::size_t>(
                std::min_element(widths.begin(), widths.end()) - widths.begin());
            double norm = static_cast<double>(d);
            Eigen::MatrixXd a = ds.U.front();
            for (std::size_t l = 1; l <= lmin; ++l) a = a * ds.U[l];
            for (std::size_t l = 0; l <= lmin; ++l) norm *= widths[l];
            a *= std::sqrt(sigma2 / norm);
            const Eigen::MatrixXd t = ds.X * a;  // p x n_min
            const auto llt = checked_llt(t.transpose() * t, "A^T X^T X A");
            return {bias_from(ds, sqd * a * llt.solve(t.transpose() * y)), 0.0};
        }
    }
    throw std::logic_error("rf_replicate: unreachable");
}

BiasVariance nn_replicate_two_layer(const DisorderSample& ds, int n1, double sigma2, double eta) {
    const int d = static_cast<int>(ds.X.cols());
    const int p = static_cast<int>(ds.X.rows());
    if (!(p < d))
        throw std::domain_error("nn_replicate_two_layer: requires p < d");
    const Eigen::VectorXd y = ds.labels(eta);
    const auto llt = checked_llt(ds.X * ds.X.transpose(), "X X^T");
    const Eigen::VectorXd u = llt.solve(y);
    const double eb = bias_from(ds, std::sqrt(static_cast<double>(d)) * ds.X.transpose() * u);
    const double q = std::sqrt(n1 * static_cast<double>(d) / sigma2 * y.dot(u));
    const double ratio = bessel_k_ratio(0.5 * (n1 - p), q);
    const double ev = (1.0 - static_cast<double>(p) / d) * sigma2 / n1 * q * ratio;
    return {eb, ev};
}

double inverse_wishart_trace(const DisorderSample& ds) {
    const auto llt = checked_llt(ds.X * ds.X.transpose(), "X X^T");
    return llt.solve(Eigen::MatrixXd::Identity(ds.X.rows(), ds.X.rows())).trace();
}

namespace {

template <typename Replicate>
SimEstimate run_replicates(const std::vector<int>& widths, int d, int p, int n_reps,
                           std::uint64_t seed, Replicate&& one) {
    if (n_reps < 2) throw std::invalid_argument("simulate: n_reps must be >= 2");
    Accumulator acc;
    for (int r = 0; r < n_reps; ++r) acc.add(one(r));
    SimEstimate est;
    est.mean = acc.mean();
    est.se = acc.se();
    est.n = n_reps;
    est.d = d;
    est.p = p;
    est.widths = widths;
    est.seed = seed;
    return est;
}

}  // namespace

SimEstimate simulate_lr_error(int d, int p, const Scenario& s, int n_reps, std::uint64_t seed) {
    return run_replicates({}, d, p, n_reps, seed, [&](int r) {
        return lr_replicate(draw_disorder({}, d, p, seed, r), s.sigma2, s.eta).total();
    });
}

SimEstimate simulate_rf_error(const std::vector<int>& widths, int d, int p, const Scenario& s,
                              int n_reps, std::uint64_t seed) {
    classify_rf_regime(widths, d, p);  // fail fast on boundary sizes
    return run_replicates(widths, d, p, n_reps, seed, [&](int r) {
        return rf_replicate(draw_disorder(widths, d, p, seed, r), s.sigma2, s.eta).total();
    });
}

SimEstimate simulate_nn_error_two_layer(int n1, int d, int p, const Scenario& s, int n_reps,
                                        std::uint64_t seed) {
    return run_replicates({n1}, d, p, n_reps, seed, [&](int r) {
        return nn_replicate_two_layer(draw_disorder({}, d, p, seed, r), n1, s.sigma2, s.eta)
            .total();
    });
}

}  // namespace dlc
