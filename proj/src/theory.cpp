#include "dlc/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dlc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBisectRelTol = 1e-14;
constexpr int kHomotopySteps = 32;
constexpr double kHomotopyScale = 1e6;

double lr_under(const Scenario& s) {
    return (1.0 + s.sigma2) * (1.0 - s.alpha) + s.alpha / (1.0 - s.alpha) * s.eta * s.eta;
}

double lr_over(const Scenario& s) { return s.eta * s.eta / (s.alpha - 1.0); }

// Sign of f(z) = z^{d+1} - c prod(a z + b), evaluated through logs when every
// factor is positive so large depths cannot overflow.
int f_sign(const RootCondition& rc, double z) {
    if (z <= 0.0) return -1;  // f(0) = -c prod(b) < 0 on the valid domain
    bool all_positive = true;
    for (int l = 0; l < rc.depth; ++l)
        if (rc.a[l] * z + rc.b[l] <= 0.0) { all_positive = false; break; }
    if (all_positive) {
        double log_rhs = std::log(rc.prefactor);
        for (int l = 0; l < rc.depth; ++l) log_rhs += std::log(rc.a[l] * z + rc.b[l]);
        const double log_lhs = (rc.depth + 1) * std::log(z);
        if (log_lhs == log_rhs) return 0;
        return log_lhs > log_rhs ? 1 : -1;
    }
    double rhs = rc.prefactor;
    for (int l = 0; l < rc.depth; ++l) rhs *= rc.a[l] * z + rc.b[l];
    const double lhs = std::pow(z, rc.depth + 1);
    if (lhs == rhs) return 0;
    return lhs > rhs ? 1 : -1;
}

// |z^{d+1} - rhs|, in a form that stays finite for large depth.
double residual_at(const RootCondition& rc, double z) {
    bool all_positive = z > 0.0;
    for (int l = 0; l < rc.depth && all_positive; ++l)
        all_positive = rc.a[l] * z + rc.b[l] > 0.0;
    if (all_positive) {
        double log_rhs = std::log(rc.prefactor);
        for (int l = 0; l < rc.depth; ++l) log_rhs += std::log(rc.a[l] * z + rc.b[l]);
        const double log_lhs = (rc.depth + 1) * std::log(z);
        return std::exp(log_lhs) * std::abs(-std::expm1(log_rhs - log_lhs));
    }
    double rhs = rc.prefactor;
    for (int l = 0; l < rc.depth; ++l) rhs *= rc.a[l] * z + rc.b[l];
    return std::abs(std::pow(z, rc.depth + 1) - rhs);
}

// Upper bound on any root: for z >= 1, a z + b <= max(a+b, 1) z, so
// f(z) > 0 for z beyond prefactor * prod max(a_l + b_l, 1).
double root_upper_bound(const RootCondition& rc) {
    double zmax = rc.prefactor;
    for (int l = 0; l < rc.depth; ++l) zmax *= std::max(rc.a[l] + rc.b[l], 1.0);
    return zmax + 1.0;
}

double bisect(const RootCondition& rc, double lo, double hi, int slo) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= kBisectRelTol * std::max(1.0, hi)) return mid;
        const int sm = f_sign(rc, mid);
        if (sm == 0) return mid;
        if (sm == slo) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

void scan_cell(const RootCondition& rc, double lo, double hi, int slo, int shi, int depth,
               std::vector<double>& roots) {
    if (slo != shi) {
        roots.push_back(bisect(rc, lo, hi, slo));
        return;
    }
    if (depth <= 0) return;
    // Same sign at both ends: subdivide in case a root pair hides inside.
    const int kSub = 8;
    double prev = lo;
    int sprev = slo;
    for (int i = 1; i <= kSub; ++i) {
        const double x = lo + (hi - lo) * i / kSub;
        const int sx = (i == kSub) ? shi : f_sign(rc, x);
        if (sx != sprev) roots.push_back(bisect(rc, prev, x, sprev));
        prev = x;
        sprev = sx;
    }
}

bool factors_positive(const RootCondition& rc, double z) {
    for (int l = 0; l < rc.depth; ++l)
        if (!(rc.a[l] * z + rc.b[l] > 0.0)) return false;
    return true;
}

// All roots on (0, z_max] passing both physicality filters. For z > 0 with
// every factor positive, all suffix products C_l are automatically positive,
// so the filters coincide.
std::vector<double> admissible_roots(const RootCondition& rc) {
    const double zmax = root_upper_bound(rc);
    const int kGrid = 512;
    std::vector<double> roots;
    double prev = 0.0;
    int sprev = -1;  // f(0+) < 0
    for (int i = 1; i <= kGrid; ++i) {
        const double x = zmax * i / kGrid;
        const int sx = f_sign(rc, x);
        scan_cell(rc, prev, x, sprev, sx, 1, roots);
        prev = x;
        sprev = sx;
    }
    std::vector<double> good;
    for (double z : roots)
        if (z > 0.0 && factors_positive(rc, z)) good.push_back(z);
    std::sort(good.begin(), good.end());
    good.erase(std::unique(good.begin(), good.end(),
                           [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, y); }),
               good.end());
    return good;
}

// Widths scaled by s: a' = 1 - (1 - a)/s, b' = b/s. Recovers the original
// condition at s = 1 and the kernel limit z = prefactor as s -> infinity.
RootCondition scaled_condition(const RootCondition& rc, double s) {
    if (s == 1.0) return rc;
    RootCondition out = rc;
    for (int l = 0; l < rc.depth; ++l) {
        out.a[l] = 1.0 - (1.0 - rc.a[l]) / s;
        out.b[l] = rc.b[l] / s;
    }
    return out;
}

RootSolve finish(const RootCondition& rc, double z, std::vector<double> candidates) {
    RootSolve rs;
    rs.z = z;
    rs.diag.residual = residual_at(rc, z);
    rs.diag.factors_positive = factors_positive(rc, z);
    rs.diag.overlaps_positive = rs.diag.factors_positive && z > 0.0;
    rs.diag.multiple_roots = candidates.size() > 1;
    rs.diag.candidates = std::move(candidates);
    return rs;
}

}  // namespace

RootCondition build_root_condition(const Architecture& arch, const Scenario& s) {
    if (s.alpha >= 1.0)
        throw std::domain_error("build_root_condition: defined only for alpha < 1");
    RootCondition rc;
    rc.depth = arch.depth();
    rc.a.reserve(rc.depth);
    rc.b.reserve(rc.depth);
    const double noise_term = s.alpha * (1.0 - s.alpha + s.eta * s.eta);
    for (double g : arch.widths()) {
        rc.a.push_back((g - s.alpha) / g);
        rc.b.push_back(noise_term / g);
    }
    rc.prefactor = s.sigma2 * (1.0 - s.alpha);
    return rc;
}

double solve_z_quadratic(const RootCondition& rc) {
    if (rc.depth != 1)
        throw std::invalid_argument("solve_z_quadratic: depth must be 1");
    // z^2 - c a z - c b = 0, positive branch.
    const double c = rc.prefactor;
    const double half = 0.5 * c * rc.a[0];
    return half + std::sqrt(half * half + c * rc.b[0]);
}

RootSolve solve_z_bracketed(const RootCondition& rc) {
    // Track the branch anchored at the kernel limit down to the target widths.
    double z = rc.prefactor;
    std::vector<double> roots;
    for (int k = 0; k <= kHomotopySteps; ++k) {
        const double s = std::pow(kHomotopyScale, 1.0 - static_cast<double>(k) / kHomotopySteps);
        const RootCondition rck = scaled_condition(rc, s);
        roots = admissible_roots(rck);
        if (roots.empty()) {
            if (k < kHomotopySteps) continue;
            throw NoPhysicalRootError("solve_z: no admissible root at target widths");
        }
        double best = roots.front();
        for (double r : roots)
            if (std::abs(r - z) < std::abs(best - z)) best = r;
        z = best;
    }
    return finish(rc, z, std::move(roots));
}

RootSolve solve_z(const RootCondition& rc) {
    if (rc.depth == 1) {
        const double z = solve_z_quadratic(rc);
        if (!(z >= 0.0) || !factors_positive(rc, z))
            throw NoPhysicalRootError("solve_z: quadratic root fails physicality filters");
        return finish(rc, z, {z});
    }
    return solve_z_bracketed(rc);
}

TheoryResult epsilon_lr(const Scenario& s) {
    TheoryResult r;
    r.phase = classify_phase(ModelKind::LR, nullptr, s);
    if (r.boundary()) {
        r.epsilon = kInf;
        r.divergent = true;
        return r;
    }
    r.epsilon = s.alpha < 1.0 ? lr_under(s) : lr_over(s);
    return r;
}

TheoryResult epsilon_rf(const Architecture& arch, const Scenario& s) {
    TheoryResult r;
    r.phase = classify_phase(ModelKind::RF, &arch, s);
    if (r.boundary()) {
        r.epsilon = kInf;
        r.divergent = true;
        return r;
    }
    const double gmin = arch.gamma_min();
    const double eta2 = s.eta * s.eta;
    switch (r.phase.phase) {
        case Phase::UnderSampled: {
            double prod = 1.0, sum = 0.0;
            for (double g : arch.widths()) {
                prod *= (g - s.alpha) / g;
                sum += s.alpha / (g - s.alpha);
            }
            r.epsilon = (1.0 - s.alpha) * (1.0 + s.sigma2 * prod + sum) +
                        (s.alpha / (1.0 - s.alpha) + sum) * eta2;
            break;
        }
        case Phase::Bottlenecked:
            r.epsilon = s.alpha * (1.0 - gmin) / (s.alpha - gmin) + gmin / (s.alpha - gmin) * eta2;
            break;
        default:
            r.epsilon = lr_over(s);
            break;
    }
    return r;
}

TheoryResult epsilon_nn(const Architecture& arch, const Scenario& s) {
    TheoryResult r;
    r.phase = classify_phase(ModelKind::NN, &arch, s);
    if (r.boundary()) {
        r.epsilon = kInf;
        r.divergent = true;
        return r;
    }
    if (r.phase.phase == Phase::OverSampled) {
        r.epsilon = lr_over(s);
        return r;
    }
    const RootSolve rs = solve_z(build_root_condition(arch, s));
    r.z = rs.z;
    r.root = rs.diag;
    r.epsilon = lr_under(s) + rs.z - s.sigma2 * (1.0 - s.alpha);
    return r;
}

double epsilon_rf_equal_width(double gamma, double ell, const Scenario& s) {
    if (!(s.alpha < std::min(1.0, gamma)))
        throw std::domain_error("epsilon_rf_equal_width: requires alpha < min(1, gamma)");
    if (ell < 0.0)
        throw std::domain_error("epsilon_rf_equal_width: depth must be >= 0");
    const double psi = (gamma - s.alpha) / gamma;
    const double st2 = sigma_tilde(s).value;
    const double scale = 1.0 - s.alpha + s.eta * s.eta;
    return lr_under(s) + scale * (st2 * (std::pow(psi, ell) - 1.0) + ell * (1.0 / psi - 1.0));
}

}  // namespace dlc
