#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dlc {

/// Relative half-width of the exclusion window around learning-curve poles.
/// Points inside the window are labeled Phase::Boundary and never evaluated;
/// behavior exactly at such points is intentionally out of scope.
inline constexpr double kBoundaryDelta = 1e-9;

enum class ModelKind { LR, RF, NN };

std::string to_string(ModelKind m);
std::optional<ModelKind> parse_model_kind(const std::string& name);

/// Network shape in thermodynamic-ratio units: widths()[l] = n_{l+1}/d.
/// Depth is the list length. Width order is preserved even where results
/// are permutation-invariant.
class Architecture {
public:
    Architecture() = default;

    /// Throws std::invalid_argument unless the list is non-empty with all
    /// entries positive.
    explicit Architecture(std::vector<double> widths);

    static Architecture equal_widths(int depth, double gamma);

    int depth() const { return static_cast<int>(widths_.size()); }
    const std::vector<double>& widths() const { return widths_; }
    double gamma_min() const;

    bool operator==(const Architecture&) const = default;

private:
    std::vector<double> widths_;
};

/// One experiment point: data density alpha = p/d, prior variance sigma2 of
/// the end-to-end weights, and label-noise standard deviation eta.
struct Scenario {
    double alpha;
    double sigma2;
    double eta;

    /// Throws std::invalid_argument unless alpha > 0, sigma2 > 0, eta >= 0.
    Scenario(double alpha, double sigma2, double eta);
};

enum class Phase { UnderSampled, Bottlenecked, OverSampled, Boundary };

std::string to_string(Phase p);

/// Phase label plus, for a bottlenecked RF model, the 1-based indices of the
/// layers attaining gamma_min.
struct PhaseInfo {
    Phase phase = Phase::UnderSampled;
    std::vector<int> bottleneck_layers;
};

/// Diagnostics of an order-parameter root solve (NN models, alpha < 1).
struct RootDiagnostics {
    double residual = 0.0;
    /// (gamma_l - alpha) z + alpha (1 - alpha + eta^2) > 0 for every layer.
    bool factors_positive = true;
    /// Every layer overlap C_l = z^{-l} prod_{l'>=l} (a_{l'} z + b_{l'}) > 0.
    bool overlaps_positive = true;
    /// More than one admissible root survived at the target widths; the
    /// solver returned the branch connected to the kernel limit and lists
    /// every candidate here.
    bool multiple_roots = false;
    std::vector<double> candidates;
};

/// Generalization error prediction for one (model, architecture, scenario)
/// point. Divergences at phase-boundary poles are reported as +infinity with
/// the divergent flag set, so grids stay total.
struct TheoryResult {
    double epsilon = 0.0;
    PhaseInfo phase;
    std::optional<double> z;  // NN order parameter, under-sampled phase only
    bool divergent = false;
    std::optional<RootDiagnostics> root;

    bool boundary() const { return phase.phase == Phase::Boundary; }
};

/// Rescaled prior variance sigma2 (1-alpha)/(1-alpha+eta^2). Its comparison
/// with 1 governs whether wider or deeper models help.
struct SigmaTilde {
    double value;
};

/// Throws std::domain_error for alpha >= 1, where the rescaling is undefined.
SigmaTilde sigma_tilde(const Scenario& s);

/// True when alpha sits inside the boundary exclusion window around `pole`.
bool near_boundary(double alpha, double pole);

/// The divergence pole relevant for the given model: alpha = 1 for LR/NN,
/// alpha = min(1, gamma_min) for RF.
double divergence_pole(ModelKind m, const Architecture* arch);

/// Phase per the learning-curve case structure. `arch` is required for RF
/// and NN and must be null for LR. Points within the boundary window of the
/// model's pole are labeled Phase::Boundary.
PhaseInfo classify_phase(ModelKind m, const Architecture* arch, const Scenario& s);

}  // namespace dlc
