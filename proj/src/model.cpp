#include "dlc/model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace dlc {

std::string to_string(ModelKind m) {
    switch (m) {
        case ModelKind::LR: return "lr";
        case ModelKind::RF: return "rf";
        case ModelKind::NN: return "nn";
    }
    return "?";
}

std::optional<ModelKind> parse_model_kind(const std::string& name) {
    if (name == "lr" || name == "LR") return ModelKind::LR;
    if (name == "rf" || name == "RF") return ModelKind::RF;
    if (name == "nn" || name == "NN") return ModelKind::NN;
    return std::nullopt;
}

Architecture::Architecture(std::vector<double> widths) : widths_(std::move(widths)) {
    if (widths_.empty())
        throw std::invalid_argument("Architecture: width list must be non-empty");
    for (double g : widths_)
        if (!(g > 0.0) || !std::isfinite(g))
            throw std::invalid_argument("Architecture: every width ratio must be finite and > 0");
}

Architecture Architecture::equal_widths(int depth, double gamma) {
    if (depth < 1) throw std::invalid_argument("Architecture: depth must be >= 1");
    return Architecture(std::vector<double>(static_cast<std::size_t>(depth), gamma));
}

double Architecture::gamma_min() const {
    return *std::min_element(widths_.begin(), widths_.end());
}

Scenario::Scenario(double alpha_, double sigma2_, double eta_)
    : alpha(alpha_), sigma2(sigma2_), eta(eta_) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("Scenario: alpha must be finite and > 0");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
        throw std::invalid_argument("Scenario: sigma2 must be finite and > 0");
    if (!(eta >= 0.0) || !std::isfinite(eta))
        throw std::invalid_argument("Scenario: eta must be finite and >= 0");
}

std::string to_string(Phase p) {
    switch (p) {
        case Phase::UnderSampled: return "under_sampled";
        case Phase::Bottlenecked: return "bottlenecked";
        case Phase::OverSampled: return "over_sampled";
        case Phase::Boundary: return "boundary";
    }
    return "?";
}

SigmaTilde sigma_tilde(const Scenario& s) {
    if (s.alpha >= 1.0)
        throw std::domain_error("sigma_tilde: undefined for alpha >= 1");
    // sigma2 / (1 + eta^2/(1-alpha)) keeps the eta = 0 case exactly sigma2.
    return SigmaTilde{s.sigma2 / (1.0 + s.eta * s.eta / (1.0 - s.alpha))};
}

bool near_boundary(double alpha, double pole) {
    return std::abs(alpha - pole) < kBoundaryDelta * std::max(1.0, std::abs(pole));
}

double divergence_pole(ModelKind m, const Architecture* arch) {
    if (m == ModelKind::RF) {
        if (!arch) throw std::invalid_argument("divergence_pole: RF requires an Architecture");
        return std::min(1.0, arch->gamma_min());
    }
    return 1.0;
}

namespace {

std::vector<int> min_width_layers(const Architecture& arch) {
    const double gmin = arch.gamma_min();
    std::vector<int> layers;
    const auto& w = arch.widths();
    for (std::size_t l = 0; l < w.size(); ++l)
        if (std::abs(w[l] - gmin) <= 1e-12 * gmin) layers.push_back(static_cast<int>(l) + 1);
    return layers;
}

}  // namespace

PhaseInfo classify_phase(ModelKind m, const Architecture* arch, const Scenario& s) {
    if (m == ModelKind::LR && arch)
        throw std::invalid_argument("classify_phase: LR carries no architecture");
    if (m != ModelKind::LR && !arch)
        throw std::invalid_argument("classify_phase: RF/NN require an architecture");

    const double pole = divergence_pole(m, arch);
    if (near_boundary(s.alpha, pole)) return {Phase::Boundary, {}};

    if (m == ModelKind::LR || m == ModelKind::NN)
        return {s.alpha < 1.0 ? Phase::UnderSampled : Phase::OverSampled, {}};

    const double gmin = arch->gamma_min();
    if (s.alpha < std::min(1.0, gmin)) return {Phase::UnderSampled, {}};
    if (gmin < 1.0) return {Phase::Bottlenecked, min_width_layers(*arch)};
    return {Phase::OverSampled, {}};
}

}  // namespace dlc
