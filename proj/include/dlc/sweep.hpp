#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>

#include "dlc/model.hpp"

namespace dlc {

/// Config-file problems; `issues` lists every offending key, not just the
/// first one found.
struct SweepConfigError : std::runtime_error {
    explicit SweepConfigError(std::vector<std::string> issues_);
    std::vector<std::string> issues;
};

struct SimBlock {
    int d = 100;        // input dimensionality
    int n_reps = 10;    // replicates per estimate
    std::uint64_t base_seed = 0;
};

enum class OutputFormat { Csv, JsonLines };

/// Cartesian sweep description. Axes iterate lexicographically in the fixed
/// order (depth, per-layer widths or broadcast gamma, sigma2, eta, alpha),
/// first axis slowest, each axis in its declared value order.
struct SweepConfig {
    ModelKind model = ModelKind::LR;
    std::vector<double> alphas;
    std::vector<double> sigma2s;
    std::vector<double> etas;
    std::vector<int> depths;                       // with broadcast gamma axis
    std::vector<double> gammas;                    // broadcast width axis
    std::vector<std::vector<double>> layer_gammas; // per-layer axes (gamma1=, gamma2=, ...)
    std::optional<SimBlock> sim;
    std::string output = "-";
    OutputFormat format = OutputFormat::Csv;
};

/// Parse the flat key-value config format (see docs/sweep-config.md).
/// Throws SweepConfigError listing all schema violations.
SweepConfig parse_sweep_config(const std::string& path);
SweepConfig parse_sweep_config_text(const std::string& text);

/// One grid point: inputs, theory, and (when simulation is enabled) the
/// matching Monte Carlo estimate for the same parameter tuple.
struct ResultRow {
    ModelKind model = ModelKind::LR;
    std::vector<double> widths;          // requested gamma_l (empty for LR)
    std::vector<double> realized_widths; // n_l/d actually simulated
    std::vector<int> sim_widths;         // n_l = round(gamma_l d)
    double alpha = 0.0;
    double sigma2 = 0.0;
    double eta = 0.0;
    PhaseInfo phase;
    double epsilon_theory = 0.0;
    std::optional<double> z;
    std::optional<double> sim_mean;
    std::optional<double> sim_se;
    int n_reps = 0;
    int d = 0;
    std::uint64_t seed = 0;
    bool has_seed = false;

    bool boundary = false;
    bool divergent = false;
    bool multiple_roots = false;
    bool no_physical_root = false;
    bool ill_conditioned = false;
    bool regime_ambiguous = false;

    bool failed() const { return no_physical_root || ill_conditioned || regime_ambiguous; }
    std::string flags() const;
};

/// Theory-only row for one parameter point (widths empty for LR). Numerical
/// failures are flagged on the row rather than thrown.
ResultRow theory_row(ModelKind model, const std::vector<double>& widths, const Scenario& s);

/// Per-row seed: a pure function of the base seed and the row's parameter
/// tuple (model, widths, alpha, sigma2, eta, d), so extending an axis never
/// reseeds pre-existing points.
std::uint64_t derive_seed(std::uint64_t base, ModelKind model, const std::vector<double>& widths,
                          double alpha, double sigma2, double eta, int d);

/// Expand and evaluate the grid. Grid points run on a work pool sized by
/// DLC_THREADS (default: logical cores); rows are assembled in grid order.
/// Numerical failures are flagged on the row, never thrown.
std::vector<ResultRow> run_sweep(const SweepConfig& cfg);

inline constexpr int kCsvSchemaVersion = 1;

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_rows_jsonl(std::ostream& os, const std::vector<ResultRow>& rows);

/// Parse rows back from CSV produced by write_rows_csv (round-trip exact).
std::vector<ResultRow> read_rows_csv(std::istream& is);

/// Write to `cfg.output` ("-" for stdout) in the configured format, via a
/// temp file and atomic rename so partial output never lands.
void write_output(const SweepConfig& cfg, const std::vector<ResultRow>& rows);

/// Shared work pool helper: runs fn(i) for i in [0, n) on up to DLC_THREADS
/// workers.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace dlc
