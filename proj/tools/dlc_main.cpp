#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "acceptance.hpp"
#include "dlc/optimal.hpp"
#include "dlc/perturbation.hpp"
#include "dlc/simulate.hpp"
#include "dlc/sweep.hpp"
#include "dlc/theory.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;
constexpr int kExitNumerical = 3;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_width_list(const std::string& text) {
    std::vector<double> widths;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        size_t pos = 0;
        widths.push_back(std::stod(item, &pos));
        if (pos != item.size()) throw std::invalid_argument("bad width: " + item);
    }
    return widths;
}

int cmd_theory(const std::string& model_name, double alpha, double sigma2, double eta,
               const std::string& widths_text) {
    const auto model = dlc::parse_model_kind(model_name);
    if (!model) {
        std::cerr << "theory: unknown model '" << model_name << "'\n";
        return kExitUsage;
    }
    std::vector<double> widths;
    if (!widths_text.empty()) widths = parse_width_list(widths_text);
    if (*model == dlc::ModelKind::LR && !widths.empty()) {
        std::cerr << "theory: --widths is not accepted for model lr\n";
        return kExitUsage;
    }
    if (*model != dlc::ModelKind::LR && widths.empty()) {
        std::cerr << "theory: --widths is required for models rf and nn\n";
        return kExitUsage;
    }
    try {
        const dlc::Scenario s(alpha, sigma2, eta);
        const auto row = dlc::theory_row(*model, widths, s);
        if (row.boundary) {
            std::cerr << "theory: alpha = " << fmt17(alpha)
                      << " lies on a phase boundary; no finite prediction there\n";
            return kExitDomain;
        }
        if (row.failed()) {
            std::cerr << "theory: numerical failure (" << row.flags() << ")\n";
            return kExitNumerical;
        }
        dlc::write_rows_csv(std::cout, {row});
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "theory: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::domain_error& e) {
        std::cerr << "theory: " << e.what() << "\n";
        return kExitDomain;
    }
}

int cmd_sweep(const std::string& config_path, const std::string& out_override,
              const std::string& format_override) {
    dlc::SweepConfig cfg;
    try {
        cfg = dlc::parse_sweep_config(config_path);
    } catch (const dlc::SweepConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    if (!out_override.empty()) cfg.output = out_override;
    if (!format_override.empty()) {
        if (format_override == "csv") {
            cfg.format = dlc::OutputFormat::Csv;
        } else if (format_override == "jsonl") {
            cfg.format = dlc::OutputFormat::JsonLines;
        } else {
            std::cerr << "sweep: --format must be csv or jsonl\n";
            return kExitUsage;
        }
    }
    const auto rows = dlc::run_sweep(cfg);
    if (rows.empty()) {
        std::cerr << "sweep: grid is empty, nothing to do\n";
        return kExitUsage;
    }
    try {
        dlc::write_output(cfg, rows);
    } catch (const std::exception& e) {
        std::cerr << "sweep: " << e.what() << "\n";
        return kExitUsage;
    }
    int failures = 0;
    for (const auto& r : rows)
        if (r.failed()) ++failures;
    if (failures > 0) {
        std::cerr << "sweep: " << failures << " grid point(s) flagged with numerical failures\n";
        return kExitNumerical;
    }
    return kExitOk;
}

int cmd_optimal(const std::string& model_name, double alpha, double sigma2, double eta,
                int depth, double width, bool has_depth, bool has_width) {
    const auto model = dlc::parse_model_kind(model_name);
    if (!model || *model == dlc::ModelKind::LR) {
        std::cerr << "optimal: model must be rf or nn\n";
        return kExitUsage;
    }
    try {
        const dlc::Scenario s(alpha, sigma2, eta);
        dlc::WidthRegimeReport rep;
        std::string axis;
        if (*model == dlc::ModelKind::NN) {
            rep = dlc::nn_width_monotonicity(s);
            axis = "width";
        } else if (has_depth) {
            rep = dlc::rf_optimal_width(depth, s);
            axis = "width";
        } else if (has_width) {
            rep = dlc::rf_optimal_depth(width, s);
            axis = "depth";
        } else {
            std::cerr << "optimal: rf needs exactly one of --depth or --width\n";
            return kExitUsage;
        }
        std::cout << "axis,regime,optimum,sigma_tilde2\n";
        std::string opt;
        for (std::size_t i = 0; i < rep.optimum.size(); ++i) {
            if (i) opt += ';';
            opt += fmt17(rep.optimum[i]);
        }
        std::cout << axis << "," << dlc::to_string(rep.regime) << "," << opt << ","
                  << fmt17(rep.sigma_tilde2) << "\n";
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "optimal: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::domain_error& e) {
        std::cerr << "optimal: " << e.what() << "\n";
        return kExitDomain;
    }
}

struct GammaRange {
    double lo = 1.0, hi = 1.0;
    int n = 1;
    bool log_spaced = true;
};

bool parse_gamma_range(const std::string& text, GammaRange& out) {
    std::stringstream ss(text);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() < 3 || parts.size() > 4) return false;
    try {
        out.lo = std::stod(parts[0]);
        out.hi = std::stod(parts[1]);
        out.n = std::stoi(parts[2]);
    } catch (...) {
        return false;
    }
    if (parts.size() == 4) {
        if (parts[3] == "lin")
            out.log_spaced = false;
        else if (parts[3] == "log")
            out.log_spaced = true;
        else
            return false;
    }
    return out.n >= 1 && out.lo > 0.0 && out.hi >= out.lo;
}

int cmd_gapscan(double alpha, double sigma2, double eta, const std::string& gammas_text, int d,
                int reps, std::uint64_t seed, const std::string& out_path) {
    GammaRange range;
    if (!parse_gamma_range(gammas_text, range)) {
        std::cerr << "gapscan: --gammas expects lo:hi:n[:log|lin]\n";
        return kExitUsage;
    }
    try {
        const dlc::Scenario s(alpha, sigma2, eta);
        if (!(alpha < 1.0) || !(alpha < range.lo)) {
            std::cerr << "gapscan: requires alpha < 1 and alpha < the smallest gamma\n";
            return kExitDomain;
        }
        std::ostringstream body;
        body << "# schema_version=" << dlc::kCsvSchemaVersion << "\n";
        body << "# paired_disorder=1 (RF and NN replicates share X, teacher, noise streams)\n";
        body << "gamma,n1,gap_theory,gap_sim_mean,gap_sim_se\n";
        bool numerical_failure = false;
        for (int i = 0; i < range.n; ++i) {
            const double t = range.n == 1 ? 0.0 : static_cast<double>(i) / (range.n - 1);
            const double gamma = range.log_spaced
                                     ? range.lo * std::pow(range.hi / range.lo, t)
                                     : range.lo + (range.hi - range.lo) * t;
            const double gap_theory = dlc::gap_exact_two_layer(gamma, s);
            const int n1 = std::max(1, static_cast<int>(std::lround(gamma * d)));
            const int p = std::max(1, static_cast<int>(std::lround(alpha * d)));
            const std::uint64_t point_seed =
                dlc::derive_seed(seed, dlc::ModelKind::RF, {gamma}, alpha, sigma2, eta, d);
            double sum = 0.0, sumsq = 0.0;
            bool ok = true;
            try {
                for (int r = 0; r < reps; ++r) {
                    const auto ds = dlc::draw_disorder({n1}, d, p, point_seed, r);
                    const double rf = dlc::rf_replicate(ds, sigma2, eta).total();
                    const double nn = dlc::nn_replicate_two_layer(ds, n1, sigma2, eta).total();
                    const double g = rf - nn;
                    sum += g;
                    sumsq += g * g;
                }
            } catch (const std::exception& e) {
                std::cerr << "gapscan: gamma=" << gamma << ": " << e.what() << "\n";
                ok = false;
                numerical_failure = true;
            }
            body << fmt17(gamma) << "," << n1 << "," << fmt17(gap_theory) << ",";
            if (ok && reps >= 2) {
                const double mean = sum / reps;
                const double var = (sumsq - sum * sum / reps) / (reps - 1);
                body << fmt17(mean) << "," << fmt17(std::sqrt(std::max(var, 0.0) / reps));
            } else {
                body << ",";
            }
            body << "\n";
        }
        if (out_path == "-") {
            std::cout << body.str();
        } else {
            const std::filesystem::path tmp = out_path + ".tmp";
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f) {
                std::cerr << "gapscan: cannot open " << tmp << "\n";
                return kExitUsage;
            }
            f << body.str();
            f.close();
            std::filesystem::rename(tmp, out_path);
        }
        return numerical_failure ? kExitNumerical : kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "gapscan: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::domain_error& e) {
        std::cerr << "gapscan: " << e.what() << "\n";
        return kExitDomain;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learning curves for deep Bayesian linear models: closed-form theory, "
                 "Monte Carlo verification, and parameter sweeps"};
    app.require_subcommand(1);

    std::string model, widths_text, config_path, gammas_text, out_path = "-";
    double alpha = 0.5, sigma2 = 1.0, eta = 0.0, width = 1.0;
    int depth = 1, d = 100, reps = 10;
    std::uint64_t seed = 0;

    auto* theory = app.add_subcommand("theory", "Print one theory row");
    theory->add_option("--model", model, "lr, rf, or nn")->required();
    theory->add_option("--alpha", alpha, "data density p/d")->required();
    theory->add_option("--sigma2", sigma2, "prior variance")->required();
    theory->add_option("--eta", eta, "label-noise std")->required();
    theory->add_option("--widths", widths_text, "comma list of width ratios (rf/nn)");

    std::string sweep_out, sweep_format;
    auto* sweep = app.add_subcommand("sweep", "Run a sweep described by a config file");
    sweep->add_option("config", config_path, "config file path")->required();
    sweep->add_option("--out", sweep_out, "override output path, - for stdout");
    sweep->add_option("--format", sweep_format, "override output format: csv or jsonl");

    auto* optimal = app.add_subcommand("optimal", "Optimal-architecture report");
    optimal->add_option("--model", model, "rf or nn")->required();
    optimal->add_option("--alpha", alpha, "data density p/d")->required();
    optimal->add_option("--sigma2", sigma2, "prior variance")->required();
    optimal->add_option("--eta", eta, "label-noise std")->required();
    auto* opt_depth = optimal->add_option("--depth", depth, "depth (report optimal width)");
    auto* opt_width = optimal->add_option("--width", width, "width (report optimal depth)");

    auto* gapscan = app.add_subcommand("gapscan", "RF-NN generalization gap scan (depth 1)");
    gapscan->add_option("--alpha", alpha)->required();
    gapscan->add_option("--sigma2", sigma2)->required();
    gapscan->add_option("--eta", eta)->required();
    gapscan->add_option("--gammas", gammas_text, "lo:hi:n[:log|lin]")->required();
    gapscan->add_option("--d", d, "input dimensionality");
    gapscan->add_option("--reps", reps, "replicates per point");
    gapscan->add_option("--seed", seed, "base seed");
    gapscan->add_option("--out", out_path, "output path, - for stdout");

    auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    if (theory->parsed()) return cmd_theory(model, alpha, sigma2, eta, widths_text);
    if (sweep->parsed()) return cmd_sweep(config_path, sweep_out, sweep_format);
    if (optimal->parsed())
        return cmd_optimal(model, alpha, sigma2, eta, depth, width, opt_depth->count() > 0,
                           opt_width->count() > 0);
    if (gapscan->parsed()) return cmd_gapscan(alpha, sigma2, eta, gammas_text, d, reps, seed, out_path);
    if (selftest->parsed()) return dlc::run_acceptance(std::cout) == 0 ? kExitOk : kExitUsage;
    return kExitUsage;
}
