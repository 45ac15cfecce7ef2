#include "dlc/sweep.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "dlc/rng.hpp"
#include "dlc/simulate.hpp"
#include "dlc/theory.hpp"

namespace dlc {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
    std::string msg = "sweep config invalid:";
    for (const auto& e : issues) msg += "\n  - " + e;
    return msg;
}

std::string trim(std::string s) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(s.front())) s.erase(s.begin());
    while (!s.empty() && is_space(s.back())) s.pop_back();
    return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += fmt17(v[i]);
    }
    return out;
}

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(v[i]);
    }
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* p = s.c_str();
    char* end = nullptr;
    out = std::strtod(p, &end);
    return end != p && *end == '\0';
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
    const char* p = s.c_str();
    char* end = nullptr;
    out = std::strtoull(p, &end, 10);
    return end != p && *end == '\0';
}

// Value lists: comma-separated entries; each entry is a number or an
// inclusive linear range lo:hi:n.
bool parse_value_list(const std::string& text, std::vector<double>& out) {
    for (const auto& raw : split(text, ',')) {
        const std::string item = trim(raw);
        if (item.empty()) return false;
        if (item.find(':') != std::string::npos) {
            const auto parts = split(item, ':');
            if (parts.size() != 3) return false;
            double lo, hi;
            std::uint64_t n;
            if (!parse_double(trim(parts[0]), lo) || !parse_double(trim(parts[1]), hi) ||
                !parse_u64(trim(parts[2]), n) || n < 1)
                return false;
            if (n == 1) {
                out.push_back(lo);
            } else {
                for (std::uint64_t i = 0; i < n; ++i)
                    out.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                           static_cast<double>(n - 1));
            }
        } else {
            double v;
            if (!parse_double(item, v)) return false;
            out.push_back(v);
        }
    }
    return !out.empty();
}

}  // namespace

SweepConfigError::SweepConfigError(std::vector<std::string> issues_)
    : std::runtime_error(join_issues(issues_)), issues(std::move(issues_)) {}

SweepConfig parse_sweep_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::vector<std::string> issues;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) {
            issues.push_back("line " + std::to_string(lineno) + ": empty key");
            continue;
        }
        if (kv.count(key)) {
            issues.push_back(key + ": duplicate key");
            continue;
        }
        kv[key] = val;
    }

    SweepConfig cfg;
    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    auto take_list = [&](const std::string& key, bool required) {
        std::vector<double> out;
        if (auto v = take(key)) {
            if (!parse_value_list(*v, out)) issues.push_back(key + ": malformed value list");
        } else if (required) {
            issues.push_back(key + ": required key missing");
        }
        return out;
    };

    bool model_known = false;
    if (auto v = take("model")) {
        if (auto m = parse_model_kind(*v)) {
            cfg.model = *m;
            model_known = true;
        } else {
            issues.push_back("model: must be one of lr, rf, nn");
        }
    } else {
        issues.push_back("model: required key missing");
    }

    cfg.alphas = take_list("alpha", true);
    cfg.sigma2s = take_list("sigma2", true);
    cfg.etas = take_list("eta", true);
    for (double a : cfg.alphas)
        if (!(a > 0.0)) { issues.push_back("alpha: all values must be > 0"); break; }
    for (double s2 : cfg.sigma2s)
        if (!(s2 > 0.0)) { issues.push_back("sigma2: all values must be > 0"); break; }
    for (double e : cfg.etas)
        if (!(e >= 0.0)) { issues.push_back("eta: all values must be >= 0"); break; }

    cfg.gammas = take_list("gamma", false);
    if (auto v = take("depth")) {
        std::vector<double> raw;
        if (!parse_value_list(*v, raw)) {
            issues.push_back("depth: malformed value list");
        } else {
            for (double x : raw) {
                if (x < 1.0 || x != std::floor(x))
                    issues.push_back("depth: values must be positive integers");
                else
                    cfg.depths.push_back(static_cast<int>(x));
            }
        }
    }
    for (int l = 1;; ++l) {
        auto v = take("gamma" + std::to_string(l));
        if (!v) break;
        std::vector<double> axis;
        if (!parse_value_list(*v, axis))
            issues.push_back("gamma" + std::to_string(l) + ": malformed value list");
        cfg.layer_gammas.push_back(axis);
    }
    for (const auto& [key, _] : kv)
        if (key.rfind("gamma", 0) == 0 && key != "gamma")
            issues.push_back(key + ": per-layer width keys must be contiguous from gamma1");

    const bool has_broadcast = !cfg.gammas.empty();
    const bool has_layers = !cfg.layer_gammas.empty();
    if (model_known) {
        if (cfg.model == ModelKind::LR) {
            if (has_broadcast || has_layers || !cfg.depths.empty())
                issues.push_back("gamma/depth: not allowed for model lr");
        } else {
            if (has_broadcast && has_layers)
                issues.push_back("gamma: broadcast and per-layer width axes are exclusive");
            if (!has_broadcast && !has_layers)
                issues.push_back("gamma: rf/nn need a gamma axis (or gamma1..gammaL)");
            if (has_broadcast && cfg.depths.empty()) cfg.depths = {1};
            if (has_layers && !cfg.depths.empty())
                issues.push_back("depth: implied by per-layer width keys; remove it");
        }
    }
    for (double g : cfg.gammas)
        if (!(g > 0.0)) { issues.push_back("gamma: all values must be > 0"); break; }
    for (std::size_t l = 0; l < cfg.layer_gammas.size(); ++l)
        for (double g : cfg.layer_gammas[l])
            if (!(g > 0.0)) {
                issues.push_back("gamma" + std::to_string(l + 1) + ": all values must be > 0");
                break;
            }

    bool sim_requested = false;
    SimBlock sim;
    if (auto v = take("sim.d")) {
        sim_requested = true;
        std::uint64_t n;
        if (!parse_u64(*v, n) || n < 1)
            issues.push_back("sim.d: must be a positive integer");
        else
            sim.d = static_cast<int>(n);
    }
    if (auto v = take("sim.n_reps")) {
        sim_requested = true;
        std::uint64_t n;
        if (!parse_u64(*v, n) || n < 2)
            issues.push_back("sim.n_reps: must be an integer >= 2");
        else
            sim.n_reps = static_cast<int>(n);
    }
    if (auto v = take("sim.base_seed")) {
        sim_requested = true;
        std::uint64_t n;
        if (!parse_u64(*v, n))
            issues.push_back("sim.base_seed: must be an unsigned integer");
        else
            sim.base_seed = n;
    }
    if (sim_requested) {
        cfg.sim = sim;
        if (model_known && cfg.model == ModelKind::NN) {
            bool deep = cfg.layer_gammas.size() > 1;
            for (int dep : cfg.depths) deep = deep || dep > 1;
            if (deep)
                issues.push_back("sim.d: nn simulation supports depth 1 only "
                                 "(deep nn estimates are theory-only)");
        }
    }

    if (auto v = take("output")) cfg.output = *v;
    if (auto v = take("format")) {
        if (*v == "csv")
            cfg.format = OutputFormat::Csv;
        else if (*v == "jsonl")
            cfg.format = OutputFormat::JsonLines;
        else
            issues.push_back("format: must be csv or jsonl");
    }

    for (const auto& [key, _] : kv)
        if (!(key.rfind("gamma", 0) == 0 && key != "gamma"))
            issues.push_back(key + ": unknown key");

    if (!issues.empty()) throw SweepConfigError(std::move(issues));
    return cfg;
}

SweepConfig parse_sweep_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw SweepConfigError({path + ": cannot open config file"});
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_sweep_config_text(ss.str());
}

std::string ResultRow::flags() const {
    std::vector<std::string> f;
    if (boundary) f.push_back("boundary");
    if (divergent) f.push_back("divergent");
    if (multiple_roots) f.push_back("multiple_roots");
    if (no_physical_root) f.push_back("no_physical_root");
    if (ill_conditioned) f.push_back("ill_conditioned");
    if (regime_ambiguous) f.push_back("regime_ambiguous");
    std::string out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i) out += ';';
        out += f[i];
    }
    return out;
}

ResultRow theory_row(ModelKind model, const std::vector<double>& widths, const Scenario& s) {
    ResultRow row;
    row.model = model;
    row.widths = widths;
    row.alpha = s.alpha;
    row.sigma2 = s.sigma2;
    row.eta = s.eta;
    try {
        TheoryResult tr;
        switch (model) {
            case ModelKind::LR: tr = epsilon_lr(s); break;
            case ModelKind::RF: tr = epsilon_rf(Architecture(widths), s); break;
            case ModelKind::NN: tr = epsilon_nn(Architecture(widths), s); break;
        }
        row.epsilon_theory = tr.epsilon;
        row.phase = tr.phase;
        row.z = tr.z;
        row.divergent = tr.divergent;
        row.boundary = tr.boundary();
        if (tr.root) row.multiple_roots = tr.root->multiple_roots;
    } catch (const NoPhysicalRootError&) {
        row.no_physical_root = true;
        row.epsilon_theory = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
}

std::uint64_t derive_seed(std::uint64_t base, ModelKind model, const std::vector<double>& widths,
                          double alpha, double sigma2, double eta, int d) {
    std::uint64_t h = 14695981039346656037ULL;  // FNV-1a over the parameter tuple
    auto absorb = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ULL;
        }
    };
    auto absorb_double = [&](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        absorb(bits);
    };
    absorb(base);
    absorb(static_cast<std::uint64_t>(model));
    absorb(widths.size());
    for (double w : widths) absorb_double(w);
    absorb_double(alpha);
    absorb_double(sigma2);
    absorb_double(eta);
    absorb(static_cast<std::uint64_t>(d));
    return splitmix64(h);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DLC_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) workers = v;
    }
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

namespace {

struct GridPoint {
    std::vector<double> widths;  // empty for LR
    double alpha, sigma2, eta;
};

std::vector<GridPoint> expand_grid(const SweepConfig& cfg) {
    std::vector<std::vector<double>> width_tuples;
    if (cfg.model == ModelKind::LR) {
        width_tuples.push_back({});
    } else if (!cfg.layer_gammas.empty()) {
        width_tuples.push_back({});
        for (const auto& axis : cfg.layer_gammas) {
            std::vector<std::vector<double>> next;
            for (const auto& prefix : width_tuples)
                for (double g : axis) {
                    auto t = prefix;
                    t.push_back(g);
                    next.push_back(std::move(t));
                }
            width_tuples = std::move(next);
        }
    } else {
        for (int dep : cfg.depths)
            for (double g : cfg.gammas)
                width_tuples.push_back(std::vector<double>(static_cast<std::size_t>(dep), g));
    }

    std::vector<GridPoint> grid;
    for (const auto& w : width_tuples)
        for (double s2 : cfg.sigma2s)
            for (double e : cfg.etas)
                for (double a : cfg.alphas) grid.push_back({w, a, s2, e});
    return grid;
}

ResultRow eval_point(const SweepConfig& cfg, const GridPoint& pt) {
    const Scenario s(pt.alpha, pt.sigma2, pt.eta);
    ResultRow row = theory_row(cfg.model, pt.widths, s);
    if (!cfg.sim || row.boundary || row.no_physical_root) return row;

    const SimBlock& sim = *cfg.sim;
    row.d = sim.d;
    row.n_reps = sim.n_reps;
    row.seed = derive_seed(sim.base_seed, cfg.model, pt.widths, pt.alpha, pt.sigma2, pt.eta, sim.d);
    row.has_seed = true;
    const int p = std::max(1, static_cast<int>(std::lround(pt.alpha * sim.d)));
    for (double g : pt.widths) {
        const int nl = std::max(1, static_cast<int>(std::lround(g * sim.d)));
        row.sim_widths.push_back(nl);
        row.realized_widths.push_back(static_cast<double>(nl) / sim.d);
    }
    try {
        SimEstimate est;
        switch (cfg.model) {
            case ModelKind::LR:
                est = simulate_lr_error(sim.d, p, s, sim.n_reps, row.seed);
                break;
            case ModelKind::RF:
                est = simulate_rf_error(row.sim_widths, sim.d, p, s, sim.n_reps, row.seed);
                break;
            case ModelKind::NN:
                // Over-sampled NN error equals the LR bias term.
                est = p > sim.d ? simulate_lr_error(sim.d, p, s, sim.n_reps, row.seed)
                                : simulate_nn_error_two_layer(row.sim_widths.at(0), sim.d, p, s,
                                                              sim.n_reps, row.seed);
                break;
        }
        row.sim_mean = est.mean;
        row.sim_se = est.se;
    } catch (const IllConditionedError&) {
        row.ill_conditioned = true;
    } catch (const RegimeAmbiguousError&) {
        row.regime_ambiguous = true;
    }
    return row;
}

}  // namespace

std::vector<ResultRow> run_sweep(const SweepConfig& cfg) {
    const auto grid = expand_grid(cfg);
    std::vector<ResultRow> rows(grid.size());
    parallel_for(static_cast<int>(grid.size()),
                 [&](int i) { rows[static_cast<std::size_t>(i)] = eval_point(cfg, grid[i]); });
    return rows;
}

namespace {

const char* kCsvHeader =
    "model,depth,widths,realized_widths,alpha,sigma2,eta,phase,bottleneck_layers,"
    "epsilon_theory,z,epsilon_sim_mean,epsilon_sim_se,n_reps,d,seed,flags";

std::string row_to_csv(const ResultRow& r) {
    std::vector<std::string> f;
    f.push_back(to_string(r.model));
    f.push_back(r.model == ModelKind::LR ? "" : std::to_string(r.widths.size()));
    f.push_back(csv_field(join_doubles(r.widths)));
    f.push_back(csv_field(join_doubles(r.realized_widths)));
    f.push_back(fmt17(r.alpha));
    f.push_back(fmt17(r.sigma2));
    f.push_back(fmt17(r.eta));
    f.push_back(to_string(r.phase.phase));
    f.push_back(join_ints(r.phase.bottleneck_layers));
    f.push_back(std::isnan(r.epsilon_theory) ? "nan" : fmt17(r.epsilon_theory));
    f.push_back(r.z ? fmt17(*r.z) : "");
    f.push_back(r.sim_mean ? fmt17(*r.sim_mean) : "");
    f.push_back(r.sim_se ? fmt17(*r.sim_se) : "");
    f.push_back(r.sim_mean ? std::to_string(r.n_reps) : "");
    f.push_back(r.sim_mean ? std::to_string(r.d) : "");
    f.push_back(r.has_seed ? std::to_string(r.seed) : "");
    f.push_back(r.flags());
    std::string line;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i) line += ',';
        line += f[i];
    }
    return line;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << "# schema_version=" << kCsvSchemaVersion << "\n" << kCsvHeader << "\n";
    for (const auto& r : rows) os << row_to_csv(r) << "\n";
}

void write_rows_jsonl(std::ostream& os, const std::vector<ResultRow>& rows) {
    for (const auto& r : rows) {
        nlohmann::json j;
        j["schema_version"] = kCsvSchemaVersion;
        j["model"] = to_string(r.model);
        if (r.model != ModelKind::LR) j["depth"] = r.widths.size();
        j["widths"] = r.widths;
        j["realized_widths"] = r.realized_widths;
        j["alpha"] = r.alpha;
        j["sigma2"] = r.sigma2;
        j["eta"] = r.eta;
        j["phase"] = to_string(r.phase.phase);
        j["bottleneck_layers"] = r.phase.bottleneck_layers;
        if (std::isfinite(r.epsilon_theory))
            j["epsilon_theory"] = r.epsilon_theory;
        else
            j["epsilon_theory"] = std::isnan(r.epsilon_theory) ? "nan" : "inf";
        if (r.z) j["z"] = *r.z;
        if (r.sim_mean) {
            j["epsilon_sim_mean"] = *r.sim_mean;
            j["epsilon_sim_se"] = *r.sim_se;
            j["n_reps"] = r.n_reps;
            j["d"] = r.d;
        }
        if (r.has_seed) j["seed"] = r.seed;
        j["flags"] = r.flags();
        os << j.dump() << "\n";
    }
}

std::vector<ResultRow> read_rows_csv(std::istream& is) {
    std::vector<ResultRow> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != kCsvHeader)
                throw std::runtime_error("read_rows_csv: unexpected header: " + line);
            header_seen = true;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 17) throw std::runtime_error("read_rows_csv: bad field count");
        ResultRow r;
        r.model = parse_model_kind(f[0]).value();
        auto parse_dlist = [](const std::string& s) {
            std::vector<double> out;
            if (s.empty()) return out;
            for (const auto& item : split(s, ',')) {
                double v;
                if (!parse_double(item, v)) throw std::runtime_error("read_rows_csv: bad number");
                out.push_back(v);
            }
            return out;
        };
        r.widths = parse_dlist(f[2]);
        r.realized_widths = parse_dlist(f[3]);
        parse_double(f[4], r.alpha);
        parse_double(f[5], r.sigma2);
        parse_double(f[6], r.eta);
        for (auto ph : {Phase::UnderSampled, Phase::Bottlenecked, Phase::OverSampled, Phase::Boundary})
            if (to_string(ph) == f[7]) r.phase.phase = ph;
        if (!f[8].empty())
            for (const auto& item : split(f[8], ';'))
                r.phase.bottleneck_layers.push_back(std::atoi(item.c_str()));
        parse_double(f[9], r.epsilon_theory);
        if (!f[10].empty()) {
            double v;
            parse_double(f[10], v);
            r.z = v;
        }
        if (!f[11].empty()) {
            double v;
            parse_double(f[11], v);
            r.sim_mean = v;
            parse_double(f[12], v);
            r.sim_se = v;
            r.n_reps = std::atoi(f[13].c_str());
            r.d = std::atoi(f[14].c_str());
        }
        if (!f[15].empty()) {
            parse_u64(f[15], r.seed);
            r.has_seed = true;
        }
        for (const auto& flag : split(f[16], ';')) {
            if (flag == "boundary") r.boundary = true;
            if (flag == "divergent") r.divergent = true;
            if (flag == "multiple_roots") r.multiple_roots = true;
            if (flag == "no_physical_root") r.no_physical_root = true;
            if (flag == "ill_conditioned") r.ill_conditioned = true;
            if (flag == "regime_ambiguous") r.regime_ambiguous = true;
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_output(const SweepConfig& cfg, const std::vector<ResultRow>& rows) {
    const auto emit = [&](std::ostream& os) {
        if (cfg.format == OutputFormat::Csv)
            write_rows_csv(os, rows);
        else
            write_rows_jsonl(os, rows);
    };
    if (cfg.output == "-") {
        emit(std::cout);
        return;
    }
    const std::filesystem::path target(cfg.output);
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("write_output: cannot open " + tmp.string());
        emit(f);
        if (!f) throw std::runtime_error("write_output: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace dlc
