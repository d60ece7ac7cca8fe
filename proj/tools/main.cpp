// bootlasso: weighted-bootstrap tuning of the Lasso penalty parameter.
// One binary, subcommand style; all randomness flows from a single --seed.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "bootlasso/csv.hpp"
#include "bootlasso/errors.hpp"
#include "bootlasso/evaluation.hpp"
#include "bootlasso/simulate.hpp"
#include "bootlasso/threading.hpp"
#include "bootlasso/tuner.hpp"
#include "bootlasso/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace bootlasso;

namespace {

constexpr int kExitUsage = 2;     // malformed input: flags, CSV, config
constexpr int kExitDegenerate = 3;  // unusable data: constant columns, degenerate draws

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("BOOTLASSO_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    return resolve_thread_count(0);
}

// Runs a subcommand body and writes manifest.json on both success and
// failure; the exit code comes from the exception category.
struct RunContext {
    std::string command_line;
    std::string subcommand;
    fs::path out_dir;
    json config = json::object();
    std::vector<std::string> artifacts;
    std::uint64_t seed = 0;

    int execute(const std::function<void()>& body) {
        const auto start = std::chrono::steady_clock::now();
        int code = 0;
        std::string error;
        try {
            fs::create_directories(out_dir);
            body();
        } catch (const CsvParseError& e) {
            error = e.what();
            code = kExitUsage;
        } catch (const ConfigParseError& e) {
            error = e.what();
            code = kExitUsage;
        } catch (const NonFiniteInputError& e) {
            error = e.what();
            code = kExitUsage;
        } catch (const ConstantColumnError& e) {
            error = e.what();
            code = kExitDegenerate;
        } catch (const AllReplicatesDegenerateError& e) {
            error = e.what();
            code = kExitDegenerate;
        } catch (const NoPositiveWeightError& e) {
            error = e.what();
            code = kExitDegenerate;
        } catch (const DegenerateTruthError& e) {
            error = e.what();
            code = kExitDegenerate;
        } catch (const InvalidShapeError& e) {
            error = e.what();
            code = kExitUsage;
        } catch (const InvalidFoldCountError& e) {
            error = e.what();
            code = kExitUsage;
        } catch (const InvalidMError& e) {
            error = e.what();
            code = kExitUsage;
        } catch (const FoldTooSmallError& e) {
            error = e.what();
            code = kExitDegenerate;
        } catch (const std::exception& e) {
            error = e.what();
            code = 1;
        }

        const double duration =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json manifest;
        manifest["command"] = command_line;
        manifest["subcommand"] = subcommand;
        manifest["version"] = kVersion;
        manifest["seed"] = seed;
        manifest["config"] = config;
        manifest["artifacts"] = artifacts;
        manifest["duration_seconds"] = duration;
        manifest["status"] = error.empty() ? "ok" : "error";
        if (!error.empty()) manifest["error"] = error;
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        std::ofstream mf(out_dir / "manifest.json");
        if (mf) mf << manifest.dump(2) << "\n";

        if (!error.empty()) std::cerr << "error: " << error << "\n";
        return code;
    }

    std::string artifact(const std::string& name) {
        artifacts.push_back((out_dir / name).string());
        return (out_dir / name).string();
    }
};

void write_mspe_curve(const std::string& path, const MspeCurve& curve) {
    std::ofstream out(path);
    out << "lambda,total_mspe,mean_mspe,se\n";
    for (Eigen::Index k = 0; k < curve.lambdas.size(); ++k)
        out << format_double(curve.lambdas(k)) << ',' << format_double(curve.total_mspe(k))
            << ',' << format_double(curve.mean_mspe(k)) << ',' << format_double(curve.se(k))
            << '\n';
}

void write_tuning_rows(const std::string& path,
                       const std::vector<std::tuple<std::string, double, int>>& rows,
                       double rho, const std::string& scheme) {
    std::ofstream out(path);
    out << "rule,lambda,n_nonzero,rho,scheme\n";
    for (const auto& [rule, lambda, size] : rows)
        out << rule << ',' << format_double(lambda) << ',' << size << ','
            << format_double(rho) << ',' << scheme << '\n';
}

void write_profile(const std::string& path, const Eigen::VectorXd& profile,
                   const std::string& scheme, double rho) {
    std::ofstream out(path);
    out << "# rho = " << format_double(rho) << "\n";
    out << "rank,mean_weight,scheme,rho\n";
    for (Eigen::Index i = 0; i < profile.size(); ++i)
        out << (i + 1) << ',' << format_double(profile(i)) << ',' << scheme << ','
            << format_double(rho) << '\n';
}

// --- simulate config ------------------------------------------------------

struct SimFileConfig {
    std::string csv;
    std::string response;
    std::uint64_t seed = 0;
    SimulationConfig sim;
    std::vector<double> beta_rhos;
    double beta_sum = 4.0;
    std::vector<std::string> kfold_tokens;
    json as_json;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

SimFileConfig parse_sim_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParseError(path, 0, "cannot open config file");

    SimFileConfig cfg;
    std::map<std::string, std::pair<std::string, long>> kv;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigParseError(path, line_no, "expected 'key = value'");
        auto trim = [](std::string s) {
            const auto lo = s.find_first_not_of(" \t\r");
            const auto hi = s.find_last_not_of(" \t\r");
            return lo == std::string::npos ? std::string() : s.substr(lo, hi - lo + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigParseError(path, line_no, "empty key");
        if (kv.count(key)) throw ConfigParseError(path, line_no, "duplicate key '" + key + "'");
        kv[key] = {value, line_no};
    }

    auto require = [&](const std::string& key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end())
            throw ConfigParseError(path, line_no, "missing required key '" + key + "'");
        return it->second.first;
    };
    auto get_num = [&](const std::string& key, double fallback) -> double {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        try {
            size_t pos = 0;
            const double v = std::stod(it->second.first, &pos);
            if (pos != it->second.first.size()) throw std::invalid_argument(key);
            return v;
        } catch (const std::exception&) {
            throw ConfigParseError(path, it->second.second,
                                   "cannot parse value for '" + key + "'");
        }
    };

    cfg.csv = require("csv");
    cfg.response = require("response");
    {
        const std::string seed_text = require("seed");
        try {
            cfg.seed = std::stoull(seed_text);
        } catch (const std::exception&) {
            throw ConfigParseError(path, kv["seed"].second, "cannot parse value for 'seed'");
        }
    }
    cfg.sim.seed = cfg.seed;
    cfg.sim.n_replications = static_cast<int>(get_num("n_replications", 50));
    cfg.sim.b = static_cast<int>(get_num("b", 200));
    cfg.sim.grid.size = static_cast<int>(get_num("grid_size", 100));
    cfg.sim.grid.ratio = get_num("grid_ratio", 0.001);
    cfg.sim.cv_repeats = static_cast<int>(get_num("cv_repeats", 1));
    cfg.sim.truth_rule.cv_k = static_cast<int>(get_num("truth_k", 10));
    cfg.sim.truth_rule.cv_repeats = static_cast<int>(get_num("truth_repeats", 10));
    cfg.sim.with_ebic = get_num("ebic", 1) != 0.0;
    cfg.sim.ebic_gamma = get_num("ebic_gamma", 1.0);
    cfg.beta_sum = get_num("beta_sum", 4.0);

    if (kv.count("beta_rhos")) {
        for (const auto& tok : split_list(kv["beta_rhos"].first)) {
            try {
                cfg.beta_rhos.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw ConfigParseError(path, kv["beta_rhos"].second,
                                       "cannot parse beta_rhos entry '" + tok + "'");
            }
        }
    } else {
        for (int i = 1; i <= 9; ++i) cfg.beta_rhos.push_back(0.1 * i);
    }
    cfg.kfold_tokens =
        kv.count("kfold") ? split_list(kv["kfold"].first)
                          : std::vector<std::string>{"3", "5", "10", "n"};
    if (kv.count("mofn")) {
        cfg.sim.mofn_fractions.clear();
        for (const auto& tok : split_list(kv["mofn"].first)) {
            try {
                cfg.sim.mofn_fractions.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw ConfigParseError(path, kv["mofn"].second,
                                       "cannot parse mofn entry '" + tok + "'");
            }
        }
    }

    for (const auto& [key, value] : kv) cfg.as_json[key] = value.first;
    return cfg;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double iqr_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    auto quantile = [&](double q) {
        const double pos = q * (static_cast<double>(v.size()) - 1.0);
        const size_t lo = static_cast<size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        return lo + 1 < v.size() ? v[lo] * (1.0 - frac) + v[lo + 1] * frac : v[lo];
    };
    return quantile(0.75) - quantile(0.25);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bootlasso: weighted-bootstrap tuning for the Lasso"};
    app.set_version_flag("--version", std::string("bootlasso ") + kVersion);
    app.require_subcommand(1);

    std::string cli_line;
    for (int i = 0; i < argc; ++i) {
        if (i) cli_line += ' ';
        cli_line += argv[i];
    }

    // ---- tune ----
    auto* tune = app.add_subcommand("tune", "tune the penalty on a CSV dataset");
    std::string tune_csv, tune_response, tune_scheme, tune_rules = "min,one_se";
    std::string tune_out = "bootlasso_out";
    std::uint64_t tune_seed = 0;
    int tune_b = 200, tune_threads = 0, tune_grid_size = 100;
    double tune_grid_ratio = 0.001, tune_ebic_gamma = 1.0;
    bool tune_ebic = false, tune_raw_weights = false;
    tune->add_option("csv", tune_csv, "input CSV with a header row")->required();
    tune->add_option("--response", tune_response, "response column name")->required();
    tune->add_option("--scheme", tune_scheme,
                     "weight scheme: beta:a,b | kfold:k | paired | mofn:f")
        ->required();
    tune->add_option("--b", tune_b, "bootstrap replicates");
    tune->add_option("--seed", tune_seed, "master seed");
    tune->add_option("--rules", tune_rules, "selection rules, subset of min,one_se");
    tune->add_option("--grid-size", tune_grid_size, "lambda grid length");
    tune->add_option("--grid-ratio", tune_grid_ratio, "grid floor as a fraction of lambda_max");
    tune->add_option("--threads", tune_threads, "worker threads (0 = auto)");
    tune->add_option("--out-dir", tune_out, "output directory");
    tune->add_flag("--ebic", tune_ebic, "also report the EBIC selection");
    tune->add_option("--ebic-gamma", tune_ebic_gamma, "EBIC gamma in [0,1]");
    tune->add_flag("--raw-weights", tune_raw_weights,
                   "use raw draw masses in the fitting loss instead of mean-one rescaling");

    // ---- simulate ----
    auto* simulate = app.add_subcommand("simulate", "run a simulation study from a config file");
    std::string sim_config_path, sim_out = "bootlasso_sim";
    int sim_threads = 0;
    simulate->add_option("config", sim_config_path, "key = value config file")->required();
    simulate->add_option("--out-dir", sim_out, "output directory");
    simulate->add_option("--threads", sim_threads, "worker threads (0 = auto)");

    // ---- weights-preview ----
    auto* preview = app.add_subcommand("weights-preview", "export sorted weight profiles");
    std::string prev_scheme, prev_out = "bootlasso_weights";
    int prev_n = 0, prev_replicates = 200;
    std::uint64_t prev_seed = 0;
    preview->add_option("--scheme", prev_scheme, "weight scheme")->required();
    preview->add_option("--n", prev_n, "sample size")->required();
    preview->add_option("--replicates", prev_replicates, "number of draws");
    preview->add_option("--seed", prev_seed, "master seed");
    preview->add_option("--out-dir", prev_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    if (tune->parsed()) {
        RunContext ctx;
        ctx.command_line = cli_line;
        ctx.subcommand = "tune";
        ctx.out_dir = tune_out;
        ctx.seed = tune_seed;
        return ctx.execute([&] {
            LoadedDataset loaded = load_dataset_csv(tune_csv, tune_response);
            const int n = static_cast<int>(loaded.data.n());

            TuningConfig cfg;
            cfg.scheme = parse_scheme(tune_scheme, n, tune_seed);
            cfg.b = tune_b;
            cfg.grid = {tune_grid_size, tune_grid_ratio};
            cfg.seed = tune_seed;
            cfg.threads = resolve_threads(tune_threads);
            cfg.normalization = tune_raw_weights ? WeightNormalization::Verbatim
                                                 : WeightNormalization::MeanOne;
            bool want_min = false, want_one_se = false;
            for (const auto& rule : split_list(tune_rules)) {
                if (rule == "min")
                    want_min = true;
                else if (rule == "one_se")
                    want_one_se = true;
                else
                    throw ConfigParseError("--rules", 0, "unknown rule '" + rule + "'");
            }
            cfg.rule_one_se = want_one_se;

            ctx.config = {{"csv", tune_csv},
                          {"response", tune_response},
                          {"scheme", cfg.scheme.label()},
                          {"b", cfg.b},
                          {"rules", tune_rules},
                          {"grid_size", cfg.grid.size},
                          {"grid_ratio", cfg.grid.ratio},
                          {"threads", cfg.threads},
                          {"weight_normalization",
                           tune_raw_weights ? "verbatim" : "mean_one"},
                          {"ebic", tune_ebic},
                          {"ebic_gamma", tune_ebic_gamma},
                          {"n", n},
                          {"p", static_cast<int>(loaded.data.p())}};

            TuningResult res = run_weighted_bootstrap(loaded.data, cfg);
            ctx.config["rho"] = res.rho;
            ctx.config["b_effective"] = res.b_effective;
            ctx.config["discarded_replicates"] = res.discarded_replicates;

            write_mspe_curve(ctx.artifact("mspe_curve.csv"), res.curve);

            std::vector<std::tuple<std::string, double, int>> rows;
            if (want_min)
                rows.emplace_back("min", res.lambda_min,
                                  static_cast<int>(res.active_set_min.indices.size()));
            if (want_one_se && res.lambda_one_se)
                rows.emplace_back("one_se", *res.lambda_one_se,
                                  static_cast<int>(res.active_set_one_se.indices.size()));
            if (tune_ebic) {
                Eigen::VectorXd scores =
                    compute_ebic(loaded.data, res.full_path, tune_ebic_gamma);
                const double lam = select_lambda_ebic(res.full_path, scores);
                int idx = 0;
                for (int k = 0; k < res.full_path.lambdas.size(); ++k)
                    if (res.full_path.lambdas(k) == lam) idx = k;
                rows.emplace_back("ebic", lam,
                                  static_cast<int>(active_set(res.full_path, idx).indices.size()));
            }
            write_tuning_rows(ctx.artifact("tuning_result.csv"), rows, res.rho,
                              cfg.scheme.label());
        });
    }

    if (simulate->parsed()) {
        RunContext ctx;
        ctx.command_line = cli_line;
        ctx.subcommand = "simulate";
        ctx.out_dir = sim_out;
        return ctx.execute([&] {
            SimFileConfig file_cfg = parse_sim_config(sim_config_path);
            ctx.seed = file_cfg.seed;
            ctx.config = file_cfg.as_json;
            ctx.config["config_path"] = sim_config_path;

            // csv paths resolve relative to the config file
            fs::path csv_path = file_cfg.csv;
            if (csv_path.is_relative())
                csv_path = fs::path(sim_config_path).parent_path() / csv_path;
            LoadedDataset loaded = load_dataset_csv(csv_path.string(), file_cfg.response);
            const int n = static_cast<int>(loaded.data.n());

            SimulationConfig cfg = file_cfg.sim;
            cfg.threads = resolve_threads(sim_threads);
            for (double rho : file_cfg.beta_rhos)
                cfg.scheme_sweep.push_back(
                    {BetaWeights{file_cfg.beta_sum * rho, file_cfg.beta_sum * (1.0 - rho)}, 0});
            for (const auto& tok : file_cfg.kfold_tokens) {
                if (tok == "n" || tok == "N") {
                    cfg.cv_ks.push_back(n);
                } else {
                    try {
                        cfg.cv_ks.push_back(std::stoi(tok));
                    } catch (const std::exception&) {
                        throw ConfigParseError(sim_config_path, 0,
                                               "cannot parse kfold entry '" + tok + "'");
                    }
                }
            }

            SimulationResult res = run_simulation_study(loaded.data, cfg);

            {
                std::ofstream out(ctx.artifact("results.csv"));
                out << "scheme,replication,rule,lambda,n_nonzero,mcc,rho,error\n";
                for (const auto& cell : res.cells)
                    out << cell.scheme << ',' << cell.replication << ',' << cell.rule << ','
                        << format_double(cell.lambda) << ',' << cell.n_nonzero << ','
                        << format_double(cell.mcc_value) << ',' << format_double(cell.rho)
                        << ',' << cell.error << '\n';
            }
            {
                std::map<std::pair<std::string, std::string>,
                         std::vector<const SimulationCell*>>
                    grouped;
                for (const auto& cell : res.cells)
                    if (cell.error.empty()) grouped[{cell.scheme, cell.rule}].push_back(&cell);
                std::ofstream out(ctx.artifact("summary.csv"));
                out << "scheme,rule,cells,median_lambda,iqr_lambda,median_n_nonzero,"
                       "median_mcc,mean_rho\n";
                for (const auto& [key, cells] : grouped) {
                    std::vector<double> lams, sizes, mccs;
                    double rho_total = 0.0;
                    for (const auto* c : cells) {
                        lams.push_back(c->lambda);
                        sizes.push_back(c->n_nonzero);
                        mccs.push_back(c->mcc_value);
                        rho_total += c->rho;
                    }
                    out << key.first << ',' << key.second << ',' << cells.size() << ','
                        << format_double(median_of(lams)) << ','
                        << format_double(iqr_of(lams)) << ','
                        << format_double(median_of(sizes)) << ','
                        << format_double(median_of(mccs)) << ','
                        << format_double(rho_total / static_cast<double>(cells.size()))
                        << '\n';
                }
            }
            {
                std::ofstream out(ctx.artifact("truth.csv"));
                out << "column_index,column_name,beta_true\n";
                for (int j : res.truth.support)
                    out << (j + 1) << ',' << loaded.covariate_names[static_cast<size_t>(j)]
                        << ',' << format_double(res.truth.beta(j)) << '\n';
            }
            ctx.config["truth_support_size"] = res.truth.support.size();
            ctx.config["truth_sigma"] = res.truth.sigma;
            ctx.config["truth_lambda"] = res.truth.lambda;
        });
    }

    // weights-preview
    RunContext ctx;
    ctx.command_line = cli_line;
    ctx.subcommand = "weights-preview";
    ctx.out_dir = prev_out;
    ctx.seed = prev_seed;
    return ctx.execute([&] {
        WeightSchemeSpec spec = parse_scheme(prev_scheme, prev_n, prev_seed);
        if (prev_n < 1) throw InvalidShapeError("--n must be positive");
        if (prev_replicates < 1) throw InvalidShapeError("--replicates must be positive");
        ctx.config = {{"scheme", spec.label()},
                      {"n", prev_n},
                      {"replicates", prev_replicates}};
        WeightProfiles prof = weight_profiles(spec, prev_n, prev_replicates);
        ctx.config["rho"] = prof.rho;
        write_profile(ctx.artifact("weights_profile_train.csv"), prof.train, spec.label(),
                      prof.rho);
        write_profile(ctx.artifact("weights_profile_test.csv"), prof.test, spec.label(),
                      prof.rho);
    });
}
