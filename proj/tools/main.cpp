#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kmselect/covariance.hpp"
#include "kmselect/errors.hpp"
#include "kmselect/inference.hpp"
#include "kmselect/io.hpp"
#include "kmselect/kmeans.hpp"
#include "kmselect/simulation.hpp"
#include "kmselect/variance.hpp"

using nlohmann::json;
using namespace kmselect;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

json make_manifest(const std::string& command, const json& flags,
                   const std::vector<std::string>& inputs, std::uint64_t seed) {
    json digests = json::object();
    for (const auto& path : inputs)
        digests[path] = fnv1a_file_digest(path);
    return json{{"command", command},
                {"flags", flags},
                {"version", KMSELECT_VERSION},
                {"seed", seed},
                {"input_digests", digests},
                {"timestamp", iso_timestamp()}};
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open output file: " + out_path);
        out << j.dump(2) << "\n";
    }
}

struct TestOptions {
    std::string data_path;
    int k = 0;
    std::vector<int> pair;  // 1-based
    bool all_pairs = false;
    std::optional<double> sigma;
    std::string sigma_estimator;
    std::string cov_path;
    double ridge = 0.0;
    bool whiten_flag = false;
    std::uint64_t seed = 1;
    int max_iter = 50;
    std::string out_path;
};

int run_test(const TestOptions& opt) {
    if (opt.pair.empty() == !opt.all_pairs) {
        std::cerr << "error: exactly one of --pair or --all-pairs is required\n";
        return kExitUsage;
    }
    if (!opt.pair.empty() && opt.pair[0] == opt.pair[1]) {
        std::cerr << "error: --pair clusters must differ\n";
        return kExitUsage;
    }
    const bool has_sigma = opt.sigma.has_value();
    const bool has_est = !opt.sigma_estimator.empty();
    const bool has_cov = !opt.cov_path.empty();
    if (opt.whiten_flag) {
        if (!has_cov) {
            std::cerr << "error: --whiten requires --cov\n";
            return kExitUsage;
        }
        if (has_sigma || has_est) {
            std::cerr << "error: --whiten tests the whitened data with sigma = 1\n";
            return kExitUsage;
        }
    } else if (has_sigma + has_est + has_cov != 1) {
        std::cerr << "error: choose one of --sigma, --sigma-estimator, or --cov\n";
        return kExitUsage;
    }

    DataMatrix x = read_csv(opt.data_path);
    if (x.n() < opt.k) {
        std::cerr << "error: need at least K rows, got " << x.n() << " for K = " << opt.k
                  << "\n";
        return kExitData;
    }
    std::vector<std::string> inputs{opt.data_path};

    std::optional<CovarianceFactors> factors;
    if (has_cov) {
        DataMatrix cov = read_csv(opt.cov_path);
        if (cov.n() != x.q() || cov.q() != x.q()) {
            std::cerr << "error: covariance must be " << x.q() << "x" << x.q() << "\n";
            return kExitData;
        }
        factors = factorize(cov.values(), opt.ridge);
        inputs.push_back(opt.cov_path);
    }
    if (opt.whiten_flag) x = whiten(x, *factors);

    ClusterTrace trace = lloyd(x, opt.k, opt.max_iter, opt.seed);

    std::vector<std::pair<int, int>> pairs;  // 0-based
    if (opt.all_pairs) {
        for (int a = 0; a < opt.k; ++a)
            for (int b = a + 1; b < opt.k; ++b) pairs.emplace_back(a, b);
    } else {
        if (opt.pair[0] < 1 || opt.pair[0] > opt.k || opt.pair[1] < 1 ||
            opt.pair[1] > opt.k) {
            std::cerr << "error: --pair indices must be in 1.." << opt.k << "\n";
            return kExitUsage;
        }
        pairs.emplace_back(opt.pair[0] - 1, opt.pair[1] - 1);
    }

    double sigma_value = 1.0;
    SigmaSource source = SigmaSource::Known;
    if (has_sigma) {
        sigma_value = *opt.sigma;
    } else if (has_est) {
        const SigmaEstimate est =
            opt.sigma_estimator == "med" ? sigma_med(x) : sigma_sample(x);
        if (est.degenerate) throw NumericalError("degenerate scale estimate");
        sigma_value = est.value;
        source = opt.sigma_estimator == "med" ? SigmaSource::Med : SigmaSource::Sample;
    } else if (opt.whiten_flag) {
        sigma_value = 1.0;
    }

    json results = json::array();
    for (const auto& [a, b] : pairs) {
        SelectiveTestResult res =
            (has_cov && !opt.whiten_flag)
                ? p_sigma_selective(x, trace, a, b, factors->inv_sqrt, factors->sqrt)
                : (source == SigmaSource::Known
                       ? p_selective(x, trace, a, b, sigma_value)
                       : p_selective_estimated(x, trace, a, b, sigma_value, source));
        json entry = result_to_json(res);
        ContrastContext ctx(x, trace.assignments.back(), a, b);
        entry["p_naive"] = p_naive(ctx, x.q(), (has_cov && !opt.whiten_flag) ? 1.0 : sigma_value);
        results.push_back(std::move(entry));
    }

    json flags{{"k", opt.k},
               {"all_pairs", opt.all_pairs},
               {"sigma", has_sigma ? json(*opt.sigma) : json(nullptr)},
               {"sigma_estimator", opt.sigma_estimator},
               {"cov", opt.cov_path},
               {"ridge", opt.ridge},
               {"whiten", opt.whiten_flag},
               {"seed", opt.seed},
               {"max_iter", opt.max_iter}};
    if (!opt.pair.empty()) flags["pair"] = opt.pair;
    json out{{"schema", 1},
             {"manifest", make_manifest("test", flags, inputs, opt.seed)},
             {"labels_base", 1},
             {"results", results}};
    emit(out, opt.out_path);
    return kExitOk;
}

struct SimulateOptions {
    std::string mode;
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
};

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value,
               const std::string& where) {
    try {
        if (key == "model") {
            if (value == "global_null") cfg.model = Model::GlobalNull;
            else if (value == "spike") cfg.model = Model::Spike;
            else if (value == "ortho_theta") cfg.model = Model::OrthoTheta;
            else throw std::invalid_argument("unknown model '" + value + "'");
        } else if (key == "n") cfg.n = std::stoi(value);
        else if (key == "q") cfg.q = std::stoi(value);
        else if (key == "K") cfg.K = std::stoi(value);
        else if (key == "t_max") cfg.t_max = std::stoi(value);
        else if (key == "sigma") cfg.sigma = std::stod(value);
        else if (key == "delta") cfg.delta = std::stod(value);
        else if (key == "replicates") cfg.replicates = std::stoi(value);
        else if (key == "alpha") cfg.alpha = std::stod(value);
        else if (key == "base_seed") cfg.base_seed = std::stoull(value);
        else if (key == "method") {
            if (value == "selective") cfg.method = PValueMethod::SelectiveKnown;
            else if (value == "selective_med") cfg.method = PValueMethod::SelectiveMed;
            else if (value == "selective_sample") cfg.method = PValueMethod::SelectiveSample;
            else if (value == "naive") cfg.method = PValueMethod::Naive;
            else throw std::invalid_argument("unknown method '" + value + "'");
        } else if (key == "pair_policy") {
            if (value == "random") cfg.pair_policy = PairPolicy::RandomPair;
            else if (value == "all") cfg.pair_policy = PairPolicy::AllPairs;
            else throw std::invalid_argument("unknown pair_policy '" + value + "'");
        } else {
            throw std::invalid_argument("unknown key '" + key + "'");
        }
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(where + ": " + e.what());
    } catch (const std::out_of_range&) {
        throw std::invalid_argument(where + ": value out of range for '" + key + "'");
    }
}

ExperimentConfig load_config(const SimulateOptions& opt) {
    ExperimentConfig cfg;
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) throw std::runtime_error("cannot open config file: " + opt.config_path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto eq = line.find('=');
            std::string trimmed = line;
            trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
            if (trimmed.empty()) continue;
            if (eq == std::string::npos)
                throw std::invalid_argument(opt.config_path + ":" +
                                            std::to_string(lineno) + ": expected key = value");
            auto strip = [](std::string s) {
                s.erase(0, s.find_first_not_of(" \t\r"));
                const auto last = s.find_last_not_of(" \t\r");
                s.erase(last == std::string::npos ? 0 : last + 1);
                return s;
            };
            apply_key(cfg, strip(line.substr(0, eq)), strip(line.substr(eq + 1)),
                      opt.config_path + ":" + std::to_string(lineno));
        }
    }
    for (const auto& kv : opt.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        apply_key(cfg, kv.substr(0, eq), kv.substr(eq + 1), "--set " + kv);
    }
    cfg.validate();
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    return json{{"model", model_name(cfg.model)},
                {"n", cfg.n},
                {"q", cfg.q},
                {"K", cfg.K},
                {"t_max", cfg.t_max},
                {"sigma", cfg.sigma},
                {"delta", cfg.delta},
                {"replicates", cfg.replicates},
                {"alpha", cfg.alpha},
                {"base_seed", cfg.base_seed},
                {"method", method_name(cfg.method)},
                {"pair_policy", cfg.pair_policy == PairPolicy::AllPairs ? "all" : "random"}};
}

void write_pvalues_csv(const std::vector<ReplicateRecord>& records,
                       const std::string& method, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "replicate,method,p,stat,recovered\n";
    for (const auto& rec : records)
        out << rec.replicate << "," << method << "," << format_double(rec.p) << ","
            << format_double(rec.stat) << "," << (rec.recovered ? 1 : 0) << "\n";
}

void write_qq_csv(std::vector<double> pvalues, const std::string& path) {
    std::sort(pvalues.begin(), pvalues.end());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "uniform_quantile,p\n";
    const std::size_t m = pvalues.size();
    for (std::size_t i = 0; i < m; ++i)
        out << format_double((i + 0.5) / static_cast<double>(m)) << ","
            << format_double(pvalues[i]) << "\n";
}

int run_simulate(const SimulateOptions& opt) {
    ExperimentConfig cfg = load_config(opt);
    std::filesystem::create_directories(opt.out_dir);
    const std::string prefix = opt.out_dir + "/";

    json flags{{"mode", opt.mode},
               {"config", opt.config_path},
               {"set", opt.overrides},
               {"out_dir", opt.out_dir},
               {"resolved", config_to_json(cfg)}};
    std::vector<std::string> inputs;
    if (!opt.config_path.empty()) inputs.push_back(opt.config_path);
    json manifest = make_manifest("simulate " + opt.mode, flags, inputs, cfg.base_seed);

    json report{{"schema", 1}, {"manifest", manifest}, {"config", config_to_json(cfg)}};
    std::vector<ReplicateRecord> records;
    std::vector<double> pvalues;
    if (opt.mode == "type1") {
        Type1Report rep = run_type1(cfg);
        records = std::move(rep.records);
        pvalues = std::move(rep.pvalues);
        report["rejection_rate"] = rep.rejection_rate;
        report["ks_distance"] = rep.ks_distance;
        report["ks_critical_1pct"] = ks_critical_value(pvalues.size(), 0.01);
        report["reseeds"] = rep.reseeds;
    } else {
        PowerReport rep = run_power(cfg);
        records = std::move(rep.records);
        for (const auto& rec : records) pvalues.push_back(rec.p);
        report["detection_probability"] = rep.detection_probability;
        report["conditional_power"] = rep.conditional_power;
        report["conditional_power_se"] = rep.conditional_power_se;
        report["accepted_replicates"] = rep.accepted_replicates;
        report["reseeds"] = rep.reseeds;
    }
    write_pvalues_csv(records, method_name(cfg.method), prefix + "pvalues.csv");
    write_qq_csv(pvalues, prefix + "qq.csv");
    emit(report, prefix + "report.json");
    std::cout << "wrote " << prefix << "pvalues.csv, qq.csv, report.json\n";
    return kExitOk;
}

struct EstimateOptions {
    std::string data_path;
    std::string method = "med";
    std::string out_path;
};

int run_estimate(const EstimateOptions& opt) {
    DataMatrix x = read_csv(opt.data_path);
    SigmaEstimate est;
    if (opt.method == "med") est = sigma_med(x);
    else if (opt.method == "med-uncentered") est = sigma_med_uncentered(x);
    else est = sigma_sample(x);
    json flags{{"method", opt.method}};
    json out{{"schema", 1},
             {"manifest", make_manifest("estimate-sigma", flags, {opt.data_path}, 0)},
             {"method", sigma_method_name(est.method)},
             {"sigma", est.value},
             {"n", est.n},
             {"q", est.q},
             {"degenerate", est.degenerate}};
    emit(out, opt.out_path);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Selective inference for differences of k-means cluster means"};
    app.require_subcommand(1);
    app.set_version_flag("--version", KMSELECT_VERSION);

    TestOptions test_opt;
    auto* test_cmd = app.add_subcommand("test", "Selective test on a CSV dataset");
    test_cmd->add_option("data", test_opt.data_path, "Input CSV, rows are observations")
        ->required();
    test_cmd->add_option("--k", test_opt.k, "Number of clusters")->required()
        ->check(CLI::Range(2, 1000000));
    test_cmd->add_option("--pair", test_opt.pair, "1-based cluster pair to test")
        ->expected(2);
    test_cmd->add_flag("--all-pairs", test_opt.all_pairs, "Test every cluster pair");
    auto* sigma_opt = test_cmd->add_option("--sigma", test_opt.sigma, "Known noise scale");
    test_cmd->add_option("--sigma-estimator", test_opt.sigma_estimator,
                         "Estimate the scale from the data")
        ->check(CLI::IsMember({"med", "sample"}))
        ->excludes(sigma_opt);
    test_cmd->add_option("--cov", test_opt.cov_path, "Known covariance CSV (q x q)");
    test_cmd->add_option("--ridge", test_opt.ridge, "Eigenvalue ridge for --cov")
        ->check(CLI::NonNegativeNumber);
    test_cmd->add_flag("--whiten", test_opt.whiten_flag,
                       "Whiten by --cov, then test spherically with sigma = 1");
    test_cmd->add_option("--seed", test_opt.seed, "Clustering seed");
    test_cmd->add_option("--max-iter", test_opt.max_iter, "Lloyd iteration cap")
        ->check(CLI::PositiveNumber);
    test_cmd->add_option("--out", test_opt.out_path, "Write JSON here instead of stdout");

    SimulateOptions sim_opt;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo calibration and power runs");
    sim_cmd->add_option("mode", sim_opt.mode, "type1 or power")
        ->required()
        ->check(CLI::IsMember({"type1", "power"}));
    sim_cmd->add_option("--config", sim_opt.config_path, "key = value config file");
    sim_cmd->add_option("--set", sim_opt.overrides, "Override a config key (key=value)");
    sim_cmd->add_option("--out-dir", sim_opt.out_dir, "Output directory");

    EstimateOptions est_opt;
    auto* est_cmd = app.add_subcommand("estimate-sigma", "Noise scale estimators");
    est_cmd->add_option("data", est_opt.data_path, "Input CSV")->required();
    est_cmd->add_option("--method", est_opt.method, "Estimator")
        ->check(CLI::IsMember({"med", "med-uncentered", "sample"}));
    est_cmd->add_option("--out", est_opt.out_path, "Write JSON here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (test_cmd->parsed()) return run_test(test_opt);
        if (sim_cmd->parsed()) return run_simulate(sim_opt);
        return run_estimate(est_opt);
    } catch (const EmptyClusterError& e) {
        std::cerr << "error: " << e.what() << " (try another --seed)\n";
        return kExitNumerical;
    } catch (const DegenerateContrastError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
