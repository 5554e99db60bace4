#include "hessmc/config.hpp"
#include "hessmc/geometry.hpp"
#include "hessmc/report.hpp"
#include "hessmc/suites.hpp"
#include "hessmc/types.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace {

enum ExitCode : int {
    kOk = 0,
    kChecksFailed = 1,
    kConfigError = 2,
    kEstimatorError = 3,
    kIoError = 4,
};

int run_command(const std::string& config_path, const std::optional<std::string>& out_dir,
                int threads, const std::optional<std::uint64_t>& seed)
{
    using namespace hessmc;
    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    if (seed) cfg.seed = *seed;
    const std::filesystem::path dir = out_dir ? *out_dir : cfg.output;

    SuiteResult result;
    try {
        result = run_suite(cfg, threads);
    } catch (const InputError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kConfigError;
    } catch (const EstimatorError& e) {
        std::cerr << "estimator failure: " << e.what() << "\n";
        return kEstimatorError;
    }

    const std::string suite = to_string(cfg.suite);
    const ReportSummary summary = summarize(suite, result.rows);
    nlohmann::json extra = result.extra;
    extra["seed"] = cfg.seed;
    extra["config_hash"] = fnv1a_hex(cfg.canonical);
    extra["version"] = kVersion;
    try {
        write_report(dir, render_csv({suite, fnv1a_hex(cfg.canonical), cfg.seed}, result.rows),
                     render_summary(summary, extra));
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIoError;
    }
    std::cout << suite << ": " << summary.n_pass << " passed, " << summary.n_fail << " failed, worst margin "
              << format_real(summary.worst_margin) << " -> " << (dir / "report.csv").string() << "\n";
    return summary.n_fail == 0 ? kOk : kChecksFailed;
}

int print_constants(const std::string& spec)
{
    using namespace hessmc;
    ManifoldModel model = ManifoldModel::euclidean(1);
    try {
        model = parse_model_spec(spec);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    const CurvatureConstants c = curvature_constants(model);
    const CurvatureConstants b = brute_force_constants(model, 4000);
    std::cout << "model " << model.describe() << "\n"
              << "K  " << format_real(c.K) << "   (sampled " << format_real(b.K) << ")\n"
              << "K1 " << format_real(c.K1) << "   (sampled " << format_real(b.K1) << ")\n"
              << "K2 " << format_real(c.K2) << "   (sampled " << format_real(b.K2) << ")\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Monte Carlo derivative formulas and Hessian bounds on model manifolds"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run one suite from a JSON config");
    std::string config_path;
    std::optional<std::string> out_dir;
    int threads = 0;
    std::optional<std::uint64_t> seed;
    run->add_option("--config", config_path, "JSON config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides the config)");
    run->add_option("--threads", threads, "OpenMP threads, 0 for the default")->check(CLI::NonNegativeNumber);
    run->add_option("--seed", seed, "seed (overrides the config)");

    auto* list = app.add_subcommand("list-suites", "list the available suites");

    auto* constants = app.add_subcommand("print-constants", "print K, K1, K2 for a model");
    std::string model_spec;
    constants->add_option("--model", model_spec, "kind:dimension[:parameter], e.g. sphere:2:1")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) return run_command(config_path, out_dir, threads, seed);
        if (*list) {
            for (auto s : hessmc::all_suites())
                std::cout << hessmc::to_string(s) << "\t" << hessmc::suite_summary(s) << "\n";
            return kOk;
        }
        if (*constants) return print_constants(model_spec);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kEstimatorError;
    }
    return kConfigError;
}
