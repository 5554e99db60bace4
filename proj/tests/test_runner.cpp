#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hessmc/config.hpp"
#include "hessmc/report.hpp"
#include "hessmc/suites.hpp"
#include "hessmc/types.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

using namespace hessmc;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text)
{
    try {
        (void)parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

std::string csv_of(const ExperimentConfig& cfg, int threads)
{
    const SuiteResult r = run_suite(cfg, threads);
    return render_csv({to_string(cfg.suite), fnv1a_hex(cfg.canonical), cfg.seed}, r.rows);
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("suite names round-trip")
{
    for (Suite s : all_suites()) {
        CHECK(parse_suite(to_string(s)) == s);
        CHECK_FALSE(suite_summary(s).empty());
    }
    CHECK(all_suites().size() == 7);
    CHECK_THROWS_AS(parse_suite("no-such-suite"), ConfigError);
}

TEST_CASE("model specs")
{
    const auto s = parse_model_spec("sphere:2");
    CHECK(s.kind() == ManifoldKind::sphere);
    CHECK(s.dimension() == 2);
    CHECK(s.curvature() == 1.0);
    const auto s4 = parse_model_spec("sphere:3:4");
    CHECK(s4.curvature() == 4.0);
    CHECK(parse_model_spec("hyperbolic:3:-0.5").curvature() == -0.5);
    CHECK(parse_model_spec("euclidean:2:1.5").drift_coefficient() == 1.5);
    CHECK(parse_model_spec("euclidean:1").drift_coefficient() == 0.0);
    for (const char* bad : {"", "sphere", "sphere:x", "sphere:2:", "torus:2", "sphere:0", "sphere:2:-1",
                            "hyperbolic:2:1", "sphere:2:1:3", "sphere:2.5"})
        CHECK_THROWS_AS(parse_model_spec(bad), ConfigError);
    // spec strings round-trip through describe()
    for (const char* ok : {"sphere:2:1", "hyperbolic:3:-0.5", "euclidean:2:1.5", "euclidean:1:0"})
        CHECK(parse_model_spec(ok).describe() == ok);
}

TEST_CASE("config errors name the field")
{
    CHECK(starts_with(error_of(R"({"suite": "formula-hessian"})"), "n_paths"));
    CHECK(error_of(R"({"suite": "formula-hessian"})").find("required") != std::string::npos);
    CHECK(starts_with(error_of(R"({"n_paths": 10})"), "suite"));
    CHECK(starts_with(error_of(R"({"suite": "formula-hessian", "n_paths": 10, "bogus": 1})"), "bogus"));
    CHECK(starts_with(error_of(R"({"suite": "formula-hessian", "n_paths": 1})"), "n_paths"));
    CHECK(starts_with(error_of(R"({"suite": "formula-hessian", "n_paths": 10.5})"), "n_paths"));
    CHECK(starts_with(error_of(R"({"suite": "formula-hessian", "n_paths": 10, "n_steps": 0})"), "n_steps"));
    CHECK(starts_with(error_of(R"({"suite": "formula-hessian", "n_paths": 10, "horizons": [-1]})"), "horizons"));
    CHECK(starts_with(error_of(R"({"suite": "formula-hessian", "n_paths": 10, "model": "hyperbolic:2"})"), "model"));
    CHECK(starts_with(error_of(R"({"suite": "formula-hessian", "n_paths": 10, "model": "torus:2"})"), "model"));
    CHECK(starts_with(error_of(R"({"suite": "formula-hessian", "n_paths": 10, "points": [[1, 2]]})"), "points[0]"));
    CHECK(starts_with(error_of(R"({"suite": "eigen", "model": "euclidean:2"})"), "model"));
    CHECK(starts_with(error_of(R"({"suite": "eigen", "n_paths": 10, "constant_samples": 500})"), "constant_samples"));
    CHECK(starts_with(error_of(R"({"suite": "bound-sweep", "n_paths": 10, "function": {"kind": "sphere_linear"}})"),
                      "function"));
    CHECK(starts_with(error_of(R"({"suite": "scalar-inequalities", "grid": 0})"), "grid"));
    CHECK(starts_with(error_of(R"({"suite": "scalar-inequalities", "n_paths": 10})"), "n_paths"));
    CHECK(starts_with(error_of(R"({"suite": "scalar-inequalities", "seed": -3})"), "seed"));
    CHECK(!error_of("{not json").empty());
    CHECK(!error_of("[1, 2]").empty());
    CHECK_THROWS_AS(load_config("/nonexistent/dir/config.json"), ConfigError);
}

TEST_CASE("config defaults and explicit values")
{
    const ExperimentConfig scalar = parse_config(R"({"suite": "scalar-inequalities"})");
    CHECK(scalar.suite == Suite::scalar_inequalities);
    CHECK(scalar.grid == 100);
    CHECK(scalar.seed == 1);

    // a sphere with the default bump has no closed form to compare against
    const std::string err = error_of(R"({"suite": "formula-gradient", "n_paths": 1000,
        "models": ["euclidean:2", {"kind": "sphere", "dimension": 2}]})");
    CHECK(!err.empty());
}

TEST_CASE("config resolves cases")
{
    const ExperimentConfig f = parse_config(R"({
        "suite": "formula-gradient",
        "models": ["euclidean:2", "euclidean:1:0.5"],
        "points": [{"distance": 0.5, "angle": 1.0}, {"distance": 0}],
        "horizons": [0.5, 2],
        "n_paths": 1000, "n_steps": 64, "seed": 99})");
    REQUIRE(f.cases.size() == 2);
    CHECK(f.cases[0].points.size() == 2);
    CHECK(f.cases[1].model.drift_coefficient() == 0.5);
    CHECK(f.times == std::vector<double>{0.5, 2.0});
    CHECK(f.n_paths == 1000);
    CHECK(f.n_steps == 64);
    CHECK(f.seed == 99);
    CHECK(!f.canonical.empty());
    // key order does not change the canonical form
    const ExperimentConfig g = parse_config(R"({"seed": 99, "n_steps": 64, "n_paths": 1000,
        "horizons": [0.5, 2], "points": [{"distance": 0.5, "angle": 1.0}, {"distance": 0}],
        "models": ["euclidean:2", "euclidean:1:0.5"], "suite": "formula-gradient"})");
    CHECK(g.canonical == f.canonical);
    CHECK(fnv1a_hex(f.canonical).size() == 16);
}

TEST_CASE("hash and number formatting")
{
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(format_real(1.0) == "1");
    CHECK(format_real(-0.0) == "0");
    CHECK(format_real(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_real(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_real(1e300) == "1.0000000000000001e+300");
}

TEST_CASE("csv layout and quoting")
{
    ReportRow r;
    r.suite = "harnack";
    r.model = "sphere:2:1";
    r.d = 2;
    r.K = -1;
    r.K1 = 1;
    r.quantity = "a,\"b\"";
    r.estimate = 0.5;
    r.std_error = 0;
    r.bound = 1;
    r.margin = 0.5;
    const std::string csv = render_csv({"harnack", "0123456789abcdef", 5}, {r});
    std::istringstream in(csv);
    std::string header, columns, row;
    std::getline(in, header);
    std::getline(in, columns);
    std::getline(in, row);
    CHECK(starts_with(header, "# hessmc 0.1.0"));
    CHECK(header.find("config_hash 0123456789abcdef") != std::string::npos);
    CHECK(header.find("seed 5") != std::string::npos);
    CHECK(columns == "suite,model,d,K,K1,K2,t,x_id,quantity,estimate,std_error,bound,margin,pass");
    CHECK(row == "harnack,sphere:2:1,2,-1,1,0,0,0,\"a,\"\"b\"\"\",0.5,0,1,0.5,true");
}

TEST_CASE("summary counts and worst margin")
{
    std::vector<ReportRow> rows(4);
    rows[0].margin = 0.3;
    rows[1].margin = -0.2;
    rows[1].pass = false;
    rows[2].margin = std::numeric_limits<double>::quiet_NaN();
    rows[3].margin = 1.0;
    const ReportSummary s = summarize("x", rows);
    CHECK(s.n_pass == 3);
    CHECK(s.n_fail == 1);
    CHECK(s.worst_margin == -0.2);
    const auto j = render_summary(s, {{"seed", 4}});
    CHECK(j["suite"] == "x");
    CHECK(j["n_pass"] == 3);
    CHECK(j["n_fail"] == 1);
    CHECK(j["worst_margin"] == -0.2);
    CHECK(j["seed"] == 4);

    const ReportSummary none = summarize("x", {rows[2]});
    CHECK(std::isnan(none.worst_margin));
    CHECK(render_summary(none, nlohmann::json::object())["worst_margin"].is_null());
}

TEST_CASE("report files")
{
    const fs::path dir = fs::temp_directory_path() / "hessmc_test_runner" / "nested";
    fs::remove_all(dir.parent_path());
    write_report(dir, "csv\n", {{"suite", "x"}});
    CHECK(slurp(dir / "report.csv") == "csv\n");
    CHECK(nlohmann::json::parse(slurp(dir / "summary.json"))["suite"] == "x");
    // a regular file where the directory should be
    std::ofstream(dir.parent_path() / "blocker") << "x";
    CHECK_THROWS_AS(write_report(dir.parent_path() / "blocker" / "sub", "", {}), IoError);
    fs::remove_all(dir.parent_path());
}

TEST_CASE("scalar suite passes on defaults")
{
    const ExperimentConfig cfg = parse_config(R"({"suite": "scalar-inequalities", "grid": 30, "sign_points": 501})");
    const SuiteResult r = run_suite(cfg, 1);
    const ReportSummary s = summarize("scalar-inequalities", r.rows);
    CHECK(s.n_fail == 0);
    CHECK(s.n_pass == r.rows.size());
    CHECK(r.rows.size() == 4 * 30 * 30 + 501);
}

TEST_CASE("formula-hessian default case passes")
{
    const ExperimentConfig cfg = parse_config(R"({"suite": "formula-hessian", "n_paths": 100000, "n_steps": 200, "seed": 7})");
    const SuiteResult r = run_suite(cfg, 0);
    const ReportSummary s = summarize("formula-hessian", r.rows);
    CHECK(r.rows.size() == 2);
    CHECK(s.n_fail == 0);
    for (const auto& row : r.rows) {
        CHECK(row.model == "euclidean:1:0");
        CHECK(row.t == 1.0);
        CHECK(row.std_error > 0.0);
    }
}

TEST_CASE("harnack and eigen suites pass on small grids")
{
    const SuiteResult h = run_suite(parse_config(R"({"suite": "harnack", "n_triples": 10, "exponent_grid": 4})"), 1);
    CHECK(summarize("harnack", h.rows).n_fail == 0);
    const SuiteResult e = run_suite(
        parse_config(R"({"suite": "eigen", "polar_points": 7, "azimuth_points": 4, "n_paths": 20000, "n_steps": 50})"), 1);
    CHECK(summarize("eigen", e.rows).n_fail == 0);
    CHECK(e.extra.contains("eigenvalue"));
}

TEST_CASE("csv is byte-identical across thread counts")
{
    const ExperimentConfig cfg = parse_config(R"({
        "suite": "bound-sweep", "models": ["sphere:2:1", "euclidean:1:1"],
        "times": [0.25, 1], "points": [{"distance": 0.3, "angle": 0.7}],
        "n_paths": 3000, "n_steps": 40, "seed": 5})");
    const std::string one = csv_of(cfg, 1);
    CHECK(one == csv_of(cfg, 3));
    CHECK(one == csv_of(cfg, 8));

    const ExperimentConfig conv = parse_config(R"({"suite": "convergence", "n_paths": 4096, "rungs": 3})");
    CHECK(csv_of(conv, 1) == csv_of(conv, 4));
}
