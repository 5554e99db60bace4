#include "hessmc/config.hpp"

#include "hessmc/types.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace hessmc {

using nlohmann::json;

namespace {

struct SuiteInfo {
    Suite suite;
    const char* name;
    const char* summary;
};

constexpr SuiteInfo kSuites[] = {
    {Suite::formula_gradient, "formula-gradient",
     "Monte Carlo gradient of P_T f against closed-form oracles"},
    {Suite::formula_hessian, "formula-hessian",
     "Monte Carlo Hessian of P_T f against closed-form oracles"},
    {Suite::bound_sweep, "bound-sweep",
     "observed Hess(u)/u against the main and clean Hessian bounds; Li gradient bound where an oracle exists"},
    {Suite::harnack, "harnack",
     "backward weak Harnack inequality on analytic solutions; closed-form exponent estimates on a parameter grid"},
    {Suite::eigen, "eigen",
     "pointwise and uniform eigenfunction Hessian bounds on the sphere; semigroup decay of phi"},
    {Suite::scalar_inequalities, "scalar-inequalities",
     "G <= T/3, sign of the auxiliary function, the e^K inequality and H, G quadrature checks"},
    {Suite::convergence, "convergence",
     "weak-error slope of the Hessian estimator over a step-doubling ladder; path-doubling error scaling"},
};

[[noreturn]] void fail(const std::string& field, const std::string& what)
{
    throw ConfigError(field + ": " + what);
}

std::string join_path(const std::string& parent, const std::string& key)
{
    return parent.empty() ? key : parent + "." + key;
}

std::string index_path(const std::string& parent, std::size_t i)
{
    return parent + "[" + std::to_string(i) + "]";
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            std::string list;
            for (const auto& k : allowed) list += (list.empty() ? "" : ", ") + k;
            fail(join_path(where, item.key()), "unknown key (allowed: " + list + ")");
        }
    }
}

double read_real(const json& v, const std::string& field)
{
    if (!v.is_number()) fail(field, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(field, "must be finite");
    return x;
}

double read_positive(const json& v, const std::string& field)
{
    const double x = read_real(v, field);
    if (!(x > 0.0)) fail(field, "must be positive");
    return x;
}

long long read_integer(const json& v, const std::string& field, long long lo, long long hi)
{
    if (!v.is_number_integer()) fail(field, "expected an integer");
    if (v.is_number_unsigned() && v.get<unsigned long long>() > static_cast<unsigned long long>(hi))
        fail(field, "must be at most " + std::to_string(hi));
    const long long x = v.get<long long>();
    if (x < lo || x > hi)
        fail(field, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
}

std::vector<double> read_real_array(const json& v, const std::string& field)
{
    if (!v.is_array()) fail(field, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(read_real(v[i], index_path(field, i)));
    return out;
}

Vec to_vec(const std::vector<double>& xs)
{
    Vec v(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) v(static_cast<Eigen::Index>(i)) = xs[i];
    return v;
}

ManifoldModel read_model(const json& v, const std::string& field)
{
    try {
        if (v.is_string()) return parse_model_spec(v.get<std::string>());
        if (!v.is_object()) fail(field, "expected a model object or a spec string like \"sphere:2:1\"");
        reject_unknown_keys(v, {"kind", "dimension", "curvature", "drift", "synthetic_h3"}, field);
        if (!v.contains("kind")) fail(join_path(field, "kind"), "required field missing");
        if (!v.contains("dimension")) fail(join_path(field, "dimension"), "required field missing");
        if (!v["kind"].is_string()) fail(join_path(field, "kind"), "expected a string");
        const ManifoldKind kind = parse_manifold_kind(v["kind"].get<std::string>());
        const int d = static_cast<int>(read_integer(v["dimension"], join_path(field, "dimension"), 1, kMaxDim));
        double curvature = kind == ManifoldKind::sphere ? 1.0 : kind == ManifoldKind::hyperbolic ? -1.0 : 0.0;
        if (v.contains("curvature")) curvature = read_real(v["curvature"], join_path(field, "curvature"));
        double drift = 0.0;
        if (v.contains("drift")) drift = read_real(v["drift"], join_path(field, "drift"));
        ManifoldModel model = ManifoldModel::make(kind, d, curvature, drift);
        if (v.contains("synthetic_h3"))
            model = model.with_synthetic_h3(read_real(v["synthetic_h3"], join_path(field, "synthetic_h3")));
        return model;
    } catch (const InputError& e) {
        fail(field, e.what());
    }
}

std::vector<ManifoldModel> read_models(const json& root, std::vector<ManifoldModel> defaults, bool single)
{
    if (root.contains("model") && root.contains("models"))
        fail("models", "give either 'model' or 'models', not both");
    if (root.contains("model")) return {read_model(root["model"], "model")};
    if (root.contains("models")) {
        if (single) fail("models", "this suite takes a single 'model'");
        const json& arr = root["models"];
        if (!arr.is_array() || arr.empty()) fail("models", "expected a non-empty array");
        std::vector<ManifoldModel> out;
        for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(read_model(arr[i], index_path("models", i)));
        return out;
    }
    return defaults;
}

Point read_point(const json& v, const ManifoldModel& model, const std::string& field)
{
    try {
        if (v.is_array()) {
            Point p{to_vec(read_real_array(v, field))};
            if (p.coords.size() != model.ambient_dimension())
                fail(field, "expected " + std::to_string(model.ambient_dimension()) + " coordinates for " +
                                model.describe());
            if (!on_manifold(model, p, 1e-10)) fail(field, "point does not lie on " + model.describe());
            return p;
        }
        if (v.is_object()) {
            reject_unknown_keys(v, {"distance", "angle"}, field);
            if (!v.contains("distance")) fail(join_path(field, "distance"), "required field missing");
            const double dist = read_real(v["distance"], join_path(field, "distance"));
            if (dist < 0.0) fail(join_path(field, "distance"), "must be >= 0");
            const double angle = v.contains("angle") ? read_real(v["angle"], join_path(field, "angle")) : 0.0;
            return point_at(model, dist, angle);
        }
    } catch (const InputError& e) {
        fail(field, e.what());
    }
    fail(field, "expected a coordinate array or {\"distance\", \"angle\"}");
}

std::vector<Point> read_points(const json& root, const std::string& key, const ManifoldModel& model,
                               const std::vector<std::pair<double, double>>& defaults)
{
    std::vector<Point> out;
    if (!root.contains(key)) {
        for (const auto& [dist, angle] : defaults) out.push_back(point_at(model, dist, angle));
        return out;
    }
    const json& arr = root[key];
    if (!arr.is_array() || arr.empty()) fail(key, "expected a non-empty array of points");
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(read_point(arr[i], model, index_path(key, i)));
    return out;
}

ScalarFunctional read_function(const json& root, const ManifoldModel& model)
{
    const std::string field = "function";
    if (!root.contains(field)) return ScalarFunctional::gaussian_bump(base_point(model).coords, 1.0, 1.0);
    const json& v = root[field];
    if (!v.is_object()) fail(field, "expected an object");
    if (!v.contains("kind")) fail(join_path(field, "kind"), "required field missing");
    if (!v["kind"].is_string()) fail(join_path(field, "kind"), "expected a string");
    const std::string kind = v["kind"].get<std::string>();
    try {
        ScalarFunctional f = ScalarFunctional::constant(1.0);
        if (kind == "gaussian_bump") {
            reject_unknown_keys(v, {"kind", "center", "width", "amplitude"}, field);
            const Point center = v.contains("center") ? read_point(v["center"], model, join_path(field, "center"))
                                                      : base_point(model);
            const double width = v.contains("width") ? read_positive(v["width"], join_path(field, "width")) : 1.0;
            const double amplitude =
                v.contains("amplitude") ? read_positive(v["amplitude"], join_path(field, "amplitude")) : 1.0;
            f = ScalarFunctional::gaussian_bump(center.coords, width, amplitude);
        } else if (kind == "sphere_linear") {
            reject_unknown_keys(v, {"kind", "direction", "offset"}, field);
            if (model.kind() != ManifoldKind::sphere)
                fail(join_path(field, "kind"), "sphere_linear needs a sphere model, got " + model.describe());
            Vec direction = Vec::Zero(model.ambient_dimension());
            direction(model.ambient_dimension() - 1) = 1.0;
            if (v.contains("direction")) {
                direction = to_vec(read_real_array(v["direction"], join_path(field, "direction")));
                if (direction.size() != model.ambient_dimension())
                    fail(join_path(field, "direction"),
                         "expected " + std::to_string(model.ambient_dimension()) + " coordinates");
                if (!(direction.norm() > 0.0)) fail(join_path(field, "direction"), "must be nonzero");
            }
            const double offset = v.contains("offset") ? read_real(v["offset"], join_path(field, "offset")) : 0.0;
            f = ScalarFunctional::sphere_linear(direction, offset);
        } else if (kind == "constant") {
            reject_unknown_keys(v, {"kind", "value"}, field);
            if (!v.contains("value")) fail(join_path(field, "value"), "required field missing");
            f = ScalarFunctional::constant(read_real(v["value"], join_path(field, "value")));
        } else {
            fail(join_path(field, "kind"), "unknown functional '" + kind +
                                               "' (expected gaussian_bump, sphere_linear or constant)");
        }
        f.check_compatible(model);
        return f;
    } catch (const InputError& e) {
        fail(field, e.what());
    }
}

std::vector<double> read_times(const json& root, const std::string& key, std::vector<double> defaults)
{
    if (!root.contains(key)) return defaults;
    const std::vector<double> ts = read_real_array(root[key], key);
    if (ts.empty()) fail(key, "expected a non-empty array");
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (!(ts[i] > 0.0)) fail(index_path(key, i), "must be positive");
    return ts;
}

std::set<std::string> allowed_keys(Suite suite)
{
    std::set<std::string> keys{"suite", "seed", "output"};
    auto add = [&](std::initializer_list<const char*> more) {
        for (const char* k : more) keys.insert(k);
    };
    switch (suite) {
    case Suite::formula_gradient:
    case Suite::formula_hessian:
        add({"model", "models", "function", "horizons", "points", "n_paths", "n_steps"});
        break;
    case Suite::bound_sweep:
        add({"model", "models", "function", "times", "points", "n_paths", "n_steps"});
        break;
    case Suite::harnack:
        add({"model", "models", "function", "n_triples", "time_range", "point_radius", "exponent_grid"});
        break;
    case Suite::eigen:
        add({"model", "function", "support_fraction", "polar_points", "azimuth_points", "constant_samples",
             "n_paths", "n_steps"});
        break;
    case Suite::scalar_inequalities:
        add({"grid", "k_range", "t_max", "sign_points", "sign_range"});
        break;
    case Suite::convergence:
        add({"model", "function", "horizon", "point", "n_paths", "n_steps", "rungs", "entry"});
        break;
    }
    return keys;
}

std::size_t read_n_paths(const json& root, bool required, std::size_t fallback)
{
    if (!root.contains("n_paths")) {
        if (required) fail("n_paths", "required field missing");
        return fallback;
    }
    return static_cast<std::size_t>(read_integer(root["n_paths"], "n_paths", 2, 1LL << 40));
}

void require_oracle_model(const ModelCase& c, const std::string& suite)
{
    const bool gaussian = c.model.kind() == ManifoldKind::euclidean &&
                          c.function.kind() == FunctionalKind::gaussian_bump && !c.model.synthetic_h3();
    const bool eigen = c.model.kind() == ManifoldKind::sphere && c.function.kind() == FunctionalKind::sphere_linear;
    if (!gaussian && !eigen)
        fail("model", suite + " needs a closed-form solution: euclidean with gaussian_bump or sphere with "
                              "sphere_linear, got " + c.model.describe() + " with " + to_string(c.function.kind()));
}

}  // namespace

std::string to_string(Suite suite)
{
    for (const auto& info : kSuites)
        if (info.suite == suite) return info.name;
    return "unknown";
}

Suite parse_suite(const std::string& name)
{
    for (const auto& info : kSuites)
        if (name == info.name) return info.suite;
    std::string list;
    for (const auto& info : kSuites) list += (list.empty() ? "" : ", ") + std::string(info.name);
    throw ConfigError("suite: unknown suite '" + name + "' (expected one of " + list + ")");
}

const std::vector<Suite>& all_suites()
{
    static const std::vector<Suite> suites = [] {
        std::vector<Suite> out;
        for (const auto& info : kSuites) out.push_back(info.suite);
        return out;
    }();
    return suites;
}

std::string suite_summary(Suite suite)
{
    for (const auto& info : kSuites)
        if (info.suite == suite) return info.summary;
    return {};
}

ManifoldModel parse_model_spec(const std::string& spec)
{
    std::vector<std::string> parts;
    std::stringstream in(spec);
    for (std::string part; std::getline(in, part, ':');) parts.push_back(part);
    if (parts.size() < 2 || parts.size() > 3 || spec.back() == ':')
        throw ConfigError("model: expected 'kind:dimension[:parameter]', got '" + spec + "'");
    try {
        const ManifoldKind kind = parse_manifold_kind(parts[0]);
        std::size_t used = 0;
        const int d = std::stoi(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("dimension");
        double param = kind == ManifoldKind::sphere ? 1.0 : kind == ManifoldKind::hyperbolic ? -1.0 : 0.0;
        if (parts.size() == 3) {
            param = std::stod(parts[2], &used);
            if (used != parts[2].size()) throw std::invalid_argument("parameter");
        }
        if (kind == ManifoldKind::euclidean) return ManifoldModel::make(kind, d, 0.0, param);
        return ManifoldModel::make(kind, d, param, 0.0);
    } catch (const InputError& e) {
        throw ConfigError("model: " + std::string(e.what()));
    } catch (const std::logic_error&) {
        throw ConfigError("model: cannot parse '" + spec + "' as 'kind:dimension[:parameter]'");
    }
}

std::string fnv1a_hex(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig parse_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: not valid JSON (") + e.what() + ")");
    }
    if (!root.is_object()) throw ConfigError("config: top level must be a JSON object");
    if (!root.contains("suite")) fail("suite", "required field missing");
    if (!root["suite"].is_string()) fail("suite", "expected a string");

    ExperimentConfig cfg;
    cfg.suite = parse_suite(root["suite"].get<std::string>());
    cfg.canonical = root.dump();
    reject_unknown_keys(root, allowed_keys(cfg.suite), "");

    if (root.contains("seed")) {
        const json& s = root["seed"];
        if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<long long>() < 0))
            fail("seed", "expected a non-negative integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (root.contains("output")) {
        if (!root["output"].is_string() || root["output"].get<std::string>().empty())
            fail("output", "expected a non-empty string");
        cfg.output = root["output"].get<std::string>();
    }
    if (root.contains("n_steps"))
        cfg.n_steps = static_cast<int>(read_integer(root["n_steps"], "n_steps", 1, 1 << 20));

    const std::string suite_name = to_string(cfg.suite);
    auto build_cases = [&](const std::vector<ManifoldModel>& models, const std::string& points_key,
                           const std::vector<std::pair<double, double>>& default_points) {
        for (const auto& m : models) {
            ModelCase c{m, read_function(root, m), read_points(root, points_key, m, default_points)};
            cfg.cases.push_back(std::move(c));
        }
    };

    switch (cfg.suite) {
    case Suite::formula_gradient:
    case Suite::formula_hessian: {
        cfg.n_paths = read_n_paths(root, true, 0);
        build_cases(read_models(root, {ManifoldModel::euclidean(1)}, false), "points", {{1.0, 0.0}});
        for (const auto& c : cfg.cases) require_oracle_model(c, suite_name);
        cfg.times = read_times(root, "horizons", {1.0});
        break;
    }
    case Suite::bound_sweep: {
        cfg.n_paths = read_n_paths(root, true, 0);
        build_cases(read_models(root,
                                {ManifoldModel::sphere(2), ManifoldModel::hyperbolic(2), ManifoldModel::hyperbolic(3),
                                 ManifoldModel::euclidean(1, 1.0), ManifoldModel::euclidean(2, 1.0)},
                                false),
                    "points", {{0.0, 0.0}, {0.3, 0.7}, {0.6, 0.7}, {1.0, 0.7}, {1.5, 0.7}});
        for (const auto& c : cfg.cases)
            if (!c.function.positive_on(c.model))
                fail("function", "bound-sweep needs f > 0 everywhere on " + c.model.describe());
        cfg.times = read_times(root, "times", {0.1, 0.25, 0.5, 1.0, 2.0});
        break;
    }
    case Suite::harnack: {
        build_cases(read_models(root, {ManifoldModel::euclidean(1, 1.0), ManifoldModel::euclidean(2, 1.0)}, false),
                    "", {});
        for (const auto& c : cfg.cases) {
            require_oracle_model(c, suite_name);
            if (!c.function.positive_on(c.model))
                fail("function", "harnack needs f > 0 everywhere on " + c.model.describe());
        }
        if (root.contains("n_triples"))
            cfg.n_triples = static_cast<int>(read_integer(root["n_triples"], "n_triples", 1, 1000000));
        if (root.contains("time_range")) {
            const auto tr = read_real_array(root["time_range"], "time_range");
            if (tr.size() != 2 || !(tr[0] > 0.0) || !(tr[1] > tr[0]))
                fail("time_range", "expected [t_min, t_max] with 0 < t_min < t_max");
            cfg.time_min = tr[0];
            cfg.time_max = tr[1];
        }
        if (root.contains("point_radius")) cfg.point_radius = read_positive(root["point_radius"], "point_radius");
        if (root.contains("exponent_grid"))
            cfg.exponent_grid = static_cast<int>(read_integer(root["exponent_grid"], "exponent_grid", 2, 100));
        break;
    }
    case Suite::eigen: {
        cfg.n_paths = read_n_paths(root, false, 100000);
        const auto models = read_models(root, {ManifoldModel::sphere(2)}, true);
        if (models[0].kind() != ManifoldKind::sphere) fail("model", "eigen needs a sphere model");
        json fn = root.contains("function") ? root["function"] : json{{"kind", "sphere_linear"}};
        json patched = root;
        patched["function"] = fn;
        ModelCase c{models[0], read_function(patched, models[0]), {}};
        if (c.function.kind() != FunctionalKind::sphere_linear || c.function.offset() != 0.0)
            fail("function", "eigen needs sphere_linear with offset 0 (an eigenfunction)");
        cfg.cases.push_back(std::move(c));
        if (root.contains("support_fraction")) {
            cfg.support_fraction = read_real(root["support_fraction"], "support_fraction");
            if (!(cfg.support_fraction > 0.0 && cfg.support_fraction <= 1.0))
                fail("support_fraction", "must lie in (0, 1]");
        }
        if (root.contains("polar_points"))
            cfg.polar_points = static_cast<int>(read_integer(root["polar_points"], "polar_points", 2, 10000));
        if (root.contains("azimuth_points"))
            cfg.azimuth_points = static_cast<int>(read_integer(root["azimuth_points"], "azimuth_points", 1, 10000));
        if (root.contains("constant_samples"))
            cfg.constant_samples =
                static_cast<int>(read_integer(root["constant_samples"], "constant_samples", 1000, 10000000));
        break;
    }
    case Suite::scalar_inequalities: {
        if (root.contains("grid")) cfg.grid = static_cast<int>(read_integer(root["grid"], "grid", 2, 10000));
        if (root.contains("k_range")) {
            const auto kr = read_real_array(root["k_range"], "k_range");
            if (kr.size() != 2 || !(kr[1] > kr[0])) fail("k_range", "expected [k_min, k_max] with k_min < k_max");
            cfg.k_min = kr[0];
            cfg.k_max = kr[1];
        }
        if (root.contains("t_max")) cfg.t_max = read_positive(root["t_max"], "t_max");
        if (root.contains("sign_points"))
            cfg.sign_points = static_cast<int>(read_integer(root["sign_points"], "sign_points", 2, 10000000));
        if (root.contains("sign_range")) cfg.sign_range = read_positive(root["sign_range"], "sign_range");
        break;
    }
    case Suite::convergence: {
        cfg.n_paths = read_n_paths(root, true, 0);
        const auto models = read_models(root, {ManifoldModel::euclidean(1)}, true);
        ModelCase c{models[0], read_function(root, models[0]), {}};
        c.points = root.contains("point") ? std::vector<Point>{read_point(root["point"], models[0], "point")}
                                          : std::vector<Point>{point_at(models[0], 1.0)};
        cfg.cases.push_back(std::move(c));
        cfg.times = {1.0};
        if (root.contains("horizon")) cfg.times = {read_positive(root["horizon"], "horizon")};
        if (root.contains("rungs")) cfg.rungs = static_cast<int>(read_integer(root["rungs"], "rungs", 2, 16));
        if (root.contains("entry")) {
            const json& e = root["entry"];
            if (!e.is_array() || e.size() != 2) fail("entry", "expected [i, j]");
            const int d = models[0].dimension();
            cfg.entry_i = static_cast<int>(read_integer(e[0], "entry[0]", 0, d - 1));
            cfg.entry_j = static_cast<int>(read_integer(e[1], "entry[1]", 0, d - 1));
        }
        break;
    }
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

}  // namespace hessmc
