#include "hessmc/report.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <system_error>

namespace hessmc {

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

ReportSummary summarize(const std::string& suite, const std::vector<ReportRow>& rows)
{
    ReportSummary s;
    s.suite = suite;
    s.worst_margin = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : rows) {
        (r.pass ? s.n_pass : s.n_fail) += 1;
        if (std::isfinite(r.margin) && !(r.margin >= s.worst_margin)) s.worst_margin = r.margin;
    }
    return s;
}

std::string format_real(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) x = 0.0;  // no "-0"
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string render_csv(const ReportHeader& header, const std::vector<ReportRow>& rows)
{
    std::string out;
    out += "# hessmc " + std::string(kVersion) + " eigen " + std::to_string(EIGEN_WORLD_VERSION) + "." +
           std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION) + " boost " +
           std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) +
           " suite " + header.suite + " config_hash " + header.config_hash + " seed " +
           std::to_string(header.seed) + "\n";
    out += "suite,model,d,K,K1,K2,t,x_id,quantity,estimate,std_error,bound,margin,pass\n";
    for (const auto& r : rows) {
        out += csv_field(r.suite) + ',' + csv_field(r.model) + ',' + std::to_string(r.d) + ',' +
               format_real(r.K) + ',' + format_real(r.K1) + ',' + format_real(r.K2) + ',' + format_real(r.t) +
               ',' + std::to_string(r.x_id) + ',' + csv_field(r.quantity) + ',' + format_real(r.estimate) + ',' +
               format_real(r.std_error) + ',' + format_real(r.bound) + ',' + format_real(r.margin) + ',' +
               (r.pass ? "true" : "false") + '\n';
    }
    return out;
}

nlohmann::json render_summary(const ReportSummary& summary, const nlohmann::json& extra)
{
    nlohmann::json j = nlohmann::json::object();
    if (extra.is_object()) j = extra;
    j["suite"] = summary.suite;
    j["n_pass"] = summary.n_pass;
    j["n_fail"] = summary.n_fail;
    j["worst_margin"] = std::isfinite(summary.worst_margin) ? nlohmann::json(summary.worst_margin) : nlohmann::json();
    return j;
}

void write_report(const std::filesystem::path& dir, const std::string& csv, const nlohmann::json& summary)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw IoError("cannot create output directory '" + dir.string() + "'" + (ec ? ": " + ec.message() : ""));
    write_file(dir / "report.csv", csv);
    write_file(dir / "summary.json", summary.dump(2) + "\n");
}

}  // namespace hessmc
