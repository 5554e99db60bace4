#pragma once

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace hessmc {

inline constexpr const char* kVersion = "0.1.0";

/// Output could not be written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One CSV line. margin >= 0 means the check holds; NaN marks a purely
/// informational row, which always passes.
struct ReportRow {
    std::string suite;
    std::string model;
    int d = 0;
    double K = 0.0;
    double K1 = 0.0;
    double K2 = 0.0;
    double t = 0.0;
    int x_id = 0;
    std::string quantity;
    double estimate = 0.0;
    double std_error = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    bool pass = true;
};

struct ReportSummary {
    std::string suite;
    std::size_t n_pass = 0;
    std::size_t n_fail = 0;
    /// Smallest finite margin, NaN when no row has one.
    double worst_margin = 0.0;
};

ReportSummary summarize(const std::string& suite, const std::vector<ReportRow>& rows);

struct ReportHeader {
    std::string suite;
    std::string config_hash;
    std::uint64_t seed = 0;
};

/// "%.17g", with nan / inf / -inf spelled out.
std::string format_real(double x);

/// Header comment, column line and rows. Fields containing a comma or a
/// quote are quoted.
std::string render_csv(const ReportHeader& header, const std::vector<ReportRow>& rows);

/// {suite, n_pass, n_fail, worst_margin} plus any extra members.
nlohmann::json render_summary(const ReportSummary& summary, const nlohmann::json& extra);

/// Writes report.csv and summary.json into dir, creating it if needed.
void write_report(const std::filesystem::path& dir, const std::string& csv, const nlohmann::json& summary);

}  // namespace hessmc
