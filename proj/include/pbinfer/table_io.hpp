#ifndef PBINFER_TABLE_IO_HPP
#define PBINFER_TABLE_IO_HPP

#include <map>
#include <string>
#include <vector>

#include "pbinfer/simulation.hpp"

namespace pbinfer {

/// Formats with 10 significant digits ("%.10g").
std::string fmt_g10(double v);

/// The double closest to the 10-significant-digit decimal rendering of v.
double round10(double v);

std::string sim_report_csv(const std::vector<SimReport>& reports);
std::string sim_report_json(const std::vector<SimReport>& reports);

struct AnalyzeRow {
    std::string method;
    std::string coef;
    double estimate = 0.0, se = 0.0, ci_lower = 0.0, ci_upper = 0.0, re_vs_lab = 0.0;
};

struct AnalyzeReport {
    Family family = Family::linear;
    double level = 0.95;
    std::size_t n = 0, n_lab = 0;
    std::vector<std::string> coef_names;
    std::vector<std::string> methods;            // in output order
    std::map<std::string, Mat> cov;              // per method, rounded entries
    std::vector<AnalyzeRow> rows;
};

std::string analyze_report_csv(const AnalyzeReport& rep);
std::string analyze_report_json(const AnalyzeReport& rep);

struct DiagnoseReport {
    Family family = Family::linear;
    std::size_t n = 0, n_lab = 0;
    double sigma_y = 0.0, sigma_yhat = 0.0, rho = 0.0, threshold = 0.0;
    std::vector<std::string> coef_names;
    std::vector<double> delta_ppia_diag, delta_cc_diag;
    std::vector<char> ppia_efficient, cc_efficient;
    std::string recommended;
};

std::string diagnose_report_csv(const DiagnoseReport& rep);
std::string diagnose_report_json(const DiagnoseReport& rep);

// Minimal strict CSV: comma separators, no quoting, header required,
// '.' decimal point. Cell positions are reported with 1-based line numbers.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_no; // per data row
};

CsvTable read_csv_file(const std::string& path);

/// Strict finite-number parse; throws CsvError naming the line and column.
double parse_csv_number(const std::string& cell, std::size_t line, const std::string& col);

void write_text_file(const std::string& path, const std::string& content);

} // namespace pbinfer

#endif
