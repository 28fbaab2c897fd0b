#include "pbinfer/table_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace pbinfer {

std::string fmt_g10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

double round10(double v) {
    return std::strtod(fmt_g10(v).c_str(), nullptr);
}

namespace {

using ordered_json = nlohmann::ordered_json;

// JSON numbers carry the same 10-significant-digit rounding as the CSV.
inline double j10(double v) { return round10(v); }

void sim_cell_fields(const SimReport& rep, const SimCell& c,
                     const std::function<void(const char*, const std::string&)>& put) {
    const SimScenario& sc = rep.scenario;
    put("scenario_id", scenario_id(sc));
    put("family", family_name(sc.family));
    put("error_type", error_type_name(sc.error_type));
    put("quality", quality_name(sc.quality));
    put("n", std::to_string(sc.n));
    put("n_lab", std::to_string(sc.n_lab));
    put("method", method_name(c.method));
    put("coef", rep.coef_names[static_cast<std::size_t>(c.coef)]);
    put("pct_bias", fmt_g10(c.pct_bias));
    put("coverage", fmt_g10(c.coverage));
    put("coverage_mcse", fmt_g10(c.coverage_mcse));
    put("re", fmt_g10(c.re));
    put("ase", fmt_g10(c.ase));
    put("ese", fmt_g10(c.ese));
    put("n_failures", std::to_string(rep.n_failures));
}

} // namespace

std::string sim_report_csv(const std::vector<SimReport>& reports) {
    std::ostringstream out;
    out << "scenario_id,family,error_type,quality,n,n_lab,method,coef,pct_bias,coverage,"
           "coverage_mcse,re,ase,ese,n_failures\n";
    for (const SimReport& rep : reports) {
        for (const SimCell& c : rep.cells) {
            bool first = true;
            sim_cell_fields(rep, c, [&](const char*, const std::string& v) {
                if (!first) out << ',';
                out << v;
                first = false;
            });
            out << '\n';
        }
    }
    return out.str();
}

std::string sim_report_json(const std::vector<SimReport>& reports) {
    ordered_json arr = ordered_json::array();
    for (const SimReport& rep : reports) {
        for (const SimCell& c : rep.cells) {
            ordered_json o;
            const SimScenario& sc = rep.scenario;
            o["scenario_id"] = scenario_id(sc);
            o["family"] = family_name(sc.family);
            o["error_type"] = error_type_name(sc.error_type);
            o["quality"] = quality_name(sc.quality);
            o["n"] = sc.n;
            o["n_lab"] = sc.n_lab;
            o["method"] = method_name(c.method);
            o["coef"] = rep.coef_names[static_cast<std::size_t>(c.coef)];
            o["pct_bias"] = j10(c.pct_bias);
            o["coverage"] = j10(c.coverage);
            o["coverage_mcse"] = j10(c.coverage_mcse);
            o["re"] = j10(c.re);
            o["ase"] = j10(c.ase);
            o["ese"] = j10(c.ese);
            o["n_failures"] = rep.n_failures;
            arr.push_back(std::move(o));
        }
    }
    return arr.dump(2) + "\n";
}

std::string analyze_report_csv(const AnalyzeReport& rep) {
    std::ostringstream out;
    out << "method,coef,estimate,se,ci_lower,ci_upper,re_vs_lab\n";
    for (const AnalyzeRow& r : rep.rows)
        out << r.method << ',' << r.coef << ',' << fmt_g10(r.estimate) << ',' << fmt_g10(r.se)
            << ',' << fmt_g10(r.ci_lower) << ',' << fmt_g10(r.ci_upper) << ','
            << fmt_g10(r.re_vs_lab) << '\n';
    return out.str();
}

std::string analyze_report_json(const AnalyzeReport& rep) {
    ordered_json root;
    root["family"] = family_name(rep.family);
    root["level"] = j10(rep.level);
    root["n"] = rep.n;
    root["n_lab"] = rep.n_lab;
    root["coefficients"] = rep.coef_names;
    ordered_json rows = ordered_json::array();
    for (const AnalyzeRow& r : rep.rows) {
        ordered_json o;
        o["method"] = r.method;
        o["coef"] = r.coef;
        o["estimate"] = j10(r.estimate);
        o["se"] = j10(r.se);
        o["ci_lower"] = j10(r.ci_lower);
        o["ci_upper"] = j10(r.ci_upper);
        o["re_vs_lab"] = j10(r.re_vs_lab);
        rows.push_back(std::move(o));
    }
    root["estimates"] = std::move(rows);
    ordered_json covs;
    for (const std::string& m : rep.methods) {
        auto it = rep.cov.find(m);
        if (it == rep.cov.end()) continue;
        const Mat& c = it->second;
        ordered_json rows_json = ordered_json::array();
        for (std::size_t i = 0; i < c.rows; ++i) {
            ordered_json row = ordered_json::array();
            for (std::size_t j = 0; j < c.cols; ++j) row.push_back(j10(c(i, j)));
            rows_json.push_back(std::move(row));
        }
        covs[m] = std::move(rows_json);
    }
    root["cov"] = std::move(covs);
    return root.dump(2) + "\n";
}

std::string diagnose_report_csv(const DiagnoseReport& rep) {
    std::ostringstream out;
    out << "field,value\n";
    out << "family," << family_name(rep.family) << '\n';
    out << "n," << rep.n << '\n';
    out << "n_lab," << rep.n_lab << '\n';
    out << "sigma_y," << fmt_g10(rep.sigma_y) << '\n';
    out << "sigma_yhat," << fmt_g10(rep.sigma_yhat) << '\n';
    out << "rho," << fmt_g10(rep.rho) << '\n';
    out << "threshold," << fmt_g10(rep.threshold) << '\n';
    out << "recommended," << rep.recommended << '\n';
    out << "coef,delta_ppia,ppia_efficient,delta_cc,cc_efficient\n";
    for (std::size_t j = 0; j < rep.coef_names.size(); ++j)
        out << rep.coef_names[j] << ',' << fmt_g10(rep.delta_ppia_diag[j]) << ','
            << (rep.ppia_efficient[j] ? "true" : "false") << ',' << fmt_g10(rep.delta_cc_diag[j])
            << ',' << (rep.cc_efficient[j] ? "true" : "false") << '\n';
    return out.str();
}

std::string diagnose_report_json(const DiagnoseReport& rep) {
    ordered_json root;
    root["family"] = family_name(rep.family);
    root["n"] = rep.n;
    root["n_lab"] = rep.n_lab;
    root["sigma_y"] = j10(rep.sigma_y);
    root["sigma_yhat"] = j10(rep.sigma_yhat);
    root["rho"] = j10(rep.rho);
    root["threshold"] = j10(rep.threshold);
    ordered_json coefs = ordered_json::array();
    for (std::size_t j = 0; j < rep.coef_names.size(); ++j) {
        ordered_json o;
        o["coef"] = rep.coef_names[j];
        o["delta_ppia"] = j10(rep.delta_ppia_diag[j]);
        o["ppia_efficient"] = static_cast<bool>(rep.ppia_efficient[j]);
        o["delta_cc"] = j10(rep.delta_cc_diag[j]);
        o["cc_efficient"] = static_cast<bool>(rep.cc_efficient[j]);
        coefs.push_back(std::move(o));
    }
    root["coefficients"] = std::move(coefs);
    root["recommended"] = rep.recommended;
    return root.dump(2) + "\n";
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open input file: " + path);
    CsvTable t;
    std::string line;
    std::size_t line_no = 0;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cur;
        for (char ch : s) {
            if (ch == ',') {
                cells.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(ch);
            }
        }
        cells.push_back(cur);
        return cells;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            t.header = split(line);
            if (t.header.empty() || (t.header.size() == 1 && t.header[0].empty()))
                throw CsvError("line 1: empty header");
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> cells = split(line);
        if (cells.size() != t.header.size())
            throw CsvError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(t.header.size()) + " cells, found " +
                           std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
        t.line_no.push_back(line_no);
    }
    if (t.header.empty()) throw CsvError("line 1: missing header");
    return t;
}

double parse_csv_number(const std::string& cell, std::size_t line, const std::string& col) {
    if (cell.empty())
        throw CsvError("line " + std::to_string(line) + ": empty cell in column '" + col + "'");
    char* end = nullptr;
    double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0')
        throw CsvError("line " + std::to_string(line) + ": cell '" + cell + "' in column '" + col +
                       "' is not a number");
    if (!std::isfinite(v))
        throw CsvError("line " + std::to_string(line) + ": non-finite value in column '" + col + "'");
    return v;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + path);
    out << content;
    if (!out) throw Error("failed writing output file: " + path);
}

} // namespace pbinfer
