#include "ascal/csv_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ascal/errors.hpp"

namespace ascal {

namespace {

void append(std::string& row, double x, bool first = false) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    if (!first) row += ',';
    row += buf;
}

double field_value(const std::string& token, std::size_t row, std::size_t col) {
    char* end = nullptr;
    const double x = std::strtod(token.c_str(), &end);
    if (token.empty() || end != token.c_str() + token.size())
        throw FormatError("diagnostics csv row " + std::to_string(row) + ", column " +
                          std::to_string(col + 1) + ": bad number \"" + token + "\"");
    return x;
}

}  // namespace

std::string diagnostics_csv_text(const std::vector<DiagnosticsRecord>& records) {
    std::string out = kDiagnosticsHeader;
    out += '\n';
    for (const auto& r : records) {
        std::string row;
        append(row, r.t, true);
        append(row, r.l1);
        append(row, r.l2);
        append(row, r.lq_critical);
        append(row, r.linf);
        append(row, r.sobolev_q_betam1);
        append(row, r.kato_eta);
        append(row, r.kato_eta_tilde);
        append(row, r.mean);
        append(row, r.div_residual);
        out += row;
        out += '\n';
    }
    return out;
}

void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open \"" + path + "\" for writing: " + std::strerror(errno));
    out << diagnostics_csv_text(records);
    out.flush();
    if (!out) throw Error("write to \"" + path + "\" failed: " + std::strerror(errno));
}

std::vector<DiagnosticsRecord> parse_diagnostics_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("diagnostics csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kDiagnosticsHeader)
        throw FormatError("diagnostics csv: header mismatch, got \"" + line + "\"");

    std::vector<DiagnosticsRecord> out;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double v[10];
        std::string::size_type start = 0;
        for (int col = 0; col < 10; ++col) {
            const auto comma = line.find(',', start);
            if (col < 9 && comma == std::string::npos)
                throw FormatError("diagnostics csv row " + std::to_string(row) +
                                  ": expected 10 columns");
            if (col == 9 && comma != std::string::npos)
                throw FormatError("diagnostics csv row " + std::to_string(row) +
                                  ": more than 10 columns");
            v[col] = field_value(line.substr(start, comma - start), row, col);
            start = comma + 1;
        }
        out.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]});
    }
    return out;
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open \"" + path + "\" for reading: " + std::strerror(errno));
    std::ostringstream body;
    body << in.rdbuf();
    return parse_diagnostics_csv(body.str());
}

}  // namespace ascal
