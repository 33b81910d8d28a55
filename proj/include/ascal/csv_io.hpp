#pragma once

#include <string>
#include <vector>

#include "ascal/diagnostics.hpp"

namespace ascal {

inline constexpr const char* kDiagnosticsHeader =
    "t,l1,l2,lq_critical,linf,sobolev,kato_eta,kato_eta_tilde,mean,div_residual";

// One row per record under the fixed header, every value at 17 significant
// digits so verdicts recompute bit-for-bit from the file.
std::string diagnostics_csv_text(const std::vector<DiagnosticsRecord>& records);
void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& records, const std::string& path);

std::vector<DiagnosticsRecord> parse_diagnostics_csv(const std::string& text);
std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::string& path);

}  // namespace ascal
