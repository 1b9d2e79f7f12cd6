#pragma once

#include <string>
#include <string_view>

#include "vlb/runner.hpp"

namespace vlb {

enum class ReportFormat { table, structured };

ReportFormat report_format_from_string(std::string_view name);

/// `table`: aligned text tables, one block per mode plus a totals table.
/// `structured`: JSON with top-level keys intervals, ledger_snapshots,
/// surpluses, cycles, and totals (keyed by mode). Infinite range endpoints
/// are written as null.
std::string emit(const RunReport& report, ReportFormat format);

/// Inverse of emit(report, ReportFormat::structured).
RunReport parse_report(std::string_view structured);

}  // namespace vlb
