#pragma once

// Built-in monitors by name, type-erased to a printable report.

#include <string>
#include <vector>

#include "tracefold/foldt.hpp"
#include "tracefold/microlog.hpp"

namespace tracefold {

// Names accepted by make_report_monitor. `max_depth_interval` takes an
// optional interval length: `max_depth_interval:100`.
const std::vector<std::string>& registered_monitors();

// Coverage monitors need the program; `program` may be null otherwise.
// Throws std::invalid_argument for unknown names or missing programs.
ReportMonitor make_report_monitor(const std::string& spec, const microlog::Program* program);

// Optional attributes the monitor reads.
AttributeMask required_attributes(const std::string& spec);

}  // namespace tracefold
