#pragma once

#include <string>

#include "proxysel/scm.hpp"

namespace proxysel {

/// Load an RFC-4180 CSV with a header row into a centered Dataset. The
/// outcome column is `outcome` when given (moved to the last position),
/// otherwise the last column. Throws ParseError with a 1-based line number on
/// malformed input.
Dataset load_csv(const std::string& path, const std::string& outcome = "");

/// Write a Dataset as RFC-4180 CSV ('.' decimal separator, 17 significant
/// digits so a reload reproduces the covariance exactly).
void write_csv(const Dataset& data, const std::string& path);

}  // namespace proxysel
