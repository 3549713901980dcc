#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "qhm/gaussian_core.hpp"

namespace qhm::cli {

/// Shortest decimal string that round-trips the value as a double.
std::string format_real(real value);

/// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);

/// Writes `# key = value` lines.
void write_header_line(std::ostream& os, std::string_view key, std::string_view value);

void write_row(std::ostream& os, const std::vector<std::string>& fields);

}  // namespace qhm::cli
