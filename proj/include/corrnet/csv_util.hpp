#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace corrnet::detail {

/// Splits one CSV line on commas (no quoting) and trims ASCII blanks.
std::vector<std::string> split_csv_line(std::string_view line);

/// Strict decimal parse of a whole cell; false on junk or non-finite values.
bool parse_double(std::string_view text, double& out);

}  // namespace corrnet::detail
