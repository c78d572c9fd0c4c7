#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fssaudit::csv {

// Splits one line on commas. Double-quoted fields may contain commas; a
// doubled quote inside a quoted field is a literal quote.
std::vector<std::string> split(std::string_view line);

// Quotes a field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

}  // namespace fssaudit::csv
