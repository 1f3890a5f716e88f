#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pubflow::repository {

inline constexpr std::string_view kDefaultMime = "application/octet-stream";

// Extension (lowercase, no dot) to MIME type.
const std::vector<std::pair<std::string_view, std::string_view>>& mime_table();

// Looks at the extension of a file name or of a URL's path. Query strings and
// fragments are ignored; unknown or missing extensions give kDefaultMime.
std::string mime_for_name(std::string_view location_or_filename);

} // namespace pubflow::repository
