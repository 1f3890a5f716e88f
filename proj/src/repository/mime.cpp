#include "pubflow/repository/mime.hpp"

#include <algorithm>

namespace pubflow::repository {

const std::vector<std::pair<std::string_view, std::string_view>>& mime_table() {
    static const std::vector<std::pair<std::string_view, std::string_view>> table{
        {"pdf", "application/pdf"},
        {"xml", "text/xml"},
        {"txt", "text/plain"},
        {"html", "text/html"},
        {"htm", "text/html"},
        {"css", "text/css"},
        {"csv", "text/csv"},
        {"js", "application/javascript"},
        {"json", "application/json"},
        {"png", "image/png"},
        {"jpg", "image/jpeg"},
        {"jpeg", "image/jpeg"},
        {"gif", "image/gif"},
        {"svg", "image/svg+xml"},
        {"tif", "image/tiff"},
        {"tiff", "image/tiff"},
        {"zip", "application/zip"},
        {"par", "application/zip"},
        {"gz", "application/gzip"},
        {"tex", "application/x-tex"},
        {"ps", "application/postscript"},
        {"doc", "application/msword"},
        {"docx", "application/vnd.openxmlformats-officedocument.wordprocessingml.document"},
        {"odt", "application/vnd.oasis.opendocument.text"},
        {"rtf", "application/rtf"},
    };
    return table;
}

std::string mime_for_name(std::string_view name) {
    if (auto cut = name.find_first_of("?#"); cut != std::string_view::npos && name.find("://") != std::string_view::npos) {
        name = name.substr(0, cut);
    }
    auto slash = name.find_last_of('/');
    if (slash != std::string_view::npos) name = name.substr(slash + 1);
    auto dot = name.find_last_of('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == name.size()) return std::string(kDefaultMime);
    std::string ext(name.substr(dot + 1));
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const auto& [e, mime] : mime_table()) {
        if (e == ext) return std::string(mime);
    }
    return std::string(kDefaultMime);
}

} // namespace pubflow::repository
