#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Minimal namespace-aware element tree over expat, plus a small writer.
// Only what the definition, layout, object and Dublin Core formats need:
// no DTDs, no processing instructions, no mixed-content ordering.
namespace pubflow::xml {

struct Element {
    std::string ns;    // namespace URI, empty when unqualified
    std::string name;  // local name
    // Unqualified attributes are keyed by local name, qualified ones by "uri local".
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Element> children;
    std::string text;  // character data directly inside this element
    int line = 0;
    int column = 0;

    const std::string* attr(std::string_view key) const;
    bool is(std::string_view ns_uri, std::string_view local) const {
        return ns == ns_uri && name == local;
    }
};

// Throws pubflow::Error{XML_SYNTAX} with detail {line, column}.
Element parse(std::string_view document);

std::string escape_text(std::string_view s);
std::string escape_attribute(std::string_view s);

class Writer {
public:
    explicit Writer(bool declaration = true);

    using Attributes = std::vector<std::pair<std::string, std::string>>;

    Writer& open(std::string_view tag, const Attributes& attributes = {});
    Writer& empty(std::string_view tag, const Attributes& attributes = {});
    Writer& leaf(std::string_view tag, std::string_view text, const Attributes& attributes = {});
    Writer& close();

    // Finishes all open elements and returns the document.
    std::string str();

private:
    void indent();
    void write_start(std::string_view tag, const Attributes& attributes);

    std::string out_;
    std::vector<std::string> stack_;
};

} // namespace pubflow::xml
