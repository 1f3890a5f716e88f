#include "pubflow/common/xml.hpp"

#include "pubflow/common/error.hpp"

#include <expat.h>

#include <memory>

namespace pubflow::xml {

const std::string* Element::attr(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
        if (k == key) return &v;
    }
    return nullptr;
}

namespace {

constexpr char kNsSeparator = ' ';

struct ParserDeleter {
    void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

struct BuildState {
    XML_Parser parser = nullptr;
    Element root;
    bool have_root = false;
    std::vector<Element*> stack;
    std::string doctype_error;
};

void split_name(const XML_Char* full, std::string& ns, std::string& local) {
    std::string_view s(full);
    auto pos = s.find(kNsSeparator);
    if (pos == std::string_view::npos) {
        ns.clear();
        local.assign(s);
    } else {
        ns.assign(s.substr(0, pos));
        local.assign(s.substr(pos + 1));
    }
}

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** atts) {
    auto* st = static_cast<BuildState*>(user);
    Element el;
    split_name(name, el.ns, el.name);
    el.line = static_cast<int>(XML_GetCurrentLineNumber(st->parser));
    el.column = static_cast<int>(XML_GetCurrentColumnNumber(st->parser)) + 1;
    for (int i = 0; atts[i] != nullptr; i += 2) {
        el.attributes.emplace_back(atts[i], atts[i + 1]);
    }
    if (st->stack.empty()) {
        st->root = std::move(el);
        st->have_root = true;
        st->stack.push_back(&st->root);
    } else {
        auto& kids = st->stack.back()->children;
        kids.push_back(std::move(el));
        st->stack.push_back(&kids.back());
    }
}

void XMLCALL on_end(void* user, const XML_Char*) {
    static_cast<BuildState*>(user)->stack.pop_back();
}

void XMLCALL on_text(void* user, const XML_Char* s, int len) {
    auto* st = static_cast<BuildState*>(user);
    if (!st->stack.empty()) st->stack.back()->text.append(s, static_cast<size_t>(len));
}

void XMLCALL on_doctype(void* user, const XML_Char*, const XML_Char*, const XML_Char*, int) {
    auto* st = static_cast<BuildState*>(user);
    st->doctype_error = "document type declarations are not accepted";
    XML_StopParser(st->parser, XML_FALSE);
}

} // namespace

Element parse(std::string_view document) {
    std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreateNS("UTF-8", kNsSeparator));
    if (!parser) throw Error(Errc::IO_ERROR, "cannot allocate XML parser");

    BuildState st;
    st.parser = parser.get();
    XML_SetUserData(parser.get(), &st);
    XML_SetElementHandler(parser.get(), on_start, on_end);
    XML_SetCharacterDataHandler(parser.get(), on_text);
    XML_SetStartDoctypeDeclHandler(parser.get(), on_doctype);

    // Stack entries point at the last child of each open element; appending
    // only ever reallocates the top's children, none of which are on the stack.
    auto status = XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), XML_TRUE);
    if (status != XML_STATUS_OK || !st.doctype_error.empty()) {
        int line = static_cast<int>(XML_GetCurrentLineNumber(parser.get()));
        int column = static_cast<int>(XML_GetCurrentColumnNumber(parser.get())) + 1;
        std::string msg = st.doctype_error.empty() ? XML_ErrorString(XML_GetErrorCode(parser.get()))
                                                   : st.doctype_error;
        throw Error(Errc::XML_SYNTAX,
                    "XML syntax error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                        ": " + msg,
                    {{"line", line}, {"column", column}});
    }
    if (!st.have_root) {
        throw Error(Errc::XML_SYNTAX, "empty XML document", {{"line", 1}, {"column", 1}});
    }
    return std::move(st.root);
}

std::string escape_text(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '\r': out += "&#13;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string escape_attribute(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\r': out += "&#13;"; break;
        case '\n': out += "&#10;"; break;
        case '\t': out += "&#9;"; break;
        default: out += c;
        }
    }
    return out;
}

Writer::Writer(bool declaration) {
    if (declaration) out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
}

void Writer::indent() { out_.append(stack_.size() * 2, ' '); }

void Writer::write_start(std::string_view tag, const Attributes& attributes) {
    indent();
    out_ += '<';
    out_ += tag;
    for (const auto& [k, v] : attributes) {
        out_ += ' ';
        out_ += k;
        out_ += "=\"";
        out_ += escape_attribute(v);
        out_ += '"';
    }
}

Writer& Writer::open(std::string_view tag, const Attributes& attributes) {
    write_start(tag, attributes);
    out_ += ">\n";
    stack_.emplace_back(tag);
    return *this;
}

Writer& Writer::empty(std::string_view tag, const Attributes& attributes) {
    write_start(tag, attributes);
    out_ += "/>\n";
    return *this;
}

Writer& Writer::leaf(std::string_view tag, std::string_view text, const Attributes& attributes) {
    write_start(tag, attributes);
    out_ += '>';
    out_ += escape_text(text);
    out_ += "</";
    out_ += tag;
    out_ += ">\n";
    return *this;
}

Writer& Writer::close() {
    std::string tag = std::move(stack_.back());
    stack_.pop_back();
    indent();
    out_ += "</" + tag + ">\n";
    return *this;
}

std::string Writer::str() {
    while (!stack_.empty()) close();
    return out_;
}

} // namespace pubflow::xml
