#pragma once

// Naive field-search evaluator: a full scan with std::regex for wildcards.
// Shares nothing with the repository's matcher.

#include <cctype>
#include <cstdint>
#include <map>
#include <random>
#include <regex>
#include <string>
#include <vector>

namespace pubflow::testing {

struct OracleObject {
    std::uint64_t serial;
    std::map<std::string, std::vector<std::string>> values;  // field -> values
};

inline bool oracle_match(const std::string& op, const std::string& value, const std::string& query) {
    if (op == "eq") return value == query;
    if (op == "gt") return value.compare(query) > 0;
    if (op == "ge") return value.compare(query) >= 0;
    if (op == "lt") return value.compare(query) < 0;
    if (op == "le") return value.compare(query) <= 0;
    auto fold = [](std::string s) {
        for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    };
    auto v = fold(value), q = fold(query);
    if (q.find('*') == std::string::npos) return v.find(q) != std::string::npos;
    std::string re;
    for (char c : q) {
        if (c == '*') re += ".*";
        else if (std::string("\\^$.|?+()[]{}").find(c) != std::string::npos) re += std::string("\\") + c;
        else re += c;
    }
    return std::regex_match(v, std::regex(re));
}

using OracleCondition = std::tuple<std::string, std::string, std::string>;  // field, op, value

// Pids of the matching objects in serial order, capped at max_results;
// `complete` is false when the cap cut the list short.
inline std::vector<std::string> oracle_search(std::vector<OracleObject>& objects, const std::vector<OracleCondition>& conds,
                                              std::size_t max_results, bool& complete) {
    std::vector<std::string> out;
    complete = true;
    for (auto& o : objects) {
        bool ok = true;
        for (const auto& [field, op, value] : conds) {
            bool any = false;
            for (const auto& v : o.values[field]) any = any || oracle_match(op, v, value);
            ok = ok && any;
        }
        if (!ok) continue;
        if (out.size() == max_results) {
            complete = false;
            break;
        }
        out.push_back(o.values["pid"][0]);
    }
    return out;
}

// Metadata text mixing markup characters, whitespace, non-ASCII and empties.
inline std::string random_text(std::mt19937& rng) {
    static const std::vector<std::string> pieces{"", " ", "a", "Workflow", "<b>", "&amp;", "\"q\"", "x\ny", "\t",
                                                 "\xc3\xa9t\xc3\xa9", "]]>", "  padded  ", "'", "1999-01-01"};
    std::string s;
    auto n = rng() % 4;
    for (unsigned i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
    return s;
}

} // namespace pubflow::testing
