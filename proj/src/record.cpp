#include "hamm/record.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <stdexcept>

#include "hamm/errors.hpp"

namespace hamm {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void require_key(const std::string& key) {
    if (key.empty())
        throw ParameterError("record key must not be empty");
    for (char c : key)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-'))
            throw ParameterError("invalid record key '" + key + "'");
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '\\')
            out += "\\\\";
        else if (c == '\n')
            out += "\\n";
        else
            out += c;
    }
    return out;
}

std::string unescape(std::string_view s, std::size_t line) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out += s[i];
            continue;
        }
        if (i + 1 == s.size())
            throw ParseError("dangling escape in record line " + std::to_string(line), line);
        const char next = s[++i];
        if (next == 'n')
            out += '\n';
        else if (next == '\\')
            out += '\\';
        else
            throw ParseError("unknown escape '\\" + std::string(1, next) + "' in record line " + std::to_string(line),
                             line);
    }
    return out;
}

} // namespace

Record& Record::set(const std::string& key, std::string value) {
    require_key(key);
    for (auto& [k, v] : entries_)
        if (k == key) {
            v = std::move(value);
            return *this;
        }
    entries_.emplace_back(key, std::move(value));
    return *this;
}

Record& Record::set(const std::string& key, double value) { return set(key, format_double(value)); }

Record& Record::set(const std::string& key, long long value) { return set(key, std::to_string(value)); }

std::optional<std::string> Record::get(const std::string& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key)
            return v;
    return std::nullopt;
}

double Record::number(const std::string& key) const {
    const auto v = get(key);
    if (!v)
        throw ParameterError("record has no key '" + key + "'");
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), x);
    if (ec != std::errc() || ptr != v->data() + v->size())
        throw ParseError("record value '" + *v + "' of key '" + key + "' is not a number", 0);
    return x;
}

std::string Record::str() const {
    std::string out;
    for (const auto& [k, v] : entries_)
        out += k + "=" + escape(v) + "\n";
    return out;
}

Record Record::parse(std::string_view text) {
    Record rec;
    std::size_t start = 0;
    std::size_t line = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        const std::string_view row = text.substr(start, end - start);
        start = end + 1;
        ++line;
        if (row.empty())
            continue;
        const auto eq = row.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("record line " + std::to_string(line) + " has no '='", line);
        rec.set(std::string(row.substr(0, eq)), unescape(row.substr(eq + 1), line));
    }
    return rec;
}

} // namespace hamm
