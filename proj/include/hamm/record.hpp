#ifndef HAMM_RECORD_HPP
#define HAMM_RECORD_HPP

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hamm {

/*
 * Line-oriented machine-readable report: one `key=value` pair per line, in
 * insertion order. Keys are [A-Za-z0-9_.-]+. In values, backslash and
 * newline are escaped as \\ and \n. Numbers are written with 17
 * significant digits so they re-parse to the same double.
 */
class Record {
public:
    Record& set(const std::string& key, std::string value);
    Record& set(const std::string& key, double value);
    Record& set(const std::string& key, long long value);
    Record& set(const std::string& key, int value) { return set(key, static_cast<long long>(value)); }
    Record& set(const std::string& key, bool value) { return set(key, std::string(value ? "true" : "false")); }
    Record& set(const std::string& key, const char* value) { return set(key, std::string(value)); }

    std::optional<std::string> get(const std::string& key) const;
    double number(const std::string& key) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    std::string str() const;
    static Record parse(std::string_view text);

    friend bool operator==(const Record& a, const Record& b) { return a.entries_ == b.entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

std::string format_double(double x);

} // namespace hamm

#endif // HAMM_RECORD_HPP
