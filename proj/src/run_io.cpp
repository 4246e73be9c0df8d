#include "dce/run_io.hpp"

#include <cctype>
#include <cerrno>
#include <climits>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <utility>

namespace dce {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Splits "key=value", trimming both sides. The context string prefixes
// error messages, e.g. "config.txt:12" or "--set".
std::pair<std::string, std::string> split_pair(const std::string& text,
                                               const std::string& context) {
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument(context + ": expected key=value, got '" + text +
                                    "'");
    const std::string key = trim(text.substr(0, eq));
    if (key.empty())
        throw std::invalid_argument(context + ": empty key in '" + text + "'");
    return {key, trim(text.substr(eq + 1))};
}

} // namespace

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    KeyValueConfig cfg;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto [key, value] = split_pair(text, path + ":" + std::to_string(number));
        cfg.values_[key] = value;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::from_args(const std::vector<std::string>& defs) {
    KeyValueConfig cfg;
    for (const std::string& def : defs) {
        const auto [key, value] = split_pair(def, "--set");
        cfg.values_[key] = value;
    }
    return cfg;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

void KeyValueConfig::merge(const KeyValueConfig& overrides) {
    for (const auto& [key, value] : overrides.values_) values_[key] = value;
}

bool KeyValueConfig::has(const std::string& key) const {
    return values_.count(key) != 0;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
        throw std::out_of_range("missing config key '" + key + "'");
    return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
    const std::string text = get_string(key);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (errno != 0 || end == text.c_str() || *end != '\0')
        throw std::invalid_argument("config key '" + key + "': cannot parse '" + text +
                                    "' as a number");
    return v;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int KeyValueConfig::get_int(const std::string& key) const {
    const std::string text = get_string(key);
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(text.c_str(), &end, 10);
    if (errno != 0 || end == text.c_str() || *end != '\0' || v < INT_MIN || v > INT_MAX)
        throw std::invalid_argument("config key '" + key + "': cannot parse '" + text +
                                    "' as an integer");
    return static_cast<int>(v);
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key) const {
    const std::string text = get_string(key);
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw std::invalid_argument("config key '" + key + "': cannot parse '" + text +
                                "' as a boolean (use true/false)");
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
}

std::string KeyValueConfig::serialize() const {
    std::string out;
    for (const auto& [key, value] : values_) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    }
    return out;
}

std::string KeyValueConfig::hash() const {
    const std::string bytes = serialize();
    std::uint64_t h = 14695981039346656037ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
}

void CsvWriter::metadata(const std::string& key, const std::string& value) {
    if (header_written_)
        throw std::logic_error("csv metadata must precede the header");
    out_ << "# " << key << ": " << value << "\n";
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    if (header_written_) throw std::logic_error("csv header written twice");
    columns_ = columns.size();
    header_written_ = true;
    for (std::size_t i = 0; i < columns.size(); ++i)
        out_ << columns[i] << (i + 1 < columns.size() ? "," : "");
    out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (!header_written_) throw std::logic_error("csv row before header");
    if (cells.size() != columns_)
        throw std::logic_error("csv row width does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i)
        out_ << cells[i] << (i + 1 < cells.size() ? "," : "");
    out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& cells) {
    std::vector<std::string> text;
    text.reserve(cells.size());
    for (const double v : cells) text.push_back(format_sci(v));
    row(text);
}

} // namespace dce
