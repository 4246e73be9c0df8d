#pragma once
// Plain-text run plumbing shared by the command-line tool and its tests:
// key=value configuration files with a provenance hash, fixed-precision
// number formatting, and a small CSV emitter with comment metadata.

#include <map>
#include <string>
#include <fstream>
#include <vector>

namespace dce {

// Flat string-to-string configuration. Keys are case sensitive; later
// assignments win. Files hold one key=value pair per line, with blank lines
// and lines starting with '#' ignored.
class KeyValueConfig {
public:
    static KeyValueConfig load(const std::string& path);

    // Parses command-line definitions of the form key=value.
    static KeyValueConfig from_args(const std::vector<std::string>& defs);

    void set(const std::string& key, const std::string& value);
    void merge(const KeyValueConfig& overrides);
    bool has(const std::string& key) const;

    // Getters with no fallback throw std::out_of_range when the key is
    // missing; malformed values throw std::invalid_argument naming the key.
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Sorted key=value lines; two configs with equal serializations are the
    // same run.
    std::string serialize() const;

    // FNV-1a of the serialization, sixteen hex digits.
    std::string hash() const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// Scientific notation with enough digits to round-trip a double.
std::string format_sci(double v);

// CSV with '#'-prefixed metadata lines above a single header row. Metadata
// must be written before the header, rows after it.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);

    void metadata(const std::string& key, const std::string& value);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);
    void row(const std::vector<double>& cells);

private:
    std::ofstream out_;
    std::size_t columns_ = 0;
    bool header_written_ = false;
};

} // namespace dce
