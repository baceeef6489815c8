#ifndef KERR_CONFIG_HPP
#define KERR_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kerr {

/**
 * Flat key-value experiment configuration with [section] headers, one
 * experiment per file:
 *
 *     # comment
 *     [experiment]
 *     type = fdtd
 *     h = 0.01
 *
 * Keys are unique per section; diagnostics carry file and line numbers.
 */
class ExperimentConfig {
  public:
    static ExperimentConfig parse_file(const std::string& path);
    static ExperimentConfig parse_string(const std::string& text, const std::string& name = "<string>");

    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long get_int(const std::string& section, const std::string& key) const;
    long get_int(const std::string& section, const std::string& key, long fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    /** Whitespace-separated doubles. */
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) const;

    const std::string& source() const { return source_; }

  private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::string source_;

    const Entry& entry(const std::string& section, const std::string& key) const;
    [[noreturn]] void fail(const std::string& section, const std::string& key,
                           const std::string& what) const;
};

} // namespace kerr

#endif
