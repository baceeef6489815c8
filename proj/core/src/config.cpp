#include "kerr/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "kerr/errors.hpp"

namespace kerr {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

ExperimentConfig ExperimentConfig::parse_string(const std::string& text, const std::string& name) {
    ExperimentConfig cfg;
    cfg.source_ = name;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(name + ":" + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError(name + ":" + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(name + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key");
        if (section.empty())
            throw ConfigError(name + ":" + std::to_string(lineno) + ": key outside any [section]");
        auto [it, inserted] = cfg.sections_[section].insert({key, Entry{value, lineno}});
        if (!inserted)
            throw ConfigError(name + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                              "' in [" + section + "] (first at line " +
                              std::to_string(it->second.line) + ")");
    }
    return cfg;
}

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

const ExperimentConfig::Entry& ExperimentConfig::entry(const std::string& section,
                                                       const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end())
        throw ConfigError(source_ + ": missing section [" + section + "]");
    const auto k = s->second.find(key);
    if (k == s->second.end())
        throw ConfigError(source_ + ": missing key '" + key + "' in [" + section + "]");
    return k->second;
}

void ExperimentConfig::fail(const std::string& section, const std::string& key,
                            const std::string& what) const {
    const Entry& e = entry(section, key);
    throw ConfigError(source_ + ":" + std::to_string(e.line) + ": [" + section + "] " + key +
                      " = '" + e.value + "': " + what);
}

std::string ExperimentConfig::get_string(const std::string& section, const std::string& key) const {
    return entry(section, key).value;
}

std::string ExperimentConfig::get_string(const std::string& section, const std::string& key,
                                         const std::string& fallback) const {
    return has(section, key) ? entry(section, key).value : fallback;
}

double ExperimentConfig::get_double(const std::string& section, const std::string& key) const {
    const std::string& v = entry(section, key).value;
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) fail(section, key, "trailing characters after number");
        return d;
    } catch (const std::logic_error&) {
        fail(section, key, "not a number");
    }
}

double ExperimentConfig::get_double(const std::string& section, const std::string& key,
                                    double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

long ExperimentConfig::get_int(const std::string& section, const std::string& key) const {
    const std::string& v = entry(section, key).value;
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) fail(section, key, "trailing characters after integer");
        return d;
    } catch (const std::logic_error&) {
        fail(section, key, "not an integer");
    }
}

long ExperimentConfig::get_int(const std::string& section, const std::string& key,
                               long fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

bool ExperimentConfig::get_bool(const std::string& section, const std::string& key,
                                bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = entry(section, key).value;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(section, key, "expected a boolean");
}

std::vector<double> ExperimentConfig::get_doubles(const std::string& section,
                                                  const std::string& key) const {
    const std::string& v = entry(section, key).value;
    std::istringstream ss(v);
    std::vector<double> out;
    double d;
    while (ss >> d) out.push_back(d);
    if (!ss.eof()) fail(section, key, "expected whitespace-separated numbers");
    if (out.empty()) fail(section, key, "empty list");
    return out;
}

std::vector<double> ExperimentConfig::get_doubles(const std::string& section,
                                                  const std::string& key,
                                                  const std::vector<double>& fallback) const {
    return has(section, key) ? get_doubles(section, key) : fallback;
}

} // namespace kerr
