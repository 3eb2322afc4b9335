#include "osil/core/kv.hpp"

#include <fstream>
#include <sstream>

#include "osil/core/errors.hpp"
#include "osil/core/rng.hpp"

namespace osil {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

KvConfig KvConfig::from_file(const std::filesystem::path& path) {
    KvConfig kv;
    kv.parse_lines(read_file(path), path.parent_path(), 0);
    return kv;
}

KvConfig KvConfig::from_string(const std::string& text) {
    KvConfig kv;
    kv.parse_lines(text, std::filesystem::current_path(), 0);
    return kv;
}

void KvConfig::parse_lines(const std::string& text, const std::filesystem::path& base_dir,
                           int depth) {
    if (depth > 8) throw ConfigError("config include depth exceeds 8 (include cycle?)");
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("@include", 0) == 0) {
            const std::string rel = trim(line.substr(8));
            if (rel.empty()) throw ConfigError("@include without a path (line " +
                                               std::to_string(line_no) + ")");
            const std::filesystem::path inc = base_dir / rel;
            parse_lines(read_file(inc), inc.parent_path(), depth + 1);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + " has no '=': " + line);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) +
                                           " has an empty key");
        values_[key] = value;
    }
}

std::string KvConfig::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required config key: " + key);
    return it->second;
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::int64_t KvConfig::get_int(const std::string& key, std::int64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not an integer: " + it->second);
    }
}

double KvConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not a number: " + it->second);
    }
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key " + key + " is not a boolean: " + v);
}

namespace {

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) parts.push_back(trim(cur));
    return parts;
}

}  // namespace

std::vector<double> KvConfig::get_double_list(const std::string& key,
                                              const std::vector<double>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const std::string& p : split_commas(it->second)) {
        try {
            out.push_back(std::stod(p));
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + " has a non-numeric element: " + p);
        }
    }
    return out;
}

std::vector<std::int64_t> KvConfig::get_int_list(const std::string& key,
                                                 const std::vector<std::int64_t>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<std::int64_t> out;
    for (const std::string& p : split_commas(it->second)) {
        try {
            out.push_back(std::stoll(p));
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + " has a non-integer element: " + p);
        }
    }
    return out;
}

std::string KvConfig::canonical_string() const {
    std::ostringstream os;
    for (const auto& [k, v] : values_) os << k << " = " << v << "\n";
    return os.str();
}

std::uint64_t KvConfig::hash() const {
    return fnv1a64(canonical_string());
}

}  // namespace osil
