#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace osil {

// Flat `key = value` config files with comments (#) and an include line
// (`@include other.kv`, resolved relative to the including file). Later
// assignments override earlier ones, so a file can include shared defaults
// and then patch individual keys. Keys are kept sorted, which makes the
// canonical serialization (and therefore the config hash) order-stable.
class KvConfig {
  public:
    static KvConfig from_file(const std::filesystem::path& path);
    static KvConfig from_string(const std::string& text);

    bool contains(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;
    std::vector<std::int64_t> get_int_list(const std::string& key,
                                           const std::vector<std::int64_t>& fallback) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    const std::map<std::string, std::string>& entries() const { return values_; }

    std::string canonical_string() const;
    std::uint64_t hash() const;

  private:
    void parse_lines(const std::string& text, const std::filesystem::path& base_dir, int depth);

    std::map<std::string, std::string> values_;
};

}  // namespace osil
