#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace vpmcf {

// Flat "section.key = value" configuration, UTF-8, '#' comments.
class Config {
public:
    Config() = default;

    static Config fromFile(const std::string& path);
    static Config fromString(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    // Accessors throw ConfigError naming the key on absence/parse failure;
    // the defaulted forms fall back instead.
    std::string getString(const std::string& key) const;
    std::string getString(const std::string& key, const std::string& dflt) const;
    double getDouble(const std::string& key) const;
    double getDouble(const std::string& key, double dflt) const;
    int getInt(const std::string& key) const;
    int getInt(const std::string& key, int dflt) const;
    std::uint64_t getU64(const std::string& key, std::uint64_t dflt) const;
    bool getBool(const std::string& key, bool dflt) const;

    // Comma-separated list of doubles (may be empty).
    std::vector<double> getDoubleList(const std::string& key) const;

    // Key-sorted round-trippable text form.
    std::string serialize() const;

private:
    std::map<std::string, std::string> kv_;
};

} // namespace vpmcf
