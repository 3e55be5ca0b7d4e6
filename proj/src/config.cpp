#include "vpmcf/config.hpp"

#include <fstream>
#include <sstream>

#include "vpmcf/csvio.hpp"
#include "vpmcf/errors.hpp"

namespace vpmcf {
namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

Config Config::fromFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return fromString(ss.str());
}

Config Config::fromString(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineNo) +
                              " is not 'key = value': " + line);
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineNo) + " has an empty key");
        cfg.kv_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

std::string Config::getString(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
}

std::string Config::getString(const std::string& key, const std::string& dflt) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
}

double Config::getDouble(const std::string& key) const {
    const std::string v = getString(key);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not a number: " + v);
    }
}

double Config::getDouble(const std::string& key, double dflt) const {
    return has(key) ? getDouble(key) : dflt;
}

int Config::getInt(const std::string& key) const {
    const std::string v = getString(key);
    try {
        std::size_t pos = 0;
        const int i = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not an integer: " + v);
    }
}

int Config::getInt(const std::string& key, int dflt) const {
    return has(key) ? getInt(key) : dflt;
}

std::uint64_t Config::getU64(const std::string& key, std::uint64_t dflt) const {
    if (!has(key)) return dflt;
    const std::string v = getString(key);
    try {
        std::size_t pos = 0;
        const std::uint64_t u = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return u;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not an unsigned integer: " + v);
    }
}

bool Config::getBool(const std::string& key, bool dflt) const {
    if (!has(key)) return dflt;
    const std::string v = getString(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key " + key + " is not a boolean: " + v);
}

std::vector<double> Config::getDoubleList(const std::string& key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    std::istringstream in(getString(key));
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + " has a non-numeric entry: " + item);
        }
    }
    return out;
}

std::string Config::serialize() const {
    std::ostringstream out;
    for (const auto& [k, v] : kv_) out << k << " = " << v << "\n";
    return out.str();
}

} // namespace vpmcf
