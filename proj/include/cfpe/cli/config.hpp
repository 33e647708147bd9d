#pragma once

// Experiment configuration: JSON documents merged over per-command defaults.
// Every key must exist in the defaults (unknown keys are errors) and carry a
// value of the same JSON kind.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cfpe/errors.hpp"

namespace cfpe::cli {

using json = nlohmann::json;

class ConfigError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline bool same_kind(const json& a, const json& b) {
    if (a.is_number() && b.is_number()) return true;
    return a.type() == b.type();
}

inline void merge_into(json& target, const json& overlay, const std::string& path) {
    if (!overlay.is_object()) throw ConfigError("config " + (path.empty() ? "root" : "'" + path + "'") + " must be an object");
    for (const auto& [key, value] : overlay.items()) {
        const std::string where = path.empty() ? key : path + "." + key;
        if (!target.contains(key)) throw ConfigError("unknown config key '" + where + "'");
        json& slot = target[key];
        if (slot.is_object()) {
            merge_into(slot, value, where);
        } else if (slot.is_null()) {
            // Optional scalar without a default (e.g. a seed); accepts a number.
            if (!value.is_null() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0) &&
                !value.is_number_unsigned()) {
                throw ConfigError("config key '" + where + "' must be a non-negative integer");
            }
            slot = value;
        } else {
            if (!same_kind(slot, value)) {
                throw ConfigError("config key '" + where + "' has the wrong type (expected " +
                                  std::string(slot.type_name()) + ")");
            }
            slot = value;
        }
    }
}

}  // namespace detail

// defaults <- overlay, rejecting unknown keys and kind mismatches.
inline json resolve(const json& defaults, const json& overlay) {
    json out = defaults;
    if (!overlay.is_null()) detail::merge_into(out, overlay, "");
    return out;
}

// Sets a possibly dotted key ("cavity.length") inside an object.
inline void set_path(json& target, std::string_view dotted, const json& value) {
    json* node = &target;
    std::size_t start = 0;
    while (true) {
        const auto dot = dotted.find('.', start);
        const std::string key(dotted.substr(start, dot == std::string_view::npos ? dotted.npos : dot - start));
        if (key.empty()) throw ConfigError("empty segment in key '" + std::string(dotted) + "'");
        if (dot == std::string_view::npos) {
            (*node)[key] = value;
            return;
        }
        if (!node->contains(key)) (*node)[key] = json::object();
        node = &(*node)[key];
        if (!node->is_object()) throw ConfigError("key '" + std::string(dotted) + "' crosses a non-object");
        start = dot + 1;
    }
}

inline json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

// Typed accessors over a resolved config; range checks stay with the library
// types' validate().
inline double get_number(const json& cfg, const char* key) { return cfg.at(key).get<double>(); }

inline std::string get_string(const json& cfg, const char* key) { return cfg.at(key).get<std::string>(); }

inline std::uint64_t get_count(const json& cfg, const char* key) {
    const json& v = cfg.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0)) {
        throw ConfigError("config key '" + std::string(key) + "' must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

inline std::vector<double> get_numbers(const json& cfg, const char* key) {
    std::vector<double> out;
    for (const auto& v : cfg.at(key)) {
        if (!v.is_number()) throw ConfigError("config key '" + std::string(key) + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline std::vector<std::uint64_t> get_counts(const json& cfg, const char* key) {
    std::vector<std::uint64_t> out;
    for (const auto& v : cfg.at(key)) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
            throw ConfigError("config key '" + std::string(key) + "' must hold non-negative integers");
        }
        out.push_back(v.get<std::uint64_t>());
    }
    return out;
}

// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << h;
    return out.str();
}

}  // namespace cfpe::cli
