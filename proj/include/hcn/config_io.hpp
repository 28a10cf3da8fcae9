#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "hcn/error.hpp"
#include "hcn/model.hpp"

namespace hcn {

/// Scenario file layout:
///
///   {
///     "noise": 0.0,
///     "processing_gain": 25.0,
///     "tiers": [
///       {"power": 16, "intensity": 0.1, "bias": 1,
///        "pathloss": {"family": "bounded_power", "alpha": 3},
///        "fading": {"family": "nakagami", "m": 5}}
///     ]
///   }
///
/// pathloss.family: bounded_power (1/(1+x^a)) | capped_power (min(1, x^-a)).
/// fading.family: nakagami (needs m) | rayleigh. "bias" defaults to 1,
/// "noise" to 0 and "processing_gain" to 1.
class ConfigError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline double required_number(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) {
        throw ConfigError(where + ": missing field '" + key + "'");
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(where + ": field '" + key + "' must be a number");
    }
    return v.get<double>();
}

inline double optional_number(const nlohmann::json& obj, const char* key, double fallback, const std::string& where) {
    return obj.contains(key) ? required_number(obj, key, where) : fallback;
}

inline std::string required_string(const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj.at(key).is_string()) {
        throw ConfigError(where + ": field '" + key + "' must be a string");
    }
    return obj.at(key).get<std::string>();
}

}  // namespace detail

/// Builds a NetworkConfig from parsed JSON. The result is not yet validated.
inline NetworkConfig config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("config: top level must be an object");
    }
    NetworkConfig cfg;
    cfg.noise = detail::optional_number(doc, "noise", 0.0, "config");
    cfg.processing_gain = detail::optional_number(doc, "processing_gain", 1.0, "config");
    if (!doc.contains("tiers") || !doc.at("tiers").is_array()) {
        throw ConfigError("config: 'tiers' must be an array");
    }
    std::size_t index = 0;
    for (const auto& t : doc.at("tiers")) {
        const std::string where = "tiers[" + std::to_string(index++) + "]";
        if (!t.is_object()) {
            throw ConfigError(where + ": must be an object");
        }
        TierConfig tier{detail::required_number(t, "power", where), detail::required_number(t, "intensity", where),
                        detail::optional_number(t, "bias", 1.0, where), PathLossModel::bounded_power(4.0),
                        FadingModel::rayleigh()};

        if (!t.contains("pathloss") || !t.at("pathloss").is_object()) {
            throw ConfigError(where + ": 'pathloss' must be an object");
        }
        const auto& pl = t.at("pathloss");
        const std::string pl_where = where + ".pathloss";
        const auto pl_family = detail::required_string(pl, "family", pl_where);
        const double alpha = detail::required_number(pl, "alpha", pl_where);
        if (pl_family == "bounded_power") {
            tier.path_loss = PathLossModel::bounded_power(alpha);
        } else if (pl_family == "capped_power") {
            tier.path_loss = PathLossModel::capped_power(alpha);
        } else {
            throw ConfigError(pl_where + ": unknown family '" + pl_family + "'");
        }

        if (!t.contains("fading") || !t.at("fading").is_object()) {
            throw ConfigError(where + ": 'fading' must be an object");
        }
        const auto& fd = t.at("fading");
        const std::string fd_where = where + ".fading";
        const auto fd_family = detail::required_string(fd, "family", fd_where);
        if (fd_family == "nakagami") {
            const double m = detail::required_number(fd, "m", fd_where);
            if (!(m > 0.0)) {
                throw ConfigError(fd_where + ": m must be positive");
            }
            tier.fading = FadingModel::nakagami(m);
        } else if (fd_family == "rayleigh") {
            tier.fading = FadingModel::rayleigh();
        } else {
            throw ConfigError(fd_where + ": unknown family '" + fd_family + "'");
        }
        cfg.tiers.push_back(std::move(tier));
    }
    return cfg;
}

inline NetworkConfig parse_config(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return config_from_json(doc);
}

inline NetworkConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

/// Inverse of config_from_json for the built-in families.
inline nlohmann::json config_to_json(const NetworkConfig& cfg) {
    nlohmann::json doc;
    doc["noise"] = cfg.noise;
    doc["processing_gain"] = cfg.processing_gain;
    doc["tiers"] = nlohmann::json::array();
    for (const auto& t : cfg.tiers) {
        nlohmann::json pl;
        switch (t.path_loss.family()) {
            case PathLossFamily::bounded_power: pl["family"] = "bounded_power"; break;
            case PathLossFamily::capped_power: pl["family"] = "capped_power"; break;
            case PathLossFamily::custom: throw ConfigError("config: custom path loss cannot be serialized");
        }
        pl["alpha"] = t.path_loss.alpha();
        nlohmann::json fd;
        switch (t.fading.family()) {
            case FadingFamily::nakagami: fd = {{"family", "nakagami"}, {"m", t.fading.shape()}}; break;
            case FadingFamily::rayleigh: fd = {{"family", "rayleigh"}}; break;
            case FadingFamily::custom: throw ConfigError("config: custom fading cannot be serialized");
        }
        doc["tiers"].push_back(
            {{"power", t.power}, {"intensity", t.intensity}, {"bias", t.bias}, {"pathloss", pl}, {"fading", fd}});
    }
    return doc;
}

}  // namespace hcn
