#pragma once

// JSON form of a reservoir:
//   {"types":[{"mean":0.9,"prob":0.5,"dist":"bernoulli"},
//             {"mean":0.5,"prob":0.5,"dist":{"support":[0,0.5,1],"weights":[0.25,0.5,0.25]}}]}
// Unknown keys are rejected at every level. "dist" defaults to "bernoulli".

#include <initializer_list>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "rbandit/errors.hpp"
#include "rbandit/reservoir.hpp"

namespace rbandit {

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                                std::string_view where) {
    if (!obj.is_object()) fail(ErrorCode::ConfigInvalid, std::string(where) + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) fail(ErrorCode::ConfigInvalid, "unknown field '" + key + "' in " + std::string(where));
    }
}

inline double require_number(const nlohmann::json& obj, const char* key, std::string_view where) {
    if (!obj.contains(key) || !obj.at(key).is_number())
        fail(ErrorCode::ConfigInvalid, std::string(where) + ": missing numeric field '" + key + "'");
    return obj.at(key).get<double>();
}

inline std::vector<double> number_array(const nlohmann::json& v, std::string_view where) {
    if (!v.is_array()) fail(ErrorCode::ConfigInvalid, std::string(where) + " must be an array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) fail(ErrorCode::ConfigInvalid, std::string(where) + " must contain numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

} // namespace detail

inline std::vector<ArmTypeSpec> types_from_json(const nlohmann::json& doc) {
    detail::reject_unknown_keys(doc, {"types"}, "reservoir");
    if (!doc.contains("types") || !doc.at("types").is_array())
        fail(ErrorCode::ConfigInvalid, "reservoir: 'types' must be an array");
    std::vector<ArmTypeSpec> types;
    for (const auto& t : doc.at("types")) {
        detail::reject_unknown_keys(t, {"mean", "prob", "dist"}, "reservoir type");
        ArmTypeSpec spec;
        spec.mean = detail::require_number(t, "mean", "reservoir type");
        spec.probability = detail::require_number(t, "prob", "reservoir type");
        if (t.contains("dist")) {
            const auto& d = t.at("dist");
            if (d.is_string()) {
                if (d.get<std::string>() != "bernoulli")
                    fail(ErrorCode::ConfigInvalid, "unknown distribution '" + d.get<std::string>() + "'");
            } else {
                detail::reject_unknown_keys(d, {"support", "weights"}, "discrete distribution");
                if (!d.contains("support") || !d.contains("weights"))
                    fail(ErrorCode::ConfigInvalid, "discrete distribution needs 'support' and 'weights'");
                spec.distribution = Discrete{detail::number_array(d.at("support"), "support"),
                                             detail::number_array(d.at("weights"), "weights")};
            }
        }
        types.push_back(std::move(spec));
    }
    return types;
}

/// Parses and validates. Validation errors keep their own codes.
inline Reservoir reservoir_from_json(const nlohmann::json& doc) { return Reservoir(types_from_json(doc)); }

inline nlohmann::json to_json(const std::vector<ArmTypeSpec>& types) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : types) {
        nlohmann::json jt{{"mean", t.mean}, {"prob", t.probability}};
        if (const auto* d = std::get_if<Discrete>(&t.distribution))
            jt["dist"] = {{"support", d->support}, {"weights", d->weights}};
        else
            jt["dist"] = "bernoulli";
        arr.push_back(std::move(jt));
    }
    return {{"types", arr}};
}

inline nlohmann::json to_json(const Reservoir& r) { return to_json(r.types()); }

} // namespace rbandit
