#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "nmlab/errors.hpp"

namespace nmlab::detail {

// Rejects any key of `j` outside `keys`.
inline void require_keys(const nlohmann::json& j, std::initializer_list<const char*> keys, const std::string& what) {
    if (!j.is_object()) throw ParameterError("object", what + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (auto k : keys) ok = ok || it.key() == k;
        if (!ok) throw ParameterError("unknown field", what + " has no field '" + it.key() + "'");
    }
}

}  // namespace nmlab::detail
