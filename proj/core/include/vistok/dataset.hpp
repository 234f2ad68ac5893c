#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vistok/chatml.hpp"

namespace vistok {

struct dataset_error : std::runtime_error {
    enum class kind {
        bad_json,    // the line is not valid JSON
        bad_schema,  // valid JSON, but not a conversation record
    };
    kind which;
    dataset_error(kind k, const std::string& msg) : std::runtime_error(msg), which(k) {}
};

/// Decodes one dataset record of the form
/// {"messages": [{"role": "...", "content": [ ...segments... ]}]}.
std::vector<message> conversation_from_json(std::string_view json_text);

/// Encodes a conversation as a single-line JSON record (inverse of the above).
std::string conversation_to_json(const std::vector<message>& msgs);

struct validation_report {
    bool ok = true;
    std::string error;       // empty when ok
    std::size_t offset = 0;  // byte offset into the serialized text, when applicable
};

/// Full round-trip check for one record: decode, serialize, reparse, compare
/// structurally. Never throws; failures land in the report.
validation_report validate_conversation_json(std::string_view json_text);

}  // namespace vistok
