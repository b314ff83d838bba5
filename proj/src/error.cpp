#include "stagecraft/error.hpp"

namespace stagecraft
{

const char* error_code_name(ErrorCode code)
{
    switch (code)
    {
        case ErrorCode::syntax: return "syntax";
        case ErrorCode::schema_version: return "schema-version";
        case ErrorCode::dangling_reference: return "dangling-reference";
        case ErrorCode::duplicate_name: return "duplicate-name";
        case ErrorCode::illegal_channel: return "illegal-channel";
        case ErrorCode::invalid_value: return "invalid-value";
        case ErrorCode::unknown_field: return "unknown-field";
        case ErrorCode::type_mismatch: return "type-mismatch";
        case ErrorCode::unknown_ease: return "unknown-ease";
        case ErrorCode::overflow: return "overflow";
        case ErrorCode::duplicate_key: return "duplicate-key";
        case ErrorCode::missing_total: return "missing-total";
        case ErrorCode::schedule: return "schedule";
        case ErrorCode::contradiction: return "contradiction";
        case ErrorCode::io: return "io";
        case ErrorCode::internal: return "internal";
    }
    return "unknown";
}

}  // namespace stagecraft
