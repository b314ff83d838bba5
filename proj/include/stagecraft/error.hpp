#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace stagecraft
{

enum class ErrorCode
{
    syntax,
    schema_version,
    dangling_reference,
    duplicate_name,
    illegal_channel,
    invalid_value,
    unknown_field,
    type_mismatch,
    unknown_ease,
    overflow,
    duplicate_key,
    missing_total,
    schedule,
    contradiction,
    io,
    internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& message, std::optional<std::size_t> offset = std::nullopt)
        : std::runtime_error(message), code_(code), offset_(offset)
    {
    }

    ErrorCode code() const noexcept { return code_; }

    // Byte offset into the parsed document, for syntax errors.
    std::optional<std::size_t> offset() const noexcept { return offset_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> offset_;
};

}  // namespace stagecraft
