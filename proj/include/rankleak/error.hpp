#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rankleak {

enum class Errc {
    EmptyDomain,
    NoPrivateAttribute,
    NoPublicAttribute,
    DuplicateAttributeName,
    DuplicateTuple,
    SchemaMismatch,
    UnknownTuple,
    RateLimited,
    UnsupportedPredicate,
    InsertionForbidden,
    BadRequest,
    BindFailure,
    ConnectionFailure,
    SpaceTooLarge,
    ImpossibleCardinality,
    UnknownValue,
    NullNotAllowed,
    RaggedRow,
    VictimNotFound,
    InvalidArgument,
    Io,
};

std::string_view errc_name(Errc code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (CLI exit codes, wire error replies) can map it without parsing text.
class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), m_code(code) {}
    Errc code() const noexcept { return m_code; }

  private:
    Errc m_code;
};

}  // namespace rankleak
