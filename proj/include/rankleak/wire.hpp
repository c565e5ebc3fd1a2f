#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "rankleak/engine.hpp"

namespace rankleak {

using json = nlohmann::json;

/// Sidecar / wire form: {"attributes":[{"name","visibility","domain","allows_null"}]}
/// listed in internal order.
json schema_to_json(const Schema& schema);
/// Accepts attributes in any order; publics are moved first.
Schema schema_from_json(const json& j);

json query_to_json(const Query& q);
Query query_from_json(const json& predicates, const Schema& schema);

json answer_to_json(const RankedAnswer& answer);
RankedAnswer answer_from_json(const json& j, std::size_t k);

/// Exact bytes the server writes for a successful query (without newline).
std::string answer_payload(const RankedAnswer& answer);

/// Wire error code for a library error: rate_limited, unsupported_predicate,
/// insertion_forbidden, duplicate_tuple, or bad_request.
std::string_view wire_error_code(Errc code);
std::string error_payload(Errc code, std::string_view message);
Errc errc_from_wire(std::string_view code);

/// Handles one request line on behalf of `actor` and returns the reply line
/// (without newline). Never throws.
std::string handle_request(QueryEngine& engine, ActorId actor, std::string_view line);

}  // namespace rankleak
