#include "rankleak/wire.hpp"

namespace rankleak {

json schema_to_json(const Schema& schema) {
    json attrs = json::array();
    for (const auto& a : schema.attributes()) {
        attrs.push_back({{"name", a.name},
                         {"visibility", a.visibility == Visibility::Public ? "public" : "private"},
                         {"domain", a.domain},
                         {"allows_null", a.allows_null}});
    }
    return json{{"attributes", attrs}};
}

Schema schema_from_json(const json& j) {
    if (!j.is_object() || !j.contains("attributes") || !j["attributes"].is_array()) {
        throw Error(Errc::BadRequest, "schema JSON needs an \"attributes\" array");
    }
    std::vector<AttributeDescriptor> descriptors;
    for (const auto& a : j["attributes"]) {
        AttributeDescriptor d;
        try {
            d.name = a.at("name").get<std::string>();
            const auto vis = a.at("visibility").get<std::string>();
            if (vis != "public" && vis != "private") {
                throw Error(Errc::BadRequest, "visibility of " + d.name + " must be public or private");
            }
            d.visibility = vis == "public" ? Visibility::Public : Visibility::Private;
            for (const auto& label : a.at("domain")) {
                d.domain.push_back(label.is_string() ? label.get<std::string>() : label.dump());
            }
            d.allows_null = a.value("allows_null", false);
        } catch (const json::exception& e) {
            throw Error(Errc::BadRequest, std::string("malformed attribute descriptor: ") + e.what());
        }
        descriptors.push_back(std::move(d));
    }
    return build_schema(std::move(descriptors));
}

json query_to_json(const Query& q) {
    json preds = json::array();
    for (const auto& p : q.predicates()) preds.push_back(p.values());
    return preds;
}

Query query_from_json(const json& predicates, const Schema& schema) {
    if (!predicates.is_array() || predicates.size() != schema.arity()) {
        throw Error(Errc::BadRequest, "predicates must list one set per attribute");
    }
    std::vector<ValueSet> sets;
    sets.reserve(schema.arity());
    for (std::size_t i = 0; i < schema.arity(); ++i) {
        const auto& p = predicates[i];
        if (!p.is_array() || p.empty()) throw Error(Errc::BadRequest, "predicate sets must be non-empty arrays");
        std::vector<Value> vals;
        for (const auto& v : p) {
            if (!v.is_number_integer()) throw Error(Errc::BadRequest, "predicate values must be integers");
            const auto raw = v.get<std::int64_t>();
            if (raw < 0 || static_cast<std::size_t>(raw) >= schema.domain_size(i)) {
                throw Error(Errc::BadRequest, "predicate value outside domain");
            }
            vals.push_back(static_cast<Value>(raw));
        }
        sets.push_back(ValueSet::of(schema.domain_size(i), vals));
    }
    return Query(std::move(sets));
}

json answer_to_json(const RankedAnswer& answer) {
    json entries = json::array();
    for (const auto& e : answer.entries) entries.push_back({{"id", e.id}, {"public", e.public_values}});
    return json{{"ok", true}, {"entries", entries}};
}

RankedAnswer answer_from_json(const json& j, std::size_t k) {
    RankedAnswer a;
    a.k = k;
    for (const auto& e : j.at("entries")) {
        a.entries.push_back(AnswerEntry{e.at("id").get<TupleId>(), e.at("public").get<std::vector<Value>>()});
    }
    return a;
}

std::string answer_payload(const RankedAnswer& answer) { return answer_to_json(answer).dump(); }

std::string_view wire_error_code(Errc code) {
    switch (code) {
        case Errc::RateLimited: return "rate_limited";
        case Errc::UnsupportedPredicate: return "unsupported_predicate";
        case Errc::InsertionForbidden: return "insertion_forbidden";
        case Errc::DuplicateTuple: return "duplicate_tuple";
        default: return "bad_request";
    }
}

Errc errc_from_wire(std::string_view code) {
    if (code == "rate_limited") return Errc::RateLimited;
    if (code == "unsupported_predicate") return Errc::UnsupportedPredicate;
    if (code == "insertion_forbidden") return Errc::InsertionForbidden;
    if (code == "duplicate_tuple") return Errc::DuplicateTuple;
    return Errc::BadRequest;
}

std::string error_payload(Errc code, std::string_view message) {
    return json{{"ok", false}, {"error", wire_error_code(code)}, {"message", message}}.dump();
}

namespace {

std::vector<Value> values_from_json(const json& j, const Schema& schema) {
    if (!j.is_array() || j.size() != schema.arity()) throw Error(Errc::BadRequest, "values must list one per attribute");
    std::vector<Value> values;
    for (const auto& v : j) {
        if (v.is_null()) {
            values.push_back(kNull);
        } else if (v.is_number_integer()) {
            values.push_back(static_cast<Value>(v.get<std::int64_t>()));
        } else {
            throw Error(Errc::BadRequest, "values must be integers or null");
        }
    }
    return values;
}

}  // namespace

std::string handle_request(QueryEngine& engine, ActorId actor, std::string_view line) {
    try {
        json req = json::parse(line, nullptr, false);
        if (req.is_discarded() || !req.is_object() || !req.contains("op") || !req["op"].is_string()) {
            return error_payload(Errc::BadRequest, "malformed request");
        }
        const auto op = req["op"].get<std::string>();
        const Schema& schema = engine.schema();
        if (op == "query") {
            if (!req.contains("predicates")) return error_payload(Errc::BadRequest, "missing predicates");
            std::optional<std::size_t> k;
            if (req.contains("k")) {
                if (!req["k"].is_number_integer() || req["k"].get<std::int64_t>() < 1) {
                    return error_payload(Errc::BadRequest, "k must be a positive integer");
                }
                k = req["k"].get<std::size_t>();
            }
            Query q = query_from_json(req["predicates"], schema);
            return answer_payload(engine.answer(q, actor, k));
        }
        if (op == "insert") {
            if (!req.contains("values")) return error_payload(Errc::BadRequest, "missing values");
            auto values = values_from_json(req["values"], schema);
            try {
                schema.check_values(values);
            } catch (const Error& e) {
                return error_payload(Errc::BadRequest, e.what());
            }
            const TupleId id = engine.insert(std::move(values), actor);
            return json{{"ok", true}, {"id", id}}.dump();
        }
        if (op == "schema") {
            json reply = schema_to_json(schema);
            reply["ok"] = true;
            reply["k"] = engine.config().k;
            reply["query_kind"] = query_kind_name(engine.config().query_kind);
            reply["insertion_allowed"] = engine.config().insertion_allowed;
            return reply.dump();
        }
        return error_payload(Errc::BadRequest, "unknown op");
    } catch (const Error& e) {
        return error_payload(e.code(), e.what());
    } catch (const std::exception& e) {
        return error_payload(Errc::BadRequest, e.what());
    }
}

}  // namespace rankleak
