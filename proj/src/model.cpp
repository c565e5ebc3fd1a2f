#include "rankleak/model.hpp"

#include <algorithm>
#include <bit>
#include <unordered_set>

namespace rankleak {

std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::EmptyDomain: return "empty_domain";
        case Errc::NoPrivateAttribute: return "no_private_attribute";
        case Errc::NoPublicAttribute: return "no_public_attribute";
        case Errc::DuplicateAttributeName: return "duplicate_attribute_name";
        case Errc::DuplicateTuple: return "duplicate_tuple";
        case Errc::SchemaMismatch: return "schema_mismatch";
        case Errc::UnknownTuple: return "unknown_tuple";
        case Errc::RateLimited: return "rate_limited";
        case Errc::UnsupportedPredicate: return "unsupported_predicate";
        case Errc::InsertionForbidden: return "insertion_forbidden";
        case Errc::BadRequest: return "bad_request";
        case Errc::BindFailure: return "bind_failure";
        case Errc::ConnectionFailure: return "connection_failure";
        case Errc::SpaceTooLarge: return "space_too_large";
        case Errc::ImpossibleCardinality: return "impossible_cardinality";
        case Errc::UnknownValue: return "unknown_value";
        case Errc::NullNotAllowed: return "null_not_allowed";
        case Errc::RaggedRow: return "ragged_row";
        case Errc::VictimNotFound: return "victim_not_found";
        case Errc::InvalidArgument: return "invalid_argument";
        case Errc::Io: return "io";
    }
    return "unknown";
}

namespace {

std::size_t mix(std::size_t seed, std::size_t value) {
    return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

std::optional<std::size_t> Schema::find(std::string_view name) const {
    for (std::size_t i = 0; i < m_attributes.size(); ++i) {
        if (m_attributes[i].name == name) return i;
    }
    return std::nullopt;
}

std::optional<Value> Schema::value_of(std::size_t index, std::string_view label) const {
    const auto& domain = m_attributes.at(index).domain;
    for (std::size_t v = 0; v < domain.size(); ++v) {
        if (domain[v] == label) return static_cast<Value>(v);
    }
    return std::nullopt;
}

void Schema::check_values(std::span<const Value> values) const {
    if (values.size() != m_attributes.size()) {
        throw Error(Errc::SchemaMismatch, "tuple has " + std::to_string(values.size()) + " values, schema has " +
                                              std::to_string(m_attributes.size()) + " attributes");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& attr = m_attributes[i];
        if (values[i] == kNull) {
            if (!attr.allows_null) throw Error(Errc::SchemaMismatch, "null on attribute " + attr.name);
            continue;
        }
        if (values[i] < 0 || static_cast<std::size_t>(values[i]) >= attr.domain.size()) {
            throw Error(Errc::SchemaMismatch, "value " + std::to_string(values[i]) + " outside domain of " + attr.name);
        }
    }
}

bool Schema::operator==(const Schema& other) const {
    if (m_public_count != other.m_public_count || m_attributes.size() != other.m_attributes.size()) return false;
    for (std::size_t i = 0; i < m_attributes.size(); ++i) {
        const auto& a = m_attributes[i];
        const auto& b = other.m_attributes[i];
        if (a.name != b.name || a.visibility != b.visibility || a.domain != b.domain || a.allows_null != b.allows_null) {
            return false;
        }
    }
    return true;
}

Schema build_schema(std::vector<AttributeDescriptor> descriptors) {
    std::unordered_set<std::string> names;
    std::size_t publics = 0;
    for (const auto& d : descriptors) {
        if (d.domain.size() < 2) throw Error(Errc::EmptyDomain, "attribute " + d.name + " needs at least two values");
        std::unordered_set<std::string> labels(d.domain.begin(), d.domain.end());
        if (labels.size() != d.domain.size()) {
            throw Error(Errc::EmptyDomain, "attribute " + d.name + " has repeated domain labels");
        }
        if (!names.insert(d.name).second) throw Error(Errc::DuplicateAttributeName, "duplicate attribute " + d.name);
        if (d.visibility == Visibility::Public) ++publics;
    }
    if (publics == 0) throw Error(Errc::NoPublicAttribute, "schema needs at least one public attribute");
    if (publics == descriptors.size()) throw Error(Errc::NoPrivateAttribute, "schema needs at least one private attribute");

    Schema schema;
    schema.m_public_count = publics;
    schema.m_declared_order.resize(descriptors.size());
    std::size_t next_public = 0;
    std::size_t next_private = publics;
    for (std::size_t i = 0; i < descriptors.size(); ++i) {
        schema.m_declared_order[i] = descriptors[i].visibility == Visibility::Public ? next_public++ : next_private++;
    }
    schema.m_attributes.resize(descriptors.size());
    for (std::size_t i = 0; i < descriptors.size(); ++i) {
        schema.m_attributes[schema.m_declared_order[i]] = std::move(descriptors[i]);
    }
    return schema;
}

namespace {

std::vector<std::string> numbered_labels(std::size_t size) {
    std::vector<std::string> labels(size);
    for (std::size_t v = 0; v < size; ++v) labels[v] = std::to_string(v);
    return labels;
}

}  // namespace

Schema make_categorical_schema(std::size_t m, std::size_t m_prime, std::span<const std::size_t> public_domains,
                               std::span<const std::size_t> private_domains) {
    if (public_domains.size() != m || private_domains.size() != m_prime) {
        throw Error(Errc::InvalidArgument, "domain size list does not match attribute counts");
    }
    std::vector<AttributeDescriptor> descriptors;
    descriptors.reserve(m + m_prime);
    for (std::size_t i = 0; i < m; ++i) {
        descriptors.push_back({"A" + std::to_string(i + 1), Visibility::Public, numbered_labels(public_domains[i]), false});
    }
    for (std::size_t j = 0; j < m_prime; ++j) {
        descriptors.push_back(
            {"B" + std::to_string(j + 1), Visibility::Private, numbered_labels(private_domains[j]), false});
    }
    return build_schema(std::move(descriptors));
}

Schema make_boolean_schema(std::size_t m, std::size_t m_prime) {
    std::vector<std::size_t> pub(m, 2);
    std::vector<std::size_t> priv(m_prime, 2);
    return make_categorical_schema(m, m_prime, pub, priv);
}

std::size_t ValuesHash::operator()(const std::vector<Value>& values) const noexcept {
    std::size_t seed = values.size();
    for (Value v : values) seed = mix(seed, static_cast<std::size_t>(static_cast<std::uint32_t>(v)));
    return seed;
}

Database::Database(std::shared_ptr<const Schema> schema) : m_schema(std::move(schema)) {
    if (!m_schema) throw Error(Errc::InvalidArgument, "database needs a schema");
}

const Tuple* Database::find(TupleId id) const {
    auto it = m_by_id.find(id);
    return it == m_by_id.end() ? nullptr : &m_tuples[it->second];
}

const Tuple& Database::at(TupleId id) const {
    const Tuple* t = find(id);
    if (t == nullptr) throw Error(Errc::UnknownTuple, "no tuple with id " + std::to_string(id));
    return *t;
}

std::optional<TupleId> Database::id_of_values(std::span<const Value> values) const {
    auto it = m_by_values.find(std::vector<Value>(values.begin(), values.end()));
    if (it == m_by_values.end()) return std::nullopt;
    return it->second;
}

TupleId Database::insert(std::vector<Value> values, Provenance provenance, std::optional<TupleId> id) {
    m_schema->check_values(values);
    if (m_by_values.contains(values)) throw Error(Errc::DuplicateTuple, "value combination already present");
    const TupleId assigned = id.value_or(m_next_id);
    if (m_by_id.contains(assigned)) throw Error(Errc::InvalidArgument, "id " + std::to_string(assigned) + " in use");
    m_by_values.emplace(values, assigned);
    m_by_id.emplace(assigned, m_tuples.size());
    m_tuples.push_back(Tuple{assigned, std::move(values), provenance});
    m_next_id = std::max(m_next_id, assigned + 1);
    return assigned;
}

void Database::replace_values(TupleId id, std::vector<Value> values) {
    auto it = m_by_id.find(id);
    if (it == m_by_id.end()) throw Error(Errc::UnknownTuple, "no tuple with id " + std::to_string(id));
    m_schema->check_values(values);
    Tuple& t = m_tuples[it->second];
    if (t.values == values) return;
    if (m_by_values.contains(values)) throw Error(Errc::DuplicateTuple, "value combination already present");
    m_by_values.erase(t.values);
    m_by_values.emplace(values, id);
    t.values = std::move(values);
}

Database insert_tuple(Database db, Tuple t) {
    db.insert(std::move(t.values), t.provenance, t.id);
    return db;
}

ValueSet ValueSet::single(std::size_t domain, Value value) {
    if (value < 0 || static_cast<std::size_t>(value) >= domain) {
        throw Error(Errc::SchemaMismatch, "point value outside domain");
    }
    ValueSet s;
    s.m_domain = domain;
    s.m_bits.assign((domain + 63) / 64, 0);
    s.m_bits[static_cast<std::size_t>(value) >> 6] |= 1ULL << (static_cast<std::size_t>(value) & 63);
    s.m_count = 1;
    return s;
}

ValueSet ValueSet::full(std::size_t domain) {
    if (domain == 0) throw Error(Errc::EmptyDomain, "empty predicate domain");
    ValueSet s;
    s.m_domain = domain;
    s.m_bits.assign((domain + 63) / 64, ~0ULL);
    if (domain % 64 != 0) s.m_bits.back() = (1ULL << (domain % 64)) - 1;
    s.m_count = domain;
    return s;
}

ValueSet ValueSet::of(std::size_t domain, std::span<const Value> values) {
    ValueSet s;
    s.m_domain = domain;
    s.m_bits.assign((domain + 63) / 64, 0);
    for (Value v : values) {
        if (v < 0 || static_cast<std::size_t>(v) >= domain) throw Error(Errc::SchemaMismatch, "predicate value outside domain");
        s.m_bits[static_cast<std::size_t>(v) >> 6] |= 1ULL << (static_cast<std::size_t>(v) & 63);
    }
    s.m_count = 0;
    for (auto word : s.m_bits) s.m_count += static_cast<std::size_t>(std::popcount(word));
    if (s.m_count == 0) throw Error(Errc::BadRequest, "predicate must be non-empty");
    return s;
}

std::optional<Value> ValueSet::sole() const {
    if (m_count != 1) return std::nullopt;
    for (std::size_t w = 0; w < m_bits.size(); ++w) {
        if (m_bits[w] != 0) return static_cast<Value>(w * 64 + static_cast<std::size_t>(std::countr_zero(m_bits[w])));
    }
    return std::nullopt;
}

std::vector<Value> ValueSet::values() const {
    std::vector<Value> out;
    out.reserve(m_count);
    for (std::size_t v = 0; v < m_domain; ++v) {
        if (contains(static_cast<Value>(v))) out.push_back(static_cast<Value>(v));
    }
    return out;
}

std::size_t ValueSet::hash() const noexcept {
    std::size_t seed = m_domain;
    for (auto word : m_bits) seed = mix(seed, static_cast<std::size_t>(word));
    return seed;
}

Query::Query(std::vector<ValueSet> predicates) : m_predicates(std::move(predicates)) {
    for (const auto& p : m_predicates) {
        if (p.size() == 0) throw Error(Errc::BadRequest, "predicate must be non-empty");
    }
}

Query Query::point(const Schema& schema, std::span<const Value> values) {
    if (values.size() != schema.arity()) throw Error(Errc::SchemaMismatch, "point query arity mismatch");
    std::vector<ValueSet> predicates;
    predicates.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) predicates.push_back(ValueSet::single(schema.domain_size(i), values[i]));
    return Query(std::move(predicates));
}

Query Query::star(const Schema& schema) {
    std::vector<ValueSet> predicates;
    predicates.reserve(schema.arity());
    for (std::size_t i = 0; i < schema.arity(); ++i) predicates.push_back(ValueSet::full(schema.domain_size(i)));
    return Query(std::move(predicates));
}

void Query::set(std::size_t index, ValueSet predicate) {
    if (predicate.size() == 0) throw Error(Errc::BadRequest, "predicate must be non-empty");
    m_predicates.at(index) = std::move(predicate);
}

void Query::set_point(std::size_t index, Value value) {
    m_predicates.at(index) = ValueSet::single(m_predicates.at(index).domain(), value);
}

Query Query::with(std::size_t index, ValueSet predicate) const {
    Query q = *this;
    q.set(index, std::move(predicate));
    return q;
}

Query Query::with_point(std::size_t index, Value value) const {
    Query q = *this;
    q.set_point(index, value);
    return q;
}

PredicateKind Query::kind(std::size_t index) const {
    const auto& p = m_predicates.at(index);
    if (p.is_single()) return PredicateKind::Point;
    if (p.is_full()) return PredicateKind::Star;
    return PredicateKind::In;
}

bool Query::is_point() const {
    return std::all_of(m_predicates.begin(), m_predicates.end(), [](const ValueSet& p) { return p.is_single(); });
}

void Query::check(const Schema& schema) const {
    if (m_predicates.size() != schema.arity()) throw Error(Errc::SchemaMismatch, "query arity mismatch");
    for (std::size_t i = 0; i < m_predicates.size(); ++i) {
        if (m_predicates[i].domain() != schema.domain_size(i)) {
            throw Error(Errc::SchemaMismatch, "predicate domain mismatch on " + schema.attribute(i).name);
        }
    }
}

std::size_t Query::hash() const noexcept {
    std::size_t seed = m_predicates.size();
    for (const auto& p : m_predicates) seed = mix(seed, p.hash());
    return seed;
}

std::optional<std::size_t> RankedAnswer::rank_of(TupleId id) const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].id == id) return i + 1;
    }
    return std::nullopt;
}

AnswerEntry project_public(const Tuple& t, const Schema& schema) {
    AnswerEntry e;
    e.id = t.id;
    e.public_values.assign(t.values.begin(), t.values.begin() + static_cast<std::ptrdiff_t>(schema.public_count()));
    return e;
}

}  // namespace rankleak
