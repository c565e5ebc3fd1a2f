#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rankleak/error.hpp"

namespace rankleak {

/// Domain values are indices into an attribute's label list. Labels only
/// matter at the CSV/CLI boundary.
using Value = std::int32_t;
inline constexpr Value kNull = -1;

using TupleId = std::uint64_t;

enum class Visibility { Public, Private };
enum class Provenance { BonaFide, Inserted };

struct AttributeDescriptor {
    std::string name;
    Visibility visibility = Visibility::Public;
    std::vector<std::string> domain;
    bool allows_null = false;
};

/// Attribute list with publics stored first, then privates. An attribute's
/// position in this internal order is its identity everywhere else.
class Schema {
  public:
    const AttributeDescriptor& attribute(std::size_t index) const { return m_attributes.at(index); }
    std::span<const AttributeDescriptor> attributes() const { return m_attributes; }

    std::size_t arity() const { return m_attributes.size(); }
    std::size_t public_count() const { return m_public_count; }
    std::size_t private_count() const { return m_attributes.size() - m_public_count; }

    /// Internal index of the j-th private attribute (0-based).
    std::size_t private_index(std::size_t j) const { return m_public_count + j; }
    bool is_public(std::size_t index) const { return index < m_public_count; }

    std::size_t domain_size(std::size_t index) const { return m_attributes.at(index).domain.size(); }

    std::optional<std::size_t> find(std::string_view name) const;
    std::optional<Value> value_of(std::size_t index, std::string_view label) const;

    /// Internal indices in the order the descriptors were originally declared.
    std::span<const std::size_t> declared_order() const { return m_declared_order; }

    /// Throws SchemaMismatch unless `values` has the schema's arity and every
    /// entry is in range (or Null where allowed).
    void check_values(std::span<const Value> values) const;

    bool operator==(const Schema& other) const;

  private:
    friend Schema build_schema(std::vector<AttributeDescriptor> descriptors);

    std::vector<AttributeDescriptor> m_attributes;
    std::vector<std::size_t> m_declared_order;
    std::size_t m_public_count = 0;
};

/// Validates descriptors and reorders publics ahead of privates.
/// Errors: EmptyDomain, NoPublicAttribute, NoPrivateAttribute, DuplicateAttributeName.
Schema build_schema(std::vector<AttributeDescriptor> descriptors);

/// Convenience for synthetic data: `m` public and `m_prime` private attributes
/// named A1..Am and B1..Bm', each with the given domain size.
Schema make_categorical_schema(std::size_t m, std::size_t m_prime, std::span<const std::size_t> public_domains,
                               std::span<const std::size_t> private_domains);
Schema make_boolean_schema(std::size_t m, std::size_t m_prime);

struct Tuple {
    TupleId id = 0;
    std::vector<Value> values;
    Provenance provenance = Provenance::BonaFide;
};

struct ValuesHash {
    std::size_t operator()(const std::vector<Value>& values) const noexcept;
};

/// Duplicate-free tuple collection. Copying a Database yields an independent
/// snapshot; mutation happens only through insert/replace under the caller's
/// exclusive access.
class Database {
  public:
    explicit Database(std::shared_ptr<const Schema> schema);

    const Schema& schema() const { return *m_schema; }
    const std::shared_ptr<const Schema>& schema_ptr() const { return m_schema; }

    std::size_t size() const { return m_tuples.size(); }
    bool empty() const { return m_tuples.empty(); }
    std::span<const Tuple> tuples() const { return m_tuples; }

    const Tuple* find(TupleId id) const;
    const Tuple& at(TupleId id) const;
    std::optional<TupleId> id_of_values(std::span<const Value> values) const;

    /// Throws SchemaMismatch or DuplicateTuple. Without an explicit id the
    /// next free id (max + 1) is assigned.
    TupleId insert(std::vector<Value> values, Provenance provenance = Provenance::BonaFide,
                   std::optional<TupleId> id = std::nullopt);

    /// Replaces the values of an existing tuple, keeping its id and provenance.
    void replace_values(TupleId id, std::vector<Value> values);

    TupleId next_id() const { return m_next_id; }

  private:
    std::shared_ptr<const Schema> m_schema;
    std::vector<Tuple> m_tuples;
    std::unordered_map<TupleId, std::size_t> m_by_id;
    std::unordered_map<std::vector<Value>, TupleId, ValuesHash> m_by_values;
    TupleId m_next_id = 0;
};

/// Functional form: returns the database with `t` added.
Database insert_tuple(Database db, Tuple t);

/// Non-empty subset of an attribute domain, stored as a bitset.
class ValueSet {
  public:
    ValueSet() = default;

    static ValueSet single(std::size_t domain, Value value);
    static ValueSet full(std::size_t domain);
    static ValueSet of(std::size_t domain, std::span<const Value> values);

    bool contains(Value value) const noexcept {
        if (value < 0 || static_cast<std::size_t>(value) >= m_domain) return false;
        return (m_bits[static_cast<std::size_t>(value) >> 6] >> (static_cast<std::size_t>(value) & 63)) & 1U;
    }

    std::size_t domain() const { return m_domain; }
    std::size_t size() const { return m_count; }
    bool is_single() const { return m_count == 1; }
    bool is_full() const { return m_count == m_domain; }
    std::optional<Value> sole() const;
    std::vector<Value> values() const;

    bool operator==(const ValueSet& other) const = default;
    std::size_t hash() const noexcept;

  private:
    std::size_t m_domain = 0;
    std::size_t m_count = 0;
    std::vector<std::uint64_t> m_bits;
};

enum class PredicateKind { Point, In, Star };

/// One non-empty predicate per schema attribute, in schema (internal) order.
class Query {
  public:
    Query() = default;
    explicit Query(std::vector<ValueSet> predicates);

    /// Point query from a full value vector (no Nulls).
    static Query point(const Schema& schema, std::span<const Value> values);
    static Query star(const Schema& schema);

    std::size_t arity() const { return m_predicates.size(); }
    const ValueSet& operator[](std::size_t index) const { return m_predicates[index]; }
    std::span<const ValueSet> predicates() const { return m_predicates; }

    void set(std::size_t index, ValueSet predicate);
    void set_point(std::size_t index, Value value);
    Query with(std::size_t index, ValueSet predicate) const;
    Query with_point(std::size_t index, Value value) const;

    PredicateKind kind(std::size_t index) const;
    bool is_point() const;

    /// Throws SchemaMismatch if arity or domain sizes disagree with `schema`.
    void check(const Schema& schema) const;

    bool operator==(const Query& other) const = default;
    std::size_t hash() const noexcept;

  private:
    std::vector<ValueSet> m_predicates;
};

struct QueryHash {
    std::size_t operator()(const Query& q) const noexcept { return q.hash(); }
};

struct AnswerEntry {
    TupleId id = 0;
    std::vector<Value> public_values;

    bool operator==(const AnswerEntry& other) const = default;
};

/// Top-k answer: ids and public projections only, best first.
struct RankedAnswer {
    std::size_t k = 1;
    std::vector<AnswerEntry> entries;

    /// 1-based rank of `id` when present.
    std::optional<std::size_t> rank_of(TupleId id) const;
    bool operator==(const RankedAnswer& other) const = default;
};

AnswerEntry project_public(const Tuple& t, const Schema& schema);

}  // namespace rankleak
