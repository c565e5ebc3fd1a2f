#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "rankleak/model.hpp"
#include "rankleak/ranking.hpp"

namespace rankleak {

enum class QueryKind { PointOnly, InAllowed };

std::string_view query_kind_name(QueryKind kind);
std::optional<QueryKind> parse_query_kind(std::string_view text);

struct InterfaceConfig {
    std::size_t k = 1;
    QueryKind query_kind = QueryKind::InAllowed;
    bool insertion_allowed = true;
    /// Maximum requests (queries plus inserts) per actor.
    std::optional<std::size_t> rate_limit;
    /// Inserted tuples stay hidden until this many further requests have been served.
    std::optional<std::size_t> insertion_delay;
    TieBreakPolicy tie = TieBreakPolicy::ById;

    void check() const;
};

struct BudgetLedger {
    std::size_t queries_issued = 0;
    std::size_t tuples_inserted = 0;
    /// Duplicate inserts: they cost a request but add nothing.
    std::size_t inserts_rejected = 0;

    std::size_t requests() const { return queries_issued + tuples_inserted + inserts_rejected; }
    bool operator==(const BudgetLedger&) const = default;
};

using ActorId = std::uint64_t;

struct VictimRank {
    bool present = false;
    std::size_t rank = 0;
};

VictimRank returns_victim(const RankedAnswer& answer, TupleId victim);

/// The simulated website. Bona fide tuples live in a frozen base database;
/// inserted tuples go to a small copy-on-write overlay so readers never block
/// on writers for longer than a pointer copy.
class QueryEngine {
  public:
    QueryEngine(Database db, std::shared_ptr<const RankingFunction> ranking, InterfaceConfig cfg);

    const Schema& schema() const { return m_base->schema(); }
    const std::shared_ptr<const Schema>& schema_ptr() const { return m_base->schema_ptr(); }
    const InterfaceConfig& config() const { return m_cfg; }
    const RankingFunction& ranking() const { return *m_ranking; }

    ActorId new_actor();

    /// Top-k answer; `k` is clamped to the configured depth.
    /// Errors: RateLimited, UnsupportedPredicate, SchemaMismatch.
    RankedAnswer answer(const Query& q, ActorId actor, std::optional<std::size_t> k = std::nullopt);

    /// Errors: RateLimited, InsertionForbidden, DuplicateTuple (still charged), SchemaMismatch.
    TupleId insert(std::vector<Value> values, ActorId actor);

    /// Rewrites an inserted tuple in place (a fake account editing its profile).
    /// Counts as one insert-class request.
    void update(TupleId id, std::vector<Value> values, ActorId actor);

    BudgetLedger ledger(ActorId actor) const;

    /// Base plus every inserted tuple, visible or not.
    Database snapshot() const;

  private:
    struct Inserted {
        Tuple tuple;
        std::uint64_t visible_from = 0;
    };
    using Overlay = std::vector<Inserted>;

    void charge(ActorId actor, void (*bump)(BudgetLedger&));
    bool duplicate_of_existing(const std::vector<Value>& values, const Overlay& overlay,
                               std::optional<TupleId> skip) const;

    std::shared_ptr<const Database> m_base;
    std::shared_ptr<const RankingFunction> m_ranking;
    InterfaceConfig m_cfg;

    mutable std::mutex m_overlay_mutex;
    std::shared_ptr<const Overlay> m_overlay;
    TupleId m_next_id;

    mutable std::mutex m_ledger_mutex;
    std::map<ActorId, BudgetLedger> m_ledgers;
    std::atomic<ActorId> m_next_actor{1};
    std::atomic<std::uint64_t> m_clock{0};
};

/// What an adversary sees: search, insert, and the schema. Implementations
/// add an optional client-side budget and count every request they make.
class SearchInterface {
  public:
    explicit SearchInterface(std::optional<std::size_t> budget = std::nullopt) : m_budget(budget) {}
    virtual ~SearchInterface() = default;

    virtual const Schema& schema() const = 0;
    virtual std::size_t k() const = 0;
    virtual QueryKind query_kind() const = 0;

    RankedAnswer query(const Query& q);
    TupleId insert(const std::vector<Value>& values);

    /// Requests this session has issued (accepted or charged).
    const BudgetLedger& usage() const { return m_usage; }

  protected:
    virtual RankedAnswer do_query(const Query& q) = 0;
    virtual TupleId do_insert(const std::vector<Value>& values) = 0;

  private:
    void check_budget() const;

    std::optional<std::size_t> m_budget;
    BudgetLedger m_usage;
};

class EngineSession final : public SearchInterface {
  public:
    EngineSession(QueryEngine& engine, std::optional<std::size_t> budget = std::nullopt);

    const Schema& schema() const override { return m_engine.schema(); }
    std::size_t k() const override { return m_engine.config().k; }
    QueryKind query_kind() const override { return m_engine.config().query_kind; }
    ActorId actor() const { return m_actor; }

  protected:
    RankedAnswer do_query(const Query& q) override;
    TupleId do_insert(const std::vector<Value>& values) override;

  private:
    QueryEngine& m_engine;
    ActorId m_actor;
};

}  // namespace rankleak
