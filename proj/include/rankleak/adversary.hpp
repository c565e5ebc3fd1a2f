#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "rankleak/engine.hpp"
#include "rankleak/wire.hpp"

namespace rankleak {

/// What the adversary knows about the victim before the attack.
struct VictimKnowledge {
    TupleId id = 0;
    std::vector<Value> public_values;
};

VictimKnowledge victim_knowledge(const Database& db, TupleId victim);

/// How a query pair proves an exclusion.
///  Overtaken: some tuple is ahead of the victim under q' that was not ahead
///             under q (victim present under q; absent counts as last).
///  RankWorsened: the victim's rank under q' is strictly worse than under q.
/// The two agree for k = 1; RankWorsened implies Overtaken in general.
enum class DifferentialCriterion { Overtaken, RankWorsened };

bool differential_evidence(const RankedAnswer& a, const RankedAnswer& b, TupleId victim,
                           DifferentialCriterion criterion = DifferentialCriterion::Overtaken);

/// Issues exactly two queries.
bool verify_differential_pair(SearchInterface& si, const Query& q_theta, const Query& q_theta_prime, TupleId victim,
                              DifferentialCriterion criterion = DifferentialCriterion::Overtaken);

/// Private-value combinations FIND-Q has already drawn for one victim.
struct QueryHistory {
    std::unordered_set<std::vector<Value>, ValuesHash> combos;

    bool contains(const std::vector<Value>& combo) const { return combos.contains(combo); }
    std::size_t size() const { return combos.size(); }
};

using AskFn = std::function<RankedAnswer(const Query&)>;
using AcceptFn = std::function<bool(const RankedAnswer&)>;

struct FindResult {
    std::optional<Query> query;
    std::optional<RankedAnswer> answer;
    std::size_t draws = 0;

    bool found() const { return query.has_value(); }
};

/// Draws point queries with the victim's public values and uniformly random,
/// never-before-drawn private values until one is accepted (default: the
/// victim is in the top-k) or the space is exhausted.
FindResult find_q(SearchInterface& si, const VictimKnowledge& vk, QueryHistory& history, std::mt19937_64& rng);
FindResult find_q(const AskFn& ask, const Schema& schema, const VictimKnowledge& vk, QueryHistory& history,
                  std::mt19937_64& rng, const AcceptFn& accept);

enum class Algorithm { QIPoint, QPoint, QIIn, QIn };

std::string_view algorithm_name(Algorithm algo);
std::optional<Algorithm> parse_algorithm(std::string_view text);
bool uses_insertion(Algorithm algo);

enum class AttackStatus { Inferred, InferredAll, Undetermined, BudgetExhausted };

std::string_view status_name(AttackStatus status);

struct Exclusion {
    Value value = 0;
    Query q_theta;
    Query q_theta_prime;
    /// Probes that were in the database when the pair was observed.
    std::size_t probes_before = 0;
};

struct AttributeLedger {
    std::size_t attribute = 0;  // internal schema index
    std::vector<Exclusion> exclusions;
    std::optional<Value> inferred;
    bool possible_null = false;

    bool excluded(Value value) const;
};

struct TraceEntry {
    enum class Kind { Query, Insert };
    Kind kind = Kind::Query;
    Query query;
    std::vector<Value> values;
    std::optional<std::size_t> victim_rank;
    std::optional<TupleId> inserted_id;
    bool duplicate = false;
};

struct AttackOutcome {
    Algorithm algorithm = Algorithm::QIPoint;
    AttackStatus status = AttackStatus::Undetermined;
    std::size_t target = 0;  // private attribute index (0 = B1)
    std::optional<Value> value;
    /// Per private attribute, set on InferredAll.
    std::vector<Value> values;
    std::vector<AttributeLedger> ledger;  // one per private attribute
    std::size_t queries_used = 0;
    /// Insert requests, duplicates included.
    std::size_t inserts_used = 0;
    /// Queries spent inside FIND-Q, and inside the first FIND-Q call only.
    std::size_t find_queries = 0;
    std::size_t first_find_queries = 0;
    /// Private combination drawn by the first point FIND-Q call, if any.
    std::optional<std::vector<Value>> first_draw;
    std::size_t walk_rounds = 0;
    /// True when a Q-only attack settled the target from the seed's own sibling group.
    bool quick_finish = false;
    std::vector<std::vector<Value>> probes;
    std::vector<TraceEntry> trace;
    std::string note;

    std::size_t cost() const { return queries_used + inserts_used; }
    std::size_t exclusion_count() const;
};

struct AttackOptions {
    std::size_t target = 0;
    /// Keep going until every private attribute is settled.
    bool infer_all = false;
    /// Stop (reported as BudgetExhausted) after this many completed walk rounds.
    std::optional<std::size_t> max_rounds;
    DifferentialCriterion criterion = DifferentialCriterion::Overtaken;
};

AttackOutcome qi_point(SearchInterface& si, const VictimKnowledge& vk, const AttackOptions& opts, std::uint64_t seed);
AttackOutcome q_point(SearchInterface& si, const VictimKnowledge& vk, const AttackOptions& opts, std::uint64_t seed);
AttackOutcome qi_in(SearchInterface& si, const VictimKnowledge& vk, const AttackOptions& opts, std::uint64_t seed);
AttackOutcome q_in(SearchInterface& si, const VictimKnowledge& vk, const AttackOptions& opts, std::uint64_t seed);

AttackOutcome run_attack(Algorithm algo, SearchInterface& si, const VictimKnowledge& vk, const AttackOptions& opts,
                         std::uint64_t seed);

/// Runs the selected attack until every private attribute is inferred or
/// found undecidable.
AttackOutcome infer_all(SearchInterface& si, const VictimKnowledge& vk, Algorithm algo, std::uint64_t seed);

/// Rebuilds a fresh engine over `db`, re-inserts the probes that existed when
/// the exclusion was witnessed, and re-checks the pair.
bool replay_exclusion(const Database& db, std::shared_ptr<const RankingFunction> ranking, const InterfaceConfig& cfg,
                      TupleId victim, const AttackOutcome& outcome, const Exclusion& exclusion,
                      DifferentialCriterion criterion = DifferentialCriterion::Overtaken);

json outcome_to_json(const AttackOutcome& outcome, const Schema& schema, bool include_trace = true);

}  // namespace rankleak
