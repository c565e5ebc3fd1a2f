#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rankleak/engine.hpp"

namespace rankleak {

/// Per private attribute, the victim values consistent with every answer a
/// query-only adversary could observe.
struct FeasibleSet {
    std::vector<std::vector<Value>> values;  // indexed by private attribute (0 = B1)
    std::uint64_t queries_checked = 0;

    bool singleton(std::size_t j) const { return values.at(j).size() == 1; }
    bool full_domain(const Schema& schema, std::size_t j) const {
        return values.at(j).size() == schema.domain_size(schema.private_index(j));
    }
};

/// Full scoring and sorting, written independently of the engine.
RankedAnswer exhaustive_topk(std::span<const Tuple> tuples, const Schema& schema, const Query& q,
                             const RankingFunction& ranking, TieBreakPolicy tie, std::size_t k);
RankedAnswer exhaustive_topk(const Database& db, const Query& q, const RankingFunction& ranking, TieBreakPolicy tie,
                             std::size_t k);

/// Number of queries the interface can express; saturates at UINT64_MAX.
std::uint64_t expressible_query_count(const Schema& schema, QueryKind kind);

/// Errors: SpaceTooLarge when more than `bound` queries are expressible,
/// UnknownTuple when the victim is missing.
FeasibleSet feasible_values(const Database& db, TupleId victim, const RankingFunction& ranking,
                            const InterfaceConfig& cfg, std::uint64_t bound = 1'000'000);

}  // namespace rankleak
