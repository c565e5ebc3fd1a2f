#include "rankleak/oracle.hpp"

#include <algorithm>
#include <limits>

namespace rankleak {

namespace {

struct Scored {
    double score;
    int tie;
    TupleId id;
    std::size_t index;
};

int tie_rank(const Tuple& t, TieBreakPolicy tie) {
    const bool inserted = t.provenance == Provenance::Inserted;
    switch (tie) {
        case TieBreakPolicy::InsertedFirst: return inserted ? 0 : 1;
        case TieBreakPolicy::InsertedLast: return inserted ? 1 : 0;
        case TieBreakPolicy::ById: return 0;
    }
    return 0;
}

std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

/// Every non-empty subset (or every single value) of each attribute's domain.
std::vector<std::vector<ValueSet>> predicate_choices(const Schema& schema, QueryKind kind) {
    std::vector<std::vector<ValueSet>> choices(schema.arity());
    for (std::size_t i = 0; i < schema.arity(); ++i) {
        const std::size_t d = schema.domain_size(i);
        if (kind == QueryKind::PointOnly) {
            for (std::size_t v = 0; v < d; ++v) choices[i].push_back(ValueSet::single(d, static_cast<Value>(v)));
            continue;
        }
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << d); ++mask) {
            std::vector<Value> vals;
            for (std::size_t v = 0; v < d; ++v) {
                if (mask >> v & 1U) vals.push_back(static_cast<Value>(v));
            }
            choices[i].push_back(ValueSet::of(d, vals));
        }
    }
    return choices;
}

}  // namespace

RankedAnswer exhaustive_topk(std::span<const Tuple> tuples, const Schema& schema, const Query& q,
                             const RankingFunction& ranking, TieBreakPolicy tie, std::size_t k) {
    std::vector<Scored> all;
    all.reserve(tuples.size());
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        all.push_back(Scored{ranking.score(tuples[i].values, q), tie_rank(tuples[i], tie), tuples[i].id, i});
    }
    std::sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score < b.score;
        if (a.tie != b.tie) return a.tie < b.tie;
        return a.id < b.id;
    });
    RankedAnswer out;
    out.k = k;
    for (std::size_t i = 0; i < all.size() && i < k; ++i) {
        const Tuple& t = tuples[all[i].index];
        out.entries.push_back(AnswerEntry{
            t.id, std::vector<Value>(t.values.begin(), t.values.begin() + static_cast<std::ptrdiff_t>(schema.public_count()))});
    }
    return out;
}

RankedAnswer exhaustive_topk(const Database& db, const Query& q, const RankingFunction& ranking, TieBreakPolicy tie,
                             std::size_t k) {
    return exhaustive_topk(db.tuples(), db.schema(), q, ranking, tie, k);
}

std::uint64_t expressible_query_count(const Schema& schema, QueryKind kind) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < schema.arity(); ++i) {
        const std::size_t d = schema.domain_size(i);
        std::uint64_t choices = d;
        if (kind == QueryKind::InAllowed) {
            choices = d >= 64 ? std::numeric_limits<std::uint64_t>::max() : (std::uint64_t{1} << d) - 1;
        }
        total = mul_sat(total, choices);
    }
    return total;
}

FeasibleSet feasible_values(const Database& db, TupleId victim, const RankingFunction& ranking,
                            const InterfaceConfig& cfg, std::uint64_t bound) {
    const Schema& schema = db.schema();
    const std::uint64_t count = expressible_query_count(schema, cfg.query_kind);
    if (count > bound) {
        throw Error(Errc::SpaceTooLarge,
                    std::to_string(count) + " expressible queries exceed the bound of " + std::to_string(bound));
    }
    std::vector<Tuple> truth(db.tuples().begin(), db.tuples().end());
    const auto vit = std::find_if(truth.begin(), truth.end(), [victim](const Tuple& t) { return t.id == victim; });
    if (vit == truth.end()) throw Error(Errc::UnknownTuple, "victim id " + std::to_string(victim) + " not in database");
    const std::size_t vpos = static_cast<std::size_t>(vit - truth.begin());

    // Each candidate world is the true database with one victim value swapped.
    struct World {
        std::size_t j;
        Value x;
        std::vector<Tuple> tuples;
        bool alive = true;
    };
    std::vector<World> worlds;
    FeasibleSet out;
    out.values.resize(schema.private_count());
    for (std::size_t j = 0; j < schema.private_count(); ++j) {
        const std::size_t attr = schema.private_index(j);
        for (std::size_t x = 0; x < schema.domain_size(attr); ++x) {
            if (static_cast<Value>(x) == truth[vpos].values[attr]) continue;
            World w{j, static_cast<Value>(x), truth};
            w.tuples[vpos].values[attr] = static_cast<Value>(x);
            worlds.push_back(std::move(w));
        }
    }

    const auto choices = predicate_choices(schema, cfg.query_kind);
    std::vector<std::size_t> odo(schema.arity(), 0);
    std::vector<ValueSet> preds(schema.arity());
    std::size_t alive = worlds.size();
    while (alive > 0) {
        for (std::size_t i = 0; i < schema.arity(); ++i) preds[i] = choices[i][odo[i]];
        const Query q(preds);
        ++out.queries_checked;
        const RankedAnswer real = exhaustive_topk(truth, schema, q, ranking, cfg.tie, cfg.k);
        for (auto& w : worlds) {
            if (!w.alive) continue;
            if (exhaustive_topk(w.tuples, schema, q, ranking, cfg.tie, cfg.k) != real) {
                w.alive = false;
                --alive;
            }
        }
        std::size_t i = schema.arity();
        while (i-- > 0) {
            if (++odo[i] < choices[i].size()) break;
            odo[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1)) break;
    }

    for (std::size_t j = 0; j < schema.private_count(); ++j) {
        const Value own = truth[vpos].values[schema.private_index(j)];
        if (own != kNull) out.values[j].push_back(own);
    }
    for (const auto& w : worlds) {
        if (w.alive) out.values[w.j].push_back(w.x);
    }
    for (auto& v : out.values) std::sort(v.begin(), v.end());
    return out;
}

}  // namespace rankleak
