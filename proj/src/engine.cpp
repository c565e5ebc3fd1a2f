#include "rankleak/engine.hpp"

#include <algorithm>

namespace rankleak {

std::string_view query_kind_name(QueryKind kind) {
    return kind == QueryKind::PointOnly ? "point-only" : "in-allowed";
}

std::optional<QueryKind> parse_query_kind(std::string_view text) {
    if (text == "point-only" || text == "point") return QueryKind::PointOnly;
    if (text == "in-allowed" || text == "in") return QueryKind::InAllowed;
    return std::nullopt;
}

void InterfaceConfig::check() const {
    if (k < 1) throw Error(Errc::InvalidArgument, "k must be at least 1");
    if (rate_limit && *rate_limit < 1) throw Error(Errc::InvalidArgument, "rate limit must be at least 1");
}

VictimRank returns_victim(const RankedAnswer& answer, TupleId victim) {
    auto rank = answer.rank_of(victim);
    return rank ? VictimRank{true, *rank} : VictimRank{};
}

QueryEngine::QueryEngine(Database db, std::shared_ptr<const RankingFunction> ranking, InterfaceConfig cfg)
    : m_base(std::make_shared<const Database>(std::move(db))),
      m_ranking(std::move(ranking)),
      m_cfg(cfg),
      m_overlay(std::make_shared<const Overlay>()),
      m_next_id(m_base->next_id()) {
    m_cfg.check();
    if (!m_ranking) throw Error(Errc::InvalidArgument, "engine needs a ranking function");
}

ActorId QueryEngine::new_actor() { return m_next_actor.fetch_add(1); }

void QueryEngine::charge(ActorId actor, void (*bump)(BudgetLedger&)) {
    std::lock_guard lock(m_ledger_mutex);
    BudgetLedger& ledger = m_ledgers[actor];
    if (m_cfg.rate_limit && ledger.requests() >= *m_cfg.rate_limit) {
        throw Error(Errc::RateLimited, "rate limit exceeded");
    }
    bump(ledger);
}

BudgetLedger QueryEngine::ledger(ActorId actor) const {
    std::lock_guard lock(m_ledger_mutex);
    auto it = m_ledgers.find(actor);
    return it == m_ledgers.end() ? BudgetLedger{} : it->second;
}

RankedAnswer QueryEngine::answer(const Query& q, ActorId actor, std::optional<std::size_t> k) {
    q.check(schema());
    if (m_cfg.query_kind == QueryKind::PointOnly && !q.is_point()) {
        throw Error(Errc::UnsupportedPredicate, "interface accepts point predicates only");
    }
    charge(actor, [](BudgetLedger& l) { ++l.queries_issued; });
    const std::uint64_t now = m_clock.fetch_add(1) + 1;

    std::shared_ptr<const Overlay> overlay;
    {
        std::lock_guard lock(m_overlay_mutex);
        overlay = m_overlay;
    }

    std::vector<RankKey> keys;
    keys.reserve(m_base->size() + overlay->size());
    for (const auto& t : m_base->tuples()) keys.push_back(rank_key(t, m_ranking->score(t.values, q), m_cfg.tie));
    for (const auto& ins : *overlay) {
        if (ins.visible_from > now) continue;
        keys.push_back(rank_key(ins.tuple, m_ranking->score(ins.tuple.values, q), m_cfg.tie));
    }
    const std::size_t depth = std::min({k.value_or(m_cfg.k), m_cfg.k, keys.size()});
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(depth), keys.end());

    RankedAnswer out;
    out.k = std::min(k.value_or(m_cfg.k), m_cfg.k);
    out.entries.reserve(depth);
    const std::size_t m = schema().public_count();
    for (std::size_t i = 0; i < depth; ++i) {
        const Tuple* t = m_base->find(keys[i].id);
        if (t == nullptr) {
            for (const auto& ins : *overlay) {
                if (ins.tuple.id == keys[i].id) {
                    t = &ins.tuple;
                    break;
                }
            }
        }
        AnswerEntry e;
        e.id = t->id;
        e.public_values.assign(t->values.begin(), t->values.begin() + static_cast<std::ptrdiff_t>(m));
        out.entries.push_back(std::move(e));
    }
    return out;
}

bool QueryEngine::duplicate_of_existing(const std::vector<Value>& values, const Overlay& overlay,
                                        std::optional<TupleId> skip) const {
    if (m_base->id_of_values(values)) return true;
    return std::any_of(overlay.begin(), overlay.end(), [&](const Inserted& ins) {
        return ins.tuple.values == values && (!skip || ins.tuple.id != *skip);
    });
}

TupleId QueryEngine::insert(std::vector<Value> values, ActorId actor) {
    if (!m_cfg.insertion_allowed) throw Error(Errc::InsertionForbidden, "insertion constraint");
    schema().check_values(values);
    std::lock_guard lock(m_overlay_mutex);
    if (duplicate_of_existing(values, *m_overlay, std::nullopt)) {
        charge(actor, [](BudgetLedger& l) { ++l.inserts_rejected; });
        throw Error(Errc::DuplicateTuple, "value combination already present");
    }
    charge(actor, [](BudgetLedger& l) { ++l.tuples_inserted; });
    const std::uint64_t now = m_clock.fetch_add(1) + 1;
    auto next = std::make_shared<Overlay>(*m_overlay);
    const TupleId id = m_next_id++;
    next->push_back(Inserted{Tuple{id, std::move(values), Provenance::Inserted}, now + 1 + m_cfg.insertion_delay.value_or(0)});
    m_overlay = std::move(next);
    return id;
}

void QueryEngine::update(TupleId id, std::vector<Value> values, ActorId actor) {
    if (!m_cfg.insertion_allowed) throw Error(Errc::InsertionForbidden, "insertion constraint");
    schema().check_values(values);
    std::lock_guard lock(m_overlay_mutex);
    auto it = std::find_if(m_overlay->begin(), m_overlay->end(), [&](const Inserted& ins) { return ins.tuple.id == id; });
    if (it == m_overlay->end()) throw Error(Errc::UnknownTuple, "only inserted tuples can be updated");
    if (duplicate_of_existing(values, *m_overlay, id)) {
        charge(actor, [](BudgetLedger& l) { ++l.inserts_rejected; });
        throw Error(Errc::DuplicateTuple, "value combination already present");
    }
    charge(actor, [](BudgetLedger& l) { ++l.tuples_inserted; });
    const std::uint64_t now = m_clock.fetch_add(1) + 1;
    auto next = std::make_shared<Overlay>(*m_overlay);
    auto& slot = (*next)[static_cast<std::size_t>(it - m_overlay->begin())];
    slot.tuple.values = std::move(values);
    slot.visible_from = now + 1 + m_cfg.insertion_delay.value_or(0);
    m_overlay = std::move(next);
}

Database QueryEngine::snapshot() const {
    std::shared_ptr<const Overlay> overlay;
    {
        std::lock_guard lock(m_overlay_mutex);
        overlay = m_overlay;
    }
    Database db = *m_base;
    for (const auto& ins : *overlay) db.insert(ins.tuple.values, Provenance::Inserted, ins.tuple.id);
    return db;
}

void SearchInterface::check_budget() const {
    if (m_budget && m_usage.requests() >= *m_budget) throw Error(Errc::RateLimited, "attack budget exhausted");
}

RankedAnswer SearchInterface::query(const Query& q) {
    check_budget();
    RankedAnswer a = do_query(q);
    ++m_usage.queries_issued;
    return a;
}

TupleId SearchInterface::insert(const std::vector<Value>& values) {
    check_budget();
    try {
        TupleId id = do_insert(values);
        ++m_usage.tuples_inserted;
        return id;
    } catch (const Error& e) {
        if (e.code() == Errc::DuplicateTuple) ++m_usage.inserts_rejected;
        throw;
    }
}

EngineSession::EngineSession(QueryEngine& engine, std::optional<std::size_t> budget)
    : SearchInterface(budget), m_engine(engine), m_actor(engine.new_actor()) {}

RankedAnswer EngineSession::do_query(const Query& q) { return m_engine.answer(q, m_actor); }

TupleId EngineSession::do_insert(const std::vector<Value>& values) { return m_engine.insert(values, m_actor); }

}  // namespace rankleak
