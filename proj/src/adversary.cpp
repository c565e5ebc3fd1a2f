#include "rankleak/adversary.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

namespace rankleak {

VictimKnowledge victim_knowledge(const Database& db, TupleId victim) {
    const Tuple* t = db.find(victim);
    if (t == nullptr) throw Error(Errc::UnknownTuple, "victim id " + std::to_string(victim) + " not in database");
    const auto m = static_cast<std::ptrdiff_t>(db.schema().public_count());
    return VictimKnowledge{victim, std::vector<Value>(t->values.begin(), t->values.begin() + m)};
}

bool differential_evidence(const RankedAnswer& a, const RankedAnswer& b, TupleId victim,
                           DifferentialCriterion criterion) {
    const auto rank_a = a.rank_of(victim);
    if (!rank_a) return false;
    const auto rank_b = b.rank_of(victim);
    if (criterion == DifferentialCriterion::RankWorsened) return !rank_b || *rank_b > *rank_a;
    for (std::size_t i = 0; i < b.entries.size(); ++i) {
        if (rank_b && i + 1 >= *rank_b) break;
        const auto rank_u = a.rank_of(b.entries[i].id);
        if (!rank_u || *rank_u > *rank_a) return true;
    }
    return false;
}

bool verify_differential_pair(SearchInterface& si, const Query& q_theta, const Query& q_theta_prime, TupleId victim,
                              DifferentialCriterion criterion) {
    const RankedAnswer a = si.query(q_theta);
    const RankedAnswer b = si.query(q_theta_prime);
    return differential_evidence(a, b, victim, criterion);
}

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_product(std::span<const std::size_t> sizes) {
    std::uint64_t total = 1;
    for (std::size_t s : sizes) {
        if (total > kSaturated / s) return kSaturated;
        total *= s;
    }
    return total;
}

std::vector<Value> full_values(const VictimKnowledge& vk, const std::vector<Value>& privs) {
    std::vector<Value> values(vk.public_values);
    values.insert(values.end(), privs.begin(), privs.end());
    return values;
}

Query point_query(const Schema& schema, const VictimKnowledge& vk, const std::vector<Value>& privs) {
    return Query::point(schema, full_values(vk, privs));
}

bool present(const RankedAnswer& a, TupleId victim) { return a.rank_of(victim).has_value(); }

std::vector<Value> private_part(const Schema& schema, const Query& q) {
    std::vector<Value> privs;
    for (std::size_t i = schema.public_count(); i < q.arity(); ++i) privs.push_back(q[i].sole().value_or(kNull));
    return privs;
}

}  // namespace

FindResult find_q(const AskFn& ask, const Schema& schema, const VictimKnowledge& vk, QueryHistory& history,
                  std::mt19937_64& rng, const AcceptFn& accept) {
    const std::size_t m = schema.public_count();
    const std::size_t mp = schema.private_count();
    std::vector<std::size_t> sizes(mp);
    for (std::size_t j = 0; j < mp; ++j) sizes[j] = schema.domain_size(m + j);
    const std::uint64_t space = saturating_product(sizes);

    FindResult result;
    std::vector<Value> combo(mp);
    while (history.size() < space) {
        if (space != kSaturated && history.size() * 2 > space) {
            // Dense history: list what is left and pick uniformly from it.
            std::vector<std::vector<Value>> remaining;
            std::vector<Value> odo(mp, 0);
            for (std::uint64_t n = 0; n < space; ++n) {
                if (!history.contains(odo)) remaining.push_back(odo);
                for (std::size_t j = mp; j-- > 0;) {
                    if (static_cast<std::size_t>(++odo[j]) < sizes[j]) break;
                    odo[j] = 0;
                }
            }
            combo = remaining[std::uniform_int_distribution<std::size_t>(0, remaining.size() - 1)(rng)];
        } else {
            do {
                for (std::size_t j = 0; j < mp; ++j) {
                    combo[j] = static_cast<Value>(std::uniform_int_distribution<std::size_t>(0, sizes[j] - 1)(rng));
                }
            } while (history.contains(combo));
        }
        history.combos.insert(combo);
        ++result.draws;
        Query q = point_query(schema, vk, combo);
        RankedAnswer a = ask(q);
        if (accept(a)) {
            result.query = std::move(q);
            result.answer = std::move(a);
            return result;
        }
    }
    return result;
}

FindResult find_q(SearchInterface& si, const VictimKnowledge& vk, QueryHistory& history, std::mt19937_64& rng) {
    const TupleId victim = vk.id;
    return find_q([&si](const Query& q) { return si.query(q); }, si.schema(), vk, history, rng,
                  [victim](const RankedAnswer& a) { return present(a, victim); });
}

std::string_view algorithm_name(Algorithm algo) {
    switch (algo) {
        case Algorithm::QIPoint: return "qi-point";
        case Algorithm::QPoint: return "q-point";
        case Algorithm::QIIn: return "qi-in";
        case Algorithm::QIn: return "q-in";
    }
    return "qi-point";
}

std::optional<Algorithm> parse_algorithm(std::string_view text) {
    for (Algorithm a : {Algorithm::QIPoint, Algorithm::QPoint, Algorithm::QIIn, Algorithm::QIn}) {
        if (algorithm_name(a) == text) return a;
    }
    return std::nullopt;
}

bool uses_insertion(Algorithm algo) { return algo == Algorithm::QIPoint || algo == Algorithm::QIIn; }

std::string_view status_name(AttackStatus status) {
    switch (status) {
        case AttackStatus::Inferred: return "inferred";
        case AttackStatus::InferredAll: return "inferred_all";
        case AttackStatus::Undetermined: return "undetermined";
        case AttackStatus::BudgetExhausted: return "budget_exhausted";
    }
    return "undetermined";
}

bool AttributeLedger::excluded(Value value) const {
    return std::any_of(exclusions.begin(), exclusions.end(), [value](const Exclusion& e) { return e.value == value; });
}

std::size_t AttackOutcome::exclusion_count() const {
    std::size_t n = 0;
    for (const auto& l : ledger) n += l.exclusions.size();
    return n;
}

namespace {

/// Issues requests on behalf of one attack, recording the trace and, for
/// Q-only attacks over a static database, answering repeats from a cache.
class Prober {
  public:
    Prober(SearchInterface& si, AttackOutcome& out, TupleId victim, bool cache)
        : m_si(si), m_out(out), m_victim(victim), m_use_cache(cache) {}

    RankedAnswer ask(const Query& q) {
        if (m_use_cache) {
            auto it = m_cache.find(q);
            if (it != m_cache.end()) return it->second;
        }
        RankedAnswer a = m_si.query(q);
        ++m_out.queries_used;
        TraceEntry e;
        e.kind = TraceEntry::Kind::Query;
        e.query = q;
        e.victim_rank = a.rank_of(m_victim);
        m_out.trace.push_back(std::move(e));
        if (m_use_cache) m_cache.emplace(q, a);
        return a;
    }

    /// Returns the new id, or nullopt when the combination already exists.
    std::optional<TupleId> insert(const std::vector<Value>& values) {
        TraceEntry e;
        e.kind = TraceEntry::Kind::Insert;
        e.values = values;
        try {
            const TupleId id = m_si.insert(values);
            ++m_out.inserts_used;
            e.inserted_id = id;
            m_out.trace.push_back(std::move(e));
            return id;
        } catch (const Error& err) {
            if (err.code() != Errc::DuplicateTuple) throw;
            ++m_out.inserts_used;
            e.duplicate = true;
            m_out.trace.push_back(std::move(e));
            return std::nullopt;
        }
    }

  private:
    SearchInterface& m_si;
    AttackOutcome& m_out;
    TupleId m_victim;
    bool m_use_cache;
    std::unordered_map<Query, RankedAnswer, QueryHash> m_cache;
};

void init_outcome(AttackOutcome& out, Algorithm algo, const Schema& schema, std::size_t target) {
    if (target >= schema.private_count()) {
        throw Error(Errc::InvalidArgument, "target attribute B" + std::to_string(target + 1) + " does not exist");
    }
    out.algorithm = algo;
    out.target = target;
    out.ledger.resize(schema.private_count());
    for (std::size_t j = 0; j < schema.private_count(); ++j) out.ledger[j].attribute = schema.private_index(j);
}

std::vector<Value> allowed_values(const Schema& schema, const AttributeLedger& ledger) {
    std::vector<Value> allowed;
    for (std::size_t v = 0; v < schema.domain_size(ledger.attribute); ++v) {
        if (!ledger.excluded(static_cast<Value>(v))) allowed.push_back(static_cast<Value>(v));
    }
    return allowed;
}

// ---------------------------------------------------------------------------
// Query-and-insert attacks (point and IN share the walk).

class QIAttack {
  public:
    QIAttack(SearchInterface& si, const VictimKnowledge& vk, const AttackOptions& opts, std::uint64_t seed,
             bool in_mode, AttackOutcome& out)
        : m_si(si),
          m_schema(si.schema()),
          m_vk(vk),
          m_opts(opts),
          m_rng(seed),
          m_in_mode(in_mode),
          m_out(out),
          m_prober(si, out, vk.id, false),
          m_m(m_schema.public_count()),
          m_mp(m_schema.private_count()) {}

    void run() {
        if (m_in_mode && m_si.query_kind() != QueryKind::InAllowed) {
            throw Error(Errc::UnsupportedPredicate, "qi-in needs an interface that accepts IN predicates");
        }
        std::optional<Query> q;
        if (m_in_mode) {
            // The IN search starts before anything is inserted.
            q = timed_find(std::nullopt);
            if (!q) return undetermined("no IN query returns the victim");
        }
        std::size_t guard = 4;
        for (std::size_t j = 0; j < m_mp; ++j) guard += m_schema.domain_size(m_m + j);

        while (true) {
            if (settled()) return finish();
            if (m_opts.max_rounds && m_out.walk_rounds >= *m_opts.max_rounds) {
                m_out.status = AttackStatus::BudgetExhausted;
                m_out.note = "stopped after " + std::to_string(m_out.walk_rounds) + " walk rounds";
                record_inferred();
                return;
            }
            if (guard-- == 0) return undetermined("walk made no progress");

            auto anchor = choose_anchor();
            if (!anchor) return;  // identity proof or dead end already recorded

            bool ok = false;
            if (q) ok = accepts(m_prober.ask(*q), *anchor);
            if (!ok) {
                q = timed_find(anchor);
                if (!q) q = fallback(*anchor);
                if (!q) return undetermined("no query places the victim ahead of the probe");
            }
            remember(*q);

            std::vector<std::size_t> bridge;
            for (std::size_t j = 0; j < m_mp; ++j) {
                const std::size_t attr = m_m + j;
                const Value pv = anchor->privs[j];
                if (pv == kNull) continue;
                const auto sole = (*q)[attr].sole();
                if (!sole || *sole != pv) bridge.push_back(attr);
            }
            Query prev = *q;
            bool dropped = false;
            for (std::size_t i = 1; i <= bridge.size(); ++i) {
                const std::size_t attr = bridge[bridge.size() - i];
                const Value pv = anchor->privs[attr - m_m];
                Query cur = prev.with_point(attr, pv);
                if (!accepts(m_prober.ask(cur), *anchor)) {
                    m_out.ledger[attr - m_m].exclusions.push_back(Exclusion{pv, prev, cur, m_out.probes.size()});
                    ++m_out.walk_rounds;
                    q = prev;
                    dropped = true;
                    break;
                }
                prev = std::move(cur);
                remember(prev);
            }
            if (!dropped) {
                return undetermined("victim stayed ahead of the probe on its exact-match query");
            }
        }
    }

  private:
    struct Anchor {
        std::vector<Value> privs;
        TupleId id = 0;
    };

    bool accepts(const RankedAnswer& a, const Anchor& anchor) const {
        const auto rv = a.rank_of(m_vk.id);
        if (!rv) return false;
        const auto ra = a.rank_of(anchor.id);
        return !ra || *rv < *ra;
    }

    bool settled() const {
        if (!m_opts.infer_all) return allowed_values(m_schema, m_out.ledger[m_opts.target]).size() <= 1;
        for (const auto& l : m_out.ledger) {
            if (allowed_values(m_schema, l).size() > 1) return false;
        }
        return true;
    }

    void record_inferred() {
        for (auto& l : m_out.ledger) {
            const auto allowed = allowed_values(m_schema, l);
            if (allowed.size() == 1) l.inferred = allowed[0];
            if (allowed.empty()) l.possible_null = true;
        }
    }

    void finish() {
        record_inferred();
        const auto& target = m_out.ledger[m_opts.target];
        if (target.possible_null) return undetermined("possible-null: every value was excluded");
        if (!m_opts.infer_all) {
            m_out.status = AttackStatus::Inferred;
            m_out.value = target.inferred;
            return;
        }
        for (const auto& l : m_out.ledger) {
            if (l.possible_null) {
                m_out.value = target.inferred;
                return undetermined("possible-null on " + m_schema.attribute(l.attribute).name);
            }
        }
        m_out.status = AttackStatus::InferredAll;
        m_out.value = target.inferred;
        for (const auto& l : m_out.ledger) m_out.values.push_back(*l.inferred);
    }

    void undetermined(std::string note) {
        m_out.status = AttackStatus::Undetermined;
        m_out.note = std::move(note);
        record_inferred();
    }

    void identity(const std::vector<Value>& privs) {
        for (std::size_t j = 0; j < m_mp; ++j) {
            if (privs[j] == kNull) {
                m_out.ledger[j].possible_null = true;
            } else {
                m_out.ledger[j].inferred = privs[j];
            }
        }
        m_out.note = "victim equals the probe value combination";
        if (privs[m_opts.target] == kNull) return undetermined("possible-null: victim holds null on the target");
        m_out.status = m_opts.infer_all ? AttackStatus::InferredAll : AttackStatus::Inferred;
        m_out.value = privs[m_opts.target];
        m_out.values = privs;
    }

    void remember(const Query& q) {
        if (std::find(m_known_good.begin(), m_known_good.end(), q) == m_known_good.end()) m_known_good.push_back(q);
    }

    /// Lexicographically smallest non-excluded combination passing `keep`.
    template <class Keep>
    std::optional<std::vector<Value>> first_combo(Keep keep) const {
        std::vector<std::vector<Value>> lists(m_mp);
        for (std::size_t j = 0; j < m_mp; ++j) {
            lists[j] = allowed_values(m_schema, m_out.ledger[j]);
            if (lists[j].empty()) {
                if (!m_schema.attribute(m_m + j).allows_null) return std::nullopt;
                lists[j] = {kNull};
            }
        }
        std::vector<std::size_t> idx(m_mp, 0);
        std::vector<Value> combo(m_mp);
        while (true) {
            for (std::size_t j = 0; j < m_mp; ++j) combo[j] = lists[j][idx[j]];
            if (keep(combo)) return combo;
            std::size_t j = m_mp;
            while (j-- > 0) {
                if (++idx[j] < lists[j].size()) break;
                idx[j] = 0;
            }
            if (j == static_cast<std::size_t>(-1)) return std::nullopt;
        }
    }

    std::optional<Anchor> choose_anchor() {
        while (true) {
            auto fresh = first_combo([this](const std::vector<Value>& c) {
                return !m_dups.contains(c) && !m_inserted.contains(c);
            });
            if (!fresh) break;
            const auto values = full_values(m_vk, *fresh);
            if (auto id = m_prober.insert(values)) {
                m_inserted.insert(*fresh);
                m_out.probes.push_back(values);
                return Anchor{*fresh, *id};
            }
            m_dups.insert(*fresh);
        }
        // Every candidate is already held by someone: use an existing holder as the anchor.
        auto dup = first_combo([this](const std::vector<Value>& c) {
            return m_dups.contains(c) && !m_used_dups.contains(c) &&
                   std::none_of(c.begin(), c.end(), [](Value v) { return v == kNull; });
        });
        if (!dup) {
            undetermined("no probe combination left to try");
            return std::nullopt;
        }
        m_used_dups.insert(*dup);
        const RankedAnswer exact = m_prober.ask(point_query(m_schema, m_vk, *dup));
        if (exact.rank_of(m_vk.id) == std::optional<std::size_t>(1)) {
            identity(*dup);
            return std::nullopt;
        }
        if (exact.entries.empty()) {
            undetermined("exact-match query returned nothing");
            return std::nullopt;
        }
        return Anchor{*dup, exact.entries.front().id};
    }

    std::optional<Query> timed_find(const std::optional<Anchor>& anchor) {
        const std::size_t before = m_out.queries_used;
        std::optional<Query> q = find(anchor);
        const std::size_t spent = m_out.queries_used - before;
        m_out.find_queries += spent;
        if (!m_found_once) {
            m_out.first_find_queries = spent;
            m_found_once = true;
        }
        return q;
    }

    std::optional<Query> find(const std::optional<Anchor>& anchor) {
        AcceptFn accept = [this, anchor](const RankedAnswer& a) {
            return anchor ? accepts(a, *anchor) : present(a, m_vk.id);
        };
        if (!m_in_mode) {
            FindResult r = find_q(
                [this](const Query& q) {
                    if (!m_out.first_draw) m_out.first_draw = private_part(m_schema, q);
                    return m_prober.ask(q);
                },
                m_schema, m_vk, m_history, m_rng, accept);
            return r.query;
        }
        // IN search: fix B1, then B1..B2, ... to point values, everything else starred.
        while (m_level <= m_mp) {
            std::vector<std::size_t> sizes(m_level);
            for (std::size_t j = 0; j < m_level; ++j) sizes[j] = m_schema.domain_size(m_m + j);
            const std::uint64_t total = saturating_product(sizes);
            while (m_index < total) {
                std::vector<ValueSet> preds;
                for (std::size_t i = 0; i < m_m; ++i) preds.push_back(ValueSet::single(m_schema.domain_size(i), m_vk.public_values[i]));
                std::uint64_t rest = m_index;
                std::vector<Value> fixed(m_level);
                for (std::size_t j = m_level; j-- > 0;) {
                    fixed[j] = static_cast<Value>(rest % sizes[j]);
                    rest /= sizes[j];
                }
                for (std::size_t j = 0; j < m_mp; ++j) {
                    const std::size_t d = m_schema.domain_size(m_m + j);
                    preds.push_back(j < m_level ? ValueSet::single(d, fixed[j]) : ValueSet::full(d));
                }
                ++m_index;
                Query q(std::move(preds));
                if (accept(m_prober.ask(q))) return q;
            }
            ++m_level;
            m_index = 0;
        }
        return std::nullopt;
    }

    std::optional<Query> fallback(const Anchor& anchor) {
        for (auto it = m_known_good.rbegin(); it != m_known_good.rend(); ++it) {
            if (accepts(m_prober.ask(*it), anchor)) return *it;
        }
        return std::nullopt;
    }

    SearchInterface& m_si;
    const Schema& m_schema;
    const VictimKnowledge& m_vk;
    const AttackOptions& m_opts;
    std::mt19937_64 m_rng;
    bool m_in_mode;
    AttackOutcome& m_out;
    Prober m_prober;
    std::size_t m_m;
    std::size_t m_mp;

    QueryHistory m_history;
    std::size_t m_level = 0;
    std::uint64_t m_index = 0;
    bool m_found_once = false;
    std::unordered_set<std::vector<Value>, ValuesHash> m_dups;
    std::unordered_set<std::vector<Value>, ValuesHash> m_used_dups;
    std::unordered_set<std::vector<Value>, ValuesHash> m_inserted;
    std::vector<Query> m_known_good;
};

// ---------------------------------------------------------------------------
// Query-only attacks.

class QOnlyAttack {
  public:
    QOnlyAttack(SearchInterface& si, const VictimKnowledge& vk, const AttackOptions& opts, std::uint64_t seed,
                bool in_mode, AttackOutcome& out)
        : m_si(si),
          m_schema(si.schema()),
          m_vk(vk),
          m_opts(opts),
          m_rng(seed),
          m_in_mode(in_mode),
          m_out(out),
          m_prober(si, out, vk.id, true),
          m_m(m_schema.public_count()) {}

    /// Works on private attribute `j` until it is settled or nothing is left to try.
    /// Returns true when exactly one value survives.
    bool run_target(std::size_t j) {
        if (m_in_mode && m_si.query_kind() != QueryKind::InAllowed) {
            throw Error(Errc::UnsupportedPredicate, "q-in needs an interface that accepts IN predicates");
        }
        m_attr = m_m + j;
        m_j = j;
        m_visited.clear();
        m_dead.clear();
        QueryHistory history;
        bool first_seed = true;
        while (true) {
            const std::size_t before = m_out.queries_used;
            FindResult r = find_q(
                [this](const Query& q) {
                    if (!m_out.first_draw) m_out.first_draw = private_part(m_schema, q);
                    return m_prober.ask(q);
                },
                m_schema, m_vk, history, m_rng, [this](const RankedAnswer& a) { return present(a, m_vk.id); });
            const std::size_t spent = m_out.queries_used - before;
            m_out.find_queries += spent;
            if (!m_found_once) {
                m_found_once = true;
                m_out.first_find_queries = spent;
            }
            if (!r.found()) return settled();
            const Query seed = *r.query;
            if (m_visited.contains(group_key(seed))) continue;
            eval_group(seed);
            if (first_seed && j == m_opts.target && settled()) m_out.quick_finish = true;
            first_seed = false;
            if (settled()) return true;
            if (allowed().empty()) return false;
            if (m_in_mode ? widen(seed) : tree(seed)) return settled();
        }
    }

    bool possible_null() const { return allowed().empty(); }

  private:
    std::vector<Value> allowed() const { return allowed_values(m_schema, m_out.ledger[m_j]); }
    bool settled() const { return allowed().size() <= 1; }

    Query group_key(const Query& q) const { return q.with(m_attr, ValueSet::full(m_schema.domain_size(m_attr))); }

    /// Issues the siblings of `base` on the target attribute for every value
    /// still in play and records exclusions. Returns whether any sibling
    /// returned the victim.
    bool eval_group(const Query& base) {
        Query key = group_key(base);
        if (auto it = m_visited.find(key); it != m_visited.end()) return it->second;
        const std::vector<Value> values = allowed();
        std::vector<Query> siblings;
        std::vector<RankedAnswer> answers;
        for (Value x : values) {
            siblings.push_back(base.with_point(m_attr, x));
            answers.push_back(m_prober.ask(siblings.back()));
        }
        bool alive = false;
        for (const auto& a : answers) alive = alive || present(a, m_vk.id);
        for (std::size_t xi = 0; xi < values.size(); ++xi) {
            for (std::size_t ri = 0; ri < values.size(); ++ri) {
                if (ri == xi || !present(answers[ri], m_vk.id)) continue;
                if (differential_evidence(answers[ri], answers[xi], m_vk.id, m_opts.criterion)) {
                    m_out.ledger[m_j].exclusions.push_back(Exclusion{values[xi], siblings[ri], siblings[xi], 0});
                    break;
                }
            }
        }
        m_visited.emplace(std::move(key), alive);
        return alive;
    }

    bool pruned(const std::vector<Value>& candidate) const {
        for (const auto& dead : m_dead) {
            bool covered = true;
            for (std::size_t i = 0; i < candidate.size() && covered; ++i) {
                if (i == m_attr || candidate[i] == dead[i]) continue;
                covered = i < m_m && dead[i] == m_vk.public_values[i];
            }
            if (covered) return true;
        }
        return false;
    }

    /// Breadth-first revision tree around `seed`: level L changes L attributes
    /// (other than the target) to values different from the seed's.
    /// Returns true when the target got settled.
    bool tree(const Query& seed) {
        std::vector<Value> base(seed.arity());
        for (std::size_t i = 0; i < seed.arity(); ++i) base[i] = *seed[i].sole();
        std::vector<std::size_t> attrs;
        for (std::size_t i = 0; i < seed.arity(); ++i) {
            if (i != m_attr) attrs.push_back(i);
        }
        for (std::size_t level = 1; level <= attrs.size(); ++level) {
            std::vector<std::size_t> comb(level);
            for (std::size_t c = 0; c < level; ++c) comb[c] = c;
            while (true) {
                // Alternatives per chosen attribute: every value except the seed's.
                std::vector<std::vector<Value>> alts(level);
                for (std::size_t c = 0; c < level; ++c) {
                    const std::size_t a = attrs[comb[c]];
                    for (std::size_t v = 0; v < m_schema.domain_size(a); ++v) {
                        if (static_cast<Value>(v) != base[a]) alts[c].push_back(static_cast<Value>(v));
                    }
                }
                std::vector<std::size_t> odo(level, 0);
                while (true) {
                    std::vector<Value> cand = base;
                    for (std::size_t c = 0; c < level; ++c) cand[attrs[comb[c]]] = alts[c][odo[c]];
                    Query q = Query::point(m_schema, cand);
                    if (!m_visited.contains(group_key(q)) && !pruned(cand)) {
                        if (!eval_group(q)) m_dead.push_back(cand);
                        if (settled()) return true;
                    }
                    std::size_t c = level;
                    while (c-- > 0) {
                        if (++odo[c] < alts[c].size()) break;
                        odo[c] = 0;
                    }
                    if (c == static_cast<std::size_t>(-1)) break;
                }
                // Next combination of `level` attributes, lexicographic.
                std::size_t c = level;
                while (c-- > 0) {
                    if (comb[c] < attrs.size() - level + c) break;
                }
                if (c == static_cast<std::size_t>(-1)) break;
                ++comb[c];
                for (std::size_t d = c + 1; d < level; ++d) comb[d] = comb[d - 1] + 1;
            }
        }
        return false;
    }

    /// Widens public attributes of `seed` to their full domains over subsets
    /// of increasing size, only building on subsets whose every smaller
    /// subset still returned the victim. Returns true when settled.
    bool widen(const Query& seed) {
        std::unordered_map<std::vector<bool>, bool> alive;
        alive[std::vector<bool>(m_m, false)] = true;
        for (std::size_t level = 1; level <= m_m; ++level) {
            std::vector<std::size_t> comb(level);
            for (std::size_t c = 0; c < level; ++c) comb[c] = c;
            bool any_alive = false;
            while (true) {
                std::vector<bool> mask(m_m, false);
                for (std::size_t c : comb) mask[c] = true;
                bool parents_alive = true;
                for (std::size_t c : comb) {
                    std::vector<bool> parent = mask;
                    parent[c] = false;
                    auto it = alive.find(parent);
                    if (it == alive.end() || !it->second) {
                        parents_alive = false;
                        break;
                    }
                }
                if (parents_alive) {
                    Query q = seed;
                    for (std::size_t c : comb) q.set(c, ValueSet::full(m_schema.domain_size(c)));
                    const bool ok = eval_group(q);
                    alive[mask] = ok;
                    any_alive = any_alive || ok;
                    if (settled()) return true;
                }
                std::size_t c = level;
                while (c-- > 0) {
                    if (comb[c] < m_m - level + c) break;
                }
                if (c == static_cast<std::size_t>(-1)) break;
                ++comb[c];
                for (std::size_t d = c + 1; d < level; ++d) comb[d] = comb[d - 1] + 1;
            }
            if (!any_alive) break;
        }
        return false;
    }

    SearchInterface& m_si;
    const Schema& m_schema;
    const VictimKnowledge& m_vk;
    const AttackOptions& m_opts;
    std::mt19937_64 m_rng;
    bool m_in_mode;
    AttackOutcome& m_out;
    Prober m_prober;
    std::size_t m_m;
    std::size_t m_attr = 0;
    std::size_t m_j = 0;
    bool m_found_once = false;
    std::unordered_map<Query, bool, QueryHash> m_visited;
    std::vector<std::vector<Value>> m_dead;
};

void settle_qonly(AttackOutcome& out, const Schema& schema, std::size_t j) {
    auto& l = out.ledger[j];
    const auto allowed = allowed_values(schema, l);
    if (allowed.size() == 1) l.inferred = allowed[0];
    if (allowed.empty()) l.possible_null = true;
}

AttackOutcome run_qonly(SearchInterface& si, const VictimKnowledge& vk, const AttackOptions& opts,
                        std::uint64_t seed, bool in_mode) {
    AttackOutcome out;
    const Schema& schema = si.schema();
    init_outcome(out, in_mode ? Algorithm::QIn : Algorithm::QPoint, schema, opts.target);
    QOnlyAttack attack(si, vk, opts, seed, in_mode, out);
    std::vector<std::size_t> order{opts.target};
    if (opts.infer_all) {
        for (std::size_t j = 0; j < schema.private_count(); ++j) {
            if (j != opts.target) order.push_back(j);
        }
    }
    try {
        for (std::size_t j : order) {
            attack.run_target(j);
            settle_qonly(out, schema, j);
        }
    } catch (const Error& e) {
        if (e.code() != Errc::RateLimited) throw;
        for (std::size_t j = 0; j < schema.private_count(); ++j) settle_qonly(out, schema, j);
        out.status = AttackStatus::BudgetExhausted;
        out.note = e.what();
        out.value = out.ledger[opts.target].inferred;
        return out;
    }
    const auto& target = out.ledger[opts.target];
    out.value = target.inferred;
    if (target.possible_null) {
        out.status = AttackStatus::Undetermined;
        out.note = "possible-null: every value was excluded";
    } else if (!target.inferred) {
        out.status = AttackStatus::Undetermined;
        out.note = "query space exhausted";
    } else if (!opts.infer_all) {
        out.status = AttackStatus::Inferred;
    } else {
        bool all = true;
        for (const auto& l : out.ledger) all = all && l.inferred.has_value();
        if (all) {
            out.status = AttackStatus::InferredAll;
            for (const auto& l : out.ledger) out.values.push_back(*l.inferred);
        } else {
            out.status = AttackStatus::Undetermined;
            out.note = "some private attributes could not be settled";
        }
    }
    return out;
}

AttackOutcome run_qi(SearchInterface& si, const VictimKnowledge& vk, const AttackOptions& opts, std::uint64_t seed,
                     bool in_mode) {
    AttackOutcome out;
    init_outcome(out, in_mode ? Algorithm::QIIn : Algorithm::QIPoint, si.schema(), opts.target);
    QIAttack attack(si, vk, opts, seed, in_mode, out);
    try {
        attack.run();
    } catch (const Error& e) {
        if (e.code() != Errc::RateLimited) throw;
        out.status = AttackStatus::BudgetExhausted;
        out.note = e.what();
        for (auto& l : out.ledger) {
            const auto allowed = allowed_values(si.schema(), l);
            if (allowed.size() == 1) l.inferred = allowed[0];
        }
        out.value = out.ledger[opts.target].inferred;
    }
    return out;
}

}  // namespace

AttackOutcome qi_point(SearchInterface& si, const VictimKnowledge& vk, const AttackOptions& opts, std::uint64_t seed) {
    return run_qi(si, vk, opts, seed, false);
}

AttackOutcome qi_in(SearchInterface& si, const VictimKnowledge& vk, const AttackOptions& opts, std::uint64_t seed) {
    return run_qi(si, vk, opts, seed, true);
}

AttackOutcome q_point(SearchInterface& si, const VictimKnowledge& vk, const AttackOptions& opts, std::uint64_t seed) {
    return run_qonly(si, vk, opts, seed, false);
}

AttackOutcome q_in(SearchInterface& si, const VictimKnowledge& vk, const AttackOptions& opts, std::uint64_t seed) {
    return run_qonly(si, vk, opts, seed, true);
}

AttackOutcome run_attack(Algorithm algo, SearchInterface& si, const VictimKnowledge& vk, const AttackOptions& opts,
                         std::uint64_t seed) {
    switch (algo) {
        case Algorithm::QIPoint: return qi_point(si, vk, opts, seed);
        case Algorithm::QPoint: return q_point(si, vk, opts, seed);
        case Algorithm::QIIn: return qi_in(si, vk, opts, seed);
        case Algorithm::QIn: return q_in(si, vk, opts, seed);
    }
    return qi_point(si, vk, opts, seed);
}

AttackOutcome infer_all(SearchInterface& si, const VictimKnowledge& vk, Algorithm algo, std::uint64_t seed) {
    AttackOptions opts;
    opts.infer_all = true;
    return run_attack(algo, si, vk, opts, seed);
}

bool replay_exclusion(const Database& db, std::shared_ptr<const RankingFunction> ranking, const InterfaceConfig& cfg,
                      TupleId victim, const AttackOutcome& outcome, const Exclusion& exclusion,
                      DifferentialCriterion criterion) {
    InterfaceConfig fresh = cfg;
    fresh.rate_limit.reset();
    fresh.insertion_delay.reset();
    fresh.insertion_allowed = true;
    fresh.query_kind = QueryKind::InAllowed;
    QueryEngine engine(db, std::move(ranking), fresh);
    EngineSession session(engine);
    for (std::size_t i = 0; i < exclusion.probes_before && i < outcome.probes.size(); ++i) {
        session.insert(outcome.probes[i]);
    }
    return verify_differential_pair(session, exclusion.q_theta, exclusion.q_theta_prime, victim, criterion);
}

namespace {

json value_json(const Schema& schema, std::size_t attr, std::optional<Value> v) {
    if (!v || *v == kNull) return nullptr;
    return json{{"index", *v}, {"label", schema.attribute(attr).domain.at(static_cast<std::size_t>(*v))}};
}

}  // namespace

json outcome_to_json(const AttackOutcome& outcome, const Schema& schema, bool include_trace) {
    json j;
    j["algorithm"] = algorithm_name(outcome.algorithm);
    j["status"] = status_name(outcome.status);
    const std::size_t target_attr = schema.private_index(outcome.target);
    j["target"] = schema.attribute(target_attr).name;
    j["value"] = value_json(schema, target_attr, outcome.value);
    json values = json::object();
    for (std::size_t jx = 0; jx < outcome.values.size(); ++jx) {
        const std::size_t attr = schema.private_index(jx);
        values[schema.attribute(attr).name] = value_json(schema, attr, outcome.values[jx]);
    }
    j["values"] = values;
    j["queries_used"] = outcome.queries_used;
    j["inserts_used"] = outcome.inserts_used;
    j["find_queries"] = outcome.find_queries;
    j["first_find_queries"] = outcome.first_find_queries;
    j["walk_rounds"] = outcome.walk_rounds;
    j["quick_finish"] = outcome.quick_finish;
    const double settled = static_cast<double>(std::count_if(outcome.ledger.begin(), outcome.ledger.end(),
                                                             [](const AttributeLedger& l) { return l.inferred.has_value(); }));
    j["amortized_cost_per_attribute"] = settled > 0 ? json(static_cast<double>(outcome.cost()) / settled) : json(nullptr);
    json ledger = json::array();
    for (const auto& l : outcome.ledger) {
        json excl = json::array();
        for (const auto& e : l.exclusions) {
            excl.push_back({{"value", e.value},
                            {"label", schema.attribute(l.attribute).domain.at(static_cast<std::size_t>(e.value))},
                            {"q", query_to_json(e.q_theta)},
                            {"q_prime", query_to_json(e.q_theta_prime)},
                            {"probes_before", e.probes_before}});
        }
        ledger.push_back({{"attribute", schema.attribute(l.attribute).name},
                          {"excluded", excl},
                          {"inferred", value_json(schema, l.attribute, l.inferred)},
                          {"possible_null", l.possible_null}});
    }
    j["ledger"] = ledger;
    json probes = json::array();
    for (const auto& p : outcome.probes) {
        json row = json::array();
        for (Value v : p) row.push_back(v == kNull ? json(nullptr) : json(v));
        probes.push_back(row);
    }
    j["probes"] = probes;
    if (include_trace) {
        json trace = json::array();
        for (const auto& e : outcome.trace) {
            if (e.kind == TraceEntry::Kind::Query) {
                trace.push_back({{"op", "query"},
                                 {"predicates", query_to_json(e.query)},
                                 {"victim_rank", e.victim_rank ? json(*e.victim_rank) : json(nullptr)}});
            } else {
                json vals = json::array();
                for (Value v : e.values) vals.push_back(v == kNull ? json(nullptr) : json(v));
                trace.push_back({{"op", "insert"},
                                 {"values", vals},
                                 {"id", e.inserted_id ? json(*e.inserted_id) : json(nullptr)},
                                 {"duplicate", e.duplicate}});
            }
        }
        j["trace"] = trace;
    }
    j["note"] = outcome.note;
    return j;
}

}  // namespace rankleak
