#include "rankleak/ranking.hpp"

#include <algorithm>
#include <random>

namespace rankleak {

RankingWeights RankingWeights::uniform(const Schema& schema, double value) {
    return RankingWeights{std::vector<double>(schema.public_count(), value),
                          std::vector<double>(schema.private_count(), value)};
}

RankingWeights RankingWeights::random(const Schema& schema, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RankingWeights w;
    for (std::size_t i = 0; i < schema.public_count(); ++i) w.public_weights.push_back(1.0 - unit(rng));
    for (std::size_t j = 0; j < schema.private_count(); ++j) w.private_weights.push_back(1.0 - unit(rng));
    return w;
}

std::vector<double> RankingWeights::flattened() const {
    std::vector<double> flat(public_weights);
    flat.insert(flat.end(), private_weights.begin(), private_weights.end());
    return flat;
}

void RankingWeights::check(const Schema& schema) const {
    if (public_weights.size() != schema.public_count() || private_weights.size() != schema.private_count()) {
        throw Error(Errc::InvalidArgument, "weight vector sizes do not match the schema");
    }
    for (double w : flattened()) {
        if (!(w > 0.0)) throw Error(Errc::InvalidArgument, "ranking weights must be strictly positive");
    }
}

LinearRanking::LinearRanking(RankingWeights weights) : m_weights(std::move(weights)), m_flat(m_weights.flattened()) {
    for (double w : m_flat) {
        if (!(w > 0.0)) throw Error(Errc::InvalidArgument, "ranking weights must be strictly positive");
    }
}

double LinearRanking::score(std::span<const Value> values, const Query& q) const {
    double s = 0.0;
    for (std::size_t i = 0; i < m_flat.size(); ++i) {
        if (!q[i].contains(values[i])) s += m_flat[i];
    }
    return s;
}

double linear_score(std::span<const Value> values, const Query& q, const RankingWeights& w) {
    return LinearRanking(w).score(values, q);
}

std::string_view tie_policy_name(TieBreakPolicy policy) {
    switch (policy) {
        case TieBreakPolicy::ById: return "by-id";
        case TieBreakPolicy::InsertedFirst: return "inserted-first";
        case TieBreakPolicy::InsertedLast: return "inserted-last";
    }
    return "by-id";
}

std::optional<TieBreakPolicy> parse_tie_policy(std::string_view text) {
    if (text == "by-id") return TieBreakPolicy::ById;
    if (text == "inserted-first") return TieBreakPolicy::InsertedFirst;
    if (text == "inserted-last") return TieBreakPolicy::InsertedLast;
    return std::nullopt;
}

RankKey rank_key(const Tuple& t, double score, TieBreakPolicy policy) {
    int key = 0;
    const bool inserted = t.provenance == Provenance::Inserted;
    if (policy == TieBreakPolicy::InsertedFirst) key = inserted ? 0 : 1;
    if (policy == TieBreakPolicy::InsertedLast) key = inserted ? 1 : 0;
    return RankKey{score, key, t.id};
}

std::vector<TupleId> total_order(const Database& db, const Query& q, const RankingFunction& ranking,
                                 TieBreakPolicy policy) {
    std::vector<RankKey> keys;
    keys.reserve(db.size());
    for (const auto& t : db.tuples()) keys.push_back(rank_key(t, ranking.score(t.values, q), policy));
    std::sort(keys.begin(), keys.end());
    std::vector<TupleId> ids;
    ids.reserve(keys.size());
    for (const auto& k : keys) ids.push_back(k.id);
    return ids;
}

std::vector<std::size_t> domain_sizes(const Schema& schema) {
    std::vector<std::size_t> sizes(schema.arity());
    for (std::size_t i = 0; i < sizes.size(); ++i) sizes[i] = schema.domain_size(i);
    return sizes;
}

namespace {

using Rng = std::mt19937_64;

Value draw(Rng& rng, std::size_t domain) {
    return static_cast<Value>(std::uniform_int_distribution<std::size_t>(0, domain - 1)(rng));
}

ValueSet random_predicate(Rng& rng, std::size_t domain) {
    if (std::bernoulli_distribution(0.5)(rng)) return ValueSet::single(domain, draw(rng, domain));
    std::vector<Value> chosen;
    while (chosen.empty()) {
        for (std::size_t v = 0; v < domain; ++v) {
            if (std::bernoulli_distribution(0.5)(rng)) chosen.push_back(static_cast<Value>(v));
        }
    }
    return ValueSet::of(domain, chosen);
}

Query random_query(Rng& rng, std::span<const std::size_t> domains) {
    std::vector<ValueSet> predicates;
    predicates.reserve(domains.size());
    for (std::size_t d : domains) predicates.push_back(random_predicate(rng, d));
    return Query(std::move(predicates));
}

std::vector<Value> random_values(Rng& rng, std::span<const std::size_t> domains) {
    std::vector<Value> values(domains.size());
    for (std::size_t i = 0; i < domains.size(); ++i) values[i] = draw(rng, domains[i]);
    return values;
}

Value draw_from(Rng& rng, const std::vector<Value>& pool) {
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
}

CertReport degenerate_report(std::size_t trials) {
    CertReport r;
    r.trials = trials;
    r.degenerate = true;
    r.note = "no testable triple";
    return r;
}

}  // namespace

CertReport certify_monotonicity(const RankingFunction& ranking, std::span<const std::size_t> domains,
                                std::size_t trials, std::uint64_t seed) {
    if (domains.size() < 2) return degenerate_report(trials);
    Rng rng(seed);
    CertReport report;
    report.trials = trials;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const std::size_t attr = std::uniform_int_distribution<std::size_t>(0, domains.size() - 1)(rng);
        Query q = random_query(rng, domains);
        if (q[attr].is_full()) {
            auto vals = q[attr].values();
            vals.erase(vals.begin() + static_cast<std::ptrdiff_t>(
                                          std::uniform_int_distribution<std::size_t>(0, vals.size() - 1)(rng)));
            q.set(attr, ValueSet::of(domains[attr], vals));
        }
        std::vector<Value> inside = q[attr].values();
        std::vector<Value> outside;
        for (std::size_t v = 0; v < domains[attr]; ++v) {
            if (!q[attr].contains(static_cast<Value>(v))) outside.push_back(static_cast<Value>(v));
        }
        std::vector<Value> t = random_values(rng, domains);
        std::vector<Value> t_prime = t;
        t[attr] = draw_from(rng, inside);
        t_prime[attr] = draw_from(rng, outside);
        ++report.tested;
        const double s = ranking.score(t, q);
        const double s_prime = ranking.score(t_prime, q);
        if (!(s < s_prime)) {
            if (report.violations++ == 0) {
                report.witness = CertWitness{attr, q, Query{}, t, t_prime, s, s_prime};
            }
        }
    }
    return report;
}

CertReport certify_additivity(const RankingFunction& ranking, std::span<const std::size_t> domains,
                              std::size_t trials, std::uint64_t seed) {
    if (domains.size() < 2) return degenerate_report(trials);
    Rng rng(seed);
    CertReport report;
    report.trials = trials;
    constexpr int kAttempts = 64;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        for (int attempt = 0; attempt < kAttempts; ++attempt) {
            Query q = random_query(rng, domains);
            std::vector<Value> t = random_values(rng, domains);
            std::vector<Value> t_prime = random_values(rng, domains);
            if (t == t_prime) continue;
            double s = ranking.score(t, q);
            double s_prime = ranking.score(t_prime, q);
            if (s == s_prime) continue;
            if (s_prime < s) {
                std::swap(t, t_prime);
                std::swap(s, s_prime);
            }
            const std::size_t attr = std::uniform_int_distribution<std::size_t>(0, domains.size() - 1)(rng);
            Query q_prime = q.with_point(attr, t[attr]);
            const double after = ranking.score(t, q_prime);
            const double after_prime = ranking.score(t_prime, q_prime);
            ++report.tested;
            if (!(after < after_prime) && report.violations++ == 0) {
                report.witness = CertWitness{attr, q, q_prime, t, t_prime, after, after_prime};
            }
            break;
        }
    }
    if (report.tested == 0) report.note = "no pair with distinct scores sampled";
    return report;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

double RandomScoreRanking::score(std::span<const Value> values, const Query& q) const {
    std::uint64_t h = splitmix(m_seed ^ static_cast<std::uint64_t>(q.hash()));
    for (Value v : values) h = splitmix(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double InteractionRanking::score(std::span<const Value> values, const Query& q) const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += discrete_distance(q[i], values[i]);
    if (values.size() >= 2) s += m_c * discrete_distance(q[0], values[0]) * discrete_distance(q[1], values[1]);
    return s;
}

}  // namespace rankleak
