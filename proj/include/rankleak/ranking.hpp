#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankleak/model.hpp"

namespace rankleak {

/// 0 when `value` is in the predicate, 1 otherwise. Null is never in a predicate.
inline int discrete_distance(const ValueSet& predicate, Value value) noexcept { return predicate.contains(value) ? 0 : 1; }

/// Scores a tuple's value vector against a query; lower ranks first.
class RankingFunction {
  public:
    virtual ~RankingFunction() = default;
    virtual double score(std::span<const Value> values, const Query& q) const = 0;
    virtual std::string name() const = 0;
};

struct RankingWeights {
    std::vector<double> public_weights;
    std::vector<double> private_weights;

    static RankingWeights uniform(const Schema& schema, double value = 1.0);
    /// Every weight drawn independently from (0, 1].
    static RankingWeights random(const Schema& schema, std::uint64_t seed);

    /// Weights in schema internal order (publics then privates).
    std::vector<double> flattened() const;
    /// Throws InvalidArgument on size mismatch or a non-positive weight.
    void check(const Schema& schema) const;
};

/// Weighted sum of per-attribute discrete distances, publics first then
/// privates, always in that order so equal sums compare bitwise equal.
class LinearRanking final : public RankingFunction {
  public:
    explicit LinearRanking(RankingWeights weights);

    double score(std::span<const Value> values, const Query& q) const override;
    std::string name() const override { return "linear"; }
    const RankingWeights& weights() const { return m_weights; }

  private:
    RankingWeights m_weights;
    std::vector<double> m_flat;
};

double linear_score(std::span<const Value> values, const Query& q, const RankingWeights& w);

enum class TieBreakPolicy { ById, InsertedFirst, InsertedLast };

std::string_view tie_policy_name(TieBreakPolicy policy);
std::optional<TieBreakPolicy> parse_tie_policy(std::string_view text);

/// Rank key shared by the engine and total_order: (score, policy key, id).
struct RankKey {
    double score;
    int policy_key;
    TupleId id;

    auto operator<=>(const RankKey&) const = default;
};

RankKey rank_key(const Tuple& t, double score, TieBreakPolicy policy);

/// Every tuple id in ascending rank order.
std::vector<TupleId> total_order(const Database& db, const Query& q, const RankingFunction& ranking,
                                 TieBreakPolicy policy);

struct CertWitness {
    std::size_t attribute = 0;
    Query q;
    Query q_prime;  // additivity only
    std::vector<Value> t;
    std::vector<Value> t_prime;
    double score_t = 0;
    double score_t_prime = 0;
};

struct CertReport {
    std::size_t trials = 0;
    std::size_t tested = 0;
    std::size_t violations = 0;
    bool degenerate = false;
    std::string note;
    std::optional<CertWitness> witness;  // first violation found

    bool ok() const { return !degenerate && violations == 0; }
};

/// Samples (q, t, t', attribute) with t and t' equal except on that attribute,
/// t matching q there and t' not, and checks s(t|q) < s(t'|q).
CertReport certify_monotonicity(const RankingFunction& ranking, std::span<const std::size_t> domains,
                                std::size_t trials, std::uint64_t seed);
/// Samples (q, t, t') with s(t|q) < s(t'|q), pins one attribute of q to t's
/// value and checks the order survives.
CertReport certify_additivity(const RankingFunction& ranking, std::span<const std::size_t> domains,
                              std::size_t trials, std::uint64_t seed);

std::vector<std::size_t> domain_sizes(const Schema& schema);

/// Counterexample: a pseudo-random score per (values, query) pair.
class RandomScoreRanking final : public RankingFunction {
  public:
    explicit RandomScoreRanking(std::uint64_t seed) : m_seed(seed) {}
    double score(std::span<const Value> values, const Query& q) const override;
    std::string name() const override { return "random"; }

  private:
    std::uint64_t m_seed;
};

/// Counterexample: unit-weight sum plus `c` times the product of the first two
/// attributes' distances.
class InteractionRanking final : public RankingFunction {
  public:
    explicit InteractionRanking(double c = -0.9) : m_c(c) {}
    double score(std::span<const Value> values, const Query& q) const override;
    std::string name() const override { return "interaction"; }

  private:
    double m_c;
};

}  // namespace rankleak
