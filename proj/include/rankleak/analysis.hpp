#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "rankleak/model.hpp"
#include "rankleak/ranking.hpp"

namespace rankleak {

/// Error function, accurate to about 1e-15.
double erf(double x);

/// Inputs to the closed-form estimators for one victim.
struct InstanceStats {
    /// d^A(v, t) for every t != v: weighted count of public disagreements.
    std::vector<double> public_distances;
    /// Per t != v, which public attributes disagree with v (for restricted distances).
    std::vector<std::vector<bool>> public_mismatch;
    std::vector<double> public_weights;
    std::vector<double> private_weights;
    std::vector<std::size_t> private_domains;
};

InstanceStats instance_stats(const Database& db, TupleId victim, const RankingWeights& weights);

/// Probability that a random private-value point query with the victim's
/// public values returns the victim.
double findq_success_prob(const InstanceStats& stats);

/// 1/p + sum(|V_i| - 1).
double qi_point_expected_cost(const InstanceStats& stats);

/// Lower bound on the chance that q-point settles B1 from the first sibling group.
/// With a single private attribute the erf arguments take their sign limits.
double q_point_quick_finish_prob(const InstanceStats& stats);

/// c_h with the inner product over |V_j| (Intended) or over |V_i| as printed (Literal).
enum class ChReading { Intended, Literal };

double qi_in_expected_cost(const InstanceStats& stats, ChReading reading = ChReading::Intended);
double qi_in_c(const InstanceStats& stats, std::size_t h, ChReading reading = ChReading::Intended);
/// Probability that a query with point predicates on B1..Bh returns the victim.
double qi_in_p(const InstanceStats& stats, std::size_t h);

/// `public_points`: public attribute indices with point predicates.
/// `private_points`: private attribute indices (0 = B1) with point predicates; must not contain 0.
double q_in_quick_finish_prob(const InstanceStats& stats, std::span<const std::size_t> public_points,
                              std::span<const std::size_t> private_points);

/// The victim (id 0) plus, per private attribute and per other value of it,
/// one tuple equal to the victim except there. Those tuples are marked
/// Inserted so that InsertedFirst ties favour them.
Database build_theorem1_db(std::shared_ptr<const Schema> schema, const std::vector<Value>& victim_values);

struct SubsetSumInstance {
    Database db;
    RankingWeights weights;
    TupleId victim = 0;
};

/// Every public projection of a binary-public schema once (victim first) with
/// power-of-3 weights and w'_1 = 1, so no subset-sum gap is as small as w'_1.
/// Errors: InvalidArgument when a public domain is not binary or m > 20.
SubsetSumInstance build_theorem3_db(std::shared_ptr<const Schema> schema);

/// True when every two distinct subsets of the weights other than w'_1 have
/// sums more than w'_1 apart. Errors: InvalidArgument above 20 weights.
bool subset_sum_gap_ok(const RankingWeights& weights);

/// Every tuple shares B1's first value; victim is id 0.
Database build_all_same_b1_db(std::shared_ptr<const Schema> schema, std::size_t n, std::uint64_t seed);

}  // namespace rankleak
