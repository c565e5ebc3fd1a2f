#include "rankleak/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rankleak {

double erf(double x) { return std::erf(x); }

InstanceStats instance_stats(const Database& db, TupleId victim, const RankingWeights& weights) {
    const Schema& schema = db.schema();
    weights.check(schema);
    const Tuple& v = db.at(victim);
    InstanceStats s;
    s.public_weights = weights.public_weights;
    s.private_weights = weights.private_weights;
    for (std::size_t j = 0; j < schema.private_count(); ++j) s.private_domains.push_back(schema.domain_size(schema.private_index(j)));
    for (const Tuple& t : db.tuples()) {
        if (t.id == victim) continue;
        double d = 0;
        std::vector<bool> mismatch(schema.public_count());
        for (std::size_t i = 0; i < schema.public_count(); ++i) {
            mismatch[i] = t.values[i] != v.values[i];
            if (mismatch[i]) d += weights.public_weights[i];
        }
        s.public_distances.push_back(d);
        s.public_mismatch.push_back(std::move(mismatch));
    }
    return s;
}

namespace {

double spread_term(const InstanceStats& s, std::size_t i) {
    const double w = s.private_weights[i];
    const double d = static_cast<double>(s.private_domains[i]);
    return w * w * (d - 1) / (d * d);
}

/// erf(num / den) with den = 0 read as the sign limit.
double erf_ratio(double num, double den) {
    if (den > 0) return erf(num / den);
    if (num > 0) return 1.0;
    if (num < 0) return -1.0;
    return 0.0;
}

double ratio_bound(const std::vector<double>& distances, double w1, double den, std::size_t v1) {
    double prod = 1.0;
    for (double d : distances) prod *= (1 + erf_ratio(d - w1, den)) / (1 + erf_ratio(d, den));
    return std::pow(1 - prod, static_cast<double>(v1) - 1);
}

}  // namespace

double findq_success_prob(const InstanceStats& s) {
    double sum = 0;
    for (std::size_t i = 0; i < s.private_weights.size(); ++i) sum += spread_term(s, i);
    const double den = std::sqrt(2 * sum);
    double p = 1.0;
    for (double d : s.public_distances) p *= 0.5 + 0.5 * erf_ratio(d, den);
    return p;
}

double qi_point_expected_cost(const InstanceStats& s) {
    double walk = 0;
    for (std::size_t d : s.private_domains) walk += static_cast<double>(d) - 1;
    return 1 / findq_success_prob(s) + walk;
}

double q_point_quick_finish_prob(const InstanceStats& s) {
    double sum = 0;
    for (std::size_t i = 1; i < s.private_weights.size(); ++i) sum += spread_term(s, i);
    return ratio_bound(s.public_distances, s.private_weights.at(0), std::sqrt(2 * sum), s.private_domains.at(0));
}

double qi_in_c(const InstanceStats& s, std::size_t h, ChReading reading) {
    double c = 0;
    for (std::size_t i = 1; i <= h; ++i) {
        double prod = 1;
        for (std::size_t j = 1; j <= i; ++j) {
            prod *= static_cast<double>(s.private_domains.at((reading == ChReading::Intended ? j : i) - 1));
        }
        c += prod;
    }
    return c;
}

double qi_in_p(const InstanceStats& s, std::size_t h) {
    double sum = 0;
    for (std::size_t i = 0; i < h; ++i) sum += spread_term(s, i);
    const double den = std::sqrt(2 * sum);
    double p = 1.0;
    for (double d : s.public_distances) p *= 0.5 + 0.5 * erf_ratio(d, den);
    return p;
}

double qi_in_expected_cost(const InstanceStats& s, ChReading reading) {
    if (s.public_distances.empty() || *std::min_element(s.public_distances.begin(), s.public_distances.end()) > 0) {
        return 1.0;
    }
    const std::size_t mp = s.private_domains.size();
    double total = 0;
    for (std::size_t h = 1; h + 1 <= mp; ++h) {
        total += qi_in_c(s, h + 1, reading) * (1 - std::pow(1 - qi_in_p(s, h), qi_in_c(s, h, reading)));
    }
    return total;
}

double q_in_quick_finish_prob(const InstanceStats& s, std::span<const std::size_t> public_points,
                              std::span<const std::size_t> private_points) {
    double sum = 0;
    for (std::size_t i : private_points) {
        if (i == 0) throw Error(Errc::InvalidArgument, "B1 cannot be among the private point predicates");
        sum += spread_term(s, i);
    }
    std::vector<double> restricted;
    restricted.reserve(s.public_mismatch.size());
    for (const auto& mismatch : s.public_mismatch) {
        double d = 0;
        for (std::size_t i : public_points) {
            if (mismatch.at(i)) d += s.public_weights.at(i);
        }
        restricted.push_back(d);
    }
    return ratio_bound(restricted, s.private_weights.at(0), std::sqrt(2 * sum), s.private_domains.at(0));
}

Database build_theorem1_db(std::shared_ptr<const Schema> schema, const std::vector<Value>& victim_values) {
    Database db(schema);
    db.insert(victim_values, Provenance::BonaFide, TupleId{0});
    for (std::size_t j = 0; j < schema->private_count(); ++j) {
        const std::size_t attr = schema->private_index(j);
        for (std::size_t x = 0; x < schema->domain_size(attr); ++x) {
            if (static_cast<Value>(x) == victim_values[attr]) continue;
            auto values = victim_values;
            values[attr] = static_cast<Value>(x);
            db.insert(std::move(values), Provenance::Inserted);
        }
    }
    return db;
}

SubsetSumInstance build_theorem3_db(std::shared_ptr<const Schema> schema) {
    const std::size_t m = schema->public_count();
    if (m > 20) throw Error(Errc::InvalidArgument, "at most 20 public attributes");
    for (std::size_t i = 0; i < m; ++i) {
        if (schema->domain_size(i) != 2) throw Error(Errc::InvalidArgument, "public attributes must be binary");
    }
    RankingWeights w;
    double next = 3;
    for (std::size_t i = 0; i < m; ++i, next *= 3) w.public_weights.push_back(next);
    w.private_weights.push_back(1);
    for (std::size_t j = 1; j < schema->private_count(); ++j, next *= 3) w.private_weights.push_back(next);

    SubsetSumInstance out{Database(schema), w, 0};
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        std::vector<Value> values;
        for (std::size_t i = 0; i < m; ++i) values.push_back(static_cast<Value>(mask >> i & 1U));
        for (std::size_t j = 0; j < schema->private_count(); ++j) {
            const std::size_t d = schema->domain_size(schema->private_index(j));
            values.push_back(static_cast<Value>((mask + j) % d));
        }
        out.db.insert(std::move(values));
    }
    return out;
}

bool subset_sum_gap_ok(const RankingWeights& weights) {
    std::vector<double> pool(weights.public_weights);
    pool.insert(pool.end(), weights.private_weights.begin() + 1, weights.private_weights.end());
    if (pool.size() > 20) throw Error(Errc::InvalidArgument, "too many weights for subset enumeration");
    const double w1 = weights.private_weights.at(0);
    std::vector<double> sums;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pool.size()); ++mask) {
        double s = 0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (mask >> i & 1U) s += pool[i];
        }
        sums.push_back(s);
    }
    std::sort(sums.begin(), sums.end());
    for (std::size_t i = 1; i < sums.size(); ++i) {
        if (sums[i] - sums[i - 1] <= w1) return false;
    }
    return true;
}

Database build_all_same_b1_db(std::shared_ptr<const Schema> schema, std::size_t n, std::uint64_t seed) {
    const std::size_t b1 = schema->private_index(0);
    std::uint64_t space = 1;
    for (std::size_t i = 0; i < schema->arity() && space < n; ++i) {
        if (i != b1) space *= schema->domain_size(i);
    }
    if (n > space) throw Error(Errc::ImpossibleCardinality, "not enough distinct value combinations");
    std::mt19937_64 rng(seed);
    Database db(schema);
    while (db.size() < n) {
        std::vector<Value> values(schema->arity());
        for (std::size_t i = 0; i < schema->arity(); ++i) {
            values[i] = i == b1 ? 0
                                : static_cast<Value>(std::uniform_int_distribution<std::size_t>(0, schema->domain_size(i) - 1)(rng));
        }
        if (!db.id_of_values(values)) db.insert(std::move(values));
    }
    return db;
}

}  // namespace rankleak
