#include "rankleak/datagen.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace rankleak {

namespace {

std::uint64_t space_size(const Schema& schema) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < schema.arity(); ++i) {
        const std::uint64_t d = schema.domain_size(i);
        if (total > std::numeric_limits<std::uint64_t>::max() / d) return std::numeric_limits<std::uint64_t>::max();
        total *= d;
    }
    return total;
}

template <class Draw>
Database fill(std::shared_ptr<const Schema> schema, std::size_t n, Draw draw) {
    if (n > space_size(*schema)) {
        throw Error(Errc::ImpossibleCardinality,
                    "cannot draw " + std::to_string(n) + " distinct tuples from " + std::to_string(space_size(*schema)));
    }
    Database db(schema);
    std::vector<Value> values(schema->arity());
    while (db.size() < n) {
        for (std::size_t i = 0; i < schema->arity(); ++i) values[i] = draw(i);
        if (!db.id_of_values(values)) db.insert(values);
    }
    return db;
}

}  // namespace

Database gen_uniform(std::shared_ptr<const Schema> schema, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Schema& s = *schema;
    return fill(schema, n, [&](std::size_t i) {
        return static_cast<Value>(std::uniform_int_distribution<std::size_t>(0, s.domain_size(i) - 1)(rng));
    });
}

Database gen_uniform_bool(std::size_t n, std::size_t m, std::size_t m_prime, std::uint64_t seed) {
    return gen_uniform(std::make_shared<const Schema>(make_boolean_schema(m, m_prime)), n, seed);
}

Schema zipf_schema(std::size_t m, std::size_t m_prime, std::size_t avg_domain, std::uint64_t seed) {
    if (avg_domain < 2) throw Error(Errc::InvalidArgument, "average domain size must be at least 2");
    std::mt19937_64 rng(seed);
    const std::size_t lo = std::max<std::size_t>(2, avg_domain / 2);
    const std::size_t hi = 2 * avg_domain - lo;
    std::uniform_int_distribution<std::size_t> size(lo, hi);
    std::vector<std::size_t> pub(m), priv(m_prime);
    for (auto& d : pub) d = size(rng);
    for (auto& d : priv) d = size(rng);
    return make_categorical_schema(m, m_prime, pub, priv);
}

Database gen_zipf(std::size_t n, std::size_t m, std::size_t m_prime, std::size_t avg_domain, double z,
                  std::uint64_t seed) {
    if (!(z > 0)) throw Error(Errc::InvalidArgument, "zipf exponent must be positive");
    auto schema = std::make_shared<const Schema>(zipf_schema(m, m_prime, avg_domain, seed));
    std::vector<std::discrete_distribution<Value>> dists;
    for (std::size_t i = 0; i < schema->arity(); ++i) {
        std::vector<double> weights(schema->domain_size(i));
        for (std::size_t r = 0; r < weights.size(); ++r) weights[r] = 1.0 / std::pow(static_cast<double>(r + 1), z);
        dists.emplace_back(weights.begin(), weights.end());
    }
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    return fill(schema, n, [&](std::size_t i) { return dists[i](rng); });
}

}  // namespace rankleak
