#pragma once

#include <cstdint>
#include <memory>

#include "rankleak/model.hpp"

namespace rankleak {

/// n distinct tuples over m public and m' private binary attributes, each
/// value a fair coin. Errors: ImpossibleCardinality when n > 2^(m+m').
Database gen_uniform_bool(std::size_t n, std::size_t m, std::size_t m_prime, std::uint64_t seed);

/// Same, over an arbitrary categorical schema with uniform values.
Database gen_uniform(std::shared_ptr<const Schema> schema, std::size_t n, std::uint64_t seed);

/// Domain sizes uniform in [lo, 2*avg - lo] with lo = max(2, avg/2), so they
/// average `avg_domain`; values drawn Zipf(z) by domain index.
Schema zipf_schema(std::size_t m, std::size_t m_prime, std::size_t avg_domain, std::uint64_t seed);
Database gen_zipf(std::size_t n, std::size_t m, std::size_t m_prime, std::size_t avg_domain, double z,
                  std::uint64_t seed);

}  // namespace rankleak
