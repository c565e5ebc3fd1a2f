#pragma once

#include <memory>
#include <vector>

#include "rankleak/engine.hpp"
#include "rankleak/model.hpp"
#include "rankleak/ranking.hpp"

namespace rankleak::fixtures {

inline std::shared_ptr<const Schema> bool_schema(std::size_t m, std::size_t m_prime) {
    return std::make_shared<const Schema>(make_boolean_schema(m, m_prime));
}

inline Database make_db(std::shared_ptr<const Schema> schema, const std::vector<std::vector<Value>>& rows) {
    Database db(std::move(schema));
    for (const auto& r : rows) db.insert(r);
    return db;
}

inline std::shared_ptr<const RankingFunction> unit_ranking(const Schema& schema) {
    return std::make_shared<LinearRanking>(RankingWeights::uniform(schema));
}

}  // namespace rankleak::fixtures
