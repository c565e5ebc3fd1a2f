#pragma once

#include <filesystem>
#include <iosfwd>

#include "rankleak/model.hpp"
#include "rankleak/ranking.hpp"
#include "rankleak/wire.hpp"

namespace rankleak {

Schema load_schema(const std::filesystem::path& path);
void write_schema(const Schema& schema, const std::filesystem::path& path);

/// Header row names every schema attribute (any order); ids are 0-based row
/// numbers. Empty cells are Null where allowed.
/// Errors: UnknownValue, NullNotAllowed, RaggedRow, SchemaMismatch, Io.
Database load_csv(const std::filesystem::path& data, const std::filesystem::path& schema_path);
Database read_csv(std::istream& in, std::shared_ptr<const Schema> schema);

/// Columns in declared order, labels as cells.
void write_csv(const Database& db, std::ostream& out);
void write_csv(const Database& db, const std::filesystem::path& path);

/// {"public": {"A1": 1.0, ...}, "private": {"B1": 1.0, ...}}; missing names default to 1.
RankingWeights weights_from_json(const json& j, const Schema& schema);
json weights_to_json(const RankingWeights& w, const Schema& schema);

}  // namespace rankleak
