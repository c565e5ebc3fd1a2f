#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rankleak/engine.hpp"
#include "rankleak/wire.hpp"

namespace rankleak {

struct ScenarioReport {
    std::string name;
    std::size_t cases = 0;
    std::size_t decided = 0;
    std::size_t correct = 0;
    std::size_t wrong = 0;
    std::size_t undecided = 0;
    /// Queries plus inserts and profile edits.
    std::size_t requests = 0;
    std::optional<std::string> identified;
    bool success = false;
    json details;
};

/// Dating-site preference match. Public A1 = married before {Yes, No} and an
/// age band; private B1 = "ok if match was married before" {No, NoPreference}.
/// The searcher's own marital status in the query is checked against each
/// candidate's B1, and the searcher's preference against the candidate's A1.
class PreferenceMatchRanking final : public RankingFunction {
  public:
    double score(std::span<const Value> values, const Query& q) const override;
    std::string name() const override { return "preference-match"; }
};

std::shared_ptr<const Schema> preference_schema();

/// Enumerates every population of up to `max_population` distinct profiles,
/// every victim in it, and runs the two-query rank comparison with a random
/// searcher preference. Success means no wrong inference, at least one
/// inference, and never a rank drop for a NoPreference victim.
ScenarioReport scenario_boolean_preference(std::uint64_t seed, std::size_t max_population = 5);

struct ZipTable {
    std::vector<std::string> codes;
    std::vector<std::pair<double, double>> coords;
};

/// rows x cols unit grid, codes "Z000".."Z099" for 10 x 10.
ZipTable make_grid_zip_table(std::size_t rows, std::size_t cols);

/// Users are ranked by name match, then by planar distance from the
/// searcher's zip (the query's zip predicate). Older accounts win ties.
class ZipDistanceRanking final : public RankingFunction {
  public:
    explicit ZipDistanceRanking(std::vector<std::pair<double, double>> coords) : m_coords(std::move(coords)) {}
    double score(std::span<const Value> values, const Query& q) const override;
    std::string name() const override { return "zip-distance"; }
    double distance(Value a, Value b) const;

  private:
    std::vector<std::pair<double, double>> m_coords;
};

/// Two fake accounts carrying the victim's name. Stage 1 compares the victim
/// against account 2 from account 1's location and prunes candidate codes by
/// distance (with `margin`) until `patience` rounds in a row prune nothing.
/// Stage 2 moves account 1 onto each surviving code and searches from there:
/// the victim outranks it exactly when it lives within `margin` of that code.
/// Errors: VictimNotFound when no candidate survives, UnknownValue for a bad code.
ScenarioReport scenario_zipcode_bisection(const ZipTable& table, const std::string& victim_zip, double margin,
                                          std::uint64_t seed, std::size_t others = 30, std::size_t patience = 25);

}  // namespace rankleak
