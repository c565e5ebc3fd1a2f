#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rankleak/adversary.hpp"
#include "rankleak/engine.hpp"
#include "rankleak/wire.hpp"

namespace rankleak {

enum class GeneratorKind { UniformBool, Zipf, FromCsv };

struct GeneratorConfig {
    GeneratorKind kind = GeneratorKind::UniformBool;
    double z = 2.0;
    std::size_t avg_domain = 4;
    std::string csv_path;
    std::string schema_path;
};

/// PrivateWeight scales every private weight; W1 sets only the weight of B1.
enum class SweepParam { None, K, N, M, MPrime, W1, PrivateWeight, TargetDomain };

std::string_view sweep_param_name(SweepParam p);
std::optional<SweepParam> parse_sweep_param(std::string_view text);

struct ExperimentConfig {
    GeneratorConfig generator;
    std::size_t n = 200;
    std::size_t m = 6;
    std::size_t m_prime = 4;
    /// Domain size of B1 for the uniform generator (other attributes stay binary).
    std::size_t target_domain = 2;
    double public_weight = 1.0;
    double private_weight = 1.0;
    /// Weight of B1; defaults to private_weight.
    std::optional<double> w1;
    InterfaceConfig iface;
    std::vector<Algorithm> algorithms{Algorithm::QIPoint};
    SweepParam param = SweepParam::None;
    std::vector<double> values;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    /// Per-trial request cap.
    std::optional<std::size_t> budget = 100000;
    std::size_t jobs = 1;
    std::string output;

    /// Errors: InvalidArgument.
    void check() const;
};

ExperimentConfig config_from_json(const json& j);
json config_to_json(const ExperimentConfig& cfg);

struct TrialRecord {
    double point = 0;
    Algorithm algorithm = Algorithm::QIPoint;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    TupleId victim = 0;
    bool null_victim = false;
    AttackStatus status = AttackStatus::Undetermined;
    bool correct = false;
    std::size_t queries = 0;
    std::size_t inserts = 0;
    std::string error;

    std::size_t cost() const { return queries + inserts; }
};

struct SweepPoint {
    double value = 0;
    Algorithm algorithm = Algorithm::QIPoint;
    std::size_t trials = 0;
    std::size_t successes = 0;
    /// Undetermined, budget exhausted, or errored.
    std::size_t failures = 0;
    std::size_t wrong = 0;
    std::size_t null_victims = 0;
    /// Over successful trials only.
    double mean_cost = 0;
    double median_cost = 0;
    double success_rate = 0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::vector<TrialRecord> trials;
};

/// Deterministic per seed: trial i at every sweep point uses seed + i for its
/// database, victim and attack, whatever the job count.
SweepResult run_sweep(const ExperimentConfig& cfg);

void write_sweep_csv(const SweepResult& result, std::ostream& out);
json sweep_manifest(const ExperimentConfig& cfg, const SweepResult& result);

}  // namespace rankleak
