#include "rankleak/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <random>
#include <thread>

#include "rankleak/csv_io.hpp"
#include "rankleak/datagen.hpp"

namespace rankleak {

namespace {

constexpr std::pair<SweepParam, std::string_view> kParamNames[] = {
    {SweepParam::None, "none"},   {SweepParam::K, "k"},   {SweepParam::N, "n"},
    {SweepParam::M, "m"},         {SweepParam::MPrime, "m_prime"}, {SweepParam::W1, "w1"},
    {SweepParam::PrivateWeight, "private_weight"}, {SweepParam::TargetDomain, "target_domain"},
};

std::string_view generator_name(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::UniformBool: return "uniform_bool";
        case GeneratorKind::Zipf: return "zipf";
        case GeneratorKind::FromCsv: return "csv";
    }
    return "uniform_bool";
}

/// The config with the sweep parameter set to `value`.
ExperimentConfig at_point(const ExperimentConfig& cfg, double value) {
    ExperimentConfig c = cfg;
    const auto count = static_cast<std::size_t>(std::llround(value));
    switch (cfg.param) {
        case SweepParam::None: break;
        case SweepParam::K: c.iface.k = count; break;
        case SweepParam::N: c.n = count; break;
        case SweepParam::M: c.m = count; break;
        case SweepParam::MPrime: c.m_prime = count; break;
        case SweepParam::W1: c.w1 = value; break;
        case SweepParam::PrivateWeight: c.private_weight = value; break;
        case SweepParam::TargetDomain: c.target_domain = count; break;
    }
    return c;
}

Database make_database(const ExperimentConfig& c, std::uint64_t seed) {
    switch (c.generator.kind) {
        case GeneratorKind::UniformBool: {
            std::vector<std::size_t> pub(c.m, 2), priv(c.m_prime, 2);
            if (!priv.empty()) priv[0] = c.target_domain;
            return gen_uniform(std::make_shared<const Schema>(make_categorical_schema(c.m, c.m_prime, pub, priv)), c.n,
                               seed);
        }
        case GeneratorKind::Zipf: return gen_zipf(c.n, c.m, c.m_prime, c.generator.avg_domain, c.generator.z, seed);
        case GeneratorKind::FromCsv: return load_csv(c.generator.csv_path, c.generator.schema_path);
    }
    throw Error(Errc::InvalidArgument, "unknown generator");
}

RankingWeights make_weights(const ExperimentConfig& c, const Schema& schema) {
    RankingWeights w;
    w.public_weights.assign(schema.public_count(), c.public_weight);
    w.private_weights.assign(schema.private_count(), c.private_weight);
    if (c.w1 && !w.private_weights.empty()) w.private_weights[0] = *c.w1;
    w.check(schema);
    return w;
}

TrialRecord run_trial(const ExperimentConfig& c, Algorithm algo, std::size_t index, double point,
                      const Database* shared_db) {
    TrialRecord rec;
    rec.point = point;
    rec.algorithm = algo;
    rec.trial = index;
    rec.seed = c.seed + index;
    try {
        Database db = shared_db ? *shared_db : make_database(c, rec.seed);
        std::mt19937_64 rng(rec.seed);
        const Tuple& v = db.tuples()[std::uniform_int_distribution<std::size_t>(0, db.size() - 1)(rng)];
        rec.victim = v.id;
        const Value truth = v.values[db.schema().private_index(0)];
        if (truth == kNull) {
            rec.null_victim = true;
            return rec;
        }
        auto ranking = std::make_shared<LinearRanking>(make_weights(c, db.schema()));
        InterfaceConfig iface = c.iface;
        if (!uses_insertion(algo)) iface.insertion_allowed = false;
        const VictimKnowledge vk = victim_knowledge(db, v.id);
        QueryEngine engine(std::move(db), ranking, iface);
        EngineSession session(engine, c.budget);
        AttackOutcome out = run_attack(algo, session, vk, AttackOptions{}, rec.seed);
        rec.status = out.status;
        rec.queries = out.queries_used;
        rec.inserts = out.inserts_used;
        rec.correct = (out.status == AttackStatus::Inferred || out.status == AttackStatus::InferredAll) &&
                      out.value == truth;
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

SweepPoint aggregate(double value, Algorithm algo, const std::vector<const TrialRecord*>& recs) {
    SweepPoint p;
    p.value = value;
    p.algorithm = algo;
    std::vector<double> costs;
    for (const TrialRecord* r : recs) {
        if (r->null_victim) {
            ++p.null_victims;
            continue;
        }
        ++p.trials;
        const bool inferred = r->error.empty() &&
                              (r->status == AttackStatus::Inferred || r->status == AttackStatus::InferredAll);
        if (inferred && r->correct) {
            ++p.successes;
            costs.push_back(static_cast<double>(r->cost()));
        } else if (inferred) {
            ++p.wrong;
        } else {
            ++p.failures;
        }
    }
    if (!costs.empty()) {
        double sum = 0;
        for (double x : costs) sum += x;
        p.mean_cost = sum / static_cast<double>(costs.size());
        std::sort(costs.begin(), costs.end());
        const std::size_t mid = costs.size() / 2;
        p.median_cost = costs.size() % 2 ? costs[mid] : (costs[mid - 1] + costs[mid]) / 2;
    }
    p.success_rate = p.trials ? static_cast<double>(p.successes) / static_cast<double>(p.trials) : 0.0;
    return p;
}

}  // namespace

std::string_view sweep_param_name(SweepParam p) {
    for (const auto& [param, name] : kParamNames) {
        if (param == p) return name;
    }
    return "none";
}

std::optional<SweepParam> parse_sweep_param(std::string_view text) {
    for (const auto& [param, name] : kParamNames) {
        if (name == text) return param;
    }
    if (text == "mprime" || text == "m'") return SweepParam::MPrime;
    return std::nullopt;
}

void ExperimentConfig::check() const {
    if (trials < 1) throw Error(Errc::InvalidArgument, "trials must be at least 1");
    if (algorithms.empty()) throw Error(Errc::InvalidArgument, "no algorithm selected");
    if (param != SweepParam::None && values.empty()) throw Error(Errc::InvalidArgument, "sweep has no values");
    if (jobs < 1) throw Error(Errc::InvalidArgument, "jobs must be at least 1");
    iface.check();
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    try {
        if (j.contains("generator")) {
            const auto& g = j["generator"];
            const auto kind = g.value("kind", std::string("uniform_bool"));
            if (kind == "uniform_bool" || kind == "uniform-bool") {
                c.generator.kind = GeneratorKind::UniformBool;
            } else if (kind == "zipf") {
                c.generator.kind = GeneratorKind::Zipf;
            } else if (kind == "csv") {
                c.generator.kind = GeneratorKind::FromCsv;
            } else {
                throw Error(Errc::InvalidArgument, "unknown generator kind " + kind);
            }
            c.generator.z = g.value("z", c.generator.z);
            c.generator.avg_domain = g.value("avg_domain", c.generator.avg_domain);
            c.generator.csv_path = g.value("csv", std::string());
            c.generator.schema_path = g.value("schema", std::string());
        }
        c.n = j.value("n", c.n);
        c.m = j.value("m", c.m);
        c.m_prime = j.value("m_prime", c.m_prime);
        c.target_domain = j.value("target_domain", c.target_domain);
        c.public_weight = j.value("public_weight", c.public_weight);
        c.private_weight = j.value("private_weight", c.private_weight);
        if (j.contains("w1")) c.w1 = j["w1"].get<double>();
        c.iface.k = j.value("k", c.iface.k);
        if (j.contains("tie")) {
            auto tie = parse_tie_policy(j["tie"].get<std::string>());
            if (!tie) throw Error(Errc::InvalidArgument, "unknown tie policy");
            c.iface.tie = *tie;
        }
        if (j.contains("query_kind")) {
            auto kind = parse_query_kind(j["query_kind"].get<std::string>());
            if (!kind) throw Error(Errc::InvalidArgument, "unknown query kind");
            c.iface.query_kind = *kind;
        }
        if (j.contains("algorithms")) {
            c.algorithms.clear();
            for (const auto& a : j["algorithms"]) {
                auto algo = parse_algorithm(a.get<std::string>());
                if (!algo) throw Error(Errc::InvalidArgument, "unknown algorithm " + a.get<std::string>());
                c.algorithms.push_back(*algo);
            }
        }
        if (j.contains("sweep")) {
            const auto& s = j["sweep"];
            auto p = parse_sweep_param(s.at("param").get<std::string>());
            if (!p) throw Error(Errc::InvalidArgument, "unknown sweep parameter");
            c.param = *p;
            c.values = s.at("values").get<std::vector<double>>();
        }
        c.trials = j.value("trials", c.trials);
        c.seed = j.value("seed", c.seed);
        if (j.contains("budget")) {
            c.budget = j["budget"].is_null() ? std::nullopt : std::optional<std::size_t>(j["budget"].get<std::size_t>());
        }
        c.jobs = j.value("jobs", c.jobs);
        c.output = j.value("output", c.output);
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("bad experiment config: ") + e.what());
    }
    c.check();
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json algos = json::array();
    for (Algorithm a : c.algorithms) algos.push_back(algorithm_name(a));
    json j{{"generator",
            {{"kind", generator_name(c.generator.kind)},
             {"z", c.generator.z},
             {"avg_domain", c.generator.avg_domain},
             {"csv", c.generator.csv_path},
             {"schema", c.generator.schema_path}}},
           {"n", c.n},
           {"m", c.m},
           {"m_prime", c.m_prime},
           {"target_domain", c.target_domain},
           {"public_weight", c.public_weight},
           {"private_weight", c.private_weight},
           {"k", c.iface.k},
           {"tie", tie_policy_name(c.iface.tie)},
           {"query_kind", query_kind_name(c.iface.query_kind)},
           {"algorithms", algos},
           {"sweep", {{"param", sweep_param_name(c.param)}, {"values", c.values}}},
           {"trials", c.trials},
           {"seed", c.seed},
           {"budget", c.budget ? json(*c.budget) : json(nullptr)},
           {"jobs", c.jobs},
           {"output", c.output}};
    if (c.w1) j["w1"] = *c.w1;
    return j;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
    cfg.check();
    const std::vector<double> points = cfg.param == SweepParam::None ? std::vector<double>{0.0} : cfg.values;

    struct Job {
        std::size_t point;
        Algorithm algo;
        std::size_t trial;
    };
    std::vector<Job> jobs;
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (Algorithm a : cfg.algorithms) {
            for (std::size_t t = 0; t < cfg.trials; ++t) jobs.push_back(Job{p, a, t});
        }
    }
    std::vector<ExperimentConfig> configs;
    for (double v : points) configs.push_back(at_point(cfg, v));
    std::optional<Database> csv_db;
    if (cfg.generator.kind == GeneratorKind::FromCsv) csv_db = make_database(cfg, cfg.seed);

    std::vector<TrialRecord> records(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const Job& job = jobs[i];
            records[i] = run_trial(configs[job.point], job.algo, job.trial, points[job.point],
                                   csv_db ? &*csv_db : nullptr);
        }
    };
    std::vector<std::thread> threads;
    for (std::size_t t = 1; t < cfg.jobs; ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    SweepResult result;
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (Algorithm a : cfg.algorithms) {
            std::vector<const TrialRecord*> recs;
            for (std::size_t i = 0; i < jobs.size(); ++i) {
                if (jobs[i].point == p && jobs[i].algo == a) recs.push_back(&records[i]);
            }
            result.points.push_back(aggregate(points[p], a, recs));
        }
    }
    result.trials = std::move(records);
    return result;
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
    out << "value,algorithm,trials,successes,failures,wrong,null_victims,success_rate,mean_cost,median_cost\n";
    for (const auto& p : result.points) {
        out << p.value << ',' << algorithm_name(p.algorithm) << ',' << p.trials << ',' << p.successes << ','
            << p.failures << ',' << p.wrong << ',' << p.null_victims << ',' << p.success_rate << ',' << p.mean_cost
            << ',' << p.median_cost << '\n';
    }
}

json sweep_manifest(const ExperimentConfig& cfg, const SweepResult& result) {
    json trials = json::array();
    for (const auto& r : result.trials) {
        trials.push_back({{"point", r.point},
                          {"algorithm", algorithm_name(r.algorithm)},
                          {"trial", r.trial},
                          {"seed", r.seed},
                          {"victim", r.victim},
                          {"null_victim", r.null_victim},
                          {"status", status_name(r.status)},
                          {"correct", r.correct},
                          {"queries", r.queries},
                          {"inserts", r.inserts},
                          {"error", r.error}});
    }
    return json{{"config", config_to_json(cfg)}, {"version", "0.1.0"}, {"trials", trials}};
}

}  // namespace rankleak
