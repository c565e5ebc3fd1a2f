#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "rankleak/adversary.hpp"
#include "rankleak/analysis.hpp"
#include "rankleak/csv_io.hpp"
#include "rankleak/datagen.hpp"
#include "rankleak/oracle.hpp"
#include "rankleak/scenarios.hpp"
#include "rankleak/server.hpp"
#include "rankleak/sweep.hpp"

using namespace rankleak;

namespace {

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kUndetermined = 3, kBudget = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataFlags {
    std::string data;
    std::string schema;
    std::string weights;
};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
    cmd->add_option("--data", f.data, "CSV data file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--schema", f.schema, "schema sidecar JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--weights", f.weights, "ranking weights JSON (default: all 1)")->check(CLI::ExistingFile);
}

struct IfaceFlags {
    std::size_t k = 1;
    std::string query_kind = "in-allowed";
    std::string tie = "by-id";
    bool no_insertion = false;
    std::optional<std::size_t> rate_limit;
    std::optional<std::size_t> insertion_delay;
};

void add_iface_flags(CLI::App* cmd, IfaceFlags& f) {
    cmd->add_option("--k", f.k, "answers per query")->check(CLI::PositiveNumber);
    cmd->add_option("--query-kind", f.query_kind, "point-only | in-allowed");
    cmd->add_option("--tie", f.tie, "by-id | inserted-first | inserted-last");
    cmd->add_flag("--no-insertion", f.no_insertion, "forbid tuple insertion");
    cmd->add_option("--rate-limit", f.rate_limit, "requests allowed per client");
    cmd->add_option("--insertion-delay", f.insertion_delay, "requests before an insert becomes visible");
}

InterfaceConfig to_config(const IfaceFlags& f) {
    InterfaceConfig cfg;
    cfg.k = f.k;
    auto kind = parse_query_kind(f.query_kind);
    if (!kind) throw UsageError("unknown query kind " + f.query_kind);
    cfg.query_kind = *kind;
    auto tie = parse_tie_policy(f.tie);
    if (!tie) throw UsageError("unknown tie policy " + f.tie);
    cfg.tie = *tie;
    cfg.insertion_allowed = !f.no_insertion;
    cfg.rate_limit = f.rate_limit;
    cfg.insertion_delay = f.insertion_delay;
    return cfg;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw UsageError("invalid JSON in " + path);
    return j;
}

struct Loaded {
    Database db;
    RankingWeights weights;
};

Loaded load(const DataFlags& f) {
    Database db = load_csv(f.data, f.schema);
    RankingWeights w = f.weights.empty() ? RankingWeights::uniform(db.schema())
                                         : weights_from_json(read_json(f.weights), db.schema());
    spdlog::info("loaded {} tuples over {} attributes", db.size(), db.schema().arity());
    return Loaded{std::move(db), std::move(w)};
}

std::size_t target_index(const Schema& schema, const std::string& name) {
    auto idx = schema.find(name);
    if (!idx || schema.is_public(*idx)) throw UsageError("target " + name + " is not a private attribute");
    return *idx - schema.public_count();
}

void write_json(const json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path);
    out << j.dump(2) << '\n';
}

std::string label(const Schema& schema, std::size_t attr, std::optional<Value> v) {
    if (!v || *v == kNull) return "null";
    return schema.attribute(attr).domain.at(static_cast<std::size_t>(*v));
}

int cmd_gen(const std::string& kind, std::size_t n, std::size_t m, std::size_t mp, std::size_t avg, double z,
            std::uint64_t seed, const std::string& out, const std::string& schema_out) {
    Database db = [&] {
        if (kind == "uniform-bool") return gen_uniform_bool(n, m, mp, seed);
        if (kind == "zipf") return gen_zipf(n, m, mp, avg, z, seed);
        throw UsageError("unknown generator kind " + kind);
    }();
    write_csv(db, std::filesystem::path(out));
    write_schema(db.schema(), schema_out);
    std::cout << "wrote " << db.size() << " tuples to " << out << '\n';
    return kOk;
}

struct AttackFlags {
    DataFlags data;
    IfaceFlags iface;
    TupleId victim = 0;
    std::string algo = "qi-point";
    std::string target = "B1";
    std::optional<std::size_t> budget;
    std::optional<std::size_t> max_rounds;
    bool infer_all = false;
    std::string server;
    std::uint64_t seed = 0;
    std::string out;
    bool no_trace = false;
};

int cmd_attack(const AttackFlags& f) {
    auto algo = parse_algorithm(f.algo);
    if (!algo) throw UsageError("unknown algorithm " + f.algo);
    Loaded l = load(f.data);
    const VictimKnowledge vk = victim_knowledge(l.db, f.victim);
    AttackOptions opts;
    opts.target = target_index(l.db.schema(), f.target);
    opts.infer_all = f.infer_all;
    opts.max_rounds = f.max_rounds;
    const auto truth_schema = l.db.schema_ptr();

    AttackOutcome outcome;
    if (!f.server.empty()) {
        const auto [host, port] = parse_endpoint(f.server);
        spdlog::info("attacking {}:{} with {}", host, port, f.algo);
        RemoteSession session(host, port, f.budget);
        if (!(session.schema() == l.db.schema())) throw UsageError("server schema differs from --schema");
        outcome = run_attack(*algo, session, vk, opts, f.seed);
    } else {
        InterfaceConfig cfg = to_config(f.iface);
        QueryEngine engine(std::move(l.db), std::make_shared<LinearRanking>(l.weights), cfg);
        EngineSession session(engine, f.budget);
        outcome = run_attack(*algo, session, vk, opts, f.seed);
    }
    const Schema& schema = *truth_schema;
    write_json(outcome_to_json(outcome, schema, !f.no_trace), f.out);
    const std::size_t attr = schema.private_index(opts.target);
    std::cout << "status: " << status_name(outcome.status) << '\n'
              << schema.attribute(attr).name << " = " << label(schema, attr, outcome.value) << '\n'
              << "queries: " << outcome.queries_used << "  inserts: " << outcome.inserts_used << '\n';
    if (!outcome.note.empty()) std::cout << "note: " << outcome.note << '\n';
    switch (outcome.status) {
        case AttackStatus::Inferred:
        case AttackStatus::InferredAll: return kOk;
        case AttackStatus::Undetermined: return kUndetermined;
        case AttackStatus::BudgetExhausted: return kBudget;
    }
    return kInternal;
}

int cmd_serve(const DataFlags& df, const IfaceFlags& iff, const std::string& host, std::uint16_t port,
              const std::string& port_file) {
    Loaded l = load(df);
    auto engine = std::make_shared<QueryEngine>(std::move(l.db), std::make_shared<LinearRanking>(l.weights),
                                                to_config(iff));
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    Server server(engine, EndpointConfig{host, port});
    std::cout << "listening on " << host << ':' << server.port() << std::endl;
    if (!port_file.empty()) std::ofstream(port_file) << server.port() << '\n';
    int sig = 0;
    sigwait(&set, &sig);
    spdlog::info("signal {}, shutting down", sig);
    server.stop();
    return kOk;
}

int cmd_sweep(const std::string& config_path, std::optional<std::size_t> jobs, const std::string& out) {
    ExperimentConfig cfg = config_from_json(read_json(config_path));
    if (jobs) cfg.jobs = *jobs;
    if (!out.empty()) cfg.output = out;
    if (cfg.output.empty()) throw UsageError("no output path (set \"output\" or --out)");
    spdlog::info("sweep over {} with {} trials per point", sweep_param_name(cfg.param), cfg.trials);
    SweepResult result = run_sweep(cfg);
    {
        std::ofstream csv(cfg.output + ".csv");
        if (!csv) throw UsageError("cannot write " + cfg.output + ".csv");
        write_sweep_csv(result, csv);
    }
    write_json(sweep_manifest(cfg, result), cfg.output + ".json");
    write_sweep_csv(result, std::cout);
    return kOk;
}

int cmd_estimate(const DataFlags& df, TupleId victim) {
    Loaded l = load(df);
    const InstanceStats s = instance_stats(l.db, victim, l.weights);
    json j{{"victim", victim},
           {"findq_success_prob", findq_success_prob(s)},
           {"qi_point_expected_cost", qi_point_expected_cost(s)},
           {"q_point_quick_finish_prob", q_point_quick_finish_prob(s)},
           {"qi_in_expected_cost", qi_in_expected_cost(s)},
           {"qi_in_expected_cost_literal_ch", qi_in_expected_cost(s, ChReading::Literal)}};
    std::vector<std::size_t> pub(l.db.schema().public_count()), priv;
    for (std::size_t i = 0; i < pub.size(); ++i) pub[i] = i;
    for (std::size_t j2 = 1; j2 < l.db.schema().private_count(); ++j2) priv.push_back(j2);
    j["q_in_quick_finish_prob_all_points"] = q_in_quick_finish_prob(s, pub, priv);
    std::cout << j.dump(2) << '\n';
    return kOk;
}

int cmd_oracle(const DataFlags& df, const IfaceFlags& iff, TupleId victim, std::uint64_t bound) {
    Loaded l = load(df);
    const InterfaceConfig cfg = to_config(iff);
    LinearRanking ranking(l.weights);
    const FeasibleSet fs = feasible_values(l.db, victim, ranking, cfg, bound);
    const Schema& schema = l.db.schema();
    json attrs = json::object();
    for (std::size_t j = 0; j < schema.private_count(); ++j) {
        const std::size_t attr = schema.private_index(j);
        json vals = json::array();
        for (Value v : fs.values[j]) vals.push_back(schema.attribute(attr).domain[static_cast<std::size_t>(v)]);
        attrs[schema.attribute(attr).name] = {{"feasible", vals}, {"full_domain", fs.full_domain(schema, j)}};
    }
    std::cout << json{{"victim", victim}, {"queries_checked", fs.queries_checked}, {"attributes", attrs}}.dump(2)
              << '\n';
    return kOk;
}

int cmd_scenario(const std::string& which, std::uint64_t seed, const std::string& zip, double margin) {
    ScenarioReport r;
    if (which == "boolean-preference") {
        r = scenario_boolean_preference(seed);
    } else if (which == "zipcode") {
        r = scenario_zipcode_bisection(make_grid_zip_table(10, 10), zip, margin, seed);
    } else {
        throw UsageError("unknown scenario " + which);
    }
    json j{{"name", r.name},         {"cases", r.cases},         {"decided", r.decided},
           {"correct", r.correct},   {"wrong", r.wrong},         {"undecided", r.undecided},
           {"requests", r.requests}, {"success", r.success},     {"details", r.details}};
    if (r.identified) j["identified"] = *r.identified;
    std::cout << j.dump(2) << '\n';
    return r.success ? kOk : kUndetermined;
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("rankleak");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("RANKLEAK_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Rank-based inference of private attributes through top-k search interfaces"};
    app.require_subcommand(1);

    std::string gen_kind = "uniform-bool", gen_out, gen_schema;
    std::size_t gen_n = 200, gen_m = 6, gen_mp = 4, gen_avg = 4;
    double gen_z = 2.0;
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    gen->add_option("--kind", gen_kind, "uniform-bool | zipf");
    gen->add_option("--n", gen_n)->check(CLI::PositiveNumber);
    gen->add_option("--m", gen_m)->check(CLI::PositiveNumber);
    gen->add_option("--mprime", gen_mp)->check(CLI::PositiveNumber);
    gen->add_option("--avg-domain", gen_avg);
    gen->add_option("--z", gen_z);
    gen->add_option("--seed", gen_seed)->required();
    gen->add_option("--out", gen_out, "CSV path")->required();
    gen->add_option("--schema-out", gen_schema, "schema JSON path")->required();

    AttackFlags af;
    auto* attack = app.add_subcommand("attack", "infer a victim's private attribute");
    add_data_flags(attack, af.data);
    add_iface_flags(attack, af.iface);
    attack->add_option("--victim", af.victim)->required();
    attack->add_option("--algo", af.algo, "qi-point | q-point | qi-in | q-in");
    attack->add_option("--target", af.target, "private attribute name");
    attack->add_option("--budget", af.budget, "client-side request cap");
    attack->add_option("--max-rounds", af.max_rounds, "stop after this many walk rounds");
    attack->add_flag("--infer-all", af.infer_all, "settle every private attribute");
    attack->add_option("--server", af.server, "host:port of a served instance");
    attack->add_option("--seed", af.seed)->required();
    attack->add_option("--out", af.out, "outcome JSON path (default stdout)");
    attack->add_flag("--no-trace", af.no_trace, "omit the request trace from the JSON");

    DataFlags sdf;
    IfaceFlags sif;
    std::string host = "127.0.0.1", port_file;
    std::uint16_t port = 0;
    auto* serve = app.add_subcommand("serve", "serve the search interface over TCP");
    add_data_flags(serve, sdf);
    add_iface_flags(serve, sif);
    serve->add_option("--host", host);
    serve->add_option("--port", port, "0 picks a free port");
    serve->add_option("--port-file", port_file, "write the bound port here");

    std::string sweep_cfg, sweep_out;
    std::optional<std::size_t> sweep_jobs;
    auto* sweep = app.add_subcommand("sweep", "run an experiment sweep");
    sweep->add_option("--config", sweep_cfg)->required()->check(CLI::ExistingFile);
    sweep->add_option("--jobs", sweep_jobs)->check(CLI::PositiveNumber);
    sweep->add_option("--out", sweep_out, "output prefix (.csv and .json are appended)");

    DataFlags edf;
    TupleId est_victim = 0;
    auto* estimate = app.add_subcommand("estimate", "closed-form cost and success estimates");
    add_data_flags(estimate, edf);
    estimate->add_option("--victim", est_victim)->required();

    DataFlags odf;
    IfaceFlags oif;
    TupleId or_victim = 0;
    std::uint64_t bound = 1'000'000;
    auto* oracle = app.add_subcommand("oracle-check", "exhaustive query-only feasibility");
    add_data_flags(oracle, odf);
    add_iface_flags(oracle, oif);
    oracle->add_option("--victim", or_victim)->required();
    oracle->add_option("--bound", bound, "maximum expressible queries");

    std::string which, zip = "Z042";
    double margin = 0;
    std::uint64_t sc_seed = 0;
    auto* scenario = app.add_subcommand("scenario", "run a simulated site scenario");
    scenario->add_option("name", which, "boolean-preference | zipcode")->required();
    scenario->add_option("--seed", sc_seed)->required();
    scenario->add_option("--zip", zip, "victim zip for the zipcode scenario");
    scenario->add_option("--margin", margin);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*gen) return cmd_gen(gen_kind, gen_n, gen_m, gen_mp, gen_avg, gen_z, gen_seed, gen_out, gen_schema);
        if (*attack) return cmd_attack(af);
        if (*serve) return cmd_serve(sdf, sif, host, port, port_file);
        if (*sweep) return cmd_sweep(sweep_cfg, sweep_jobs, sweep_out);
        if (*estimate) return cmd_estimate(edf, est_victim);
        if (*oracle) return cmd_oracle(odf, oif, or_victim, bound);
        if (*scenario) return cmd_scenario(which, sc_seed, zip, margin);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << errc_name(e.code()) << ": " << e.what() << '\n';
        switch (e.code()) {
            case Errc::RateLimited: return kBudget;
            case Errc::Io:
            case Errc::InvalidArgument:
            case Errc::UnknownValue:
            case Errc::NullNotAllowed:
            case Errc::RaggedRow:
            case Errc::SchemaMismatch:
            case Errc::UnknownTuple:
            case Errc::SpaceTooLarge:
            case Errc::ImpossibleCardinality:
            case Errc::UnsupportedPredicate:
            case Errc::InsertionForbidden:
            case Errc::BadRequest:
            case Errc::EmptyDomain:
            case Errc::DuplicateAttributeName:
            case Errc::NoPublicAttribute:
            case Errc::NoPrivateAttribute: return kUsage;
            default: return kInternal;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInternal;
    }
    return kUsage;
}
