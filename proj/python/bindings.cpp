#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rankleak/adversary.hpp"
#include "rankleak/analysis.hpp"
#include "rankleak/csv_io.hpp"
#include "rankleak/datagen.hpp"
#include "rankleak/oracle.hpp"
#include "rankleak/scenarios.hpp"

namespace py = pybind11;
using namespace rankleak;

namespace {

/// A database plus a linear ranking, the unit the Python side works with.
struct Instance {
    std::shared_ptr<Database> db;
    RankingWeights weights;
};

Instance make_instance(Database db, std::optional<std::vector<double>> pub, std::optional<std::vector<double>> priv) {
    RankingWeights w = RankingWeights::uniform(db.schema());
    if (pub) w.public_weights = *pub;
    if (priv) w.private_weights = *priv;
    w.check(db.schema());
    return Instance{std::make_shared<Database>(std::move(db)), std::move(w)};
}

InterfaceConfig make_config(std::size_t k, const std::string& query_kind, bool insertion, const std::string& tie) {
    InterfaceConfig cfg;
    cfg.k = k;
    auto kind = parse_query_kind(query_kind);
    auto t = parse_tie_policy(tie);
    if (!kind || !t) throw Error(Errc::InvalidArgument, "unknown query kind or tie policy");
    cfg.query_kind = *kind;
    cfg.tie = *t;
    cfg.insertion_allowed = insertion;
    cfg.check();
    return cfg;
}

std::string attack(const Instance& inst, TupleId victim, const std::string& algo, std::size_t target, std::size_t k,
                   const std::string& query_kind, const std::string& tie, bool infer_all,
                   std::optional<std::size_t> budget, std::uint64_t seed) {
    auto a = parse_algorithm(algo);
    if (!a) throw Error(Errc::InvalidArgument, "unknown algorithm " + algo);
    const VictimKnowledge vk = victim_knowledge(*inst.db, victim);
    QueryEngine engine(*inst.db, std::make_shared<LinearRanking>(inst.weights),
                       make_config(k, query_kind, uses_insertion(*a), tie));
    EngineSession session(engine, budget);
    AttackOptions opts;
    opts.target = target;
    opts.infer_all = infer_all;
    return outcome_to_json(run_attack(*a, session, vk, opts, seed), inst.db->schema(), false).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Rank-based private attribute inference over simulated top-k interfaces";

    py::register_exception<Error>(m, "RankleakError", PyExc_RuntimeError);

    py::class_<Instance>(m, "Instance")
        .def_property_readonly("size", [](const Instance& i) { return i.db->size(); })
        .def_property_readonly("public_count", [](const Instance& i) { return i.db->schema().public_count(); })
        .def_property_readonly("private_count", [](const Instance& i) { return i.db->schema().private_count(); })
        .def("tuple_values", [](const Instance& i, TupleId id) { return i.db->at(id).values; })
        .def("ids", [](const Instance& i) {
            std::vector<TupleId> ids;
            for (const auto& t : i.db->tuples()) ids.push_back(t.id);
            return ids;
        });

    m.def(
        "uniform_bool",
        [](std::size_t n, std::size_t mm, std::size_t mp, std::uint64_t seed) {
            return make_instance(gen_uniform_bool(n, mm, mp, seed), std::nullopt, std::nullopt);
        },
        py::arg("n"), py::arg("m"), py::arg("m_prime"), py::arg("seed"));
    m.def(
        "zipf",
        [](std::size_t n, std::size_t mm, std::size_t mp, std::size_t avg, double z, std::uint64_t seed) {
            return make_instance(gen_zipf(n, mm, mp, avg, z, seed), std::nullopt, std::nullopt);
        },
        py::arg("n"), py::arg("m"), py::arg("m_prime"), py::arg("avg_domain"), py::arg("z"), py::arg("seed"));
    m.def(
        "load_csv",
        [](const std::string& data, const std::string& schema) {
            return make_instance(load_csv(data, schema), std::nullopt, std::nullopt);
        },
        py::arg("data"), py::arg("schema"));
    m.def(
        "with_weights",
        [](const Instance& i, std::vector<double> pub, std::vector<double> priv) {
            return make_instance(*i.db, std::move(pub), std::move(priv));
        },
        py::arg("instance"), py::arg("public_weights"), py::arg("private_weights"));

    m.def("attack_json", &attack, py::arg("instance"), py::arg("victim"), py::arg("algorithm") = "qi-point",
          py::arg("target") = 0, py::arg("k") = 1, py::arg("query_kind") = "in-allowed", py::arg("tie") = "by-id",
          py::arg("infer_all") = false, py::arg("budget") = std::nullopt, py::arg("seed") = 0,
          py::call_guard<py::gil_scoped_release>());

    m.def(
        "feasible_values",
        [](const Instance& i, TupleId victim, std::size_t k, const std::string& query_kind, const std::string& tie,
           std::uint64_t bound) {
            LinearRanking ranking(i.weights);
            return feasible_values(*i.db, victim, ranking, make_config(k, query_kind, false, tie), bound).values;
        },
        py::arg("instance"), py::arg("victim"), py::arg("k") = 1, py::arg("query_kind") = "point-only",
        py::arg("tie") = "by-id", py::arg("bound") = 1'000'000);

    m.def(
        "estimates",
        [](const Instance& i, TupleId victim) {
            const InstanceStats s = instance_stats(*i.db, victim, i.weights);
            py::dict d;
            d["findq_success_prob"] = findq_success_prob(s);
            d["qi_point_expected_cost"] = qi_point_expected_cost(s);
            d["q_point_quick_finish_prob"] = q_point_quick_finish_prob(s);
            d["qi_in_expected_cost"] = qi_in_expected_cost(s);
            return d;
        },
        py::arg("instance"), py::arg("victim"));

    m.def("erf", &rankleak::erf, py::arg("x"));

    m.def(
        "scenario_boolean_preference",
        [](std::uint64_t seed) {
            const ScenarioReport r = scenario_boolean_preference(seed);
            return py::make_tuple(r.success, r.correct, r.wrong, r.undecided);
        },
        py::arg("seed"));
    m.def(
        "scenario_zipcode",
        [](const std::string& zip, double margin, std::uint64_t seed) {
            const ScenarioReport r = scenario_zipcode_bisection(make_grid_zip_table(10, 10), zip, margin, seed);
            return py::make_tuple(r.success, r.identified.value_or(""), r.requests);
        },
        py::arg("zip"), py::arg("margin") = 0.0, py::arg("seed") = 0);
}
