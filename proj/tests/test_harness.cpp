#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "rankleak/csv_io.hpp"
#include "rankleak/datagen.hpp"
#include "rankleak/scenarios.hpp"
#include "rankleak/sweep.hpp"
#include "support.hpp"

using namespace rankleak;

namespace {

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return Errc::Io;
}

std::string csv_of(const Database& db) {
    std::ostringstream out;
    write_csv(db, out);
    return out.str();
}

std::shared_ptr<const Schema> nullable_schema() {
    return std::make_shared<const Schema>(build_schema({{"pref", Visibility::Private, {"yes", "no"}, true},
                                                        {"city", Visibility::Public, {"a,b", "c\"d", "e"}, false}}));
}

}  // namespace

TEST(Generators, DeterministicPerSeed) {
    EXPECT_EQ(csv_of(gen_uniform_bool(100, 5, 3, 9)), csv_of(gen_uniform_bool(100, 5, 3, 9)));
    EXPECT_NE(csv_of(gen_uniform_bool(100, 5, 3, 9)), csv_of(gen_uniform_bool(100, 5, 3, 10)));
    EXPECT_EQ(csv_of(gen_zipf(100, 4, 2, 5, 1.5, 3)), csv_of(gen_zipf(100, 4, 2, 5, 1.5, 3)));
}

TEST(Generators, CardinalityAndArguments) {
    EXPECT_EQ(gen_uniform_bool(8, 2, 1, 1).size(), 8u);
    EXPECT_EQ(code_of([] { gen_uniform_bool(9, 2, 1, 1); }), Errc::ImpossibleCardinality);
    EXPECT_EQ(code_of([] { gen_zipf(10, 2, 1, 1, 1.0, 1); }), Errc::InvalidArgument);
    EXPECT_EQ(code_of([] { gen_zipf(10, 2, 1, 4, 0.0, 1); }), Errc::InvalidArgument);
}

TEST(Generators, UniformFrequencies) {
    Database db = gen_uniform_bool(2000, 8, 4, 5);
    for (std::size_t i = 0; i < db.schema().arity(); ++i) {
        double ones = 0;
        for (const auto& t : db.tuples()) ones += t.values[i];
        // Binomial(2000, 1/2): sd about 22; 5 sd band.
        EXPECT_NEAR(ones, 1000, 112) << i;
    }
}

TEST(Generators, ZipfSlope) {
    Database db = gen_zipf(4000, 16, 4, 8, 2.0, 11);
    const Schema& s = db.schema();
    for (std::size_t i = 0; i < s.arity(); ++i) EXPECT_GE(s.domain_size(i), 4u);
    std::vector<double> counts(s.domain_size(0), 0);
    for (const auto& t : db.tuples()) counts[static_cast<std::size_t>(t.values[0])] += 1;
    // Wide schema keeps duplicate rejection rare. Least-squares slope of log count against log rank over the first three ranks.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t r = 0; r < 3; ++r) {
        const double x = std::log(static_cast<double>(r + 1));
        const double y = std::log(counts[r]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
    EXPECT_NEAR(slope, -2.0, 0.3);
}

TEST(Csv, RoundTripPreservesDeclaredOrder) {
    auto schema = nullable_schema();
    Database db(schema);
    db.insert({0, 1});
    db.insert({2, kNull});
    db.insert({1, 0});
    const std::string text = csv_of(db);
    EXPECT_EQ(text.substr(0, text.find('\n')), "pref,city");
    std::istringstream in(text);
    Database back = read_csv(in, schema);
    ASSERT_EQ(back.size(), 3u);
    for (TupleId id = 0; id < 3; ++id) EXPECT_EQ(back.at(id).values, db.at(id).values);
}

TEST(Csv, Errors) {
    auto schema = nullable_schema();
    auto parse = [&](std::string text) {
        std::istringstream in(text);
        return read_csv(in, schema);
    };
    EXPECT_EQ(code_of([&] { parse("city,pref\nzzz,yes\n"); }), Errc::UnknownValue);
    EXPECT_EQ(code_of([&] { parse("city,pref\n,yes\n"); }), Errc::NullNotAllowed);
    EXPECT_EQ(code_of([&] { parse("city,pref\ne\n"); }), Errc::RaggedRow);
    EXPECT_EQ(code_of([&] { parse("city,age\ne,1\n"); }), Errc::SchemaMismatch);
    EXPECT_EQ(code_of([&] { parse("city\ne\n"); }), Errc::SchemaMismatch);
    EXPECT_EQ(code_of([&] { parse(""); }), Errc::Io);
    EXPECT_EQ(code_of([&] { parse("city,pref\ne,yes\ne,yes\n"); }), Errc::DuplicateTuple);
    EXPECT_EQ(parse("city,pref\ne,\n").at(0).values[1], kNull);
    EXPECT_EQ(code_of([] { load_csv("/nonexistent.csv", "/nonexistent.json"); }), Errc::Io);
}

TEST(Csv, SchemaAndWeightsFiles) {
    const auto dir = std::filesystem::temp_directory_path() / "rankleak_csv_test";
    std::filesystem::create_directories(dir);
    Database db = gen_zipf(50, 3, 2, 4, 1.0, 2);
    write_schema(db.schema(), dir / "s.json");
    write_csv(db, dir / "d.csv");
    Database back = load_csv(dir / "d.csv", dir / "s.json");
    EXPECT_EQ(back.schema(), db.schema());
    EXPECT_EQ(csv_of(back), csv_of(db));
    RankingWeights w = RankingWeights::random(db.schema(), 4);
    const RankingWeights w2 = weights_from_json(weights_to_json(w, db.schema()), db.schema());
    EXPECT_EQ(w2.flattened(), w.flattened());
    const RankingWeights partial = weights_from_json(json{{"private", {{"B1", 3.0}}}}, db.schema());
    EXPECT_DOUBLE_EQ(partial.private_weights[0], 3.0);
    EXPECT_DOUBLE_EQ(partial.public_weights[0], 1.0);
    EXPECT_THROW(weights_from_json(json{{"public", {{"B1", 3.0}}}}, db.schema()), Error);
    std::filesystem::remove_all(dir);
}

TEST(Sweep, DeterministicAcrossJobCounts) {
    ExperimentConfig cfg;
    cfg.n = 80;
    cfg.m = 4;
    cfg.m_prime = 3;
    cfg.trials = 12;
    cfg.algorithms = {Algorithm::QIPoint, Algorithm::QPoint, Algorithm::QIIn};
    cfg.param = SweepParam::K;
    cfg.values = {1, 3};
    cfg.jobs = 1;
    const SweepResult a = run_sweep(cfg);
    cfg.jobs = 4;
    const SweepResult b = run_sweep(cfg);
    ASSERT_EQ(a.trials.size(), 2u * 3u * 12u);
    ASSERT_EQ(a.trials.size(), b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        EXPECT_EQ(a.trials[i].seed, b.trials[i].seed);
        EXPECT_EQ(a.trials[i].victim, b.trials[i].victim);
        EXPECT_EQ(a.trials[i].status, b.trials[i].status);
        EXPECT_EQ(a.trials[i].cost(), b.trials[i].cost());
    }
    std::ostringstream ca, cb;
    write_sweep_csv(a, ca);
    write_sweep_csv(b, cb);
    EXPECT_EQ(ca.str(), cb.str());
    ASSERT_EQ(a.points.size(), 6u);
    for (const auto& p : a.points) {
        EXPECT_EQ(p.wrong, 0u);
        EXPECT_EQ(p.trials, 12u);
        if (p.algorithm != Algorithm::QPoint) {
            EXPECT_EQ(p.successes, 12u);
        }
    }
    const json manifest = sweep_manifest(cfg, a);
    EXPECT_TRUE(manifest.contains("config"));
}

TEST(Sweep, ConfigJsonRoundTrip) {
    ExperimentConfig cfg;
    cfg.generator.kind = GeneratorKind::Zipf;
    cfg.generator.z = 1.25;
    cfg.iface.k = 4;
    cfg.iface.tie = TieBreakPolicy::InsertedLast;
    cfg.iface.query_kind = QueryKind::PointOnly;
    cfg.algorithms = {Algorithm::QPoint};
    cfg.param = SweepParam::W1;
    cfg.values = {0.5, 1, 2};
    cfg.w1 = 0.5;
    cfg.seed = 99;
    const json j = config_to_json(cfg);
    const ExperimentConfig back = config_from_json(j);
    EXPECT_EQ(config_to_json(back), j);
    EXPECT_EQ(back.iface.k, 4u);
    EXPECT_EQ(back.param, SweepParam::W1);
    EXPECT_THROW(config_from_json(json{{"algorithms", {"nope"}}}), Error);
    EXPECT_THROW(config_from_json(json{{"sweep", {{"param", "k"}, {"values", json::array()}}}}), Error);
    for (auto p : {SweepParam::K, SweepParam::N, SweepParam::M, SweepParam::MPrime, SweepParam::W1,
                   SweepParam::TargetDomain}) {
        EXPECT_EQ(*parse_sweep_param(sweep_param_name(p)), p);
    }
}

TEST(Scenarios, BooleanPreference) {
    const ScenarioReport r = scenario_boolean_preference(3, 3);
    EXPECT_TRUE(r.success);
    EXPECT_EQ(r.wrong, 0u);
    EXPECT_GT(r.decided, 0u);
    EXPECT_EQ(r.decided + r.undecided, r.cases);
}

TEST(Scenarios, PreferenceRankingShape) {
    auto schema = preference_schema();
    EXPECT_EQ(schema->public_count(), 2u);
    EXPECT_EQ(schema->private_count(), 1u);
}

TEST(Scenarios, ZipcodeRecoversExactCode) {
    const ZipTable table = make_grid_zip_table(10, 10);
    ASSERT_EQ(table.codes.size(), 100u);
    EXPECT_EQ(table.codes.front(), "Z000");
    EXPECT_EQ(table.codes.back(), "Z099");
    for (const char* zip : {"Z000", "Z045", "Z099", "Z017"}) {
        const ScenarioReport r = scenario_zipcode_bisection(table, zip, 0.0, 5);
        ASSERT_TRUE(r.identified);
        EXPECT_EQ(*r.identified, zip);
        EXPECT_TRUE(r.success);
    }
    EXPECT_EQ(code_of([&] { scenario_zipcode_bisection(table, "Z999", 0.0, 1); }), Errc::UnknownValue);
}

TEST(Scenarios, ZipDistance) {
    ZipDistanceRanking r({{0, 0}, {3, 4}});
    EXPECT_DOUBLE_EQ(r.distance(0, 1), 5.0);
    EXPECT_DOUBLE_EQ(r.distance(1, 1), 0.0);
}
