#include <gtest/gtest.h>

#include <random>
#include <set>

#include "rankleak/adversary.hpp"
#include "rankleak/datagen.hpp"
#include "rankleak/oracle.hpp"
#include "support.hpp"

using namespace rankleak;

namespace {

RankedAnswer ans(std::vector<TupleId> ids) {
    RankedAnswer a;
    a.k = ids.size();
    for (TupleId id : ids) a.entries.push_back(AnswerEntry{id, {}});
    return a;
}

struct Fixture {
    Database db;
    std::shared_ptr<const RankingFunction> ranking;
    InterfaceConfig cfg;
};

Fixture uniform_fixture(std::uint64_t seed, std::size_t n = 200, std::size_t m = 6, std::size_t mp = 4) {
    Database db = gen_uniform_bool(n, m, mp, seed);
    auto ranking = fixtures::unit_ranking(db.schema());
    return Fixture{std::move(db), ranking, InterfaceConfig{}};
}

Value truth(const Database& db, TupleId victim, std::size_t j) {
    return db.at(victim).values[db.schema().private_index(j)];
}

}  // namespace

TEST(Differential, OvertakenAndRankWorsened) {
    EXPECT_TRUE(differential_evidence(ans({1, 2}), ans({3, 1}), 1));
    EXPECT_TRUE(differential_evidence(ans({1}), ans({2}), 1));
    EXPECT_FALSE(differential_evidence(ans({2}), ans({3}), 1));
    EXPECT_TRUE(differential_evidence(ans({2, 1, 3}), ans({2, 3, 1}), 1, DifferentialCriterion::RankWorsened));
    EXPECT_TRUE(differential_evidence(ans({2, 1, 3}), ans({2, 3, 1}), 1, DifferentialCriterion::Overtaken));
    EXPECT_FALSE(differential_evidence(ans({2, 1}), ans({1, 2}), 1, DifferentialCriterion::RankWorsened));
    EXPECT_FALSE(differential_evidence(ans({2, 1}), ans({1, 2}), 1, DifferentialCriterion::Overtaken));
    // Same rank, different tuple ahead: only Overtaken sees it.
    EXPECT_TRUE(differential_evidence(ans({2, 1}), ans({3, 1}), 1, DifferentialCriterion::Overtaken));
    EXPECT_FALSE(differential_evidence(ans({2, 1}), ans({3, 1}), 1, DifferentialCriterion::RankWorsened));
}

TEST(FindQ, WithoutReplacementAndExhaustion) {
    auto schema = fixtures::bool_schema(1, 3);
    VictimKnowledge vk{0, {0}};
    QueryHistory history;
    std::mt19937_64 rng(1);
    std::set<std::vector<Value>> seen;
    auto ask = [&](const Query& q) {
        std::vector<Value> privs;
        for (std::size_t i = 1; i < 4; ++i) privs.push_back(*q[i].sole());
        EXPECT_TRUE(seen.insert(privs).second);
        return RankedAnswer{};
    };
    const FindResult r = find_q(ask, *schema, vk, history, rng, [](const RankedAnswer&) { return false; });
    EXPECT_FALSE(r.found());
    EXPECT_EQ(r.draws, 8u);
    EXPECT_EQ(seen.size(), 8u);
    const FindResult again = find_q(ask, *schema, vk, history, rng, [](const RankedAnswer&) { return true; });
    EXPECT_EQ(again.draws, 0u);
}

TEST(FindQ, StopsAtFirstAccepted) {
    Fixture f = uniform_fixture(3, 40, 4, 3);
    QueryEngine engine(f.db, f.ranking, f.cfg);
    EngineSession s(engine);
    const VictimKnowledge vk = victim_knowledge(f.db, 5);
    QueryHistory history;
    std::mt19937_64 rng(9);
    const FindResult r = find_q(s, vk, history, rng);
    ASSERT_TRUE(r.found());
    EXPECT_EQ(r.draws, s.usage().queries_issued);
    EXPECT_TRUE(r.answer->rank_of(5));
}

TEST(QIAttacks, InferTruthAndReplay) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Fixture f = uniform_fixture(seed);
        const TupleId victim = seed * 7 % f.db.size();
        for (Algorithm algo : {Algorithm::QIPoint, Algorithm::QIIn}) {
            QueryEngine engine(f.db, f.ranking, f.cfg);
            EngineSession s(engine);
            const AttackOutcome out = run_attack(algo, s, victim_knowledge(f.db, victim), {}, seed);
            ASSERT_EQ(out.status, AttackStatus::Inferred) << out.note;
            EXPECT_EQ(*out.value, truth(f.db, victim, 0));
            EXPECT_EQ(out.queries_used, s.usage().queries_issued);
            EXPECT_EQ(out.inserts_used, s.usage().tuples_inserted + s.usage().inserts_rejected);
            EXPECT_EQ(out.trace.size(), out.cost());
            for (const auto& ex : out.ledger[0].exclusions) {
                EXPECT_NE(ex.value, truth(f.db, victim, 0));
                EXPECT_TRUE(replay_exclusion(f.db, f.ranking, f.cfg, victim, out, ex));
            }
        }
    }
}

TEST(QIAttacks, InferAllSettlesEveryAttribute) {
    Fixture f = uniform_fixture(42);
    QueryEngine engine(f.db, f.ranking, f.cfg);
    EngineSession s(engine);
    const AttackOutcome out = infer_all(s, victim_knowledge(f.db, 11), Algorithm::QIPoint, 5);
    ASSERT_EQ(out.status, AttackStatus::InferredAll);
    ASSERT_EQ(out.values.size(), 4u);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(out.values[j], truth(f.db, 11, j));
}

TEST(QIAttacks, CategoricalTarget) {
    auto schema = std::make_shared<const Schema>(
        make_categorical_schema(4, 2, std::vector<std::size_t>{2, 3, 2, 4}, std::vector<std::size_t>{5, 3}));
    Database db = gen_uniform(schema, 150, 8);
    auto ranking = std::make_shared<LinearRanking>(RankingWeights::random(*schema, 2));
    for (TupleId victim : {0u, 17u, 99u}) {
        for (Algorithm algo : {Algorithm::QIPoint, Algorithm::QIIn}) {
            QueryEngine engine(db, ranking, {});
            EngineSession s(engine);
            AttackOptions opts;
            opts.target = 1;
            const AttackOutcome out = run_attack(algo, s, victim_knowledge(db, victim), opts, 3);
            ASSERT_TRUE(out.status == AttackStatus::Inferred || out.status == AttackStatus::InferredAll)
                << algorithm_name(algo) << " " << out.note;
            EXPECT_EQ(*out.value, truth(db, victim, 1));
        }
    }
}

TEST(QIAttacks, BudgetAndRateLimit) {
    Fixture f = uniform_fixture(1);
    {
        QueryEngine engine(f.db, f.ranking, f.cfg);
        EngineSession s(engine, 1);
        const AttackOutcome out = qi_point(s, victim_knowledge(f.db, 0), {}, 1);
        EXPECT_EQ(out.status, AttackStatus::BudgetExhausted);
        EXPECT_EQ(out.cost(), 1u);
    }
    {
        InterfaceConfig cfg;
        cfg.rate_limit = 3;
        QueryEngine engine(f.db, f.ranking, cfg);
        EngineSession s(engine);
        const AttackOutcome out = qi_point(s, victim_knowledge(f.db, 0), {}, 1);
        EXPECT_EQ(out.status, AttackStatus::BudgetExhausted);
        EXPECT_LE(out.cost(), 4u);
    }
}

TEST(QIAttacks, MaxRoundsStopsEarlyWithVerifiedExclusions) {
    Fixture f = uniform_fixture(7, 200, 6, 4);
    QueryEngine engine(f.db, f.ranking, f.cfg);
    EngineSession s(engine);
    AttackOptions opts;
    opts.infer_all = true;
    opts.max_rounds = 1;
    const AttackOutcome out = qi_point(s, victim_knowledge(f.db, 3), opts, 2);
    EXPECT_EQ(out.status, AttackStatus::BudgetExhausted);
    EXPECT_EQ(out.walk_rounds, 1u);
    EXPECT_GE(out.exclusion_count(), 1u);
}

TEST(QIAttacks, InsertionForbiddenAndPointOnly) {
    Fixture f = uniform_fixture(2);
    InterfaceConfig cfg;
    cfg.insertion_allowed = false;
    QueryEngine engine(f.db, f.ranking, cfg);
    EngineSession s(engine);
    EXPECT_THROW(qi_point(s, victim_knowledge(f.db, 0), {}, 1), Error);
    InterfaceConfig point;
    point.query_kind = QueryKind::PointOnly;
    QueryEngine engine2(f.db, f.ranking, point);
    EngineSession s2(engine2);
    EXPECT_THROW(qi_in(s2, victim_knowledge(f.db, 0), {}, 1), Error);
    EngineSession s3(engine2);
    EXPECT_THROW(q_in(s3, victim_knowledge(f.db, 0), {}, 1), Error);
}

TEST(QOnlyAttacks, SoundAgainstOracle) {
    std::mt19937_64 rng(77);
    std::size_t inferred = 0;
    for (int inst = 0; inst < 40; ++inst) {
        const std::size_t m = 1 + rng() % 3;
        const std::size_t mp = 1 + rng() % 2;
        const std::size_t n = 2 + rng() % std::min<std::size_t>(15, (std::size_t{1} << (m + mp)) - 1);
        Database db = gen_uniform_bool(n, m, mp, rng());
        auto ranking = fixtures::unit_ranking(db.schema());
        InterfaceConfig cfg;
        cfg.insertion_allowed = false;
        const TupleId victim = rng() % n;
        for (QueryKind kind : {QueryKind::PointOnly, QueryKind::InAllowed}) {
            cfg.query_kind = kind;
            const FeasibleSet fs = feasible_values(db, victim, *ranking, cfg);
            QueryEngine engine(db, ranking, cfg);
            EngineSession s(engine);
            const Algorithm algo = kind == QueryKind::PointOnly ? Algorithm::QPoint : Algorithm::QIn;
            const AttackOutcome out = run_attack(algo, s, victim_knowledge(db, victim), {}, inst);
            EXPECT_EQ(out.inserts_used, 0u);
            if (out.status == AttackStatus::Inferred) {
                ++inferred;
                EXPECT_EQ(*out.value, truth(db, victim, 0));
                EXPECT_TRUE(fs.singleton(0));
            }
            for (const auto& ex : out.ledger[0].exclusions) {
                EXPECT_NE(ex.value, truth(db, victim, 0));
                EXPECT_EQ(std::count(fs.values[0].begin(), fs.values[0].end(), ex.value), 0);
            }
        }
    }
    EXPECT_GT(inferred, 0u);
}

TEST(QOnlyAttacks, UniformInstancesNeverWrong) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Fixture f = uniform_fixture(seed);
        f.cfg.insertion_allowed = false;
        for (Algorithm algo : {Algorithm::QPoint, Algorithm::QIn}) {
            QueryEngine engine(f.db, f.ranking, f.cfg);
            EngineSession s(engine);
            const AttackOutcome out = run_attack(algo, s, victim_knowledge(f.db, seed), {}, seed);
            if (out.value) EXPECT_EQ(*out.value, truth(f.db, seed, 0));
        }
    }
}

TEST(Outcome, JsonShape) {
    Fixture f = uniform_fixture(4, 60, 4, 2);
    QueryEngine engine(f.db, f.ranking, f.cfg);
    EngineSession s(engine);
    const AttackOutcome out = qi_point(s, victim_knowledge(f.db, 1), {}, 1);
    const json j = outcome_to_json(out, f.db.schema());
    for (const char* key : {"algorithm", "status", "target", "value", "queries_used", "inserts_used", "ledger",
                            "probes", "trace", "find_queries", "walk_rounds"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j["algorithm"], "qi-point");
    EXPECT_EQ(j["status"], "inferred");
    EXPECT_FALSE(outcome_to_json(out, f.db.schema(), false).contains("trace"));
    for (Algorithm a : {Algorithm::QIPoint, Algorithm::QPoint, Algorithm::QIIn, Algorithm::QIn}) {
        EXPECT_EQ(*parse_algorithm(algorithm_name(a)), a);
    }
    EXPECT_TRUE(uses_insertion(Algorithm::QIIn));
    EXPECT_FALSE(uses_insertion(Algorithm::QPoint));
}

TEST(Outcome, UnknownVictimAndTarget) {
    Fixture f = uniform_fixture(4, 60, 4, 2);
    EXPECT_THROW(victim_knowledge(f.db, 1000), Error);
    QueryEngine engine(f.db, f.ranking, f.cfg);
    EngineSession s(engine);
    AttackOptions opts;
    opts.target = 5;
    EXPECT_THROW(qi_point(s, victim_knowledge(f.db, 0), opts, 1), Error);
}
