#include <gtest/gtest.h>

#include "rankleak/datagen.hpp"
#include "rankleak/server.hpp"
#include "rankleak/wire.hpp"
#include "support.hpp"

using namespace rankleak;

namespace {

json reply(QueryEngine& engine, ActorId actor, std::string_view line) {
    return json::parse(handle_request(engine, actor, line));
}

}  // namespace

TEST(Wire, SchemaRoundTrip) {
    Schema s = build_schema({{"z", Visibility::Private, {"a", "b"}, true}, {"y", Visibility::Public, {"p", "q", "r"}, false}});
    const json j = schema_to_json(s);
    EXPECT_EQ(j["attributes"][0]["name"], "y");
    EXPECT_EQ(schema_from_json(j), s);
    EXPECT_THROW(schema_from_json(json{{"attributes", 3}}), Error);
    json bad = j;
    bad["attributes"][0]["visibility"] = "hidden";
    EXPECT_THROW(schema_from_json(bad), Error);
}

TEST(Wire, QueryRoundTrip) {
    Schema s = make_categorical_schema(1, 1, std::vector<std::size_t>{3}, std::vector<std::size_t>{2});
    Query q = Query::star(s).with(0, ValueSet::of(3, std::vector<Value>{0, 2}));
    EXPECT_EQ(query_from_json(query_to_json(q), s), q);
    EXPECT_THROW(query_from_json(json::parse("[[0],[]]"), s), Error);
    EXPECT_THROW(query_from_json(json::parse("[[3],[0]]"), s), Error);
    EXPECT_THROW(query_from_json(json::parse("[[0]]"), s), Error);
}

TEST(Wire, HandleRequestOps) {
    auto schema = fixtures::bool_schema(1, 1);
    InterfaceConfig cfg;
    cfg.k = 2;
    QueryEngine engine(fixtures::make_db(schema, {{0, 0}, {1, 1}}), fixtures::unit_ranking(*schema), cfg);
    const ActorId a = engine.new_actor();
    const json sch = reply(engine, a, R"({"op":"schema"})");
    EXPECT_TRUE(sch["ok"]);
    EXPECT_EQ(sch["k"], 2);
    const json q = reply(engine, a, R"({"op":"query","predicates":[[1],[0,1]]})");
    ASSERT_TRUE(q["ok"]);
    EXPECT_EQ(q["entries"][0]["id"], 1);
    EXPECT_EQ(q["entries"][0]["public"], json::array({1}));
    EXPECT_EQ(reply(engine, a, R"({"op":"query","predicates":[[1],[0,1]],"k":1})")["entries"].size(), 1u);
    EXPECT_EQ(reply(engine, a, R"({"op":"insert","values":[0,1]})")["id"], 2);
    EXPECT_EQ(reply(engine, a, R"({"op":"insert","values":[0,1]})")["error"], "duplicate_tuple");
    EXPECT_EQ(reply(engine, a, R"({"op":"insert","values":[0,5]})")["error"], "bad_request");
    EXPECT_EQ(reply(engine, a, "not json")["error"], "bad_request");
    EXPECT_EQ(reply(engine, a, R"({"op":"drop"})")["error"], "bad_request");
    EXPECT_EQ(reply(engine, a, R"({"op":"query","predicates":[[0],[0]],"k":0})")["error"], "bad_request");
}

TEST(Wire, ErrorCodesRoundTrip) {
    for (Errc c : {Errc::RateLimited, Errc::UnsupportedPredicate, Errc::InsertionForbidden, Errc::DuplicateTuple,
                   Errc::BadRequest}) {
        EXPECT_EQ(errc_from_wire(wire_error_code(c)), c);
    }
    EXPECT_EQ(wire_error_code(Errc::SchemaMismatch), "bad_request");
}

TEST(Server, RemoteSessionMatchesInProcess) {
    Database db = gen_uniform_bool(50, 4, 2, 3);
    auto ranking = fixtures::unit_ranking(db.schema());
    InterfaceConfig cfg;
    cfg.k = 4;
    auto served = std::make_shared<QueryEngine>(db, ranking, cfg);
    QueryEngine local(db, ranking, cfg);
    Server server(served, {});
    RemoteSession remote("127.0.0.1", server.port());
    EngineSession in_process(local);
    EXPECT_EQ(remote.schema(), local.schema());
    EXPECT_EQ(remote.k(), 4u);
    Query q = Query::star(db.schema()).with_point(0, 1);
    EXPECT_EQ(remote.query(q), in_process.query(q));
    std::vector<Value> fresh(6, 0);
    for (int mask = 0; db.id_of_values(fresh); ++mask) {
        for (int i = 0; i < 6; ++i) fresh[static_cast<std::size_t>(i)] = (mask >> i) & 1;
    }
    EXPECT_EQ(remote.insert(fresh), in_process.insert(fresh));
    EXPECT_EQ(remote.query(q), in_process.query(q));
    server.stop();
    server.stop();
}

TEST(Server, ParseEndpoint) {
    EXPECT_EQ(parse_endpoint("127.0.0.1:8080"), (std::pair<std::string, std::uint16_t>{"127.0.0.1", 8080}));
    EXPECT_THROW(parse_endpoint("localhost"), Error);
    EXPECT_THROW(parse_endpoint("h:70000"), Error);
    EXPECT_THROW(parse_endpoint("h:8x"), Error);
}

TEST(Server, ConnectFailure) {
    EXPECT_THROW(WireClient("127.0.0.1", 1), Error);
}
