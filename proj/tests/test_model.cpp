#include <gtest/gtest.h>

#include "rankleak/model.hpp"
#include "support.hpp"

using namespace rankleak;

namespace {

AttributeDescriptor attr(std::string name, Visibility vis, std::vector<std::string> domain, bool nulls = false) {
    return AttributeDescriptor{std::move(name), vis, std::move(domain), nulls};
}

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return Errc::Io;
}

}  // namespace

TEST(Schema, PublicsMovedFirstDeclaredOrderKept) {
    Schema s = build_schema({attr("secret", Visibility::Private, {"a", "b"}),
                             attr("city", Visibility::Public, {"x", "y", "z"}),
                             attr("age", Visibility::Public, {"young", "old"})});
    ASSERT_EQ(s.arity(), 3u);
    EXPECT_EQ(s.public_count(), 2u);
    EXPECT_EQ(s.private_count(), 1u);
    EXPECT_EQ(s.attribute(0).name, "city");
    EXPECT_EQ(s.attribute(1).name, "age");
    EXPECT_EQ(s.attribute(2).name, "secret");
    EXPECT_EQ(s.private_index(0), 2u);
    const auto order = s.declared_order();
    ASSERT_EQ(order.size(), 3u);
    EXPECT_EQ(s.attribute(order[0]).name, "secret");
    EXPECT_EQ(s.attribute(order[1]).name, "city");
    EXPECT_EQ(*s.find("age"), 1u);
    EXPECT_FALSE(s.find("nope"));
    EXPECT_EQ(*s.value_of(0, "z"), 2);
    EXPECT_FALSE(s.value_of(0, "w"));
}

TEST(Schema, RejectsDegenerateDescriptors) {
    EXPECT_EQ(code_of([] { build_schema({attr("a", Visibility::Public, {"x"}), attr("b", Visibility::Private, {"0", "1"})}); }),
              Errc::EmptyDomain);
    EXPECT_EQ(code_of([] { build_schema({attr("a", Visibility::Private, {"0", "1"})}); }), Errc::NoPublicAttribute);
    EXPECT_EQ(code_of([] { build_schema({attr("a", Visibility::Public, {"0", "1"})}); }), Errc::NoPrivateAttribute);
    EXPECT_EQ(code_of([] {
                  build_schema({attr("a", Visibility::Public, {"0", "1"}), attr("a", Visibility::Private, {"0", "1"})});
              }),
              Errc::DuplicateAttributeName);
}

TEST(Schema, BooleanConvenience) {
    Schema s = make_boolean_schema(3, 2);
    EXPECT_EQ(s.attribute(0).name, "A1");
    EXPECT_EQ(s.attribute(3).name, "B1");
    EXPECT_EQ(s.attribute(4).name, "B2");
    for (std::size_t i = 0; i < s.arity(); ++i) EXPECT_EQ(s.domain_size(i), 2u);
}

TEST(Schema, CheckValues) {
    Schema s = build_schema({attr("a", Visibility::Public, {"0", "1"}), attr("b", Visibility::Private, {"0", "1"}, true)});
    EXPECT_NO_THROW(s.check_values(std::vector<Value>{1, kNull}));
    EXPECT_EQ(code_of([&] { s.check_values(std::vector<Value>{kNull, 0}); }), Errc::SchemaMismatch);
    EXPECT_EQ(code_of([&] { s.check_values(std::vector<Value>{2, 0}); }), Errc::SchemaMismatch);
    EXPECT_EQ(code_of([&] { s.check_values(std::vector<Value>{0}); }), Errc::SchemaMismatch);
}

TEST(Database, InsertLookupAndDuplicates) {
    auto schema = fixtures::bool_schema(1, 1);
    Database db(schema);
    EXPECT_EQ(db.insert({0, 0}), 0u);
    EXPECT_EQ(db.insert({1, 0}, Provenance::Inserted), 1u);
    EXPECT_EQ(db.insert({1, 1}, Provenance::BonaFide, 10), 10u);
    EXPECT_EQ(db.next_id(), 11u);
    EXPECT_EQ(db.size(), 3u);
    EXPECT_EQ(db.at(1).provenance, Provenance::Inserted);
    EXPECT_EQ(*db.id_of_values(std::vector<Value>{1, 1}), 10u);
    EXPECT_EQ(code_of([&] { db.insert({0, 0}); }), Errc::DuplicateTuple);
    EXPECT_EQ(code_of([&] { db.insert({0, 1}, Provenance::BonaFide, 1); }), Errc::InvalidArgument);
    EXPECT_EQ(code_of([&] { db.at(5); }), Errc::UnknownTuple);
    db.replace_values(0, {0, 1});
    EXPECT_FALSE(db.id_of_values(std::vector<Value>{0, 0}));
    EXPECT_EQ(*db.id_of_values(std::vector<Value>{0, 1}), 0u);
}

TEST(Database, CopyIsIndependentSnapshot) {
    auto schema = fixtures::bool_schema(1, 1);
    Database a = fixtures::make_db(schema, {{0, 0}});
    Database b = insert_tuple(a, Tuple{7, {1, 1}, Provenance::Inserted});
    EXPECT_EQ(a.size(), 1u);
    EXPECT_EQ(b.size(), 2u);
    EXPECT_EQ(b.at(7).provenance, Provenance::Inserted);
}

TEST(ValueSet, Construction) {
    ValueSet s = ValueSet::single(5, 3);
    EXPECT_TRUE(s.is_single());
    EXPECT_EQ(*s.sole(), 3);
    EXPECT_TRUE(s.contains(3));
    EXPECT_FALSE(s.contains(2));
    EXPECT_FALSE(s.contains(kNull));
    ValueSet f = ValueSet::full(70);
    EXPECT_TRUE(f.is_full());
    EXPECT_EQ(f.size(), 70u);
    EXPECT_TRUE(f.contains(69));
    EXPECT_FALSE(f.sole());
    std::vector<Value> vals{4, 1, 4};
    ValueSet o = ValueSet::of(6, vals);
    EXPECT_EQ(o.size(), 2u);
    EXPECT_EQ(o.values(), (std::vector<Value>{1, 4}));
    EXPECT_EQ(code_of([] { ValueSet::of(3, std::vector<Value>{}); }), Errc::BadRequest);
    EXPECT_EQ(code_of([] { ValueSet::single(3, 3); }), Errc::SchemaMismatch);
}

TEST(Query, KindsAndCheck) {
    Schema s = make_boolean_schema(2, 1);
    Query star = Query::star(s);
    EXPECT_EQ(star.kind(0), PredicateKind::Star);
    EXPECT_FALSE(star.is_point());
    Query p = Query::point(s, std::vector<Value>{0, 1, 1});
    EXPECT_TRUE(p.is_point());
    EXPECT_EQ(p.kind(2), PredicateKind::Point);
    Query w = p.with(1, ValueSet::full(2));
    EXPECT_EQ(w.kind(1), PredicateKind::Star);
    EXPECT_NE(w, p);
    EXPECT_EQ(w.with_point(1, 1), p);
    EXPECT_EQ(QueryHash{}(w.with_point(1, 1)), QueryHash{}(p));
    Schema s3 = make_categorical_schema(1, 1, std::vector<std::size_t>{3}, std::vector<std::size_t>{2});
    Query in = Query::star(s3).with(0, ValueSet::of(3, std::vector<Value>{0, 2}));
    EXPECT_EQ(in.kind(0), PredicateKind::In);
    EXPECT_EQ(code_of([&] { in.check(s); }), Errc::SchemaMismatch);
    EXPECT_NO_THROW(in.check(s3));
}

TEST(RankedAnswer, RankOf) {
    RankedAnswer a{3, {{5, {}}, {2, {}}, {9, {}}}};
    EXPECT_EQ(*a.rank_of(5), 1u);
    EXPECT_EQ(*a.rank_of(9), 3u);
    EXPECT_FALSE(a.rank_of(4));
}
