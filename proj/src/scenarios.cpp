#include "rankleak/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rankleak {

namespace {

// Preference schema, internal order: married_before, age_band, ok_if_married.
constexpr std::size_t kMarried = 0;
constexpr std::size_t kAge = 1;
constexpr std::size_t kPref = 2;
constexpr Value kYes = 0;
constexpr Value kNo = 1;
constexpr Value kPrefNo = 0;
constexpr Value kPrefAny = 1;

}  // namespace

double PreferenceMatchRanking::score(std::span<const Value> values, const Query& q) const {
    double s = discrete_distance(q[kAge], values[kAge]);
    // The candidate refuses searchers who were married before.
    if (values[kPref] == kPrefNo && q[kMarried].contains(kYes)) s += 1;
    // The searcher refuses candidates who were married before.
    if (!q[kPref].contains(kPrefAny) && values[kMarried] == kYes) s += 1;
    return s;
}

std::shared_ptr<const Schema> preference_schema() {
    return std::make_shared<const Schema>(build_schema({
        {"married_before", Visibility::Public, {"Yes", "No"}, false},
        {"age_band", Visibility::Public, {"18-29", "30-44", "45+"}, false},
        {"ok_if_married", Visibility::Private, {"No", "NoPreference"}, false},
    }));
}

ScenarioReport scenario_boolean_preference(std::uint64_t seed, std::size_t max_population) {
    auto schema = preference_schema();
    auto ranking = std::make_shared<PreferenceMatchRanking>();
    std::vector<std::vector<Value>> profiles;
    for (Value a = 0; a < 2; ++a) {
        for (Value b = 0; b < 3; ++b) {
            for (Value c = 0; c < 2; ++c) profiles.push_back({a, b, c});
        }
    }
    std::mt19937_64 rng(seed);
    ScenarioReport r;
    r.name = "boolean-preference";
    std::size_t populations = 0, same = 0, up = 0, down = 0, drop_with_any = 0;

    for (std::uint32_t mask = 1; mask < (1U << profiles.size()); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) > max_population) continue;
        ++populations;
        Database db(schema);
        for (std::size_t i = 0; i < profiles.size(); ++i) {
            if (mask >> i & 1U) db.insert(profiles[i]);
        }
        InterfaceConfig cfg;
        cfg.k = db.size();
        cfg.insertion_allowed = false;
        QueryEngine engine(db, ranking, cfg);
        for (const Tuple& v : db.tuples()) {
            EngineSession session(engine);
            const Value searcher_pref = std::uniform_int_distribution<Value>(0, 1)(rng);
            const Query q1 = Query::point(*schema, std::vector<Value>{kNo, v.values[kAge], searcher_pref});
            const Query q2 = q1.with_point(kMarried, kYes);
            const auto r1 = session.query(q1).rank_of(v.id);
            const auto r2 = session.query(q2).rank_of(v.id);
            r.requests += 2;
            ++r.cases;
            if (*r2 > *r1) {
                ++down;
                ++r.decided;
                if (v.values[kPref] == kPrefNo) {
                    ++r.correct;
                } else {
                    ++r.wrong;
                    ++drop_with_any;
                }
            } else {
                ++(*r2 == *r1 ? same : up);
                ++r.undecided;
            }
        }
    }
    r.success = r.wrong == 0 && r.decided > 0 && drop_with_any == 0;
    r.details = json{{"populations", populations},
                     {"rank_same", same},
                     {"rank_up", up},
                     {"rank_down", down},
                     {"rank_down_with_no_preference", drop_with_any}};
    return r;
}

ZipTable make_grid_zip_table(std::size_t rows, std::size_t cols) {
    ZipTable t;
    const std::size_t width = std::to_string(rows * cols - 1).size() < 3 ? 3 : std::to_string(rows * cols - 1).size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            std::string num = std::to_string(r * cols + c);
            t.codes.push_back("Z" + std::string(width - num.size(), '0') + num);
            t.coords.emplace_back(static_cast<double>(c), static_cast<double>(r));
        }
    }
    return t;
}

double ZipDistanceRanking::distance(Value a, Value b) const {
    const auto& [ax, ay] = m_coords.at(static_cast<std::size_t>(a));
    const auto& [bx, by] = m_coords.at(static_cast<std::size_t>(b));
    return std::hypot(ax - bx, ay - by);
}

namespace {

// Zip schema, internal order: name, handle, zip.
constexpr std::size_t kName = 0;
constexpr std::size_t kHandle = 1;
constexpr std::size_t kZip = 2;
constexpr double kNameMismatch = 1e6;

}  // namespace

double ZipDistanceRanking::score(std::span<const Value> values, const Query& q) const {
    double s = discrete_distance(q[kName], values[kName]) * kNameMismatch;
    const auto from = q[kZip].sole();
    if (!from || values[kZip] == kNull) return s + kNameMismatch / 2;
    return s + distance(*from, values[kZip]);
}

ScenarioReport scenario_zipcode_bisection(const ZipTable& table, const std::string& victim_zip, double margin,
                                          std::uint64_t seed, std::size_t others, std::size_t patience) {
    const auto vz_it = std::find(table.codes.begin(), table.codes.end(), victim_zip);
    if (vz_it == table.codes.end()) throw Error(Errc::UnknownValue, "zip " + victim_zip + " is not in the table");
    const auto truth = static_cast<Value>(vz_it - table.codes.begin());
    const std::size_t n_codes = table.codes.size();
    if (n_codes < 2) throw Error(Errc::InvalidArgument, "need at least two zip codes");

    const std::vector<std::string> names{"anya", "boris", "chen", "dara"};
    std::vector<std::string> handles;
    for (std::size_t i = 0; i < others + 1; ++i) handles.push_back("user" + std::to_string(i));
    handles.push_back("fake1");
    handles.push_back("fake2");
    auto schema = std::make_shared<const Schema>(build_schema({
        {"name", Visibility::Public, names, false},
        {"handle", Visibility::Public, handles, false},
        {"zip", Visibility::Private, table.codes, false},
    }));

    std::mt19937_64 rng(seed);
    auto pick_code = [&] { return static_cast<Value>(std::uniform_int_distribution<std::size_t>(0, n_codes - 1)(rng)); };
    Database db(schema);
    const Value victim_name = 0;
    const TupleId victim = db.insert({victim_name, 0, truth});
    for (std::size_t i = 1; i <= others; ++i) {
        const auto name = static_cast<Value>(std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(rng));
        db.insert({name, static_cast<Value>(i), pick_code()});
    }

    auto ranking = std::make_shared<ZipDistanceRanking>(table.coords);
    InterfaceConfig cfg;
    cfg.k = db.size() + 2;
    cfg.query_kind = QueryKind::PointOnly;
    QueryEngine engine(db, ranking, cfg);
    const ActorId actor = engine.new_actor();
    const auto fake1 = static_cast<Value>(others + 1);
    const auto fake2 = static_cast<Value>(others + 2);

    ScenarioReport r;
    r.name = "zipcode-bisection";
    r.cases = 1;
    Value z1 = pick_code();
    Value z2 = pick_code();
    while (z2 == z1) z2 = pick_code();
    const TupleId a1 = engine.insert({victim_name, fake1, z1}, actor);
    const TupleId a2 = engine.insert({victim_name, fake2, z2}, actor);
    r.requests += 2;

    // True when the victim outranks `account` in a search from `from`.
    auto victim_ahead = [&](Value from, TupleId account) {
        const Query q = Query::point(*schema, std::vector<Value>{victim_name, 0, from});
        const RankedAnswer ans = engine.answer(q, actor);
        ++r.requests;
        const auto rv = ans.rank_of(victim);
        const auto ra = ans.rank_of(account);
        return rv && (!ra || *rv < *ra);
    };

    std::vector<Value> candidates(n_codes);
    for (std::size_t i = 0; i < n_codes; ++i) candidates[i] = static_cast<Value>(i);
    auto prune = [&](Value from, double pivot, bool ahead) {
        const std::size_t before = candidates.size();
        std::erase_if(candidates, [&](Value z) {
            const double d = ranking->distance(from, z);
            return ahead ? d > pivot + margin : d <= pivot - margin;
        });
        return candidates.size() != before;
    };

    std::size_t idle = 0, stage1_rounds = 0;
    while (candidates.size() > 1 && idle < patience) {
        ++stage1_rounds;
        if (stage1_rounds > 1) {
            z1 = pick_code();
            do z2 = pick_code();
            while (z2 == z1);
            engine.update(a1, {victim_name, fake1, z1}, actor);
            engine.update(a2, {victim_name, fake2, z2}, actor);
            r.requests += 2;
        }
        const bool ahead = victim_ahead(z1, a2);
        idle = prune(z1, ranking->distance(z1, z2), ahead) ? 0 : idle + 1;
    }
    const std::size_t after_stage1 = candidates.size();
    if (candidates.empty()) throw Error(Errc::VictimNotFound, "every candidate zip was pruned");

    std::optional<Value> found;
    std::vector<Value> order = candidates;
    std::shuffle(order.begin(), order.end(), rng);
    for (Value c : order) {
        if (candidates.size() == 1) break;
        if (std::find(candidates.begin(), candidates.end(), c) == candidates.end()) continue;
        engine.update(a1, {victim_name, fake1, c}, actor);
        ++r.requests;
        const bool ahead = victim_ahead(c, a1);
        prune(c, 0.0, ahead);
        if (ahead) {
            found = c;
            break;
        }
    }
    if (candidates.empty()) throw Error(Errc::VictimNotFound, "every candidate zip was pruned");
    if (!found && candidates.size() == 1) found = candidates.front();
    if (!found) throw Error(Errc::VictimNotFound, "no candidate zip placed the victim ahead");

    r.identified = table.codes[static_cast<std::size_t>(*found)];
    r.decided = 1;
    const bool exact = *found == truth;
    const bool within = ranking->distance(*found, truth) <= margin;
    if (within) {
        ++r.correct;
    } else {
        ++r.wrong;
    }
    r.success = within;
    r.details = json{{"victim_zip", victim_zip},
                     {"exact", exact},
                     {"stage1_rounds", stage1_rounds},
                     {"candidates_after_stage1", after_stage1},
                     {"candidates_final", candidates.size()}};
    return r;
}

}  // namespace rankleak
