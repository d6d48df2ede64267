#include <doctest.h>

#include <algorithm>
#include <set>

#include "pna/matching.hpp"
#include "pna/rng.hpp"

using namespace pna;

namespace {

PredictionScore score(NodeId u1, NodeId u2, double p) {
    return {{u1, u2}, p, p >= 0.5 ? 1 : -1};
}

// William=0, Rebecca=1, Jonathan=2; Wm=0, Becky=1, Jon=2. (William, Wm) tops
// both lists, the two remaining side-1 users chase Wm, the two remaining
// side-2 users prefer their true counterparts.
std::vector<PredictionScore> william_instance() {
    return {
        score(0, 0, 0.95), score(0, 1, 0.30), score(0, 2, 0.25),
        score(1, 0, 0.90), score(1, 1, 0.60), score(1, 2, 0.10),
        score(2, 0, 0.85), score(2, 1, 0.20), score(2, 2, 0.55),
    };
}

struct RandomInstance {
    std::vector<PredictionScore> scores;
    std::uint32_t n1 = 0, n2 = 0, k = 1;
};

RandomInstance random_instance(Rng& rng, std::uint32_t max_side = 6) {
    RandomInstance inst;
    inst.n1 = 1 + static_cast<std::uint32_t>(rng.uniform(max_side));
    inst.n2 = 1 + static_cast<std::uint32_t>(rng.uniform(max_side));
    inst.k = 1 + static_cast<std::uint32_t>(rng.uniform(3));
    for (NodeId u = 0; u < inst.n1; ++u)
        for (NodeId v = 0; v < inst.n2; ++v)
            if (rng.bernoulli(0.55))
                inst.scores.push_back(score(u, v, (1.0 + rng.uniform(98)) / 100.0));
    return inst;
}

bool same_matched(const MatchingResult& a, const MatchingResult& b) {
    return a.matched == b.matched;
}

}  // namespace

TEST_CASE("truncated strategy layout") {
    SUBCASE("top-2 prefix with self afterwards") {
        const auto build = build_preferences(
            {score(0, 0, 0.9), score(0, 1, 0.8), score(0, 2, 0.7)}, {}, 1, 3, 2);
        CHECK(build.strategies.side1[0] == std::vector<NodeId>{0, 1});
        CHECK(build.strategies.self_option);
        CHECK(build.prefs.side1[0] == std::vector<NodeId>{0, 1, 2});
    }
    SUBCASE("no scored candidates leaves only the self entry") {
        const auto build = build_preferences({}, {}, 2, 2, 3);
        CHECK(build.strategies.side1[0].empty());
        CHECK(build.strategies.self_option);
    }
    SUBCASE("K beyond the candidate count keeps the whole list") {
        const auto build = build_preferences({score(0, 0, 0.9), score(0, 1, 0.8)}, {}, 1, 2, 10);
        CHECK(build.strategies.side1[0] == std::vector<NodeId>{0, 1});
    }
    SUBCASE("ties break toward the smaller partner id") {
        const auto build = build_preferences(
            {score(0, 2, 0.5), score(0, 1, 0.5), score(0, 0, 0.1)}, {}, 1, 3, 3);
        CHECK(build.prefs.side1[0] == std::vector<NodeId>{1, 2, 0});
    }
    SUBCASE("duplicate scored pair is an error") {
        CHECK_THROWS_AS(
            build_preferences({score(0, 0, 0.9), score(0, 0, 0.8)}, {}, 1, 1, 1), ConfigError);
    }
    SUBCASE("known anchors take probability 1.0 and the top slot") {
        const auto build =
            build_preferences({score(0, 0, 0.9), score(0, 1, 0.99)}, {{0, 0}}, 1, 2, 2);
        CHECK(build.prefs.probability(0, 0) == 1.0);
        CHECK(build.prefs.side1[0] == std::vector<NodeId>{0, 1});
    }
}

TEST_CASE("generic matching at K=1 keeps only the top mutual pair") {
    const auto build = build_preferences(william_instance(), {}, 3, 3, 1);
    const MatchingResult result = generic_gale_shapley(build.prefs, build.strategies);
    CHECK(result.matched == std::vector<Edge>{{0, 0}});
    CHECK(result.self_matched_1 == std::vector<NodeId>{1, 2});
    CHECK(result.self_matched_2 == std::vector<NodeId>{1, 2});
    CHECK(result.unprocessed_1.empty());
    CHECK(result.unprocessed_2.empty());
    CHECK(verify_stability(result, build.prefs, build.strategies).empty());
}

TEST_CASE("traditional matching keeps all three pairs") {
    const auto build = build_traditional_preferences(william_instance(), {}, 3, 3);
    const MatchingResult result = generic_gale_shapley(build.prefs, build.strategies);
    CHECK(result.matched == std::vector<Edge>{{0, 0}, {1, 1}, {2, 2}});
    CHECK(result.self_matched_1.empty());
    CHECK(result.self_matched_2.empty());
    CHECK(verify_stability(result, build.prefs, build.strategies).empty());
}

TEST_CASE("empty candidate sets self-match everyone under generic matching") {
    const auto build = build_preferences({}, {}, 3, 2, 2);
    const MatchingResult result = generic_gale_shapley(build.prefs, build.strategies);
    CHECK(result.matched.empty());
    CHECK(result.self_matched_1 == std::vector<NodeId>{0, 1, 2});
    CHECK(result.self_matched_2 == std::vector<NodeId>{0, 1});
}

TEST_CASE("traditional matching reports candidate-less users as unprocessed") {
    const auto build = build_traditional_preferences({score(0, 0, 0.8)}, {}, 2, 2);
    const MatchingResult result = generic_gale_shapley(build.prefs, build.strategies);
    CHECK(result.matched == std::vector<Edge>{{0, 0}});
    CHECK(result.unprocessed_1 == std::vector<NodeId>{1});
    CHECK(result.unprocessed_2 == std::vector<NodeId>{1});
}

TEST_CASE("known anchors are always matched") {
    Rng rng(321);
    for (int trial = 0; trial < 30; ++trial) {
        RandomInstance inst = random_instance(rng);
        // plant an anchor on the diagonal of the shared prefix
        const Edge anchor{0, 0};
        std::erase_if(inst.scores, [&](const PredictionScore& s) { return s.pair == anchor; });
        const auto build = build_preferences(inst.scores, {anchor}, inst.n1, inst.n2, inst.k);
        const MatchingResult result = generic_gale_shapley(build.prefs, build.strategies);
        CHECK(std::find(result.matched.begin(), result.matched.end(), anchor) !=
              result.matched.end());
    }
}

TEST_CASE("swapping partners of aligned preferences creates a blocking pair") {
    const std::vector<PredictionScore> scores = {score(0, 0, 0.9), score(0, 1, 0.8),
                                                 score(1, 0, 0.7), score(1, 1, 0.6)};
    const auto build = build_preferences(scores, {}, 2, 2, 2);
    const MatchingResult good = generic_gale_shapley(build.prefs, build.strategies);
    CHECK(good.matched == std::vector<Edge>{{0, 0}, {1, 1}});
    CHECK(verify_stability(good, build.prefs, build.strategies).empty());

    MatchingResult swapped;
    swapped.matched = {{0, 1}, {1, 0}};
    const auto violations = verify_stability(swapped, build.prefs, build.strategies);
    bool has_blocking = false;
    for (const auto& v : violations) has_blocking |= v.find("blocking pair") != std::string::npos;
    CHECK(has_blocking);
}

TEST_CASE("matching someone outside the strategy is a rationality violation") {
    const auto build = build_preferences({score(0, 0, 0.9), score(0, 1, 0.2)}, {}, 1, 2, 1);
    MatchingResult bad;
    bad.matched = {{0, 1}};  // rank 2 partner, beyond K=1
    const auto violations = verify_stability(bad, build.prefs, build.strategies);
    bool has_rationality = false;
    for (const auto& v : violations)
        has_rationality |= v.find("rationality") != std::string::npos;
    CHECK(has_rationality);
}

TEST_CASE("double-matching a user violates one-to-one") {
    const auto build = build_preferences(
        {score(0, 0, 0.9), score(1, 0, 0.8), score(1, 1, 0.7)}, {}, 2, 2, 2);
    MatchingResult bad;
    bad.matched = {{0, 0}, {1, 0}};
    const auto violations = verify_stability(bad, build.prefs, build.strategies);
    bool has_one_to_one = false;
    for (const auto& v : violations) has_one_to_one |= v.find("one-to-one") != std::string::npos;
    CHECK(has_one_to_one);
}

TEST_CASE("brute force basics") {
    SUBCASE("single mutually acceptable pair") {
        const auto build = build_preferences({score(0, 0, 0.9)}, {}, 1, 1, 1);
        const auto stable = brute_force_stable_matchings(build.prefs, build.strategies);
        bool found = false;
        for (const auto& m : stable) found |= m.matched == std::vector<Edge>{{0, 0}};
        CHECK(found);
    }
    SUBCASE("no candidates: the all-self matching is the unique stable outcome") {
        const auto build = build_preferences({}, {}, 2, 2, 2);
        const auto stable = brute_force_stable_matchings(build.prefs, build.strategies);
        REQUIRE(stable.size() == 1);
        CHECK(stable[0].matched.empty());
        CHECK(stable[0].self_matched_1 == std::vector<NodeId>{0, 1});
    }
    SUBCASE("size cap") {
        PreferenceTable prefs;
        prefs.n1 = 9;
        prefs.n2 = 2;
        prefs.side1.resize(9);
        prefs.side2.resize(2);
        TruncatedStrategies st;
        st.side1.resize(9);
        st.side2.resize(2);
        CHECK_THROWS_AS(brute_force_stable_matchings(prefs, st), ConfigError);
    }
}

TEST_CASE("gale-shapley output is stable and in the brute-force set") {
    Rng rng(20240818);
    for (int trial = 0; trial < 60; ++trial) {
        const RandomInstance inst = random_instance(rng);
        const auto build = build_preferences(inst.scores, {}, inst.n1, inst.n2, inst.k);
        const MatchingResult result = generic_gale_shapley(build.prefs, build.strategies);
        CHECK(verify_stability(result, build.prefs, build.strategies).empty());
        const auto stable = brute_force_stable_matchings(build.prefs, build.strategies);
        bool in_set = false;
        for (const auto& m : stable) in_set |= same_matched(m, result);
        CHECK(in_set);
    }
}

TEST_CASE("proposer side weakly prefers the algorithm outcome") {
    Rng rng(515);
    for (int trial = 0; trial < 25; ++trial) {
        const RandomInstance inst = random_instance(rng, 5);
        const auto build = build_preferences(inst.scores, {}, inst.n1, inst.n2, inst.k);
        const MatchingResult ours = generic_gale_shapley(build.prefs, build.strategies);
        const auto stable = brute_force_stable_matchings(build.prefs, build.strategies);

        const auto rank_or_self = [&](NodeId u, const std::vector<Edge>& matched) {
            for (const auto& [a, b] : matched)
                if (a == u) {
                    const auto& list = build.strategies.side1[u];
                    return std::find(list.begin(), list.end(), b) - list.begin();
                }
            return static_cast<std::ptrdiff_t>(build.strategies.side1[u].size());
        };
        for (const auto& other : stable)
            for (NodeId u = 0; u < inst.n1; ++u)
                CHECK(rank_or_self(u, ours.matched) <= rank_or_self(u, other.matched));
    }
}

TEST_CASE("pairs matched within a smaller truncation stay mutually acceptable") {
    Rng rng(626);
    for (int trial = 0; trial < 20; ++trial) {
        RandomInstance inst = random_instance(rng);
        inst.k = 3;
        const auto at_k = build_preferences(inst.scores, {}, inst.n1, inst.n2, inst.k);
        const MatchingResult result = generic_gale_shapley(at_k.prefs, at_k.strategies);
        for (std::uint32_t smaller = 1; smaller < inst.k; ++smaller) {
            const auto at_smaller = build_preferences(inst.scores, {}, inst.n1, inst.n2, smaller);
            for (const auto& [u, v] : result.matched) {
                const auto& lu = at_k.strategies.side1[u];
                const auto& lv = at_k.strategies.side2[v];
                const auto ru = std::find(lu.begin(), lu.end(), v) - lu.begin();
                const auto rv = std::find(lv.begin(), lv.end(), u) - lv.begin();
                if (ru < smaller && rv < smaller) {
                    const auto& su = at_smaller.strategies.side1[u];
                    const auto& sv = at_smaller.strategies.side2[v];
                    CHECK(std::find(su.begin(), su.end(), v) != su.end());
                    CHECK(std::find(sv.begin(), sv.end(), u) != sv.end());
                }
            }
        }
    }
}

TEST_CASE("matched output is always one-to-one or fewer") {
    Rng rng(111);
    for (int trial = 0; trial < 40; ++trial) {
        const RandomInstance inst = random_instance(rng);
        const auto build = build_preferences(inst.scores, {}, inst.n1, inst.n2, inst.k);
        const MatchingResult result = generic_gale_shapley(build.prefs, build.strategies);
        std::set<NodeId> left, right;
        for (const auto& [a, b] : result.matched) {
            CHECK(left.insert(a).second);
            CHECK(right.insert(b).second);
        }
    }
}
