#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "pna/rng.hpp"
#include "pna/sampling.hpp"

using namespace pna;

namespace {

LabeledInstance inst(std::vector<double> features, int label) {
    return {std::nullopt, std::move(features), label};
}

std::vector<LabeledInstance> random_dataset(Rng& rng, std::size_t pos, std::size_t neg,
                                            std::size_t dims = 3) {
    std::vector<LabeledInstance> data;
    for (std::size_t i = 0; i < pos; ++i) {
        std::vector<double> f(dims);
        for (double& x : f) x = rng.uniform01() * 2.0;
        data.push_back(inst(std::move(f), 1));
    }
    for (std::size_t i = 0; i < neg; ++i) {
        std::vector<double> f(dims);
        for (double& x : f) x = 1.0 + rng.uniform01() * 2.0;
        data.push_back(inst(std::move(f), -1));
    }
    return data;
}

}  // namespace

TEST_CASE("two opposite instances form the only tomek link") {
    const std::vector<LabeledInstance> data = {inst({0.0}, 1), inst({1.0}, -1)};
    const auto links = find_tomek_links(data);
    REQUIRE(links.size() == 1);
    CHECK(links[0] == std::pair<std::size_t, std::size_t>{0, 1});
}

TEST_CASE("blocked cross pair is not a tomek link") {
    // (0, 10) is blocked by the negative at 1; only (0, 1) qualifies
    const std::vector<LabeledInstance> data = {inst({0.0}, 1), inst({1.0}, -1),
                                               inst({10.0}, -1)};
    const auto links = find_tomek_links(data);
    REQUIRE(links.size() == 1);
    CHECK(links[0] == std::pair<std::size_t, std::size_t>{0, 1});
}

TEST_CASE("duplicated points with a midpoint blocker match the brute-force scan") {
    // duplicated positives far from the negatives, with a midpoint instance
    // blocking the long cross pairs
    const std::vector<LabeledInstance> data = {inst({0.0}, 1),  inst({0.0}, 1),
                                               inst({5.0}, -1), inst({10.0}, -1),
                                               inst({10.0}, -1)};
    CHECK(find_tomek_links(data) == oracles::tomek_links_naive(data));
}

TEST_CASE("tomek links agree with brute force on random data") {
    Rng rng(31337);
    for (int trial = 0; trial < 10; ++trial) {
        const auto data = random_dataset(rng, 6 + trial, 12 + trial);
        CHECK(find_tomek_links(data) == oracles::tomek_links_naive(data));
    }
}

TEST_CASE("tomek links are invariant under instance reordering") {
    Rng rng(88);
    const auto data = random_dataset(rng, 8, 14);
    std::vector<std::size_t> perm(data.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<LabeledInstance> shuffled(data.size());
    std::vector<std::size_t> inverse(data.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        shuffled[i] = data[perm[i]];
        inverse[perm[i]] = i;
    }
    auto base = find_tomek_links(data);
    for (auto& [a, b] : base) {
        a = inverse[a];
        b = inverse[b];
        if (a > b) std::swap(a, b);
    }
    std::sort(base.begin(), base.end());
    CHECK(base == find_tomek_links(shuffled));
}

TEST_CASE("tomek links require both classes") {
    CHECK_THROWS_AS(find_tomek_links({inst({0.0}, 1), inst({1.0}, 1)}), ConfigError);
}

TEST_CASE("tomek links are symmetric in the two classes") {
    Rng rng(909);
    auto data = random_dataset(rng, 7, 13);
    const auto base = find_tomek_links(data);
    for (auto& d : data) d.label = -d.label;
    CHECK(find_tomek_links(data) == base);
}

TEST_CASE("downsample keeps every positive") {
    Rng rng(5150);
    const auto data = random_dataset(rng, 10, 30);
    const DownsampleResult result = downsample(data, 1, 42);
    std::size_t positives_in = 0, positives_out = 0;
    for (const auto& d : data) positives_in += d.label == 1;
    for (const auto& d : result.instances) positives_out += d.label == 1;
    CHECK(positives_in == positives_out);

    std::size_t negatives_in = 0, negatives_out = 0;
    for (const auto& d : data) negatives_in += d.label == -1;
    for (const auto& d : result.instances) negatives_out += d.label == -1;
    CHECK(negatives_out <= negatives_in);
}

TEST_CASE("downsample replays exactly against the naive implementation") {
    Rng rng(61);
    for (int trial = 0; trial < 6; ++trial) {
        const auto data = random_dataset(rng, 5 + trial, 15 + 2 * trial);
        const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(trial);
        for (int k : {1, 3}) {
            const DownsampleResult result = downsample(data, k, seed);
            CHECK(result.consistent == oracles::consistent_subset_naive(data, k, seed));
        }
    }
}

TEST_CASE("well-separated balanced clusters keep all positives in C") {
    std::vector<LabeledInstance> data;
    for (int i = 0; i < 6; ++i) data.push_back(inst({0.0 + 0.01 * i, 0.0}, 1));
    for (int i = 0; i < 6; ++i) data.push_back(inst({10.0 + 0.01 * i, 10.0}, -1));
    const DownsampleResult result = downsample(data, 1, 7);
    std::size_t positives = 0;
    for (const auto& d : result.instances) positives += d.label == 1;
    CHECK(positives == 6);
}

TEST_CASE("smote interpolation stays inside the segment box") {
    Rng rng(12);
    std::vector<LabeledInstance> minority;
    for (int i = 0; i < 12; ++i) {
        std::vector<double> f = {rng.uniform01() * 4.0, rng.uniform01() * 4.0,
                                 rng.uniform01() * 4.0};
        minority.push_back(inst(std::move(f), 1));
    }
    const SmoteResult result = smote(minority, 2.5, 5, 99);
    CHECK(result.synthetic.size() == 30);  // round(2.5 * 12)
    REQUIRE(result.parents.size() == result.synthetic.size());
    for (std::size_t s = 0; s < result.synthetic.size(); ++s) {
        const auto& [xi, yi] = result.parents[s];
        const auto& x = minority[xi].features;
        const auto& y = minority[yi].features;
        const auto& synth = result.synthetic[s];
        CHECK(synth.label == 1);
        CHECK_FALSE(synth.pair.has_value());  // synthetic marker
        for (std::size_t j = 0; j < x.size(); ++j) {
            CHECK(synth.features[j] >= std::min(x[j], y[j]) - 1e-12);
            CHECK(synth.features[j] <= std::max(x[j], y[j]) + 1e-12);
        }
    }
}

TEST_CASE("smote on identical points reproduces the point") {
    std::vector<LabeledInstance> minority(8, inst({3.0, -1.0}, 1));
    const SmoteResult result = smote(minority, 1.0, 5, 5);
    CHECK(result.synthetic.size() == 8);
    for (const auto& s : result.synthetic) {
        CHECK(s.features[0] == doctest::Approx(3.0));
        CHECK(s.features[1] == doctest::Approx(-1.0));
    }
}

TEST_CASE("zero interpolation coefficient keeps the seed point") {
    // theta = 0 puts the synthetic instance at the segment endpoint x
    const std::vector<double> x = {1.0, 2.0};
    const std::vector<double> y = {5.0, -3.0};
    std::vector<double> synth(2);
    for (std::size_t j = 0; j < 2; ++j) synth[j] = x[j] + 0.0 * (y[j] - x[j]);
    CHECK(synth == x);
}

TEST_CASE("smote output count and determinism") {
    Rng rng(8);
    std::vector<LabeledInstance> minority;
    for (int i = 0; i < 9; ++i)
        minority.push_back(inst({rng.uniform01(), rng.uniform01()}, 1));

    const SmoteResult a = smote_count(minority, 13, 5, 1234);
    CHECK(a.synthetic.size() == 13);
    const SmoteResult b = smote_count(minority, 13, 5, 1234);
    for (std::size_t i = 0; i < 13; ++i) CHECK(a.synthetic[i].features == b.synthetic[i].features);
    const SmoteResult c = smote_count(minority, 13, 5, 4321);
    bool any_different = false;
    for (std::size_t i = 0; i < 13; ++i)
        any_different |= a.synthetic[i].features != c.synthetic[i].features;
    CHECK(any_different);
}

TEST_CASE("smote preconditions") {
    std::vector<LabeledInstance> tiny(4, inst({0.0}, 1));
    CHECK_THROWS_AS(smote(tiny, 1.0, 5, 1), ConfigError);  // |minority| <= k
    std::vector<LabeledInstance> enough(7, inst({0.0}, 1));
    CHECK_THROWS_AS(smote(enough, 0.0, 5, 1), ConfigError);
    CHECK_THROWS_AS(smote(enough, -1.0, 5, 1), ConfigError);
}

TEST_CASE("sigma contracts move exactly floor(sigma * (neg - pos)) instances") {
    Rng rng(4096);
    const auto data = random_dataset(rng, 8, 30);
    for (double sigma : {0.0, 0.3, 0.7, 1.0}) {
        const std::ptrdiff_t quota =
            static_cast<std::ptrdiff_t>(std::floor(sigma * (30.0 - 8.0)));

        const auto down = sigma_downsample(data, sigma, 1, 11);
        std::ptrdiff_t down_neg = 0, down_pos = 0;
        for (const auto& d : down) (d.label == 1 ? down_pos : down_neg) += 1;
        CHECK(down_pos == 8);
        CHECK(down_neg == 30 - quota);

        const auto up = sigma_oversample(data, sigma, 5, 11);
        std::ptrdiff_t up_neg = 0, up_pos = 0;
        for (const auto& d : up) (d.label == 1 ? up_pos : up_neg) += 1;
        CHECK(up_neg == 30);
        CHECK(up_pos == 8 + quota);
    }
}

TEST_CASE("sigma_downsample removes non-safe negatives before safe ones") {
    Rng rng(2789);
    const auto data = random_dataset(rng, 6, 24);
    const DownsampleResult ds = downsample(data, 1, Rng(77).next_u64());
    std::set<std::size_t> safe(ds.consistent.begin(), ds.consistent.end());
    std::size_t safe_neg = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (data[i].label == -1 && safe.count(i)) ++safe_neg;

    // a partial quota that fits inside the non-safe pool must keep every
    // safe negative
    const std::size_t non_safe = 24 - safe_neg;
    const double sigma = 0.1;
    const std::size_t quota = static_cast<std::size_t>(std::floor(sigma * (24 - 6)));
    if (quota <= non_safe) {
        const auto down = sigma_downsample(data, sigma, 1, 77);
        std::size_t safe_kept = 0;
        for (const auto& d : down)
            if (d.label == -1) {
                for (std::size_t i : ds.consistent)
                    if (data[i].label == -1 && data[i].features == d.features) {
                        ++safe_kept;
                        break;
                    }
            }
        CHECK(safe_kept >= safe_neg);
    }
}

TEST_CASE("empty-class datasets are rejected") {
    std::vector<LabeledInstance> only_pos(3, inst({0.0}, 1));
    CHECK_THROWS_AS(downsample(only_pos, 1, 0), ConfigError);
}
