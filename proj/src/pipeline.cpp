#include "pna/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_set>

#include "pna/pruning.hpp"
#include "pna/rng.hpp"
#include "pna/sampling.hpp"
#include "pna/tsv.hpp"

namespace pna {

namespace {

// rng stream ids; every derived stream is a pure function of (seed, id)
constexpr std::uint64_t kStreamNegatives = 1;
constexpr std::uint64_t kStreamPosFolds = 2;
constexpr std::uint64_t kStreamNegFolds = 3;
constexpr std::uint64_t kStreamFoldEta = 100;
constexpr std::uint64_t kStreamFoldSample = 200;
constexpr std::uint64_t kStreamFoldTrain = 300;

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const unsigned hw = std::thread::hardware_concurrency();
    const std::size_t workers = std::min<std::size_t>(count, hw ? hw : 1);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

constexpr std::array<const char*, 24> kSyllables = {
    "an", "ar", "be", "ca", "da", "el", "fi", "ga", "ha", "in", "jo", "ka",
    "li", "ma", "na", "or", "pe", "qui", "ra", "sa", "ta", "ul", "vi", "wen"};

std::string random_name(Rng& rng) {
    const std::size_t parts = 2 + rng.uniform(2);
    std::string name;
    for (std::size_t i = 0; i < parts; ++i) name += kSyllables[rng.uniform(kSyllables.size())];
    return name;
}

std::string abbreviate(const std::string& name, Rng& rng) {
    switch (rng.uniform(3)) {
        case 0:
            return name.substr(0, std::min<std::size_t>(3, name.size()));
        case 1: {
            std::string out;
            for (std::size_t i = 0; i < name.size(); ++i) {
                const char c = name[i];
                if (i == 0 || (c != 'a' && c != 'e' && c != 'i' && c != 'o' && c != 'u'))
                    out += c;
            }
            return out.empty() ? name.substr(0, 1) : out;
        }
        default:
            return name.size() < 2 ? name : std::string{name.front(), name.back()};
    }
}

// expected-value integer draw: floor(x) plus one with probability frac(x)
std::uint32_t sample_count(Rng& rng, double expected) {
    const double base = std::floor(expected);
    const double frac = expected - base;
    return static_cast<std::uint32_t>(base) + (rng.bernoulli(frac) ? 1u : 0u);
}

std::vector<NodeId> shuffled_ids(Rng& rng, std::uint32_t count) {
    std::vector<NodeId> ids(count);
    for (std::uint32_t i = 0; i < count; ++i) ids[i] = i;
    rng.shuffle(ids);
    return ids;
}

struct PostDraft {
    NodeId author = 0;
    std::optional<NodeId> location;
    NodeId timestamp = 0;
    std::vector<NodeId> words;
};

std::uint64_t pair_key(NodeId a, NodeId b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

}  // namespace

AlignedPair generate_synthetic_pair(const GeneratorParams& p, std::uint64_t seed) {
    if (p.users1 == 0 || p.users2 == 0) throw ConfigError("generator: user counts must be > 0");
    if (p.anchor_fraction < 0.0 || p.anchor_fraction > 1.0)
        throw ConfigError("generator: anchor fraction must lie in [0, 1]");
    const std::uint32_t n_anchor =
        static_cast<std::uint32_t>(std::llround(p.anchor_fraction * p.users1));
    if (n_anchor > p.users2)
        throw ConfigError("generator: infeasible anchor fraction, side 2 has too few users");
    if (p.shared_locations > p.location_vocab || p.shared_words > p.word_vocab ||
        p.shared_timestamps > p.timestamp_vocab)
        throw ConfigError("generator: shared vocabulary larger than the vocabulary");
    if (p.words_per_post > p.word_vocab || p.locations_per_list > p.location_vocab)
        throw ConfigError("generator: per-post draws exceed the vocabulary");
    if (p.follow_out_degree >= p.users1 || p.follow_out_degree >= p.users2)
        throw ConfigError("generator: follow degree must be below the user count");
    if (p.word_vocab == 0 || p.location_vocab == 0 || p.timestamp_vocab == 0 ||
        p.town_vocab == 0)
        throw ConfigError("generator: vocabularies must be non-empty");

    Rng rng(seed);

    // anchor identities
    const std::vector<NodeId> order1 = shuffled_ids(rng, p.users1);
    const std::vector<NodeId> order2 = shuffled_ids(rng, p.users2);
    std::vector<Edge> anchors;
    anchors.reserve(n_anchor);
    std::vector<std::int64_t> counterpart(p.users2, -1);  // g2 user -> g1 user
    for (std::uint32_t i = 0; i < n_anchor; ++i) {
        anchors.emplace_back(order1[i], order2[i]);
        counterpart[order2[i]] = order1[i];
    }

    // bridge bijections over the shared portion of each vocabulary
    std::array<std::vector<Edge>, 3> bridges;
    std::array<std::vector<std::int64_t>, 3> bridge_fwd;  // g1 entity -> g2 entity
    const std::array<std::pair<std::uint32_t, std::uint32_t>, 3> vocab_shared = {{
        {p.word_vocab, p.shared_words},
        {p.timestamp_vocab, p.shared_timestamps},
        {p.location_vocab, p.shared_locations},
    }};
    for (std::size_t b = 0; b < 3; ++b) {
        const auto [vocab, shared] = vocab_shared[b];
        const std::vector<NodeId> perm1 = shuffled_ids(rng, vocab);
        const std::vector<NodeId> perm2 = shuffled_ids(rng, vocab);
        bridge_fwd[b].assign(vocab, -1);
        for (std::uint32_t i = 0; i < shared; ++i) {
            bridges[b].emplace_back(perm1[i], perm2[i]);
            bridge_fwd[b][perm1[i]] = perm2[i];
        }
    }
    const auto& word_fwd = bridge_fwd[0];
    const auto& time_fwd = bridge_fwd[1];
    const auto& loc_fwd = bridge_fwd[2];

    // g1 content
    std::vector<PostDraft> posts1;
    std::vector<std::vector<NodeId>> follows1(p.users1);
    std::vector<std::vector<NodeId>> checkins1(p.users1);  // locations per user
    std::vector<std::vector<NodeId>> words1(p.users1);
    std::vector<std::vector<NodeId>> times1(p.users1);
    for (NodeId u = 0; u < p.users1; ++u) {
        const std::uint32_t count = sample_count(rng, p.posts_per_user1);
        for (std::uint32_t i = 0; i < count; ++i) {
            PostDraft post;
            post.author = u;
            post.timestamp = static_cast<NodeId>(rng.uniform(p.timestamp_vocab));
            times1[u].push_back(post.timestamp);
            if (rng.bernoulli(p.checkin_prob)) {
                post.location = static_cast<NodeId>(rng.uniform(p.location_vocab));
                checkins1[u].push_back(*post.location);
            }
            std::set<NodeId> chosen;
            while (chosen.size() < p.words_per_post)
                chosen.insert(static_cast<NodeId>(rng.uniform(p.word_vocab)));
            post.words.assign(chosen.begin(), chosen.end());
            for (NodeId w : post.words) words1[u].push_back(w);
            posts1.push_back(std::move(post));
        }
    }
    for (NodeId u = 0; u < p.users1; ++u) {
        const std::uint32_t degree = sample_count(rng, p.follow_out_degree);
        std::set<NodeId> targets;
        std::size_t attempts = 0;
        while (targets.size() < degree && attempts < 20u * (degree + 1u)) {
            ++attempts;
            const NodeId t = static_cast<NodeId>(rng.uniform(p.users1));
            if (t != u) targets.insert(t);
        }
        follows1[u].assign(targets.begin(), targets.end());
    }

    // g1 lists: mostly drawn from the owner's own checkins
    struct ListDraft {
        NodeId owner;
        std::vector<NodeId> locations;
    };
    std::vector<ListDraft> lists1;
    for (NodeId u = 0; u < p.users1; ++u) {
        for (std::uint32_t l = 0; l < p.lists_per_user1; ++l) {
            ListDraft list;
            list.owner = u;
            std::set<NodeId> chosen;
            std::size_t attempts = 0;
            while (chosen.size() < p.locations_per_list && attempts < 200) {
                ++attempts;
                if (!checkins1[u].empty() && rng.bernoulli(p.list_from_checkin))
                    chosen.insert(checkins1[u][rng.uniform(checkins1[u].size())]);
                else
                    chosen.insert(static_cast<NodeId>(rng.uniform(p.location_vocab)));
            }
            list.locations.assign(chosen.begin(), chosen.end());
            lists1.push_back(std::move(list));
        }
    }

    // g2 content; anchored users reuse part of their counterpart's bridged
    // entities and follow targets
    std::vector<PostDraft> posts2;
    std::vector<std::vector<NodeId>> follows2(p.users2);
    for (NodeId v = 0; v < p.users2; ++v) {
        const std::int64_t u1 = counterpart[v];
        std::vector<NodeId> loc_pool, time_pool, word_pool;
        if (u1 >= 0) {
            for (NodeId l : checkins1[static_cast<std::size_t>(u1)])
                if (loc_fwd[l] >= 0) loc_pool.push_back(static_cast<NodeId>(loc_fwd[l]));
            for (NodeId t : times1[static_cast<std::size_t>(u1)])
                if (time_fwd[t] >= 0) time_pool.push_back(static_cast<NodeId>(time_fwd[t]));
            for (NodeId w : words1[static_cast<std::size_t>(u1)])
                if (word_fwd[w] >= 0) word_pool.push_back(static_cast<NodeId>(word_fwd[w]));
        }
        const std::uint32_t count = sample_count(rng, p.posts_per_user2);
        for (std::uint32_t i = 0; i < count; ++i) {
            PostDraft post;
            post.author = v;
            post.timestamp = (!time_pool.empty() && rng.bernoulli(p.time_copy))
                                 ? time_pool[rng.uniform(time_pool.size())]
                                 : static_cast<NodeId>(rng.uniform(p.timestamp_vocab));
            if (rng.bernoulli(p.checkin_prob)) {
                post.location = (!loc_pool.empty() && rng.bernoulli(p.checkin_copy))
                                    ? loc_pool[rng.uniform(loc_pool.size())]
                                    : static_cast<NodeId>(rng.uniform(p.location_vocab));
            }
            std::set<NodeId> chosen;
            std::size_t attempts = 0;
            while (chosen.size() < p.words_per_post && attempts < 500) {
                ++attempts;
                if (!word_pool.empty() && rng.bernoulli(p.word_copy))
                    chosen.insert(word_pool[rng.uniform(word_pool.size())]);
                else
                    chosen.insert(static_cast<NodeId>(rng.uniform(p.word_vocab)));
            }
            post.words.assign(chosen.begin(), chosen.end());
            posts2.push_back(std::move(post));
        }
    }
    {
        // copied follow edges between anchored users
        std::vector<std::int64_t> fwd_user(p.users1, -1);
        for (const auto& [a, b] : anchors) fwd_user[a] = b;
        for (const auto& [a, b] : anchors) {
            for (NodeId x : follows1[a]) {
                if (fwd_user[x] < 0 || !rng.bernoulli(p.follow_copy)) continue;
                follows2[b].push_back(static_cast<NodeId>(fwd_user[x]));
            }
        }
        for (NodeId v = 0; v < p.users2; ++v) {
            std::set<NodeId> targets(follows2[v].begin(), follows2[v].end());
            const std::uint32_t degree = sample_count(rng, p.follow_out_degree);
            std::size_t attempts = 0;
            while (targets.size() < degree && attempts < 20u * (degree + 1u)) {
                ++attempts;
                const NodeId t = static_cast<NodeId>(rng.uniform(p.users2));
                if (t != v) targets.insert(t);
            }
            follows2[v].assign(targets.begin(), targets.end());
        }
    }

    // profiles
    std::vector<std::string> towns;
    towns.reserve(p.town_vocab);
    for (std::uint32_t t = 0; t < p.town_vocab; ++t) {
        std::string town = random_name(rng);
        if (rng.bernoulli(0.4)) town += " " + random_name(rng);
        towns.push_back(std::move(town));
    }
    std::vector<UserProfile> profiles1(p.users1);
    for (NodeId u = 0; u < p.users1; ++u)
        profiles1[u] = {random_name(rng), towns[rng.uniform(towns.size())]};
    std::vector<UserProfile> profiles2(p.users2);
    for (NodeId v = 0; v < p.users2; ++v) {
        const std::int64_t u1 = counterpart[v];
        if (u1 >= 0) {
            const UserProfile& base = profiles1[static_cast<std::size_t>(u1)];
            profiles2[v].username =
                rng.bernoulli(p.name_abbrev_prob) ? abbreviate(base.username, rng) : base.username;
            profiles2[v].hometown = rng.bernoulli(p.hometown_match_prob)
                                        ? base.hometown
                                        : towns[rng.uniform(towns.size())];
        } else {
            profiles2[v] = {random_name(rng), towns[rng.uniform(towns.size())]};
        }
    }

    // assemble the two networks
    HeterogeneousNetwork g1;
    g1.set_node_count(NodeType::User, p.users1);
    g1.set_node_count(NodeType::Post, static_cast<std::uint32_t>(posts1.size()));
    g1.set_node_count(NodeType::Word, p.word_vocab);
    g1.set_node_count(NodeType::Timestamp, p.timestamp_vocab);
    g1.set_node_count(NodeType::Location, p.location_vocab);
    g1.set_node_count(NodeType::List, static_cast<std::uint32_t>(lists1.size()));
    for (NodeId u = 0; u < p.users1; ++u)
        for (NodeId t : follows1[u]) g1.add_edge(LinkTag::Follow, u, t);
    for (std::size_t i = 0; i < posts1.size(); ++i) {
        const PostDraft& post = posts1[i];
        const NodeId pid = static_cast<NodeId>(i);
        g1.add_edge(LinkTag::Write, post.author, pid);
        g1.add_edge(LinkTag::At, pid, post.timestamp);
        if (post.location) g1.add_edge(LinkTag::CheckinAt, pid, *post.location);
        for (NodeId w : post.words) g1.add_edge(LinkTag::Contain, pid, w);
    }
    for (std::size_t i = 0; i < lists1.size(); ++i) {
        const NodeId lid = static_cast<NodeId>(i);
        g1.add_edge(LinkTag::Create, lists1[i].owner, lid);
        for (NodeId l : lists1[i].locations) g1.add_edge(LinkTag::ListContain, lid, l);
    }
    for (NodeId u = 0; u < p.users1; ++u) g1.set_profile(u, profiles1[u]);
    g1.finalize();

    HeterogeneousNetwork g2;
    g2.set_node_count(NodeType::User, p.users2);
    g2.set_node_count(NodeType::Post, static_cast<std::uint32_t>(posts2.size()));
    g2.set_node_count(NodeType::Word, p.word_vocab);
    g2.set_node_count(NodeType::Timestamp, p.timestamp_vocab);
    g2.set_node_count(NodeType::Location, p.location_vocab);
    g2.set_node_count(NodeType::List, 0);
    for (NodeId v = 0; v < p.users2; ++v)
        for (NodeId t : follows2[v]) g2.add_edge(LinkTag::Follow, v, t);
    for (std::size_t i = 0; i < posts2.size(); ++i) {
        const PostDraft& post = posts2[i];
        const NodeId pid = static_cast<NodeId>(i);
        g2.add_edge(LinkTag::Write, post.author, pid);
        g2.add_edge(LinkTag::At, pid, post.timestamp);
        if (post.location) g2.add_edge(LinkTag::CheckinAt, pid, *post.location);
        for (NodeId w : post.words) g2.add_edge(LinkTag::Contain, pid, w);
    }
    for (NodeId v = 0; v < p.users2; ++v) g2.set_profile(v, profiles2[v]);
    g2.finalize();

    return AlignedPair(std::move(g1), std::move(g2), std::move(anchors), std::move(bridges));
}

namespace {

struct MethodTraits {
    const char* name;
    SamplingKind sampling;
    MatchingKind matching;
};

constexpr std::array<MethodTraits, kMethodCount> kMethodTraits = {{
    {"PNA-omt", SamplingKind::Over, MatchingKind::Generic},
    {"PNA-dmt", SamplingKind::Down, MatchingKind::Generic},
    {"PNA-om", SamplingKind::Over, MatchingKind::Traditional},
    {"PNA-dm", SamplingKind::Down, MatchingKind::Traditional},
    {"PNA-o", SamplingKind::Over, MatchingKind::None},
    {"PNA-d", SamplingKind::Down, MatchingKind::None},
    {"MNA", SamplingKind::None, MatchingKind::Traditional},
    {"MNA-no-matching", SamplingKind::None, MatchingKind::None},
}};

}  // namespace

const char* to_string(Method m) { return kMethodTraits[static_cast<std::size_t>(m)].name; }

Method parse_method(const std::string& s) {
    for (std::size_t i = 0; i < kMethodCount; ++i)
        if (s == kMethodTraits[i].name) return static_cast<Method>(i);
    throw ConfigError("unknown method: '" + s + "'");
}

SamplingKind sampling_of(Method m) { return kMethodTraits[static_cast<std::size_t>(m)].sampling; }
MatchingKind matching_of(Method m) { return kMethodTraits[static_cast<std::size_t>(m)].matching; }

void validate_config(const ExperimentConfig& config) {
    static const std::set<int> kThetaGrid = {1, 2, 3, 4, 5, 10, 20, 30, 40, 50};
    if (!kThetaGrid.count(config.theta))
        throw ConfigError("theta must be one of {1,2,3,4,5,10,20,30,40,50}");
    const auto on_grid = [](double v, int lo) {
        const double scaled = v * 10.0;
        const double rounded = std::round(scaled);
        return std::abs(scaled - rounded) <= 1e-9 && rounded >= lo && rounded <= 10;
    };
    if (!on_grid(config.eta, 1)) throw ConfigError("eta must be one of {0.1, 0.2, ..., 1.0}");
    if (!on_grid(config.sigma, 0)) throw ConfigError("sigma must be one of {0.0, 0.1, ..., 1.0}");
    if (config.k < 1) throw ConfigError("partial matching rate K must be >= 1");
    if (config.folds < 2) throw ConfigError("folds must be >= 2");
}

namespace {

struct FoldData {
    std::vector<Edge> train_anchors;
    std::vector<LabeledInstance> train_set;
    std::vector<Edge> test_pairs;
    std::vector<int> test_truth;
    std::vector<std::size_t> survivor_idx;             // into test_pairs
    std::vector<std::vector<double>> survivor_features;
};

FoldData make_fold(const AlignedPair& pair, const std::vector<Edge>& positives,
                   const std::vector<Edge>& negatives, const std::vector<int>& pos_fold,
                   const std::vector<int>& neg_fold, int fold, const ExperimentConfig& cfg) {
    FoldData data;
    std::vector<Edge> train_pos;
    for (std::size_t i = 0; i < positives.size(); ++i)
        (pos_fold[i] == fold ? data.test_pairs : train_pos).push_back(positives[i]);
    const std::size_t test_pos_count = data.test_pairs.size();
    std::vector<Edge> train_neg;
    for (std::size_t i = 0; i < negatives.size(); ++i)
        (neg_fold[i] == fold ? data.test_pairs : train_neg).push_back(negatives[i]);
    data.test_truth.assign(data.test_pairs.size(), -1);
    std::fill_n(data.test_truth.begin(), test_pos_count, 1);

    // eta-subsample of the training positives: the final positive training
    // set, and the only anchors features may see
    Rng eta_rng = Rng(cfg.seed).derive(kStreamFoldEta + static_cast<std::uint64_t>(fold));
    eta_rng.shuffle(train_pos);
    std::size_t keep = static_cast<std::size_t>(
        std::llround(cfg.eta * static_cast<double>(train_pos.size())));
    keep = std::max<std::size_t>(1, std::min(keep, train_pos.size()));
    data.train_anchors.assign(train_pos.begin(),
                              train_pos.begin() + static_cast<std::ptrdiff_t>(keep));
    std::sort(data.train_anchors.begin(), data.train_anchors.end());

    // leakage guard: a test-fold anchor must never feed feature extraction
    {
        std::unordered_set<std::uint64_t> test_keys;
        for (std::size_t i = 0; i < test_pos_count; ++i)
            test_keys.insert(pair_key(data.test_pairs[i].first, data.test_pairs[i].second));
        for (const auto& [u1, u2] : data.train_anchors)
            if (test_keys.count(pair_key(u1, u2)))
                throw std::logic_error("leakage: test anchor present in training anchors");
    }

    const SparseCountMatrix anchor_matrix = training_anchor_matrix(pair, data.train_anchors);
    const AnchorAdjacencyTensor tensor = build_tensor(pair, anchor_matrix);
    TuckerRanks ranks = cfg.ranks;
    ranks.p = std::min<std::size_t>(ranks.p, pair.g1().user_count());
    ranks.q = std::min<std::size_t>(ranks.q, pair.g2().user_count());
    ranks.r = std::min<std::size_t>(ranks.r, kAnchorPathCount);
    const TuckerFactors factors = hosvd(tensor, ranks);

    const auto features_of = [&](const Edge& e) {
        const auto fiber = eaaf(tensor, e.first, e.second);
        std::vector<double> f(fiber.begin(), fiber.end());
        const std::vector<double> latent = link_latent_features(factors, e.first, e.second);
        f.insert(f.end(), latent.begin(), latent.end());
        return f;
    };

    data.train_set.reserve(data.train_anchors.size() + train_neg.size());
    for (const Edge& e : data.train_anchors)
        data.train_set.push_back({e, features_of(e), 1});
    for (const Edge& e : train_neg) data.train_set.push_back({e, features_of(e), -1});

    // pre-pruning of the test candidates
    const std::vector<Edge> after_profile =
        profile_prune(data.test_pairs, pair.g1(), pair.g2());
    const std::vector<Edge> survivors = eaaf_prune(after_profile, tensor);
    std::unordered_set<std::uint64_t> survivor_keys;
    for (const Edge& e : survivors) survivor_keys.insert(pair_key(e.first, e.second));
    for (std::size_t i = 0; i < data.test_pairs.size(); ++i) {
        if (!survivor_keys.count(pair_key(data.test_pairs[i].first, data.test_pairs[i].second)))
            continue;
        data.survivor_idx.push_back(i);
        data.survivor_features.push_back(features_of(data.test_pairs[i]));
    }
    return data;
}

struct MethodFoldOutcome {
    Metrics metrics;
    double matching_seconds = 0.0;
};

MethodFoldOutcome run_method_on_fold(const FoldData& fold, Method method,
                                     const ExperimentConfig& cfg, std::uint64_t sample_seed,
                                     std::uint64_t train_seed, std::uint32_t n1,
                                     std::uint32_t n2) {
    std::vector<LabeledInstance> data = fold.train_set;
    switch (sampling_of(method)) {
        case SamplingKind::Over:
            data = sigma_oversample(data, cfg.sigma, cfg.smote_k, sample_seed);
            break;
        case SamplingKind::Down:
            data = sigma_downsample(data, cfg.sigma, cfg.knn_k, sample_seed);
            break;
        case SamplingKind::None:
            break;
    }

    TrainOptions opts = cfg.train_options;
    opts.seed = train_seed;
    const LinkModel model = train(data, opts);

    std::vector<PredictionScore> survivor_scores;
    survivor_scores.reserve(fold.survivor_idx.size());
    for (std::size_t s = 0; s < fold.survivor_idx.size(); ++s)
        survivor_scores.push_back(predict(model, fold.test_pairs[fold.survivor_idx[s]],
                                          fold.survivor_features[s]));

    // pruned pairs stay predicted negative with probability 0
    std::vector<PredictionScore> predictions(fold.test_pairs.size());
    for (std::size_t i = 0; i < fold.test_pairs.size(); ++i)
        predictions[i] = {fold.test_pairs[i], 0.0, -1};

    MethodFoldOutcome outcome;
    if (matching_of(method) == MatchingKind::None) {
        for (std::size_t s = 0; s < fold.survivor_idx.size(); ++s)
            predictions[fold.survivor_idx[s]] = survivor_scores[s];
        outcome.metrics = compute_metrics(predictions, fold.test_truth);
        return outcome;
    }

    // matching post-prunes the predicted anchor links: only candidates the
    // classifier accepted compete, alongside the known anchors at 1.0
    std::vector<PredictionScore> predicted_links;
    for (const auto& s : survivor_scores)
        if (s.label == 1) predicted_links.push_back(s);

    const auto start = std::chrono::steady_clock::now();
    const PreferenceBuild build =
        matching_of(method) == MatchingKind::Generic
            ? build_preferences(predicted_links, fold.train_anchors, n1, n2, cfg.k)
            : build_traditional_preferences(predicted_links, fold.train_anchors, n1, n2);
    const MatchingResult result = generic_gale_shapley(build.prefs, build.strategies);
    outcome.matching_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!verify_stability(result, build.prefs, build.strategies).empty())
        throw std::logic_error("matching produced an unstable result");

    std::unordered_set<std::uint64_t> matched_keys;
    for (const auto& [u1, u2] : result.matched) matched_keys.insert(pair_key(u1, u2));
    for (std::size_t s = 0; s < fold.survivor_idx.size(); ++s) {
        const Edge e = fold.test_pairs[fold.survivor_idx[s]];
        const bool hit = matched_keys.count(pair_key(e.first, e.second)) > 0;
        predictions[fold.survivor_idx[s]] = {e, hit ? 1.0 : 0.0, hit ? 1 : -1};
    }
    outcome.metrics = compute_metrics(predictions, fold.test_truth);
    outcome.metrics.auc = std::nullopt;  // label-only output, AUC not meaningful
    return outcome;
}

}  // namespace

std::vector<ExperimentResult> run_experiment_methods(const ExperimentConfig& config,
                                                     const std::vector<Method>& methods) {
    validate_config(config);
    if (methods.empty()) throw ConfigError("no methods requested");

    const AlignedPair pair = generate_synthetic_pair(config.gen, config.seed);
    const std::vector<Edge>& positives = pair.anchors();
    if (positives.empty()) throw ConfigError("experiment needs a pair with anchors");
    const std::uint32_t n1 = pair.g1().user_count();
    const std::uint32_t n2 = pair.g2().user_count();

    const std::size_t neg_count = static_cast<std::size_t>(config.theta) * positives.size();
    const std::size_t cross = static_cast<std::size_t>(n1) * n2;
    if (neg_count > cross - positives.size())
        throw ConfigError("theta demands more negatives than the cross product holds");
    std::unordered_set<std::uint64_t> anchor_keys;
    for (const auto& [u1, u2] : positives) anchor_keys.insert(pair_key(u1, u2));
    std::vector<Edge> negatives;
    negatives.reserve(neg_count);
    {
        Rng rng = Rng(config.seed).derive(kStreamNegatives);
        std::unordered_set<std::uint64_t> used;
        while (negatives.size() < neg_count) {
            const NodeId a = static_cast<NodeId>(rng.uniform(n1));
            const NodeId b = static_cast<NodeId>(rng.uniform(n2));
            const std::uint64_t key = pair_key(a, b);
            if (anchor_keys.count(key) || !used.insert(key).second) continue;
            negatives.emplace_back(a, b);
        }
    }

    // stratified fold assignment, positives and negatives shuffled separately
    const auto fold_assignment = [&](std::size_t count, std::uint64_t stream) {
        std::vector<std::size_t> order(count);
        for (std::size_t i = 0; i < count; ++i) order[i] = i;
        Rng rng = Rng(config.seed).derive(stream);
        rng.shuffle(order);
        std::vector<int> fold(count);
        for (std::size_t i = 0; i < count; ++i)
            fold[order[i]] = static_cast<int>(i % static_cast<std::size_t>(config.folds));
        return fold;
    };
    const std::vector<int> pos_fold = fold_assignment(positives.size(), kStreamPosFolds);
    const std::vector<int> neg_fold = fold_assignment(negatives.size(), kStreamNegFolds);

    std::vector<std::vector<MethodFoldOutcome>> outcomes(
        static_cast<std::size_t>(config.folds),
        std::vector<MethodFoldOutcome>(methods.size()));
    parallel_for(static_cast<std::size_t>(config.folds), [&](std::size_t f) {
        try {
            const FoldData fold = make_fold(pair, positives, negatives, pos_fold, neg_fold,
                                            static_cast<int>(f), config);
            const std::uint64_t sample_seed =
                Rng(config.seed).derive(kStreamFoldSample + f).next_u64();
            const std::uint64_t train_seed =
                Rng(config.seed).derive(kStreamFoldTrain + f).next_u64();
            for (std::size_t m = 0; m < methods.size(); ++m)
                outcomes[f][m] =
                    run_method_on_fold(fold, methods[m], config, sample_seed, train_seed, n1, n2);
        } catch (const ConfigError& e) {
            throw ConfigError("fold " + std::to_string(f) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError("fold " + std::to_string(f) + ": " + e.what());
        } catch (const std::exception& e) {
            throw Error("fold " + std::to_string(f) + ": " + e.what());
        }
    });

    std::vector<ExperimentResult> results(methods.size());
    for (std::size_t m = 0; m < methods.size(); ++m) {
        ExperimentResult& r = results[m];
        r.method = methods[m];
        r.folds.reserve(static_cast<std::size_t>(config.folds));
        double acc = 0.0, f1 = 0.0, auc = 0.0;
        bool auc_defined = true;
        for (int f = 0; f < config.folds; ++f) {
            const MethodFoldOutcome& o = outcomes[static_cast<std::size_t>(f)][m];
            r.folds.push_back(o.metrics);
            r.matching_seconds += o.matching_seconds;
            acc += o.metrics.accuracy;
            f1 += o.metrics.f1;
            if (o.metrics.auc) auc += *o.metrics.auc;
            else auc_defined = false;
        }
        const double n = static_cast<double>(config.folds);
        r.mean.accuracy = acc / n;
        r.mean.f1 = f1 / n;
        if (auc_defined) r.mean.auc = auc / n;
    }
    return results;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    return run_experiment_methods(config, {config.method}).front();
}

const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::Theta: return "theta";
        case SweepAxis::Eta: return "eta";
        case SweepAxis::Sigma: return "sigma";
        case SweepAxis::K: return "k";
    }
    return "?";
}

SweepAxis parse_axis(const std::string& s) {
    if (s == "theta") return SweepAxis::Theta;
    if (s == "eta") return SweepAxis::Eta;
    if (s == "sigma") return SweepAxis::Sigma;
    if (s == "k") return SweepAxis::K;
    throw ConfigError("unknown sweep axis: '" + s + "' (theta, eta, sigma, k)");
}

namespace {

ExperimentConfig with_axis_value(const ExperimentConfig& base, SweepAxis axis, double value) {
    const auto as_integer = [&](const char* name) {
        if (std::abs(value - std::llround(value)) > 1e-9)
            throw ConfigError(std::string(name) + " sweep values must be integers");
        return std::llround(value);
    };
    ExperimentConfig cfg = base;
    switch (axis) {
        case SweepAxis::Theta: cfg.theta = static_cast<int>(as_integer("theta")); break;
        case SweepAxis::Eta: cfg.eta = value; break;
        case SweepAxis::Sigma: cfg.sigma = value; break;
        case SweepAxis::K: cfg.k = static_cast<std::uint32_t>(as_integer("k")); break;
    }
    return cfg;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt3(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace

SweepReport run_sweep(const SweepSpec& spec) {
    if (spec.values.empty()) throw ConfigError("sweep needs at least one value");
    if (spec.methods.empty()) throw ConfigError("sweep needs at least one method");
    if (spec.seeds.empty()) throw ConfigError("sweep needs at least one seed");

    SweepReport report;
    for (double value : spec.values) {
        try {
            std::vector<double> acc(spec.methods.size(), 0.0), f1(spec.methods.size(), 0.0),
                auc(spec.methods.size(), 0.0), secs(spec.methods.size(), 0.0);
            std::vector<bool> auc_defined(spec.methods.size(), true);
            for (std::uint64_t seed : spec.seeds) {
                ExperimentConfig cfg = with_axis_value(spec.base, spec.axis, value);
                cfg.seed = seed;
                const std::vector<ExperimentResult> results =
                    run_experiment_methods(cfg, spec.methods);
                for (std::size_t m = 0; m < spec.methods.size(); ++m) {
                    acc[m] += results[m].mean.accuracy;
                    f1[m] += results[m].mean.f1;
                    secs[m] += results[m].matching_seconds;
                    if (results[m].mean.auc) auc[m] += *results[m].mean.auc;
                    else auc_defined[m] = false;
                }
            }
            const double n = static_cast<double>(spec.seeds.size());
            for (std::size_t m = 0; m < spec.methods.size(); ++m) {
                SweepRow row;
                row.value = value;
                row.method = spec.methods[m];
                row.accuracy = acc[m] / n;
                row.f1 = f1[m] / n;
                if (auc_defined[m]) row.auc = auc[m] / n;
                row.matching_seconds = secs[m];
                report.rows.push_back(row);
            }
        } catch (const std::exception& e) {
            report.failures.emplace_back(value, e.what());
        }
    }
    return report;
}

void write_sweep_files(const SweepReport& report, const SweepSpec& spec,
                       const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string axis = to_string(spec.axis);
    {
        auto out = open_output(out_dir / ("sweep_" + axis + ".tsv"));
        out << "# base: theta=" << spec.base.theta << " eta=" << fmt6(spec.base.eta)
            << " sigma=" << fmt6(spec.base.sigma) << " k=" << spec.base.k << " seeds=";
        for (std::size_t i = 0; i < spec.seeds.size(); ++i)
            out << (i ? "," : "") << spec.seeds[i];
        out << '\n';
        out << axis << "\tmethod\taccuracy\tf1\tauc\n";
        for (const SweepRow& row : report.rows) {
            out << fmt6(row.value) << '\t' << to_string(row.method) << '\t'
                << fmt6(row.accuracy) << '\t' << fmt6(row.f1) << '\t'
                << (row.auc ? fmt6(*row.auc) : "na") << '\n';
        }
    }
    {
        auto out = open_output(out_dir / "summary.tsv");
        out << axis << "\tstatus\n";
        std::set<double> failed;
        for (const auto& [value, message] : report.failures) {
            failed.insert(value);
            out << fmt6(value) << '\t' << "error: " << message << '\n';
        }
        std::set<double> ok;
        for (const SweepRow& row : report.rows) ok.insert(row.value);
        for (double value : ok)
            if (!failed.count(value)) out << fmt6(value) << "\tok\n";
    }
    {
        // measured wall clock; not covered by byte-for-byte reproducibility
        auto out = open_output(out_dir / "timing.tsv");
        out << axis << "\tmethod\tmatching_ms\n";
        for (const SweepRow& row : report.rows)
            out << fmt6(row.value) << '\t' << to_string(row.method) << '\t'
                << fmt3(row.matching_seconds * 1000.0) << '\n';
    }
}

void write_experiment_file(const ExperimentResult& result, const ExperimentConfig& config,
                           const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "# method=" << to_string(result.method) << " theta=" << config.theta
        << " eta=" << fmt6(config.eta) << " sigma=" << fmt6(config.sigma) << " k=" << config.k
        << " seed=" << config.seed << '\n';
    out << "fold\taccuracy\tf1\tauc\n";
    for (std::size_t f = 0; f < result.folds.size(); ++f) {
        const Metrics& m = result.folds[f];
        out << f << '\t' << fmt6(m.accuracy) << '\t' << fmt6(m.f1) << '\t'
            << (m.auc ? fmt6(*m.auc) : "na") << '\n';
    }
    out << "mean\t" << fmt6(result.mean.accuracy) << '\t' << fmt6(result.mean.f1) << '\t'
        << (result.mean.auc ? fmt6(*result.mean.auc) : "na") << '\n';
}

}  // namespace pna
