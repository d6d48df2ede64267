#include <doctest.h>

#include <set>

#include "pna/hetnet.hpp"
#include "pna/rng.hpp"
#include "test_util.hpp"

using namespace pna;

namespace {

// network directory with all required files; edge files default to empty
void write_network_dir(const std::filesystem::path& dir, const std::string& nodes,
                       const std::string& follow = "", const std::string& write = "",
                       const std::string& profiles = "") {
    std::filesystem::create_directories(dir);
    write_file(dir / "nodes.tsv", nodes);
    write_file(dir / "edges_follow.tsv", follow);
    write_file(dir / "edges_write.tsv", write);
    for (const char* name : {"edges_contain.tsv", "edges_at.tsv", "edges_checkin_at.tsv",
                             "edges_create.tsv", "edges_list_contain.tsv"})
        write_file(dir / name, "");
    write_file(dir / "profiles.tsv", profiles);
}

HeterogeneousNetwork random_network(Rng& rng, std::uint32_t users) {
    HeterogeneousNetwork net;
    net.set_node_count(NodeType::User, users);
    net.set_node_count(NodeType::Post, users * 2);
    net.set_node_count(NodeType::Word, 20);
    net.set_node_count(NodeType::Timestamp, 10);
    net.set_node_count(NodeType::Location, 12);
    net.set_node_count(NodeType::List, 5);
    for (std::uint32_t i = 0; i < users * 3; ++i) {
        const NodeId a = static_cast<NodeId>(rng.uniform(users));
        const NodeId b = static_cast<NodeId>(rng.uniform(users));
        if (a != b && !net.has_edge(LinkTag::Follow, a, b)) net.add_edge(LinkTag::Follow, a, b);
    }
    for (std::uint32_t p = 0; p < users * 2; ++p) {
        net.add_edge(LinkTag::Write, static_cast<NodeId>(rng.uniform(users)), p);
        net.add_edge(LinkTag::At, p, static_cast<NodeId>(rng.uniform(10)));
        if (rng.bernoulli(0.7))
            net.add_edge(LinkTag::CheckinAt, p, static_cast<NodeId>(rng.uniform(12)));
        net.add_edge(LinkTag::Contain, p, static_cast<NodeId>(rng.uniform(20)));
    }
    for (NodeId l = 0; l < 5; ++l) {
        net.add_edge(LinkTag::Create, static_cast<NodeId>(rng.uniform(users)), l);
        net.add_edge(LinkTag::ListContain, l, static_cast<NodeId>(rng.uniform(12)));
    }
    for (NodeId u = 0; u < users; ++u)
        if (rng.bernoulli(0.8))
            net.set_profile(u, {"user" + std::to_string(u), "town " + std::to_string(u % 4)});
    net.finalize();
    return net;
}

}  // namespace

TEST_CASE("schema table fixes endpoint types per tag") {
    CHECK(schema_of(LinkTag::Follow).source == NodeType::User);
    CHECK(schema_of(LinkTag::Follow).target == NodeType::User);
    CHECK(schema_of(LinkTag::Write).target == NodeType::Post);
    CHECK(schema_of(LinkTag::CheckinAt).source == NodeType::Post);
    CHECK(schema_of(LinkTag::CheckinAt).target == NodeType::Location);
    CHECK(schema_of(LinkTag::ListContain).source == NodeType::List);
}

TEST_CASE("load_network: empty edge files") {
    TempDir tmp;
    write_network_dir(tmp.path, "user\t3\n");
    const HeterogeneousNetwork net = load_network(tmp.path);
    CHECK(net.node_count(NodeType::User) == 3);
    for (std::size_t t = 0; t < kLinkTagCount; ++t)
        CHECK(net.edges(static_cast<LinkTag>(t)).empty());
}

TEST_CASE("load_network: single follow edge") {
    TempDir tmp;
    write_network_dir(tmp.path, "user\t2\n", "0\t1\n");
    const HeterogeneousNetwork net = load_network(tmp.path);
    REQUIRE(net.edges(LinkTag::Follow).size() == 1);
    CHECK(net.edges(LinkTag::Follow)[0] == Edge{0, 1});
    CHECK(net.has_edge(LinkTag::Follow, 0, 1));
    CHECK_FALSE(net.has_edge(LinkTag::Follow, 1, 0));
}

TEST_CASE("load_network: out-of-range id names the line") {
    TempDir tmp;
    write_network_dir(tmp.path, "user\t2\n", "# comment\n0\t9\n");
    try {
        load_network(tmp.path);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("out of range") != std::string::npos);
        CHECK(msg.find("edges_follow.tsv:2") != std::string::npos);
    }
}

TEST_CASE("load_network: schema violation through a write edge") {
    TempDir tmp;
    write_network_dir(tmp.path, "user\t2\npost\t1\n", "", "0\t5\n");
    CHECK_THROWS_AS(load_network(tmp.path), DataError);
}

TEST_CASE("load_network: duplicate edge rejected") {
    TempDir tmp;
    write_network_dir(tmp.path, "user\t2\n", "0\t1\n0\t1\n");
    try {
        load_network(tmp.path);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
    }
}

TEST_CASE("load_network: missing file names the file") {
    TempDir tmp;
    write_network_dir(tmp.path, "user\t1\n");
    std::filesystem::remove(tmp.path / "edges_at.tsv");
    try {
        load_network(tmp.path);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("edges_at.tsv") != std::string::npos);
    }
}

TEST_CASE("load_network: profile user id out of range") {
    TempDir tmp;
    write_network_dir(tmp.path, "user\t1\n", "", "", "7\talice\tparis\n");
    CHECK_THROWS_AS(load_network(tmp.path), DataError);
}

TEST_CASE("network save/load round-trip") {
    Rng rng(20240817);
    for (int trial = 0; trial < 5; ++trial) {
        const HeterogeneousNetwork net = random_network(rng, 12 + 3 * trial);
        TempDir tmp;
        save_network(net, tmp.path);
        const HeterogeneousNetwork back = load_network(tmp.path);
        CHECK(back == net);
    }
}

TEST_CASE("aligned pair save/load round-trip with bridges") {
    Rng rng(7);
    HeterogeneousNetwork g1 = random_network(rng, 10);
    HeterogeneousNetwork g2 = random_network(rng, 8);
    std::vector<Edge> anchors = {{0, 3}, {2, 1}, {5, 7}};
    std::array<std::vector<Edge>, 3> bridges;
    bridges[bridge_index(NodeType::Word)] = {{0, 1}, {1, 0}, {2, 2}};
    bridges[bridge_index(NodeType::Timestamp)] = {{0, 0}};
    bridges[bridge_index(NodeType::Location)] = {{3, 4}, {4, 3}};
    const AlignedPair pair(g1, g2, anchors, bridges);

    TempDir tmp;
    save_aligned_pair(pair, tmp.path);
    const AlignedPair back = load_aligned_pair(tmp.path);
    CHECK(back.g1() == pair.g1());
    CHECK(back.g2() == pair.g2());
    CHECK(back.anchors() == pair.anchors());
    for (NodeType t : kBridgeTypes) CHECK(back.bridge(t) == pair.bridge(t));
}

TEST_CASE("anchor_users projections") {
    Rng rng(11);
    HeterogeneousNetwork g1 = random_network(rng, 6);
    HeterogeneousNetwork g2 = random_network(rng, 6);

    SUBCASE("no anchors: isolated networks") {
        const AlignedPair pair(g1, g2, {}, {});
        CHECK(anchor_users(pair, 1).empty());
        CHECK(anchor_users(pair, 2).empty());
    }
    SUBCASE("direct projection") {
        const AlignedPair pair(g1, g2, {{0, 5}, {2, 1}}, {});
        CHECK(anchor_users(pair, 1) == std::vector<NodeId>{0, 2});
        CHECK(anchor_users(pair, 2) == std::vector<NodeId>{1, 5});
    }
    SUBCASE("full alignment covers every user") {
        std::vector<Edge> anchors;
        for (NodeId u = 0; u < 6; ++u) anchors.push_back({u, 5 - u});
        const AlignedPair pair(g1, g2, anchors, {});
        CHECK(anchor_users(pair, 1) == std::vector<NodeId>{0, 1, 2, 3, 4, 5});
        CHECK(anchor_users(pair, 2) == std::vector<NodeId>{0, 1, 2, 3, 4, 5});
    }
    SUBCASE("anchor users and non-anchor complement partition the user set") {
        const AlignedPair pair(g1, g2, {{1, 1}, {4, 0}}, {});
        const auto side1 = anchor_users(pair, 1);
        std::set<NodeId> seen(side1.begin(), side1.end());
        std::size_t complement = 0;
        for (NodeId u = 0; u < 6; ++u)
            if (!seen.count(u)) ++complement;
        CHECK(side1.size() + complement == 6);
    }
}

TEST_CASE("aligned pair construction rejects bad inputs") {
    Rng rng(13);
    HeterogeneousNetwork g1 = random_network(rng, 4);
    HeterogeneousNetwork g2 = random_network(rng, 4);

    SUBCASE("duplicate side-1 user") {
        CHECK_THROWS_AS(AlignedPair(g1, g2, {{0, 1}, {0, 2}}, {}), DataError);
    }
    SUBCASE("duplicate side-2 user") {
        CHECK_THROWS_AS(AlignedPair(g1, g2, {{0, 1}, {2, 1}}, {}), DataError);
    }
    SUBCASE("anchor out of range") {
        CHECK_THROWS_AS(AlignedPair(g1, g2, {{9, 0}}, {}), DataError);
    }
    SUBCASE("bridge map must be a bijection") {
        std::array<std::vector<Edge>, 3> bridges;
        bridges[bridge_index(NodeType::Word)] = {{0, 1}, {0, 2}};
        CHECK_THROWS_AS(AlignedPair(g1, g2, {}, bridges), DataError);
    }
}
