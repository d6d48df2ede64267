#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pna/error.hpp"

namespace pna {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

enum class NodeType : std::uint8_t { User, Post, Word, Timestamp, List, Location };
inline constexpr std::size_t kNodeTypeCount = 6;

// Each link tag joins exactly one ordered (source type, target type) pair.
enum class LinkTag : std::uint8_t {
    Follow,       // User -> User (directed)
    Write,        // User -> Post
    Contain,      // Post -> Word
    At,           // Post -> Timestamp
    CheckinAt,    // Post -> Location
    Create,       // User -> List
    ListContain,  // List -> Location
};
inline constexpr std::size_t kLinkTagCount = 7;

struct LinkSchema {
    NodeType source;
    NodeType target;
};

LinkSchema schema_of(LinkTag tag);
const char* to_string(NodeType t);
const char* to_string(LinkTag t);
NodeType parse_node_type(const std::string& s);
LinkTag parse_link_tag(const std::string& s);

struct NodeRef {
    NodeType type;
    NodeId id;
    friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

struct UserProfile {
    std::string username;
    std::string hometown;
    bool empty() const { return username.empty() && hometown.empty(); }
    friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

// Typed node tables plus typed directed edge sets of one social network.
// Mutation happens only while a network is being built (single-threaded);
// afterwards instances are treated as immutable and may be shared freely
// across threads.
class HeterogeneousNetwork {
public:
    void set_node_count(NodeType type, std::uint32_t count);
    std::uint32_t node_count(NodeType type) const {
        return node_counts_[static_cast<std::size_t>(type)];
    }
    std::uint32_t user_count() const { return node_count(NodeType::User); }

    // Validates endpoint types against the schema, bounds, and uniqueness.
    void add_edge(LinkTag tag, NodeId src, NodeId dst);
    bool has_edge(LinkTag tag, NodeId src, NodeId dst) const;
    const std::vector<Edge>& edges(LinkTag tag) const {
        return edges_[static_cast<std::size_t>(tag)];
    }

    void set_profile(NodeId user, UserProfile profile);
    const UserProfile& profile(NodeId user) const;

    // Sorted edge lists and profile table; call once after construction.
    void finalize();

    bool operator==(const HeterogeneousNetwork& other) const;

private:
    std::array<std::uint32_t, kNodeTypeCount> node_counts_{};
    std::array<std::vector<Edge>, kLinkTagCount> edges_;
    std::array<std::unordered_set<std::uint64_t>, kLinkTagCount> edge_keys_;
    std::vector<UserProfile> profiles_;
};

// Bridge node types shared between two networks, in fixed order.
inline constexpr std::array<NodeType, 3> kBridgeTypes = {NodeType::Word, NodeType::Timestamp,
                                                         NodeType::Location};
std::size_t bridge_index(NodeType t);

// Two networks, the known anchor links between their users, and the identity
// maps for shared non-user entities. Anchors form a partial injective map
// (one-to-one or fewer on both sides); bridge maps are bijections.
class AlignedPair {
public:
    AlignedPair(HeterogeneousNetwork g1, HeterogeneousNetwork g2, std::vector<Edge> anchors,
                std::array<std::vector<Edge>, 3> bridges);

    const HeterogeneousNetwork& g1() const { return g1_; }
    const HeterogeneousNetwork& g2() const { return g2_; }
    const std::vector<Edge>& anchors() const { return anchors_; }
    const std::vector<Edge>& bridge(NodeType type) const { return bridges_[bridge_index(type)]; }

private:
    HeterogeneousNetwork g1_;
    HeterogeneousNetwork g2_;
    std::vector<Edge> anchors_;
    std::array<std::vector<Edge>, 3> bridges_;
};

// User ids on one side of the anchor set (side 1 or 2), sorted ascending.
std::vector<NodeId> anchor_users(const AlignedPair& pair, int side);

// On-disk directory format: nodes.tsv, edges_<tag>.tsv per tag, profiles.tsv.
HeterogeneousNetwork load_network(const std::filesystem::path& dir);
void save_network(const HeterogeneousNetwork& net, const std::filesystem::path& dir);

// Pair directory: g1/ and g2/ network directories plus anchors.tsv and
// bridge_<type>.tsv for word, timestamp, location.
AlignedPair load_aligned_pair(const std::filesystem::path& dir);
void save_aligned_pair(const AlignedPair& pair, const std::filesystem::path& dir);

}  // namespace pna
