#include "pna/hetnet.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "pna/tsv.hpp"

namespace pna {

namespace {

constexpr std::array<LinkSchema, kLinkTagCount> kSchema = {{
    {NodeType::User, NodeType::User},      // Follow
    {NodeType::User, NodeType::Post},      // Write
    {NodeType::Post, NodeType::Word},      // Contain
    {NodeType::Post, NodeType::Timestamp}, // At
    {NodeType::Post, NodeType::Location},  // CheckinAt
    {NodeType::User, NodeType::List},      // Create
    {NodeType::List, NodeType::Location},  // ListContain
}};

constexpr std::array<const char*, kNodeTypeCount> kNodeTypeNames = {
    "user", "post", "word", "timestamp", "list", "location"};

constexpr std::array<const char*, kLinkTagCount> kLinkTagNames = {
    "follow", "write", "contain", "at", "checkin_at", "create", "list_contain"};

std::uint64_t edge_key(NodeId src, NodeId dst) {
    return (static_cast<std::uint64_t>(src) << 32) | dst;
}

}  // namespace

LinkSchema schema_of(LinkTag tag) { return kSchema[static_cast<std::size_t>(tag)]; }

const char* to_string(NodeType t) { return kNodeTypeNames[static_cast<std::size_t>(t)]; }
const char* to_string(LinkTag t) { return kLinkTagNames[static_cast<std::size_t>(t)]; }

NodeType parse_node_type(const std::string& s) {
    for (std::size_t i = 0; i < kNodeTypeCount; ++i)
        if (s == kNodeTypeNames[i]) return static_cast<NodeType>(i);
    throw DataError("unknown node type: '" + s + "'");
}

LinkTag parse_link_tag(const std::string& s) {
    for (std::size_t i = 0; i < kLinkTagCount; ++i)
        if (s == kLinkTagNames[i]) return static_cast<LinkTag>(i);
    throw DataError("unknown link tag: '" + s + "'");
}

std::size_t bridge_index(NodeType t) {
    for (std::size_t i = 0; i < kBridgeTypes.size(); ++i)
        if (kBridgeTypes[i] == t) return i;
    throw ConfigError(std::string("not a bridge node type: ") + to_string(t));
}

void HeterogeneousNetwork::set_node_count(NodeType type, std::uint32_t count) {
    node_counts_[static_cast<std::size_t>(type)] = count;
    if (type == NodeType::User) profiles_.resize(count);
}

void HeterogeneousNetwork::add_edge(LinkTag tag, NodeId src, NodeId dst) {
    const LinkSchema schema = kSchema[static_cast<std::size_t>(tag)];
    if (src >= node_count(schema.source))
        throw DataError(std::string("edge ") + to_string(tag) + ": source id " +
                        std::to_string(src) + " out of range for " + to_string(schema.source) +
                        " (count " + std::to_string(node_count(schema.source)) + ")");
    if (dst >= node_count(schema.target))
        throw DataError(std::string("edge ") + to_string(tag) + ": target id " +
                        std::to_string(dst) + " out of range for " + to_string(schema.target) +
                        " (count " + std::to_string(node_count(schema.target)) + ")");
    auto& keys = edge_keys_[static_cast<std::size_t>(tag)];
    if (!keys.insert(edge_key(src, dst)).second)
        throw DataError(std::string("duplicate ") + to_string(tag) + " edge (" +
                        std::to_string(src) + ", " + std::to_string(dst) + ")");
    edges_[static_cast<std::size_t>(tag)].emplace_back(src, dst);
}

bool HeterogeneousNetwork::has_edge(LinkTag tag, NodeId src, NodeId dst) const {
    return edge_keys_[static_cast<std::size_t>(tag)].count(edge_key(src, dst)) > 0;
}

void HeterogeneousNetwork::set_profile(NodeId user, UserProfile profile) {
    if (user >= user_count())
        throw DataError("profile user id " + std::to_string(user) + " out of range (count " +
                        std::to_string(user_count()) + ")");
    profiles_[user] = std::move(profile);
}

const UserProfile& HeterogeneousNetwork::profile(NodeId user) const {
    if (user >= user_count())
        throw DataError("profile lookup: user id " + std::to_string(user) + " out of range");
    return profiles_[user];
}

void HeterogeneousNetwork::finalize() {
    for (auto& e : edges_) std::sort(e.begin(), e.end());
}

bool HeterogeneousNetwork::operator==(const HeterogeneousNetwork& other) const {
    return node_counts_ == other.node_counts_ && edges_ == other.edges_ &&
           profiles_ == other.profiles_;
}

AlignedPair::AlignedPair(HeterogeneousNetwork g1, HeterogeneousNetwork g2,
                         std::vector<Edge> anchors, std::array<std::vector<Edge>, 3> bridges)
    : g1_(std::move(g1)), g2_(std::move(g2)), anchors_(std::move(anchors)),
      bridges_(std::move(bridges)) {
    std::set<NodeId> left, right;
    for (const auto& [u1, u2] : anchors_) {
        if (u1 >= g1_.user_count() || u2 >= g2_.user_count())
            throw DataError("anchor (" + std::to_string(u1) + ", " + std::to_string(u2) +
                            ") out of user range");
        if (!left.insert(u1).second)
            throw DataError("anchor set not injective: side-1 user " + std::to_string(u1) +
                            " appears twice");
        if (!right.insert(u2).second)
            throw DataError("anchor set not injective: side-2 user " + std::to_string(u2) +
                            " appears twice");
    }
    for (NodeType type : kBridgeTypes) {
        const auto& map = bridges_[bridge_index(type)];
        std::set<NodeId> dom, img;
        for (const auto& [a, b] : map) {
            if (a >= g1_.node_count(type) || b >= g2_.node_count(type))
                throw DataError(std::string("bridge ") + to_string(type) + " pair (" +
                                std::to_string(a) + ", " + std::to_string(b) + ") out of range");
            if (!dom.insert(a).second || !img.insert(b).second)
                throw DataError(std::string("bridge map for ") + to_string(type) +
                                " is not a bijection");
        }
    }
    std::sort(anchors_.begin(), anchors_.end());
    for (auto& b : bridges_) std::sort(b.begin(), b.end());
}

std::vector<NodeId> anchor_users(const AlignedPair& pair, int side) {
    if (side != 1 && side != 2) throw ConfigError("side must be 1 or 2");
    std::vector<NodeId> users;
    users.reserve(pair.anchors().size());
    for (const auto& [u1, u2] : pair.anchors()) users.push_back(side == 1 ? u1 : u2);
    std::sort(users.begin(), users.end());
    return users;
}

namespace {

std::vector<Edge> load_edge_list(const std::filesystem::path& file) {
    TsvReader reader(file);
    std::vector<Edge> out;
    std::vector<std::string> fields;
    while (reader.next_ws(fields)) {
        if (fields.size() != 2) reader.fail("expected 2 columns");
        std::int64_t a = parse_int(reader, fields[0]);
        std::int64_t b = parse_int(reader, fields[1]);
        if (a < 0 || b < 0) reader.fail("negative id");
        out.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
    }
    return out;
}

}  // namespace

HeterogeneousNetwork load_network(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    HeterogeneousNetwork net;

    const fs::path nodes_file = dir / "nodes.tsv";
    if (!fs::exists(nodes_file)) throw DataError("missing file: " + nodes_file.string());
    {
        TsvReader reader(nodes_file);
        std::vector<std::string> fields;
        while (reader.next_ws(fields)) {
            if (fields.size() != 2) reader.fail("expected 2 columns (type, count)");
            NodeType type = parse_node_type(fields[0]);
            std::int64_t count = parse_int(reader, fields[1]);
            if (count < 0) reader.fail("negative node count");
            net.set_node_count(type, static_cast<std::uint32_t>(count));
        }
    }

    for (std::size_t t = 0; t < kLinkTagCount; ++t) {
        const LinkTag tag = static_cast<LinkTag>(t);
        const fs::path file = dir / (std::string("edges_") + to_string(tag) + ".tsv");
        if (!fs::exists(file)) throw DataError("missing file: " + file.string());
        TsvReader reader(file);
        std::vector<std::string> fields;
        while (reader.next_ws(fields)) {
            if (fields.size() != 2) reader.fail("expected 2 columns (src, dst)");
            std::int64_t a = parse_int(reader, fields[0]);
            std::int64_t b = parse_int(reader, fields[1]);
            if (a < 0 || b < 0) reader.fail("negative id");
            try {
                net.add_edge(tag, static_cast<NodeId>(a), static_cast<NodeId>(b));
            } catch (const DataError& e) {
                reader.fail(e.what());
            }
        }
    }

    const fs::path profiles_file = dir / "profiles.tsv";
    if (!fs::exists(profiles_file)) throw DataError("missing file: " + profiles_file.string());
    {
        TsvReader reader(profiles_file);
        std::vector<std::string> fields;
        while (reader.next(fields)) {
            if (fields.size() != 3) reader.fail("expected 3 columns (user, username, hometown)");
            std::int64_t id = parse_int(reader, fields[0]);
            if (id < 0) reader.fail("negative user id");
            try {
                net.set_profile(static_cast<NodeId>(id), {fields[1], fields[2]});
            } catch (const DataError& e) {
                reader.fail(e.what());
            }
        }
    }

    net.finalize();
    return net;
}

void save_network(const HeterogeneousNetwork& net, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        auto out = open_output(dir / "nodes.tsv");
        for (std::size_t i = 0; i < kNodeTypeCount; ++i) {
            NodeType type = static_cast<NodeType>(i);
            out << to_string(type) << '\t' << net.node_count(type) << '\n';
        }
    }
    for (std::size_t t = 0; t < kLinkTagCount; ++t) {
        const LinkTag tag = static_cast<LinkTag>(t);
        auto out = open_output(dir / (std::string("edges_") + to_string(tag) + ".tsv"));
        std::vector<Edge> edges = net.edges(tag);
        std::sort(edges.begin(), edges.end());
        for (const auto& [a, b] : edges) out << a << '\t' << b << '\n';
    }
    {
        auto out = open_output(dir / "profiles.tsv");
        for (NodeId u = 0; u < net.user_count(); ++u) {
            const UserProfile& p = net.profile(u);
            if (p.empty()) continue;
            out << u << '\t' << p.username << '\t' << p.hometown << '\n';
        }
    }
}

AlignedPair load_aligned_pair(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    HeterogeneousNetwork g1 = load_network(dir / "g1");
    HeterogeneousNetwork g2 = load_network(dir / "g2");

    const fs::path anchors_file = dir / "anchors.tsv";
    if (!fs::exists(anchors_file)) throw DataError("missing file: " + anchors_file.string());
    std::vector<Edge> anchors = load_edge_list(anchors_file);

    std::array<std::vector<Edge>, 3> bridges;
    for (NodeType type : kBridgeTypes) {
        const fs::path file = dir / (std::string("bridge_") + to_string(type) + ".tsv");
        if (!fs::exists(file)) throw DataError("missing file: " + file.string());
        bridges[bridge_index(type)] = load_edge_list(file);
    }
    return AlignedPair(std::move(g1), std::move(g2), std::move(anchors), std::move(bridges));
}

void save_aligned_pair(const AlignedPair& pair, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    save_network(pair.g1(), dir / "g1");
    save_network(pair.g2(), dir / "g2");
    {
        auto out = open_output(dir / "anchors.tsv");
        for (const auto& [a, b] : pair.anchors()) out << a << '\t' << b << '\n';
    }
    for (NodeType type : kBridgeTypes) {
        auto out = open_output(dir / (std::string("bridge_") + to_string(type) + ".tsv"));
        for (const auto& [a, b] : pair.bridge(type)) out << a << '\t' << b << '\n';
    }
}

}  // namespace pna
