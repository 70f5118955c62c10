#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "routesim/types.hpp"

namespace routesim {

// ============================================================================
// Control-plane message payloads.  These travel through the same link model
// as data packets, so each variant has a documented wire size used for
// serialization-delay and overhead accounting.
// ============================================================================

// Neighbor-discovery hello.  `seen` lists the senders heard recently on the
// emitting interface, which gives receivers two-way-visibility confirmation.
struct HelloMsg {
  NodeId sender = 0;
  std::vector<NodeId> seen;
};

struct RipRoute {
  NodeId dest = 0;
  int metric = 0;  // 1..16, 16 = unreachable
};

struct RipAdvert {
  NodeId sender = 0;
  std::vector<RipRoute> routes;
};

struct LspLink {
  NodeId neighbor = 0;
  Cost cost = 0;
};

// Sequence-numbered link-state packet.
struct Lsp {
  NodeId origin = 0;
  std::int64_t seq = 0;  // starts at 1, strictly increases per origin
  std::vector<LspLink> links;
  std::int64_t age_created_s = 0;
};

struct LspMsg {
  NodeId sender = 0;  // the router transmitting this copy (not the origin)
  Lsp lsp;
};

struct EigrpRoute {
  NodeId dest = 0;
  Cost reported_distance = 0;
};

struct EigrpUpdate {
  NodeId sender = 0;
  std::vector<EigrpRoute> routes;
};

struct EigrpQuery {
  NodeId sender = 0;
  NodeId dest = 0;
  Cost reported_distance = 0;
};

struct EigrpReply {
  NodeId sender = 0;
  NodeId dest = 0;
  Cost reported_distance = 0;
};

using ProtocolMessage = std::variant<HelloMsg, RipAdvert, LspMsg, EigrpUpdate,
                                     EigrpQuery, EigrpReply>;

// Wire size in bits: hello 480; RIP 192 header + 160 per route; LSP 256 +
// 96 per link entry; EIGRP update/query/reply 256 + 128 per route.
int message_size_bits(const ProtocolMessage& msg);

// The router that transmitted the message.
NodeId message_sender(const ProtocolMessage& msg);

}  // namespace routesim
