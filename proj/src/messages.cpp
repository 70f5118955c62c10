#include "routesim/messages.hpp"

namespace routesim {

namespace {

struct SizeVisitor {
  int operator()(const HelloMsg&) const { return 480; }
  int operator()(const RipAdvert& m) const {
    return 192 + 160 * static_cast<int>(m.routes.size());
  }
  int operator()(const LspMsg& m) const {
    return 256 + 96 * static_cast<int>(m.lsp.links.size());
  }
  int operator()(const EigrpUpdate& m) const {
    return 256 + 128 * static_cast<int>(m.routes.size());
  }
  int operator()(const EigrpQuery&) const { return 256 + 128; }
  int operator()(const EigrpReply&) const { return 256 + 128; }
};

struct SenderVisitor {
  NodeId operator()(const HelloMsg& m) const { return m.sender; }
  NodeId operator()(const RipAdvert& m) const { return m.sender; }
  NodeId operator()(const LspMsg& m) const { return m.sender; }
  NodeId operator()(const EigrpUpdate& m) const { return m.sender; }
  NodeId operator()(const EigrpQuery& m) const { return m.sender; }
  NodeId operator()(const EigrpReply& m) const { return m.sender; }
};

}  // namespace

int message_size_bits(const ProtocolMessage& msg) {
  return std::visit(SizeVisitor{}, msg);
}

NodeId message_sender(const ProtocolMessage& msg) {
  return std::visit(SenderVisitor{}, msg);
}

}  // namespace routesim
