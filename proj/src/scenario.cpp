#include "routesim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace routesim {

const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::Rip:
      return "rip";
    case Protocol::Ospf:
      return "ospf";
    case Protocol::Isis:
      return "isis";
    case Protocol::Eigrp:
      return "eigrp";
  }
  return "unknown";
}

std::optional<Protocol> protocol_from_name(const std::string& name) {
  for (Protocol p : kAllProtocols) {
    if (name == protocol_name(p)) return p;
  }
  return std::nullopt;
}

ParseError::ParseError(int line, const std::string& cause)
    : std::runtime_error("line " + std::to_string(line) + ": " + cause),
      line_(line),
      cause_(cause) {}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

std::int64_t parse_int(const std::string& tok, int line, const char* what) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, std::string("bad integer for ") + what + ": '" +
                               tok + "'");
  }
}

std::uint64_t parse_uint(const std::string& tok, int line, const char* what) {
  try {
    if (!tok.empty() && tok[0] == '-') throw std::invalid_argument("negative");
    std::size_t pos = 0;
    unsigned long long v = std::stoull(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, std::string("bad integer for ") + what + ": '" +
                               tok + "'");
  }
}

// Disjoint-set over switch ids, used to reject layer-2 loops.
class UnionFind {
 public:
  int find(NodeId x) {
    auto it = parent_.find(x);
    if (it == parent_.end()) {
      parent_[x] = x;
      return static_cast<int>(x);
    }
    if (it->second != x) it->second = find(it->second);
    return static_cast<int>(it->second);
  }
  // Returns false if the two were already connected.
  bool unite(NodeId a, NodeId b) {
    NodeId ra = find(a), rb = find(b);
    if (ra == rb) return false;
    parent_[ra] = rb;
    return true;
  }

 private:
  std::map<NodeId, NodeId> parent_;
};

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario s;
  enum class Section { None, General, Nodes, Links, Failures, Flows };
  Section section = Section::None;
  bool saw_general = false, saw_nodes = false, saw_links = false;

  // Line numbers for the semantic checks that run after the file is read.
  std::vector<int> node_lines, link_lines, failure_lines, flow_lines;
  int general_line = 0;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    auto toks = tokenize(line);
    if (toks.empty()) continue;

    if (toks[0].size() >= 2 && toks[0].front() == '[' &&
        toks[0].back() == ']') {
      if (toks.size() != 1) {
        throw ParseError(lineno, "unexpected tokens after section header");
      }
      const std::string name = toks[0].substr(1, toks[0].size() - 2);
      if (name == "general") {
        section = Section::General;
        saw_general = true;
        general_line = lineno;
      } else if (name == "nodes") {
        section = Section::Nodes;
        saw_nodes = true;
      } else if (name == "links") {
        section = Section::Links;
        saw_links = true;
      } else if (name == "failures") {
        section = Section::Failures;
      } else if (name == "flows") {
        section = Section::Flows;
      } else {
        throw ParseError(lineno, "unknown section [" + name + "]");
      }
      continue;
    }

    switch (section) {
      case Section::None:
        throw ParseError(lineno, "content before any section header");

      case Section::General:
        for (const auto& tok : toks) {
          auto eq = tok.find('=');
          if (eq == std::string::npos) {
            throw ParseError(lineno, "expected key=value, got '" + tok + "'");
          }
          const std::string key = tok.substr(0, eq);
          const std::string value = tok.substr(eq + 1);
          if (key == "name") {
            s.name = value;
          } else if (key == "duration_s") {
            s.duration_s = parse_int(value, lineno, "duration_s");
          } else if (key == "seed") {
            s.seed = parse_uint(value, lineno, "seed");
          } else if (key == "bucket_s") {
            s.bucket_s = parse_int(value, lineno, "bucket_s");
          } else if (key == "protocol") {
            auto p = protocol_from_name(value);
            if (!p) {
              throw ParseError(lineno, "unknown protocol '" + value + "'");
            }
            s.protocol = *p;
          } else {
            throw ParseError(lineno, "unknown key '" + key + "' in [general]");
          }
        }
        general_line = lineno;
        break;

      case Section::Nodes: {
        if (toks.size() != 2) {
          throw ParseError(lineno, "expected '<id> host|switch|router'");
        }
        ScenarioNode n;
        n.id = static_cast<NodeId>(parse_int(toks[0], lineno, "node id"));
        if (toks[1] == "host") {
          n.kind = NodeKind::Host;
        } else if (toks[1] == "switch") {
          n.kind = NodeKind::Switch;
        } else if (toks[1] == "router") {
          n.kind = NodeKind::Router;
        } else {
          throw ParseError(lineno, "unknown node kind '" + toks[1] + "'");
        }
        s.nodes.push_back(n);
        node_lines.push_back(lineno);
        break;
      }

      case Section::Links: {
        if (toks.size() != 4) {
          throw ParseError(lineno,
                           "expected '<idA> <idB> <bandwidth_bps> "
                           "<prop_delay_us>'");
        }
        ScenarioLink l;
        l.a = static_cast<NodeId>(parse_int(toks[0], lineno, "link endpoint"));
        l.b = static_cast<NodeId>(parse_int(toks[1], lineno, "link endpoint"));
        l.bandwidth_bps = parse_int(toks[2], lineno, "bandwidth_bps");
        l.prop_delay_us = parse_int(toks[3], lineno, "prop_delay_us");
        s.links.push_back(l);
        link_lines.push_back(lineno);
        break;
      }

      case Section::Failures: {
        if (toks.size() != 4) {
          throw ParseError(lineno,
                           "expected '<time_s> <idA> <idB> fail|recover'");
        }
        ScenarioFailure f;
        f.time_s = parse_int(toks[0], lineno, "time_s");
        f.a = static_cast<NodeId>(parse_int(toks[1], lineno, "link endpoint"));
        f.b = static_cast<NodeId>(parse_int(toks[2], lineno, "link endpoint"));
        if (toks[3] == "fail") {
          f.fail = true;
        } else if (toks[3] == "recover") {
          f.fail = false;
        } else {
          throw ParseError(lineno, "expected fail|recover, got '" + toks[3] +
                                       "'");
        }
        s.failures.push_back(f);
        failure_lines.push_back(lineno);
        break;
      }

      case Section::Flows: {
        if (toks.size() != 6) {
          throw ParseError(lineno,
                           "expected '<src> <dst> <start_s> <stop_s> "
                           "<rate_pps> <rate_bps>'");
        }
        ScenarioFlow f;
        f.src = static_cast<NodeId>(parse_int(toks[0], lineno, "flow src"));
        f.dst = static_cast<NodeId>(parse_int(toks[1], lineno, "flow dst"));
        f.start_s = parse_int(toks[2], lineno, "start_s");
        f.stop_s = parse_int(toks[3], lineno, "stop_s");
        f.rate_pps = parse_int(toks[4], lineno, "rate_pps");
        f.rate_bps = parse_int(toks[5], lineno, "rate_bps");
        s.flows.push_back(f);
        flow_lines.push_back(lineno);
        break;
      }
    }
  }

  if (!saw_general) throw ParseError(0, "missing [general] section");
  if (!saw_nodes) throw ParseError(0, "missing [nodes] section");
  if (!saw_links) throw ParseError(0, "missing [links] section");

  // ---- semantic validation -------------------------------------------------
  if (s.duration_s < 0) {
    throw ParseError(general_line, "duration_s must not be negative");
  }
  if (s.bucket_s <= 0) {
    throw ParseError(general_line, "bucket_s must be positive");
  }

  std::map<NodeId, NodeKind> kinds;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    if (!kinds.emplace(s.nodes[i].id, s.nodes[i].kind).second) {
      throw ParseError(node_lines[i], "duplicate node id " +
                                          std::to_string(s.nodes[i].id));
    }
  }

  std::set<std::pair<NodeId, NodeId>> seen_links;
  UnionFind switch_net;
  for (std::size_t i = 0; i < s.links.size(); ++i) {
    const auto& l = s.links[i];
    const int line = link_lines[i];
    auto ka = kinds.find(l.a);
    auto kb = kinds.find(l.b);
    if (ka == kinds.end() || kb == kinds.end()) {
      throw ParseError(line, "link references unknown node");
    }
    if (l.a == l.b) throw ParseError(line, "link endpoints must differ");
    if (l.bandwidth_bps <= 0) {
      throw ParseError(line, "bandwidth_bps must be positive");
    }
    if (l.prop_delay_us < 0) {
      throw ParseError(line, "prop_delay_us must not be negative");
    }
    auto key = std::minmax(l.a, l.b);
    if (!seen_links.insert({key.first, key.second}).second) {
      throw ParseError(line, "duplicate link " + std::to_string(l.a) + "-" +
                                 std::to_string(l.b));
    }
    if (ka->second == NodeKind::Switch && kb->second == NodeKind::Switch &&
        !switch_net.unite(l.a, l.b)) {
      throw ParseError(line, "layer-2 loop: switches " + std::to_string(l.a) +
                                 " and " + std::to_string(l.b) +
                                 " are already connected");
    }
  }

  for (std::size_t i = 0; i < s.failures.size(); ++i) {
    const auto& f = s.failures[i];
    const int line = failure_lines[i];
    auto key = std::minmax(f.a, f.b);
    if (!seen_links.count({key.first, key.second})) {
      throw ParseError(line, "failure references unknown link " +
                                 std::to_string(f.a) + "-" +
                                 std::to_string(f.b));
    }
    if (f.time_s < 0 || f.time_s >= s.duration_s) {
      throw ParseError(line, "failure time outside scenario duration");
    }
  }

  for (std::size_t i = 0; i < s.flows.size(); ++i) {
    const auto& f = s.flows[i];
    const int line = flow_lines[i];
    auto ks = kinds.find(f.src);
    auto kd = kinds.find(f.dst);
    if (ks == kinds.end() || kd == kinds.end()) {
      throw ParseError(line, "flow references unknown node");
    }
    if (ks->second != NodeKind::Host || kd->second != NodeKind::Host) {
      throw ParseError(line, "flow endpoints must be hosts");
    }
    if (f.src == f.dst) throw ParseError(line, "flow endpoints must differ");
    if (f.rate_pps <= 0 || f.rate_bps <= 0) {
      throw ParseError(line, "flow rates must be positive");
    }
    if (f.start_s < 0 || f.stop_s <= f.start_s) {
      throw ParseError(line, "flow must start at or after 0 and stop after "
                             "it starts");
    }
  }

  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open scenario file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "[general]\n";
  out << "name=" << s.name << "\n";
  out << "duration_s=" << s.duration_s << "\n";
  out << "seed=" << s.seed << "\n";
  out << "bucket_s=" << s.bucket_s << "\n";
  if (s.protocol) out << "protocol=" << protocol_name(*s.protocol) << "\n";

  out << "\n[nodes]\n";
  for (const auto& n : s.nodes) {
    const char* kind = n.kind == NodeKind::Host     ? "host"
                       : n.kind == NodeKind::Switch ? "switch"
                                                    : "router";
    out << n.id << " " << kind << "\n";
  }

  out << "\n[links]\n";
  for (const auto& l : s.links) {
    out << l.a << " " << l.b << " " << l.bandwidth_bps << " "
        << l.prop_delay_us << "\n";
  }

  if (!s.failures.empty()) {
    out << "\n[failures]\n";
    for (const auto& f : s.failures) {
      out << f.time_s << " " << f.a << " " << f.b << " "
          << (f.fail ? "fail" : "recover") << "\n";
    }
  }

  if (!s.flows.empty()) {
    out << "\n[flows]\n";
    for (const auto& f : s.flows) {
      out << f.src << " " << f.dst << " " << f.start_s << " " << f.stop_s
          << " " << f.rate_pps << " " << f.rate_bps << "\n";
    }
  }
  return out.str();
}

// ============================================================================
// Built-in scenarios
// ============================================================================
//
// Node ids: 1=PC1, 2=PC2, 3=SW1, 4=SW2, 5..10=R1..R6.
// Traffic normally crosses the single-router path PC1-SW1-R6-SW2-PC2; the
// five-router chain R1..R5 is the alternate path, and the schedule flaps its
// R1-R2 link.

namespace {

Scenario make_figure2() {
  constexpr std::int64_t kTenMbps = 10'000'000;
  Scenario s;
  s.name = "figure2";
  s.duration_s = 900;
  s.seed = 1;
  s.bucket_s = 1;
  s.protocol = Protocol::Rip;
  s.nodes = {
      {1, NodeKind::Host},   {2, NodeKind::Host},   {3, NodeKind::Switch},
      {4, NodeKind::Switch}, {5, NodeKind::Router}, {6, NodeKind::Router},
      {7, NodeKind::Router}, {8, NodeKind::Router}, {9, NodeKind::Router},
      {10, NodeKind::Router},
  };
  s.links = {
      {1, 3, kTenMbps, 5},   // PC1 - SW1
      {3, 10, kTenMbps, 5},  // SW1 - R6
      {3, 5, kTenMbps, 5},   // SW1 - R1
      {10, 4, kTenMbps, 5},  // R6 - SW2
      {4, 2, kTenMbps, 5},   // SW2 - PC2
      {4, 9, kTenMbps, 5},   // SW2 - R5
      {5, 6, kTenMbps, 5},   // R1 - R2 (the flapping link)
      {6, 7, kTenMbps, 5},   // R2 - R3
      {7, 8, kTenMbps, 5},   // R3 - R4
      {8, 9, kTenMbps, 5},   // R4 - R5
  };
  s.failures = {
      {225, 5, 6, true},  {400, 5, 6, false}, {535, 5, 6, true},
      {590, 5, 6, false}, {605, 5, 6, true},  {620, 5, 6, false},
      {625, 5, 6, true},  {630, 5, 6, false}, {730, 5, 6, true},
      {830, 5, 6, false},
  };
  s.flows = {{1, 2, 30, 900, 100, 120'000}};
  return s;
}

Scenario make_figure2_fastpath() {
  constexpr std::int64_t kHundredMbps = 100'000'000;
  Scenario s = make_figure2();
  s.name = "figure2_fastpath";
  s.failures.clear();
  // Upgrade every link of the alternate path: SW1-R1, the R1..R5 chain, and
  // R5-SW2.
  for (auto& l : s.links) {
    const bool touches_chain =
        (l.a == 3 && l.b == 5) || (l.a >= 5 && l.a <= 9 && l.b >= 5 &&
                                   l.b <= 9) ||
        (l.a == 4 && l.b == 9) || (l.a == 9 && l.b == 4);
    if (touches_chain) l.bandwidth_bps = kHundredMbps;
  }
  return s;
}

}  // namespace

std::vector<Scenario> reference_scenarios() {
  return {make_figure2(), make_figure2_fastpath()};
}

std::optional<Scenario> find_reference_scenario(const std::string& name) {
  for (auto& s : reference_scenarios()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

}  // namespace routesim
