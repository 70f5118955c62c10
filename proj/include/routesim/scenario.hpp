#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "routesim/kernel.hpp"
#include "routesim/types.hpp"

namespace routesim {

// ============================================================================
// Scenario description: what to simulate, read from / written to a small
// line-oriented sectioned text format.
// ============================================================================

enum class Protocol { Rip, Ospf, Isis, Eigrp };
inline constexpr std::array<Protocol, 4> kAllProtocols = {
    Protocol::Rip, Protocol::Ospf, Protocol::Isis, Protocol::Eigrp};

const char* protocol_name(Protocol p);
std::optional<Protocol> protocol_from_name(const std::string& name);

struct ScenarioNode {
  NodeId id = 0;
  NodeKind kind = NodeKind::Host;
  bool operator==(const ScenarioNode&) const = default;
};

struct ScenarioLink {
  NodeId a = 0;
  NodeId b = 0;
  std::int64_t bandwidth_bps = 0;
  std::int64_t prop_delay_us = 0;
  bool operator==(const ScenarioLink&) const = default;
};

struct ScenarioFailure {
  std::int64_t time_s = 0;
  NodeId a = 0;
  NodeId b = 0;
  bool fail = true;  // false: recover
  bool operator==(const ScenarioFailure&) const = default;
};

struct ScenarioFlow {
  NodeId src = 0;
  NodeId dst = 0;
  std::int64_t start_s = 0;
  std::int64_t stop_s = 0;
  std::int64_t rate_pps = 0;
  std::int64_t rate_bps = 0;
  bool operator==(const ScenarioFlow&) const = default;
};

struct Scenario {
  std::string name;
  std::int64_t duration_s = 0;
  std::uint64_t seed = 0;
  std::int64_t bucket_s = 1;
  std::optional<Protocol> protocol;
  std::vector<ScenarioNode> nodes;
  std::vector<ScenarioLink> links;
  std::vector<ScenarioFailure> failures;
  std::vector<ScenarioFlow> flows;
  bool operator==(const Scenario&) const = default;
};

// Raised for any syntactic or semantic problem in a scenario file; the line
// number is 1-based, 0 for file-level problems such as a missing section.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& cause);
  int line() const { return line_; }
  const std::string& cause() const { return cause_; }

 private:
  int line_;
  std::string cause_;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);
std::string serialize_scenario(const Scenario& s);

// Built-in scenarios reconstructing the reference experiments.
std::vector<Scenario> reference_scenarios();
std::optional<Scenario> find_reference_scenario(const std::string& name);

}  // namespace routesim
