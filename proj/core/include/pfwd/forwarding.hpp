#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "pfwd/random.hpp"
#include "pfwd/rgg.hpp"
#include "pfwd/stats.hpp"

namespace pfwd {

/// n coded packets, any k of which decode; relays forward with probability p.
struct ForwardingParams {
  int n_packets = 1;
  int k_decode = 1;
  double forward_prob = 1.0;

  void validate() const;
};

/// Which points count toward the success fraction.
/// kNone: all points. kGiant: only points in the largest component of the
/// full graph (numerator and denominator alike).
enum class Condition { kNone, kGiant };

struct PacketOutcome {
  std::vector<std::int32_t> transmitters;  // sorted
  std::vector<std::int32_t> receivers;     // sorted, includes transmitters
};

struct PacketCounts {
  std::size_t transmitters = 0;
  std::size_t receivers = 0;
};

struct ForwardingResult {
  std::vector<std::int32_t> receive_count;
  std::size_t successful_receivers = 0;
  std::size_t total_transmissions = 0;
  std::vector<PacketCounts> packet_counts;
  std::vector<PacketOutcome> per_packet;  // filled only on request
};

/// True when node `v` (not the source) decides to relay under `stream`.
/// Node v always consumes draw v of the stream, so the same stream gives
/// coupled decisions for every p.
inline bool relays(const CounterRng& stream, std::size_t v, double p) { return stream.uniform_at(v) < p; }

/// One packet from `source`: the source always transmits, every other node
/// relays on first reception with probability p. Transmitters are the
/// source's cluster among relaying nodes; receivers are that cluster plus
/// its neighbors.
PacketOutcome forward_one_packet(const Graph& graph, std::size_t source, double p, const CounterRng& stream);
PacketOutcome forward_one_packet(const Rgg& rgg, double p, const CounterRng& stream);

/// Mark-then-cluster form with explicit relay marks (one per node; the
/// source relays regardless). Transmitters are the source's cluster in the
/// subgraph of marked nodes, receivers its extended cluster.
PacketOutcome forward_marked(const Graph& graph, std::size_t source, std::span<const std::uint8_t> relay);

/// Packet j in 1..n uses stream (seed.master_seed, seed.trial_id, j);
/// seed.stream_id is ignored. The source holds all n packets.
ForwardingResult forward_n_packets(const Graph& graph, std::size_t source, const ForwardingParams& params,
                                   const SeedSpec& seed, bool keep_packets = false);
ForwardingResult forward_n_packets(const Rgg& rgg, const ForwardingParams& params, const SeedSpec& seed,
                                   bool keep_packets = false);

struct TrialsSpec {
  int graph_trials = 10;
  int fwd_trials = 20;
  unsigned workers = 1;

  void validate() const;
};

/// Points counted by `condition`: all points, or the largest component.
std::vector<std::uint8_t> counted_mask(const Graph& graph, Condition condition);

/// Expected fraction of counted points that receive at least k of n packets,
/// over graph_trials sampled graphs times fwd_trials forwardings each.
/// Graph g uses geometry seed (master, g, 0); forwarding f on it uses trial
/// id forwarding_trial_id(g, f).
Estimate success_fraction(const SimDomain& domain, const ForwardingParams& params, const TrialsSpec& trials,
                          std::uint64_t master_seed, Condition condition = Condition::kNone);

/// Per-node thresholds in p for a single packet under a fixed stream:
/// node v transmits iff transmit[v] < p and receives iff receive[v] < p.
/// The source has threshold -1 (always); nodes unreachable from the source
/// have +infinity. transmit[v] is the minimax relay draw over paths from the
/// source, so one pass describes the outcome for every p at once.
struct ReceptionThresholds {
  static constexpr double kAlways = -1.0;
  static constexpr double kNever = std::numeric_limits<double>::infinity();

  std::vector<double> transmit;
  std::vector<double> receive;
};

ReceptionThresholds reception_thresholds(const Graph& graph, std::size_t source, const CounterRng& stream);

}  // namespace pfwd
