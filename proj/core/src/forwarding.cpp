#include "pfwd/forwarding.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <utility>

#include "pfwd/parallel.hpp"

namespace pfwd {

void ForwardingParams::validate() const {
  if (n_packets < 1) throw std::invalid_argument("n must be at least 1");
  if (k_decode < 1 || k_decode > n_packets) throw std::invalid_argument("k must satisfy 1 <= k <= n");
  if (!(forward_prob >= 0.0 && forward_prob <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
}

void TrialsSpec::validate() const {
  if (graph_trials < 1) throw std::invalid_argument("graph_trials must be at least 1");
  if (fwd_trials < 1) throw std::invalid_argument("fwd_trials must be at least 1");
}

namespace {

enum : std::uint8_t { kUnseen = 0, kReceived = 1, kTransmitted = 2 };

// Flood from the source through relaying nodes. state[v] ends as kUnseen,
// kReceived (heard, did not relay) or kTransmitted. Returns visit order of
// every reached node in `order`.
void flood(const Graph& graph, std::size_t source, double p, const CounterRng& stream,
           std::vector<std::uint8_t>& state, std::vector<std::int32_t>& order) {
  state.assign(graph.size(), kUnseen);
  order.clear();
  state[source] = kTransmitted;
  order.push_back(static_cast<std::int32_t>(source));
  // Transmitters are appended to `order` as they are discovered and scanned in
  // that order; plain receivers are appended too but never scanned.
  std::vector<std::int32_t> frontier{static_cast<std::int32_t>(source)};
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    for (auto w : graph.neighbors(frontier[head])) {
      if (state[w] != kUnseen) continue;
      order.push_back(w);
      if (relays(stream, w, p)) {
        state[w] = kTransmitted;
        frontier.push_back(w);
      } else {
        state[w] = kReceived;
      }
    }
  }
}

}  // namespace

PacketOutcome forward_one_packet(const Graph& graph, std::size_t source, double p, const CounterRng& stream) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (source >= graph.size()) throw std::invalid_argument("source out of range");
  std::vector<std::uint8_t> state;
  std::vector<std::int32_t> order;
  flood(graph, source, p, stream, state, order);

  PacketOutcome out;
  out.receivers = order;
  std::sort(out.receivers.begin(), out.receivers.end());
  for (auto v : out.receivers) {
    if (state[v] == kTransmitted) out.transmitters.push_back(v);
  }
  return out;
}

PacketOutcome forward_one_packet(const Rgg& rgg, double p, const CounterRng& stream) {
  return forward_one_packet(rgg.graph, rgg.source(), p, stream);
}

PacketOutcome forward_marked(const Graph& graph, std::size_t source, std::span<const std::uint8_t> relay) {
  if (source >= graph.size()) throw std::invalid_argument("source out of range");
  if (relay.size() != graph.size()) throw std::invalid_argument("mark vector length must equal vertex count");
  std::vector<std::uint8_t> active(relay.begin(), relay.end());
  active[source] = 1;
  const ClusterLabeling labeling = components(graph, active);
  const std::int32_t id = labeling.label[source];

  PacketOutcome out;
  for (std::size_t v = 0; v < graph.size(); ++v) {
    if (labeling.label[v] == id) out.transmitters.push_back(static_cast<std::int32_t>(v));
  }
  out.receivers = extended_cluster(graph, labeling, id);
  return out;
}

ForwardingResult forward_n_packets(const Graph& graph, std::size_t source, const ForwardingParams& params,
                                   const SeedSpec& seed, bool keep_packets) {
  params.validate();
  if (source >= graph.size()) throw std::invalid_argument("source out of range");

  ForwardingResult result;
  result.receive_count.assign(graph.size(), 0);
  result.packet_counts.reserve(params.n_packets);

  std::vector<std::uint8_t> state;
  std::vector<std::int32_t> order;
  for (int j = 1; j <= params.n_packets; ++j) {
    const CounterRng stream = derive_stream({seed.master_seed, seed.trial_id, static_cast<std::uint64_t>(j)});
    flood(graph, source, params.forward_prob, stream, state, order);

    PacketCounts counts;
    counts.receivers = order.size();
    for (auto v : order) {
      ++result.receive_count[v];
      if (state[v] == kTransmitted) ++counts.transmitters;
    }
    result.total_transmissions += counts.transmitters;
    result.packet_counts.push_back(counts);

    if (keep_packets) {
      PacketOutcome outcome;
      outcome.receivers = order;
      std::sort(outcome.receivers.begin(), outcome.receivers.end());
      for (auto v : outcome.receivers) {
        if (state[v] == kTransmitted) outcome.transmitters.push_back(v);
      }
      result.per_packet.push_back(std::move(outcome));
    }
  }

  for (auto c : result.receive_count) {
    if (c >= params.k_decode) ++result.successful_receivers;
  }
  return result;
}

ForwardingResult forward_n_packets(const Rgg& rgg, const ForwardingParams& params, const SeedSpec& seed,
                                   bool keep_packets) {
  return forward_n_packets(rgg.graph, rgg.source(), params, seed, keep_packets);
}

std::vector<std::uint8_t> counted_mask(const Graph& graph, Condition condition) {
  std::vector<std::uint8_t> mask(graph.size(), 1);
  if (condition == Condition::kGiant) {
    const ClusterLabeling labels = components(graph);
    for (std::size_t v = 0; v < graph.size(); ++v) mask[v] = labels.label[v] == labels.largest_id ? 1 : 0;
  }
  return mask;
}

Estimate success_fraction(const SimDomain& domain, const ForwardingParams& params, const TrialsSpec& trials,
                          std::uint64_t master_seed, Condition condition) {
  domain.validate();
  params.validate();
  trials.validate();

  const auto per_graph = parallel_map<GroupSums>(
      static_cast<std::size_t>(trials.graph_trials), trials.workers, [&](std::size_t g) {
        const Rgg rgg = build_rgg(sample_ppp(domain, {master_seed, g, 0}));
        const auto mask = counted_mask(rgg.graph, condition);
        const auto denom = static_cast<double>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
        GroupSums sums;
        for (int f = 0; f < trials.fwd_trials; ++f) {
          const auto res = forward_n_packets(rgg, params, {master_seed, forwarding_trial_id(g, f), 0});
          std::size_t hits = 0;
          for (std::size_t v = 0; v < rgg.size(); ++v) {
            if (mask[v] && res.receive_count[v] >= params.k_decode) ++hits;
          }
          sums.add(static_cast<double>(hits) / denom);
        }
        return sums;
      });
  return nested_estimate(per_graph);
}

ReceptionThresholds reception_thresholds(const Graph& graph, std::size_t source, const CounterRng& stream) {
  if (source >= graph.size()) throw std::invalid_argument("source out of range");
  const std::size_t n = graph.size();
  ReceptionThresholds out;
  out.transmit.assign(n, ReceptionThresholds::kNever);

  // A node's minimax threshold is max(level at which a neighbor settles, its
  // own draw). Draws at or below the current level settle immediately by
  // flooding; larger draws wait in a heap keyed by the draw itself, so every
  // node is queued at most once.
  enum : std::uint8_t { kUnseen = 0, kQueued = 1, kSettled = 2 };
  std::vector<std::uint8_t> state(n, kUnseen);
  using Item = std::pair<double, std::int32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<std::int32_t> stack;

  auto settle_from = [&](std::int32_t start, double level) {
    out.transmit[start] = level;
    state[start] = kSettled;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::int32_t v = stack.back();
      stack.pop_back();
      for (auto w : graph.neighbors(v)) {
        if (state[w] != kUnseen) continue;
        const double u = stream.uniform_at(static_cast<std::size_t>(w));
        if (u <= level) {
          out.transmit[w] = level;
          state[w] = kSettled;
          stack.push_back(w);
        } else {
          state[w] = kQueued;
          heap.emplace(u, w);
        }
      }
    }
  };

  settle_from(static_cast<std::int32_t>(source), ReceptionThresholds::kAlways);
  while (!heap.empty()) {
    const auto [u, v] = heap.top();
    heap.pop();
    settle_from(v, u);
  }

  out.receive = out.transmit;
  for (std::size_t v = 0; v < n; ++v) {
    for (auto w : graph.neighbors(v)) out.receive[v] = std::min(out.receive[v], out.transmit[w]);
  }
  return out;
}

}  // namespace pfwd
