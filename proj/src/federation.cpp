#include "tfed/federation.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>

#include "tfed/errors.hpp"

namespace tfed::federation {

std::vector<std::size_t> Topology::neighbors(std::size_t node) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j)
        if (connected(node, j)) out.push_back(j);
    return out;
}

std::size_t Topology::edge_count() const {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (connected(i, j)) ++count;
    return count;
}

Topology build_topology(TopologyKind kind, std::size_t n, std::size_t hub) {
    Topology t;
    t.kind = kind;
    t.n = n;
    t.hub = hub;
    t.adjacency.assign(n * n, 0);
    auto link = [&](std::size_t a, std::size_t b) {
        t.adjacency[a * n + b] = 1;
        t.adjacency[b * n + a] = 1;
    };
    switch (kind) {
        case TopologyKind::Fully:
            if (n < 2) throw std::invalid_argument("fully topology needs n >= 2");
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) link(i, j);
            break;
        case TopologyKind::Ring:
            if (n < 3) throw std::invalid_argument("ring topology needs n >= 3");
            for (std::size_t i = 0; i < n; ++i) link(i, (i + 1) % n);
            break;
        case TopologyKind::Star:
            if (n < 2) throw std::invalid_argument("star topology needs n >= 2");
            if (hub >= n) throw std::invalid_argument("star hub id out of range");
            for (std::size_t i = 0; i < n; ++i)
                if (i != hub) link(hub, i);
            break;
    }
    return t;
}

std::vector<std::size_t> shortest_path(const Topology& topo, std::size_t from,
                                       std::size_t to) {
    if (from >= topo.n || to >= topo.n) throw std::invalid_argument("node id out of range");
    std::vector<std::size_t> parent(topo.n, topo.n);
    std::deque<std::size_t> queue{from};
    parent[from] = from;
    while (!queue.empty()) {
        const std::size_t cur = queue.front();
        queue.pop_front();
        if (cur == to) break;
        for (std::size_t nb : topo.neighbors(cur)) {  // ascending id => deterministic paths
            if (parent[nb] == topo.n) {
                parent[nb] = cur;
                queue.push_back(nb);
            }
        }
    }
    if (parent[to] == topo.n) throw std::invalid_argument("topology is not connected");
    std::vector<std::size_t> path{to};
    while (path.back() != from) path.push_back(parent[path.back()]);
    std::reverse(path.begin(), path.end());
    return path;
}

void TransportLedger::record(std::size_t round, std::size_t sender, std::size_t receiver,
                             std::size_t bytes) {
    records.push_back({round, sender, receiver, bytes});
}

std::size_t TransportLedger::total_sent(std::size_t participant) const {
    std::size_t total = 0;
    for (const auto& r : records)
        if (r.sender == participant) total += r.bytes;
    return total;
}

std::size_t TransportLedger::total_received(std::size_t participant) const {
    std::size_t total = 0;
    for (const auto& r : records)
        if (r.receiver == participant) total += r.bytes;
    return total;
}

std::size_t TransportLedger::total_bytes() const {
    std::size_t total = 0;
    for (const auto& r : records) total += r.bytes;
    return total;
}

model::ModelParameters fedavg(std::vector<WeightedModel> models) {
    if (models.empty()) throw std::invalid_argument("fedavg needs at least one model");
    std::sort(models.begin(), models.end(),
              [](const WeightedModel& a, const WeightedModel& b) {
                  return a.participant_id < b.participant_id;
              });
    double total = 0.0;
    for (const auto& m : models) total += static_cast<double>(m.sample_count);
    if (total == 0.0) throw std::invalid_argument("fedavg: all sample counts are zero");

    const auto& base = models.front().params;
    for (const auto& m : models) {
        if (m.params.tensors.size() != base.tensors.size())
            throw std::invalid_argument("fedavg: parameter shape mismatch");
        for (std::size_t i = 0; i < base.tensors.size(); ++i)
            if (m.params.tensors[i].size() != base.tensors[i].size())
                throw std::invalid_argument("fedavg: parameter shape mismatch");
    }

    // Weighted mean expressed as base + sum w_j * (p_j - base), so k identical
    // inputs reproduce themselves bit-exactly.
    model::ModelParameters out = base;
    for (std::size_t i = 0; i < out.tensors.size(); ++i) {
        auto& dst = out.tensors[i].data;
        for (std::size_t j = 0; j < models.size(); ++j) {
            const double w = static_cast<double>(models[j].sample_count) / total;
            const auto& src = models[j].params.tensors[i].data;
            const auto& b = base.tensors[i].data;
            for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += w * (src[k] - b[k]);
        }
    }
    return out;
}

namespace {

using Payload = std::vector<std::uint8_t>;

void train_all(FederationState& state) {
    for (Participant& p : state.participants) {
        if (!p.trains) continue;
        model::TrainConfig cfg = state.train_config;
        cfg.seed = p.seed;
        try {
            p.last_log = train_local(p.params, p.train, cfg);
        } catch (const std::exception& e) {
            throw std::runtime_error("participant " + std::to_string(p.id) +
                                     " training failed: " + e.what());
        }
    }
}

/// Sends `payload` along the shortest path from -> to, recording every hop.
void relay(FederationState& state, std::size_t round, std::size_t from, std::size_t to,
           const Payload& payload) {
    const auto path = shortest_path(state.topology, from, to);
    for (std::size_t h = 0; h + 1 < path.size(); ++h)
        state.ledger.record(round, path[h], path[h + 1], payload.size());
}

}  // namespace

void run_round_dfl(FederationState& state, std::size_t round_index) {
    train_all(state);
    const std::size_t n = state.participants.size();

    // Round barrier: all payloads are produced before anyone aggregates.
    std::vector<Payload> payloads(n);
    for (std::size_t i = 0; i < n; ++i) payloads[i] = serialize(state.participants[i].params);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : state.topology.neighbors(i))
            state.ledger.record(round_index, i, j, payloads[i].size());

    std::vector<model::ModelParameters> aggregated(n, model::ModelParameters{});
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<WeightedModel> inputs;
        const auto& cfg = state.participants[i].params.config;
        inputs.push_back({i, model::deserialize(payloads[i], cfg),
                          state.participants[i].train.windows});
        for (std::size_t j : state.topology.neighbors(i))
            inputs.push_back({j, model::deserialize(payloads[j], cfg),
                              state.participants[j].train.windows});
        aggregated[i] = fedavg(std::move(inputs));
    }
    for (std::size_t i = 0; i < n; ++i) state.participants[i].params = std::move(aggregated[i]);
}

void run_round_sdfl(FederationState& state, std::size_t round_index) {
    train_all(state);
    const std::size_t n = state.participants.size();
    const std::size_t aggregator = round_index % n;

    std::vector<Payload> payloads(n);
    for (std::size_t i = 0; i < n; ++i) payloads[i] = serialize(state.participants[i].params);

    const auto& cfg = state.participants[aggregator].params.config;
    std::vector<WeightedModel> inputs;
    inputs.push_back({aggregator, model::deserialize(payloads[aggregator], cfg),
                      state.participants[aggregator].train.windows});
    for (std::size_t i = 0; i < n; ++i) {
        if (i == aggregator) continue;
        relay(state, round_index, i, aggregator, payloads[i]);
        inputs.push_back({i, model::deserialize(payloads[i], cfg),
                          state.participants[i].train.windows});
    }
    model::ModelParameters global = fedavg(std::move(inputs));
    const Payload global_payload = serialize(global);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == aggregator) continue;
        relay(state, round_index, aggregator, i, global_payload);
    }
    const model::ModelParameters decoded = model::deserialize(global_payload, cfg);
    for (std::size_t i = 0; i < n; ++i) state.participants[i].params = decoded;
}

void run_round_cfl(FederationState& state, std::size_t round_index) {
    const std::size_t hub = state.topology.hub;
    if (state.topology.kind != TopologyKind::Star)
        throw ConfigError("CFL requires a star topology");
    train_all(state);
    const std::size_t n = state.participants.size();

    const auto& cfg = state.participants[hub == 0 ? (n > 1 ? 1 : 0) : 0].params.config;
    std::vector<WeightedModel> inputs;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == hub) continue;
        const Payload payload = serialize(state.participants[i].params);
        state.ledger.record(round_index, i, hub, payload.size());
        inputs.push_back({i, model::deserialize(payload, cfg),
                          state.participants[i].train.windows});
    }
    model::ModelParameters global = fedavg(std::move(inputs));
    const Payload broadcast = serialize(global);
    const model::ModelParameters decoded = model::deserialize(broadcast, cfg);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == hub) continue;
        state.ledger.record(round_index, hub, i, broadcast.size());
        state.participants[i].params = decoded;
    }
    state.participants[hub].params = decoded;  // hub keeps the global model
}

void run_round(FederationState& state, std::size_t round_index) {
    switch (state.paradigm) {
        case Paradigm::DFL: run_round_dfl(state, round_index); break;
        case Paradigm::SDFL: run_round_sdfl(state, round_index); break;
        case Paradigm::CFL: run_round_cfl(state, round_index); break;
    }
}

}  // namespace tfed::federation
