#pragma once

#include <cstdint>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tfed/dataset.hpp"
#include "tfed/model.hpp"

namespace tfed::federation {

enum class TopologyKind { Fully, Ring, Star };
enum class Paradigm { DFL, SDFL, CFL };

struct Topology {
    TopologyKind kind = TopologyKind::Fully;
    std::size_t n = 0;
    std::vector<std::uint8_t> adjacency;  // n * n, symmetric, no self-loops
    std::size_t hub = 0;                  // star only

    bool connected(std::size_t a, std::size_t b) const { return adjacency[a * n + b] != 0; }
    std::vector<std::size_t> neighbors(std::size_t node) const;
    std::size_t edge_count() const;
};

Topology build_topology(TopologyKind kind, std::size_t n, std::size_t hub = 0);

/// Deterministic shortest path (BFS, lowest-id tie break), endpoints included.
std::vector<std::size_t> shortest_path(const Topology& topo, std::size_t from,
                                       std::size_t to);

struct PayloadRecord {
    std::size_t round;
    std::size_t sender;
    std::size_t receiver;
    std::size_t bytes;
};

struct TransportLedger {
    std::vector<PayloadRecord> records;

    void record(std::size_t round, std::size_t sender, std::size_t receiver,
                std::size_t bytes);
    std::size_t total_sent(std::size_t participant) const;
    std::size_t total_received(std::size_t participant) const;
    std::size_t total_bytes() const;  // sum over records (= sum sent = sum received)
};

struct WeightedModel {
    std::size_t participant_id;
    model::ModelParameters params;
    std::size_t sample_count;
};

/// Sample-count-weighted elementwise mean. Inputs are re-sorted by ascending
/// participant id before reduction, so the result is independent of input
/// order; k identical models average to themselves bit-exactly.
model::ModelParameters fedavg(std::vector<WeightedModel> models);

struct Participant {
    std::size_t id = 0;
    WindowedDataset train;
    WindowedDataset validation;
    WindowedDataset test;
    model::ModelParameters params;
    std::uint64_t seed = 0;
    bool trains = true;  // false for a pure CFL hub
    model::TrainLog last_log;  // from the most recent round
};

struct FederationState {
    Paradigm paradigm = Paradigm::DFL;
    Topology topology;
    std::vector<Participant> participants;  // index == node id
    model::TrainConfig train_config;
    TransportLedger ledger;
};

/// One DFL round: everyone trains, sends its serialized model to every
/// neighbor, then aggregates {own model, received models} with fedavg.
void run_round_dfl(FederationState& state, std::size_t round_index);

/// One SDFL round: aggregator = round_index mod n; everyone trains; models
/// reach the aggregator via shortest-path relay (each hop in the ledger);
/// the aggregate returns along the same paths.
void run_round_sdfl(FederationState& state, std::size_t round_index);

/// One CFL round: every leaf trains and sends to the hub; the hub (no data,
/// no training) aggregates and broadcasts the global model back.
void run_round_cfl(FederationState& state, std::size_t round_index);

/// Dispatches on the configured paradigm.
void run_round(FederationState& state, std::size_t round_index);

}  // namespace tfed::federation
