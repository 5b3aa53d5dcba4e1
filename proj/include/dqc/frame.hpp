#pragma once

#include <cstdint>
#include <vector>

#include "dqc/circuit.hpp"

namespace dqc {

/// One concrete Pauli component of a noise channel (e.g. the X (x) Z part of
/// a two-qubit depolarizing draw), with its probability.
struct PauliEvent {
    uint32_t instruction_index = 0;
    uint32_t channel_index = 0;              // index into the channel list
    std::vector<uint32_t> x_support;         // qubits acquiring an X flip
    std::vector<uint32_t> z_support;
    double prob = 0.0;
};

/// Detector/observable flips caused by one Pauli event.
struct FlipSignature {
    std::vector<uint32_t> detectors;
    std::vector<uint32_t> observables;

    bool empty() const { return detectors.empty() && observables.empty(); }
};

/// A noise channel: a contiguous run of components in the component table.
struct Channel {
    uint32_t instruction_index = 0;
    uint32_t first_component = 0;
    uint32_t component_count = 0;
};

/// All channel components of a program plus their precomputed signatures.
/// Signatures are computed in one bit-sliced pass: every component's frame is
/// propagated simultaneously, one bit lane per component.
struct SignatureTable {
    std::vector<Channel> channels;
    std::vector<PauliEvent> components;
    std::vector<FlipSignature> signatures;  // parallel to components
    uint32_t detector_count = 0;
    uint32_t observable_count = 0;
};

SignatureTable build_signature_table(const CircuitProgram& program);

/// Propagates a single Pauli event through the circuit (reference path for
/// tests and for signature spot checks).
FlipSignature propagate(const CircuitProgram& program, const PauliEvent& event);

/// Enumerates the channels/components of a program without signatures.
std::pair<std::vector<Channel>, std::vector<PauliEvent>> enumerate_components(
    const CircuitProgram& program);

}  // namespace dqc
