#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dqc {

enum class Op : uint8_t {
    RESET_Z,     // R q...
    RESET_X,     // RX q...
    MEASURE_Z,   // M q...
    MEASURE_X,   // MX q...
    H,           // H q...
    CNOT,        // CX q0 q1 q2 q3 ...
    PAULI_X,     // X q...
    PAULI_Z,     // Z q...
    COND_X,      // CX rec[-k] q
    COND_Z,      // CZ rec[-k] q
    BELL_INIT,   // BELL a b  (perfect Bell pair; counts as no gates)
    NOISE_X,     // X_ERROR(p) q...
    NOISE_Z,     // Z_ERROR(p) q...
    NOISE_DEP1,  // DEPOLARIZE1(p) q...
    NOISE_DEP2,  // DEPOLARIZE2(p) q0 q1 ...
    TICK,
    DETECTOR,    // DETECTOR rec[-a] rec[-b] ...
    OBSERVABLE,  // OBSERVABLE_INCLUDE(i) rec[-a] ...
};

struct Instruction {
    Op op;
    std::vector<uint32_t> qubits;
    std::vector<uint32_t> recs;  // absolute measurement-record indices
    double prob = 0.0;           // noise ops only
    uint32_t obs_index = 0;      // OBSERVABLE only
    bool final_readout = false;  // destructive data readout flag (measurements)

    bool is_measurement() const { return op == Op::MEASURE_Z || op == Op::MEASURE_X; }
    bool is_noise() const {
        return op == Op::NOISE_X || op == Op::NOISE_Z || op == Op::NOISE_DEP1 ||
               op == Op::NOISE_DEP2;
    }
};

struct NoiseParams {
    double p = 0.0;
    double p_ebit = 0.0;
    bool idle_enabled = false;  // idle depolarizing inside syndrome rounds (BB)
};

struct GateCensus {
    uint64_t oneq = 0;
    uint64_t twoq = 0;
    uint64_t meas_mid = 0;
    uint64_t meas_total = 0;
};

struct CircuitProgram {
    uint32_t qubit_count = 0;
    std::vector<Instruction> instructions;
    uint32_t measurement_count = 0;
    uint32_t detector_count = 0;
    uint32_t observable_count = 0;

    // metadata
    std::string code_name;
    std::string kind;  // "nonlocal-cnot" or "teleport"
    double p = 0.0;
    double p_ebit = 0.0;

    // node id per qubit (0/1), for locality checks of classical controls
    std::vector<uint8_t> node_of_qubit;

    void recount();
};

/// 1q = H + conditional Paulis (+ unconditional Paulis); 2q = CNOT pairs;
/// meas_mid excludes measurements flagged as the final data readout.
GateCensus census(const CircuitProgram& program);

std::string serialize(const CircuitProgram& program);

/// Parses the text format emitted by serialize (line oriented, Stim-like).
/// Throws std::invalid_argument with a line number on malformed input.
CircuitProgram parse(const std::string& text);

}  // namespace dqc
