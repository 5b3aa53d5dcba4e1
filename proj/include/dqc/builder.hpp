#pragma once

#include "dqc/circuit.hpp"
#include "dqc/codes.hpp"

namespace dqc {

/// Idle depolarizing noise defaults on for BB codes, off for surface codes.
NoiseParams make_noise(const StabilizerCode& code, double p, double p_ebit);

/// One syndrome-extraction round for a standalone block at qubit offset 0
/// (records numbered from 0): ancilla resets, check CNOTs, ancilla
/// measurements, with noise per the model. In a basis-swapped round the
/// ancilla reset/measure bases and the CNOT directions are exchanged.
std::vector<Instruction> build_syndrome_round(const StabilizerCode& code, bool basis_swapped,
                                              const NoiseParams& noise);

/// Two blocks CB1 (control, node 0) and CB2 (target, node 1) joined by n
/// noisy ebits: 4 rounds, gate-teleported transversal CNOT, 3 rounds, final
/// Z readout of both blocks. Detectors on Z checks, one per round per block
/// plus a readout reconstruction layer per block; 2k observables.
CircuitProgram build_nonlocal_cnot_experiment(const StabilizerCode& code,
                                              const NoiseParams& noise);

/// Three blocks: CB1 holds the state (node 0), CB2 (node 0) and CB3 (node 1)
/// are entangled into logical Bell pairs via transversal H on CB2 and an
/// ebit-teleported CNOT; transversal Bell measurement of (CB1, CB2) with
/// per-qubit corrections teleports CB1 into CB3. k observables on CB3's
/// final Z readout.
CircuitProgram build_teleportation_experiment(const StabilizerCode& code,
                                              const NoiseParams& noise);

CircuitProgram build_experiment(const StabilizerCode& code, const std::string& kind,
                                const NoiseParams& noise);

}  // namespace dqc
