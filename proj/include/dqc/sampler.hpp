#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dqc/frame.hpp"

namespace dqc {

/// Shot-major packed bit matrices of detector and observable outcomes.
struct ShotBatch {
    uint64_t shots = 0;
    uint32_t detector_count = 0;
    uint32_t observable_count = 0;
    std::vector<uint64_t> detector_bits;    // shots x ceil(det/64), row-major
    std::vector<uint64_t> observable_bits;  // shots x ceil(obs/64)

    uint32_t det_words() const { return (detector_count + 63) / 64; }
    uint32_t obs_words() const { return (observable_count + 63) / 64; }
    const uint64_t* det_row(uint64_t s) const { return detector_bits.data() + s * det_words(); }
    uint64_t* det_row(uint64_t s) { return detector_bits.data() + s * det_words(); }
    const uint64_t* obs_row(uint64_t s) const { return observable_bits.data() + s * obs_words(); }
    uint64_t* obs_row(uint64_t s) { return observable_bits.data() + s * obs_words(); }

    bool det_bit(uint64_t s, uint32_t d) const {
        return (det_row(s)[d >> 6] >> (d & 63)) & 1u;
    }
    bool obs_bit(uint64_t s, uint32_t o) const {
        return (obs_row(s)[o >> 6] >> (o & 63)) & 1u;
    }
    void resize(uint64_t n_shots, uint32_t dets, uint32_t obs) {
        shots = n_shots;
        detector_count = dets;
        observable_count = obs;
        detector_bits.assign(shots * det_words(), 0);
        observable_bits.assign(shots * obs_words(), 0);
    }
};

/// Counter-based uniform double in [0, 1) keyed by (seed, shot, stream).
/// Reproducible for a given key regardless of call order or threading.
double counter_uniform(uint64_t seed, uint64_t shot, uint64_t stream);
uint64_t counter_mix(uint64_t a, uint64_t b, uint64_t c);

/// Samples every noise channel exactly (bit flip: Bernoulli; depolarizing:
/// categorical over the non-identity Paulis) and XORs the precomputed flip
/// signatures of the realized components. Identical (seed, shot) give
/// identical outcomes independent of worker count.
ShotBatch sample(const CircuitProgram& program, const SignatureTable& table, uint64_t shots,
                 uint64_t seed, int workers = 1);

/// Convenience: builds the signature table internally.
ShotBatch sample(const CircuitProgram& program, uint64_t shots, uint64_t seed, int workers = 1);

/// Text batch dump: one line per shot, `D: <hex> L: <hex>`, detector 0 at the
/// least significant bit of the first hex digit group.
std::string dump_batch_hex(const ShotBatch& batch);
ShotBatch parse_batch_hex(const std::string& text);

/// Raw packed binary: header "DQB1" + u64 shots + u32 dets + u32 obs, then
/// shot-major rows (detector row then observable row per shot), detector 0 =
/// LSB of the first byte.
std::vector<uint8_t> dump_batch_binary(const ShotBatch& batch);
ShotBatch parse_batch_binary(const std::vector<uint8_t>& bytes);

}  // namespace dqc
