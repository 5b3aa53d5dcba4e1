#include "dqc/frame.hpp"

#include <stdexcept>

namespace dqc {

std::pair<std::vector<Channel>, std::vector<PauliEvent>> enumerate_components(
    const CircuitProgram& program) {
    std::vector<Channel> channels;
    std::vector<PauliEvent> comps;
    for (uint32_t idx = 0; idx < program.instructions.size(); idx++) {
        const Instruction& ins = program.instructions[idx];
        if (!ins.is_noise() || ins.prob <= 0.0) {
            continue;
        }
        auto add_channel = [&](std::vector<PauliEvent> parts) {
            Channel ch;
            ch.instruction_index = idx;
            ch.first_component = uint32_t(comps.size());
            ch.component_count = uint32_t(parts.size());
            for (auto& p : parts) {
                p.instruction_index = idx;
                p.channel_index = uint32_t(channels.size());
                comps.push_back(std::move(p));
            }
            channels.push_back(ch);
        };
        switch (ins.op) {
            case Op::NOISE_X:
                for (uint32_t q : ins.qubits) {
                    add_channel({PauliEvent{0, 0, {q}, {}, ins.prob}});
                }
                break;
            case Op::NOISE_Z:
                for (uint32_t q : ins.qubits) {
                    add_channel({PauliEvent{0, 0, {}, {q}, ins.prob}});
                }
                break;
            case Op::NOISE_DEP1:
                for (uint32_t q : ins.qubits) {
                    double p3 = ins.prob / 3.0;
                    add_channel({PauliEvent{0, 0, {q}, {}, p3},     // X
                                 PauliEvent{0, 0, {q}, {q}, p3},    // Y
                                 PauliEvent{0, 0, {}, {q}, p3}});   // Z
                }
                break;
            case Op::NOISE_DEP2:
                for (size_t i = 0; i + 1 < ins.qubits.size(); i += 2) {
                    uint32_t a = ins.qubits[i], b = ins.qubits[i + 1];
                    double p15 = ins.prob / 15.0;
                    std::vector<PauliEvent> parts;
                    for (int pa = 0; pa < 4; pa++) {
                        for (int pb = 0; pb < 4; pb++) {
                            if (pa == 0 && pb == 0) {
                                continue;
                            }
                            PauliEvent ev;
                            ev.prob = p15;
                            if (pa & 1) {
                                ev.x_support.push_back(a);
                            }
                            if (pa & 2) {
                                ev.z_support.push_back(a);
                            }
                            if (pb & 1) {
                                ev.x_support.push_back(b);
                            }
                            if (pb & 2) {
                                ev.z_support.push_back(b);
                            }
                            parts.push_back(std::move(ev));
                        }
                    }
                    add_channel(std::move(parts));
                }
                break;
            default:
                break;
        }
    }
    return {std::move(channels), std::move(comps)};
}

namespace {

// Bit-sliced Pauli frame over L lanes: per qubit, packed X and Z flip masks.
class LaneFrames {
  public:
    LaneFrames(uint32_t qubits, uint32_t lanes)
        : words_((lanes + 63) / 64), x_(size_t(qubits) * words_, 0),
          z_(size_t(qubits) * words_, 0) {}

    uint64_t* x(uint32_t q) { return x_.data() + size_t(q) * words_; }
    uint64_t* z(uint32_t q) { return z_.data() + size_t(q) * words_; }
    uint32_t words() const { return uint32_t(words_); }

    void clear(uint32_t q) {
        uint64_t* px = x(q);
        uint64_t* pz = z(q);
        for (size_t w = 0; w < words_; w++) {
            px[w] = 0;
            pz[w] = 0;
        }
    }

  private:
    size_t words_;
    std::vector<uint64_t> x_, z_;
};

}  // namespace

SignatureTable build_signature_table(const CircuitProgram& program) {
    SignatureTable table;
    auto [channels, comps] = enumerate_components(program);
    table.channels = std::move(channels);
    table.components = std::move(comps);
    table.detector_count = program.detector_count;
    table.observable_count = program.observable_count;

    const uint32_t lanes = uint32_t(table.components.size());
    LaneFrames fr(program.qubit_count, std::max<uint32_t>(lanes, 1));
    const uint32_t W = fr.words();

    // record-flip lanes per measurement record
    std::vector<uint64_t> rec_flips(size_t(program.measurement_count) * W, 0);
    auto rec = [&](uint32_t r) { return rec_flips.data() + size_t(r) * W; };

    // group components by instruction for streaming injection
    std::vector<uint32_t> comp_cursor(1, 0);
    uint32_t next_comp = 0;
    uint32_t next_record = 0;

    std::vector<FlipSignature> sigs(lanes);
    std::vector<std::pair<uint32_t, uint32_t>> det_obs;  // filled at annotations

    uint32_t det_index = 0, obs_seen = 0;
    (void)obs_seen;
    std::vector<uint64_t> scratch(W);

    for (uint32_t idx = 0; idx < program.instructions.size(); idx++) {
        const Instruction& ins = program.instructions[idx];
        switch (ins.op) {
            case Op::NOISE_X:
            case Op::NOISE_Z:
            case Op::NOISE_DEP1:
            case Op::NOISE_DEP2:
                while (next_comp < lanes &&
                       table.components[next_comp].instruction_index == idx) {
                    const PauliEvent& ev = table.components[next_comp];
                    for (uint32_t q : ev.x_support) {
                        fr.x(q)[next_comp >> 6] ^= uint64_t(1) << (next_comp & 63);
                    }
                    for (uint32_t q : ev.z_support) {
                        fr.z(q)[next_comp >> 6] ^= uint64_t(1) << (next_comp & 63);
                    }
                    next_comp++;
                }
                break;
            case Op::H:
                for (uint32_t q : ins.qubits) {
                    uint64_t* px = fr.x(q);
                    uint64_t* pz = fr.z(q);
                    for (uint32_t w = 0; w < W; w++) {
                        std::swap(px[w], pz[w]);
                    }
                }
                break;
            case Op::CNOT:
                for (size_t i = 0; i + 1 < ins.qubits.size(); i += 2) {
                    uint32_t c = ins.qubits[i], t = ins.qubits[i + 1];
                    uint64_t* xc = fr.x(c);
                    uint64_t* xt = fr.x(t);
                    uint64_t* zc = fr.z(c);
                    uint64_t* zt = fr.z(t);
                    for (uint32_t w = 0; w < W; w++) {
                        xt[w] ^= xc[w];
                        zc[w] ^= zt[w];
                    }
                }
                break;
            case Op::RESET_Z:
            case Op::RESET_X:
                for (uint32_t q : ins.qubits) {
                    fr.clear(q);
                }
                break;
            case Op::BELL_INIT:
                for (uint32_t q : ins.qubits) {
                    fr.clear(q);
                }
                break;
            case Op::MEASURE_Z:
                for (uint32_t q : ins.qubits) {
                    const uint64_t* px = fr.x(q);
                    uint64_t* pr = rec(next_record++);
                    for (uint32_t w = 0; w < W; w++) {
                        pr[w] = px[w];
                    }
                }
                break;
            case Op::MEASURE_X:
                for (uint32_t q : ins.qubits) {
                    const uint64_t* pz = fr.z(q);
                    uint64_t* pr = rec(next_record++);
                    for (uint32_t w = 0; w < W; w++) {
                        pr[w] = pz[w];
                    }
                }
                break;
            case Op::COND_X: {
                const uint64_t* pr = rec(ins.recs[0]);
                uint64_t* px = fr.x(ins.qubits[0]);
                for (uint32_t w = 0; w < W; w++) {
                    px[w] ^= pr[w];
                }
                break;
            }
            case Op::COND_Z: {
                const uint64_t* pr = rec(ins.recs[0]);
                uint64_t* pz = fr.z(ins.qubits[0]);
                for (uint32_t w = 0; w < W; w++) {
                    pz[w] ^= pr[w];
                }
                break;
            }
            case Op::DETECTOR: {
                for (uint32_t w = 0; w < W; w++) {
                    scratch[w] = 0;
                }
                for (uint32_t r : ins.recs) {
                    const uint64_t* pr = rec(r);
                    for (uint32_t w = 0; w < W; w++) {
                        scratch[w] ^= pr[w];
                    }
                }
                for (uint32_t w = 0; w < W; w++) {
                    uint64_t bits = scratch[w];
                    while (bits) {
                        uint32_t lane = (w << 6) + uint32_t(__builtin_ctzll(bits));
                        if (lane < lanes) {
                            sigs[lane].detectors.push_back(det_index);
                        }
                        bits &= bits - 1;
                    }
                }
                det_index++;
                break;
            }
            case Op::OBSERVABLE: {
                for (uint32_t w = 0; w < W; w++) {
                    scratch[w] = 0;
                }
                for (uint32_t r : ins.recs) {
                    const uint64_t* pr = rec(r);
                    for (uint32_t w = 0; w < W; w++) {
                        scratch[w] ^= pr[w];
                    }
                }
                for (uint32_t w = 0; w < W; w++) {
                    uint64_t bits = scratch[w];
                    while (bits) {
                        uint32_t lane = (w << 6) + uint32_t(__builtin_ctzll(bits));
                        if (lane < lanes) {
                            sigs[lane].observables.push_back(ins.obs_index);
                        }
                        bits &= bits - 1;
                    }
                }
                break;
            }
            default:
                break;  // TICK, PAULI_X, PAULI_Z have no frame effect
        }
    }
    table.signatures = std::move(sigs);
    return table;
}

FlipSignature propagate(const CircuitProgram& program, const PauliEvent& event) {
    // Single-lane reference implementation: frame as explicit X/Z flag sets.
    std::vector<uint8_t> fx(program.qubit_count, 0), fz(program.qubit_count, 0);
    std::vector<uint8_t> rec_flip(program.measurement_count, 0);
    uint32_t next_record = 0;
    uint32_t det_index = 0;
    FlipSignature sig;

    for (uint32_t idx = 0; idx < program.instructions.size(); idx++) {
        const Instruction& ins = program.instructions[idx];
        if (idx == event.instruction_index) {
            for (uint32_t q : event.x_support) {
                fx[q] ^= 1;
            }
            for (uint32_t q : event.z_support) {
                fz[q] ^= 1;
            }
        }
        switch (ins.op) {
            case Op::H:
                for (uint32_t q : ins.qubits) {
                    std::swap(fx[q], fz[q]);
                }
                break;
            case Op::CNOT:
                for (size_t i = 0; i + 1 < ins.qubits.size(); i += 2) {
                    fx[ins.qubits[i + 1]] ^= fx[ins.qubits[i]];
                    fz[ins.qubits[i]] ^= fz[ins.qubits[i + 1]];
                }
                break;
            case Op::RESET_Z:
            case Op::RESET_X:
            case Op::BELL_INIT:
                for (uint32_t q : ins.qubits) {
                    fx[q] = fz[q] = 0;
                }
                break;
            case Op::MEASURE_Z:
                for (uint32_t q : ins.qubits) {
                    rec_flip[next_record++] = fx[q];
                }
                break;
            case Op::MEASURE_X:
                for (uint32_t q : ins.qubits) {
                    rec_flip[next_record++] = fz[q];
                }
                break;
            case Op::COND_X:
                fx[ins.qubits[0]] ^= rec_flip[ins.recs[0]];
                break;
            case Op::COND_Z:
                fz[ins.qubits[0]] ^= rec_flip[ins.recs[0]];
                break;
            case Op::DETECTOR: {
                uint8_t v = 0;
                for (uint32_t r : ins.recs) {
                    v ^= rec_flip[r];
                }
                if (v) {
                    sig.detectors.push_back(det_index);
                }
                det_index++;
                break;
            }
            case Op::OBSERVABLE: {
                uint8_t v = 0;
                for (uint32_t r : ins.recs) {
                    v ^= rec_flip[r];
                }
                if (v) {
                    sig.observables.push_back(ins.obs_index);
                }
                break;
            }
            default:
                break;
        }
    }
    return sig;
}

}  // namespace dqc
