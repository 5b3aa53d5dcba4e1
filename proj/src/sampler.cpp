#include "dqc/sampler.hpp"

#include <cstring>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dqc {

uint64_t counter_mix(uint64_t a, uint64_t b, uint64_t c) {
    // SplitMix64-style finalizer over the combined key.
    uint64_t x = a;
    x += 0x9e3779b97f4a7c15ull;
    x += b * 0xbf58476d1ce4e5b9ull;
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x += c * 0x94d049bb133111ebull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    x *= 0xd6e8feb86659fd93ull;
    x ^= x >> 32;
    return x;
}

double counter_uniform(uint64_t seed, uint64_t shot, uint64_t stream) {
    return double(counter_mix(seed, shot, stream) >> 11) * 0x1.0p-53;
}

ShotBatch sample(const CircuitProgram& program, const SignatureTable& table, uint64_t shots,
                 uint64_t seed, int workers) {
    ShotBatch batch;
    batch.resize(shots, program.detector_count, program.observable_count);
    const uint32_t dw = batch.det_words(), ow = batch.obs_words();

    auto run_range = [&](uint64_t begin, uint64_t end) {
        for (uint64_t s = begin; s < end; s++) {
            uint64_t* drow = batch.det_row(s);
            uint64_t* orow = batch.obs_row(s);
            for (uint32_t ci = 0; ci < table.channels.size(); ci++) {
                const Channel& ch = table.channels[ci];
                double u = counter_uniform(seed, s, ci);
                // cumulative scan over the channel's components
                double acc = 0.0;
                uint32_t hit = UINT32_MAX;
                for (uint32_t k = 0; k < ch.component_count; k++) {
                    acc += table.components[ch.first_component + k].prob;
                    if (u < acc) {
                        hit = ch.first_component + k;
                        break;
                    }
                }
                if (hit == UINT32_MAX) {
                    continue;
                }
                const FlipSignature& sig = table.signatures[hit];
                for (uint32_t d : sig.detectors) {
                    drow[d >> 6] ^= uint64_t(1) << (d & 63);
                }
                for (uint32_t o : sig.observables) {
                    orow[o >> 6] ^= uint64_t(1) << (o & 63);
                }
            }
        }
    };

    (void)dw;
    (void)ow;
    if (workers <= 1 || shots < 2) {
        run_range(0, shots);
    } else {
        uint64_t nt = std::min<uint64_t>(workers, shots);
        std::vector<std::thread> threads;
        for (uint64_t t = 0; t < nt; t++) {
            uint64_t begin = shots * t / nt, end = shots * (t + 1) / nt;
            threads.emplace_back(run_range, begin, end);
        }
        for (auto& th : threads) {
            th.join();
        }
    }
    return batch;
}

ShotBatch sample(const CircuitProgram& program, uint64_t shots, uint64_t seed, int workers) {
    SignatureTable table = build_signature_table(program);
    return sample(program, table, shots, seed, workers);
}

namespace {

void hex_append(std::ostringstream& out, const uint64_t* words, uint32_t bit_count) {
    // nibble stream, least significant nibble of bit 0..3 first
    uint32_t nibbles = (bit_count + 3) / 4;
    for (uint32_t i = 0; i < nibbles; i++) {
        uint32_t w = (i * 4) >> 6;
        uint32_t sh = (i * 4) & 63;
        out << "0123456789abcdef"[(words[w] >> sh) & 0xf];
    }
    if (nibbles == 0) {
        out << '0';
    }
}

void hex_read(const std::string& s, uint64_t* words, uint32_t bit_count) {
    uint32_t nibbles = (bit_count + 3) / 4;
    for (uint32_t i = 0; i < nibbles && i < s.size(); i++) {
        char c = s[i];
        uint64_t v = c >= '0' && c <= '9'   ? uint64_t(c - '0')
                     : c >= 'a' && c <= 'f' ? uint64_t(c - 'a' + 10)
                     : c >= 'A' && c <= 'F' ? uint64_t(c - 'A' + 10)
                                            : throw std::invalid_argument("bad hex digit");
        words[(i * 4) >> 6] |= v << ((i * 4) & 63);
    }
}

}  // namespace

std::string dump_batch_hex(const ShotBatch& batch) {
    std::ostringstream out;
    out << "# batch shots=" << batch.shots << " detectors=" << batch.detector_count
        << " observables=" << batch.observable_count << "\n";
    for (uint64_t s = 0; s < batch.shots; s++) {
        out << "D: ";
        hex_append(out, batch.det_row(s), batch.detector_count);
        out << " L: ";
        hex_append(out, batch.obs_row(s), batch.observable_count);
        out << "\n";
    }
    return out.str();
}

ShotBatch parse_batch_hex(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    uint64_t shots = 0;
    uint32_t dets = 0, obs = 0;
    if (!std::getline(in, line) || line.rfind("# batch", 0) != 0) {
        throw std::invalid_argument("batch header missing");
    }
    std::istringstream hs(line.substr(7));
    std::string tok;
    while (hs >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) {
            continue;
        }
        uint64_t v = std::stoull(tok.substr(eq + 1));
        if (tok.rfind("shots", 0) == 0) {
            shots = v;
        } else if (tok.rfind("detectors", 0) == 0) {
            dets = uint32_t(v);
        } else if (tok.rfind("observables", 0) == 0) {
            obs = uint32_t(v);
        }
    }
    ShotBatch batch;
    batch.resize(shots, dets, obs);
    for (uint64_t s = 0; s < shots; s++) {
        if (!std::getline(in, line)) {
            throw std::invalid_argument("batch truncated");
        }
        std::istringstream ls(line);
        std::string dtag, dhex, ltag, lhex;
        ls >> dtag >> dhex >> ltag >> lhex;
        if (dtag != "D:" || ltag != "L:") {
            throw std::invalid_argument("bad batch line");
        }
        hex_read(dhex, batch.det_row(s), dets);
        hex_read(lhex, batch.obs_row(s), obs);
    }
    return batch;
}

std::vector<uint8_t> dump_batch_binary(const ShotBatch& batch) {
    std::vector<uint8_t> out;
    auto push_u = [&](uint64_t v, int bytes) {
        for (int i = 0; i < bytes; i++) {
            out.push_back(uint8_t(v >> (8 * i)));
        }
    };
    out.insert(out.end(), {'D', 'Q', 'B', '1'});
    push_u(batch.shots, 8);
    push_u(batch.detector_count, 4);
    push_u(batch.observable_count, 4);
    uint32_t dbytes = (batch.detector_count + 7) / 8;
    uint32_t obytes = (batch.observable_count + 7) / 8;
    for (uint64_t s = 0; s < batch.shots; s++) {
        const uint8_t* d = reinterpret_cast<const uint8_t*>(batch.det_row(s));
        out.insert(out.end(), d, d + dbytes);
        const uint8_t* o = reinterpret_cast<const uint8_t*>(batch.obs_row(s));
        out.insert(out.end(), o, o + obytes);
    }
    return out;
}

ShotBatch parse_batch_binary(const std::vector<uint8_t>& bytes) {
    if (bytes.size() < 20 || std::memcmp(bytes.data(), "DQB1", 4) != 0) {
        throw std::invalid_argument("bad batch binary header");
    }
    auto read_u = [&](size_t off, int nbytes) {
        uint64_t v = 0;
        for (int i = 0; i < nbytes; i++) {
            v |= uint64_t(bytes[off + i]) << (8 * i);
        }
        return v;
    };
    ShotBatch batch;
    uint64_t shots = read_u(4, 8);
    uint32_t dets = uint32_t(read_u(12, 4));
    uint32_t obs = uint32_t(read_u(16, 4));
    batch.resize(shots, dets, obs);
    uint32_t dbytes = (dets + 7) / 8, obytes = (obs + 7) / 8;
    size_t off = 20;
    if (bytes.size() < off + shots * (uint64_t(dbytes) + obytes)) {
        throw std::invalid_argument("batch binary truncated");
    }
    for (uint64_t s = 0; s < shots; s++) {
        std::memcpy(batch.det_row(s), bytes.data() + off, dbytes);
        off += dbytes;
        std::memcpy(batch.obs_row(s), bytes.data() + off, obytes);
        off += obytes;
    }
    return batch;
}

}  // namespace dqc
