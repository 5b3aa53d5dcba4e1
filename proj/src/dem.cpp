#include "dqc/dem.hpp"

#include <charconv>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dqc {

DetectorErrorModel extract_dem(const CircuitProgram& program, const SignatureTable& table) {
    DetectorErrorModel model;
    model.detector_count = program.detector_count;
    model.observable_count = program.observable_count;

    std::map<std::pair<std::vector<uint32_t>, std::vector<uint32_t>>, double> merged;
    for (size_t i = 0; i < table.components.size(); i++) {
        const FlipSignature& sig = table.signatures[i];
        if (sig.empty()) {
            continue;
        }
        double p = table.components[i].prob;
        auto key = std::make_pair(sig.detectors, sig.observables);
        auto [it, fresh] = merged.emplace(std::move(key), 0.0);
        it->second = it->second + p - 2.0 * it->second * p;
    }
    for (auto& [key, p] : merged) {
        if (p <= 0.0) {
            continue;
        }
        model.pcm_cols.push_back(key.first);
        model.obs_cols.push_back(key.second);
        model.priors.push_back(p);
    }
    return model;
}

DetectorErrorModel extract_dem(const CircuitProgram& program) {
    SignatureTable table = build_signature_table(program);
    return extract_dem(program, table);
}

ShotBatch sample_from_dem(const DetectorErrorModel& model, uint64_t shots, uint64_t seed,
                          int workers) {
    ShotBatch batch;
    batch.resize(shots, model.detector_count, model.observable_count);
    auto run_range = [&](uint64_t begin, uint64_t end) {
        for (uint64_t s = begin; s < end; s++) {
            uint64_t* drow = batch.det_row(s);
            uint64_t* orow = batch.obs_row(s);
            for (uint32_t m = 0; m < model.mechanism_count(); m++) {
                if (counter_uniform(seed, s, m) < model.priors[m]) {
                    for (uint32_t d : model.pcm_cols[m]) {
                        drow[d >> 6] ^= uint64_t(1) << (d & 63);
                    }
                    for (uint32_t o : model.obs_cols[m]) {
                        orow[o >> 6] ^= uint64_t(1) << (o & 63);
                    }
                }
            }
        }
    };
    if (workers <= 1 || shots < 2) {
        run_range(0, shots);
    } else {
        uint64_t nt = std::min<uint64_t>(workers, shots);
        std::vector<std::thread> threads;
        for (uint64_t t = 0; t < nt; t++) {
            threads.emplace_back(run_range, shots * t / nt, shots * (t + 1) / nt);
        }
        for (auto& th : threads) {
            th.join();
        }
    }
    return batch;
}

std::string serialize_dem(const DetectorErrorModel& model) {
    std::ostringstream out;
    out << "dem detectors=" << model.detector_count << " observables=" << model.observable_count
        << "\n";
    for (size_t m = 0; m < model.mechanism_count(); m++) {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof(buf), model.priors[m]);
        out << "error(" << std::string(buf, res.ptr) << ')';
        for (uint32_t d : model.pcm_cols[m]) {
            out << " D" << d;
        }
        for (uint32_t o : model.obs_cols[m]) {
            out << " L" << o;
        }
        out << "\n";
    }
    return out.str();
}

DetectorErrorModel parse_dem(const std::string& text) {
    DetectorErrorModel model;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    bool have_header = false;
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("dem parse error at line " + std::to_string(line_no) + ": " +
                                    why);
    };
    while (std::getline(in, line)) {
        line_no++;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "dem") {
            have_header = true;
            std::string tok;
            while (ls >> tok) {
                auto eq = tok.find('=');
                if (eq == std::string::npos) {
                    fail("bad header field " + tok);
                }
                uint64_t v = std::stoull(tok.substr(eq + 1));
                if (tok.rfind("detectors", 0) == 0) {
                    model.detector_count = uint32_t(v);
                } else if (tok.rfind("observables", 0) == 0) {
                    model.observable_count = uint32_t(v);
                } else {
                    fail("unknown header field " + tok);
                }
            }
            continue;
        }
        if (word.rfind("error(", 0) != 0 || word.back() != ')') {
            fail("expected error(<p>), got " + word);
        }
        double p = std::stod(word.substr(6, word.size() - 7));
        if (p < 0.0 || p > 1.0) {
            fail("probability out of range");
        }
        std::vector<uint32_t> dets, obs;
        std::string tok;
        while (ls >> tok) {
            if (tok.size() < 2 || (tok[0] != 'D' && tok[0] != 'L')) {
                fail("expected D<i> or L<i>, got " + tok);
            }
            uint32_t v = uint32_t(std::stoul(tok.substr(1)));
            if (tok[0] == 'D') {
                if (v >= model.detector_count) {
                    fail("detector index out of range");
                }
                dets.push_back(v);
            } else {
                if (v >= model.observable_count) {
                    fail("observable index out of range");
                }
                obs.push_back(v);
            }
        }
        model.pcm_cols.push_back(std::move(dets));
        model.obs_cols.push_back(std::move(obs));
        model.priors.push_back(p);
    }
    if (!have_header) {
        throw std::invalid_argument("dem parse error: missing header");
    }
    return model;
}

}  // namespace dqc
