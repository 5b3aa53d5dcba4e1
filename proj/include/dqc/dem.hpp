#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dqc/sampler.hpp"

namespace dqc {

/// Space-time parity check matrix over distinct error mechanisms: column i
/// flips the detectors in pcm_cols[i] and the observables in obs_cols[i]
/// with prior probability priors[i]. Mechanisms with identical detector AND
/// observable signatures are merged (p (+) q = p + q - 2pq); zero-signature
/// mechanisms are dropped.
struct DetectorErrorModel {
    uint32_t detector_count = 0;
    uint32_t observable_count = 0;
    std::vector<std::vector<uint32_t>> pcm_cols;  // sorted detector ids
    std::vector<std::vector<uint32_t>> obs_cols;  // sorted observable ids
    std::vector<double> priors;

    size_t mechanism_count() const { return priors.size(); }
};

DetectorErrorModel extract_dem(const CircuitProgram& program);
DetectorErrorModel extract_dem(const CircuitProgram& program, const SignatureTable& table);

/// Independent Bernoulli draw per mechanism; outcome = XOR of drawn columns.
ShotBatch sample_from_dem(const DetectorErrorModel& model, uint64_t shots, uint64_t seed,
                          int workers = 1);

std::string serialize_dem(const DetectorErrorModel& model);
DetectorErrorModel parse_dem(const std::string& text);

}  // namespace dqc
