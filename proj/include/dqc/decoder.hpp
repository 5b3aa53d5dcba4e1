#pragma once

#include <cstdint>
#include <vector>

#include "dqc/dem.hpp"
#include "dqc/linalg.hpp"

namespace dqc {

struct BpConfig {
    uint32_t max_iterations = 10000;
    enum class Variant { ProductSum, MinSum } variant = Variant::ProductSum;
    double min_sum_scale = 0.625;
    enum class Schedule { Parallel, Serial } schedule = Schedule::Parallel;
};

struct OsdConfig {
    uint32_t order = 7;
    enum class Mode { CombinationSweep, Exhaustive } mode = Mode::CombinationSweep;
};

struct BpResult {
    std::vector<double> posteriors;  // per-mechanism error probability
    std::vector<uint8_t> hard_decision;
    bool converged = false;
    uint32_t iterations_used = 0;
};

struct DecodeOutcome {
    std::vector<uint32_t> mechanism_estimate;  // sparse support
    BitVector predicted_obs_flips;
    bool bp_converged = false;
    uint32_t iterations_used = 0;
};

/// Belief propagation on the Tanner graph of the DEM's PCM, with the
/// syndrome entering the check-node updates. Early exit when the hard
/// decision satisfies the syndrome; LLRs clamped at +/-30.
class Decoder {
  public:
    Decoder(const DetectorErrorModel& model, BpConfig bp = {}, OsdConfig osd = {});

    BpResult bp_decode(const BitVector& syndrome) const;
    BpResult bp_decode(const BitVector& syndrome, const std::vector<uint8_t>& col_mask) const;

    /// OSD over reliability-ordered columns; always returns a
    /// syndrome-consistent estimate.
    DecodeOutcome osd_postprocess(const std::vector<double>& posteriors,
                                  const BitVector& syndrome) const;
    DecodeOutcome osd_postprocess(const std::vector<double>& posteriors,
                                  const BitVector& syndrome,
                                  const std::vector<uint8_t>& col_mask) const;

    /// BP, then OSD only when BP has not already satisfied the syndrome.
    DecodeOutcome decode(const BitVector& syndrome) const;
    DecodeOutcome decode(const BitVector& syndrome, const std::vector<uint8_t>& col_mask) const;

    BitVector observable_flips(const std::vector<uint32_t>& mechanisms) const;
    BitVector syndrome_of(const std::vector<uint32_t>& mechanisms) const;

    const DetectorErrorModel& model() const { return model_; }

  private:
    DetectorErrorModel model_;
    BpConfig bp_;
    OsdConfig osd_;
    std::vector<double> prior_llr_;
    std::vector<std::vector<uint32_t>> row_cols_;  // detector -> mechanisms
    std::vector<double> log_weight_;               // log((1-p)/p) per mechanism
};

struct BatchDecodeResult {
    uint64_t fails = 0;
    std::vector<uint8_t> shot_failed;
};

/// A shot fails when the predicted observable flips differ from the actual
/// observable bits on any observable.
BatchDecodeResult decode_batch(const DetectorErrorModel& model, const ShotBatch& batch,
                               const BpConfig& bp = {}, const OsdConfig& osd = {},
                               int workers = 1);

}  // namespace dqc
