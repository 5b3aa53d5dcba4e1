#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dqc/builder.hpp"
#include "dqc/decoder.hpp"

namespace dqc {

/// Point estimate with the Bayes-factor-1000 likelihood region: all q whose
/// binomial likelihood is within a factor 1000 of the maximum.
struct LerEstimate {
    uint64_t shots = 0;
    uint64_t fails = 0;
    double point = 0.0;
    double interval_low = 0.0;
    double interval_high = 0.0;
};

LerEstimate ler_interval(uint64_t fails, uint64_t shots);

struct ScalingFit {
    double p_th = 0.0;
    double alpha = 0.0;
    std::vector<std::tuple<double, double, double>> crossings;  // (d_a, d_b, p)
};

struct CurvePoint {
    size_t d = 0;
    double p = 0.0;
    LerEstimate ler;
};

/// Threshold from successive-distance crossings of the LER curves in log-log
/// space (linear interpolation between bracketing grid points, averaged over
/// distance pairs), then a least-squares prefactor fit.
/// Throws std::runtime_error when no pair of curves crosses in range.
ScalingFit fit_threshold(const std::vector<CurvePoint>& curves);

/// d = ceil(d0 + 2 ln(P*/P0) / ln(p/p_th)); optionally rounded up to odd.
size_t required_distance(double p, double p_th, size_t d_0, double p_0, double p_star,
                         bool round_to_odd = false);

struct DistanceWitness {
    size_t weight = 0;
    std::vector<uint32_t> mechanisms;
    std::vector<uint32_t> observables_flipped;
};

/// Upper-bound search: for each mechanism in the budget, decode its own
/// column with that mechanism excluded and keep syndrome-free candidates
/// that flip an observable. Absence of a witness is not a distance proof.
std::optional<DistanceWitness> search_circuit_distance(const DetectorErrorModel& model,
                                                       size_t effort = SIZE_MAX,
                                                       const BpConfig& bp = {},
                                                       const OsdConfig& osd = {});

/// Verifies the two witness identities pcm*e = 0 and obs*e != 0.
bool verify_witness(const DetectorErrorModel& model, const DistanceWitness& witness);

struct SweepCell {
    std::string code_spec;
    std::string kind;
    double p = 0.0;
    double p_ebit = 0.0;
};

struct SweepRow {
    SweepCell cell;
    uint64_t shots = 0;
    uint64_t seed = 0;
    LerEstimate ler;
    std::string error;  // nonempty when the cell failed
};

/// End-to-end circuit -> DEM -> sample -> decode -> interval for each cell.
/// Deterministic for a fixed root seed; per-cell seeds derive from the cell id.
std::vector<SweepRow> sweep(const std::vector<SweepCell>& cells, uint64_t shots,
                            uint64_t root_seed, int workers = 1,
                            const BpConfig& bp = {}, const OsdConfig& osd = {});

std::string sweep_csv_header();
std::string sweep_row_csv(const SweepRow& row);

}  // namespace dqc
