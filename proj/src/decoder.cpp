#include "dqc/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace dqc {

namespace {

constexpr double kLlrClamp = 30.0;

double clamp_llr(double v) {
    return v > kLlrClamp ? kLlrClamp : (v < -kLlrClamp ? -kLlrClamp : v);
}

}  // namespace

Decoder::Decoder(const DetectorErrorModel& model, BpConfig bp, OsdConfig osd)
    : model_(model), bp_(bp), osd_(osd) {
    const size_t m = model_.mechanism_count();
    prior_llr_.resize(m);
    log_weight_.resize(m);
    row_cols_.resize(model_.detector_count);
    for (size_t i = 0; i < m; i++) {
        double p = std::min(std::max(model_.priors[i], 1e-300), 0.999999999999);
        prior_llr_[i] = clamp_llr(std::log((1.0 - p) / p));
        log_weight_[i] = std::max(prior_llr_[i], 1e-12);
        for (uint32_t d : model_.pcm_cols[i]) {
            row_cols_[d].push_back(uint32_t(i));
        }
    }
}

BpResult Decoder::bp_decode(const BitVector& syndrome) const {
    return bp_decode(syndrome, {});
}

BpResult Decoder::bp_decode(const BitVector& syndrome, const std::vector<uint8_t>& col_mask) const {
    if (syndrome.size() != model_.detector_count) {
        throw std::invalid_argument("bp_decode: syndrome length mismatch");
    }
    const size_t m = model_.mechanism_count();
    BpResult res;
    res.posteriors.assign(m, 0.0);
    res.hard_decision.assign(m, 0);

    // edge arrays, column-major
    std::vector<uint32_t> col_offset(m + 1, 0);
    for (size_t i = 0; i < m; i++) {
        col_offset[i + 1] = col_offset[i] + uint32_t(model_.pcm_cols[i].size());
    }
    const uint32_t edges = col_offset[m];
    std::vector<double> var_to_check(edges), check_to_var(edges, 0.0);
    auto masked = [&](size_t col) { return !col_mask.empty() && col_mask[col]; };

    for (size_t i = 0; i < m; i++) {
        double init = masked(i) ? kLlrClamp : prior_llr_[i];
        for (uint32_t e = col_offset[i]; e < col_offset[i + 1]; e++) {
            var_to_check[e] = init;
        }
    }

    // row-major view of the edges
    std::vector<uint32_t> row_offset(model_.detector_count + 1, 0);
    for (size_t i = 0; i < m; i++) {
        for (uint32_t d : model_.pcm_cols[i]) {
            row_offset[d + 1]++;
        }
    }
    for (uint32_t d = 0; d < model_.detector_count; d++) {
        row_offset[d + 1] += row_offset[d];
    }
    std::vector<uint32_t> row_edge(edges), row_col(edges);
    {
        std::vector<uint32_t> cursor(row_offset.begin(), row_offset.end() - 1);
        for (size_t i = 0; i < m; i++) {
            for (uint32_t e = col_offset[i]; e < col_offset[i + 1]; e++) {
                uint32_t d = model_.pcm_cols[i][e - col_offset[i]];
                row_edge[cursor[d]] = e;
                row_col[cursor[d]] = uint32_t(i);
                cursor[d]++;
            }
        }
    }

    std::vector<uint8_t> hard(m, 0);
    BitVector resid(model_.detector_count);

    for (uint32_t iter = 1; iter <= bp_.max_iterations; iter++) {
        // check-node update
        for (uint32_t d = 0; d < model_.detector_count; d++) {
            uint32_t begin = row_offset[d], end = row_offset[d + 1];
            double sgn = syndrome.get(d) ? -1.0 : 1.0;
            if (bp_.variant == BpConfig::Variant::ProductSum) {
                // product of tanh(m/2) with leave-one-out via full product
                double prod = sgn;
                bool zero_seen = false;
                uint32_t zero_at = 0;
                for (uint32_t e = begin; e < end; e++) {
                    double t = std::tanh(var_to_check[row_edge[e]] * 0.5);
                    if (std::abs(t) < 1e-12) {
                        if (zero_seen) {
                            prod = 0.0;
                            break;
                        }
                        zero_seen = true;
                        zero_at = e;
                        continue;
                    }
                    prod *= t;
                }
                for (uint32_t e = begin; e < end; e++) {
                    double t = std::tanh(var_to_check[row_edge[e]] * 0.5);
                    double rest;
                    if (zero_seen) {
                        rest = (e == zero_at) ? prod : 0.0;
                    } else if (std::abs(t) < 1e-12) {
                        rest = 0.0;
                    } else {
                        rest = prod / t;
                    }
                    rest = std::min(std::max(rest, -0.9999999999), 0.9999999999);
                    check_to_var[row_edge[e]] = clamp_llr(2.0 * std::atanh(rest));
                }
            } else {
                // min-sum with scaling
                double min1 = 1e300, min2 = 1e300;
                uint32_t arg1 = 0;
                int sign_prod = syndrome.get(d) ? -1 : 1;
                for (uint32_t e = begin; e < end; e++) {
                    double v = var_to_check[row_edge[e]];
                    if (v < 0) {
                        sign_prod = -sign_prod;
                    }
                    double a = std::abs(v);
                    if (a < min1) {
                        min2 = min1;
                        min1 = a;
                        arg1 = e;
                    } else if (a < min2) {
                        min2 = a;
                    }
                }
                for (uint32_t e = begin; e < end; e++) {
                    double v = var_to_check[row_edge[e]];
                    double mag = (e == arg1 ? min2 : min1) * bp_.min_sum_scale;
                    int s = sign_prod * (v < 0 ? -1 : 1);
                    check_to_var[row_edge[e]] = clamp_llr(s * mag);
                }
            }
        }
        // variable-node update + posterior
        for (size_t i = 0; i < m; i++) {
            double total = masked(i) ? kLlrClamp : prior_llr_[i];
            for (uint32_t e = col_offset[i]; e < col_offset[i + 1]; e++) {
                total += check_to_var[e];
            }
            total = clamp_llr(total);
            for (uint32_t e = col_offset[i]; e < col_offset[i + 1]; e++) {
                var_to_check[e] = clamp_llr(total - check_to_var[e]);
            }
            res.posteriors[i] = 1.0 / (1.0 + std::exp(total));
            hard[i] = total < 0.0 ? 1 : 0;
        }
        // syndrome check
        for (size_t w = 0; w < resid.words().size(); w++) {
            resid.words()[w] = 0;
        }
        for (size_t i = 0; i < m; i++) {
            if (hard[i]) {
                for (uint32_t d : model_.pcm_cols[i]) {
                    resid.flip(d);
                }
            }
        }
        res.iterations_used = iter;
        if (resid == syndrome) {
            res.converged = true;
            break;
        }
    }
    res.hard_decision = std::move(hard);
    return res;
}

DecodeOutcome Decoder::osd_postprocess(const std::vector<double>& posteriors,
                                       const BitVector& syndrome) const {
    return osd_postprocess(posteriors, syndrome, {});
}

DecodeOutcome Decoder::osd_postprocess(const std::vector<double>& posteriors,
                                       const BitVector& syndrome,
                                       const std::vector<uint8_t>& col_mask) const {
    const size_t m = model_.mechanism_count();
    const uint32_t rows = model_.detector_count;
    auto masked = [&](size_t col) { return !col_mask.empty() && col_mask[col]; };

    // reliability order: most-likely-in-error first; ties by column index
    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return posteriors[a] > posteriors[b];
    });
    std::vector<size_t> usable;
    usable.reserve(m);
    for (size_t c : order) {
        if (!masked(c)) {
            usable.push_back(c);
        }
    }

    // dense elimination on [H | s] in reliability column order
    BitMatrix aug(rows, m + 1);
    for (size_t i = 0; i < m; i++) {
        for (uint32_t d : model_.pcm_cols[i]) {
            aug.set(d, i, true);
        }
    }
    for (uint32_t d = 0; d < rows; d++) {
        if (syndrome.get(d)) {
            aug.set(d, m, true);
        }
    }
    std::vector<size_t> pivots;
    std::vector<size_t> non_pivots;
    size_t pivot_row = 0;
    for (size_t c : usable) {
        size_t sel = rows;
        for (size_t r = pivot_row; r < rows; r++) {
            if (aug.get(r, c)) {
                sel = r;
                break;
            }
        }
        if (sel == rows) {
            non_pivots.push_back(c);
            continue;
        }
        aug.swap_rows(pivot_row, sel);
        for (size_t r = 0; r < rows; r++) {
            if (r != pivot_row && aug.get(r, c)) {
                aug.xor_rows(pivot_row, r);
            }
        }
        pivots.push_back(c);
        pivot_row++;
        if (pivot_row == rows) {
            // remaining usable columns are all non-pivots
        }
    }
    if (pivots.size() < rows) {
        // rows below the pivot count must have zero syndrome or the system is
        // unsatisfiable (cannot happen for syndromes generated by the model)
        for (size_t r = pivots.size(); r < rows; r++) {
            if (aug.get(r, m)) {
                throw std::runtime_error("osd: syndrome outside the column space");
            }
        }
    }

    auto solve_with = [&](const std::vector<size_t>& flipped_non_pivots) {
        // e = e_pivot(s') with chosen non-pivot flips
        std::vector<uint32_t> est;
        double weight = 0.0;
        for (size_t i = 0; i < pivots.size(); i++) {
            bool v = aug.get(i, m);
            for (size_t c : flipped_non_pivots) {
                v ^= aug.get(i, c);
            }
            if (v) {
                est.push_back(uint32_t(pivots[i]));
                weight += log_weight_[pivots[i]];
            }
        }
        for (size_t c : flipped_non_pivots) {
            est.push_back(uint32_t(c));
            weight += log_weight_[c];
        }
        return std::make_pair(std::move(est), weight);
    };

    auto [best, best_w] = solve_with({});
    if (osd_.order > 0 && !non_pivots.empty()) {
        size_t window = std::min<size_t>(osd_.order, non_pivots.size());
        if (osd_.mode == OsdConfig::Mode::CombinationSweep) {
            // all weight-1 and weight-2 patterns within the window
            for (size_t a = 0; a < window; a++) {
                auto [est, w] = solve_with({non_pivots[a]});
                if (w < best_w) {
                    best = std::move(est);
                    best_w = w;
                }
                for (size_t b = a + 1; b < window; b++) {
                    auto [est2, w2] = solve_with({non_pivots[a], non_pivots[b]});
                    if (w2 < best_w) {
                        best = std::move(est2);
                        best_w = w2;
                    }
                }
            }
        } else {
            // exhaustive over the window (2^order patterns)
            for (uint64_t pattern = 1; pattern < (uint64_t(1) << window); pattern++) {
                std::vector<size_t> flips;
                for (size_t b = 0; b < window; b++) {
                    if ((pattern >> b) & 1) {
                        flips.push_back(non_pivots[b]);
                    }
                }
                auto [est, w] = solve_with(flips);
                if (w < best_w) {
                    best = std::move(est);
                    best_w = w;
                }
            }
        }
    }

    DecodeOutcome out;
    std::sort(best.begin(), best.end());
    out.mechanism_estimate = std::move(best);
    out.predicted_obs_flips = observable_flips(out.mechanism_estimate);
    return out;
}

DecodeOutcome Decoder::decode(const BitVector& syndrome) const {
    return decode(syndrome, {});
}

DecodeOutcome Decoder::decode(const BitVector& syndrome,
                              const std::vector<uint8_t>& col_mask) const {
    if (syndrome.is_zero()) {
        DecodeOutcome out;
        out.bp_converged = true;
        out.iterations_used = 0;
        out.predicted_obs_flips = BitVector(model_.observable_count);
        return out;
    }
    BpResult bp = bp_decode(syndrome, col_mask);
    if (bp.converged) {
        DecodeOutcome out;
        out.bp_converged = true;
        out.iterations_used = bp.iterations_used;
        for (size_t i = 0; i < bp.hard_decision.size(); i++) {
            if (bp.hard_decision[i]) {
                out.mechanism_estimate.push_back(uint32_t(i));
            }
        }
        out.predicted_obs_flips = observable_flips(out.mechanism_estimate);
        return out;
    }
    DecodeOutcome out = osd_postprocess(bp.posteriors, syndrome, col_mask);
    out.bp_converged = false;
    out.iterations_used = bp.iterations_used;
    return out;
}

BitVector Decoder::observable_flips(const std::vector<uint32_t>& mechanisms) const {
    BitVector flips(model_.observable_count);
    for (uint32_t mech : mechanisms) {
        for (uint32_t o : model_.obs_cols[mech]) {
            flips.flip(o);
        }
    }
    return flips;
}

BitVector Decoder::syndrome_of(const std::vector<uint32_t>& mechanisms) const {
    BitVector s(model_.detector_count);
    for (uint32_t mech : mechanisms) {
        for (uint32_t d : model_.pcm_cols[mech]) {
            s.flip(d);
        }
    }
    return s;
}

BatchDecodeResult decode_batch(const DetectorErrorModel& model, const ShotBatch& batch,
                               const BpConfig& bp, const OsdConfig& osd, int workers) {
    Decoder dec(model, bp, osd);
    BatchDecodeResult res;
    res.shot_failed.assign(batch.shots, 0);

    auto run_range = [&](uint64_t begin, uint64_t end) {
        for (uint64_t s = begin; s < end; s++) {
            BitVector syndrome(model.detector_count);
            for (uint32_t w = 0; w < batch.det_words(); w++) {
                syndrome.words()[w] = batch.det_row(s)[w];
            }
            DecodeOutcome out = dec.decode(syndrome);
            bool fail = false;
            for (uint32_t o = 0; o < model.observable_count; o++) {
                if (out.predicted_obs_flips.get(o) != batch.obs_bit(s, o)) {
                    fail = true;
                    break;
                }
            }
            res.shot_failed[s] = fail ? 1 : 0;
        }
    };
    if (workers <= 1 || batch.shots < 2) {
        run_range(0, batch.shots);
    } else {
        uint64_t nt = std::min<uint64_t>(workers, batch.shots);
        std::vector<std::thread> threads;
        for (uint64_t t = 0; t < nt; t++) {
            threads.emplace_back(run_range, batch.shots * t / nt, batch.shots * (t + 1) / nt);
        }
        for (auto& th : threads) {
            th.join();
        }
    }
    res.fails = std::accumulate(res.shot_failed.begin(), res.shot_failed.end(), uint64_t(0));
    return res;
}

}  // namespace dqc
