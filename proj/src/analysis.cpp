#include "dqc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dqc {

namespace {

// log Binomial likelihood up to the combinatorial constant
double log_lik(uint64_t fails, uint64_t shots, double q) {
    double lf = fails == 0 ? 0.0 : double(fails) * std::log(q);
    double ls = fails == shots ? 0.0 : double(shots - fails) * std::log1p(-q);
    return lf + ls;
}

}  // namespace

LerEstimate ler_interval(uint64_t fails, uint64_t shots) {
    if (shots == 0 || fails > shots) {
        throw std::invalid_argument("ler_interval: need 0 <= fails <= shots, shots >= 1");
    }
    LerEstimate est;
    est.shots = shots;
    est.fails = fails;
    est.point = double(fails) / double(shots);
    const double log_bf = std::log(1000.0);
    const double mle_ll = log_lik(fails, shots, std::min(std::max(est.point, 0.0), 1.0));

    auto inside = [&](double q) { return log_lik(fails, shots, q) >= mle_ll - log_bf; };

    // lower endpoint
    if (fails == 0) {
        est.interval_low = 0.0;
    } else {
        double lo = 0.0, hi = est.point;
        for (int it = 0; it < 200; it++) {
            double mid = 0.5 * (lo + hi);
            if (mid <= 0.0) {
                break;
            }
            if (inside(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        est.interval_low = hi;
    }
    // upper endpoint
    if (fails == shots) {
        est.interval_high = 1.0;
    } else {
        double lo = est.point, hi = 1.0;
        for (int it = 0; it < 200; it++) {
            double mid = 0.5 * (lo + hi);
            if (mid >= 1.0) {
                break;
            }
            if (inside(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        est.interval_high = lo;
    }
    return est;
}

ScalingFit fit_threshold(const std::vector<CurvePoint>& curves) {
    // group by distance
    std::map<size_t, std::vector<CurvePoint>> by_d;
    for (const auto& c : curves) {
        by_d[c.d].push_back(c);
    }
    if (by_d.size() < 2) {
        throw std::invalid_argument("fit_threshold: need at least two distances");
    }
    for (auto& [d, pts] : by_d) {
        if (pts.size() < 3) {
            throw std::invalid_argument("fit_threshold: need at least three noise points per curve");
        }
        std::sort(pts.begin(), pts.end(), [](const CurvePoint& a, const CurvePoint& b) {
            return a.p < b.p;
        });
    }

    ScalingFit fit;
    std::vector<size_t> ds;
    for (const auto& [d, _] : by_d) {
        ds.push_back(d);
    }
    // crossings of successive-distance curves in log-log space
    for (size_t i = 0; i + 1 < ds.size(); i++) {
        const auto& a = by_d[ds[i]];
        const auto& b = by_d[ds[i + 1]];
        // evaluate on the common grid (assume matching p grids; interpolate b at a's p)
        auto log_ler_at = [](const std::vector<CurvePoint>& curve, double p) -> double {
            // linear interpolation of log(LER) in log(p); clamp to range
            if (p <= curve.front().p) {
                return std::log(std::max(curve.front().ler.point, 1e-300));
            }
            if (p >= curve.back().p) {
                return std::log(std::max(curve.back().ler.point, 1e-300));
            }
            for (size_t j = 0; j + 1 < curve.size(); j++) {
                if (p >= curve[j].p && p <= curve[j + 1].p) {
                    double x0 = std::log(curve[j].p), x1 = std::log(curve[j + 1].p);
                    double y0 = std::log(std::max(curve[j].ler.point, 1e-300));
                    double y1 = std::log(std::max(curve[j + 1].ler.point, 1e-300));
                    double t = (std::log(p) - x0) / (x1 - x0);
                    return y0 + t * (y1 - y0);
                }
            }
            return std::log(std::max(curve.back().ler.point, 1e-300));
        };
        // scan a's grid for a sign change of (log LER_b - log LER_a)
        bool found = false;
        for (size_t j = 0; j + 1 < a.size(); j++) {
            double d0 = log_ler_at(b, a[j].p) - std::log(std::max(a[j].ler.point, 1e-300));
            double d1 = log_ler_at(b, a[j + 1].p) - std::log(std::max(a[j + 1].ler.point, 1e-300));
            if (d0 == 0.0) {
                fit.crossings.emplace_back(double(ds[i]), double(ds[i + 1]), a[j].p);
                found = true;
                break;
            }
            if ((d0 < 0.0) != (d1 < 0.0)) {
                double x0 = std::log(a[j].p), x1 = std::log(a[j + 1].p);
                double t = d0 / (d0 - d1);
                fit.crossings.emplace_back(double(ds[i]), double(ds[i + 1]),
                                           std::exp(x0 + t * (x1 - x0)));
                found = true;
                break;
            }
        }
        if (!found) {
            throw std::runtime_error("fit_threshold: curves for d=" + std::to_string(ds[i]) +
                                     " and d=" + std::to_string(ds[i + 1]) +
                                     " do not cross in range");
        }
    }
    double acc = 0.0;
    for (const auto& [da, db, p] : fit.crossings) {
        acc += std::log(p);
    }
    fit.p_th = std::exp(acc / double(fit.crossings.size()));

    // least squares for log alpha: log P = log alpha + (d+1)/2 * log(p/p_th)
    double num = 0.0;
    size_t cnt = 0;
    for (const auto& c : curves) {
        if (c.ler.point <= 0.0 || c.p >= fit.p_th) {
            continue;
        }
        num += std::log(c.ler.point) - 0.5 * double(c.d + 1) * std::log(c.p / fit.p_th);
        cnt++;
    }
    fit.alpha = cnt ? std::exp(num / double(cnt)) : 0.0;
    return fit;
}

size_t required_distance(double p, double p_th, size_t d_0, double p_0, double p_star,
                         bool round_to_odd) {
    if (p >= p_th) {
        throw std::invalid_argument("required_distance: p must be below p_th");
    }
    if (p_star > p_0) {
        throw std::invalid_argument("required_distance: target must not exceed the anchor");
    }
    double r = p / p_th;
    double d = double(d_0) + 2.0 * std::log(p_star / p_0) / std::log(r);
    size_t out = size_t(std::ceil(d - 1e-12));
    if (round_to_odd && out % 2 == 0) {
        out++;
    }
    return out;
}

std::optional<DistanceWitness> search_circuit_distance(const DetectorErrorModel& model,
                                                       size_t effort, const BpConfig& bp,
                                                       const OsdConfig& osd) {
    if (model.observable_count == 0) {
        throw std::invalid_argument("search_circuit_distance: model has no observables");
    }
    Decoder dec(model, bp, osd);
    std::optional<DistanceWitness> best;
    size_t budget = std::min(effort, model.mechanism_count());
    for (size_t i = 0; i < budget; i++) {
        if (best && best->weight <= 1) {
            break;
        }
        BitVector syndrome(model.detector_count);
        for (uint32_t d : model.pcm_cols[i]) {
            syndrome.flip(d);
        }
        std::vector<uint8_t> mask(model.mechanism_count(), 0);
        mask[i] = 1;
        DecodeOutcome out = dec.decode(syndrome, mask);
        // candidate = e_i + correction
        std::vector<uint32_t> cand = out.mechanism_estimate;
        auto it = std::lower_bound(cand.begin(), cand.end(), uint32_t(i));
        if (it != cand.end() && *it == uint32_t(i)) {
            continue;  // exclusion failed (defensive; mask forbids this)
        }
        cand.insert(it, uint32_t(i));
        if (!dec.syndrome_of(cand).is_zero()) {
            continue;  // decoder failed to satisfy the syndrome exactly
        }
        BitVector obs = dec.observable_flips(cand);
        if (obs.is_zero()) {
            continue;
        }
        if (!best || cand.size() < best->weight) {
            DistanceWitness w;
            w.weight = cand.size();
            w.mechanisms = cand;
            for (size_t o = 0; o < model.observable_count; o++) {
                if (obs.get(o)) {
                    w.observables_flipped.push_back(uint32_t(o));
                }
            }
            best = std::move(w);
        }
    }
    return best;
}

bool verify_witness(const DetectorErrorModel& model, const DistanceWitness& witness) {
    Decoder dec(model);
    if (!dec.syndrome_of(witness.mechanisms).is_zero()) {
        return false;
    }
    BitVector obs = dec.observable_flips(witness.mechanisms);
    if (obs.is_zero()) {
        return false;
    }
    std::vector<uint32_t> flipped;
    for (size_t o = 0; o < model.observable_count; o++) {
        if (obs.get(o)) {
            flipped.push_back(uint32_t(o));
        }
    }
    return flipped == witness.observables_flipped;
}

std::vector<SweepRow> sweep(const std::vector<SweepCell>& cells, uint64_t shots,
                            uint64_t root_seed, int workers, const BpConfig& bp,
                            const OsdConfig& osd) {
    std::vector<SweepRow> rows;
    for (size_t idx = 0; idx < cells.size(); idx++) {
        const SweepCell& cell = cells[idx];
        SweepRow row;
        row.cell = cell;
        row.shots = shots;
        row.seed = counter_mix(root_seed, 0x5eed5eed, idx);
        try {
            StabilizerCode code = parse_code_spec(cell.code_spec);
            NoiseParams noise = make_noise(code, cell.p, cell.p_ebit);
            CircuitProgram prog = build_experiment(code, cell.kind, noise);
            SignatureTable table = build_signature_table(prog);
            DetectorErrorModel model = extract_dem(prog, table);
            ShotBatch batch = sample(prog, table, shots, row.seed, workers);
            BatchDecodeResult res = decode_batch(model, batch, bp, osd, workers);
            row.ler = ler_interval(res.fails, shots);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string sweep_csv_header() {
    return "code,circuit,p,p_ebit,shots,fails,ler,ler_lo,ler_hi,seed";
}

std::string sweep_row_csv(const SweepRow& row) {
    std::ostringstream out;
    if (!row.error.empty()) {
        out << row.cell.code_spec << ',' << row.cell.kind << ',' << row.cell.p << ','
            << row.cell.p_ebit << ',' << row.shots << ",ERROR,,,," << row.seed;
        return out.str();
    }
    out.precision(12);
    out << row.cell.code_spec << ',' << row.cell.kind << ',' << row.cell.p << ','
        << row.cell.p_ebit << ',' << row.shots << ',' << row.ler.fails << ',' << row.ler.point
        << ',' << row.ler.interval_low << ',' << row.ler.interval_high << ',' << row.seed;
    return out.str();
}

}  // namespace dqc
