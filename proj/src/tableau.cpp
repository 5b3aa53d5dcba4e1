#include "dqc/tableau.hpp"

#include <bit>
#include <optional>
#include <stdexcept>

namespace dqc {

SymbolicTableau::SymbolicTableau(size_t n)
    : n_(n), words_((n + 63) / 64), xs_(2 * n * words_, 0), zs_(2 * n * words_, 0),
      phase_(2 * n, 0), sign_(n) {
    // |0...0>: destabilizer i = X_i, stabilizer i = Z_i
    for (size_t i = 0; i < n; i++) {
        xs_[i * words_ + (i >> 6)] |= uint64_t(1) << (i & 63);
        zs_[(n + i) * words_ + (i >> 6)] |= uint64_t(1) << (i & 63);
    }
}

void SymbolicTableau::apply_h(uint32_t q) {
    size_t w = q >> 6;
    uint64_t mask = uint64_t(1) << (q & 63);
    for (size_t r = 0; r < 2 * n_; r++) {
        uint64_t& x = xs_[r * words_ + w];
        uint64_t& z = zs_[r * words_ + w];
        bool xb = x & mask, zb = z & mask;
        if (xb && zb) {
            phase_[r] = uint8_t((phase_[r] + 2) & 3);
        }
        if (xb != zb) {
            x ^= mask;
            z ^= mask;
        }
    }
}

void SymbolicTableau::apply_cnot(uint32_t c, uint32_t t) {
    size_t wc = c >> 6, wt = t >> 6;
    uint64_t mc = uint64_t(1) << (c & 63), mt = uint64_t(1) << (t & 63);
    for (size_t r = 0; r < 2 * n_; r++) {
        uint64_t* x = &xs_[r * words_];
        uint64_t* z = &zs_[r * words_];
        bool xc = x[wc] & mc, zc = z[wc] & mc;
        bool xt = x[wt] & mt, zt = z[wt] & mt;
        if (xc && zt && (xt == zc)) {
            phase_[r] = uint8_t((phase_[r] + 2) & 3);
        }
        if (xc) {
            x[wt] ^= mt;
        }
        if (zt) {
            z[wc] ^= mc;
        }
    }
}

void SymbolicTableau::apply_x(uint32_t q) {
    for (size_t r = 0; r < 2 * n_; r++) {
        if (zbit(r, q)) {
            phase_[r] = uint8_t((phase_[r] + 2) & 3);
        }
    }
}

void SymbolicTableau::apply_z(uint32_t q) {
    for (size_t r = 0; r < 2 * n_; r++) {
        if (xbit(r, q)) {
            phase_[r] = uint8_t((phase_[r] + 2) & 3);
        }
    }
}

void SymbolicTableau::apply_cond_x(uint32_t q, const SymExpr& cond) {
    for (size_t r = n_; r < 2 * n_; r++) {
        if (zbit(r, q)) {
            sign_[r - n_].xor_with(cond);
        }
    }
    // destabilizer phases are never consulted; skip them
}

void SymbolicTableau::apply_cond_z(uint32_t q, const SymExpr& cond) {
    for (size_t r = n_; r < 2 * n_; r++) {
        if (xbit(r, q)) {
            sign_[r - n_].xor_with(cond);
        }
    }
}

void SymbolicTableau::rowsum(size_t target, size_t source, bool track_phase) {
    uint64_t* xt = &xs_[target * words_];
    uint64_t* zt = &zs_[target * words_];
    const uint64_t* xs = &xs_[source * words_];
    const uint64_t* zs = &zs_[source * words_];
    if (track_phase) {
        int acc = 0;
        for (size_t w = 0; w < words_; w++) {
            uint64_t x1 = xs[w], z1 = zs[w], x2 = xt[w], z2 = zt[w];
            uint64_t pos = (x1 & ~z1 & x2 & z2) | (~x1 & z1 & x2 & ~z2) | (x1 & z1 & ~x2 & z2);
            uint64_t neg = (x1 & ~z1 & ~x2 & z2) | (~x1 & z1 & x2 & z2) | (x1 & z1 & x2 & ~z2);
            acc += std::popcount(pos) - std::popcount(neg);
        }
        phase_[target] = uint8_t((int(phase_[target]) + int(phase_[source]) + acc) & 3);
        if (target >= n_ && source >= n_) {
            sign_[target - n_].xor_with(sign_[source - n_]);
        }
    }
    for (size_t w = 0; w < words_; w++) {
        xt[w] ^= xs[w];
        zt[w] ^= zs[w];
    }
}

SymExpr SymbolicTableau::measure(uint32_t q, bool x_basis) {
    auto anticommutes = [&](size_t row) {
        return x_basis ? zbit(row, q) : xbit(row, q);
    };
    size_t pivot = 2 * n_;
    for (size_t r = n_; r < 2 * n_; r++) {
        if (anticommutes(r)) {
            pivot = r;
            break;
        }
    }
    if (pivot < 2 * n_) {
        // Random outcome: allocate a symbol.
        for (size_t r = 0; r < 2 * n_; r++) {
            if (r != pivot && anticommutes(r)) {
                rowsum(r, pivot, /*track_phase=*/r >= n_);
            }
        }
        // destabilizer partner takes the old stabilizer row
        size_t d = pivot - n_;
        for (size_t w = 0; w < words_; w++) {
            xs_[d * words_ + w] = xs_[pivot * words_ + w];
            zs_[d * words_ + w] = zs_[pivot * words_ + w];
        }
        phase_[d] = phase_[pivot];
        // new stabilizer = (+/-) measured Pauli with fresh symbol
        for (size_t w = 0; w < words_; w++) {
            xs_[pivot * words_ + w] = 0;
            zs_[pivot * words_ + w] = 0;
        }
        if (x_basis) {
            xs_[pivot * words_ + (q >> 6)] |= uint64_t(1) << (q & 63);
        } else {
            zs_[pivot * words_ + (q >> 6)] |= uint64_t(1) << (q & 63);
        }
        phase_[pivot] = 0;
        SymExpr e;
        e.flip(symbols_);
        sign_[pivot - n_] = e;
        symbols_++;
        return e;
    }

    // Deterministic: accumulate the product of stabilizers indicated by
    // anticommuting destabilizers into a scratch row.
    std::vector<uint64_t> sx(words_, 0), sz(words_, 0);
    int acc_phase = 0;
    SymExpr expr;
    for (size_t i = 0; i < n_; i++) {
        bool anti = x_basis ? zbit(i, q) : xbit(i, q);
        if (!anti) {
            continue;
        }
        const uint64_t* px = &xs_[(n_ + i) * words_];
        const uint64_t* pz = &zs_[(n_ + i) * words_];
        int acc = 0;
        for (size_t w = 0; w < words_; w++) {
            uint64_t x1 = px[w], z1 = pz[w], x2 = sx[w], z2 = sz[w];
            uint64_t pos = (x1 & ~z1 & x2 & z2) | (~x1 & z1 & x2 & ~z2) | (x1 & z1 & ~x2 & z2);
            uint64_t neg = (x1 & ~z1 & ~x2 & z2) | (~x1 & z1 & x2 & z2) | (x1 & z1 & x2 & ~z2);
            acc += std::popcount(pos) - std::popcount(neg);
            sx[w] ^= x1;
            sz[w] ^= z1;
        }
        acc_phase = (acc_phase + int(phase_[n_ + i]) + acc) & 3;
        expr.xor_with(sign_[i]);
    }
    // scratch must equal the measured Pauli
    for (size_t w = 0; w < words_; w++) {
        uint64_t want_x = 0, want_z = 0;
        if ((q >> 6) == w) {
            (x_basis ? want_x : want_z) = uint64_t(1) << (q & 63);
        }
        if (sx[w] != want_x || sz[w] != want_z) {
            throw std::logic_error("SymbolicTableau: deterministic measurement reconstruction failed");
        }
    }
    if (acc_phase & 1) {
        throw std::logic_error("SymbolicTableau: imaginary phase in measurement");
    }
    expr.c ^= (acc_phase >> 1) & 1;
    return expr;
}

SymExpr SymbolicTableau::measure_z(uint32_t q) { return measure(q, false); }
SymExpr SymbolicTableau::measure_x(uint32_t q) { return measure(q, true); }

void SymbolicTableau::reset_z(uint32_t q) {
    SymExpr outcome = measure_z(q);
    apply_cond_x(q, outcome);  // flip back to |0> whenever the outcome was 1
}

void SymbolicTableau::reset_x(uint32_t q) {
    SymExpr outcome = measure_x(q);
    apply_cond_z(q, outcome);
}

std::vector<SymExpr> symbolic_record_expressions(const CircuitProgram& program) {
    SymbolicTableau tab(program.qubit_count);
    std::vector<SymExpr> records;
    records.reserve(program.measurement_count);
    for (const auto& ins : program.instructions) {
        switch (ins.op) {
            case Op::RESET_Z:
                for (uint32_t q : ins.qubits) {
                    tab.reset_z(q);
                }
                break;
            case Op::RESET_X:
                for (uint32_t q : ins.qubits) {
                    tab.reset_x(q);
                }
                break;
            case Op::MEASURE_Z:
                for (uint32_t q : ins.qubits) {
                    records.push_back(tab.measure_z(q));
                }
                break;
            case Op::MEASURE_X:
                for (uint32_t q : ins.qubits) {
                    records.push_back(tab.measure_x(q));
                }
                break;
            case Op::H:
                for (uint32_t q : ins.qubits) {
                    tab.apply_h(q);
                }
                break;
            case Op::CNOT:
                for (size_t i = 0; i + 1 < ins.qubits.size(); i += 2) {
                    tab.apply_cnot(ins.qubits[i], ins.qubits[i + 1]);
                }
                break;
            case Op::PAULI_X:
                for (uint32_t q : ins.qubits) {
                    tab.apply_x(q);
                }
                break;
            case Op::PAULI_Z:
                for (uint32_t q : ins.qubits) {
                    tab.apply_z(q);
                }
                break;
            case Op::COND_X:
                tab.apply_cond_x(ins.qubits[0], records.at(ins.recs[0]));
                break;
            case Op::COND_Z:
                tab.apply_cond_z(ins.qubits[0], records.at(ins.recs[0]));
                break;
            case Op::BELL_INIT:
                for (size_t i = 0; i + 1 < ins.qubits.size(); i += 2) {
                    tab.reset_z(ins.qubits[i]);
                    tab.reset_z(ins.qubits[i + 1]);
                    tab.apply_h(ins.qubits[i]);
                    tab.apply_cnot(ins.qubits[i], ins.qubits[i + 1]);
                }
                break;
            default:
                break;  // noise, TICK, DETECTOR, OBSERVABLE
        }
    }
    return records;
}

bool RecordBasis::insert(const SymExpr& expr, std::vector<uint32_t> records) {
    SymExpr residual = expr;
    // XOR-accumulate records of used pivots
    std::vector<uint32_t> acc = std::move(records);
    auto xor_records = [&](const std::vector<uint32_t>& other) {
        // symmetric difference of sorted sets
        std::vector<uint32_t> merged;
        merged.reserve(acc.size() + other.size());
        size_t i = 0, j = 0;
        while (i < acc.size() && j < other.size()) {
            if (acc[i] < other[j]) {
                merged.push_back(acc[i++]);
            } else if (other[j] < acc[i]) {
                merged.push_back(other[j++]);
            } else {
                i++;
                j++;
            }
        }
        merged.insert(merged.end(), acc.begin() + i, acc.end());
        merged.insert(merged.end(), other.begin() + j, other.end());
        acc = std::move(merged);
    };
    int h;
    while ((h = residual.highest_symbol()) >= 0) {
        if (size_t(h) >= pivot_owner_.size() || pivot_owner_[h] < 0) {
            break;
        }
        const Item& it = items_[pivot_owner_[h]];
        residual.xor_with(it.residual);
        xor_records(it.records);
    }
    if (h < 0) {
        return false;  // dependent
    }
    if (size_t(h) >= pivot_owner_.size()) {
        pivot_owner_.resize(h + 1, -1);
    }
    pivot_owner_[h] = int(items_.size());
    items_.push_back(Item{std::move(residual), std::move(acc)});
    return true;
}

std::optional<std::vector<uint32_t>> RecordBasis::solve(const SymExpr& target,
                                                        bool* constant) const {
    auto [residual, acc] = partial_reduce(target);
    if (!residual.symbol_free()) {
        return std::nullopt;
    }
    if (constant) {
        *constant = residual.c;
    }
    return acc;
}

std::pair<SymExpr, std::vector<uint32_t>> RecordBasis::partial_reduce(
    const SymExpr& target) const {
    SymExpr residual = target;
    std::vector<uint32_t> acc;
    auto xor_records = [&](const std::vector<uint32_t>& other) {
        std::vector<uint32_t> merged;
        merged.reserve(acc.size() + other.size());
        size_t i = 0, j = 0;
        while (i < acc.size() && j < other.size()) {
            if (acc[i] < other[j]) {
                merged.push_back(acc[i++]);
            } else if (other[j] < acc[i]) {
                merged.push_back(other[j++]);
            } else {
                i++;
                j++;
            }
        }
        merged.insert(merged.end(), acc.begin() + i, acc.end());
        merged.insert(merged.end(), other.begin() + j, other.end());
        acc = std::move(merged);
    };
    // Item residuals never contain symbols above their own pivot, so a single
    // downward sweep fully reduces; unowned symbols are parked aside.
    SymExpr parked;
    int h;
    while ((h = residual.highest_symbol()) >= 0) {
        if (size_t(h) >= pivot_owner_.size() || pivot_owner_[h] < 0) {
            parked.flip(size_t(h));
            residual.flip(size_t(h));
            continue;
        }
        const Item& it = items_[pivot_owner_[h]];
        residual.xor_with(it.residual);
        xor_records(it.records);
    }
    parked.c = residual.c;
    return {std::move(parked), std::move(acc)};
}

}  // namespace dqc
