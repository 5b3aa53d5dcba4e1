#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dqc/circuit.hpp"

namespace dqc {

/// Affine GF(2) expression over "outcome symbols": one symbol is allocated per
/// non-deterministic measurement of the noiseless circuit. A record parity is
/// deterministic exactly when its combined expression has no symbols left.
struct SymExpr {
    std::vector<uint64_t> sym;  // packed symbol coefficients
    bool c = false;             // constant term

    bool get(size_t i) const {
        size_t w = i >> 6;
        return w < sym.size() && ((sym[w] >> (i & 63)) & 1u);
    }
    void flip(size_t i) {
        size_t w = i >> 6;
        if (w >= sym.size()) {
            sym.resize(w + 1, 0);
        }
        sym[w] ^= uint64_t(1) << (i & 63);
    }
    void xor_with(const SymExpr& other) {
        if (other.sym.size() > sym.size()) {
            sym.resize(other.sym.size(), 0);
        }
        for (size_t i = 0; i < other.sym.size(); i++) {
            sym[i] ^= other.sym[i];
        }
        c ^= other.c;
    }
    bool symbol_free() const {
        for (uint64_t w : sym) {
            if (w) {
                return false;
            }
        }
        return true;
    }
    int highest_symbol() const {  // -1 if none
        for (size_t i = sym.size(); i-- > 0;) {
            if (sym[i]) {
                return int((i << 6) + 63 - __builtin_clzll(sym[i]));
            }
        }
        return -1;
    }
};

/// Stabilizer tableau (Aaronson-Gottesman, with destabilizers) whose
/// stabilizer signs are affine expressions in outcome symbols. Classically
/// controlled Paulis conditioned on earlier outcomes stay exactly
/// representable: they only add record expressions to signs.
class SymbolicTableau {
  public:
    explicit SymbolicTableau(size_t n);

    void apply_h(uint32_t q);
    void apply_cnot(uint32_t c, uint32_t t);
    void apply_x(uint32_t q);
    void apply_z(uint32_t q);
    void apply_cond_x(uint32_t q, const SymExpr& cond);
    void apply_cond_z(uint32_t q, const SymExpr& cond);

    SymExpr measure_z(uint32_t q);
    SymExpr measure_x(uint32_t q);
    void reset_z(uint32_t q);
    void reset_x(uint32_t q);

    size_t symbol_count() const { return symbols_; }

  private:
    size_t n_, words_;
    // rows [0,n) destabilizers, [n,2n) stabilizers
    std::vector<uint64_t> xs_, zs_;  // (2n) x words_ each
    std::vector<uint8_t> phase_;     // mod 4
    std::vector<SymExpr> sign_;      // stabilizer rows only (index by row - n)
    size_t symbols_ = 0;

    bool xbit(size_t row, uint32_t q) const { return (xs_[row * words_ + (q >> 6)] >> (q & 63)) & 1u; }
    bool zbit(size_t row, uint32_t q) const { return (zs_[row * words_ + (q >> 6)] >> (q & 63)) & 1u; }
    void rowsum(size_t target, size_t source, bool track_phase);
    SymExpr measure(uint32_t q, bool x_basis);
};

/// Runs the noiseless circuit through the tableau and returns one expression
/// per measurement record (records in emission order). Noise instructions and
/// annotations are ignored; BELL_INIT prepares an exact Bell pair.
std::vector<SymExpr> symbolic_record_expressions(const CircuitProgram& program);

/// Incremental GF(2) elimination over record expressions. Records (and
/// grouped "atoms" standing for fixed record parities) are inserted in
/// chronological order; solving reports which earlier items combine with a
/// target expression to make it symbol-free.
class RecordBasis {
  public:
    // items are identified by dense ids in insertion order
    struct Item {
        SymExpr residual;
        std::vector<uint32_t> records;  // record parity this item stands for
    };

    // Returns false if the item was dependent (already spanned).
    bool insert(const SymExpr& expr, std::vector<uint32_t> records);

    // Reduces target to symbol-free using inserted items; on success returns
    // the XOR-accumulated record set and sets *constant to the leftover
    // constant bit. Returns std::nullopt if the target is not resolvable.
    std::optional<std::vector<uint32_t>> solve(const SymExpr& target, bool* constant) const;

    // Reduces as far as the basis allows and returns the residual together
    // with the record parity used so far.
    std::pair<SymExpr, std::vector<uint32_t>> partial_reduce(const SymExpr& target) const;

  private:
    std::vector<Item> items_;                 // staircase, one pivot each
    std::vector<int> pivot_owner_;            // symbol -> item index or -1
};

}  // namespace dqc
