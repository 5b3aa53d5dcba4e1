#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace dqc {

/// Packed GF(2) vector. Bit i lives at word i/64, bit i%64 (LSB first).
class BitVector {
  public:
    BitVector() = default;
    explicit BitVector(size_t len) : len_(len), words_(word_count(len), 0) {}

    static BitVector from_bits(const std::vector<int>& bits);

    size_t size() const { return len_; }

    bool get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

    void set(size_t i, bool v) {
        uint64_t mask = uint64_t(1) << (i & 63);
        if (v) {
            words_[i >> 6] |= mask;
        } else {
            words_[i >> 6] &= ~mask;
        }
    }

    void flip(size_t i) { words_[i >> 6] ^= uint64_t(1) << (i & 63); }

    // In-place XOR; lengths must match.
    BitVector& operator^=(const BitVector& other);
    BitVector operator^(const BitVector& other) const {
        BitVector r = *this;
        r ^= other;
        return r;
    }

    bool operator==(const BitVector& other) const {
        return len_ == other.len_ && words_ == other.words_;
    }

    size_t weight() const;
    bool is_zero() const;

    // Parity of the AND of two equal-length vectors (GF(2) dot product).
    bool dot(const BitVector& other) const;

    std::vector<size_t> ones() const;

    const std::vector<uint64_t>& words() const { return words_; }
    std::vector<uint64_t>& words() { return words_; }

    static size_t word_count(size_t bits) { return (bits + 63) / 64; }

  private:
    size_t len_ = 0;
    std::vector<uint64_t> words_;
};

/// Dense packed GF(2) matrix, row-major. Rows are contiguous so row XOR is a
/// word-wise loop; dimensions are fixed at construction.
class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(size_t rows, size_t cols)
        : rows_(rows), cols_(cols), row_words_(BitVector::word_count(cols)),
          words_(rows * row_words_, 0) {}

    static BitMatrix identity(size_t n);
    static BitMatrix from_rows(const std::vector<std::vector<int>>& rows, size_t cols);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    bool get(size_t r, size_t c) const {
        return (words_[r * row_words_ + (c >> 6)] >> (c & 63)) & 1u;
    }

    void set(size_t r, size_t c, bool v) {
        uint64_t mask = uint64_t(1) << (c & 63);
        uint64_t& w = words_[r * row_words_ + (c >> 6)];
        if (v) {
            w |= mask;
        } else {
            w &= ~mask;
        }
    }

    void xor_rows(size_t src, size_t dst);  // row dst ^= row src
    void swap_rows(size_t a, size_t b);

    BitVector row(size_t r) const;
    void set_row(size_t r, const BitVector& v);
    size_t row_weight(size_t r) const;

    BitMatrix transposed() const;
    BitMatrix multiply(const BitMatrix& other) const;
    BitVector multiply(const BitVector& v) const;  // m * v (v indexed by cols)

    bool is_zero() const;
    bool operator==(const BitMatrix& other) const;

    const uint64_t* row_ptr(size_t r) const { return words_.data() + r * row_words_; }
    uint64_t* row_ptr(size_t r) { return words_.data() + r * row_words_; }
    size_t row_words() const { return row_words_; }

  private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    size_t row_words_ = 0;
    std::vector<uint64_t> words_;
};

struct RowReduceResult {
    BitMatrix reduced;           // reduced row-echelon form under the column order
    std::vector<size_t> pivots;  // pivot columns, in elimination order
};

size_t rank(const BitMatrix& m);

// Reduced row-echelon form visiting columns in pivot_order (a permutation of
// all columns, or a prefix thereof; remaining columns are never pivoted).
RowReduceResult row_reduce(const BitMatrix& m, const std::vector<size_t>& pivot_order);
RowReduceResult row_reduce(const BitMatrix& m);

// Solve m*x = b over GF(2). Returns one solution, or nullopt if inconsistent.
std::optional<BitVector> solve(const BitMatrix& m, const BitVector& b);

// Basis of the null space {v : m*v = 0}; size = cols - rank.
std::vector<BitVector> kernel_basis(const BitMatrix& m);

// True iff v lies in the row space of m.
bool in_row_space(const BitMatrix& m, const BitVector& v);

}  // namespace dqc
