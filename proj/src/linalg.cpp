#include "dqc/linalg.hpp"

#include <bit>
#include <numeric>
#include <stdexcept>

namespace dqc {

BitVector BitVector::from_bits(const std::vector<int>& bits) {
    BitVector v(bits.size());
    for (size_t i = 0; i < bits.size(); i++) {
        if (bits[i]) {
            v.set(i, true);
        }
    }
    return v;
}

BitVector& BitVector::operator^=(const BitVector& other) {
    if (len_ != other.len_) {
        throw std::invalid_argument("BitVector XOR length mismatch");
    }
    for (size_t i = 0; i < words_.size(); i++) {
        words_[i] ^= other.words_[i];
    }
    return *this;
}

size_t BitVector::weight() const {
    size_t w = 0;
    for (uint64_t x : words_) {
        w += std::popcount(x);
    }
    return w;
}

bool BitVector::is_zero() const {
    for (uint64_t x : words_) {
        if (x) {
            return false;
        }
    }
    return true;
}

bool BitVector::dot(const BitVector& other) const {
    if (len_ != other.len_) {
        throw std::invalid_argument("BitVector dot length mismatch");
    }
    uint64_t acc = 0;
    for (size_t i = 0; i < words_.size(); i++) {
        acc ^= words_[i] & other.words_[i];
    }
    return std::popcount(acc) & 1;
}

std::vector<size_t> BitVector::ones() const {
    std::vector<size_t> out;
    for (size_t w = 0; w < words_.size(); w++) {
        uint64_t x = words_[w];
        while (x) {
            out.push_back((w << 6) + std::countr_zero(x));
            x &= x - 1;
        }
    }
    return out;
}

BitMatrix BitMatrix::identity(size_t n) {
    BitMatrix m(n, n);
    for (size_t i = 0; i < n; i++) {
        m.set(i, i, true);
    }
    return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<std::vector<int>>& rows, size_t cols) {
    BitMatrix m(rows.size(), cols);
    for (size_t r = 0; r < rows.size(); r++) {
        for (size_t c = 0; c < rows[r].size(); c++) {
            if (rows[r][c]) {
                m.set(r, c, true);
            }
        }
    }
    return m;
}

void BitMatrix::xor_rows(size_t src, size_t dst) {
    uint64_t* d = row_ptr(dst);
    const uint64_t* s = row_ptr(src);
    for (size_t i = 0; i < row_words_; i++) {
        d[i] ^= s[i];
    }
}

void BitMatrix::swap_rows(size_t a, size_t b) {
    if (a == b) {
        return;
    }
    uint64_t* pa = row_ptr(a);
    uint64_t* pb = row_ptr(b);
    for (size_t i = 0; i < row_words_; i++) {
        std::swap(pa[i], pb[i]);
    }
}

BitVector BitMatrix::row(size_t r) const {
    BitVector v(cols_);
    const uint64_t* p = row_ptr(r);
    for (size_t i = 0; i < row_words_; i++) {
        v.words()[i] = p[i];
    }
    return v;
}

void BitMatrix::set_row(size_t r, const BitVector& v) {
    if (v.size() != cols_) {
        throw std::invalid_argument("set_row length mismatch");
    }
    uint64_t* p = row_ptr(r);
    for (size_t i = 0; i < row_words_; i++) {
        p[i] = v.words()[i];
    }
}

size_t BitMatrix::row_weight(size_t r) const {
    const uint64_t* p = row_ptr(r);
    size_t w = 0;
    for (size_t i = 0; i < row_words_; i++) {
        w += std::popcount(p[i]);
    }
    return w;
}

BitMatrix BitMatrix::transposed() const {
    BitMatrix t(cols_, rows_);
    for (size_t r = 0; r < rows_; r++) {
        const uint64_t* p = row_ptr(r);
        for (size_t w = 0; w < row_words_; w++) {
            uint64_t x = p[w];
            while (x) {
                size_t c = (w << 6) + std::countr_zero(x);
                t.set(c, r, true);
                x &= x - 1;
            }
        }
    }
    return t;
}

BitMatrix BitMatrix::multiply(const BitMatrix& other) const {
    if (cols_ != other.rows()) {
        throw std::invalid_argument("BitMatrix multiply dimension mismatch");
    }
    BitMatrix out(rows_, other.cols());
    for (size_t r = 0; r < rows_; r++) {
        const uint64_t* p = row_ptr(r);
        uint64_t* o = out.row_ptr(r);
        for (size_t w = 0; w < row_words_; w++) {
            uint64_t x = p[w];
            while (x) {
                size_t k = (w << 6) + std::countr_zero(x);
                const uint64_t* ok = other.row_ptr(k);
                for (size_t j = 0; j < other.row_words(); j++) {
                    o[j] ^= ok[j];
                }
                x &= x - 1;
            }
        }
    }
    return out;
}

BitVector BitMatrix::multiply(const BitVector& v) const {
    if (v.size() != cols_) {
        throw std::invalid_argument("BitMatrix*BitVector dimension mismatch");
    }
    BitVector out(rows_);
    for (size_t r = 0; r < rows_; r++) {
        const uint64_t* p = row_ptr(r);
        uint64_t acc = 0;
        for (size_t w = 0; w < row_words_; w++) {
            acc ^= p[w] & v.words()[w];
        }
        if (std::popcount(acc) & 1) {
            out.set(r, true);
        }
    }
    return out;
}

bool BitMatrix::is_zero() const {
    for (uint64_t x : words_) {
        if (x) {
            return false;
        }
    }
    return true;
}

bool BitMatrix::operator==(const BitMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && words_ == other.words_;
}

RowReduceResult row_reduce(const BitMatrix& m, const std::vector<size_t>& pivot_order) {
    RowReduceResult res;
    res.reduced = m;
    BitMatrix& a = res.reduced;
    size_t pivot_row = 0;
    for (size_t col : pivot_order) {
        if (pivot_row == a.rows()) {
            break;
        }
        size_t sel = a.rows();
        for (size_t r = pivot_row; r < a.rows(); r++) {
            if (a.get(r, col)) {
                sel = r;
                break;
            }
        }
        if (sel == a.rows()) {
            continue;
        }
        a.swap_rows(pivot_row, sel);
        for (size_t r = 0; r < a.rows(); r++) {
            if (r != pivot_row && a.get(r, col)) {
                a.xor_rows(pivot_row, r);
            }
        }
        res.pivots.push_back(col);
        pivot_row++;
    }
    return res;
}

RowReduceResult row_reduce(const BitMatrix& m) {
    std::vector<size_t> order(m.cols());
    std::iota(order.begin(), order.end(), 0);
    return row_reduce(m, order);
}

size_t rank(const BitMatrix& m) {
    return row_reduce(m).pivots.size();
}

std::optional<BitVector> solve(const BitMatrix& m, const BitVector& b) {
    if (b.size() != m.rows()) {
        throw std::invalid_argument("solve: b length must equal row count");
    }
    // Eliminate on the augmented matrix [m | b].
    BitMatrix aug(m.rows(), m.cols() + 1);
    for (size_t r = 0; r < m.rows(); r++) {
        uint64_t* p = aug.row_ptr(r);
        const uint64_t* s = m.row_ptr(r);
        for (size_t w = 0; w < m.row_words(); w++) {
            p[w] = s[w];
        }
        if (b.get(r)) {
            aug.set(r, m.cols(), true);
        }
    }
    std::vector<size_t> order(m.cols());
    std::iota(order.begin(), order.end(), 0);
    RowReduceResult rr = row_reduce(aug, order);
    // Inconsistent iff some reduced row is 0...0|1.
    BitVector x(m.cols());
    std::vector<bool> is_pivot(m.cols(), false);
    for (size_t i = 0; i < rr.pivots.size(); i++) {
        is_pivot[rr.pivots[i]] = true;
        if (rr.reduced.get(i, m.cols())) {
            x.set(rr.pivots[i], true);
        }
    }
    for (size_t r = rr.pivots.size(); r < m.rows(); r++) {
        if (rr.reduced.get(r, m.cols())) {
            return std::nullopt;
        }
    }
    return x;
}

std::vector<BitVector> kernel_basis(const BitMatrix& m) {
    RowReduceResult rr = row_reduce(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (size_t c : rr.pivots) {
        is_pivot[c] = true;
    }
    std::vector<BitVector> basis;
    for (size_t free_col = 0; free_col < m.cols(); free_col++) {
        if (is_pivot[free_col]) {
            continue;
        }
        BitVector v(m.cols());
        v.set(free_col, true);
        for (size_t i = 0; i < rr.pivots.size(); i++) {
            if (rr.reduced.get(i, free_col)) {
                v.set(rr.pivots[i], true);
            }
        }
        basis.push_back(v);
    }
    return basis;
}

bool in_row_space(const BitMatrix& m, const BitVector& v) {
    return solve(m.transposed(), v).has_value();
}

}  // namespace dqc
