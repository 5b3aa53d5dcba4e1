#include <random>

#include "doctest.h"
#include "dqc/codes.hpp"
#include "dqc/linalg.hpp"

using namespace dqc;

namespace {

// Independent dense elimination oracle over plain byte matrices.
size_t rank_oracle(std::vector<std::vector<int>> m) {
    if (m.empty()) {
        return 0;
    }
    size_t rows = m.size(), cols = m[0].size(), r = 0;
    for (size_t c = 0; c < cols && r < rows; c++) {
        size_t sel = rows;
        for (size_t i = r; i < rows; i++) {
            if (m[i][c]) {
                sel = i;
                break;
            }
        }
        if (sel == rows) {
            continue;
        }
        std::swap(m[r], m[sel]);
        for (size_t i = 0; i < rows; i++) {
            if (i != r && m[i][c]) {
                for (size_t j = 0; j < cols; j++) {
                    m[i][j] ^= m[r][j];
                }
            }
        }
        r++;
    }
    return r;
}

std::vector<std::vector<int>> to_ints(const BitMatrix& m) {
    std::vector<std::vector<int>> out(m.rows(), std::vector<int>(m.cols(), 0));
    for (size_t r = 0; r < m.rows(); r++) {
        for (size_t c = 0; c < m.cols(); c++) {
            out[r][c] = m.get(r, c);
        }
    }
    return out;
}

BitMatrix random_matrix(size_t rows, size_t cols, std::mt19937& rng) {
    BitMatrix m(rows, cols);
    for (size_t r = 0; r < rows; r++) {
        for (size_t c = 0; c < cols; c++) {
            m.set(r, c, rng() & 1);
        }
    }
    return m;
}

}  // namespace

TEST_CASE("rank: identity and zero") {
    CHECK(rank(BitMatrix::identity(3)) == 3);
    CHECK(rank(BitMatrix(4, 7)) == 0);
}

TEST_CASE("rank: BB [[18,4,4]] H_X has rank 7") {
    StabilizerCode code = parse_code_spec("bb l=3 m=3 a=1+x+y b=1+x2+y2");
    CHECK(rank(code.h_x) == 7);
    CHECK(rank(code.h_x) == rank_oracle(to_ints(code.h_x)));
    CHECK(18 - rank(code.h_x) - rank(code.h_z) == 4);
}

TEST_CASE("rank equals rank of transpose") {
    std::mt19937 rng(7);
    for (int it = 0; it < 20; it++) {
        BitMatrix m = random_matrix(6 + it % 5, 9, rng);
        CHECK(rank(m) == rank(m.transposed()));
    }
}

TEST_CASE("row_reduce: identity under natural order") {
    RowReduceResult rr = row_reduce(BitMatrix::identity(3));
    CHECK(rr.reduced == BitMatrix::identity(3));
    CHECK(rr.pivots == std::vector<size_t>{0, 1, 2});
}

TEST_CASE("row_reduce: rank-1 all-ones 2x2") {
    BitMatrix m = BitMatrix::from_rows({{1, 1}, {1, 1}}, 2);
    RowReduceResult rr = row_reduce(m);
    CHECK(rr.pivots.size() == 1);
}

TEST_CASE("row_reduce matches oracle pivot count on random matrices") {
    std::mt19937 rng(11);
    for (int it = 0; it < 10; it++) {
        BitMatrix m = random_matrix(10, 20, rng);
        CHECK(row_reduce(m).pivots.size() == rank_oracle(to_ints(m)));
    }
}

TEST_CASE("row_reduce honors the pivot column order") {
    std::mt19937 rng(13);
    BitMatrix m = random_matrix(8, 12, rng);
    std::vector<size_t> order;
    for (size_t c = 12; c-- > 0;) {
        order.push_back(c);
    }
    RowReduceResult rr = row_reduce(m, order);
    CHECK(rr.pivots.size() == rank(m));
    // pivots must appear in the requested visit order
    for (size_t i = 1; i < rr.pivots.size(); i++) {
        CHECK(rr.pivots[i] < rr.pivots[i - 1]);
    }
}

TEST_CASE("solve: identity returns b; zero matrix flags no-solution") {
    BitVector b = BitVector::from_bits({1, 0, 1});
    auto x = solve(BitMatrix::identity(3), b);
    REQUIRE(x.has_value());
    CHECK(*x == b);

    BitMatrix z(3, 3);
    CHECK(!solve(z, b).has_value());
    CHECK(solve(z, BitVector(3)).has_value());
}

TEST_CASE("solve: substitution reproduces b on random consistent systems") {
    std::mt19937 rng(17);
    for (int it = 0; it < 25; it++) {
        BitMatrix m = random_matrix(9, 14, rng);
        BitVector e(14);
        for (size_t c = 0; c < 14; c++) {
            e.set(c, rng() & 1);
        }
        BitVector b = m.multiply(e);
        auto x = solve(m, b);
        REQUIRE(x.has_value());
        CHECK(m.multiply(*x) == b);
    }
}

TEST_CASE("kernel_basis: identity empty; [1 1] single vector") {
    CHECK(kernel_basis(BitMatrix::identity(4)).empty());
    auto basis = kernel_basis(BitMatrix::from_rows({{1, 1}}, 2));
    REQUIRE(basis.size() == 1);
    CHECK(basis[0] == BitVector::from_bits({1, 1}));
}

TEST_CASE("kernel_basis: [[18,4,4]] H_X null space has dimension 11") {
    StabilizerCode code = parse_code_spec("bb l=3 m=3 a=1+x+y b=1+x2+y2");
    auto basis = kernel_basis(code.h_x);
    CHECK(basis.size() == 18 - 7);
    for (const auto& v : basis) {
        CHECK(code.h_x.multiply(v).is_zero());
    }
    BitMatrix stack(basis.size(), 18);
    for (size_t i = 0; i < basis.size(); i++) {
        stack.set_row(i, basis[i]);
    }
    CHECK(rank(stack) == basis.size());
}

TEST_CASE("kernel vectors annihilate random matrices and are independent") {
    std::mt19937 rng(23);
    BitMatrix m = random_matrix(7, 15, rng);
    auto basis = kernel_basis(m);
    CHECK(basis.size() == 15 - rank(m));
    for (const auto& v : basis) {
        CHECK(m.multiply(v).is_zero());
    }
}

TEST_CASE("BitVector xor length mismatch throws") {
    BitVector a(5), b(6);
    CHECK_THROWS_AS(a ^= b, std::invalid_argument);
}
