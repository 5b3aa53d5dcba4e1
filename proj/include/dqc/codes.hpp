#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dqc/linalg.hpp"

namespace dqc {

/// One term x^a y^b of a bivariate polynomial over F_2[x,y]/(x^l-1, y^m-1).
struct MonomialTerm {
    unsigned x_exp = 0;
    unsigned y_exp = 0;
};

struct BBParams {
    unsigned l = 0;
    unsigned m = 0;
    std::vector<MonomialTerm> a_terms;  // exactly 3 distinct terms
    std::vector<MonomialTerm> b_terms;
};

enum class CodeFamily { BB, Surface, Other };

struct StabilizerCode {
    std::string name;
    CodeFamily family = CodeFamily::Other;
    size_t n = 0;
    size_t k = 0;
    std::optional<size_t> d;  // claimed distance, metadata only
    BitMatrix h_x;            // X-type checks, one row per check
    BitMatrix h_z;
    std::vector<BitVector> logical_z;  // k representatives, length-n supports
    std::vector<BitVector> logical_x;
    // Ordered data-qubit supports per check; the order fixes the CNOT
    // schedule of syndrome extraction (monomial order for BB, geometric for
    // surface codes).
    std::vector<std::vector<uint32_t>> x_order;
    std::vector<std::vector<uint32_t>> z_order;

    size_t check_count() const { return h_x.rows() + h_z.rows(); }
};

struct CodeReport {
    size_t n = 0;
    size_t k = 0;
    std::optional<size_t> d_claimed;
    double encoding_rate = 0.0;  // k / (n + check_count)
};

/// Builds the bivariate-bicycle code H_X = [A|B], H_Z = [B^T|A^T] with
/// x = S_l (x) I_m and y = I_l (x) S_m. Throws if the construction does not
/// satisfy the CSS condition (indicates a bug, not user error).
StabilizerCode build_bb(const BBParams& params);

/// Rotated surface code on a d x d grid, d odd and >= 3. Data qubit (r,c) has
/// index r*d + c. Face type is X when (r+c) is odd; X half-faces sit on the
/// top/bottom edges, Z half-faces on the left/right. Logical Z is row 0,
/// logical X is column 0.
StabilizerCode build_rotated_sc(size_t d);

/// Recomputes k logical operator pairs from the check matrices. The returned
/// pairs satisfy: logical_z[i] commutes with every X check and is outside the
/// Z-check row space (symmetrically for logical_x), and z[i] anticommutes
/// with x[j] exactly when i == j.
std::pair<std::vector<BitVector>, std::vector<BitVector>> logical_operators(
    const StabilizerCode& code);

/// Exhaustive minimum weight of a Pauli commuting with all checks but outside
/// the stabilizer group. Returns nullopt if no such operator has weight
/// <= w_max. Throws if the search space exceeds the budget.
std::optional<size_t> min_logical_weight_bruteforce(const StabilizerCode& code, size_t w_max,
                                                    uint64_t budget = 400000000ull);

CodeReport make_report(const StabilizerCode& code);

/// Parses a one-line code description: `bb l=3 m=3 a=1+x+y b=1+x2+y2` or
/// `sc d=5`. Exponents use the compact syntax x2y1; a bare `1` is the
/// constant term. Throws std::invalid_argument with a message on bad input.
StabilizerCode parse_code_spec(const std::string& line);

/// Check matrices as sparse row lists (`X0: 1 4 9` style), for inspection.
std::string dump_check_matrices(const StabilizerCode& code);

}  // namespace dqc
