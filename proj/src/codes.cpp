#include "dqc/codes.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace dqc {

namespace {

// Permutation matrix of x^a y^b acting on the lm cyclic positions (u, v):
// (u, v) -> (u + a mod l, v + b mod m), as an lm x lm GF(2) matrix.
BitMatrix monomial_matrix(unsigned l, unsigned m, const MonomialTerm& t) {
    BitMatrix mat(size_t(l) * m, size_t(l) * m);
    for (unsigned u = 0; u < l; u++) {
        for (unsigned v = 0; v < m; v++) {
            unsigned uu = (u + t.x_exp) % l;
            unsigned vv = (v + t.y_exp) % m;
            mat.set(size_t(u) * m + v, size_t(uu) * m + vv, true);
        }
    }
    return mat;
}

BitMatrix poly_matrix(unsigned l, unsigned m, const std::vector<MonomialTerm>& terms) {
    BitMatrix acc(size_t(l) * m, size_t(l) * m);
    for (const auto& t : terms) {
        BitMatrix mono = monomial_matrix(l, m, t);
        for (size_t r = 0; r < acc.rows(); r++) {
            acc.row_ptr(r);
            for (size_t w = 0; w < acc.row_words(); w++) {
                acc.row_ptr(r)[w] ^= mono.row_ptr(r)[w];
            }
        }
    }
    return acc;
}

void validate_css(const StabilizerCode& code, const char* what) {
    BitMatrix prod = code.h_x.multiply(code.h_z.transposed());
    if (!prod.is_zero()) {
        throw std::runtime_error(std::string(what) + ": CSS condition H_X*H_Z^T = 0 violated");
    }
}

size_t compute_k(const StabilizerCode& code) {
    return code.n - rank(code.h_x) - rank(code.h_z);
}

}  // namespace

StabilizerCode build_bb(const BBParams& params) {
    if (params.l < 1 || params.m < 1) {
        throw std::invalid_argument("build_bb: l and m must be >= 1");
    }
    if (params.a_terms.size() != 3 || params.b_terms.size() != 3) {
        throw std::invalid_argument("build_bb: a and b need exactly 3 terms");
    }
    auto check_distinct = [&](const std::vector<MonomialTerm>& ts, const char* name) {
        for (size_t i = 0; i < ts.size(); i++) {
            for (size_t j = i + 1; j < ts.size(); j++) {
                unsigned xi = ts[i].x_exp % params.l, xj = ts[j].x_exp % params.l;
                unsigned yi = ts[i].y_exp % params.m, yj = ts[j].y_exp % params.m;
                if (xi == xj && yi == yj) {
                    throw std::invalid_argument(std::string("build_bb: repeated term in ") + name);
                }
            }
        }
    };
    check_distinct(params.a_terms, "a");
    check_distinct(params.b_terms, "b");

    size_t lm = size_t(params.l) * params.m;
    BitMatrix a = poly_matrix(params.l, params.m, params.a_terms);
    BitMatrix b = poly_matrix(params.l, params.m, params.b_terms);
    BitMatrix at = a.transposed();
    BitMatrix bt = b.transposed();

    StabilizerCode code;
    code.n = 2 * lm;
    code.h_x = BitMatrix(lm, 2 * lm);
    code.h_z = BitMatrix(lm, 2 * lm);
    for (size_t r = 0; r < lm; r++) {
        for (size_t c = 0; c < lm; c++) {
            if (a.get(r, c)) {
                code.h_x.set(r, c, true);
            }
            if (b.get(r, c)) {
                code.h_x.set(r, lm + c, true);
            }
            if (bt.get(r, c)) {
                code.h_z.set(r, c, true);
            }
            if (at.get(r, c)) {
                code.h_z.set(r, lm + c, true);
            }
        }
    }
    validate_css(code, "build_bb");
    code.family = CodeFamily::BB;
    code.k = compute_k(code);
    {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "bb_l%um%u_n%zu_k%zu", params.l, params.m, code.n, code.k);
        code.name = buf;
    }

    // CNOT schedule: X-check r touches the a-term images on the left half and
    // b-term images on the right; Z-check r touches the b-term preimages then
    // a-term preimages. Term order is preserved from the input polynomials.
    auto perm_of = [&](const MonomialTerm& t, size_t r, bool inverse) {
        unsigned u = unsigned(r / params.m), v = unsigned(r % params.m);
        unsigned uu, vv;
        if (!inverse) {
            uu = (u + t.x_exp) % params.l;
            vv = (v + t.y_exp) % params.m;
        } else {
            uu = (u + params.l - t.x_exp % params.l) % params.l;
            vv = (v + params.m - t.y_exp % params.m) % params.m;
        }
        return size_t(uu) * params.m + vv;
    };
    code.x_order.resize(lm);
    code.z_order.resize(lm);
    for (size_t r = 0; r < lm; r++) {
        for (const auto& t : params.a_terms) {
            code.x_order[r].push_back(uint32_t(perm_of(t, r, false)));
        }
        for (const auto& t : params.b_terms) {
            code.x_order[r].push_back(uint32_t(lm + perm_of(t, r, false)));
        }
        for (const auto& t : params.b_terms) {
            code.z_order[r].push_back(uint32_t(perm_of(t, r, true)));
        }
        for (const auto& t : params.a_terms) {
            code.z_order[r].push_back(uint32_t(lm + perm_of(t, r, true)));
        }
    }

    auto [lz, lx] = logical_operators(code);
    code.logical_z = std::move(lz);
    code.logical_x = std::move(lx);
    return code;
}

StabilizerCode build_rotated_sc(size_t d) {
    if (d < 3 || d % 2 == 0) {
        throw std::invalid_argument("build_rotated_sc: d must be odd and >= 3");
    }
    StabilizerCode code;
    code.n = d * d;
    code.d = d;

    auto qubit = [&](long r, long c) -> long {
        if (r < 0 || c < 0 || r >= long(d) || c >= long(d)) {
            return -1;
        }
        return r * long(d) + c;
    };

    std::vector<std::vector<int>> x_rows, z_rows;
    // Face anchors (r, c) cover data {(r,c),(r,c+1),(r+1,c),(r+1,c+1)}.
    for (long r = -1; r < long(d); r++) {
        for (long c = -1; c < long(d); c++) {
            bool is_x = ((r + c) & 1) != 0;
            std::vector<long> cells;
            for (long q : {qubit(r, c), qubit(r, c + 1), qubit(r + 1, c), qubit(r + 1, c + 1)}) {
                if (q >= 0) {
                    cells.push_back(q);
                }
            }
            if (cells.size() < 2) {
                continue;
            }
            bool bulk = cells.size() == 4;
            if (!bulk) {
                bool top_bottom = (r == -1 || r == long(d) - 1);
                // X half-faces only on top/bottom, Z only on left/right.
                if (is_x != top_bottom) {
                    continue;
                }
            }
            std::vector<int> row(code.n, 0);
            std::vector<uint32_t> order;
            for (long q : cells) {
                row[size_t(q)] = 1;
                order.push_back(uint32_t(q));
            }
            (is_x ? x_rows : z_rows).push_back(std::move(row));
            (is_x ? code.x_order : code.z_order).push_back(std::move(order));
        }
    }
    code.h_x = BitMatrix::from_rows(x_rows, code.n);
    code.h_z = BitMatrix::from_rows(z_rows, code.n);
    validate_css(code, "build_rotated_sc");
    code.family = CodeFamily::Surface;
    code.k = compute_k(code);
    if (code.k != 1) {
        throw std::runtime_error("build_rotated_sc: expected k = 1");
    }

    // Logical Z along row 0, logical X along column 0.
    BitVector lz(code.n), lx(code.n);
    for (size_t c = 0; c < d; c++) {
        lz.set(c, true);
    }
    for (size_t r = 0; r < d; r++) {
        lx.set(r * d, true);
    }
    if (!code.h_x.multiply(lz).is_zero() || !code.h_z.multiply(lx).is_zero() || !lz.dot(lx)) {
        throw std::runtime_error("build_rotated_sc: logical string convention broken");
    }
    code.logical_z = {lz};
    code.logical_x = {lx};
    {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "sc_d%zu", d);
        code.name = buf;
    }
    return code;
}

std::pair<std::vector<BitVector>, std::vector<BitVector>> logical_operators(
    const StabilizerCode& code) {
    // Z-type logicals: ker(H_X) modulo rowspace(H_Z); X-type symmetrically.
    auto coset_reps = [&](const BitMatrix& kernel_of, const BitMatrix& modulo) {
        std::vector<BitVector> reps;
        std::vector<BitVector> span_rows;  // accumulated rowspace(modulo) + chosen reps
        BitMatrix probe(modulo.rows(), code.n);
        for (size_t r = 0; r < modulo.rows(); r++) {
            probe.set_row(r, modulo.row(r));
        }
        auto independent = [&](const BitVector& v) {
            BitMatrix aug(probe.rows() + span_rows.size() + 1, code.n);
            for (size_t r = 0; r < probe.rows(); r++) {
                aug.set_row(r, probe.row(r));
            }
            for (size_t i = 0; i < span_rows.size(); i++) {
                aug.set_row(probe.rows() + i, span_rows[i]);
            }
            aug.set_row(probe.rows() + span_rows.size(), v);
            return rank(aug) == rank(probe) + span_rows.size() + 1;
        };
        size_t base_rank = rank(probe);
        (void)base_rank;
        for (const BitVector& v : kernel_basis(kernel_of)) {
            if (independent(v)) {
                span_rows.push_back(v);
                reps.push_back(v);
                if (reps.size() == code.k) {
                    break;
                }
            }
        }
        return reps;
    };

    std::vector<BitVector> lz = coset_reps(code.h_x, code.h_z);
    std::vector<BitVector> lx = coset_reps(code.h_z, code.h_x);
    if (lz.size() != code.k || lx.size() != code.k) {
        throw std::runtime_error("logical_operators: failed to extract k independent pairs");
    }

    // Pair them symplectically: transform lx so that <z_i, x_j> = delta_ij.
    BitMatrix overlap(code.k, code.k);
    for (size_t i = 0; i < code.k; i++) {
        for (size_t j = 0; j < code.k; j++) {
            overlap.set(i, j, lz[i].dot(lx[j]));
        }
    }
    // Invert the overlap matrix (it is nondegenerate for a valid code).
    BitMatrix aug(code.k, 2 * code.k);
    for (size_t i = 0; i < code.k; i++) {
        for (size_t j = 0; j < code.k; j++) {
            aug.set(i, j, overlap.get(i, j));
        }
        aug.set(i, code.k + i, true);
    }
    RowReduceResult rr = row_reduce(aug);
    if (rr.pivots.size() < code.k ||
        !std::all_of(rr.pivots.begin(), rr.pivots.end(), [&](size_t p) { return p < code.k; })) {
        throw std::runtime_error("logical_operators: degenerate logical pairing");
    }
    BitMatrix inv(code.k, code.k);
    for (size_t i = 0; i < code.k; i++) {
        for (size_t j = 0; j < code.k; j++) {
            inv.set(i, j, rr.reduced.get(i, code.k + j));
        }
    }
    std::vector<BitVector> lx_paired(code.k, BitVector(code.n));
    for (size_t j = 0; j < code.k; j++) {
        BitVector v(code.n);
        for (size_t t = 0; t < code.k; t++) {
            if (inv.get(t, j)) {
                v ^= lx[t];
            }
        }
        lx_paired[j] = v;
    }
    return {lz, lx_paired};
}

std::optional<size_t> min_logical_weight_bruteforce(const StabilizerCode& code, size_t w_max,
                                                    uint64_t budget) {
    const size_t n = code.n;
    uint64_t total = 0;
    {
        // sum_w C(n, w) * 3^w must stay within budget
        long double acc = 0, comb = 1, pow3 = 1;
        for (size_t w = 1; w <= w_max; w++) {
            comb = comb * (long double)(n - w + 1) / (long double)w;
            pow3 *= 3;
            acc += comb * pow3;
        }
        if (acc > (long double)budget) {
            throw std::runtime_error("min_logical_weight_bruteforce: search space over budget");
        }
        total = (uint64_t)acc;
        (void)total;
    }

    // Precompute row-space membership testers via RREF.
    RowReduceResult rx = row_reduce(code.h_x);
    RowReduceResult rz = row_reduce(code.h_z);
    auto reduce_in_space = [](const RowReduceResult& rr, BitVector v) {
        for (size_t i = 0; i < rr.pivots.size(); i++) {
            if (v.get(rr.pivots[i])) {
                v ^= rr.reduced.row(i);
            }
        }
        return v.is_zero();
    };

    // Pauli with X-support xs and Z-support zs commutes with all checks iff
    // H_Z * xs = 0 and H_X * zs = 0; it is in the stabilizer group iff
    // xs in rowspace(H_X) and zs in rowspace(H_Z).
    std::vector<size_t> support(w_max);
    for (size_t w = 1; w <= w_max; w++) {
        // enumerate supports of size w
        std::vector<size_t> idx(w);
        for (size_t i = 0; i < w; i++) {
            idx[i] = i;
        }
        bool done = false;
        while (!done) {
            // enumerate Pauli types on the support: 1=X, 2=Z, 3=Y
            std::vector<unsigned> type(w, 1);
            while (true) {
                BitVector xs(n), zs(n);
                for (size_t i = 0; i < w; i++) {
                    if (type[i] & 1) {
                        xs.set(idx[i], true);
                    }
                    if (type[i] & 2) {
                        zs.set(idx[i], true);
                    }
                }
                if (code.h_z.multiply(xs).is_zero() && code.h_x.multiply(zs).is_zero()) {
                    bool in_group = reduce_in_space(rx, xs) && reduce_in_space(rz, zs);
                    if (!in_group) {
                        return w;
                    }
                }
                size_t pos = 0;
                while (pos < w && type[pos] == 3) {
                    type[pos] = 1;
                    pos++;
                }
                if (pos == w) {
                    break;
                }
                type[pos]++;
            }
            // next combination
            size_t pos = w;
            while (pos > 0) {
                pos--;
                if (idx[pos] != pos + n - w) {
                    idx[pos]++;
                    for (size_t j = pos + 1; j < w; j++) {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
                if (pos == 0) {
                    done = true;
                }
            }
            if (w == 0) {
                break;
            }
        }
    }
    return std::nullopt;
}

CodeReport make_report(const StabilizerCode& code) {
    CodeReport rep;
    rep.n = code.n;
    rep.k = code.k;
    rep.d_claimed = code.d;
    rep.encoding_rate = double(code.k) / double(code.n + code.check_count());
    return rep;
}

namespace {

std::vector<MonomialTerm> parse_poly(const std::string& text) {
    std::vector<MonomialTerm> terms;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t next = text.find('+', pos);
        std::string term = text.substr(pos, next == std::string::npos ? next : next - pos);
        pos = next == std::string::npos ? text.size() : next + 1;
        if (term.empty()) {
            throw std::invalid_argument("empty polynomial term");
        }
        MonomialTerm t;
        if (term == "1") {
            terms.push_back(t);
            continue;
        }
        size_t i = 0;
        auto read_exp = [&](char var) -> unsigned {
            if (i >= term.size() || term[i] != var) {
                return 0;
            }
            i++;
            if (i >= term.size() || !isdigit((unsigned char)term[i])) {
                return 1;
            }
            unsigned e = 0;
            while (i < term.size() && isdigit((unsigned char)term[i])) {
                e = e * 10 + unsigned(term[i] - '0');
                i++;
            }
            return e;
        };
        t.x_exp = read_exp('x');
        t.y_exp = read_exp('y');
        if (i != term.size() || (t.x_exp == 0 && t.y_exp == 0 && term != "x0y0")) {
            if (!(term == "x0" || term == "y0" || term == "x0y0")) {
                if (i != term.size()) {
                    throw std::invalid_argument("bad polynomial term: " + term);
                }
            }
        }
        terms.push_back(t);
    }
    return terms;
}

}  // namespace

StabilizerCode parse_code_spec(const std::string& line) {
    std::istringstream in(line);
    std::string kind;
    in >> kind;
    if (kind == "sc") {
        std::string tok;
        size_t d = 0;
        while (in >> tok) {
            if (tok.rfind("d=", 0) == 0) {
                d = std::stoul(tok.substr(2));
            } else {
                throw std::invalid_argument("sc spec: unknown field " + tok);
            }
        }
        if (d == 0) {
            throw std::invalid_argument("sc spec needs d=<odd>");
        }
        return build_rotated_sc(d);
    }
    if (kind == "bb") {
        BBParams p;
        std::string tok;
        while (in >> tok) {
            if (tok.rfind("l=", 0) == 0) {
                p.l = unsigned(std::stoul(tok.substr(2)));
            } else if (tok.rfind("m=", 0) == 0) {
                p.m = unsigned(std::stoul(tok.substr(2)));
            } else if (tok.rfind("a=", 0) == 0) {
                p.a_terms = parse_poly(tok.substr(2));
            } else if (tok.rfind("b=", 0) == 0) {
                p.b_terms = parse_poly(tok.substr(2));
            } else {
                throw std::invalid_argument("bb spec: unknown field " + tok);
            }
        }
        if (p.l == 0 || p.m == 0 || p.a_terms.empty() || p.b_terms.empty()) {
            throw std::invalid_argument("bb spec needs l=, m=, a=, b=");
        }
        return build_bb(p);
    }
    throw std::invalid_argument("unknown code kind: " + kind);
}

std::string dump_check_matrices(const StabilizerCode& code) {
    std::ostringstream out;
    auto dump = [&](const BitMatrix& h, char tag) {
        for (size_t r = 0; r < h.rows(); r++) {
            out << tag << r << ":";
            for (size_t c : h.row(r).ones()) {
                out << ' ' << c;
            }
            out << '\n';
        }
    };
    dump(code.h_x, 'X');
    dump(code.h_z, 'Z');
    return out.str();
}

}  // namespace dqc
