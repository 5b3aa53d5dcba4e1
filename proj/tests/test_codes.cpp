#include "doctest.h"
#include "dqc/codes.hpp"

using namespace dqc;

namespace {

bool css_ok(const StabilizerCode& code) {
    return code.h_x.multiply(code.h_z.transposed()).is_zero();
}

void check_logicals(const StabilizerCode& code) {
    REQUIRE(code.logical_z.size() == code.k);
    REQUIRE(code.logical_x.size() == code.k);
    for (size_t i = 0; i < code.k; i++) {
        CHECK(code.h_x.multiply(code.logical_z[i]).is_zero());
        CHECK(code.h_z.multiply(code.logical_x[i]).is_zero());
        CHECK(!in_row_space(code.h_z, code.logical_z[i]));
        CHECK(!in_row_space(code.h_x, code.logical_x[i]));
        for (size_t j = 0; j < code.k; j++) {
            CHECK(code.logical_z[i].dot(code.logical_x[j]) == (i == j));
        }
    }
}

}  // namespace

TEST_CASE("BB parameter table: (18,4), (54,4), (144,12)") {
    struct Row {
        const char* spec;
        size_t n, k;
    };
    for (const Row& row : {Row{"bb l=3 m=3 a=1+x+y b=1+x2+y2", 18, 4},
                           Row{"bb l=3 m=9 a=x+y+y3 b=1+x2+y2", 54, 4},
                           Row{"bb l=12 m=6 a=x3+y+y2 b=x+x2+y3", 144, 12}}) {
        StabilizerCode code = parse_code_spec(row.spec);
        CHECK(code.n == row.n);
        CHECK(code.k == row.k);
        CHECK(css_ok(code));
        for (size_t r = 0; r < code.h_x.rows(); r++) {
            CHECK(code.h_x.row_weight(r) == 6);
        }
        for (size_t r = 0; r < code.h_z.rows(); r++) {
            CHECK(code.h_z.row_weight(r) == 6);
        }
        check_logicals(code);
    }
}

TEST_CASE("BB construction: A and B commute") {
    StabilizerCode code = parse_code_spec("bb l=3 m=9 a=x+y+y3 b=1+x2+y2");
    size_t lm = code.n / 2;
    BitMatrix a(lm, lm), b(lm, lm);
    for (size_t r = 0; r < lm; r++) {
        for (size_t c = 0; c < lm; c++) {
            a.set(r, c, code.h_x.get(r, c));
            b.set(r, c, code.h_x.get(r, lm + c));
        }
    }
    CHECK(a.multiply(b) == b.multiply(a));
}

TEST_CASE("rotated surface codes: n = d^2, k = 1, check weights") {
    for (size_t d : {3, 5, 7, 11}) {
        StabilizerCode code = build_rotated_sc(d);
        CHECK(code.n == d * d);
        CHECK(code.k == 1);
        CHECK(css_ok(code));
        size_t w4 = 0, w2 = 0;
        for (const BitMatrix* h : {&code.h_x, &code.h_z}) {
            CHECK(h->rows() == (d * d - 1) / 2);
            for (size_t r = 0; r < h->rows(); r++) {
                size_t w = h->row_weight(r);
                CHECK((w == 4 || w == 2));
                (w == 4 ? w4 : w2)++;
            }
        }
        CHECK(w4 == (d - 1) * (d - 1));
        CHECK(w2 == 2 * (d - 1));
        check_logicals(code);
    }
}

TEST_CASE("d=3 surface code: 4 weight-4 plus 4 weight-2 checks, logical weight 3") {
    StabilizerCode code = build_rotated_sc(3);
    CHECK(code.check_count() == 8);
    CHECK(code.logical_z[0].weight() == 3);
    CHECK(code.logical_x[0].weight() == 3);
}

TEST_CASE("d=5 surface code: total stabilizer weight per type is 80") {
    StabilizerCode code = build_rotated_sc(5);
    size_t wx = 0, wz = 0;
    for (size_t r = 0; r < code.h_x.rows(); r++) {
        wx += code.h_x.row_weight(r);
    }
    for (size_t r = 0; r < code.h_z.rows(); r++) {
        wz += code.h_z.row_weight(r);
    }
    CHECK(wx == 80);
    CHECK(wz == 80);
}

TEST_CASE("build_rotated_sc rejects even or small d") {
    CHECK_THROWS_AS(build_rotated_sc(4), std::invalid_argument);
    CHECK_THROWS_AS(build_rotated_sc(1), std::invalid_argument);
}

TEST_CASE("logical_operators recomputation matches invariants for [[18,4,4]]") {
    StabilizerCode code = parse_code_spec("bb l=3 m=3 a=1+x+y b=1+x2+y2");
    auto [lz, lx] = logical_operators(code);
    CHECK(lz.size() == 4);
    CHECK(lx.size() == 4);
    for (size_t i = 0; i < 4; i++) {
        CHECK(code.h_x.multiply(lz[i]).is_zero());
        for (size_t j = 0; j < 4; j++) {
            CHECK(lz[i].dot(lx[j]) == (i == j));
        }
    }
}

TEST_CASE("brute-force distance: d=3 surface code is 3") {
    StabilizerCode code = build_rotated_sc(3);
    auto w = min_logical_weight_bruteforce(code, 3);
    REQUIRE(w.has_value());
    CHECK(*w == 3);
    CHECK(!min_logical_weight_bruteforce(code, 2).has_value());
}

TEST_CASE("brute-force budget guard") {
    StabilizerCode code = parse_code_spec("bb l=12 m=6 a=x3+y+y2 b=x+x2+y3");
    CHECK_THROWS_AS(min_logical_weight_bruteforce(code, 12, 1000), std::runtime_error);
}

TEST_CASE("code report encoding rate") {
    StabilizerCode code = parse_code_spec("bb l=3 m=3 a=1+x+y b=1+x2+y2");
    CodeReport rep = make_report(code);
    CHECK(rep.encoding_rate == doctest::Approx(4.0 / (18 + 18)));
    CHECK(rep.encoding_rate > 0.0);
    CHECK(rep.encoding_rate < 1.0);
}

TEST_CASE("code spec parsing errors") {
    CHECK_THROWS_AS(parse_code_spec("sc d=4"), std::invalid_argument);
    CHECK_THROWS_AS(parse_code_spec("sc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_code_spec("bb l=3 m=3 a=1+x b=1+x2+y2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_code_spec("xx d=3"), std::invalid_argument);
    StabilizerCode c = parse_code_spec("sc d=11");
    CHECK(c.n == 121);
    CHECK(c.k == 1);
}

TEST_CASE("check matrix dump lists sparse rows") {
    StabilizerCode code = build_rotated_sc(3);
    std::string dump = dump_check_matrices(code);
    CHECK(dump.find("X0:") != std::string::npos);
    CHECK(dump.find("Z0:") != std::string::npos);
}
