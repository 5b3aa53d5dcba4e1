#include "doctest.h"
#include "dqc/builder.hpp"
#include "dqc/circuit.hpp"
#include "dqc/codes.hpp"

using namespace dqc;

TEST_CASE("census of an empty program is zero") {
    CircuitProgram prog;
    GateCensus c = census(prog);
    CHECK(c.oneq == 0);
    CHECK(c.twoq == 0);
    CHECK(c.meas_mid == 0);
    CHECK(c.meas_total == 0);
}

TEST_CASE("one BB syndrome round: 108 CNOTs, 18 measurements") {
    StabilizerCode code = parse_code_spec("bb l=3 m=3 a=1+x+y b=1+x2+y2");
    NoiseParams noise = make_noise(code, 0.001, 0.001);
    auto seg = build_syndrome_round(code, false, noise);
    size_t cnots = 0, meas = 0, h = 0;
    for (const auto& ins : seg) {
        if (ins.op == Op::CNOT) {
            cnots += ins.qubits.size() / 2;
        }
        if (ins.is_measurement()) {
            meas += ins.qubits.size();
        }
        if (ins.op == Op::H) {
            h += ins.qubits.size();
        }
    }
    CHECK(cnots == 108);
    CHECK(meas == 18);
    CHECK(h == 0);  // native-basis ancilla reset/measure
}

TEST_CASE("one d=5 surface round: 80 CNOTs, 24 measurements") {
    StabilizerCode code = build_rotated_sc(5);
    NoiseParams noise = make_noise(code, 0.001, 0.001);
    auto seg = build_syndrome_round(code, false, noise);
    size_t cnots = 0, meas = 0;
    for (const auto& ins : seg) {
        if (ins.op == Op::CNOT) {
            cnots += ins.qubits.size() / 2;
        }
        if (ins.is_measurement()) {
            meas += ins.qubits.size();
        }
    }
    CHECK(cnots == 80);
    CHECK(meas == 24);
}

TEST_CASE("basis-swapped round exchanges reset opcodes and CNOT directions") {
    StabilizerCode code = build_rotated_sc(3);
    NoiseParams noise = make_noise(code, 0.0, 0.0);
    auto normal = build_syndrome_round(code, false, noise);
    auto swapped = build_syndrome_round(code, true, noise);
    REQUIRE(normal.size() == swapped.size());
    for (size_t i = 0; i < normal.size(); i++) {
        if (normal[i].op == Op::RESET_X) {
            CHECK(swapped[i].op == Op::RESET_Z);
        } else if (normal[i].op == Op::RESET_Z) {
            CHECK(swapped[i].op == Op::RESET_X);
        } else if (normal[i].op == Op::CNOT) {
            CHECK(swapped[i].op == Op::CNOT);
            REQUIRE(normal[i].qubits.size() == 2);
            CHECK(swapped[i].qubits[0] == normal[i].qubits[1]);
            CHECK(swapped[i].qubits[1] == normal[i].qubits[0]);
        }
    }
}

TEST_CASE("gate censuses match the published tables for all 12 pairs") {
    struct Row {
        const char* spec;
        const char* kind;
        uint64_t oneq, twoq, meas;
    };
    const Row rows[] = {
        {"bb l=3 m=3 a=1+x+y b=1+x2+y2", "nonlocal-cnot", 54, 1548, 288},
        {"sc d=5", "nonlocal-cnot", 75, 1170, 386},
        {"bb l=3 m=9 a=x+y+y3 b=1+x2+y2", "nonlocal-cnot", 162, 4644, 864},
        {"sc d=7", "nonlocal-cnot", 147, 2450, 770},
        {"bb l=12 m=6 a=x3+y+y2 b=x+x2+y3", "nonlocal-cnot", 432, 12384, 2304},
        {"sc d=11", "nonlocal-cnot", 363, 6402, 1922},
        {"bb l=3 m=3 a=1+x+y b=1+x2+y2", "teleport", 126, 2106, 414},
        {"sc d=5", "teleport", 175, 1595, 556},
        {"bb l=3 m=9 a=x+y+y3 b=1+x2+y2", "teleport", 378, 6318, 1242},
        {"sc d=7", "teleport", 343, 3339, 1108},
        {"bb l=12 m=6 a=x3+y+y2 b=x+x2+y3", "teleport", 1008, 16848, 3312},
        {"sc d=11", "teleport", 847, 8723, 2764},
    };
    for (const Row& row : rows) {
        CAPTURE(row.spec);
        CAPTURE(row.kind);
        StabilizerCode code = parse_code_spec(row.spec);
        CircuitProgram prog = build_experiment(code, row.kind, make_noise(code, 1e-3, 1e-3));
        GateCensus c = census(prog);
        CHECK(c.oneq == row.oneq);
        CHECK(c.twoq == row.twoq);
        CHECK(c.meas_mid == row.meas);
    }
}

TEST_CASE("detector counts match the tables' rows column") {
    struct Row {
        const char* spec;
        const char* kind;
        uint32_t dets, obs;
    };
    const Row rows[] = {
        {"bb l=3 m=3 a=1+x+y b=1+x2+y2", "nonlocal-cnot", 144, 8},
        {"sc d=5", "nonlocal-cnot", 192, 2},
        {"bb l=3 m=3 a=1+x+y b=1+x2+y2", "teleport", 180, 4},
        {"sc d=5", "teleport", 240, 1},
    };
    for (const Row& row : rows) {
        CAPTURE(row.spec);
        CAPTURE(row.kind);
        StabilizerCode code = parse_code_spec(row.spec);
        CircuitProgram prog = build_experiment(code, row.kind, make_noise(code, 1e-3, 1e-3));
        CHECK(prog.detector_count == row.dets);
        CHECK(prog.observable_count == row.obs);
    }
}

TEST_CASE("serialize -> parse -> serialize is byte identical") {
    StabilizerCode code = parse_code_spec("bb l=3 m=3 a=1+x+y b=1+x2+y2");
    CircuitProgram prog =
        build_nonlocal_cnot_experiment(code, make_noise(code, 0.001, 0.01));
    std::string text = serialize(prog);
    CircuitProgram back = parse(text);
    CHECK(serialize(back) == text);
    GateCensus a = census(prog), b = census(back);
    CHECK(a.oneq == b.oneq);
    CHECK(a.twoq == b.twoq);
    CHECK(a.meas_mid == b.meas_mid);
    CHECK(a.meas_total == b.meas_total);
    CHECK(back.detector_count == prog.detector_count);
    CHECK(back.observable_count == prog.observable_count);
}

TEST_CASE("parse: X_ERROR line becomes a bit-flip channel") {
    CircuitProgram prog = parse("X_ERROR(0.1) 0\nM 0\n");
    REQUIRE(prog.instructions.size() == 2);
    CHECK(prog.instructions[0].op == Op::NOISE_X);
    CHECK(prog.instructions[0].prob == doctest::Approx(0.1));
    CHECK(prog.instructions[0].qubits == std::vector<uint32_t>{0});
}

TEST_CASE("parse: conditional gates carry one record and one qubit") {
    CircuitProgram prog = parse("M 0\nCX rec[-1] 5\nCZ rec[-1] 6\n");
    CHECK(prog.instructions[1].op == Op::COND_X);
    CHECK(prog.instructions[1].recs == std::vector<uint32_t>{0});
    CHECK(prog.instructions[1].qubits == std::vector<uint32_t>{5});
    CHECK(prog.instructions[2].op == Op::COND_Z);
}

TEST_CASE("parse errors carry line numbers") {
    try {
        parse("H 0\nWAT 1\n");
        FAIL("expected a parse error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse("CX rec[0] 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("X_ERROR(1.5) 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse("DETECTOR rec[-1]\n"), std::invalid_argument);
}

TEST_CASE("p=0 emission contains no noise instructions") {
    StabilizerCode code = build_rotated_sc(3);
    CircuitProgram prog = build_nonlocal_cnot_experiment(code, make_noise(code, 0.0, 0.0));
    for (const auto& ins : prog.instructions) {
        CHECK(!ins.is_noise());
    }
}

TEST_CASE("classical controls always reference earlier measurements") {
    StabilizerCode code = build_rotated_sc(3);
    for (const char* kind : {"nonlocal-cnot", "teleport"}) {
        CircuitProgram prog = build_experiment(code, kind, make_noise(code, 1e-3, 1e-3));
        uint32_t seen = 0;
        for (const auto& ins : prog.instructions) {
            if (ins.op == Op::COND_X || ins.op == Op::COND_Z) {
                REQUIRE(ins.recs.size() == 1);
                CHECK(ins.recs[0] < seen);
            }
            if (ins.is_measurement()) {
                seen += uint32_t(ins.qubits.size());
            }
        }
    }
}

TEST_CASE("nonlocal CNOT uses 2 blocks + n ebits; teleport 3 blocks + n ebits") {
    StabilizerCode code = build_rotated_sc(3);
    uint32_t block = uint32_t(code.n + code.check_count());
    CircuitProgram nl = build_nonlocal_cnot_experiment(code, make_noise(code, 0, 0));
    CHECK(nl.qubit_count == 2 * block + 2 * code.n);
    CircuitProgram tp = build_teleportation_experiment(code, make_noise(code, 0, 0));
    CHECK(tp.qubit_count == 3 * block + 2 * code.n);
}
