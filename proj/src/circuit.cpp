#include "dqc/circuit.hpp"

#include <charconv>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace dqc {

void CircuitProgram::recount() {
    measurement_count = 0;
    detector_count = 0;
    observable_count = 0;
    for (const auto& ins : instructions) {
        if (ins.is_measurement()) {
            measurement_count += uint32_t(ins.qubits.size());
        } else if (ins.op == Op::DETECTOR) {
            detector_count++;
        } else if (ins.op == Op::OBSERVABLE) {
            observable_count = std::max(observable_count, ins.obs_index + 1);
        }
    }
}

GateCensus census(const CircuitProgram& program) {
    GateCensus c;
    for (const auto& ins : program.instructions) {
        switch (ins.op) {
            case Op::H:
            case Op::PAULI_X:
            case Op::PAULI_Z:
                c.oneq += ins.qubits.size();
                break;
            case Op::COND_X:
            case Op::COND_Z:
                c.oneq += 1;
                break;
            case Op::CNOT:
                c.twoq += ins.qubits.size() / 2;
                break;
            case Op::MEASURE_Z:
            case Op::MEASURE_X:
                c.meas_total += ins.qubits.size();
                if (!ins.final_readout) {
                    c.meas_mid += ins.qubits.size();
                }
                break;
            default:
                break;
        }
    }
    return c;
}

namespace {

const char* op_name(Op op) {
    switch (op) {
        case Op::RESET_Z: return "R";
        case Op::RESET_X: return "RX";
        case Op::MEASURE_Z: return "M";
        case Op::MEASURE_X: return "MX";
        case Op::H: return "H";
        case Op::CNOT: return "CX";
        case Op::PAULI_X: return "X";
        case Op::PAULI_Z: return "Z";
        case Op::COND_X: return "CX";
        case Op::COND_Z: return "CZ";
        case Op::BELL_INIT: return "BELL";
        case Op::NOISE_X: return "X_ERROR";
        case Op::NOISE_Z: return "Z_ERROR";
        case Op::NOISE_DEP1: return "DEPOLARIZE1";
        case Op::NOISE_DEP2: return "DEPOLARIZE2";
        case Op::TICK: return "TICK";
        case Op::DETECTOR: return "DETECTOR";
        case Op::OBSERVABLE: return "OBSERVABLE_INCLUDE";
        default: return "?";
    }
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string serialize(const CircuitProgram& program) {
    std::ostringstream out;
    out << "# dqcsim circuit\n";
    out << "# meta qubits=" << program.qubit_count << " code=" << program.code_name
        << " kind=" << program.kind << " p=" << format_double(program.p)
        << " p_ebit=" << format_double(program.p_ebit) << "\n";
    if (!program.node_of_qubit.empty()) {
        out << "# nodes";
        for (uint8_t nd : program.node_of_qubit) {
            out << ' ' << int(nd);
        }
        out << "\n";
    }
    uint32_t meas_so_far = 0;
    for (const auto& ins : program.instructions) {
        switch (ins.op) {
            case Op::TICK:
                out << "TICK\n";
                break;
            case Op::NOISE_X:
            case Op::NOISE_Z:
            case Op::NOISE_DEP1:
            case Op::NOISE_DEP2:
                out << op_name(ins.op) << '(' << format_double(ins.prob) << ')';
                for (uint32_t q : ins.qubits) {
                    out << ' ' << q;
                }
                out << "\n";
                break;
            case Op::COND_X:
            case Op::COND_Z:
                out << op_name(ins.op) << " rec[" << (int64_t(ins.recs[0]) - meas_so_far) << "] "
                    << ins.qubits[0] << "\n";
                break;
            case Op::DETECTOR:
            case Op::OBSERVABLE:
                out << op_name(ins.op);
                if (ins.op == Op::OBSERVABLE) {
                    out << '(' << ins.obs_index << ')';
                }
                for (uint32_t r : ins.recs) {
                    out << " rec[" << (int64_t(r) - meas_so_far) << "]";
                }
                out << "\n";
                break;
            default:
                out << op_name(ins.op);
                for (uint32_t q : ins.qubits) {
                    out << ' ' << q;
                }
                if (ins.is_measurement()) {
                    meas_so_far += uint32_t(ins.qubits.size());
                    if (ins.final_readout) {
                        out << " #!final";
                    }
                }
                out << "\n";
                break;
        }
    }
    return out.str();
}

namespace {

[[noreturn]] void parse_fail(size_t line_no, const std::string& why) {
    throw std::invalid_argument("parse error at line " + std::to_string(line_no) + ": " + why);
}

}  // namespace

CircuitProgram parse(const std::string& text) {
    CircuitProgram prog;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    uint32_t meas_so_far = 0;
    uint32_t max_qubit = 0;
    bool qubits_from_meta = false;

    while (std::getline(in, line)) {
        line_no++;
        bool final_tag = false;
        if (size_t tag = line.find("#!final"); tag != std::string::npos) {
            final_tag = true;
            line = line.substr(0, tag);
        }
        if (line.rfind("# meta ", 0) == 0) {
            std::istringstream ms(line.substr(7));
            std::string tok;
            while (ms >> tok) {
                auto eq = tok.find('=');
                if (eq == std::string::npos) {
                    continue;
                }
                std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
                if (key == "qubits") {
                    prog.qubit_count = uint32_t(std::stoul(val));
                    qubits_from_meta = true;
                } else if (key == "code") {
                    prog.code_name = val;
                } else if (key == "kind") {
                    prog.kind = val;
                } else if (key == "p") {
                    prog.p = std::stod(val);
                } else if (key == "p_ebit") {
                    prog.p_ebit = std::stod(val);
                }
            }
            continue;
        }
        if (line.rfind("# nodes", 0) == 0) {
            std::istringstream ns(line.substr(7));
            int v;
            while (ns >> v) {
                prog.node_of_qubit.push_back(uint8_t(v));
            }
            continue;
        }
        if (size_t hash = line.find('#'); hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) {
            continue;
        }

        Instruction ins;
        double prob = 0.0;
        std::string name = word;
        if (auto paren = word.find('('); paren != std::string::npos) {
            name = word.substr(0, paren);
            auto close = word.find(')', paren);
            if (close == std::string::npos) {
                parse_fail(line_no, "missing ')' in " + word);
            }
            prob = std::stod(word.substr(paren + 1, close - paren - 1));
        }

        std::vector<std::string> args;
        while (ls >> word) {
            args.push_back(word);
        }
        auto parse_rec = [&](const std::string& a) -> uint32_t {
            if (a.rfind("rec[", 0) != 0 || a.back() != ']') {
                parse_fail(line_no, "expected rec[-k], got " + a);
            }
            int64_t rel = std::stoll(a.substr(4, a.size() - 5));
            int64_t abs = int64_t(meas_so_far) + rel;
            if (rel >= 0 || abs < 0) {
                parse_fail(line_no, "record reference out of range: " + a);
            }
            return uint32_t(abs);
        };
        auto parse_qubits = [&]() {
            for (const auto& a : args) {
                size_t pos = 0;
                unsigned long v = std::stoul(a, &pos);
                if (pos != a.size()) {
                    parse_fail(line_no, "bad qubit index " + a);
                }
                ins.qubits.push_back(uint32_t(v));
                max_qubit = std::max(max_qubit, uint32_t(v));
            }
        };

        if (name == "TICK") {
            ins.op = Op::TICK;
        } else if (name == "R") {
            ins.op = Op::RESET_Z;
            parse_qubits();
        } else if (name == "RX") {
            ins.op = Op::RESET_X;
            parse_qubits();
        } else if (name == "M" || name == "MX") {
            ins.op = name == "M" ? Op::MEASURE_Z : Op::MEASURE_X;
            parse_qubits();
            ins.final_readout = final_tag;
            meas_so_far += uint32_t(ins.qubits.size());
        } else if (name == "H") {
            ins.op = Op::H;
            parse_qubits();
        } else if (name == "X" || name == "Z") {
            ins.op = name == "X" ? Op::PAULI_X : Op::PAULI_Z;
            parse_qubits();
        } else if (name == "BELL") {
            ins.op = Op::BELL_INIT;
            parse_qubits();
            if (ins.qubits.size() % 2) {
                parse_fail(line_no, "BELL needs qubit pairs");
            }
        } else if (name == "CX" || name == "CZ") {
            bool cond = !args.empty() && args[0].rfind("rec[", 0) == 0;
            if (cond) {
                if (args.size() != 2) {
                    parse_fail(line_no, "conditional gate takes one record and one qubit");
                }
                ins.op = name == "CX" ? Op::COND_X : Op::COND_Z;
                ins.recs.push_back(parse_rec(args[0]));
                unsigned long q = std::stoul(args[1]);
                ins.qubits.push_back(uint32_t(q));
                max_qubit = std::max(max_qubit, uint32_t(q));
            } else {
                if (name == "CZ") {
                    parse_fail(line_no, "unconditional CZ is not in the gate set");
                }
                ins.op = Op::CNOT;
                parse_qubits();
                if (ins.qubits.size() % 2) {
                    parse_fail(line_no, "CX needs qubit pairs");
                }
            }
        } else if (name == "X_ERROR" || name == "Z_ERROR" || name == "DEPOLARIZE1" ||
                   name == "DEPOLARIZE2") {
            ins.op = name == "X_ERROR"     ? Op::NOISE_X
                     : name == "Z_ERROR"   ? Op::NOISE_Z
                     : name == "DEPOLARIZE1" ? Op::NOISE_DEP1
                                             : Op::NOISE_DEP2;
            ins.prob = prob;
            if (prob < 0.0 || prob > 1.0) {
                parse_fail(line_no, "probability out of [0,1]");
            }
            parse_qubits();
            if (ins.op == Op::NOISE_DEP2 && ins.qubits.size() % 2) {
                parse_fail(line_no, "DEPOLARIZE2 needs qubit pairs");
            }
        } else if (name == "DETECTOR") {
            ins.op = Op::DETECTOR;
            for (const auto& a : args) {
                ins.recs.push_back(parse_rec(a));
            }
        } else if (name == "OBSERVABLE_INCLUDE") {
            ins.op = Op::OBSERVABLE;
            ins.obs_index = uint32_t(prob);
            for (const auto& a : args) {
                ins.recs.push_back(parse_rec(a));
            }
        } else {
            parse_fail(line_no, "unknown instruction " + name);
        }
        prog.instructions.push_back(std::move(ins));
    }
    if (!qubits_from_meta) {
        prog.qubit_count = max_qubit + 1;
    }
    prog.recount();
    return prog;
}

}  // namespace dqc
