// dqcsim: build codes, emit distributed-operation circuits, sample, decode,
// and sweep logical error rates.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dqc/analysis.hpp"
#include "dqc/builder.hpp"
#include "dqc/dem.hpp"

using namespace dqc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBuild = 2;
constexpr int kExitRuntime = 3;

int default_workers() {
    if (const char* env = std::getenv("DQCSIM_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) {
            return v;
        }
    }
    return 1;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(std::stod(item));
        }
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open output file " + path);
    }
    f << content;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open input file " + path);
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dqcsim: distributed logical-operation circuit simulator"};
    app.require_subcommand(1);

    std::string code_spec, kind = "nonlocal-cnot", out_path, format = "csv";
    std::string circuit_file, dem_file, batch_file;
    std::string p_list = "0.001", ratio_list = "1";
    double ebit_p = -1.0;
    uint64_t shots = 10000, seed = 1;
    int workers = default_workers();
    uint64_t budget = 0;
    bool dump_checks = false;

    auto add_code_opt = [&](CLI::App* cmd) {
        cmd->add_option("--code", code_spec, "code spec, e.g. 'bb l=3 m=3 a=1+x+y b=1+x2+y2' or 'sc d=5'")
            ->required();
    };
    auto add_noise_opts = [&](CLI::App* cmd) {
        cmd->add_option("--circuit", kind, "nonlocal-cnot or teleport")
            ->check(CLI::IsMember({"nonlocal-cnot", "teleport"}));
        cmd->add_option("--p", p_list, "physical error rate (comma list for sweeps)");
        cmd->add_option("--ebit-ratio", ratio_list, "ebit noise as ratio of p (comma list)");
        cmd->add_option("--ebit-p", ebit_p, "absolute ebit noise (overrides --ebit-ratio)");
    };

    auto* c_build = app.add_subcommand("build-code", "construct a code and report n, k, rate");
    add_code_opt(c_build);
    c_build->add_flag("--dump", dump_checks, "dump sparse check matrices");

    auto* c_emit = app.add_subcommand("emit", "build a circuit, print its census, write the text");
    add_code_opt(c_emit);
    add_noise_opts(c_emit);
    c_emit->add_option("--out", out_path, "circuit file path");

    auto* c_dem = app.add_subcommand("dem", "extract the detector error model of a circuit file");
    c_dem->add_option("--circuit-file", circuit_file, "circuit text file")->required();
    c_dem->add_option("--out", out_path, "DEM file path");

    auto* c_sample = app.add_subcommand("sample", "sample detector/observable outcomes");
    c_sample->add_option("--circuit-file", circuit_file, "circuit text file")->required();
    c_sample->add_option("--shots", shots, "shot count");
    c_sample->add_option("--seed", seed, "root seed");
    c_sample->add_option("--workers", workers, "worker threads");
    c_sample->add_option("--out", out_path, "batch output path");
    c_sample->add_option("--format", format, "hex or bin")->check(CLI::IsMember({"hex", "bin", "csv", "json"}));

    auto* c_decode = app.add_subcommand("decode", "decode a sampled batch against a DEM");
    c_decode->add_option("--dem", dem_file, "DEM file")->required();
    c_decode->add_option("--batch", batch_file, "batch file (hex or bin)")->required();
    c_decode->add_option("--workers", workers, "worker threads");
    c_decode->add_option("--out", out_path, "per-shot flags output path");

    auto* c_run = app.add_subcommand("run", "end-to-end emit -> DEM -> sample -> decode -> LER");
    add_code_opt(c_run);
    add_noise_opts(c_run);
    c_run->add_option("--shots", shots, "shots per cell");
    c_run->add_option("--seed", seed, "root seed");
    c_run->add_option("--workers", workers, "worker threads");
    c_run->add_option("--out", out_path, "output path (default stdout)");
    c_run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* c_dist = app.add_subcommand("distance", "circuit-level distance upper-bound search");
    add_code_opt(c_dist);
    add_noise_opts(c_dist);
    c_dist->add_option("--budget", budget, "mechanisms to try (0 = all)");
    c_dist->add_option("--seed", seed, "root seed (unused; reserved)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*c_build) {
            StabilizerCode code;
            try {
                code = parse_code_spec(code_spec);
            } catch (const std::exception& e) {
                std::cerr << "build failure: " << e.what() << "\n";
                return kExitBuild;
            }
            CodeReport rep = make_report(code);
            BitMatrix css = code.h_x.multiply(code.h_z.transposed());
            std::cout << "name=" << code.name << " n=" << rep.n << " k=" << rep.k
                      << " encoding_rate=" << rep.encoding_rate
                      << " css_ok=" << (css.is_zero() ? "true" : "false") << "\n";
            if (dump_checks) {
                std::cout << dump_check_matrices(code);
            }
            return css.is_zero() ? kExitOk : kExitBuild;
        }

        if (*c_emit || *c_run || *c_dist) {
            StabilizerCode code;
            try {
                code = parse_code_spec(code_spec);
            } catch (const std::exception& e) {
                std::cerr << "build failure: " << e.what() << "\n";
                return kExitBuild;
            }
            std::vector<double> ps = parse_list(p_list);
            std::vector<double> ratios = parse_list(ratio_list);

            if (*c_emit) {
                double p = ps.at(0);
                double pe = ebit_p >= 0.0 ? ebit_p : ratios.at(0) * p;
                CircuitProgram prog;
                try {
                    prog = build_experiment(code, kind, make_noise(code, p, pe));
                } catch (const std::exception& e) {
                    std::cerr << "build failure: " << e.what() << "\n";
                    return kExitBuild;
                }
                GateCensus c = census(prog);
                std::cout << "code=" << code.name << " kind=" << kind << " 1q=" << c.oneq
                          << " 2q=" << c.twoq << " meas_mid=" << c.meas_mid
                          << " meas_total=" << c.meas_total
                          << " detectors=" << prog.detector_count
                          << " observables=" << prog.observable_count << "\n";
                if (!out_path.empty()) {
                    write_file(out_path, serialize(prog));
                }
                return kExitOk;
            }

            if (*c_dist) {
                double p = ps.at(0);
                double pe = ebit_p >= 0.0 ? ebit_p : ratios.at(0) * p;
                CircuitProgram prog;
                try {
                    prog = build_experiment(code, kind, make_noise(code, p, pe));
                } catch (const std::exception& e) {
                    std::cerr << "build failure: " << e.what() << "\n";
                    return kExitBuild;
                }
                DetectorErrorModel model = extract_dem(prog);
                auto witness = search_circuit_distance(model, budget == 0 ? SIZE_MAX : budget);
                if (!witness) {
                    std::cout << "none-found within budget\n";
                    return kExitOk;
                }
                bool ok = verify_witness(model, *witness);
                std::cout << "weight=" << witness->weight << " verified=" << (ok ? "true" : "false")
                          << "\nmechanisms=[";
                for (size_t i = 0; i < witness->mechanisms.size(); i++) {
                    std::cout << (i ? "," : "") << witness->mechanisms[i];
                }
                std::cout << "]\nobservables=[";
                for (size_t i = 0; i < witness->observables_flipped.size(); i++) {
                    std::cout << (i ? "," : "") << witness->observables_flipped[i];
                }
                std::cout << "]\n";
                return ok ? kExitOk : kExitRuntime;
            }

            // run
            if (shots == 0) {
                std::cerr << "run: shots must be positive\n";
                return kExitUsage;
            }
            std::vector<SweepCell> cells;
            for (double p : ps) {
                for (double r : ratios) {
                    SweepCell cell;
                    cell.code_spec = code_spec;
                    cell.kind = kind;
                    cell.p = p;
                    cell.p_ebit = ebit_p >= 0.0 ? ebit_p : r * p;
                    cells.push_back(cell);
                }
            }
            std::vector<SweepRow> rows = sweep(cells, shots, seed, workers);
            std::ostringstream out;
            if (format == "json") {
                nlohmann::json j = nlohmann::json::array();
                for (const auto& row : rows) {
                    nlohmann::json r;
                    r["code"] = row.cell.code_spec;
                    r["circuit"] = row.cell.kind;
                    r["p"] = row.cell.p;
                    r["p_ebit"] = row.cell.p_ebit;
                    r["shots"] = row.shots;
                    r["seed"] = row.seed;
                    if (row.error.empty()) {
                        r["fails"] = row.ler.fails;
                        r["ler"] = row.ler.point;
                        r["ler_lo"] = row.ler.interval_low;
                        r["ler_hi"] = row.ler.interval_high;
                    } else {
                        r["error"] = row.error;
                    }
                    j.push_back(r);
                }
                out << j.dump(2) << "\n";
            } else {
                out << sweep_csv_header() << "\n";
                for (const auto& row : rows) {
                    out << sweep_row_csv(row) << "\n";
                }
            }
            if (out_path.empty()) {
                std::cout << out.str();
            } else {
                write_file(out_path, out.str());
            }
            for (const auto& row : rows) {
                if (!row.error.empty()) {
                    return kExitRuntime;
                }
            }
            return kExitOk;
        }

        if (*c_dem) {
            CircuitProgram prog = parse(read_file(circuit_file));
            DetectorErrorModel model = extract_dem(prog);
            std::string text = serialize_dem(model);
            std::cout << "detectors=" << model.detector_count
                      << " observables=" << model.observable_count
                      << " mechanisms=" << model.mechanism_count() << "\n";
            if (!out_path.empty()) {
                write_file(out_path, text);
            }
            return kExitOk;
        }

        if (*c_sample) {
            CircuitProgram prog = parse(read_file(circuit_file));
            ShotBatch batch = sample(prog, shots, seed, workers);
            if (!out_path.empty()) {
                if (format == "bin") {
                    auto bytes = dump_batch_binary(batch);
                    std::ofstream f(out_path, std::ios::binary);
                    f.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
                } else {
                    write_file(out_path, dump_batch_hex(batch));
                }
            }
            std::cout << "shots=" << batch.shots << " detectors=" << batch.detector_count
                      << " observables=" << batch.observable_count << "\n";
            return kExitOk;
        }

        if (*c_decode) {
            DetectorErrorModel model = parse_dem(read_file(dem_file));
            std::string raw = read_file(batch_file);
            ShotBatch batch;
            if (raw.size() >= 4 && raw.compare(0, 4, "DQB1") == 0) {
                batch = parse_batch_binary(std::vector<uint8_t>(raw.begin(), raw.end()));
            } else {
                batch = parse_batch_hex(raw);
            }
            BatchDecodeResult res = decode_batch(model, batch, {}, {}, workers);
            if (!out_path.empty()) {
                std::ostringstream flags;
                for (uint64_t s = 0; s < batch.shots; s++) {
                    flags << int(res.shot_failed[s]) << "\n";
                }
                write_file(out_path, flags.str());
            }
            std::cout << "shots=" << batch.shots << " fails=" << res.fails << "\n";
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
