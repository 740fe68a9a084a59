#include <newton_osc/report.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace newton_osc;

namespace {

json read_json_file(const std::string& path, const std::string& what)
{
    std::ifstream is(path);
    if (!is) throw input_error(what + ": cannot open " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw input_error(what + ": invalid JSON in " + path + " (" + e.what() + ")");
    }
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path);
    if (!os) throw input_error("out: cannot write " + path);
    os << text;
}

void emit(const json& report, const std::string& out) { write_text(out, report.dump(2) + "\n"); }

void emit_records(const std::vector<ExperimentRecord>& rs, const std::string& path)
{
    if (path.empty()) return;
    std::ostringstream os;
    write_records(os, rs);
    write_text(path, os.str());
}

ExponentTuple exponents_from_json(const json& j)
{
    if (!j.is_array()) throw input_error("inputs.exponents: expected an array of strings");
    std::string joined;
    for (const auto& e : j) {
        if (!e.is_string()) throw input_error("inputs.exponents: expected strings");
        joined += (joined.empty() ? "" : ",") + e.get<std::string>();
    }
    return ExponentTuple::parse(joined);
}

template <typename T>
T field(const json& in, const char* key)
{
    if (!in.contains(key)) throw input_error(std::string("inputs.") + key + ": missing");
    try {
        return in.at(key).get<T>();
    } catch (const json::exception&) {
        throw input_error(std::string("inputs.") + key + ": wrong type");
    }
}

ExponentTuple parse_exponents_flag(const std::string& text)
{
    try {
        return ExponentTuple::parse(text);
    } catch (const input_error& e) {
        throw input_error(std::string("exponents: ") + e.what());
    }
}

int run_analyze(const AnalyzeInputs& in, const std::string& out)
{
    try {
        emit(analyze(in), out);
        return 0;
    } catch (const PipelineStop& stop) {
        emit(stop.report, out);
        std::cerr << stop.message << '\n';
        if (stop.report.contains("nondegeneracy") && stop.report["nondegeneracy"].contains("witness"))
            std::cerr << "witness: " << stop.report["nondegeneracy"]["witness"].dump() << '\n';
        return stop.exit_code;
    }
}

int rerun(const json& report, const std::string& out)
{
    if (!report.contains("inputs") || !report["inputs"].is_object()) throw input_error("inputs: missing block");
    const json& in = report["inputs"];
    const auto command = field<std::string>(in, "command");
    if (!in.contains("phase")) throw input_error("inputs.phase: missing");
    const Phase phase = phase_from_json(in["phase"]);
    if (command == "analyze")
        return run_analyze({phase, exponents_from_json(in.value("exponents", json())), field<double>(in, "grid_h")}, out);
    if (command == "decay-fit") {
        DecayFitInputs d{phase, exponents_from_json(in.value("exponents", json())), field<double>(in, "lambda_min"),
                         field<double>(in, "lambda_max"), parse_fit_mode(field<std::string>(in, "mode"))};
        emit(decay_fit(d).report, out);
        return 0;
    }
    if (command == "sublevel") {
        SublevelInputs s{phase, field<double>(in, "eps_min"), field<double>(in, "eps_max"),
                         field<std::uint64_t>(in, "samples"), field<std::uint64_t>(in, "seed")};
        emit(sublevel(s).report, out);
        return 0;
    }
    throw input_error("inputs.command: unknown command \"" + command + "\"");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Newton polyhedra and oscillatory multilinear decay estimates"};
    app.require_subcommand(1);

    std::string phase_file, exponents, out, records;

    auto* an = app.add_subcommand("analyze", "geometry, nondegeneracy, hypotheses and predicted decay");
    double grid_h = default_grid_h;
    an->add_option("--phase", phase_file, "phase JSON file")->required();
    an->add_option("--exponents", exponents, "comma separated p_j: p/q, decimal or inf")->required();
    an->add_option("--grid-h", grid_h, "nondegeneracy grid spacing")->capture_default_str();
    an->add_option("--out", out, "report file (default stdout)");

    auto* df = app.add_subcommand("decay-fit", "numeric decay experiment over a dyadic lambda grid");
    double lambda_min = 16, lambda_max = 4096;
    std::string mode = "sharpness";
    df->add_option("--phase", phase_file, "phase JSON file")->required();
    df->add_option("--exponents", exponents, "comma separated p_j")->required();
    df->add_option("--lambda-min", lambda_min, "smallest lambda (power of two)")->capture_default_str();
    df->add_option("--lambda-max", lambda_max, "largest lambda (power of two)")->capture_default_str();
    df->add_option("--mode", mode, "sharpness | fixed-f | dyadic-sum")->capture_default_str();
    df->add_option("--out", out, "report file (default stdout)");
    df->add_option("--records", records, "JSON-lines experiment stream");

    auto* sl = app.add_subcommand("sublevel", "Monte Carlo sublevel volumes over a dyadic eps grid");
    double eps_min = 1.0 / 4096, eps_max = 1.0 / 16;
    std::uint64_t samples = 1'000'000, seed = 1;
    sl->add_option("--phase", phase_file, "phase JSON file")->required();
    sl->add_option("--eps-min", eps_min, "smallest eps (power of two)")->capture_default_str();
    sl->add_option("--eps-max", eps_max, "largest eps (power of two)")->capture_default_str();
    sl->add_option("--samples", samples, "Monte Carlo points")->capture_default_str();
    sl->add_option("--seed", seed, "64-bit seed")->capture_default_str();
    sl->add_option("--out", out, "report file (default stdout)");
    sl->add_option("--records", records, "JSON-lines experiment stream");

    auto* ft = app.add_subcommand("fit", "rate fit of a JSON-lines experiment stream");
    std::string input;
    int max_log_power = 0;
    ft->add_option("input", input, "JSON-lines file")->required();
    ft->add_option("--max-log-power", max_log_power, "log power candidates 0..N")->capture_default_str();
    ft->add_option("--out", out, "report file (default stdout)");

    auto* rr = app.add_subcommand("rerun", "re-run a report from its inputs block");
    std::string report_file;
    rr->add_option("report", report_file, "report JSON file")->required();
    rr->add_option("--out", out, "report file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*an) {
            AnalyzeInputs in{phase_from_json(read_json_file(phase_file, "phase")), parse_exponents_flag(exponents), grid_h};
            return run_analyze(in, out);
        }
        if (*df) {
            DecayFitInputs in{phase_from_json(read_json_file(phase_file, "phase")), parse_exponents_flag(exponents),
                              lambda_min, lambda_max, parse_fit_mode(mode)};
            auto res = decay_fit(in);
            emit(res.report, out);
            emit_records(res.records, records);
            return 0;
        }
        if (*sl) {
            SublevelInputs in{phase_from_json(read_json_file(phase_file, "phase")), eps_min, eps_max, samples, seed};
            auto res = sublevel(in);
            emit(res.report, out);
            emit_records(res.records, records);
            return 0;
        }
        if (*ft) {
            std::ifstream is(input);
            if (!is) throw input_error("input: cannot open " + input);
            const auto recs = read_records(is);
            std::vector<std::pair<double, double>> pts;
            bool converged = true;
            for (const auto& r : recs) {
                // epsilon streams are fitted in t = 1/eps so that t grows
                pts.emplace_back(r.variable == "epsilon" ? 1.0 / r.x : r.x, r.value);
                converged = converged && r.converged;
            }
            std::vector<int> cands;
            for (int s = 0; s <= max_log_power; ++s) cands.push_back(s);
            json j = to_json(rate_fit(pts, cands));
            j["converged"] = converged;
            j["samples"] = pts.size();
            emit(j, out);
            return 0;
        }
        if (*rr) return rerun(read_json_file(report_file, "report"), out);
    } catch (const degenerate_phase_error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const invalid_exponents_error& e) {
        std::cerr << "invalid exponents:";
        for (const auto& msg : e.check.diagnostics) std::cerr << "\n  " << msg;
        std::cerr << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
