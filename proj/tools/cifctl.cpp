// cifctl: command-line front end for the integration-formula experiments.
//
//   cifctl cif      --d 1 --family shifted_cosine --shift 2
//   cifctl lemmas   --only tensor,direct_sum
//   cifctl norms    --d 2 --family radial_logspike
//   cifctl probe    --kind cwikel --d 1 --family constant
//   cifctl spectrum --d 1 --family cosine_mode --cutoff 64 --kind symmetric
//
// Exit status: 0 pass, 2 quantitative failure, 1 usage or runtime error.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cif/asymptotics.hpp"
#include "cif/errors.hpp"
#include "cif/lemmalab.hpp"
#include "cif/orlicz.hpp"
#include "cif/torusop.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitFail = 2;

struct GlobalOptions {
    std::string config;
    int jobs = 1;
    std::string out;
    std::string format = "json";
    std::string seed = "0xC1F";
    bool timestamp = true;
};

struct FunctionOptions {
    int d = 0; // 0: not given
    std::string family;
    std::vector<std::string> params;
    std::map<std::string, std::string> shorthands;
};

struct CifCommand {
    FunctionOptions fn;
    std::vector<double> schedule;
    double tolerance = 0.0;
    int oversample = cif::kDefaultOversample;
    double spectral_fraction = 0.125;
    int quadrature_resolution = 0;
    bool fast_diagonal = true;
};

struct LemmasCommand {
    std::vector<std::string> only;
    int trials = 500;
};

struct ProbeCommand {
    FunctionOptions fn;
    std::string kind = "cwikel";
    std::vector<double> schedule;
    double bound = 3.0;
    double cap = 1e6;
    int oversample = cif::kDefaultOversample;
};

struct SpectrumCommand {
    FunctionOptions fn;
    double cutoff = 32;
    std::string kind = "symmetric";
    int oversample = cif::kDefaultOversample;
    std::string matrix;
};

const std::vector<std::string> kSuites = {"product",  "holder",   "tensor",     "direct_sum",
                                          "perturbation", "transfer", "commutation"};

void add_function_options(CLI::App* cmd, FunctionOptions& fn, bool family_required) {
    cmd->add_option("--d,--dim", fn.d, "torus dimension (1, 2 or 3)")->check(CLI::Range(1, 3));
    auto* fam = cmd->add_option("--family", fn.family,
                                "constant | cosine_mode | shifted_cosine | box_indicator | radial_logspike | "
                                "custom_grid | fourier_mode");
    if (family_required) fam->required();
    cmd->add_option("--param", fn.params, "family parameter KEY=VALUE (repeatable)");
    for (const char* key : {"value", "shift", "mode", "amplitude", "exponent", "cap", "lo", "hi", "file", "scale"}) {
        cmd->add_option_function<std::string>(
            std::string("--") + key, [&fn, key](const std::string& v) { fn.shorthands[key] = v; },
            std::string("shorthand for --param ") + key + "=...");
    }
}

int dim_or(const FunctionOptions& fn, int fallback) { return fn.d > 0 ? fn.d : fallback; }

cif::TorusFunction make_function(const FunctionOptions& fn) {
    std::map<std::string, std::string> params = fn.shorthands;
    for (const auto& p : fn.params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0) throw cif::InvalidParameter("--param expects KEY=VALUE, got '" + p + "'");
        params[p.substr(0, eq)] = p.substr(eq + 1);
    }
    return cif::TorusFunction::from_params(dim_or(fn, 1), fn.family, params);
}

json function_config(const FunctionOptions& fn) {
    json params = json::object();
    for (const auto& [k, v] : fn.shorthands) params[k] = v;
    for (const auto& p : fn.params) {
        const auto eq = p.find('=');
        if (eq != std::string::npos) params[p.substr(0, eq)] = p.substr(eq + 1);
    }
    return {{"d", dim_or(fn, 1)}, {"family", fn.family}, {"params", params}};
}

std::vector<double> default_schedule(int d, bool fast_diagonal_constant) {
    if (fast_diagonal_constant) return d == 1 ? std::vector<double>{1e4, 1e5, 1e6} : std::vector<double>{256, 512, 1024};
    switch (d) {
    case 1: return {256, 512, 1024, 2048};
    case 2: return {24, 32, 40, 48};
    default: return {6, 8, 10, 12};
    }
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

class Emitter {
public:
    Emitter(const GlobalOptions& g, std::string command) : g_(g), command_(std::move(command)) {
        if (g_.format != "json" && g_.format != "csv" && g_.format != "both")
            throw cif::InvalidParameter("--format must be json, csv or both");
        if (!g_.out.empty()) fs::create_directories(g_.out);
    }

    [[nodiscard]] bool json_wanted() const { return g_.format != "csv"; }
    [[nodiscard]] bool csv_wanted() const { return g_.format != "json"; }

    void report(json body, const json& effective_config) {
        body["command"] = command_;
        body["config"] = effective_config;
        if (g_.timestamp) body["timestamp"] = utc_timestamp();
        if (!json_wanted()) return;
        const std::string text = body.dump(2) + "\n";
        if (g_.out.empty()) {
            std::cout << text;
        } else {
            write_file(command_ + ".json", text);
        }
    }

    // Summary table; on stdout when no output directory is set.
    void table(const std::string& name, const std::string& text) {
        if (!csv_wanted()) return;
        if (g_.out.empty()) {
            std::cout << text;
        } else {
            write_file(name, text);
        }
    }

    // Bulk CSV that only makes sense as a file.
    void file(const std::string& name, const std::string& text) {
        if (csv_wanted() && !g_.out.empty()) write_file(name, text);
    }

private:
    void write_file(const std::string& name, const std::string& text) {
        std::ofstream os(fs::path(g_.out) / name, std::ios::binary);
        if (!os) throw cif::Error("cannot write " + (fs::path(g_.out) / name).string());
        os << text;
    }

    const GlobalOptions& g_;
    std::string command_;
};

json global_config(const GlobalOptions& g, std::uint64_t seed) {
    return {{"jobs", g.jobs}, {"out", g.out}, {"format", g.format}, {"seed", seed}};
}

std::uint64_t parse_seed(const std::string& s) {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used, 16);
    if (used != s.size()) throw cif::InvalidParameter("--seed expects a hexadecimal integer, got '" + s + "'");
    return v;
}

std::string csv_number(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

int run_cif(const GlobalOptions& g, const CifCommand& c) {
    const auto f = make_function(c.fn);
    cif::CifOptions opt;
    opt.tolerance = c.tolerance;
    opt.oversample = c.oversample;
    opt.spectral_fraction = c.spectral_fraction;
    opt.quadrature_resolution = c.quadrature_resolution;
    opt.fast_diagonal = c.fast_diagonal;
    opt.jobs = g.jobs;
    Emitter out(g, "cif");
    opt.keep_spectra = out.csv_wanted() && !g.out.empty();
    const auto schedule =
        c.schedule.empty() ? default_schedule(f.dim(), c.fast_diagonal && f.is_constant()) : c.schedule;

    const auto report = cif::cif_check(f, schedule, opt);

    json cfg = global_config(g, parse_seed(g.seed));
    cfg["function"] = function_config(c.fn);
    cfg["schedule"] = schedule;
    cfg["tolerance"] = c.tolerance;
    cfg["oversample"] = c.oversample;
    cfg["spectral_fraction"] = c.spectral_fraction;
    cfg["quadrature_resolution"] = c.quadrature_resolution;
    cfg["fast_diagonal"] = c.fast_diagonal;
    out.report(cif::to_json(report), cfg);

    std::ostringstream summary;
    summary << "R,dim,est_pos,est_neg\n";
    for (const auto& r : report.rungs)
        summary << csv_number(r.cutoff) << ',' << r.dim << ',' << csv_number(r.positive.estimate.alpha_hat) << ','
                << csv_number(r.negative.estimate.alpha_hat) << '\n';
    out.table("cif_rungs.csv", summary.str());
    for (std::size_t i = 0; i < report.rungs.size(); ++i) {
        const auto& r = report.rungs[i];
        for (const auto& [tag, seq] : {std::pair{"pos", &r.positive_spectrum}, std::pair{"neg", &r.negative_spectrum}}) {
            std::ostringstream os;
            cif::write_csv(os, *seq);
            out.file("cif_rung" + std::to_string(i) + "_" + tag + ".csv", os.str());
        }
    }
    return report.pass() ? kExitPass : kExitFail;
}

int run_lemmas(const GlobalOptions& g, const LemmasCommand& c) {
    const auto seed = parse_seed(g.seed);
    std::vector<std::string> selected = c.only.empty() ? kSuites : c.only;
    for (const auto& s : selected)
        if (std::find(kSuites.begin(), kSuites.end(), s) == kSuites.end())
            throw cif::InvalidParameter("unknown suite '" + s + "'");

    json verdicts = json::array();
    bool all_pass = true;
    std::ostringstream summary;
    summary << "test,pass,worst_case,threshold\n";
    for (const auto& name : kSuites) {
        if (std::find(selected.begin(), selected.end(), name) == selected.end()) continue;
        cif::LemmaVerdict v;
        if (name == "product") v = cif::product_inequality_test({seed, c.trials, {8, 16, 32}});
        else if (name == "holder") v = cif::holder_positive_part_test({seed, c.trials, {16, 32, 64}});
        else if (name == "tensor") v = cif::tensor_lemma_test({{1.0}, {1.0, 1.0}, {3.0, 1.0, 0.5}});
        else if (name == "direct_sum") v = cif::direct_sum_lemma_test({{1.0, 5.0}, {2.0, -1.0}, {3.0, 2.0}});
        else if (name == "perturbation") v = cif::perturbation_limit_test(3, 10.0, 4096, seed);
        else if (name == "transfer") v = cif::limit_transfer_test();
        else v = cif::positive_part_commutation_test(cif::TorusFunction::cosine_mode(1, {1}), {256, 512, 1024});
        all_pass = all_pass && v.pass;
        verdicts.push_back(cif::to_json(v));
        summary << v.test << ',' << (v.pass ? "true" : "false") << ',' << csv_number(v.worst_case) << ','
                << csv_number(v.threshold) << '\n';
    }

    Emitter out(g, "lemmas");
    json cfg = global_config(g, seed);
    cfg["only"] = selected;
    cfg["trials"] = c.trials;
    out.report({{"verdicts", verdicts}, {"pass", all_pass}}, cfg);
    out.table("lemmas.csv", summary.str());
    return all_pass ? kExitPass : kExitFail;
}

int run_norms(const GlobalOptions& g, const FunctionOptions& fn) {
    const auto f = make_function(fn);
    const auto report = cif::membership_report(f);
    Emitter out(g, "norms");
    json cfg = global_config(g, parse_seed(g.seed));
    cfg["function"] = function_config(fn);
    out.report(cif::to_json(report), cfg);
    std::ostringstream os;
    os << "res,l2,lm\n";
    for (const auto& r : report.ladder) os << r.resolution << ',' << csv_number(r.l2) << ',' << csv_number(r.lm) << '\n';
    out.table("norms_ladder.csv", os.str());
    return kExitPass;
}

int run_probe(const GlobalOptions& g, const ProbeCommand& c) {
    Emitter out(g, "probe");
    json cfg = global_config(g, parse_seed(g.seed));
    cfg["kind"] = c.kind;
    cfg["oversample"] = c.oversample;
    std::ostringstream os;
    if (c.kind == "cwikel") {
        const auto f = make_function(c.fn);
        const auto schedule = c.schedule.empty() ? std::vector<double>{256, 512, 1024, 2048} : c.schedule;
        const auto report = cif::cwikel_probe(f, schedule, c.oversample);
        const bool pass = report.max_ratio <= c.bound;
        cfg["function"] = function_config(c.fn);
        cfg["schedule"] = schedule;
        cfg["bound"] = c.bound;
        json body = cif::to_json(report);
        body["bound"] = c.bound;
        body["pass"] = pass;
        out.report(body, cfg);
        os << "R,dim,weak_norm,ratio\n";
        for (const auto& r : report.rows)
            os << csv_number(r.cutoff) << ',' << r.dim << ',' << csv_number(r.weak_norm) << ',' << csv_number(r.ratio)
               << '\n';
        out.table("probe_cwikel.csv", os.str());
        return pass ? kExitPass : kExitFail;
    }
    if (c.kind == "blowup") {
        const auto schedule = c.schedule.empty() ? std::vector<double>{16, 24, 32} : c.schedule;
        cif::CifOptions opt;
        opt.oversample = c.oversample;
        opt.jobs = g.jobs;
        const int d = dim_or(c.fn, 2);
        const auto report = cif::l2_blowup_probe(d, c.cap, schedule, opt);
        cfg["d"] = d;
        cfg["cap"] = c.cap;
        cfg["schedule"] = schedule;
        out.report(cif::to_json(report), cfg);
        os << "R,dim,hs_spike,hs_growth,hs_constant,est_pos\n";
        for (const auto& r : report.rows)
            os << csv_number(r.cutoff) << ',' << r.dim << ',' << csv_number(r.hs_spike) << ','
               << csv_number(r.hs_growth) << ',' << csv_number(r.hs_constant) << ',' << csv_number(r.est_pos) << '\n';
        out.table("probe_blowup.csv", os.str());
        return report.hs_blowup && report.symmetric_ok ? kExitPass : kExitFail;
    }
    throw cif::InvalidParameter("--kind must be cwikel or blowup");
}

int run_spectrum(const GlobalOptions& g, const SpectrumCommand& c) {
    const auto f = make_function(c.fn);
    const cif::LatticeBasis basis(f.dim(), c.cutoff);
    cif::TruncatedOperator op = [&] {
        if (c.kind == "symmetric") return cif::build_symmetric(f, basis, c.oversample);
        if (c.kind == "asymmetric") return cif::build_asymmetric(f, basis, c.oversample);
        if (c.kind == "multiplication") return cif::build_multiplication(f, basis, c.oversample);
        if (c.kind == "commutator") return cif::build_commutator(f, basis, c.oversample);
        if (c.kind == "weighted") return cif::build_weighted(f, basis, c.oversample);
        throw cif::InvalidParameter("unknown operator kind '" + c.kind + "'");
    }();
    const auto mu = cif::singvals(op);
    if (!c.matrix.empty()) {
        std::ofstream os(c.matrix, std::ios::binary);
        if (!os) throw cif::Error("cannot write " + c.matrix);
        cif::write_matrix_binary(os, op.entries);
    }
    Emitter out(g, "spectrum");
    json cfg = global_config(g, parse_seed(g.seed));
    cfg["function"] = function_config(c.fn);
    cfg["cutoff"] = c.cutoff;
    cfg["kind"] = c.kind;
    cfg["oversample"] = c.oversample;
    json body = {{"f", op.f_descriptor},
                 {"kind", cif::to_string(op.kind)},
                 {"R", c.cutoff},
                 {"dim", basis.size()},
                 {"hs_norm", cif::hs_norm(op)},
                 {"singular_values", cif::to_json(mu)}};
    if (op.kind == cif::OperatorKind::symmetric) body["eigenvalues"] = cif::eig_hermitian(op);
    out.report(body, cfg);
    std::ostringstream os;
    cif::write_spectrum_csv(os, mu);
    out.table("spectrum.csv", os.str());
    return kExitPass;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-scale checks of the trace-free integration formula on the torus"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOptions g;
    app.set_config("--config", "", "key=value config file with one [section] per command");
    app.add_option("--jobs", g.jobs, "rungs evaluated concurrently")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "output directory (default: stdout)");
    app.add_option("--format", g.format, "json | csv | both")->check(CLI::IsMember({"json", "csv", "both"}));
    app.add_option("--seed", g.seed, "trial seed (hexadecimal)");
    app.add_flag("!--no-timestamp", g.timestamp, "omit the timestamp field from reports");

    CifCommand cif_cmd;
    auto* cif_app = app.add_subcommand("cif", "limit estimates of n mu(n, T_+-) against the Weyl targets");
    add_function_options(cif_app, cif_cmd.fn, true);
    cif_app->add_option("--schedule", cif_cmd.schedule, "cutoffs R, comma separated")->delimiter(',');
    cif_app->add_option("--tolerance", cif_cmd.tolerance, "relative tolerance (0: default for the run type)");
    cif_app->add_option("--oversample", cif_cmd.oversample, "DFT oversampling factor")->check(CLI::Range(2, 64));
    cif_app->add_option("--spectral-fraction", cif_cmd.spectral_fraction, "fraction of each signed part fitted");
    cif_app->add_option("--quadrature-resolution", cif_cmd.quadrature_resolution, "target quadrature points per axis");
    cif_app->add_flag("--fast-diagonal,!--no-fast-diagonal", cif_cmd.fast_diagonal,
                      "closed-form spectrum for constant f");

    LemmasCommand lem_cmd;
    auto* lem_app = app.add_subcommand("lemmas", "seeded lemma suites");
    lem_app->add_option("--only", lem_cmd.only, "suites to run, comma separated")->delimiter(',');
    lem_app->add_option("--trials", lem_cmd.trials, "trials per size for the random suites")->check(CLI::PositiveNumber);

    FunctionOptions norms_fn;
    auto* norms_app = app.add_subcommand("norms", "L_2 / L_M membership ladder");
    add_function_options(norms_app, norms_fn, true);

    ProbeCommand probe_cmd;
    auto* probe_app = app.add_subcommand("probe", "Cwikel constant probe or L_2 blow-up contrast");
    add_function_options(probe_app, probe_cmd.fn, false);
    probe_app->add_option("--kind", probe_cmd.kind, "cwikel | blowup");
    probe_app->add_option("--schedule", probe_cmd.schedule, "cutoffs R, comma separated")->delimiter(',');
    probe_app->add_option("--bound", probe_cmd.bound, "boundedness gate for the Cwikel ratio");
    probe_app->add_option("--spike-cap", probe_cmd.cap, "cap of |x|^-1 in the blow-up probe");
    probe_app->add_option("--oversample", probe_cmd.oversample, "DFT oversampling factor")->check(CLI::Range(2, 64));

    SpectrumCommand spec_cmd;
    auto* spec_app = app.add_subcommand("spectrum", "raw singular-value dump of one truncation");
    add_function_options(spec_app, spec_cmd.fn, true);
    spec_app->add_option("--cutoff", spec_cmd.cutoff, "lattice cutoff R")->check(CLI::PositiveNumber);
    spec_app->add_option("--kind", spec_cmd.kind, "symmetric | asymmetric | multiplication | commutator | weighted");
    spec_app->add_option("--oversample", spec_cmd.oversample, "DFT oversampling factor")->check(CLI::Range(2, 64));
    spec_app->add_option("--matrix", spec_cmd.matrix, "also write the matrix in the binary container format");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (cif_app->parsed()) return run_cif(g, cif_cmd);
        if (lem_app->parsed()) return run_lemmas(g, lem_cmd);
        if (norms_app->parsed()) return run_norms(g, norms_fn);
        if (probe_app->parsed()) {
            if (probe_cmd.kind == "cwikel" && probe_cmd.fn.family.empty())
                throw cif::InvalidParameter("probe --kind cwikel needs --family");
            return run_probe(g, probe_cmd);
        }
        return run_spectrum(g, spec_cmd);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
}
