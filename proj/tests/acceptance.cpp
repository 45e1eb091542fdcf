// Acceptance run: one PASS/FAIL line per criterion.
//
// Exit status is 0 when the set of failing criteria equals the --expect-fail
// set (empty by default), 1 otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <CLI11.hpp>

#include "cif/asymptotics.hpp"
#include "cif/lemmalab.hpp"
#include "cif/orlicz.hpp"
#include "cif/quadrature.hpp"

using namespace cif;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLambdaUnitMeasure = 1.2567506185377672;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x, int digits = 6) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

double max_seq_gap(const SingularValueSeq& a, const SingularValueSeq& b) {
    if (a.size() != b.size()) return HUGE_VAL;
    double gap = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
    return gap;
}

Outcome c1() {
    const auto rep = cif_check(TorusFunction::constant(1, 1.0), {1e4, 1e5, 1e6});
    const double pos = rep.extrapolated_pos.value;
    const bool neg_zero = rep.extrapolated_neg.value == 0.0 &&
                          std::all_of(rep.rungs.begin(), rep.rungs.end(),
                                      [](const CifRung& r) { return r.negative.count == 0; });
    return {rep.fast_path && std::abs(pos - 2.0) <= 0.01 * 2.0 && neg_zero,
            "pos=" + fmt(pos, 8) + " target=2 neg=" + fmt(rep.extrapolated_neg.value)};
}

Outcome c2() {
    const auto rep = cif_check(TorusFunction::shifted_cosine(1, 2.0, {1}), {256, 512, 1024, 2048});
    const double pos = rep.extrapolated_pos.value;
    const double tail = rep.rungs.back().negative.max_tail;
    const double neg = rep.extrapolated_neg.value;
    return {std::abs(pos - 4.0) <= 0.05 * 4.0 && neg < 0.05 && tail < 0.05,
            "pos=" + fmt(pos, 8) + " target=4 neg=" + fmt(neg) + " neg_tail=" + fmt(tail)};
}

Outcome c3() {
    const auto rep = cif_check(TorusFunction::cosine_mode(2, {1, 0}), {24, 32, 40, 48});
    const double pos = rep.extrapolated_pos.value;
    const double neg = rep.extrapolated_neg.value;
    const double asym = std::abs(pos - neg) / std::max(pos, neg);
    const bool ok = std::abs(pos - 1.0) <= 0.15 && std::abs(neg - 1.0) <= 0.15 && asym <= 0.02;
    return {ok, "pos=" + fmt(pos) + " neg=" + fmt(neg) + " target=" + fmt(rep.target_pos) +
                    " pos/neg gap=" + fmt(100 * asym, 3) + "%"};
}

Outcome c4() {
    CifOptions opts;
    opts.keep_spectra = true;
    const auto f = TorusFunction::shifted_cosine(1, 0.4, {1});
    const std::vector<double> schedule{256, 512, 1024};
    const auto a = cif_check(f, schedule, opts);
    const auto b = cif_check(f.scaled(-1.0), schedule, opts);
    double gap = 0.0;
    for (std::size_t i = 0; i < a.rungs.size(); ++i) {
        const auto& ra = a.rungs[i];
        const auto& rb = b.rungs[i];
        gap = std::max({gap, std::abs(ra.positive.estimate.alpha_hat - rb.negative.estimate.alpha_hat),
                        std::abs(ra.negative.estimate.alpha_hat - rb.positive.estimate.alpha_hat),
                        max_seq_gap(ra.positive_spectrum, rb.negative_spectrum),
                        max_seq_gap(ra.negative_spectrum, rb.positive_spectrum)});
    }
    gap = std::max({gap, std::abs(a.extrapolated_pos.value - b.extrapolated_neg.value),
                    std::abs(a.extrapolated_neg.value - b.extrapolated_pos.value)});
    return {gap <= 1e-10, "f = 0.4 + cos x, max swap gap=" + fmt(gap, 3)};
}

Outcome c5() {
    const auto t = tensor_lemma_test({{1.0}, {1.0, 1.0}, {3.0, 1.0, 0.5}}, 100000);
    const auto d = direct_sum_lemma_test({{1.0, 5.0}, {2.0, -1.0}, {3.0, 2.0}}, 100000);
    double oracle = d.details["oracle_gap"].get<double>();
    for (const auto& c : t.details["cases"]) oracle = std::max(oracle, c["oracle_gap"].get<double>());
    return {t.pass && d.pass && oracle <= 1e-12,
            "oracle gap=" + fmt(oracle, 3) + " tensor worst=" + fmt(100 * t.worst_case, 3) +
                "% direct_sum=" + fmt(100 * d.worst_case, 3) + "%"};
}

Outcome c6() {
    const auto v = product_inequality_test({0xC1F, 500, {8, 16, 32}});
    return {v.pass && v.details["violations"].get<int>() == 0,
            "violations=" + v.details["violations"].dump() + " worst slack=" + fmt(v.worst_case, 3)};
}

Outcome c7() {
    const auto v = holder_positive_part_test({0xC1F, 500, {16, 32, 64}});
    const auto& sizes = v.details["per_size"];
    const double first = sizes.front()["max_ratio"].get<double>();
    const double last = sizes.back()["max_ratio"].get<double>();
    return {v.pass && v.worst_case <= 10.0 && last <= 2.0 * first,
            "max ratio=" + fmt(v.worst_case, 4) + " (size 16: " + fmt(first, 4) + ", size 64: " + fmt(last, 4) + ")"};
}

Outcome c8() {
    const std::vector<double> schedule{256, 512, 1024, 2048};
    const std::vector<TorusFunction> family{TorusFunction::constant(1, 1.0), TorusFunction::shifted_cosine(1, 2.0, {1}),
                                            TorusFunction::box_indicator(1, {-1.0}, {1.0})};
    double worst = 0.0;
    double one_lo = HUGE_VAL, one_hi = 0.0;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const auto rep = cwikel_probe(family[i], schedule);
        worst = std::max(worst, rep.max_ratio);
        if (i == 0)
            for (const auto& r : rep.rows) {
                one_lo = std::min(one_lo, r.ratio);
                one_hi = std::max(one_hi, r.ratio);
            }
    }
    const bool one_ok = one_lo >= 0.57 - 0.05 && one_hi <= 0.57 + 0.05;
    return {worst <= 3.0 && one_ok, "max ratio=" + fmt(worst, 4) + " f=1 ratio in [" + fmt(one_lo, 6) + ", " +
                                        fmt(one_hi, 6) + "]"};
}

Outcome c9() {
    const auto rep = l2_blowup_probe(2, 1e6, {16, 24, 32});
    std::string growth;
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        growth += (i > 1 ? "," : "") + fmt(100 * rep.rows[i].hs_growth, 3) + "%";
    return {rep.hs_blowup && rep.symmetric_ok,
            "hs growth per rung=" + growth + " (need >= 5%) pos=" + fmt(rep.extrapolated) + " target=" +
                fmt(rep.target)};
}

Outcome c10() {
    const std::vector<double> one{1.0};
    const double lambda = luxemburg_norm(one, one);
    const bool oracle = std::abs(lambda - kLambdaUnitMeasure) <= 1e-6;

    double worst = 0.0;
    const auto grid = QuadratureGrid::uniform(1, 512);
    for (const auto& f : {TorusFunction::shifted_cosine(1, 0.3, {2}), TorusFunction::box_indicator(1, {-1.0}, {0.5}),
                          TorusFunction::constant(1, 1.0)}) {
        const double n1 = orlicz_norm(f, grid);
        for (double c : {-4.0, 0.25, 7.0})
            worst = std::max(worst, std::abs(orlicz_norm(f.scaled(c), grid) - std::abs(c) * n1) / (std::abs(c) * n1));
    }
    int violations = 0;
    std::mt19937_64 rng(0xC1F);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<double> a(256), b(256), w(256, 2 * kPi / 256);
    for (int t = 0; t < 200; ++t) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = u(rng);
            b[i] = a[i] + u(rng) * (t % 2);
        }
        if (luxemburg_norm(a, w) > luxemburg_norm(b, w) * (1 + 1e-8)) ++violations;
    }
    return {oracle && worst <= 1e-8 && violations == 0,
            "lambda=" + fmt(lambda, 14) + " homogeneity rel err=" + fmt(worst, 3) +
                " monotonicity violations=" + std::to_string(violations)};
}

Outcome c11() {
    const std::vector<double> schedule{256, 512, 1024};
    const auto trend = positive_part_commutation_test(TorusFunction::cosine_mode(1, {1}), schedule);
    const auto control = positive_part_commutation_test(TorusFunction::shifted_cosine(1, 2.0, {1}), schedule);
    std::string values;
    for (const auto& r : trend.details["rungs"]) values += (values.empty() ? "" : ",") + fmt(r["n_mu"].get<double>(), 3);
    return {trend.details["mode"] == "decay_trend" && trend.pass && control.pass && control.worst_case <= 1e-9,
            "n mu(n)=" + values + " worst rung ratio=" + fmt(trend.worst_case, 3) +
                " control max entry=" + fmt(control.worst_case, 3)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cifctl(const std::string& args) {
    const std::string cmd = std::string(CIFCTL_PATH) + " " + args + " > /dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Outcome c12() {
    const fs::path root = fs::temp_directory_path() / ("cif_acceptance_" + std::to_string(::getpid()));
    const std::vector<std::string> commands{
        "cif --d 1 --family shifted_cosine --shift 2 --schedule 256,512,1024",
        "cif --d 2 --family cosine_mode --mode 1,0 --schedule 12,16,20",
        "lemmas --only product,holder,tensor,direct_sum,transfer --trials 100",
        "probe --kind cwikel --d 1 --family box_indicator --lo=-1 --hi 1 --schedule 128,256",
        "norms --d 2 --family radial_logspike"};
    std::size_t files = 0, differing = 0;
    bool ran = true;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const fs::path dir = root / ("cmd" + std::to_string(i));
        const fs::path first = root / ("cmd" + std::to_string(i) + "_first");
        const std::string args = "--no-timestamp --format both --out " + dir.string() + " " + commands[i];
        ran = ran && run_cifctl(args) != 1;
        fs::rename(dir, first);
        ran = ran && run_cifctl(args) != 1;
        for (const auto& entry : fs::directory_iterator(first)) {
            ++files;
            const fs::path other = dir / entry.path().filename();
            if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
        }
    }
    fs::remove_all(root);
    return {ran && files > 0 && differing == 0, std::to_string(commands.size()) + " commands, " +
                                                    std::to_string(files) + " files, " + std::to_string(differing) +
                                                    " differing"};
}

struct Criterion {
    int id;
    std::string name;
    double budget_s; // 0 = no runtime bound
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> expect_fail, only;
    app.add_option("--expect-fail", expect_fail, "criteria documented as failing")->delimiter(',');
    app.add_option("--only", only, "run a subset")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "cif d=1 f=1 fast path", 10, c1},
        {2, "cif d=1 f=2+cos x", 300, c2},
        {3, "cif d=2 f=cos x", 600, c3},
        {4, "sign anti-symmetry", 0, c4},
        {5, "tensor and direct-sum lemmas", 60, c5},
        {6, "product inequality", 0, c6},
        {7, "positive-part Hoelder probe", 0, c7},
        {8, "Cwikel probe", 0, c8},
        {9, "L_M minus L_2 contrast", 900, c9},
        {10, "Orlicz oracle and properties", 0, c10},
        {11, "positive-part commutation trend", 0, c11},
        {12, "report determinism", 0, c12},
    };

    std::set<int> failed;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.budget_s == 0 || secs < c.budget_s;
        const bool pass = o.pass && in_time;
        if (!pass) failed.insert(c.id);
        std::string time = fmt(secs, 3) + "s";
        if (c.budget_s > 0) time += " of " + fmt(c.budget_s, 4) + "s";
        std::printf("criterion %2d %s  %s: %s [%s]\n", c.id, pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(),
                    time.c_str());
        std::fflush(stdout);
    }

    std::set<int> expected;
    for (int id : expect_fail)
        if (only.empty() || std::find(only.begin(), only.end(), id) != only.end()) expected.insert(id);
    std::printf("summary: %zu failing", failed.size());
    for (int id : failed) std::printf(" %d", id);
    std::printf("; expected failing:");
    for (int id : expected) std::printf(" %d", id);
    std::printf("\n");
    return failed == expected ? 0 : 1;
}
