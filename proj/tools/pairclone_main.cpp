#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pairclone/archive.hpp"
#include "pairclone/diagnostics.hpp"
#include "pairclone/io.hpp"
#include "pairclone/model.hpp"
#include "pairclone/sampler.hpp"
#include "pairclone/selection.hpp"
#include "pairclone/simulate.hpp"
#include "pairclone/summary.hpp"

namespace fs = std::filesystem;
using namespace pairclone;

namespace {

struct Options {
    std::string input;
    std::string snv;
    std::string out;
    std::string config;
    std::string archive;
    std::string scenario;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    bool purity = false;
    std::optional<double> b;
    std::optional<int> cmin, cmax, iters, burnin, thin;
    int num_subclones = 0;
    bool getting_it_right = false;
    bool no_jacobian = false;
    std::vector<std::string> stats;
    bool save_training = false;
};

void add_common(CLI::App* cmd, Options& o)
{
    cmd->add_option("--input", o.input, "Counts TSV");
    cmd->add_option("--snv", o.snv, "SNV sidecar TSV");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--seed", o.seed, "Master random seed");
    cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--config", o.config, "Hyperparameter file (key = value lines)");
    cmd->add_flag("--purity", o.purity, "Model a normal subclone with weight w*");
    cmd->add_option("--b", o.b, "Training fraction (default: calibrated from the data)");
    cmd->add_option("--cmin", o.cmin, "Smallest candidate C");
    cmd->add_option("--cmax", o.cmax, "Largest candidate C");
    cmd->add_option("--iters", o.iters, "Iterations");
    cmd->add_option("--burnin", o.burnin, "Burn-in iterations");
    cmd->add_option("--thin", o.thin, "Thinning interval");
}

Hyperparameters hyperparameters(const Options& o)
{
    Hyperparameters hp = o.config.empty() ? Hyperparameters {} : load_hyperparameters(o.config);
    if (o.b) hp.b = *o.b;
    if (o.cmin) hp.c_min = *o.cmin;
    if (o.cmax) hp.c_max = *o.cmax;
    if (o.iters) hp.iterations = *o.iters;
    if (o.burnin) hp.burn_in = *o.burnin;
    if (o.thin) hp.thin = *o.thin;
    hp.validate();
    return hp;
}

fs::path require_out(const Options& o)
{
    if (o.out.empty()) throw Error {"--out is required"};
    fs::create_directories(o.out);
    return o.out;
}

struct Input {
    ReadCountTensor pairs;
    std::optional<SnvCounts> snvs;
    ReadCountTensor data; // pairs with SNV pseudo-pairs appended
    MissingnessRates v;
};

Input load_input(const Options& o)
{
    if (o.input.empty()) throw Error {"--input is required"};
    Input in;
    in.pairs = parse_counts(fs::path {o.input});
    in.data = in.pairs;
    if (!o.snv.empty()) {
        in.snvs = parse_snvs(fs::path {o.snv}, in.pairs.sample_ids);
        in.data = augment_snvs(in.pairs, *in.snvs);
    }
    in.v = MissingnessRates::empirical(in.data);
    return in;
}

void write_run_manifest(const fs::path& dir, const std::string& command, const Options& o, const Hyperparameters& hp)
{
    nlohmann::json j {
        {"command", command},
        {"version", PAIRCLONE_VERSION},
        {"seed", o.seed},
        {"purity", o.purity},
        {"input", o.input},
        {"snv", o.snv},
        {"hyperparameters", hp},
        {"config_hash", fnv1a_hex(nlohmann::json {{"hp", hp}, {"seed", o.seed}, {"purity", o.purity}, {"command", command}}.dump())},
    };
    write_json(dir / "run.json", j);
}

ProgressFn progress_logger(const std::string& label, int total)
{
    return [label, total](int it, double ll) {
        std::cerr << label << ": iteration " << it << "/" << total << ", cold log-likelihood " << ll << '\n';
    };
}

int cmd_simulate(const Options& o)
{
    if (o.scenario.empty()) throw Error {"--scenario is required"};
    const auto out = require_out(o);
    const auto sim = generate(builtin_spec(o.scenario), o.seed);
    write_counts(out / "counts.tsv", sim.counts);
    if (sim.snvs.num_snvs > 0) write_snvs(out / "snv.tsv", sim.snvs, sim.counts.sample_ids);
    write_json(out / "truth.json", truth_json(sim));
    std::cout << "wrote " << (out / "counts.tsv").string() << '\n';
    return 0;
}

int cmd_fit(const Options& o)
{
    if (o.num_subclones < 1) throw Error {"--C must be >= 1"};
    const auto hp = hyperparameters(o);
    const auto out = require_out(o);
    const auto in = load_input(o);
    const auto archive = run_chain(in.data, in.v, hp, o.num_subclones, o.seed, o.threads, o.purity,
                                   progress_logger("fit", hp.iterations));
    write_archive(archive, out / "archive");
    write_run_manifest(out, "fit", o, hp);
    std::cout << "wrote " << archive.samples.size() << " samples to " << (out / "archive").string() << '\n';
    return 0;
}

int cmd_select(const Options& o)
{
    const auto hp = hyperparameters(o);
    const auto out = require_out(o);
    const auto in = load_input(o);
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = run_selection(in.data, in.v, hp, o.seed, o.threads, o.purity);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "select: training ensembles finished in " << secs << " s, mode C = " << result.mode << '\n';
    auto report = selection_json(result);
    write_json(out / "selection.json", report);
    if (o.save_training) {
        for (const auto& trace : result.traces) write_archive(trace.archive, out / "training" / ("C" + std::to_string(trace.num_subclones)));
    }
    const auto archive = run_chain(in.data, in.v, hp, result.mode, o.seed, o.threads, o.purity,
                                   progress_logger("select: full-data run", hp.iterations));
    write_archive(archive, out / "archive");
    write_run_manifest(out, "select", o, hp);
    std::cout << report.dump(2) << '\n';
    return 0;
}

int cmd_summarize(const Options& o)
{
    if (o.archive.empty()) throw Error {"missing archive: pass --archive DIR"};
    const auto archive = read_archive(o.archive);
    const auto out = require_out(o);
    const auto in = load_input(o);
    if (in.data.num_pairs() != archive.manifest.num_pairs || in.data.num_samples() != archive.manifest.num_samples) {
        throw Error {"archive dimensions do not match the input data"};
    }
    ThreadPool pool {o.threads};
    const auto est = point_estimate(archive, {}, &pool);
    const auto res = residuals(in.data, in.v, est.state);
    const auto res_summary = summarize_residuals(res);
    std::optional<SplitGenotypes> split;
    if (in.snvs) split = split_genotypes(est.z.codes, in.pairs.num_pairs(), in.snvs->num_snvs, est.z.num_subclones);
    const auto report = summary_json(est, res_summary, split ? &*split : nullptr);
    write_json(out / "summary.json", report);
    write_residuals(out / "residuals.tsv", res, in.data);
    {
        std::ofstream z {out / "z_matrix.tsv"};
        z << "pair_id";
        for (int c = 0; c < est.z.num_subclones; ++c) z << "\tsubclone_" << c + 1;
        z << '\n';
        for (std::size_t k = 0; k < est.z.num_pairs; ++k) {
            z << in.data.pair_ids[k];
            for (int c = 0; c < est.z.num_subclones; ++c) {
                if (split && k >= split->num_pairs) z << '\t' << split->snv_dosage[(k - split->num_pairs) * est.z.num_subclones + c];
                else z << '\t' << est.z.at(k, c) + 1;
            }
            z << '\n';
        }
    }
    std::cout << report.dump(2) << '\n';
    return 0;
}

int cmd_diagnose(const Options& o)
{
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!o.out.empty()) {
        const auto out = require_out(o);
        file.open(out / "diagnostics.tsv");
        os = &file;
    }
    if (o.getting_it_right) {
        auto config = GirConfig::standard();
        config.hp = o.config.empty() ? Hyperparameters {} : load_hyperparameters(o.config);
        if (o.iters) config.iterations = *o.iters;
        if (o.burnin) config.burn_in = *o.burnin;
        config.kernel.theta_jacobian = !o.no_jacobian;
        if (!o.stats.empty()) {
            config.statistics.clear();
            for (const auto& s : o.stats) config.statistics.push_back(Statistic::parse(s));
        }
        const auto rows = getting_it_right(config, o.seed);
        *os << "statistic\tmean\treference\treference_se\tz\tp\n";
        for (const auto& r : rows) {
            *os << r.name << '\t' << r.mean << '\t' << r.reference << '\t' << r.reference_se << '\t';
            if (r.score.degenerate) *os << "NA\tNA\n";
            else *os << r.score.z << '\t' << r.score.p << '\n';
        }
        return 0;
    }
    if (o.archive.empty()) throw Error {"missing archive: pass --archive DIR or --getting-it-right"};
    const auto archive = read_archive(o.archive);
    std::optional<MissingnessRates> v;
    if (!o.input.empty()) {
        const auto in = load_input(o);
        v = in.v;
    }
    std::vector<std::string> names = o.stats;
    if (names.empty()) {
        names = {"w_1_1"};
        if (v) names.push_back("p_1_1_1");
    }
    *os << "statistic\tmean\tz\tp\n";
    for (const auto& name : names) {
        const auto stat = Statistic::parse(name);
        const auto trace = statistic_trace(archive, stat, v ? &*v : nullptr);
        const auto z = geweke_convergence(trace);
        double mean = 0.0;
        for (double x : trace) mean += x;
        mean /= static_cast<double>(trace.size());
        *os << name << '\t' << mean << '\t';
        if (z.degenerate) *os << "NA\tNA\n";
        else *os << z.z << '\t' << z.p << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app {"Bayesian subclone reconstruction from phased mutation-pair read counts"};
    app.set_version_flag("--version", PAIRCLONE_VERSION);
    app.require_subcommand(1);
    Options o;

    auto* simulate = app.add_subcommand("simulate", "Generate a built-in synthetic scenario");
    add_common(simulate, o);
    simulate->add_option("--scenario", o.scenario, "sim1, sim2, sim3, sim3_purity or sim3_snv");

    auto* fit = app.add_subcommand("fit", "Sample the posterior at a fixed number of subclones");
    add_common(fit, o);
    fit->add_option("--C", o.num_subclones, "Number of subclones")->required();

    auto* select = app.add_subcommand("select", "Choose C, then sample the posterior at the chosen C");
    add_common(select, o);
    select->add_flag("--save-training", o.save_training, "Also write the training archives of every candidate C");

    auto* summarize = app.add_subcommand("summarize", "Point estimates and residuals from an archive");
    add_common(summarize, o);
    summarize->add_option("--archive", o.archive, "Archive directory");

    auto* diagnose = app.add_subcommand("diagnose", "Convergence and sampler checks");
    add_common(diagnose, o);
    diagnose->add_option("--archive", o.archive, "Archive directory");
    diagnose->add_flag("--getting-it-right", o.getting_it_right, "Run the successive-conditional simulator check");
    diagnose->add_flag("--no-jacobian", o.no_jacobian, "Drop the theta Jacobian (negative control)");
    diagnose->add_option("--stat", o.stats, "Statistic such as w_1_2 or p_1_23_3 (repeatable)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (simulate->parsed()) return cmd_simulate(o);
        if (fit->parsed()) return cmd_fit(o);
        if (select->parsed()) return cmd_select(o);
        if (summarize->parsed()) return cmd_summarize(o);
        if (diagnose->parsed()) return cmd_diagnose(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
