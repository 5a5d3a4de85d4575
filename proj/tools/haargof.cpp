// Copyright 2026 The haargof Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// haargof: samplers and uniformity statistics for random rotation matrices.
//
// Subcommands:
//   sample         draw matrices from a sampler and write the sample file
//   stat           evaluate one statistic on a sample file
//   sweep          run a full experiment described by a JSON config
//   null-quantiles Monte Carlo quantiles of the kernel statistic's null law
//   power          compare two files of statistic values (power + AD)
//   expfam-calib   print the log-normalizer value/gradient/Hessian
//
// Exit codes: 0 success, 1 usage, 2 numerical failure, 3 I/O failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "haargof/harness.hpp"
#include "haargof/nulldist.hpp"
#include "haargof/selberg.hpp"

namespace {

using haargof::Error;
using haargof::errc;

// Writes either to a file or, for path "-", to stdout.
class Sink {
  public:
    explicit Sink(const std::string& path) {
        if (path == "-") {
            os_ = &std::cout;
        } else {
            file_.open(path);
            if (!file_) throw Error(errc::io, "cannot write output file: " + path);
            os_ = &file_;
        }
        *os_ << std::setprecision(17);
    }
    std::ostream& stream() { return *os_; }

  private:
    std::ofstream file_;
    std::ostream* os_ = nullptr;
};

std::vector<double> read_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io, "cannot open value file: " + path);
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double v;
        if (!(ls >> v))
            throw Error(errc::io, "malformed value line in " + path + ": " + line);
        values.push_back(v);
    }
    if (values.empty()) throw Error(errc::io, "no values in " + path);
    return values;
}

nlohmann::json stat_to_json(const haargof::StatisticResult& r) {
    nlohmann::json j{{"statistic", r.statistic_id},
                     {"value", r.value},
                     {"N", r.N},
                     {"n", r.n},
                     {"pvalue_method", r.pvalue_method},
                     {"warnings",
                      {{"jitter_events", r.warnings.jitter_events},
                       {"det_override_events", r.warnings.det_override_events}}}};
    if (!std::isnan(r.z)) j["z"] = r.z;
    if (!std::isnan(r.q)) j["q"] = r.q;
    if (r.trace_k > 0) j["k"] = r.trace_k;
    if (r.pvalue) j["pvalue"] = *r.pvalue;
    return j;
}

void emit_stat(Sink& sink, const haargof::StatisticResult& r, const std::string& format) {
    if (format == "json") {
        sink.stream() << stat_to_json(r).dump(2) << '\n';
        return;
    }
    auto num = [](double v) {
        std::ostringstream os;
        os << std::setprecision(17) << v;
        return os.str();
    };
    sink.stream() << "statistic,value,N,n,z,q,k,pvalue,pvalue_method,"
                     "jitter_events,det_override_events\n"
                  << r.statistic_id << ',' << num(r.value) << ',' << r.N << ',' << r.n << ','
                  << num(r.z) << ',' << num(r.q) << ',' << r.trace_k << ','
                  << (r.pvalue ? num(*r.pvalue) : "nan") << ',' << r.pvalue_method << ','
                  << r.warnings.jitter_events << ',' << r.warnings.det_override_events << '\n';
}

struct SampleOpts {
    std::string sampler = "haar";
    int dim = 25;
    int num = 100;
    long long steps = 0;
    int m1 = 1;
    int m2 = 1;
    std::uint64_t seed = 0;
    std::string out = "-";
};

void run_sample(const SampleOpts& o) {
    haargof::SamplerSpec spec;
    spec.kind = haargof::sampler_from_name(o.sampler);
    spec.dim = o.dim;
    spec.steps = o.steps;
    spec.m1 = o.m1;
    spec.m2 = o.m2;
    spec.seed = o.seed;
    const auto sample = haargof::draw_sample(spec, haargof::RngStream(o.seed), o.num);
    Sink sink(o.out);
    haargof::write_sample(sink.stream(), sample);
}

struct StatOpts {
    std::string in;
    std::string statistic;
    double z = 0.5;
    double q = 0.5;
    long long k = 1;
    bool strict_degenerate = false;
    bool allow_det_minus = false;
    std::string format = "json";
    std::string out = "-";
};

void run_stat(const StatOpts& o) {
    haargof::StatisticSpec spec;
    spec.id = o.statistic;
    spec.z = o.z;
    spec.q = o.q;
    spec.trace_k = o.k;
    spec.strict_degenerate = o.strict_degenerate;
    spec.allow_det_minus = o.allow_det_minus;
    const auto sample = haargof::read_sample_file(o.in);
    const auto result = haargof::detail::evaluate_statistic(spec, sample);
    Sink sink(o.out);
    emit_stat(sink, result, o.format);
}

struct SweepOpts {
    std::string config;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    std::string out;
    std::vector<std::string> formats;
};

void run_sweep_cmd(const SweepOpts& o) {
    haargof::ExperimentConfig cfg = haargof::read_config_file(o.config);
    if (o.seed_set) {
        cfg.master_seed = o.seed;
        cfg.sampler.seed = o.seed;
    }
    if (o.threads > 0) cfg.threads = o.threads;
    if (!o.out.empty()) cfg.out_dir = o.out;
    const auto report = haargof::run_sweep(cfg);
    haargof::emit_report(report, o.formats.empty()
                                     ? std::vector<std::string>{"csv", "json"}
                                     : o.formats);
    std::cout << "sweep complete: " << report.cells.size() << " cells -> " << cfg.out_dir
              << '\n';
}

struct QuantileOpts {
    int n = 25;
    double z = 0.5;
    std::vector<double> probs;
    long long draws = 200000;
    std::uint64_t seed = haargof::kNullMixtureSeed;
    std::string format = "csv";
    std::string out = "-";
};

void run_null_quantiles(const QuantileOpts& o) {
    std::vector<double> probs = o.probs.empty() ? std::vector<double>{0.5, 0.95, 0.99} : o.probs;
    Sink sink(o.out);
    if (o.format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (double p : probs) {
            const auto qe = haargof::tz_null_quantile(o.n, o.z, p, o.draws, o.seed);
            rows.push_back({{"prob", p}, {"quantile", qe.value}, {"mc_stderr", qe.mc_stderr}});
        }
        sink.stream() << nlohmann::json{{"n", o.n}, {"z", o.z}, {"draws", o.draws},
                                        {"quantiles", rows}}
                             .dump(2)
                      << '\n';
        return;
    }
    sink.stream() << "prob,quantile,mc_stderr\n";
    for (double p : probs) {
        const auto qe = haargof::tz_null_quantile(o.n, o.z, p, o.draws, o.seed);
        sink.stream() << p << ',' << qe.value << ',' << qe.mc_stderr << '\n';
    }
}

struct PowerOpts {
    std::string alt;
    std::string null_path;
    double alpha = 0.05;
    std::string format = "json";
    std::string out = "-";
};

void run_power(const PowerOpts& o) {
    const auto alt = read_value_file(o.alt);
    const auto nul = read_value_file(o.null_path);
    const double power = haargof::estimate_power(alt, nul, o.alpha);
    const auto ad = haargof::ad_ksample({alt, nul});
    Sink sink(o.out);
    if (o.format == "json") {
        sink.stream() << nlohmann::json{{"alpha", o.alpha},
                                        {"power", power},
                                        {"ad",
                                         {{"a2akn", ad.a2akn},
                                          {"standardized", ad.standardized},
                                          {"pvalue", ad.pvalue}}}}
                             .dump(2)
                      << '\n';
    } else {
        sink.stream() << "alpha,power,ad_stat,ad_pvalue\n"
                      << o.alpha << ',' << power << ',' << ad.standardized << ',' << ad.pvalue
                      << '\n';
    }
}

struct CalibOpts {
    int n = 25;
    double gamma = 1.0;
    double alpha = 1.5;
    double beta = 0.5;
    std::string format = "json";
    std::string out = "-";
};

void run_expfam_calib(const CalibOpts& o) {
    haargof::ExpFamParams p;
    p.gamma = o.gamma;
    p.alpha = o.alpha;
    p.beta = o.beta;
    const auto d = haargof::selberg_derivatives(o.n, p);
    Sink sink(o.out);
    if (o.format == "json") {
        nlohmann::json hess = nlohmann::json::array();
        for (int i = 0; i < 3; ++i)
            hess.push_back({d.hess(i, 0), d.hess(i, 1), d.hess(i, 2)});
        sink.stream() << nlohmann::json{{"n", o.n},
                                        {"gamma", p.gamma},
                                        {"alpha", p.alpha},
                                        {"beta", p.beta},
                                        {"value", d.value},
                                        {"grad", {d.grad(0), d.grad(1), d.grad(2)}},
                                        {"hess", hess}}
                             .dump(2)
                      << '\n';
        return;
    }
    sink.stream() << "quantity,i,j,value\n";
    sink.stream() << "value,,," << d.value << '\n';
    for (int i = 0; i < 3; ++i) sink.stream() << "grad," << i << ",," << d.grad(i) << '\n';
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            sink.stream() << "hess," << i << ',' << j << ',' << d.hess(i, j) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Samplers and uniformity statistics for random rotation matrices"};
    app.require_subcommand(1);

    auto sample_opts = std::make_shared<SampleOpts>();
    auto* sample = app.add_subcommand("sample", "Draw matrices and write a sample file");
    sample->add_option("--sampler", sample_opts->sampler, "haar|kac|reflections|jor")
        ->check(CLI::IsMember({"haar", "kac", "reflections", "jor"}));
    sample->add_option("-n,--dim", sample_opts->dim, "matrix dimension")
        ->required()
        ->check(CLI::PositiveNumber);
    sample->add_option("-N,--num", sample_opts->num, "number of matrices")
        ->check(CLI::PositiveNumber);
    sample->add_option("-k,--steps", sample_opts->steps,
                       "walk steps (kac/reflections) or iterations (jor)")
        ->check(CLI::NonNegativeNumber);
    sample->add_option("--m1", sample_opts->m1, "jor: right rotation-sweep count")
        ->check(CLI::NonNegativeNumber);
    sample->add_option("--m2", sample_opts->m2, "jor: left rotation-sweep count")
        ->check(CLI::NonNegativeNumber);
    sample->add_option("--seed", sample_opts->seed, "rng seed");
    sample->add_option("--out", sample_opts->out, "output path ('-' = stdout)");
    sample->callback([sample_opts] { run_sample(*sample_opts); });

    auto stat_opts = std::make_shared<StatOpts>();
    auto* stat = app.add_subcommand("stat", "Evaluate one statistic on a sample file");
    stat->add_option("--in", stat_opts->in, "matrix sample file")->required();
    stat->add_option("--statistic", stat_opts->statistic,
                     "rayleigh|gine|expfam|tz|uzq|trace")
        ->required()
        ->check(CLI::IsMember({"rayleigh", "gine", "expfam", "tz", "uzq", "trace"}));
    stat->add_option("--z", stat_opts->z, "kernel center weight (tz/uzq)");
    stat->add_option("--q", stat_opts->q, "rank damping (uzq)");
    stat->add_option("--k", stat_opts->k, "trace power")->check(CLI::PositiveNumber);
    stat->add_flag("--strict-degenerate", stat_opts->strict_degenerate,
                   "fail on degenerate spectra instead of jittering");
    stat->add_flag("--allow-det-minus", stat_opts->allow_det_minus,
                   "accept determinant -1 elements where normally rejected");
    stat->add_option("--format", stat_opts->format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    stat->add_option("--out", stat_opts->out, "output path ('-' = stdout)");
    stat->callback([stat_opts] { run_stat(*stat_opts); });

    auto sweep_opts = std::make_shared<SweepOpts>();
    auto* sweep = app.add_subcommand("sweep", "Run a full experiment from a JSON config");
    sweep->add_option("--config", sweep_opts->config, "experiment config (JSON)")->required();
    auto* seed_opt = sweep->add_option("--seed", sweep_opts->seed, "override master seed");
    sweep->add_option("--threads", sweep_opts->threads, "override worker count")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--out", sweep_opts->out, "override output directory");
    sweep->add_option("--format", sweep_opts->formats, "csv|json (repeatable)")
        ->check(CLI::IsMember({"csv", "json"}));
    sweep->callback([sweep_opts, seed_opt] {
        sweep_opts->seed_set = seed_opt->count() > 0;
        run_sweep_cmd(*sweep_opts);
    });

    auto quant_opts = std::make_shared<QuantileOpts>();
    auto* quant = app.add_subcommand("null-quantiles",
                                     "Monte Carlo null quantiles of the kernel statistic");
    quant->add_option("-n,--dim", quant_opts->n, "matrix dimension")
        ->required()
        ->check(CLI::PositiveNumber);
    quant->add_option("--z", quant_opts->z, "kernel center weight")->required();
    quant->add_option("--probs", quant_opts->probs, "quantile levels (default 0.5 0.95 0.99)");
    quant->add_option("--draws", quant_opts->draws, "Monte Carlo draws")
        ->check(CLI::PositiveNumber);
    quant->add_option("--seed", quant_opts->seed, "rng seed");
    quant->add_option("--format", quant_opts->format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    quant->add_option("--out", quant_opts->out, "output path ('-' = stdout)");
    quant->callback([quant_opts] { run_null_quantiles(*quant_opts); });

    auto power_opts = std::make_shared<PowerOpts>();
    auto* power = app.add_subcommand("power",
                                     "Empirical power and AD comparison of two value files");
    power->add_option("--alt", power_opts->alt, "alternative cohort values (one per line)")
        ->required();
    power->add_option("--null", power_opts->null_path, "null cohort values (one per line)")
        ->required();
    power->add_option("--alpha", power_opts->alpha, "test level")
        ->check(CLI::Range(1e-9, 1.0 - 1e-9));
    power->add_option("--format", power_opts->format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    power->add_option("--out", power_opts->out, "output path ('-' = stdout)");
    power->callback([power_opts] { run_power(*power_opts); });

    auto calib_opts = std::make_shared<CalibOpts>();
    auto* calib = app.add_subcommand(
        "expfam-calib", "Log-normalizer value, gradient and Hessian at given parameters");
    calib->add_option("-n,--rank", calib_opts->n, "number of eigenvalue angles")
        ->required()
        ->check(CLI::PositiveNumber);
    calib->add_option("--gamma", calib_opts->gamma, "gamma parameter");
    calib->add_option("--alpha", calib_opts->alpha, "alpha parameter");
    calib->add_option("--beta", calib_opts->beta, "beta parameter");
    calib->add_option("--format", calib_opts->format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    calib->add_option("--out", calib_opts->out, "output path ('-' = stdout)");
    calib->callback([calib_opts] { run_expfam_calib(*calib_opts); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == errc::io ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
