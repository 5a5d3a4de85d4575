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
// Experiment harness: runs a sampler across a grid of step counts, evaluates
// a set of statistics on every replicate cohort, compares each cell against a
// Haar reference cohort (k-sample Anderson-Darling + empirical power), and
// emits deterministic CSV/JSON reports.

#ifndef HAARGOF_HARNESS_HPP_
#define HAARGOF_HARNESS_HPP_

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "haargof/ad_ksample.hpp"
#include "haargof/common.hpp"
#include "haargof/linalg.hpp"
#include "haargof/rng.hpp"
#include "haargof/samplers.hpp"
#include "haargof/statistics.hpp"

namespace haargof {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

// One statistic to evaluate on every cohort.  `id` is one of
// rayleigh | gine | expfam | tz | uzq | trace.
struct StatisticSpec {
  std::string id = "rayleigh";
  double z = 0.5;               // tz / uzq
  double q = 0.5;               // uzq
  long long trace_k = 1;        // trace
  bool allow_det_minus = false; // expfam / tz / uzq
  bool strict_degenerate = false;
  bool with_pvalue = true; // rayleigh / expfam emit a p-value when available

  KernelParams kernel_params() const {
    KernelParams kp;
    kp.z = z;
    kp.q = q;
    kp.strict_degenerate = strict_degenerate;
    return kp;
  }

  // Stable human-readable label; doubles printed with shortest round-trip
  // formatting so identical configs produce identical labels.
  std::string label() const {
    std::ostringstream os;
    os << id;
    auto put = [&os](const char* key, double v, bool first) {
      os << (first ? "[" : ",") << key << '=' << v;
    };
    if (id == "tz") {
      put("z", z, true);
      os << ']';
    } else if (id == "uzq") {
      put("z", z, true);
      put("q", q, false);
      os << ']';
    } else if (id == "trace") {
      os << "[k=" << trace_k << ']';
    }
    return os.str();
  }
};

// Full experiment description.  JSON round-trip is lossless: every field is
// echoed (with defaults made explicit) by to_json.
struct ExperimentConfig {
  int dim = 25;
  int sample_size = 100;  // matrices per replicate (N)
  int replicates = 100;   // cohort size per grid point (R)
  SamplerSpec sampler{SamplerKind::kac, 25, 1, 1, 1, 0};
  std::vector<long long> step_grid{1};
  std::vector<StatisticSpec> statistics{StatisticSpec{}};
  std::uint64_t master_seed = 0;
  std::string out_dir = ".";
  int threads = 1;
  // Empty: draw a fresh Haar reference cohort.  Otherwise a file path used as
  // a cache: loaded when present and key-compatible, written after computing.
  std::string haar_reference_path;
  double alpha = 0.05; // power level reported in summaries
  int histogram_bins = 30;

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

inline bool operator==(const StatisticSpec& a, const StatisticSpec& b) {
  return a.id == b.id && a.z == b.z && a.q == b.q && a.trace_k == b.trace_k &&
         a.allow_det_minus == b.allow_det_minus &&
         a.strict_degenerate == b.strict_degenerate &&
         a.with_pvalue == b.with_pvalue;
}

inline void to_json(nlohmann::json& j, const StatisticSpec& s) {
  j = nlohmann::json{{"id", s.id},
                     {"z", s.z},
                     {"q", s.q},
                     {"k", s.trace_k},
                     {"allow_det_minus", s.allow_det_minus},
                     {"strict_degenerate", s.strict_degenerate},
                     {"with_pvalue", s.with_pvalue}};
}

inline void from_json(const nlohmann::json& j, StatisticSpec& s) {
  s = StatisticSpec{};
  s.id = j.at("id").get<std::string>();
  if (j.contains("z")) s.z = j.at("z").get<double>();
  if (j.contains("q")) s.q = j.at("q").get<double>();
  if (j.contains("k")) s.trace_k = j.at("k").get<long long>();
  if (j.contains("allow_det_minus"))
    s.allow_det_minus = j.at("allow_det_minus").get<bool>();
  if (j.contains("strict_degenerate"))
    s.strict_degenerate = j.at("strict_degenerate").get<bool>();
  if (j.contains("with_pvalue")) s.with_pvalue = j.at("with_pvalue").get<bool>();
}

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{
      {"dim", c.dim},
      {"sample_size", c.sample_size},
      {"replicates", c.replicates},
      {"sampler",
       {{"kind", sampler_name(c.sampler.kind)},
        {"m1", c.sampler.m1},
        {"m2", c.sampler.m2}}},
      {"step_grid", c.step_grid},
      {"statistics", c.statistics},
      {"master_seed", c.master_seed},
      {"out_dir", c.out_dir},
      {"threads", c.threads},
      {"haar_reference",
       c.haar_reference_path.empty() ? std::string("fresh")
                                     : c.haar_reference_path},
      {"alpha", c.alpha},
      {"histogram_bins", c.histogram_bins}};
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  c = ExperimentConfig{};
  if (j.contains("dim")) c.dim = j.at("dim").get<int>();
  if (j.contains("sample_size"))
    c.sample_size = j.at("sample_size").get<int>();
  if (j.contains("replicates")) c.replicates = j.at("replicates").get<int>();
  if (j.contains("sampler")) {
    const auto& js = j.at("sampler");
    if (js.contains("kind"))
      c.sampler.kind = sampler_from_name(js.at("kind").get<std::string>());
    if (js.contains("m1")) c.sampler.m1 = js.at("m1").get<int>();
    if (js.contains("m2")) c.sampler.m2 = js.at("m2").get<int>();
  }
  if (j.contains("step_grid"))
    c.step_grid = j.at("step_grid").get<std::vector<long long>>();
  if (j.contains("statistics"))
    c.statistics = j.at("statistics").get<std::vector<StatisticSpec>>();
  if (j.contains("master_seed"))
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  if (j.contains("haar_reference")) {
    const auto ref = j.at("haar_reference").get<std::string>();
    c.haar_reference_path = (ref == "fresh") ? std::string() : ref;
  }
  if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
  if (j.contains("histogram_bins"))
    c.histogram_bins = j.at("histogram_bins").get<int>();
  c.sampler.dim = c.dim;
  c.sampler.seed = c.master_seed;
}

inline ExperimentConfig config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::io, std::string("config parse failure: ") + e.what());
  }
  try {
    return j.get<ExperimentConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::io, std::string("config field failure: ") + e.what());
  }
}

inline ExperimentConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io, "cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

// ---------------------------------------------------------------------------
// Empirical power
// ---------------------------------------------------------------------------

// Fraction of `alternative` values strictly above the empirical (1 - alpha)
// quantile of `null_values`, the order statistic with 1-based rank
// ceil((1 - alpha) * R).
inline double estimate_power(const std::vector<double>& alternative,
                             const std::vector<double>& null_values,
                             double alpha) {
  if (alternative.empty() || null_values.empty())
    throw Error(errc::empty_sample, "estimate_power needs nonempty cohorts");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(errc::non_positive_parameter,
                "estimate_power: alpha must lie in (0, 1)");
  std::vector<double> sorted(null_values);
  std::sort(sorted.begin(), sorted.end());
  const auto r = static_cast<std::size_t>(
      std::ceil((1.0 - alpha) * static_cast<double>(sorted.size())));
  const std::size_t idx = std::min(sorted.size(), std::max<std::size_t>(r, 1));
  const double cutoff = sorted[idx - 1];
  std::size_t above = 0;
  for (double v : alternative)
    if (v > cutoff) ++above;
  return static_cast<double>(above) / static_cast<double>(alternative.size());
}

// ---------------------------------------------------------------------------
// Cohort evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline StatisticResult evaluate_statistic(
    const StatisticSpec& spec, const std::vector<GroupElement>& sample) {
  if (spec.id == "rayleigh") return rayleigh(sample, spec.with_pvalue);
  if (spec.id == "gine") return gine(sample);
  if (spec.id == "expfam")
    return expfam_statistic(sample, spec.allow_det_minus);
  if (spec.id == "tz")
    return t_z(sample, spec.kernel_params(), spec.allow_det_minus);
  if (spec.id == "uzq")
    return u_zq(sample, spec.kernel_params(), spec.allow_det_minus);
  if (spec.id == "trace") return trace_power(sample, spec.trace_k);
  throw Error(errc::io, "unknown statistic id: " + spec.id);
}

} // namespace detail

// Per-statistic results of one cohort of `replicates` independent samples.
struct CohortValues {
  // Indexed like the config's statistics list; values[s] has one entry per
  // replicate unless errors[s] is nonempty (then values[s] is empty).
  std::vector<std::vector<double>> values;
  std::vector<std::string> errors;   // first error per statistic, or ""
  std::vector<Warnings> warnings;    // aggregated over replicates
};

// Draws `replicates` samples from `sampler` and evaluates every configured
// statistic on each.  Replicate r uses cohort_stream.split(r); matrices
// within a replicate use further per-index splits (see draw_sample), so
// results are independent of the worker-thread count.
inline CohortValues run_cohort(const ExperimentConfig& cfg,
                               const SamplerSpec& sampler,
                               const RngStream& cohort_stream) {
  const int R = cfg.replicates;
  const auto S = cfg.statistics.size();
  if (R <= 0) throw Error(errc::empty_sample, "replicates must be positive");
  if (S == 0) throw Error(errc::empty_sample, "no statistics configured");

  struct Slot {
    std::vector<double> value;
    std::vector<std::string> error;
    std::vector<Warnings> warn;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(R));
  for (auto& slot : slots) {
    slot.value.assign(S, std::numeric_limits<double>::quiet_NaN());
    slot.error.assign(S, "");
    slot.warn.assign(S, Warnings{});
  }

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= R) return;
      RngStream rep_stream = cohort_stream.split(static_cast<std::uint64_t>(r));
      const std::vector<GroupElement> sample =
          draw_sample(sampler, rep_stream, cfg.sample_size);
      auto& slot = slots[static_cast<std::size_t>(r)];
      for (std::size_t s = 0; s < S; ++s) {
        try {
          StatisticResult res =
              detail::evaluate_statistic(cfg.statistics[s], sample);
          slot.value[s] = res.value;
          slot.warn[s] = res.warnings;
        } catch (const std::exception& e) {
          slot.error[s] = e.what();
        }
      }
    }
  };

  const int workers = std::max(1, std::min(cfg.threads, R));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  CohortValues out;
  out.values.assign(S, {});
  out.errors.assign(S, "");
  out.warnings.assign(S, Warnings{});
  for (std::size_t s = 0; s < S; ++s) {
    for (int r = 0; r < R; ++r) {
      const auto& slot = slots[static_cast<std::size_t>(r)];
      if (!slot.error[s].empty() && out.errors[s].empty())
        out.errors[s] = slot.error[s];
      out.warnings[s].jitter_events += slot.warn[s].jitter_events;
      out.warnings[s].det_override_events += slot.warn[s].det_override_events;
    }
    if (out.errors[s].empty()) {
      out.values[s].reserve(static_cast<std::size_t>(R));
      for (int r = 0; r < R; ++r)
        out.values[s].push_back(slots[static_cast<std::size_t>(r)].value[s]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Haar reference cohort (with optional file cache)
// ---------------------------------------------------------------------------

namespace detail {

inline std::string reference_cache_key(const ExperimentConfig& cfg) {
  nlohmann::json key{{"dim", cfg.dim},
                     {"sample_size", cfg.sample_size},
                     {"replicates", cfg.replicates},
                     {"master_seed", cfg.master_seed},
                     {"statistics", cfg.statistics}};
  return key.dump();
}

} // namespace detail

// The reference cohort is always derived from master.split(0); grid cohorts
// use master.split(1 + step_index), so reference and alternatives never share
// a stream.
inline CohortValues compute_reference_cohort(const ExperimentConfig& cfg) {
  SamplerSpec haar;
  haar.kind = SamplerKind::haar;
  haar.dim = cfg.dim;
  haar.steps = 0;
  RngStream master(cfg.master_seed);
  return run_cohort(cfg, haar, master.split(0));
}

// Loads the reference cohort from `path` if it exists and was written for an
// identical (dim, sample_size, replicates, master_seed, statistics) key;
// otherwise computes it and writes the cache.  Cached statistics must have
// completed without error (errored cohorts are never cached).
inline CohortValues reference_cohort_cached(const ExperimentConfig& cfg) {
  if (cfg.haar_reference_path.empty()) return compute_reference_cohort(cfg);
  const std::string key = detail::reference_cache_key(cfg);
  {
    std::ifstream in(cfg.haar_reference_path);
    if (in) {
      std::string header;
      std::getline(in, header);
      if (header == "# " + key) {
        CohortValues out;
        const auto S = cfg.statistics.size();
        out.values.assign(S, {});
        out.errors.assign(S, "");
        out.warnings.assign(S, Warnings{});
        std::size_t s = 0;
        double v = 0.0;
        bool ok = true;
        std::string line;
        while (std::getline(in, line)) {
          if (line.empty()) continue;
          std::istringstream ls(line);
          if (!(ls >> s >> v) || s >= S) {
            ok = false;
            break;
          }
          out.values[s].push_back(v);
        }
        for (std::size_t i = 0; ok && i < S; ++i)
          ok = out.values[i].size() ==
               static_cast<std::size_t>(cfg.replicates);
        if (ok) return out;
      }
    }
  }
  CohortValues fresh = compute_reference_cohort(cfg);
  bool complete = true;
  for (const auto& err : fresh.errors)
    if (!err.empty()) complete = false;
  if (complete) {
    std::ofstream out(cfg.haar_reference_path);
    if (!out)
      throw Error(errc::io,
                  "cannot write reference cache: " + cfg.haar_reference_path);
    out << "# " << key << '\n';
    out << std::setprecision(17);
    for (std::size_t s = 0; s < fresh.values.size(); ++s)
      for (double v : fresh.values[s]) out << s << ' ' << v << '\n';
  }
  return fresh;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

// One grid cell: a (step, statistic) pair with its cohort of replicate values
// and the comparison against the Haar reference cohort.
struct CellResult {
  long long step = 0;
  std::string statistic; // label of the StatisticSpec
  std::vector<double> values;
  std::optional<AdResult> ad; // absent when either cohort errored
  double power = std::numeric_limits<double>::quiet_NaN();
  std::string error; // first propagated statistic error, or ""
  Warnings warnings;
};

struct SweepReport {
  ExperimentConfig config;
  std::vector<CellResult> cells; // step-major, statistic-minor
  std::vector<std::string> statistic_labels;
  std::vector<std::vector<double>> reference_values; // per statistic
  std::vector<std::string> reference_errors;
  double runtime_seconds = 0.0; // excluded from deterministic outputs
  std::vector<std::pair<std::string, double>> cohort_seconds;
};

// Runs the full experiment: a Haar reference cohort plus one cohort per grid
// step, then per-cell Anderson-Darling comparison and empirical power at
// cfg.alpha.  Statistic errors are recorded in the affected cells and do not
// abort the sweep.  Output is a pure function of the config (timings aside).
inline SweepReport run_sweep(const ExperimentConfig& cfg) {
  if (cfg.step_grid.empty())
    throw Error(errc::empty_sample, "step grid is empty");
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [](auto since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         since)
        .count();
  };

  SweepReport report;
  report.config = cfg;
  for (const auto& s : cfg.statistics)
    report.statistic_labels.push_back(s.label());

  auto tref = std::chrono::steady_clock::now();
  CohortValues reference = reference_cohort_cached(cfg);
  report.cohort_seconds.emplace_back("reference", elapsed(tref));
  report.reference_values = reference.values;
  report.reference_errors = reference.errors;

  RngStream master(cfg.master_seed);
  for (std::size_t g = 0; g < cfg.step_grid.size(); ++g) {
    const long long step = cfg.step_grid[g];
    SamplerSpec sampler = cfg.sampler;
    sampler.dim = cfg.dim;
    sampler.steps = step;
    auto tg = std::chrono::steady_clock::now();
    CohortValues cohort = run_cohort(cfg, sampler, master.split(1 + g));
    report.cohort_seconds.emplace_back("step_" + std::to_string(step),
                                       elapsed(tg));
    for (std::size_t s = 0; s < cfg.statistics.size(); ++s) {
      CellResult cell;
      cell.step = step;
      cell.statistic = report.statistic_labels[s];
      cell.error = cohort.errors[s];
      cell.warnings = cohort.warnings[s];
      if (cell.error.empty()) cell.values = cohort.values[s];
      if (cell.error.empty() && reference.errors[s].empty()) {
        try {
          cell.ad = ad_ksample({cell.values, reference.values[s]});
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
        cell.power =
            estimate_power(cell.values, reference.values[s], cfg.alpha);
      }
      report.cells.push_back(std::move(cell));
    }
  }
  report.runtime_seconds = elapsed(t0);
  return report;
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw Error(errc::io, "cannot write " + p.string());
  out << std::setprecision(17);
  return out;
}

// Shared-edge histogram over the union range of both cohorts.
inline void emit_histogram_rows(std::ofstream& out, const std::string& stat,
                                long long step,
                                const std::vector<double>& alternative,
                                const std::vector<double>& reference,
                                int bins) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto* cohort : {&alternative, &reference})
    for (double v : *cohort) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!(lo <= hi)) return;
  if (lo == hi) hi = lo + 1.0; // all mass in the first bin
  const double width = (hi - lo) / bins;
  auto counts = [&](const std::vector<double>& vals) {
    std::vector<long long> c(static_cast<std::size_t>(bins), 0);
    for (double v : vals) {
      int b = static_cast<int>((v - lo) / width);
      b = std::max(0, std::min(bins - 1, b));
      ++c[static_cast<std::size_t>(b)];
    }
    return c;
  };
  const auto ca = counts(alternative);
  const auto cr = counts(reference);
  for (int b = 0; b < bins; ++b) {
    const double left = lo + b * width;
    const double right = (b + 1 == bins) ? hi : lo + (b + 1) * width;
    out << stat << ',' << step << ',' << left << ',' << right << ','
        << cr[static_cast<std::size_t>(b)] << ",null\n";
    out << stat << ',' << step << ',' << left << ',' << right << ','
        << ca[static_cast<std::size_t>(b)] << ",alternative\n";
  }
}

} // namespace detail

// Writes detail.csv, summary.csv, histograms.csv, reference.csv, report.json
// and timings.csv into report.config.out_dir.  Every file except timings.csv
// is byte-deterministic for a fixed config.  `formats` may restrict output to
// {"csv"}, {"json"}, or both (default).
inline void emit_report(const SweepReport& report,
                        const std::vector<std::string>& formats = {"csv",
                                                                   "json"}) {
  namespace fs = std::filesystem;
  const auto& cfg = report.config;
  const fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::exists(dir))
    throw Error(errc::io, "cannot create output directory: " + dir.string());
  bool want_csv = false, want_json = false;
  for (const auto& f : formats) {
    if (f == "csv") want_csv = true;
    else if (f == "json") want_json = true;
    else throw Error(errc::io, "unknown report format: " + f);
  }

  const std::string sampler = sampler_name(cfg.sampler.kind);

  if (want_csv) {
    {
      auto out = detail::open_out(dir / "detail.csv");
      out << "sampler,step,statistic,replicate,value\n";
      for (const auto& cell : report.cells)
        for (std::size_t r = 0; r < cell.values.size(); ++r)
          out << sampler << ',' << cell.step << ',' << cell.statistic << ','
              << r << ',' << cell.values[r] << '\n';
    }
    {
      auto out = detail::open_out(dir / "summary.csv");
      out << "step,statistic,ad_stat,ad_pvalue,power_05\n";
      for (const auto& cell : report.cells) {
        out << cell.step << ',' << cell.statistic << ',';
        if (cell.ad) {
          out << cell.ad->standardized << ',' << cell.ad->pvalue << ','
              << cell.power << '\n';
        } else {
          out << "nan,nan,nan\n";
        }
      }
    }
    {
      auto out = detail::open_out(dir / "histograms.csv");
      out << "statistic,step,bin_left,bin_right,count,cohort\n";
      for (const auto& cell : report.cells) {
        if (!cell.error.empty()) continue;
        std::size_t s = 0;
        while (s < report.statistic_labels.size() &&
               report.statistic_labels[s] != cell.statistic)
          ++s;
        if (s == report.statistic_labels.size() ||
            !report.reference_errors[s].empty())
          continue;
        detail::emit_histogram_rows(out, cell.statistic, cell.step,
                                    cell.values, report.reference_values[s],
                                    cfg.histogram_bins);
      }
    }
    {
      auto out = detail::open_out(dir / "reference.csv");
      out << "statistic,replicate,value\n";
      for (std::size_t s = 0; s < report.reference_values.size(); ++s)
        for (std::size_t r = 0; r < report.reference_values[s].size(); ++r)
          out << report.statistic_labels[s] << ',' << r << ','
              << report.reference_values[s][r] << '\n';
    }
    {
      // Timing sidecar; deliberately outside the determinism contract.
      auto out = detail::open_out(dir / "timings.csv");
      out << "cohort,seconds\n" << std::setprecision(6);
      for (const auto& [name, secs] : report.cohort_seconds)
        out << name << ',' << secs << '\n';
      out << "total," << report.runtime_seconds << '\n';
    }
  }

  if (want_json) {
    nlohmann::json j;
    j["config"] = cfg;
    j["seed_provenance"] = {
        {"rng", "philox4x32-10"},
        {"master_seed", cfg.master_seed},
        {"scheme",
         "reference=master.split(0); grid step g=master.split(1+g); "
         "replicate r=cohort.split(r); matrix i=replicate.split(i)"}};
    j["reference"] = nlohmann::json::array();
    for (std::size_t s = 0; s < report.reference_values.size(); ++s) {
      nlohmann::json jr{{"statistic", report.statistic_labels[s]},
                        {"values", report.reference_values[s]}};
      if (!report.reference_errors[s].empty())
        jr["error"] = report.reference_errors[s];
      j["reference"].push_back(std::move(jr));
    }
    j["cells"] = nlohmann::json::array();
    for (const auto& cell : report.cells) {
      nlohmann::json jc{{"step", cell.step},
                        {"statistic", cell.statistic},
                        {"values", cell.values},
                        {"warnings",
                         {{"jitter_events", cell.warnings.jitter_events},
                          {"det_override_events",
                           cell.warnings.det_override_events}}}};
      if (cell.ad) {
        jc["ad"] = {{"a2akn", cell.ad->a2akn},
                    {"standardized", cell.ad->standardized},
                    {"pvalue", cell.ad->pvalue}};
        jc["power"] = cell.power;
      }
      if (!cell.error.empty()) jc["error"] = cell.error;
      j["cells"].push_back(std::move(jc));
    }
    auto out = detail::open_out(dir / "report.json");
    out << j.dump(2) << '\n';
  }
}

} // namespace haargof

#endif // HAARGOF_HARNESS_HPP_
