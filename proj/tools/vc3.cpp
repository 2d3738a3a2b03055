// SPDX-License-Identifier: Apache-2.0
//
// vc3: compress/decompress 3-vector streams and run the error studies.
//
//   vc3 compress   [-i IN] [-o OUT] [--format raw|csv] [--layout L] [--policy P]
//   vc3 decompress [-i IN] [-o OUT] [--format raw|csv]
//   vc3 analyze    [--study error|precision|binmiss|anisotropy|compand] ...
//   vc3 sweep      --bits 35 --splits 65536,98304,...
//   vc3 bench      [--sizes N,...] [--repeats R]
//   vc3 idempotence
//   vc3 smith      --n-phi-max N --tau T
//
// Exit status: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vc3/vc3.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace vc3;

constexpr int kUsage = 1;
constexpr int kData = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// I/O helpers
// ---------------------------------------------------------------------------

std::string read_all(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::malformed_input, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(const std::string& path, std::string_view bytes) {
  if (path == "-") {
    std::cout.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    std::cout.flush();
    if (!std::cout) throw error(errc::malformed_input, "write to stdout failed");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw error(errc::malformed_input, "cannot write '" + path + "'");
}

bool is_csv(const std::string& format, const std::string& path) {
  if (format == "csv") return true;
  if (format == "raw") return false;
  return path.size() > 4 && path.ends_with(".csv");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void emit(const json& report, bool as_json) {
  if (as_json) {
    std::cout << report.dump(2) << '\n';
    return;
  }
  for (const auto& [key, value] : report.items()) {
    if (value.is_array() || value.is_object()) continue;
    std::cout << key << ": ";
    if (value.is_number_float()) {
      std::cout << fmt(value.get<double>());
    } else if (value.is_string()) {
      std::cout << value.get<std::string>();
    } else {
      std::cout << value.dump();
    }
    std::cout << '\n';
  }
}

json stats_json(const analysis::ErrorStats& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"max", s.max}, {"stddev", s.stddev},
          {"normalised", s.normalised}};
}

// ---------------------------------------------------------------------------
// Shared flags
// ---------------------------------------------------------------------------

struct StudyFlags {
  std::string layout = "0,7,22-17-18";
  std::string policy = "default";
  std::string domain = "sphere";
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 42;
  bool as_json = false;

  void add_to(CLI::App& app, bool with_policy = true) {
    app.add_option("--layout", layout, "bit layout s,e,m-p-t[/bias]")->capture_default_str();
    if (with_policy) {
      app.add_option("--policy", policy, "theta=S|D,phi=S|D,quant=S|D, single, double or default")
          ->capture_default_str();
    }
    app.add_option("--domain", domain, "sphere | sphere-angles | cube | shell:MIN:MAX")
        ->capture_default_str();
    app.add_option("--samples", samples, "sample count")->capture_default_str();
    app.add_option("--seed", seed, "generator seed")->capture_default_str();
    app.add_flag("--json", as_json, "emit a JSON report");
  }

  BitLayout parsed_layout() const { return parse_layout(layout); }
  PrecisionPolicy parsed_policy() const { return parse_policy(policy); }
  analysis::SampleDomain parsed_domain() const {
    return analysis::parse_domain(domain, samples, seed);
  }

  json header() const {
    return {{"layout", to_string(parsed_layout())},
            {"policy", to_string(parsed_policy())},
            {"domain", analysis::to_string(parsed_domain())},
            {"seed", seed},
            {"count", samples}};
  }
};

// Layout, policy and domain strings are parsed before any work starts so bad
// values are reported as usage errors.
template <class Fn>
auto as_usage(Fn fn) {
  try {
    return fn();
  } catch (const error& e) {
    throw UsageError(e.what());
  }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct CodecFlags {
  std::string input = "-";
  std::string output = "-";
  std::string format = "auto";
  std::string layout = "0,7,22-17-18";
  std::string policy = "default";
};

int cmd_compress(const CodecFlags& f) {
  const BitLayout layout = as_usage([&] { return parse_layout(f.layout); });
  const PrecisionPolicy policy = as_usage([&] { return parse_policy(f.policy); });

  const std::string bytes = read_all(f.input);
  const std::vector<Vec3> vs =
      is_csv(f.format, f.input)
          ? io::parse_csv(bytes)
          : io::parse_raw_f32({reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()});

  CodecCounters counters;
  std::vector<CompressedWord> words;
  words.reserve(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    try {
      words.push_back(compress(vs[i], layout, policy, counters));
    } catch (const error& e) {
      throw error(e.code(), "vector " + std::to_string(i) + ": " + e.what());
    }
  }
  std::ostringstream out;
  io::write_stream(out, layout, words);
  write_all(f.output, out.str());
  std::cerr << "vectors: " << words.size() << "  layout: " << to_string(layout)
            << "  flushed: " << counters.flushed << "  saturated: " << counters.saturated << '\n';
  return 0;
}

int cmd_decompress(const CodecFlags& f) {
  std::istringstream in(read_all(f.input));
  const io::Stream s = io::read_stream(in);
  std::vector<Vec3> vs;
  vs.reserve(s.words.size());
  for (const auto w : s.words) vs.push_back(decompress(w, s.layout));
  if (is_csv(f.format, f.output)) {
    write_all(f.output, io::format_csv(vs));
  } else {
    const auto raw = io::format_raw_f32(vs);
    write_all(f.output, {reinterpret_cast<const char*>(raw.data()), raw.size()});
  }
  std::cerr << "vectors: " << vs.size() << "  layout: " << to_string(s.layout) << '\n';
  return 0;
}

struct AnalyzeFlags {
  StudyFlags common;
  std::string study = "error";
  bool normalised = false;
  std::string grid = "36x18";
  bool csv = false;
  std::string theta_compander = "uniform";
  std::string phi_compander = "tanh:0.5";
};

int cmd_analyze(const AnalyzeFlags& f) {
  const auto& c = f.common;
  const BitLayout layout = as_usage([&] { return c.parsed_layout(); });
  const PrecisionPolicy policy = as_usage([&] { return c.parsed_policy(); });
  const auto domain = as_usage([&] { return c.parsed_domain(); });
  json report = as_usage([&] { return c.header(); });
  report["study"] = f.study;

  if (f.study == "error") {
    const auto s = analysis::error_study(domain, layout, policy, f.normalised);
    report.update(stats_json(s));
  } else if (f.study == "precision") {
    report.erase("policy");
    json rows = json::array();
    for (const auto& row : analysis::precision_comparison(domain, layout)) {
      json r = {{"domain", row.domain == analysis::DomainKind::cube ? "cube" : "sphere"},
                {"policy", to_string(row.policy)}};
      r.update(stats_json(row.stats));
      rows.push_back(r);
    }
    if (!c.as_json) {
      std::printf("%-7s %-22s %-12s %-12s %-12s\n", "domain", "policy", "mean", "max", "stddev");
      for (const auto& r : rows) {
        std::printf("%-7s %-22s %-12.5e %-12.5e %-12.5e\n",
                    r["domain"].get<std::string>().c_str(), r["policy"].get<std::string>().c_str(),
                    r["mean"].get<double>(), r["max"].get<double>(), r["stddev"].get<double>());
      }
      return 0;
    }
    report["rows"] = rows;
  } else if (f.study == "binmiss") {
    report.erase("policy");
    const auto m = analysis::bin_miss_study(domain, layout, policy.quantisation);
    report["quantisation"] = std::string(1, to_char(policy.quantisation));
    report["misses_theta"] = m.theta_fraction();
    report["misses_phi"] = m.phi_fraction();
  } else if (f.study == "anisotropy") {
    unsigned nt = 0, np = 0;
    char x = 0;
    std::istringstream g(f.grid);
    if (!(g >> nt >> x >> np) || x != 'x' || nt == 0 || np == 0 || g.peek() != EOF) {
      throw UsageError("--grid expects THETAxPHI, e.g. 36x18");
    }
    const auto map = analysis::anisotropy_map(layout, policy, {nt, np}, domain);
    if (f.csv) {
      std::ostringstream out;
      analysis::write_csv(out, map);
      std::cout << out.str();
      return 0;
    }
    report.update(stats_json(map.global));
    report["grid"] = f.grid;
    report["max_min_ratio"] = map.max_min_ratio();
  } else if (f.study == "compand") {
    report.erase("policy");
    const auto tc = as_usage([&] { return analysis::parse_compander(f.theta_compander); });
    const auto pc = as_usage([&] { return analysis::parse_compander(f.phi_compander); });
    const auto uniform = analysis::compand_study(domain, layout, analysis::Compander::uniform(),
                                                 analysis::Compander::uniform(), f.normalised);
    const auto companded = analysis::compand_study(domain, layout, tc, pc, f.normalised);
    report["theta_compander"] = analysis::to_string(tc);
    report["phi_compander"] = analysis::to_string(pc);
    report.update(stats_json(companded));
    report["uniform_mean"] = uniform.mean;
    report["uniform_stddev"] = uniform.stddev;
    report["stddev_change"] = companded.stddev / uniform.stddev - 1.0;
  } else {
    throw UsageError("unknown study '" + f.study + "'");
  }
  emit(report, c.as_json);
  return 0;
}

struct SweepFlags {
  StudyFlags common;
  int bits = 35;
  std::vector<std::uint64_t> splits = {65536, 98304, 131072, 196608, 262144};
  bool normalised = false;
};

int cmd_sweep(const SweepFlags& f) {
  const auto& c = f.common;
  const auto domain = as_usage([&] { return c.parsed_domain(); });
  as_usage([&] {
    analysis::split_magnitude_layout(f.bits);
    for (const auto b : f.splits) analysis::SplitConfig::for_phi_buckets(f.bits, b);
    return 0;
  });
  const auto rows = analysis::split_sweep(f.bits, f.splits, domain, f.normalised);
  json report = {{"bits", f.bits},
                 {"domain", analysis::to_string(domain)},
                 {"seed", c.seed},
                 {"count", c.samples}};
  json out = json::array();
  for (const auto& r : rows) {
    json row = {{"phi_buckets", r.config.n_phi_max() + 1},
                {"theta_buckets", r.config.n_theta_max() + 1}};
    row.update(stats_json(r.stats));
    out.push_back(row);
  }
  report["rows"] = out;
  if (c.as_json) {
    std::cout << report.dump(2) << '\n';
  } else {
    std::printf("%-12s %-13s %-12s %-12s %-12s\n", "phi_buckets", "theta_buckets", "mean", "stddev",
                "max");
    for (const auto& r : rows) {
      std::printf("%-12llu %-13llu %-12.5e %-12.5e %-12.5e\n",
                  static_cast<unsigned long long>(r.config.n_phi_max() + 1),
                  static_cast<unsigned long long>(r.config.n_theta_max() + 1), r.stats.mean,
                  r.stats.stddev, r.stats.max);
    }
  }
  return 0;
}

struct BenchFlags {
  std::string layout = "0,7,22-17-18";
  std::string policy = "default";
  std::vector<std::uint64_t> sizes = {1u << 10, 1u << 12, 1u << 14, 1u << 16,
                                      1u << 18, 1u << 20, 1u << 22, 1u << 24};
  int repeats = 3;
  std::uint64_t seed = 42;
  bool json = false;
};

int cmd_bench(const BenchFlags& f) {
  bench::BenchConfig config;
  config.layout = as_usage([&] { return parse_layout(f.layout); });
  config.policy = as_usage([&] { return parse_policy(f.policy); });
  config.working_set_sweep = f.sizes;
  config.repeats = f.repeats;
  config.seed = f.seed;
  if (f.repeats < 3) throw UsageError("--repeats must be at least 3");
  const auto report = bench::sweep(config);

  if (f.json) {
    json rows = json::array();
    for (const auto& r : report.rows) {
      rows.push_back({{"n", r.n},
                      {"bytes_moved_raw", r.bytes_moved_raw},
                      {"bytes_moved_compressed", r.bytes_moved_compressed},
                      {"time_raw_ns", r.time_raw_ns},
                      {"time_comp_ns", r.time_compressed_ns},
                      {"speedup", r.speedup},
                      {"bytes_ratio", r.bytes_ratio}});
    }
    json doc = {{"layout", to_string(config.layout)},
                {"policy", to_string(config.policy)},
                {"repeats", config.repeats},
                {"llc_bytes", report.llc_bytes ? json(*report.llc_bytes) : json(nullptr)},
                {"knee", report.knee ? json(*report.knee) : json(nullptr)},
                {"skipped", report.skipped},
                {"rows", rows}};
    std::cout << doc.dump(2) << '\n';
    return 0;
  }
  std::cout << "n,time_raw_ns,time_comp_ns,speedup,bytes_ratio\n";
  for (const auto& r : report.rows) {
    std::printf("%llu,%.6g,%.6g,%.6g,%.6g\n", static_cast<unsigned long long>(r.n), r.time_raw_ns,
                r.time_compressed_ns, r.speedup, r.bytes_ratio);
  }
  std::cerr << "knee: "
            << (report.knee ? std::to_string(*report.knee) + " elements" : std::string("unknown"))
            << '\n';
  for (const auto n : report.skipped) std::cerr << "skipped n=" << n << ": not enough memory\n";
  return 0;
}

struct IdempotenceFlags {
  StudyFlags common;
  int ulp = 8;
};

int cmd_idempotence(const IdempotenceFlags& f) {
  const auto& c = f.common;
  const BitLayout layout = as_usage([&] { return c.parsed_layout(); });
  const PrecisionPolicy policy = as_usage([&] { return c.parsed_policy(); });
  const auto domain = as_usage([&] { return c.parsed_domain(); });
  const auto r = analysis::idempotence_study(domain, layout, policy, f.ulp);
  json report = as_usage([&] { return c.header(); });
  report["ulp_budget"] = f.ulp;
  report["word_misses"] = r.word_misses;
  report["word_miss_fraction"] = r.word_miss_fraction();
  report["third_cycle_misses"] = r.third_cycle_misses;
  report["third_cycle_miss_fraction"] = r.third_cycle_miss_fraction();
  report["predicted_bound"] = r.predicted_bound;
  emit(report, c.as_json);
  return 0;
}

struct SmithFlags {
  std::uint64_t n_phi_max = (1u << 17) - 1;
  double tau = 0.0;
  bool json = false;
};

int cmd_smith(const SmithFlags& f) {
  // One row per phi bucket edge, skipping rows where the formula has no
  // solution.
  const double d = std::numbers::pi / (2.0 * static_cast<double>(f.n_phi_max));
  const double tau = f.tau > 0.0 ? f.tau : std::sqrt(2.0) * d;
  json rows = json::array();
  std::uint64_t total = 0, undefined = 0;
  const std::uint64_t step = std::max<std::uint64_t>(1, f.n_phi_max / 64);
  for (std::uint64_t n = 1; n < f.n_phi_max; n += step) {
    const double phi = std::numbers::pi * static_cast<double>(n) / static_cast<double>(f.n_phi_max);
    try {
      const auto bins = analysis::smith_theta_bins(phi, f.n_phi_max, tau);
      rows.push_back({{"phi", phi}, {"theta_bins", bins}});
      total += bins;
    } catch (const error&) {
      rows.push_back({{"phi", phi}, {"theta_bins", nullptr}});
      ++undefined;
    }
  }
  json report = {{"n_phi_max", f.n_phi_max}, {"tau", tau}, {"undefined_rows", undefined},
                 {"rows", rows}};
  if (f.json) {
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << "phi,theta_bins\n";
    for (const auto& r : rows) {
      std::cout << fmt(r["phi"].get<double>()) << ','
                << (r["theta_bins"].is_null() ? std::string("undefined") : r["theta_bins"].dump())
                << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-rate 64-bit compression of single-precision 3-vectors"};
  app.require_subcommand(1);

  CodecFlags compress_flags;
  auto* compress_cmd = app.add_subcommand("compress", "f32 triplets (raw or CSV) -> VC3C stream");
  compress_cmd->add_option("-i,--input", compress_flags.input, "input file, - for stdin");
  compress_cmd->add_option("-o,--output", compress_flags.output, "output file, - for stdout");
  compress_cmd->add_option("--format", compress_flags.format, "input format")
      ->check(CLI::IsMember({"auto", "raw", "csv"}));
  compress_cmd->add_option("--layout", compress_flags.layout, "bit layout")->capture_default_str();
  compress_cmd->add_option("--policy", compress_flags.policy, "precision policy")
      ->capture_default_str();

  CodecFlags decompress_flags;
  auto* decompress_cmd = app.add_subcommand("decompress", "VC3C stream -> f32 triplets");
  decompress_cmd->add_option("-i,--input", decompress_flags.input, "input file, - for stdin");
  decompress_cmd->add_option("-o,--output", decompress_flags.output, "output file, - for stdout");
  decompress_cmd->add_option("--format", decompress_flags.format, "output format")
      ->check(CLI::IsMember({"auto", "raw", "csv"}));

  AnalyzeFlags analyze_flags;
  auto* analyze_cmd = app.add_subcommand("analyze", "error statistics over sampled vectors");
  analyze_flags.common.add_to(*analyze_cmd);
  analyze_cmd->add_option("--study", analyze_flags.study)
      ->check(CLI::IsMember({"error", "precision", "binmiss", "anisotropy", "compand"}))
      ->capture_default_str();
  analyze_cmd->add_flag("--normalised", analyze_flags.normalised, "divide each error by |v|");
  analyze_cmd->add_option("--grid", analyze_flags.grid, "anisotropy grid THETAxPHI")
      ->capture_default_str();
  analyze_cmd->add_flag("--csv", analyze_flags.csv, "anisotropy: emit theta_cell,phi_cell,mean_error");
  analyze_cmd->add_option("--theta-compander", analyze_flags.theta_compander)->capture_default_str();
  analyze_cmd->add_option("--phi-compander", analyze_flags.phi_compander)->capture_default_str();

  SweepFlags sweep_flags;
  auto* sweep_cmd = app.add_subcommand("sweep", "fractional angle-split sweep");
  sweep_flags.common.add_to(*sweep_cmd, false);
  sweep_cmd->add_option("--bits", sweep_flags.bits, "joint angle field width")->capture_default_str();
  sweep_cmd->add_option("--splits", sweep_flags.splits, "phi bucket counts (n_phi_max + 1)")
      ->delimiter(',');
  sweep_cmd->add_flag("--normalised", sweep_flags.normalised, "divide each error by |v|");

  BenchFlags bench_flags;
  auto* bench_cmd = app.add_subcommand("bench", "raw vs compressed vector addition");
  bench_cmd->add_option("--layout", bench_flags.layout)->capture_default_str();
  bench_cmd->add_option("--policy", bench_flags.policy)->capture_default_str();
  bench_cmd->add_option("--sizes", bench_flags.sizes, "element counts")->delimiter(',');
  bench_cmd->add_option("--repeats", bench_flags.repeats)->capture_default_str();
  bench_cmd->add_option("--seed", bench_flags.seed)->capture_default_str();
  bench_cmd->add_flag("--json", bench_flags.json);

  IdempotenceFlags idem_flags;
  idem_flags.common.policy = "double";
  auto* idem_cmd = app.add_subcommand("idempotence", "compress(decompress(w)) == w miss rate");
  idem_flags.common.add_to(*idem_cmd);
  idem_cmd->add_option("--ulp", idem_flags.ulp, "ulp budget u")->capture_default_str();

  SmithFlags smith_flags;
  auto* smith_cmd = app.add_subcommand("smith", "variable theta bin counts across phi");
  smith_cmd->add_option("--n-phi-max", smith_flags.n_phi_max)->capture_default_str();
  smith_cmd->add_option("--tau", smith_flags.tau, "tolerance (default sqrt(2) pi / 2 n_phi_max)");
  smith_cmd->add_flag("--json", smith_flags.json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*compress_cmd) return cmd_compress(compress_flags);
    if (*decompress_cmd) return cmd_decompress(decompress_flags);
    if (*analyze_cmd) return cmd_analyze(analyze_flags);
    if (*sweep_cmd) return cmd_sweep(sweep_flags);
    if (*bench_cmd) return cmd_bench(bench_flags);
    if (*idem_cmd) return cmd_idempotence(idem_flags);
    if (*smith_cmd) return cmd_smith(smith_flags);
  } catch (const UsageError& e) {
    std::cerr << "vc3: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "vc3: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
