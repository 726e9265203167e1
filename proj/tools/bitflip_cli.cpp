// bitflip: command-line front end for single bit-flip analysis.
//
// Exit codes: 0 success, 2 usage or input error, 3 verification mismatch.

#include <bitflip/bitflip.hpp>
#include <bitflip/report.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace bitflip;
using report::Json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitMismatch = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string format = "binary64";
  int digits = 5;
  bool csv = false;
};

void add_common(CLI::App* cmd, Common& c, bool tabular) {
  cmd->add_option("--format", c.format, "binary64, binary32, binary16 or 'we,wf'")->capture_default_str();
  cmd->add_option("--digits", c.digits, "significant digits in decimal output")->capture_default_str()->check(
      CLI::Range(1, 40));
  if (tabular) cmd->add_flag("--csv", c.csv, "CSV instead of JSON");
}

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_classify(const Common& c, const std::string& input) {
  const FpFormat fmt = parse_format(c.format);
  const Word w = parse_word(fmt, input);
  emit(report::envelope("classify", fmt,
                        Json{{"input", input},
                             {"word", to_hex(w)},
                             {"class", to_string(classify(w))},
                             {"fields", report::fields(w)},
                             {"value", report::value(w, c.digits)}}));
  return kExitOk;
}

int cmd_flip(const Common& c, const std::string& input, int bit) {
  const FpFormat fmt = parse_format(c.format);
  const Word w = parse_word(fmt, input);
  const TransitionRecord rec = make_transition(w, bit);
  const BoundsCheck check = check_bounds(w, bit);
  Json payload = report::transition(rec);
  payload["input"] = input;
  payload["value_before"] = report::value(rec.before, c.digits);
  payload["value_after"] = report::value(rec.after, c.digits);
  payload["relative_error"] = report::relative_error(check.error, c.digits);
  payload["check"] = report::bounds_check(check, c.digits);
  emit(report::envelope("flip", fmt, std::move(payload)));
  return kExitOk;
}

int cmd_table(const Common& c) {
  const FpFormat fmt = parse_format(c.format);
  const TransitionMatrix m = transition_matrix(fmt);
  if (c.csv) {
    std::vector<std::vector<std::string>> rows{{"from", "normalized", "denormalized", "nan", "inf"}};
    for (FpClass from : kAllClasses) {
      std::vector<std::string> row{to_string(from)};
      for (FpClass to : kAllClasses) row.push_back(to_scientific(m(from, to), c.digits));
      rows.push_back(std::move(row));
    }
    std::cout << report::csv(rows);
  } else {
    emit(report::envelope("table", fmt, report::transition_matrix(m, c.digits)));
  }
  return kExitOk;
}

int cmd_intervals(const Common& c, Convention convention) {
  const FpFormat fmt = parse_format(c.format);
  const IntervalProbabilities p = interval_probabilities(fmt, convention);
  if (c.csv) {
    std::vector<std::vector<std::string>> rows{{"bucket", "probability"},
                                               {"ge_1", to_decimal(p.ge_1, c.digits)},
                                               {"between_half_and_1", to_decimal(p.between_half_and_1, c.digits)},
                                               {"le_half", to_decimal(p.le_half, c.digits)}};
    if (convention == Convention::Separated) rows.push_back({"nonfinite", to_decimal(p.nonfinite, c.digits)});
    std::cout << report::csv(rows);
  } else {
    emit(report::envelope("intervals", fmt, report::interval_probabilities(p, c.digits)));
  }
  return kExitOk;
}

int cmd_cdf(const Common& c, std::optional<std::int64_t> index) {
  const FpFormat fmt = parse_format(c.format);
  std::vector<std::int64_t> indices;
  if (index) {
    indices.push_back(*index);
  } else {
    for (std::int64_t i = 2; i <= fmt.fraction_bits(); ++i) indices.push_back(i);
  }
  std::vector<std::vector<std::string>> csv_rows{{"i", "probability"}};
  Json rows = Json::array();
  for (std::int64_t i : indices) {
    const ExactRational p = cdf_dyadic(fmt, i);
    csv_rows.push_back({std::to_string(i), to_decimal(p, c.digits)});
    rows.push_back(Json{{"i", i}, {"probability", report::rational(p, c.digits)}});
  }
  if (c.csv) {
    std::cout << report::csv(csv_rows);
  } else {
    emit(report::envelope("cdf", fmt, Json{{"rows", std::move(rows)}}));
  }
  return kExitOk;
}

int cmd_bounds(const Common& c, const std::optional<std::string>& tol) {
  const FpFormat fmt = parse_format(c.format);
  std::vector<ThresholdBounds> rows;
  if (tol) {
    rows.push_back(decimal_threshold_bounds(fmt, parse_decimal(*tol)));
  } else {
    rows = tolerance_table(fmt);
  }
  if (c.csv) {
    std::vector<std::vector<std::string>> out{{"tolerance", "lower_bound", "upper_bound", "resolvable"}};
    for (const auto& b : rows)
      out.push_back({to_scientific(b.tolerance, c.digits), to_decimal(b.lower_bound, c.digits),
                     to_decimal(b.upper_bound, c.digits), b.resolvable ? "true" : "false"});
    std::cout << report::csv(out);
  } else {
    Json arr = Json::array();
    for (const auto& b : rows) arr.push_back(report::threshold_bounds(b, c.digits));
    emit(report::envelope("bounds", fmt, Json{{"rows", std::move(arr)}}));
  }
  return kExitOk;
}

struct SampleArgs {
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  std::string cls = "normalized";
  double sigma = 4.0;
  unsigned workers = 0;
};

int cmd_sample(const Common& c, const SampleArgs& a, Convention convention) {
  const FpFormat fmt = parse_format(c.format);
  if (a.n < 1) throw UsageError("--n must be at least 1");
  CampaignConfig config{fmt, parse_class(a.cls), static_cast<std::uint64_t>(a.n), a.seed, convention};
  const CampaignReport r = run_campaign(config, a.workers);
  const ComparisonReport cmp = compare(analytic_model(fmt, convention), r, a.sigma);
  emit(report::envelope("sample", fmt,
                        Json{{"campaign", report::campaign(r)}, {"comparison", report::comparison(cmp, c.digits)}}));
  return cmp.passed ? kExitOk : kExitMismatch;
}

int cmd_census(const Common& c, const std::string& cls, const std::string& conv, unsigned workers) {
  const FpFormat fmt = parse_format(c.format);
  if (fmt.total_bits() > kMaxCensusBits)
    throw UsageError("census limited to formats of at most " + std::to_string(kMaxCensusBits) + " bits");
  std::vector<FpClass> classes;
  if (cls == "all") {
    classes.assign(std::begin(kAllClasses), std::end(kAllClasses));
  } else {
    classes.push_back(parse_class(cls));
  }
  std::vector<Convention> conventions;
  if (conv == "both") {
    conventions = {Convention::PaperCompat, Convention::Separated};
  } else {
    conventions.push_back(parse_convention(conv));
  }
  bool all_equal = true;
  Json censuses = Json::array();
  for (Convention convention : conventions) {
    const AnalyticModel model = analytic_model(fmt, convention);
    for (FpClass source : classes) {
      const CensusReport r = exhaustive_census(fmt, source, convention, workers);
      const ComparisonReport cmp = compare(model, r);
      all_equal = all_equal && cmp.passed;
      Json j = report::census(r);
      j["comparison"] = report::comparison(cmp, c.digits);
      censuses.push_back(std::move(j));
    }
  }
  emit(report::envelope("census", fmt, Json{{"all_equal", all_equal}, {"censuses", std::move(censuses)}}));
  return all_equal ? kExitOk : kExitMismatch;
}

struct InjectArgs {
  std::string in;
  std::string out;
  std::optional<double> rate;
  std::optional<std::uint64_t> count;
  std::uint64_t seed = 0;
  std::string endian = "little";
  bool summary_only = false;
};

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open input: " + path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

int cmd_inject(const Common& c, const InjectArgs& a) {
  const FpFormat fmt = parse_format(c.format);
  if (a.rate.has_value() == a.count.has_value()) throw UsageError("exactly one of --rate or --count is required");
  InjectionSpec spec;
  spec.seed = a.seed;
  if (a.rate) {
    spec.mode = InjectionSpec::Mode::Rate;
    spec.rate = *a.rate;
  } else {
    spec.mode = InjectionSpec::Mode::Count;
    spec.count = *a.count;
  }
  const Endian endian = parse_endian(a.endian);
  const auto input = read_file(a.in);
  const InjectionResult r = inject_faults(input, fmt, endian, spec);
  {
    std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot open output: " + a.out);
    out.write(reinterpret_cast<const char*>(r.data.data()), static_cast<std::streamsize>(r.data.size()));
    if (!out) throw UsageError("write failed: " + a.out);
  }
  std::array<std::array<std::uint64_t, 4>, 4> transitions{};
  Json flips = Json::array();
  for (const auto& f : r.flips) {
    ++transitions[class_index(f.record.class_before)][class_index(f.record.class_after)];
    if (!a.summary_only) flips.push_back(report::injected_flip(f, c.digits));
  }
  Json trans = Json::object();
  for (FpClass from : kAllClasses) {
    Json row = Json::object();
    for (FpClass to : kAllClasses) row[to_string(to)] = transitions[class_index(from)][class_index(to)];
    trans[to_string(from)] = std::move(row);
  }
  Json payload{{"input", a.in},
               {"output", a.out},
               {"endian", to_string(endian)},
               {"mode", a.rate ? "rate" : "count"},
               {"seed", a.seed},
               {"words", r.words},
               {"flip_count", r.flips.size()},
               {"transitions", std::move(trans)}};
  if (a.rate) payload["rate"] = *a.rate;
  if (!a.summary_only) payload["flips"] = std::move(flips);
  emit(report::envelope("inject", fmt, std::move(payload)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single bit-flip analysis for binary floating-point words"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "bitflip 1.0.0");

  Common common;
  std::string value;
  int bit = 0;
  std::string convention = "paper-compat";
  bool paper_compat = false;
  std::optional<std::int64_t> cdf_index;
  std::optional<std::string> tol;
  SampleArgs sample;
  std::string census_class = "all";
  std::string census_convention = "both";
  unsigned census_workers = 0;
  InjectArgs inject;

  auto* classify_cmd = app.add_subcommand("classify", "Class, fields and exact value of a word");
  add_common(classify_cmd, common, false);
  classify_cmd->add_option("value", value, "hex word (0x...) or decimal literal")->required();

  auto* flip_cmd = app.add_subcommand("flip", "Flip one bit and report the exact relative error");
  add_common(flip_cmd, common, false);
  flip_cmd->add_option("value", value, "hex word (0x...) or decimal literal")->required();
  flip_cmd->add_option("--bit", bit, "bit position, 0 = least significant")->required();

  auto* table_cmd = app.add_subcommand("table", "Class transition probabilities");
  add_common(table_cmd, common, true);

  auto add_convention = [&](CLI::App* cmd) {
    cmd->add_option("--convention", convention, "paper-compat or separated")
        ->capture_default_str()
        ->check(CLI::IsMember({"paper-compat", "separated"}));
    cmd->add_flag("--paper-compat", paper_compat, "shorthand for --convention paper-compat");
  };

  auto* intervals_cmd = app.add_subcommand("intervals", "Relative-error interval probabilities");
  add_common(intervals_cmd, common, true);
  add_convention(intervals_cmd);

  auto* cdf_cmd = app.add_subcommand("cdf", "Pr(error <= 2^-i) for a normalized source");
  add_common(cdf_cmd, common, true);
  cdf_cmd->add_option("--i", cdf_index, "single dyadic index (default: all)");

  auto* bounds_cmd = app.add_subcommand("bounds", "Bounds on Pr(error <= tolerance)");
  add_common(bounds_cmd, common, true);
  bounds_cmd->add_option("--tol", tol, "tolerance, e.g. 1e-11 (default: 1e-1 .. 1e-15)");

  auto* sample_cmd = app.add_subcommand("sample", "Seeded Monte Carlo campaign compared with the closed forms");
  add_common(sample_cmd, common, false);
  add_convention(sample_cmd);
  sample_cmd->add_option("--n", sample.n, "number of samples")->required();
  sample_cmd->add_option("--seed", sample.seed, "campaign seed")->capture_default_str();
  sample_cmd->add_option("--class", sample.cls, "source class")->capture_default_str();
  sample_cmd->add_option("--sigma", sample.sigma, "z-score threshold")->capture_default_str();
  sample_cmd->add_option("--workers", sample.workers, "threads (0 = all cores); does not affect results");

  auto* census_cmd = app.add_subcommand("census", "Exhaustive enumeration compared with the closed forms");
  add_common(census_cmd, common, false);
  census_cmd->add_option("--class", census_class, "source class or 'all'")->capture_default_str();
  census_cmd->add_option("--convention", census_convention, "paper-compat, separated or both")
      ->capture_default_str()
      ->check(CLI::IsMember({"paper-compat", "separated", "both"}));
  census_cmd->add_option("--workers", census_workers, "threads (0 = all cores)");

  auto* inject_cmd = app.add_subcommand("inject", "Flip bits in a raw file of packed words");
  add_common(inject_cmd, common, false);
  inject_cmd->add_option("--in", inject.in, "input file")->required();
  inject_cmd->add_option("--out", inject.out, "output file")->required();
  inject_cmd->add_option("--rate", inject.rate, "per-bit flip probability");
  inject_cmd->add_option("--count", inject.count, "exact number of distinct (word, bit) flips");
  inject_cmd->add_option("--seed", inject.seed, "seed")->capture_default_str();
  inject_cmd->add_option("--endian", inject.endian, "little or big")
      ->capture_default_str()
      ->check(CLI::IsMember({"little", "big"}));
  inject_cmd->add_flag("--summary-only", inject.summary_only, "omit the per-flip list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const Convention conv = paper_compat ? Convention::PaperCompat : parse_convention(convention);
  try {
    if (*classify_cmd) return cmd_classify(common, value);
    if (*flip_cmd) return cmd_flip(common, value, bit);
    if (*table_cmd) return cmd_table(common);
    if (*intervals_cmd) return cmd_intervals(common, conv);
    if (*cdf_cmd) return cmd_cdf(common, cdf_index);
    if (*bounds_cmd) return cmd_bounds(common, tol);
    if (*sample_cmd) return cmd_sample(common, sample, conv);
    if (*census_cmd) return cmd_census(common, census_class, census_convention, census_workers);
    if (*inject_cmd) return cmd_inject(common, inject);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
