#pragma once

// JSON and CSV rendering of library results. Exact rationals travel as "p/q"
// strings next to a rounded decimal.

#include <bitflip/analytic.hpp>
#include <bitflip/format.hpp>
#include <bitflip/inject.hpp>
#include <bitflip/montecarlo.hpp>
#include <bitflip/relerr.hpp>

#include <json.hpp>

#include <sstream>
#include <string>

namespace bitflip::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "bitflip/1";

enum class Notation { Decimal, Scientific };

inline Json rational(const ExactRational& q, int digits, Notation notation = Notation::Decimal) {
  return Json{{"exact", to_exact_string(q)},
              {"decimal", notation == Notation::Scientific ? to_scientific(q, digits) : to_decimal(q, digits)}};
}

inline Json format(const FpFormat& f) {
  return Json{{"name", f.name()},
              {"exponent_bits", f.exponent_bits()},
              {"fraction_bits", f.fraction_bits()},
              {"total_bits", f.total_bits()},
              {"bias", f.bias()}};
}

inline Json envelope(const std::string& command, const FpFormat& f, Json payload) {
  return Json{{"schema", kSchema}, {"command", command}, {"format", format(f)}, {"payload", std::move(payload)}};
}

inline std::string hex_field(std::uint64_t v, int bits) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  const int n = std::max(1, (bits + 3) / 4);
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = n - 1; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
  return "0x" + s;
}

inline Json fields(const Word& w) {
  const Fields f = decode_fields(w);
  return Json{{"sign", f.sign},
              {"exponent", f.exponent},
              {"fraction", hex_field(f.fraction, w.format().fraction_bits())}};
}

inline Json value(const Word& w, int digits) {
  const ExactValue v = decode_value(w);
  if (const auto* nf = std::get_if<NonFinite>(&v)) {
    return *nf == NonFinite::NaN ? Json("nan") : *nf == NonFinite::PosInf ? Json("+inf") : Json("-inf");
  }
  const auto& fv = std::get<FiniteValue>(v);
  Json j = rational(fv.to_rational(), digits, Notation::Scientific);
  if (fv.significand == 0) j["decimal"] = fv.negative ? "-0" : "0";
  return j;
}

inline Json locus(const FieldLocus& l) { return Json{{"field", to_string(l.field)}, {"index", l.index}}; }

inline Json relative_error(const RelativeError& e, int digits) {
  Json j{{"kind", to_string(e.kind())}};
  if (e.is_finite()) {
    j["exact"] = to_exact_string(e.value());
    j["decimal"] = to_scientific(e.value(), digits);
    j["log2"] = sgn(e.value()) == 0 ? Json(nullptr) : Json(log2_approx(e.value()));
  }
  return j;
}

inline Json interval(const ErrorInterval& iv) {
  Json j{{"rule", iv.rule}, {"text", to_string(iv)}};
  j["lower"] = to_exact_string(iv.lower);
  j["lower_open"] = iv.lower_open;
  j["upper"] = iv.upper ? Json(to_exact_string(*iv.upper)) : Json(nullptr);
  j["upper_open"] = iv.upper_open;
  return j;
}

inline Json bounds_check(const BoundsCheck& c, int digits) {
  Json j{{"verdict", to_string(c.verdict)}, {"detail", c.detail}};
  if (c.interval) j["interval"] = interval(*c.interval);
  if (c.stated) j["stated"] = rational(*c.stated, digits, Notation::Scientific);
  if (c.deviation) j["deviation"] = rational(*c.deviation, digits, Notation::Scientific);
  return j;
}

inline Json transition(const TransitionRecord& r) {
  return Json{{"before", to_hex(r.before)},    {"after", to_hex(r.after)},
              {"position", r.position},        {"locus", locus(r.locus)},
              {"class_before", to_string(r.class_before)}, {"class_after", to_string(r.class_after)}};
}

inline Json transition_matrix(const TransitionMatrix& m, int digits) {
  Json rows = Json::object();
  for (FpClass from : kAllClasses) {
    Json row = Json::object();
    for (FpClass to : kAllClasses) row[to_string(to)] = rational(m(from, to), digits, Notation::Scientific);
    rows[to_string(from)] = std::move(row);
  }
  return Json{{"matrix", std::move(rows)}};
}

inline Json interval_probabilities(const IntervalProbabilities& p, int digits) {
  Json j{{"convention", to_string(p.convention)},
         {"ge_1", rational(p.ge_1, digits)},
         {"between_half_and_1", rational(p.between_half_and_1, digits)},
         {"le_half", rational(p.le_half, digits)}};
  if (p.convention == Convention::Separated) j["nonfinite"] = rational(p.nonfinite, digits);
  j["sum"] = to_exact_string(p.total());
  return j;
}

inline Json threshold_bounds(const ThresholdBounds& b, int digits) {
  return Json{{"tolerance", rational(b.tolerance, digits, Notation::Scientific)},
              {"lower_bound", rational(b.lower_bound, digits)},
              {"upper_bound", rational(b.upper_bound, digits)},
              {"lower_index", b.lower_index},
              {"upper_index", b.upper_index},
              {"resolvable", b.resolvable}};
}

inline Json tally(const Tally& t, const FpFormat& f, FpClass source) {
  Json trans = Json::object();
  for (FpClass to : kAllClasses) trans[to_string(to)] = t.transitions[class_index(source)][class_index(to)];
  Json buckets = Json::object();
  for (ErrorBucket b : {ErrorBucket::AtLeastOne, ErrorBucket::BetweenHalfAndOne, ErrorBucket::AtMostHalf,
                        ErrorBucket::NonFinite, ErrorBucket::Undefined})
    buckets[to_string(b)] = t.bucket(b);
  Json cdf = Json::array();
  for (std::int64_t i = 2; i <= f.fraction_bits(); ++i) cdf.push_back(Json{{"i", i}, {"count", t.cdf_count(i)}});
  return Json{{"cases", t.cases}, {"transitions", std::move(trans)}, {"buckets", std::move(buckets)}, {"cdf", std::move(cdf)}};
}

inline Json comparison(const ComparisonReport& r, int digits) {
  Json cells = Json::array();
  for (const auto& c : r.cells) {
    Json j{{"name", c.name},
           {"expected", rational(c.expected, digits, Notation::Scientific)},
           {"observed", rational(c.observed, digits, Notation::Scientific)},
           {"count", c.count}};
    if (!r.exact) j["z"] = c.z;
    j["status"] = c.status;
    cells.push_back(std::move(j));
  }
  Json j{{"mode", r.exact ? "exact" : "statistical"}};
  if (!r.exact) j["sigma"] = r.sigma;
  j["passed"] = r.passed;
  j["cells"] = std::move(cells);
  return j;
}

inline Json campaign(const CampaignReport& r) {
  const auto& c = r.config;
  return Json{{"config",
               {{"source_class", to_string(c.source_class)},
                {"sample_count", c.sample_count},
                {"seed", c.seed},
                {"convention", to_string(c.convention)}}},
              {"counts", tally(r.tally, c.format, c.source_class)}};
}

inline Json census(const CensusReport& r) {
  return Json{{"source_class", to_string(r.source_class)},
              {"convention", to_string(r.convention)},
              {"class_size", r.class_size.get_str()},
              {"counts", tally(r.tally, r.format, r.source_class)}};
}

inline Json injected_flip(const InjectedFlip& f, int digits) {
  return Json{{"word", f.word_index},
              {"offset", f.byte_offset},
              {"bit", f.record.position},
              {"before", to_hex(f.record.before)},
              {"after", to_hex(f.record.after)},
              {"class_before", to_string(f.record.class_before)},
              {"class_after", to_string(f.record.class_after)},
              {"relative_error", relative_error(f.error, digits)}};
}

/// Minimal CSV: rows of already-rendered cells, comma separated.
inline std::string csv(const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace bitflip::report
