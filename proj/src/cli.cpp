#include "contab/cli.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "contab/core.hpp"
#include "contab/ehrhart.hpp"
#include "contab/estimators.hpp"
#include "contab/exact.hpp"
#include "contab/integral.hpp"
#include "contab/montecarlo.hpp"

namespace contab {
namespace {

struct GlobalOptions {
  std::string format = "text";
  int digits = 4;
  unsigned threads = 1;
  std::uint64_t max_states = std::uint64_t{1} << 28;
  std::uint64_t max_evals = 1000000000;
};

struct SpecArgs {
  std::int64_t m = 0, s = 0, n = 0, t = 0;
  TableSpec spec() const { return make_spec(m, s, n, t); }
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Record spec_json(const TableSpec& spec) {
  Record j;
  j["m"] = spec.m;
  j["s"] = spec.s;
  j["n"] = spec.n;
  j["t"] = spec.t;
  j["lambda"] = to_string(density(spec));
  return j;
}

Record log_or_null(double v) { return std::isfinite(v) ? Record(v) : Record(nullptr); }

Record estimate_json(const LogEstimate& e, int digits) {
  const Scientific sci = e.scientific(digits);
  Record j;
  j["kind"] = "estimate";
  j["text"] = sci.str();
  j["mantissa"] = sci.mantissa;
  j["exponent"] = sci.exponent;
  j["ln"] = log_or_null(e.log());
  return j;
}

Record exact_json(const BigInt& value, int digits) {
  Record j;
  j["kind"] = "exact";
  j["text"] = value.get_str();
  j["decimal"] = value.get_str();
  j["scientific"] = sgn(value) > 0 ? LogEstimate::from_count(value).str(digits) : std::string("0");
  return j;
}

Record interval_json(const EstimateInterval& iv, int digits) {
  const auto r = iv.render(digits);
  Record j;
  j["kind"] = "interval";
  j["text"] = r.str();
  j["midpoint"] = r.midpoint;
  j["half_width"] = r.half_width;
  j["exponent"] = r.exponent;
  j["low"] = iv.low.str(digits);
  j["mid"] = iv.midpoint().str(digits);
  j["high"] = iv.high.str(digits);
  j["ln_low"] = iv.low.log();
  j["ln_high"] = iv.high.log();
  return j;
}

// mean ± standard error on the mean's decimal exponent.
Record mc_json(const McEstimate& est, int digits) {
  const Scientific mean = est.mean.scientific(digits);
  long double se_mant = 0.0L;
  if (std::isfinite(est.log_standard_error)) {
    se_mant = std::exp(static_cast<long double>(est.log_standard_error) -
                       static_cast<long double>(mean.exponent) * std::numbers::ln10_v<long double>);
  }
  std::ostringstream se;
  se.precision(std::max(digits - 1, 0));
  se << std::fixed << se_mant;
  Record j;
  j["kind"] = "monte_carlo";
  j["text"] = "(" + mean.mantissa + " ± " + se.str() + ")e" + std::to_string(mean.exponent);
  j["mean"] = mean.str();
  j["standard_error"] = std::isfinite(est.log_standard_error) ? est.standard_error().str(digits)
                                                               : std::string("0");
  j["ln_mean"] = est.mean.log();
  j["ln_standard_error"] = log_or_null(est.log_standard_error);
  return j;
}

Record mc_metadata(const McEstimate& est) {
  Record j;
  j["seed"] = est.seed;
  j["samples"] = est.sample_count;
  j["effective_sample_size"] = est.effective_sample_size;
  return j;
}

Record make_record(const TableSpec& spec, const std::string& method) {
  Record r;
  r["spec"] = spec_json(spec);
  r["method"] = method;
  return r;
}

void finish(Record& r, const Stopwatch& clock) { r["metadata"]["runtime_seconds"] = clock.seconds(); }

LogEstimate point_estimate(const std::string& method, const TableSpec& spec) {
  if (method == "good") return good_estimate(spec);
  if (method == "thm1") return thm1_estimate(spec);
  if (method == "thm1-closed") return thm1_closed_estimate(spec);
  if (method == "cor1") return cor1_estimate(spec);
  throw DomainError("unknown estimator method '" + method + "'");
}

// ---------------------------------------------------------------------------
// Rendering helpers

std::string flat_value(const Record& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ";";
      out += flat_value(v[i]);
    }
    return out;
  }
  return v.dump();
}

void flatten(const Record& v, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    for (const auto& [key, child] : v.items()) {
      flatten(child, prefix.empty() ? key : prefix + "." + key, out);
    }
    return;
  }
  out.emplace_back(prefix, flat_value(v));
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string spec_label(const Record& spec) {
  return std::to_string(spec["m"].get<std::int64_t>()) + "," +
         std::to_string(spec["s"].get<std::int64_t>()) + "," +
         std::to_string(spec["n"].get<std::int64_t>()) + "," +
         std::to_string(spec["t"].get<std::int64_t>());
}

std::string pad(const std::string& s, std::size_t width) {
  // Width in code points so "±" lines up.
  std::size_t cps = 0;
  for (unsigned char c : s) cps += (c & 0xC0) != 0x80;
  return cps >= width ? s + "  " : s + std::string(width - cps, ' ');
}

std::string render_compare_text(const Record& r) {
  static const std::vector<std::pair<std::string, std::string>> columns = {
      {"good", "G"},     {"thm1", "Thm1"},          {"thm1_closed", "Thm1-closed"}, {"cor1", "Cor1"},
      {"conj1", "Conjecture 1"}, {"mc", "Monte Carlo"}, {"exact", "Exact"}};
  std::string head = pad("m,s,n,t", 16);
  std::string row = pad(spec_label(r["spec"]), 16);
  for (const auto& [key, label] : columns) {
    if (!r["columns"].contains(key)) continue;
    const Record& cell = r["columns"][key];
    const std::string text = cell.is_null() ? "n/a" : cell["text"].get<std::string>();
    const std::size_t width = key == "conj1" || key == "mc" ? 26 : key == "exact" ? 0 : 12;
    head += width ? pad(label, width) : label;
    row += width ? pad(text, width) : text;
  }
  std::string out = head + "\n" + row + "\n";
  for (const auto& [key, value] : r["metadata"].items()) {
    out += "  " + key + ": " + flat_value(value) + "\n";
  }
  return out;
}

}  // namespace

std::string render_json(const Record& record) { return record.dump(); }

std::string render_text(const Record& record) {
  if (record.value("method", "") == "compare") return render_compare_text(record);
  std::string out = record["method"].get<std::string>();
  if (record.contains("spec")) out += " " + spec_label(record["spec"]);
  if (record.contains("value") && record["value"].contains("text")) {
    out += ": " + record["value"]["text"].get<std::string>();
  }
  out += "\n";
  std::vector<std::pair<std::string, std::string>> fields;
  for (const auto& [key, value] : record.items()) {
    if (key == "method") continue;
    flatten(value, key, fields);
  }
  for (const auto& [key, value] : fields) out += "  " + key + ": " + value + "\n";
  return out;
}

std::string render_csv(const Record& record) {
  std::vector<std::pair<std::string, std::string>> fields;
  flatten(record, "", fields);
  std::string head;
  std::string row;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) {
      head += ",";
      row += ",";
    }
    head += csv_cell(fields[i].first);
    row += csv_cell(fields[i].second);
  }
  return head + "\n" + row + "\n";
}

std::string render(const Record& record, OutputFormat format) {
  switch (format) {
    case OutputFormat::json: return render_json(record) + "\n";
    case OutputFormat::csv: return render_csv(record);
    case OutputFormat::text: break;
  }
  return render_text(record);
}

// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"contab: count and estimate constant-margin contingency tables"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  GlobalOptions g;
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--digits", g.digits, "Significant digits in scientific renderings")
      ->check(CLI::Range(1, 17));
  app.add_option("--threads", g.threads, "Worker threads for sampling and quadrature")
      ->check(CLI::Range(1u, 1024u));
  app.add_option("--max-states", g.max_states, "State cap for exact counting")
      ->envname("CONTAB_MAX_STATES");
  app.add_option("--max-evals", g.max_evals, "Evaluation cap for the torus quadrature")
      ->envname("CONTAB_MAX_EVALS");

  auto add_spec = [](CLI::App* sub, SpecArgs& a) {
    sub->add_option("m", a.m, "rows")->required();
    sub->add_option("s", a.s, "row sum")->required();
    sub->add_option("n", a.n, "columns")->required();
    sub->add_option("t", a.t, "column sum")->required();
  };

  std::function<Record()> action;

  SpecArgs count_args;
  auto* count_cmd = app.add_subcommand("count", "Exact count M(m,s;n,t)");
  add_spec(count_cmd, count_args);
  count_cmd->callback([&] {
    action = [&] {
      Stopwatch clock;
      const TableSpec spec = count_args.spec();
      Record r = make_record(spec, "exact");
      r["value"] = exact_json(count_exact(spec, CountOptions{g.max_states}), g.digits);
      finish(r, clock);
      return r;
    };
  });

  SpecArgs est_args;
  std::string method;
  auto* est_cmd = app.add_subcommand("estimate", "Closed-form estimate");
  est_cmd->add_option("--method", method, "Estimator")
      ->required()
      ->check(CLI::IsMember({"good", "thm1", "thm1-closed", "cor1", "conj1"}));
  add_spec(est_cmd, est_args);
  est_cmd->callback([&] {
    action = [&] {
      Stopwatch clock;
      const TableSpec spec = est_args.spec();
      Record r = make_record(spec, method);
      r["value"] = method == "conj1" ? interval_json(conj1_interval(spec), g.digits)
                                     : estimate_json(point_estimate(method, spec), g.digits);
      r["metadata"]["error_terms"] = "omitted";
      finish(r, clock);
      return r;
    };
  });

  SpecArgs dec_args;
  auto* dec_cmd = app.add_subcommand("decompose", "M = N P1 P2 E with exact rationals");
  add_spec(dec_cmd, dec_args);
  dec_cmd->callback([&] {
    action = [&] {
      Stopwatch clock;
      const TableSpec spec = dec_args.spec();
      const BigInt exact = count_exact(spec, CountOptions{g.max_states});
      const Remark1Decomposition d = remark1_decompose(spec, exact);
      Record r = make_record(spec, "decompose");
      r["value"] = exact_json(exact, g.digits);
      r["N"] = d.N.get_str();
      r["P1"] = d.P1.get_str();
      r["P2"] = d.P2.get_str();
      r["E"] = d.E.get_str();
      r["E_decimal"] = to_double(d.E);
      finish(r, clock);
      return r;
    };
  });

  SpecArgs cmp_args;
  std::uint64_t cmp_samples = 0;
  std::uint64_t cmp_seed = 1;
  bool cmp_no_exact = false;
  auto* cmp_cmd = app.add_subcommand("compare", "All estimates side by side");
  add_spec(cmp_cmd, cmp_args);
  cmp_cmd->add_option("--mc-samples", cmp_samples, "Monte Carlo samples (0 = skip)");
  cmp_cmd->add_option("--seed", cmp_seed, "Monte Carlo seed");
  cmp_cmd->add_flag("--no-exact", cmp_no_exact, "Skip the exact count");
  cmp_cmd->callback([&] {
    action = [&] {
      Stopwatch clock;
      const TableSpec spec = cmp_args.spec();
      Record r = make_record(spec, "compare");
      Record cols;
      cols["good"] = estimate_json(good_estimate(spec), g.digits);
      cols["thm1"] = estimate_json(thm1_estimate(spec), g.digits);
      cols["thm1_closed"] = estimate_json(thm1_closed_estimate(spec), g.digits);
      cols["cor1"] = estimate_json(cor1_estimate(spec), g.digits);
      cols["conj1"] = interval_json(conj1_interval(spec), g.digits);
      Record meta;
      meta["error_terms"] = "omitted";
      if (cmp_samples > 0) {
        const McEstimate est = mc_estimate(spec, cmp_samples, cmp_seed, g.threads);
        cols["mc"] = mc_json(est, g.digits);
        meta["mc"] = mc_metadata(est);
      }
      if (cmp_no_exact) {
        cols["exact"] = nullptr;
        meta["exact_reason"] = "skipped (--no-exact)";
      } else {
        try {
          cols["exact"] = exact_json(count_exact(spec, CountOptions{g.max_states}), g.digits);
        } catch (const ResourceLimitError& e) {
          cols["exact"] = nullptr;
          meta["exact_reason"] = e.what();
        }
      }
      r["columns"] = std::move(cols);
      r["metadata"] = std::move(meta);
      finish(r, clock);
      return r;
    };
  });

  SpecArgs mc_args;
  std::uint64_t mc_samples = 100000;
  std::uint64_t mc_seed = 1;
  auto* mc_cmd = app.add_subcommand("mc", "Sequential importance sampling estimate");
  add_spec(mc_cmd, mc_args);
  mc_cmd->add_option("--samples", mc_samples, "Number of samples")->check(CLI::PositiveNumber);
  mc_cmd->add_option("--seed", mc_seed, "Seed");
  mc_cmd->callback([&] {
    action = [&] {
      Stopwatch clock;
      const TableSpec spec = mc_args.spec();
      const McEstimate est = mc_estimate(spec, mc_samples, mc_seed, g.threads);
      Record r = make_record(spec, "mc");
      r["value"] = mc_json(est, g.digits);
      r["metadata"] = mc_metadata(est);
      finish(r, clock);
      return r;
    };
  });

  std::int64_t eh_m = 0;
  std::int64_t eh_n = 0;
  std::optional<std::int64_t> eh_eval;
  auto* eh_cmd = app.add_subcommand("ehrhart", "Ehrhart polynomial of the transportation polytope");
  eh_cmd->add_option("m", eh_m, "rows")->required();
  eh_cmd->add_option("n", eh_n, "columns")->required();
  eh_cmd->add_option("--eval", eh_eval, "Evaluate L_P at q");
  eh_cmd->callback([&] {
    action = [&] {
      Stopwatch clock;
      const auto counter = [&](const TableSpec& s) { return count_exact(s, CountOptions{g.max_states}); };
      const EhrhartPolynomial poly = ehrhart_polynomial(eh_m, eh_n, counter);
      Record r;
      r["method"] = "ehrhart";
      r["m"] = poly.m;
      r["n"] = poly.n;
      r["s0"] = poly.s0;
      r["t0"] = poly.t0;
      r["d"] = poly.d;
      Record coeffs = Record::array();
      for (const auto& c : poly.coeffs) coeffs.push_back(c.get_str());
      Record h = Record::array();
      for (const auto& c : poly.h) h.push_back(c.get_str());
      r["coefficients"] = std::move(coeffs);
      r["h_vector"] = std::move(h);
      const Rational lead = leading_coefficient(poly);
      const BigInt dfact = factorial(static_cast<std::uint64_t>(poly.d));
      Rational normalized = lead * Rational(dfact);
      normalized.canonicalize();
      r["leading_coefficient"] = lead.get_str();
      r["leading_coefficient_factored"] = normalized.get_str() + "/" + std::to_string(poly.d) + "!";
      r["normalized_volume"] = normalized.get_str();
      if (eh_eval) {
        const BigInt v = evaluate(poly, *eh_eval);
        r["value"] = exact_json(v, g.digits);
        r["value"]["q"] = *eh_eval;
      }
      finish(r, clock);
      return r;
    };
  });

  SpecArgs int_args;
  int grid = 64;
  std::int64_t max_dim = 6;
  auto* int_cmd = app.add_subcommand("verify-integral", "Trapezoidal evaluation of the torus integral");
  add_spec(int_cmd, int_args);
  int_cmd->add_option("--grid", grid, "Grid points per angle")->check(CLI::Range(8, 1 << 20));
  int_cmd->add_option("--max-dim", max_dim, "Cap on m + n");
  int_cmd->callback([&] {
    action = [&] {
      Stopwatch clock;
      const TableSpec spec = int_args.spec();
      IntegralOptions opts;
      opts.max_dimension = max_dim;
      opts.max_evals = g.max_evals;
      opts.threads = g.threads;
      const auto I = integral_numeric(spec, grid, opts);
      const double recon = reconstruct_M(spec, I);
      const BigInt exact = count_exact(spec, CountOptions{g.max_states});
      const double exact_d = exact.get_d();
      Record r = make_record(spec, "verify-integral");
      Record v;
      v["kind"] = "integral";
      std::ostringstream txt;
      txt.precision(12);
      txt << recon;
      v["text"] = txt.str();
      v["I_real"] = I.real();
      v["I_imag"] = I.imag();
      v["reconstructed"] = recon;
      v["exact"] = exact.get_str();
      v["relative_error"] = std::abs(recon - exact_d) / exact_d;
      v["imag_relative"] = I.real() != 0.0 ? std::abs(I.imag() / I.real()) : std::abs(I.imag());
      r["value"] = std::move(v);
      r["metadata"]["grid"] = grid;
      r["metadata"]["evaluations"] = integral_evaluations(spec, grid);
      finish(r, clock);
      return r;
    };
  });

  SpecArgs hyp_args;
  std::optional<double> hyp_a;
  auto* hyp_cmd = app.add_subcommand("check-hypothesis", "Left-hand side of the growth hypothesis");
  add_spec(hyp_cmd, hyp_args);
  hyp_cmd->add_option("--a", hyp_a, "Constant a in lhs <= a ln n");
  hyp_cmd->callback([&] {
    action = [&] {
      Stopwatch clock;
      const TableSpec spec = hyp_args.spec();
      const HypothesisReport h = hypothesis_lhs(spec);
      Record r = make_record(spec, "check-hypothesis");
      Record v;
      v["kind"] = "hypothesis";
      v["text"] = h.lhs.get_str();
      v["lhs"] = h.lhs.get_str();
      v["lhs_value"] = h.lhs_value;
      v["min_a"] = log_or_null(h.min_a);
      if (hyp_a) {
        v["a"] = *hyp_a;
        v["holds"] = h.holds_for(*hyp_a);
      }
      r["value"] = std::move(v);
      r["metadata"]["log_base"] = "natural";
      finish(r, clock);
      return r;
    };
  });

  SpecArgs delta_args;
  auto* delta_cmd = app.add_subcommand("delta", "Conjectured correction delta from the exact count");
  add_spec(delta_cmd, delta_args);
  delta_cmd->callback([&] {
    action = [&] {
      Stopwatch clock;
      const TableSpec spec = delta_args.spec();
      const BigInt exact = count_exact(spec, CountOptions{g.max_states});
      const double delta = conj1_delta(spec, exact);
      Record r = make_record(spec, "delta");
      Record v;
      v["kind"] = "delta";
      std::ostringstream txt;
      txt.precision(10);
      txt << delta;
      v["text"] = txt.str();
      v["delta"] = delta;
      v["in_open_interval_0_2"] = delta > 0.0 && delta < 2.0;
      v["exact"] = exact.get_str();
      r["value"] = std::move(v);
      finish(r, clock);
      return r;
    };
  });

  std::string lem_lambda = "1";
  std::uint64_t lem_samples = 100000;
  std::int64_t lem_K = 10000;
  double lem_C = 10.0;
  std::uint64_t lem_seed = 1;
  auto* lem_cmd = app.add_subcommand("check-lemmas", "Numerical checks of the |F| envelope bounds");
  lem_cmd->add_option("--lambda", lem_lambda, "Density as a rational, e.g. 1/30");
  lem_cmd->add_option("--samples", lem_samples, "Samples for the quartic envelope");
  lem_cmd->add_option("--K", lem_K, "K in the Gaussian comparison")->check(CLI::Range(std::int64_t{1}, std::numeric_limits<std::int64_t>::max()));
  lem_cmd->add_option("--envelope", lem_C, "Constant C in exp(C (1/K + 1/(AK)))");
  lem_cmd->add_option("--seed", lem_seed, "Sampling seed");
  lem_cmd->callback([&] {
    action = [&] {
      Stopwatch clock;
      Rational lambda;
      if (lambda.set_str(lem_lambda, 10) != 0 || sgn(lambda) <= 0) {
        throw DomainError("--lambda must be a positive rational, got '" + lem_lambda + "'");
      }
      lambda.canonicalize();
      const Lemma3Report l3 = lemma3_bound_check(lambda, lem_samples, lem_seed);
      const Lemma4Report l4 = lemma4_bound_check(lambda, lem_K, lem_C);
      Record r;
      r["method"] = "check-lemmas";
      r["lambda"] = lambda.get_str();
      Record v;
      v["kind"] = "lemmas";
      v["text"] = std::string(l3.ok() ? "envelope ok" : "envelope VIOLATED") + ", " +
                  (l4.within ? "gaussian ratio within bound" : "gaussian ratio exceeds bound");
      Record a;
      a["z_max"] = l3.z_max;
      a["samples"] = l3.samples;
      a["violations"] = l3.violations.size();
      a["escalations"] = l3.escalations;
      a["min_log_slack"] = l3.min_log_slack;
      a["max_log_slack"] = l3.max_log_slack;
      v["quartic_envelope"] = std::move(a);
      Record b;
      b["N"] = l4.params.N_arc;
      b["delta"] = l4.params.delta;
      b["K"] = l4.K;
      b["ratio"] = l4.ratio;
      b["bound"] = l4.bound;
      b["envelope_constant"] = l4.envelope_constant;
      b["within"] = l4.within;
      v["gaussian_comparison"] = std::move(b);
      r["value"] = std::move(v);
      finish(r, clock);
      return r;
    };
  });

  std::vector<const char*> argv{"contab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  const OutputFormat format = g.format == "json"  ? OutputFormat::json
                              : g.format == "csv" ? OutputFormat::csv
                                                  : OutputFormat::text;
  try {
    const Record record = action();
    out << render(record, format);
    return 0;
  } catch (const ResourceLimitError& e) {
    err << "resource limit: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace contab
