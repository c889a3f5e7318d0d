#include "dseries/cli/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "dseries/cfrac.hpp"
#include "dseries/cli/alpha_spec.hpp"
#include "dseries/cli/config.hpp"
#include "dseries/cli/serialize.hpp"
#include "dseries/criterion.hpp"
#include "dseries/errors.hpp"
#include "dseries/sumengine.hpp"

namespace dseries::cli {

using nlohmann::json;

namespace {

struct Context {
  std::vector<std::string> argv;
  std::string command;
  json parameters = json::object();
  std::vector<std::string> outputs;
  Config config;
  std::ostream& out;
  std::ostream& err;
};

json number_or_null_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json document(const std::string& command) { return json{{"schema", kSchemaVersion}, {"command", command}}; }

void emit(Context& ctx, const json& doc, const std::string& path) {
  if (path.empty()) {
    ctx.out << doc.dump(2) << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write '" + path + "'");
  f << doc.dump(2) << "\n";
  if (!f) throw InvalidArgument("failed writing '" + path + "'");
  ctx.outputs.push_back(path);
}

// ---- cf ----

struct CfArgs {
  std::string alpha;
  std::size_t terms = 10;
  std::string json_path;
};

int cmd_cf(Context& ctx, const CfArgs& a) {
  ctx.parameters = {{"alpha", a.alpha}, {"terms", a.terms}, {"json", a.json_path}};
  const RealSource src = make_alpha(a.alpha, ctx.config.max_bits);
  const Expansion ex = expand(src, a.terms);
  json doc = document("cf");
  doc["alpha"] = format_alpha(src.params());
  doc["alpha_description"] = src.describe();
  doc["terms_requested"] = a.terms;
  doc.update(to_json(ex));
  emit(ctx, doc, a.json_path);
  if (ex.status == ExpandStatus::PrecisionCap) {
    ctx.err << "precision cap of " << ctx.config.max_bits << " bits reached after "
            << ex.convergents.size() << " convergents\n";
    return kExitCap;
  }
  return kExitOk;
}

// ---- classify ----

struct ClassifyArgs {
  std::string alpha;
  std::string f = "pow:1";
  std::vector<std::string> certs;
  std::size_t budget = 40;
  std::string json_path;
};

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw InvalidArgument("bad " + what + ": '" + text + "'");
  return v;
}

CertificateInput parse_certificate(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (name == "roth" && arg.empty()) return cert::RothAlgebraic{};
  if (name == "mahler") {
    cert::MahlerPi m;
    if (!arg.empty()) m.c = parse_double(arg, "Mahler constant");
    return m;
  }
  if (name == "measure") {
    const auto comma = arg.find(',');
    if (comma == std::string::npos) throw InvalidArgument("measure certificate is measure:<mu>,<C>");
    return cert::Measure{MeasureBound{parse_double(arg.substr(0, comma), "mu"),
                                      parse_double(arg.substr(comma + 1), "C")}};
  }
  if (name == "allones") {
    cert::AllOnesTail t;
    if (!arg.empty()) t.from_index = static_cast<std::size_t>(parse_double(arg, "index"));
    return t;
  }
  throw InvalidArgument("unknown certificate '" + text +
                        "' (roth, mahler[:C], measure:<mu>,<C>, allones[:k])");
}

int cmd_classify(Context& ctx, const ClassifyArgs& a) {
  ctx.parameters = {{"alpha", a.alpha}, {"f", a.f}, {"cert", a.certs}, {"budget", a.budget},
                    {"json", a.json_path}};
  const RealSource src = make_alpha(a.alpha, ctx.config.max_bits);
  const FDescriptor f = parse_f_spec(a.f);
  std::vector<CertificateInput> certs;
  for (const auto& c : a.certs) certs.push_back(parse_certificate(c));
  Budget budget;
  budget.max_convergents = a.budget;
  const Verdict v = classify(src, f, budget, certs);
  json doc = document("classify");
  doc["alpha"] = format_alpha(src.params());
  doc.update(to_json(v));
  emit(ctx, doc, a.json_path);
  return v.outcome == Outcome::Inconclusive ? kExitInconclusive : kExitOk;
}

// ---- sum ----

struct SumArgs {
  std::string alpha;
  std::string f = "pow:1";
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::string mode = "direct";
  std::string trace_path;
  std::string json_path;
};

void write_trace(Context& ctx, const std::string& path, const std::vector<TracePoint>& trace) {
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write '" + path + "'");
  f << "M,S,rounding_bound\n";
  for (const auto& p : trace) {
    f << p.m << "," << format_g17(p.value) << "," << format_g17(p.rounding_bound) << "\n";
  }
  if (!f) throw InvalidArgument("failed writing '" + path + "'");
  ctx.outputs.push_back(path);
}

int cmd_sum(Context& ctx, const SumArgs& a) {
  ctx.parameters = {{"alpha", a.alpha}, {"f", a.f},       {"N", a.n},
                    {"M", a.m},         {"mode", a.mode}, {"trace", a.trace_path},
                    {"json", a.json_path}};
  const auto start = std::chrono::steady_clock::now();
  const RealSource src = make_alpha(a.alpha, ctx.config.max_bits);
  const FDescriptor f = parse_f_spec(a.f);
  SumOptions options;
  options.workers = ctx.config.workers;
  options.max_terms = ctx.config.max_terms;
  const bool want_trace = !a.trace_path.empty();
  if (want_trace) options.checkpoints = geometric_checkpoints(a.m);

  std::vector<PartialSumResult> results;
  std::vector<TracePoint> trace;
  if (a.mode == "direct" || a.mode == "both") {
    results.push_back(partial_sum_direct(src, f, a.n, a.m, options, want_trace ? &trace : nullptr));
  }
  if (a.mode == "periodic" || a.mode == "both") {
    const auto exact = src.exact_value();
    if (!exact) throw InvalidArgument("periodic mode needs a rational alpha");
    const bool first = results.empty();
    results.push_back(partial_sum_periodic(exact->get_num(), exact->get_den(), f, a.n, a.m, options,
                                           want_trace && first ? &trace : nullptr));
  }

  json doc = document("sum");
  doc["alpha"] = format_alpha(src.params());
  doc["f"] = f.spec();
  doc["N"] = a.n;
  doc["M"] = a.m;
  json rs = json::array();
  for (const auto& r : results) rs.push_back(to_json(r));
  doc["results"] = rs;
  doc["value"] = results.front().value;
  doc["rounding_bound"] = results.front().rounding_bound;
  if (results.size() == 2) {
    const double diff = std::abs(results[0].value - results[1].value);
    const double bound = results[0].rounding_bound + results[1].rounding_bound;
    doc["agreement"] = {{"difference", diff}, {"combined_bound", bound}, {"within", diff <= bound}};
  }
  if (want_trace) {
    write_trace(ctx, a.trace_path, trace);
    doc["trace"] = a.trace_path;
  }
  doc["duration_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(ctx, doc, a.json_path);
  return kExitOk;
}

// ---- drift ----

struct DriftArgs {
  std::string a, q;
  std::string f = "pow:1";
  std::uint64_t n = 10000;
  std::uint64_t m = 990000;
  std::string json_path;
};

mpz_class parse_mpz(const std::string& text, const std::string& what) {
  mpz_class z;
  const std::string t = !text.empty() && text[0] == '+' ? text.substr(1) : text;
  if (t.empty() || z.set_str(t, 10) != 0) throw InvalidArgument("bad " + what + ": '" + text + "'");
  return z;
}

int cmd_drift(Context& ctx, const DriftArgs& a) {
  ctx.parameters = {{"a", a.a}, {"q", a.q}, {"f", a.f}, {"N", a.n}, {"M", a.m}, {"json", a.json_path}};
  const mpz_class num = parse_mpz(a.a, "a"), den = parse_mpz(a.q, "q");
  const FDescriptor f = parse_f_spec(a.f);
  const DriftPrediction pred = drift_predict(num, den, f, a.n, a.m);
  SumOptions options;
  options.max_terms = ctx.config.max_terms;
  const PartialSumResult measured = partial_sum_periodic(num, den, f, a.n, a.m, options);
  const double deviation = measured.value - pred.value();
  json doc = document("drift");
  doc["a"] = num.get_str();
  doc["q"] = den.get_str();
  doc["f"] = f.spec();
  doc["N"] = a.n;
  doc["M"] = a.m;
  doc["predicted"] = to_json(pred);
  doc["measured"] = to_json(measured);
  doc["deviation"] = deviation;
  doc["relative_error"] = std::abs(deviation) / pred.magnitude;
  doc["within_allowance"] =
      std::abs(deviation) <= pred.error_allowance + measured.rounding_bound;
  emit(ctx, doc, a.json_path);
  return kExitOk;
}

// ---- liouville ----

struct LiouvilleArgs {
  std::string schedule = "factorial";
  std::string digits = "1";
  std::string base = "0/1";
  std::uint32_t start = 1;
  std::uint32_t terms = 4;
  double p = 0.5;
  std::string json_path;
};

double log10_of(const mpz_class& z) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log10(mant) + static_cast<double>(exp) * std::log10(2.0);
}

// log10 e_k as a double, also where e_k itself does not fit in 64 bits.
std::optional<double> log10_exponent(ExponentSchedule s, std::uint32_t k) {
  if (const auto e = liouville_exponent(s, k)) return std::log10(static_cast<double>(*e));
  if (s == ExponentSchedule::Tower100 && k >= 2) {
    const auto prev = liouville_exponent(s, k - 1);
    if (prev) return 2.0 * static_cast<double>(*prev);
  }
  if (s == ExponentSchedule::Factorial) return std::lgamma(k + 1.0) / std::log(10.0);
  return std::nullopt;
}

int cmd_liouville(Context& ctx, const LiouvilleArgs& a) {
  ctx.parameters = {{"schedule", a.schedule}, {"digits", a.digits}, {"base", a.base},
                    {"start", a.start},       {"terms", a.terms},   {"p", a.p},
                    {"json", a.json_path}};
  const std::string spec_text = "liouville:schedule=" + a.schedule + ",digits=" + a.digits +
                                ",base=" + a.base + ",start=" + std::to_string(a.start);
  const SourceParams params = parse_alpha(spec_text);
  const LiouvilleSpec spec = std::get<LiouvilleSpec>(params);
  const RealSource src = make_source(params, ctx.config.max_bits);
  const FDescriptor f = FDescriptor::power(a.p);

  struct Level {
    std::uint32_t n;
    std::uint64_t exponent;
    mpq_class value;
  };
  std::vector<Level> levels;
  json errors = json::array();
  for (std::uint32_t n = std::max<std::uint32_t>(1, spec.start); n <= a.terms; ++n) {
    const auto e = liouville_exponent(spec.schedule, n);
    if (!e) {
      errors.push_back({{"level", n},
                        {"error", "exponent_unrepresentable"},
                        {"detail", "the exponent of level " + std::to_string(n) +
                                       " does not fit in 64 bits"}});
      break;
    }
    try {
      levels.push_back({n, *e, liouville_partial_sum(spec, n, ctx.config.max_bits)});
    } catch (const PrecisionCapError& ex) {
      errors.push_back({{"level", n}, {"error", "precision_cap"}, {"detail", ex.what()}});
      break;
    }
  }

  ExpandLimits limits;
  limits.count = 1'000'000;
  for (const auto& l : levels) {
    if (l.value.get_den() > limits.q_limit) limits.q_limit = l.value.get_den();
  }
  Expansion ex;
  if (!levels.empty()) {
    ex = expand(src, limits);
  }
  if (ex.status == ExpandStatus::PrecisionCap) {
    errors.push_back({{"error", "precision_cap"},
                      {"detail", "continued fraction certified only up to q = " +
                                     (ex.convergents.empty() ? std::string("1")
                                                             : ex.convergents.back().q.get_str())}});
  }

  json level_docs = json::array();
  for (const auto& l : levels) {
    json d = {{"N", l.n},
              {"exponent", l.exponent},
              {"numerator", l.value.get_num().get_str()},
              {"denominator", l.value.get_den().get_str()},
              {"denominator_even", mpz_even_p(l.value.get_den().get_mpz_t()) != 0},
              {"is_convergent", false}};
    for (std::size_t i = 0; i < ex.convergents.size(); ++i) {
      const auto& c = ex.convergents[i];
      if (c.q == l.value.get_den() && c.a == l.value.get_num()) {
        d["is_convergent"] = true;
        d["convergent_index"] = c.index;
        const double lq = log10_of(c.q);
        // ||q_n alpha|| > 1/(2 q_{n+1}) and the tail is at most (10/3) 10^{-e_{N+1}}.
        if (const auto le = log10_exponent(spec.schedule, l.n + 1)) {
          const double e_next = std::pow(10.0, *le);
          const double bound = e_next - lq - std::log10(20.0 / 3.0);
          d["log10_q_next_lower_bound"] = number_or_null_json(bound);
          if (const auto t = criterion_term_log10(lq, bound, f)) d["log10_term_lower_bound"] = *t;
        }
        if (i + 1 < ex.convergents.size()) d["log10_q_next"] = log10_of(ex.convergents[i + 1].q);
      }
    }
    level_docs.push_back(d);
  }

  const auto entries = q_alpha(ex.convergents);
  json q_docs = json::array();
  for (const auto& e : entries) {
    const double lq = log10_of(e.q), lqn = log10_of(e.q_next);
    json d = {{"n", e.index}, {"log10_q", lq}, {"log10_q_next", lqn}};
    if (const auto t = criterion_term_log10(lq, lqn, f)) d["log10_term"] = *t;
    q_docs.push_back(d);
  }
  json conv_docs = json::array();
  for (const auto& c : ex.convergents) {
    conv_docs.push_back({{"n", c.index}, {"a", c.a.get_str()}, {"q", c.q.get_str()},
                         {"pq", c.partial_quotient.get_str()}});
  }

  json doc = document("liouville");
  doc["alpha"] = format_alpha(params);
  doc["alpha_description"] = src.describe();
  doc["p"] = a.p;
  doc["levels"] = level_docs;
  doc["convergents"] = conv_docs;
  doc["qalpha"] = q_docs;
  doc["expansion_status"] = to_string(ex.status);
  doc["errors"] = errors;
  emit(ctx, doc, a.json_path);
  if (!errors.empty()) {
    for (const auto& e : errors) ctx.err << "liouville: " << e["detail"].get<std::string>() << "\n";
    return kExitCap;
  }
  return kExitOk;
}

void write_manifest(const Context& ctx, const std::string& path, double seconds, int code,
                    const std::optional<std::string>& error) {
  if (path.empty()) return;
  json m = {{"schema", kSchemaVersion},
            {"tool", "dseries"},
            {"version", kToolVersion},
            {"command", ctx.command},
            {"argv", ctx.argv},
            {"parameters", ctx.parameters},
            {"caps",
             {{"max_bits", ctx.config.max_bits},
              {"max_terms", ctx.config.max_terms},
              {"workers", ctx.config.workers}}},
            {"outputs", ctx.outputs},
            {"duration_seconds", seconds},
            {"exit_code", code},
            {"error", error ? json(*error) : json(nullptr)}};
  std::ofstream f(path);
  if (f) f << m.dump(2) << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Context ctx{args, "", json::object(), {}, {}, out, err};

  CLI::App app{"Numerical experiments with sum (-1)^n f(n) |sin(n pi alpha)|", "dseries"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, manifest_path = "dseries-manifest.json";
  std::int64_t max_bits = 0;
  std::uint64_t max_terms = 0;
  unsigned workers = 0;
  auto* opt_config = app.add_option("--config", config_path, "key=value config file");
  app.add_option("--manifest", manifest_path, "run manifest path (empty to disable)");
  auto* opt_bits = app.add_option("--max-bits", max_bits, "precision cap in bits")->check(CLI::Range(64, 1 << 30));
  auto* opt_terms = app.add_option("--max-terms", max_terms, "largest N + M for partial sums");
  auto* opt_workers = app.add_option("--workers", workers, "threads for direct summation")->check(CLI::PositiveNumber);

  CfArgs cf;
  auto* sub_cf = app.add_subcommand("cf", "continued fraction and best approximations");
  sub_cf->add_option("alpha", cf.alpha, "alpha spec")->required();
  sub_cf->add_option("--terms", cf.terms, "number of convergents")->check(CLI::PositiveNumber);
  sub_cf->add_option("--json", cf.json_path, "write JSON here instead of standard output");

  ClassifyArgs cl;
  auto* sub_cl = app.add_subcommand("classify", "decide convergence where possible");
  sub_cl->add_option("alpha", cl.alpha, "alpha spec")->required();
  sub_cl->add_option("--f", cl.f, "weight: pow:<p> or logrec");
  sub_cl->add_option("--cert", cl.certs, "roth | mahler[:C] | measure:<mu>,<C> | allones[:k]");
  sub_cl->add_option("--budget", cl.budget, "convergents to examine")->check(CLI::PositiveNumber);
  sub_cl->add_option("--json", cl.json_path, "write JSON here instead of standard output");

  SumArgs sm;
  auto* sub_sum = app.add_subcommand("sum", "partial sum S(alpha; M, N)");
  sub_sum->add_option("alpha", sm.alpha, "alpha spec")->required();
  sub_sum->add_option("--f", sm.f, "weight: pow:<p> or logrec");
  sub_sum->add_option("--N", sm.n, "offset N");
  sub_sum->add_option("--M", sm.m, "number of terms M")->required()->check(CLI::PositiveNumber);
  sub_sum->add_option("--mode", sm.mode, "direct | periodic | both")
      ->check(CLI::IsMember({"direct", "periodic", "both"}));
  sub_sum->add_option("--trace", sm.trace_path, "CSV trace of running sums");
  sub_sum->add_option("--json", sm.json_path, "write JSON here instead of standard output");

  DriftArgs dr;
  auto* sub_drift = app.add_subcommand("drift", "predicted versus measured drift for even q");
  sub_drift->add_option("a", dr.a, "numerator")->required();
  sub_drift->add_option("q", dr.q, "denominator")->required();
  sub_drift->add_option("--f", dr.f, "weight: pow:<p> or logrec");
  sub_drift->add_option("--N", dr.n, "offset N (even)");
  sub_drift->add_option("--M", dr.m, "number of terms M")->check(CLI::PositiveNumber);
  sub_drift->add_option("--json", dr.json_path, "write JSON here instead of standard output");

  LiouvilleArgs lv;
  auto* sub_lv = app.add_subcommand("liouville", "Liouville-type numbers and their convergents");
  sub_lv->add_option("--schedule", lv.schedule, "factorial | tower100")
      ->check(CLI::IsMember({"factorial", "tower100"}));
  sub_lv->add_option("--digits", lv.digits, "repeating digit pattern over {1,3}");
  sub_lv->add_option("--base", lv.base, "rational offset a/q");
  sub_lv->add_option("--start", lv.start, "first index k")->check(CLI::PositiveNumber);
  sub_lv->add_option("--terms", lv.terms, "number of levels")->check(CLI::PositiveNumber);
  sub_lv->add_option("--p", lv.p, "exponent for the criterion terms");
  sub_lv->add_option("--json", lv.json_path, "write JSON here instead of standard output");

  std::string replay_path;
  auto* sub_replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  sub_replay->add_option("manifest", replay_path, "manifest file")->required();

  int code = kExitOk;
  std::optional<std::string> error;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    ctx.config = resolve_config(opt_config->count() ? std::optional<std::string>(config_path) : std::nullopt);
    if (opt_bits->count()) ctx.config.max_bits = max_bits;
    if (opt_terms->count()) ctx.config.max_terms = max_terms;
    if (opt_workers->count()) ctx.config.workers = workers;

    if (sub_replay->parsed()) {
      std::ifstream in(replay_path);
      if (!in) throw InvalidArgument("cannot read manifest '" + replay_path + "'");
      const json m = json::parse(in);
      return run(m.at("argv").get<std::vector<std::string>>(), out, err);
    }
    if (sub_cf->parsed()) {
      ctx.command = "cf";
      code = cmd_cf(ctx, cf);
    } else if (sub_cl->parsed()) {
      ctx.command = "classify";
      code = cmd_classify(ctx, cl);
    } else if (sub_sum->parsed()) {
      ctx.command = "sum";
      code = cmd_sum(ctx, sm);
    } else if (sub_drift->parsed()) {
      ctx.command = "drift";
      code = cmd_drift(ctx, dr);
    } else if (sub_lv->parsed()) {
      ctx.command = "liouville";
      code = cmd_liouville(ctx, lv);
    }
  } catch (const CLI::ParseError& e) {
    if (app.exit(e, out, err) == 0) return kExitOk;
    code = kExitUsage;
    error = e.what();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(ctx, manifest_path, seconds, code, error);
    return code;
  } catch (const PrecisionCapError& e) {
    code = kExitCap;
    error = e.what();
  } catch (const RangeError& e) {
    code = kExitCap;
    error = e.what();
  } catch (const InvalidArgument& e) {
    code = kExitUsage;
    error = e.what();
  } catch (const std::exception& e) {
    code = kExitUsage;
    error = e.what();
  }
  if (error) err << "dseries: " << *error << "\n";
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(ctx, manifest_path, seconds, code, error);
  return code;
}

}  // namespace dseries::cli
