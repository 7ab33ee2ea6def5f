// Command-line driver: sieve, delta, stats, predict, gz, waldspurger,
// bipartite-sim, gross-points, oracle-check.

#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "kurihara.hpp"

using namespace kurihara;

namespace {

struct Options {
  std::string curves = "data/curves.jsonl";
  std::string label;
  std::string out;
  bool lenient = false;
  RunConfig cfg;
  std::int64_t DK = 0;
};

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw InputError("cannot write " + o.out);
  f << text << "\n";
}

void add_run_options(CLI::App* sub, Options& o, bool needs_label = true) {
  sub->add_option("--curves", o.curves, "JSON-lines curve file")->capture_default_str();
  auto* l = sub->add_option("--label", o.label, "curve label");
  if (needs_label) l->required();
  sub->add_option("--p", o.cfg.p, "working prime p >= 5")->capture_default_str();
  sub->add_option("--k", o.cfg.k, "level k of the prime family")->capture_default_str();
  sub->add_option("--prime-bound", o.cfg.prime_bound, "sieve bound")->capture_default_str();
  sub->add_option("--max-nu", o.cfg.max_nu, "largest number of prime factors of n")->capture_default_str();
  sub->add_option("--max-n", o.cfg.max_n, "largest n")->capture_default_str();
  sub->add_option("--cache-dir", o.cfg.cache_dir, "modular symbol cache directory");
  sub->add_option("--seed", o.cfg.seed, "random seed")->capture_default_str();
  sub->add_option("--threads", o.cfg.threads, "worker threads (0 = hardware)");
  sub->add_option("--out", o.out, "write the report here instead of stdout");
  sub->add_flag("--allow-small-p", o.cfg.allow_small_p, "accept p < 5 (taints the report)");
  sub->add_flag("--lenient", o.lenient, "warn on unknown fields instead of failing");
  sub->add_flag("!--strict", o.lenient, "reject unknown fields (default)");
}

CurveRecord load_record(const Options& o) {
  auto res = ingest(o.curves, !o.lenient);
  for (auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  return find_record(res.records, o.label);
}

int cmd_sieve(const Options& o, const std::string& family) {
  o.cfg.validate();
  auto rec = load_record(o);
  auto E = make_curve(rec);
  SieveContext ctx;
  if (o.DK != 0) ctx.D_K = o.DK;
  auto primes = sieve(parse_family(family), E, ctx, o.cfg.p, o.cfg.k, o.cfg.prime_bound);
  std::string text;
  for (auto& kp : primes) text += prime_json(kp).dump() + "\n";
  if (!text.empty()) text.pop_back();
  emit(o, text);
  return 0;
}

int cmd_pipeline(Options o, Stage stage) {
  if (o.DK != 0) o.cfg.D_K = o.DK;
  auto res = run_pipeline(load_record(o), o.cfg, stage);
  emit(o, res.report.dump(2));
  if (stage == Stage::predict && res.inconclusive) return static_cast<int>(ExitCode::inconclusive);
  return 0;
}

int cmd_gz(Options o, bool mirror, bool require_odd) {
  if (o.DK == 0) throw InputError("--DK is required");
  o.cfg.D_K = o.DK;
  auto rec = load_record(o);
  auto split = split_conductor(rec.conductor, o.DK, o.cfg.p);
  if (require_odd && split.nu_minus % 2 == 0)
    throw HypothesisError("waldspurger: nu(N^-) = " + std::to_string(split.nu_minus) + " is even; use gz");
  auto g = gz_pair(rec, o.DK, o.cfg, mirror);
  emit(o, g.report.dump(2));
  return 0;
}

std::vector<int> parse_shape(const std::string& s) {
  std::vector<int> d;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) d.push_back(std::stoi(tok));
  return d;
}

int cmd_bipartite(const Options& o, const std::string& shape_str, int delta, std::size_t steps, std::size_t log_steps) {
  ArtinianContext ctx{o.cfg.p, o.cfg.k};
  auto shape = parse_shape(shape_str);
  std::vector<StepRecord> log;
  auto wc = synthetic_walk(shape, delta, steps, ctx, o.cfg.seed, &log);
  Json r;
  r["p"] = ctx.p;
  r["k"] = ctx.k;
  r["shape"] = shape;
  r["delta"] = delta;
  r["steps"] = wc.steps;
  r["seed"] = o.cfg.seed;
  Json lg = Json::array();
  for (std::size_t i = 0; i < log.size() && i < log_steps; ++i) {
    auto& s = log[i];
    lg.push_back({{"step", i + 1}, {"a", s.a}, {"b", s.b}, {"from", s.before.definite() ? "def" : "ind"}, {"e", s.after.e},
                  {"rho", s.after.rho}, {"m_exponents", s.after.m_exponents}, {"m_length", s.after.m_length},
                  {"stub_exponent", s.after.stub_exponent}, {"index", synthetic_index(s.after, delta, ctx)}});
  }
  r["log"] = lg;
  auto profile = lambda_profile(shape, delta, ctx);
  Json pj = Json::object();
  for (auto& [rr, v] : profile) pj[std::to_string(rr)] = v;
  r["lambda_profile"] = pj;
  r["assertions"] = {{"a_plus_b_equals_k", true},
                     {"min_def_index", wc.min_def_index},
                     {"min_ind_index", wc.min_ind_index},
                     {"failures", wc.failures},
                     {"messages", wc.messages},
                     {"ok", wc.failures == 0}};
  emit(o, r.dump(2));
  return wc.failures == 0 ? 0 : static_cast<int>(ExitCode::invariant);
}

Json matrix_json(const PadicMatrix2& M) {
  Json j;
  j["q"] = M.q;
  j["precision"] = M.precision;
  j["rows"] = {{M(0, 0).get_str(), M(0, 1).get_str()}, {M(1, 0).get_str(), M(1, 1).get_str()}};
  if (M.inv_sqrt_scalar) j["scalar"] = "1/sqrt(" + std::to_string(*M.inv_sqrt_scalar) + ")";
  return j;
}

int cmd_gross(const Options& o, std::uint64_t q, const std::string& kind, const std::string& beta_str, unsigned precision,
              std::uint64_t n_plus) {
  if (o.DK == 0) throw InputError("--DK is required");
  auto data = make_theta(o.DK < 0 ? -o.DK : o.DK);
  Json r;
  r["D_K"] = data.D;
  r["theta"] = {{"trace", data.theta_trace.get_str()}, {"norm", data.theta_norm.get_str()}};
  bool ok = char_poly_matches(data);
  Json checks = Json::array();
  checks.push_back({{"name", "char poly of i_q(theta) = x^2 - trd x + nrd"}, {"ok", ok}});
  r["i_theta"] = matrix_json(local_embedding_theta(q, data, precision));
  if (!beta_str.empty()) {
    Integer beta(beta_str);
    for (auto& c : check_beta_conditions(beta, o.cfg.p, n_plus, data.D)) checks.push_back({{"name", c.name}, {"ok", c.ok}, {"informational", true}});
    auto J = local_embedding_J(q, data, beta, precision);
    r["sqrt_beta"] = J.sqrt_beta.get_str();
    r["i_J"] = matrix_json(J.J);
    for (auto& c : J.checks) {
      checks.push_back({{"name", c.name}, {"ok", c.ok}});
      ok = ok && c.ok;
    }
  }
  if (!kind.empty()) {
    auto comp = gross_point_component(q, parse_gross_case(kind), data, GrossContext{o.cfg.p, n_plus}, precision);
    r["component"] = {{"case", kind}, {"matrix", matrix_json(comp.matrix)}};
    for (auto& c : comp.checks) {
      checks.push_back({{"name", c.name}, {"ok", c.ok}});
      ok = ok && c.ok;
    }
  }
  r["checks"] = checks;
  r["ok"] = ok;
  emit(o, r.dump(2));
  return ok ? 0 : static_cast<int>(ExitCode::invariant);
}

int cmd_oracle(const Options& o, int cusps, std::int64_t max_b) {
  auto rec = load_record(o);
  auto E = make_curve(rec);
  auto bundle = load_or_build_symbol(E, rec.root_number, o.cfg.cache_dir);
  std::mt19937_64 rng(o.cfg.seed);
  std::vector<std::pair<std::int64_t, std::int64_t>> pts = {{0, 1}};
  while (static_cast<int>(pts.size()) < cusps) {
    std::int64_t b = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(max_b));
    std::int64_t a = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(b));
    if (std::gcd(a, b) == 1 && oracle_supports(rec.conductor, b)) pts.emplace_back(a, b);
  }
  std::size_t need = 0;
  for (auto [a, b] : pts) need = std::max(need, oracle_terms_needed(rec.conductor, b));
  auto an = an_coefficients(E, need + 1);
  auto periods = compute_periods(E);
  Json r;
  r["curve"] = rec.label;
  r["period_scale"] = bundle.symbol.period_scale->get_str();
  r["omega_plus"] = static_cast<double>(periods.omega_plus);
  Json rows = Json::array();
  double worst = 0;
  for (auto [a, b] : pts) {
    Rational exact = eval_plus(bundle.symbol, a, b);
    auto num = numeric_oracle(E, rec.root_number, an, periods, a, b);
    double ex = exact.get_d(), err = std::fabs(ex - static_cast<double>(num.plus));
    double rel = err / std::max(1.0, std::fabs(ex));
    worst = std::max(worst, rel);
    rows.push_back({{"a", a}, {"b", b}, {"exact", exact.get_str()}, {"numeric", static_cast<double>(num.plus)}, {"rel_error", rel}});
  }
  r["cusps"] = rows;
  r["max_rel_error"] = worst;
  r["ok"] = worst < 1e-6;
  emit(o, r.dump(2));
  return worst < 1e-6 ? 0 : static_cast<int>(ExitCode::invariant);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kurihara numbers, Selmer structure predictions and bipartite bookkeeping"};
  app.require_subcommand(1);
  Options o;
  std::string family = "cyc", shape = "", kind, beta;
  int delta = 0, cusps = 50;
  std::size_t steps = 100, log_steps = 50;
  std::uint64_t q = 0, n_plus = 1;
  unsigned precision = 10;
  std::int64_t max_b = 500;
  bool mirror = false;

  auto* s_sieve = app.add_subcommand("sieve", "list primes of a Kolyvagin family as JSON lines");
  add_run_options(s_sieve, o);
  s_sieve->add_option("--family", family, "cyc, ac or adm")->capture_default_str();
  s_sieve->add_option("--DK", o.DK, "negative fundamental discriminant of K");

  auto* s_delta = app.add_subcommand("delta", "Kurihara numbers on the search region");
  auto* s_stats = app.add_subcommand("stats", "ord and partial statistics");
  auto* s_predict = app.add_subcommand("predict", "Selmer structure prediction");
  for (auto* s : {s_delta, s_stats, s_predict}) add_run_options(s, o);

  auto* s_gz = app.add_subcommand("gz", "E and E^K with the Gross-Zagier or Waldspurger dictionary");
  auto* s_wald = app.add_subcommand("waldspurger", "E and E^K with nu(N^-) odd");
  for (auto* s : {s_gz, s_wald}) {
    add_run_options(s, o);
    s->add_option("--DK", o.DK, "negative fundamental discriminant of K")->required();
    s->add_flag("--mirror", mirror, "exchange the roles of E and E^K");
  }

  auto* s_bip = app.add_subcommand("bipartite-sim", "synthetic Selmer walk along admissible primes");
  s_bip->add_option("--p", o.cfg.p)->capture_default_str();
  s_bip->add_option("--k", o.cfg.k)->capture_default_str();
  s_bip->add_option("--shape", shape, "exponents d1,d2,... (non-increasing)");
  s_bip->add_option("--delta", delta, "rigidity constant")->capture_default_str();
  s_bip->add_option("--steps", steps)->capture_default_str();
  s_bip->add_option("--log-steps", log_steps, "how many steps to print")->capture_default_str();
  s_bip->add_option("--seed", o.cfg.seed)->capture_default_str();
  s_bip->add_option("--out", o.out);

  auto* s_gross = app.add_subcommand("gross-points", "local components of the Gross point of conductor 1");
  s_gross->add_option("--DK", o.DK, "discriminant of K (either sign)")->required();
  s_gross->add_option("--q", q, "prime")->required();
  s_gross->add_option("--case", kind, "away, split_Nplus, p_split or p_inert");
  s_gross->add_option("--beta", beta, "beta for i_q(J)");
  s_gross->add_option("--precision", precision)->capture_default_str();
  s_gross->add_option("--p", o.cfg.p)->capture_default_str();
  s_gross->add_option("--n-plus", n_plus)->capture_default_str();
  s_gross->add_option("--out", o.out);

  auto* s_oracle = app.add_subcommand("oracle-check", "exact symbols against the q-expansion integral");
  add_run_options(s_oracle, o);
  s_oracle->add_option("--cusps", cusps)->capture_default_str();
  s_oracle->add_option("--max-b", max_b)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::input);
  }

  try {
    if (*s_sieve) return cmd_sieve(o, family);
    if (*s_delta) return cmd_pipeline(o, Stage::delta);
    if (*s_stats) return cmd_pipeline(o, Stage::stats);
    if (*s_predict) return cmd_pipeline(o, Stage::predict);
    if (*s_gz) return cmd_gz(o, mirror, false);
    if (*s_wald) return cmd_gz(o, mirror, true);
    if (*s_bip) return cmd_bipartite(o, shape, delta, steps, log_steps);
    if (*s_gross) return cmd_gross(o, q, kind, beta, precision, n_plus);
    if (*s_oracle) return cmd_oracle(o, cusps, max_b);
  } catch (const Error& e) {
    std::cerr << Json({{"error", e.what()}, {"exit_code", static_cast<int>(e.code())}}).dump() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << Json({{"error", e.what()}, {"exit_code", 4}}).dump() << "\n";
    return static_cast<int>(ExitCode::invariant);
  }
  return 0;
}
