#pragma once

// Curve records, run configuration, the on-disk symbol cache and the
// end-to-end pipelines that produce JSON reports.

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kurihara/bipartite.hpp"
#include "kurihara/oracle.hpp"
#include "kurihara/selmer_predict.hpp"

#ifndef KURIHARA_CODE_HASH
#define KURIHARA_CODE_HASH "unversioned"
#endif

namespace kurihara {

using Json = nlohmann::ordered_json;

inline constexpr const char* kCodeHash = KURIHARA_CODE_HASH;
inline constexpr int kCacheFormatVersion = 1;

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Curve records

struct CurveRecord {
  std::string label;
  std::array<Integer, 5> ainvs;
  std::uint64_t conductor = 0;
  int root_number = 1;
  std::optional<int> known_rank;
  std::optional<std::uint64_t> known_sha_order;
  std::map<std::uint64_t, CurveFlags> flags;
  std::map<std::uint64_t, std::uint64_t> tamagawa;

  bool operator==(const CurveRecord& o) const {
    auto same_flags = [&] {
      if (flags.size() != o.flags.size()) return false;
      for (auto& [p, f] : flags) {
        auto it = o.flags.find(p);
        if (it == o.flags.end() || it->second.surjective != f.surjective || it->second.manin_ok != f.manin_ok ||
            it->second.condition_cr != f.condition_cr)
          return false;
      }
      return true;
    };
    return label == o.label && ainvs == o.ainvs && conductor == o.conductor && root_number == o.root_number &&
           known_rank == o.known_rank && known_sha_order == o.known_sha_order && same_flags() && tamagawa == o.tamagawa;
  }
};

namespace detail {

inline Integer json_integer(const Json& j, const std::string& what) {
  if (j.is_number_integer()) return Integer(j.get<long>());
  if (j.is_string()) {
    Integer z;
    if (z.set_str(j.get<std::string>(), 10) != 0) throw InputError(what + ": not an integer");
    return z;
  }
  throw InputError(what + ": expected an integer");
}

inline Json integer_json(const Integer& z) {
  if (z.fits_slong_p()) return Json(z.get_si());
  return Json(z.get_str());
}

inline std::uint64_t json_uint(const Json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw InputError(what + ": expected a non-negative integer");
  return j.get<std::uint64_t>();
}

}  // namespace detail

/// Parse one record; unknown fields are errors in strict mode and warnings otherwise.
inline CurveRecord parse_record(const Json& j, bool strict, std::vector<std::string>* warnings = nullptr) {
  static const std::set<std::string> known = {"label", "ainvs", "conductor", "root_number", "known_rank", "known_sha_order", "flags", "tamagawa"};
  if (!j.is_object()) throw InputError("record is not a JSON object");
  for (auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      if (strict) throw InputError("unknown field '" + key + "'");
      if (warnings) warnings->push_back("ignoring unknown field '" + key + "'");
    }
  }
  for (const char* req : {"label", "ainvs", "conductor", "root_number"})
    if (!j.contains(req)) throw InputError(std::string("missing field '") + req + "'");
  CurveRecord r;
  if (!j["label"].is_string() || j["label"].get<std::string>().empty()) throw InputError("label must be a non-empty string");
  r.label = j["label"].get<std::string>();
  const auto& a = j["ainvs"];
  if (!a.is_array() || a.size() != 5) throw InputError("ainvs must be an array of 5 integers");
  for (int i = 0; i < 5; ++i) r.ainvs[i] = detail::json_integer(a[i], "ainvs");
  r.conductor = detail::json_uint(j["conductor"], "conductor");
  if (r.conductor == 0) throw InputError("conductor must be positive");
  if (!j["root_number"].is_number_integer() || std::abs(j["root_number"].get<int>()) != 1) throw InputError("root_number must be +1 or -1");
  r.root_number = j["root_number"].get<int>();
  if (j.contains("known_rank") && !j["known_rank"].is_null()) r.known_rank = static_cast<int>(detail::json_uint(j["known_rank"], "known_rank"));
  if (j.contains("known_sha_order") && !j["known_sha_order"].is_null())
    r.known_sha_order = detail::json_uint(j["known_sha_order"], "known_sha_order");
  if (j.contains("flags")) {
    if (!j["flags"].is_object()) throw InputError("flags must be an object keyed by p");
    for (auto& [pk, fv] : j["flags"].items()) {
      std::uint64_t p;
      try {
        p = std::stoull(pk);
      } catch (...) {
        throw InputError("flags key '" + pk + "' is not a prime");
      }
      if (!arith::is_prime(p)) throw InputError("flags key '" + pk + "' is not a prime");
      static const std::set<std::string> fkeys = {"surjective", "manin_ok", "condition_cr"};
      CurveFlags f;
      for (auto& [fk, b] : fv.items()) {
        if (!fkeys.count(fk)) {
          if (strict) throw InputError("unknown flag '" + fk + "'");
          if (warnings) warnings->push_back("ignoring unknown flag '" + fk + "'");
          continue;
        }
        if (!b.is_boolean()) throw InputError("flag '" + fk + "' must be boolean");
      }
      for (const char* fk : {"surjective", "manin_ok"})
        if (!fv.contains(fk)) throw InputError("flags for p = " + pk + " lack '" + fk + "'");
      f.surjective = fv["surjective"].get<bool>();
      f.manin_ok = fv["manin_ok"].get<bool>();
      f.condition_cr = fv.contains("condition_cr") && fv["condition_cr"].get<bool>();
      r.flags[p] = f;
    }
  }
  if (j.contains("tamagawa")) {
    if (!j["tamagawa"].is_object()) throw InputError("tamagawa must be an object keyed by prime");
    for (auto& [qk, cv] : j["tamagawa"].items()) r.tamagawa[std::stoull(qk)] = detail::json_uint(cv, "tamagawa");
  }
  return r;
}

inline Json record_to_json(const CurveRecord& r) {
  Json j;
  j["label"] = r.label;
  j["ainvs"] = Json::array();
  for (auto& a : r.ainvs) j["ainvs"].push_back(detail::integer_json(a));
  j["conductor"] = r.conductor;
  j["root_number"] = r.root_number;
  if (r.known_rank) j["known_rank"] = *r.known_rank;
  if (r.known_sha_order) j["known_sha_order"] = *r.known_sha_order;
  if (!r.flags.empty()) {
    Json f = Json::object();
    for (auto& [p, fl] : r.flags)
      f[std::to_string(p)] = {{"surjective", fl.surjective}, {"manin_ok", fl.manin_ok}, {"condition_cr", fl.condition_cr}};
    j["flags"] = f;
  }
  if (!r.tamagawa.empty()) {
    Json t = Json::object();
    for (auto& [q, c] : r.tamagawa) t[std::to_string(q)] = c;
    j["tamagawa"] = t;
  }
  return j;
}

struct IngestResult {
  std::vector<CurveRecord> records;
  std::vector<std::string> warnings;
};

/// JSON-lines reader; blank lines are skipped, errors carry line numbers.
inline IngestResult ingest_stream(std::istream& in, bool strict = true) {
  IngestResult out;
  std::set<std::string> labels;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Json j = Json::parse(line);
      std::vector<std::string> w;
      auto r = parse_record(j, strict, &w);
      for (auto& m : w) out.warnings.push_back("line " + std::to_string(lineno) + ": " + m);
      if (!labels.insert(r.label).second) {
        if (strict) throw InputError("duplicate label '" + r.label + "'");
        out.warnings.push_back("line " + std::to_string(lineno) + ": duplicate label '" + r.label + "'");
      }
      out.records.push_back(std::move(r));
    } catch (const Json::exception& e) {
      throw InputError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline IngestResult ingest(const std::string& path, bool strict = true) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open curve file " + path);
  return ingest_stream(in, strict);
}

inline EllipticCurve make_curve(const CurveRecord& r) {
  EllipticCurve E(r.label, r.ainvs, r.conductor);
  E.flags = r.flags;
  E.known_rank = r.known_rank;
  if (r.known_sha_order) E.known_sha_order = Integer(static_cast<unsigned long>(*r.known_sha_order));
  return E;
}

inline const CurveRecord& find_record(const std::vector<CurveRecord>& recs, const std::string& label) {
  for (auto& r : recs)
    if (r.label == label) return r;
  throw InputError("no curve labelled '" + label + "'");
}

// ---------------------------------------------------------------------------
// Configuration

struct RunConfig {
  std::uint64_t p = 7;
  int k = 1;
  std::uint64_t prime_bound = 5000;
  int max_nu = 3;
  std::uint64_t max_n = 10000000;
  std::optional<std::int64_t> D_K;
  std::string cache_dir;
  std::uint64_t seed = 0;
  bool allow_small_p = false;
  unsigned threads = 0;

  bool tainted() const { return p < 5; }
  void validate() const {
    if (!arith::is_prime(p)) throw InputError("p = " + std::to_string(p) + " is not prime");
    if (p < 5 && !allow_small_p) throw HypothesisError("p = " + std::to_string(p) + " < 5 (pass --allow-small-p to override; the report is tainted)");
    if (k < 1) throw InputError("k must be >= 1");
    if (max_nu < 0) throw InputError("max_nu must be >= 0");
    if (prime_bound < 2) throw InputError("prime_bound must be >= 2");
  }
  std::string region() const {
    return "cyc primes q <= " + std::to_string(prime_bound) + " at level k = " + std::to_string(k) + ", nu(n) <= " +
           std::to_string(max_nu) + ", n <= " + std::to_string(max_n);
  }
  Json to_json() const {
    Json j;
    j["p"] = p;
    j["k"] = k;
    j["prime_bound"] = prime_bound;
    j["max_nu"] = max_nu;
    j["max_n"] = max_n;
    j["D_K"] = D_K ? Json(*D_K) : Json();
    j["seed"] = seed;
    j["allow_small_p"] = allow_small_p;
    return j;
  }
};

/// Working hypotheses (a), (b) must be asserted by the data for this p; never inferred.
inline void check_hypotheses(const EllipticCurve& E, std::uint64_t p) {
  auto it = E.flags.find(p);
  if (it == E.flags.end()) throw HypothesisError(E.label() + ": no hypothesis flags recorded for p = " + std::to_string(p));
  if (!it->second.surjective) throw HypothesisError(E.label() + ": the mod-" + std::to_string(p) + " representation is not surjective");
  if (!it->second.manin_ok) throw HypothesisError(E.label() + ": the Manin constant is not known to be prime to " + std::to_string(p));
  if (E.conductor() % p == 0) throw HypothesisError(E.label() + ": p divides the conductor");
}

// ---------------------------------------------------------------------------
// Symbol cache

inline std::string cache_path(const std::string& dir, const std::string& label, std::uint64_t N) {
  std::ostringstream name;
  std::string safe;
  for (char c : label) safe += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  name << safe << "_" << N << "_" << std::hex << fnv1a(label + "|" + std::to_string(N) + "|" + kCodeHash) << ".msym";
  return (std::filesystem::path(dir) / name.str()).string();
}

inline Json symbol_to_json(const EigenSymbol& s, std::size_t basis_size) {
  Json j;
  j["header"] = {{"format_version", kCacheFormatVersion}, {"N", s.level}, {"label", s.curve_label}, {"basis_size", basis_size}, {"code_hash", kCodeHash}};
  j["normalization_scalar"] = s.normalization_scalar.get_str();
  j["period_scale"] = s.period_scale ? Json(s.period_scale->get_str()) : Json();
  j["probe_primes"] = s.probe_primes;
  Json c = Json::array();
  for (auto& x : s.coordinates) c.push_back(x.get_str());
  j["coordinates"] = c;
  j["values"] = s.values;
  return j;
}

inline EigenSymbol symbol_from_json(const Json& j, const std::string& label, std::uint64_t N) {
  const auto& h = j.at("header");
  if (h.at("format_version").get<int>() != kCacheFormatVersion || h.at("N").get<std::uint64_t>() != N ||
      h.at("label").get<std::string>() != label || h.at("code_hash").get<std::string>() != kCodeHash)
    throw InputError("cache header mismatch");
  EigenSymbol s;
  s.curve_label = label;
  s.level = N;
  s.normalization_scalar = Rational(j.at("normalization_scalar").get<std::string>());
  if (!j.at("period_scale").is_null()) s.period_scale = Rational(j.at("period_scale").get<std::string>());
  s.probe_primes = j.at("probe_primes").get<std::vector<std::uint64_t>>();
  for (auto& x : j.at("coordinates")) s.coordinates.emplace_back(x.get<std::string>());
  for (auto& x : s.coordinates) x.canonicalize();
  s.values = j.at("values").get<std::vector<std::int64_t>>();
  if (s.coordinates.size() != h.at("basis_size").get<std::size_t>()) throw InputError("cache basis size mismatch");
  s.p1 = std::make_shared<P1List>(N);
  if (s.values.size() != s.p1->size()) throw InputError("cache value count mismatch");
  s.build_table();
  return s;
}

struct SymbolBundle {
  EigenSymbol symbol;
  std::optional<Calibration> calibration;
  bool from_cache = false;
  std::size_t basis_size = 0;
};

/// Build (or load) the calibrated plus eigensymbol of E; writes are atomic (temp file + rename).
inline SymbolBundle load_or_build_symbol(const EllipticCurve& E, int root_number, const std::string& cache_dir = "") {
  SymbolBundle b;
  std::string path = cache_dir.empty() ? "" : cache_path(cache_dir, E.label(), E.conductor());
  if (!path.empty() && std::filesystem::exists(path)) {
    std::ifstream in(path);
    try {
      Json j = Json::parse(in);
      b.symbol = symbol_from_json(j, E.label(), E.conductor());
      b.basis_size = b.symbol.coordinates.size();
      b.from_cache = true;
      if (b.symbol.period_scale) return b;
    } catch (const std::exception&) {
      // stale or corrupt entry: rebuild below
    }
  }
  auto space = build_manin_space(E.conductor());
  b.symbol = isolate_eigensymbol(space, E, 60, 4);
  b.calibration = calibrate_period_scale(b.symbol, E, root_number);
  b.basis_size = space.dimension();
  b.from_cache = false;
  if (!path.empty()) {
    std::filesystem::create_directories(cache_dir);
    std::string tmp = path + ".tmp" + std::to_string(fnv1a(std::to_string(reinterpret_cast<std::uintptr_t>(&b))));
    {
      std::ofstream out(tmp);
      out << symbol_to_json(b.symbol, b.basis_size).dump() << "\n";
    }
    std::filesystem::rename(tmp, path);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Reports

inline Json exponent_json(const Exponent& e) { return e.is_infinite() ? Json("inf") : Json(e.value()); }

inline Json prime_json(const KolyvaginPrime& kp) {
  Json j;
  j["q"] = kp.q;
  j["family"] = to_string(kp.family);
  j["v1"] = kp.v1;
  j["v2"] = kp.v2;
  j["epsilon"] = kp.family == Family::adm ? Json(kp.epsilon) : Json();
  if (kp.ambiguous) j["ambiguous"] = true;
  return j;
}

inline Json number_json(const KuriharaNumber& kn) {
  Json j;
  j["n"] = kn.index.n;
  j["nu"] = kn.index.nu();
  j["t_n"] = exponent_json(kn.index.t);
  j["valuation"] = kn.valuation;
  j["saturated"] = kn.saturated;
  j["residue"] = kn.residue.get_str();
  if (kn.exact_value) j["value"] = kn.exact_value->get_str();
  return j;
}

inline Json stats_json(const DeltaStats& st) {
  Json j;
  j["ord_bound"] = st.ord ? Json(*st.ord) : Json("inconclusive");
  j["ord_certified_on_region"] = st.ord_certified;
  Json parts = Json::array();
  for (auto& [i, s] : st.strata) {
    Json e;
    e["i"] = i;
    e["count"] = s.count;
    e["nonzero"] = s.nonzero;
    e["value"] = s.value ? Json(*s.value) : Json();
    e["bound_kind"] = s.bound_kind();
    if (s.saturation_floor) e["saturation_floor"] = *s.saturation_floor;
    parts.push_back(e);
  }
  j["partial"] = parts;
  j["partial_infty"] = st.partial_infty ? Json(*st.partial_infty) : Json();
  j["search_region"] = st.region;
  j["warnings"] = st.warnings;
  return j;
}

inline Json identities_json(const std::vector<Identity>& ids) {
  Json a = Json::array();
  for (auto& id : ids) a.push_back({{"name", id.name}, {"lhs", id.lhs}, {"rhs", id.rhs}, {"ok", id.ok}});
  return a;
}

inline Json shape_json(const ModuleShape& s) { return {{"corank", s.corank}, {"exponents", s.exponents}, {"structure", s.str()}}; }

inline Json prediction_json(const SelmerPrediction& pr) {
  Json j;
  j["status"] = "ok";
  j["shape"] = shape_json(pr.shape);
  Json f = Json::array();
  for (auto& e : pr.fitting) f.push_back({{"i", e.i}, {"fitting_exponent", e.exponent ? Json(*e.exponent) : Json("zero ideal")}});
  j["fitting"] = f;
  j["length_div_quotient"] = pr.length_div_quotient;
  j["evidence"] = pr.evidence;
  j["identities"] = identities_json(pr.identities);
  return j;
}

struct PipelineResult {
  Json report;
  DeltaStats stats;
  std::optional<SelmerPrediction> prediction;
  std::optional<std::string> inconclusive;  // reason, when predict_selmer_Q could not decide
  std::vector<KolyvaginPrime> primes;
  std::vector<KuriharaNumber> numbers;
};

enum class Stage { sieve, delta, stats, predict };

/// curves -> modsym -> sieves -> kurihara -> selmer_predict for one record.
inline PipelineResult run_pipeline(const CurveRecord& rec, const RunConfig& cfg, Stage stop = Stage::predict) {
  cfg.validate();
  PipelineResult out;
  auto E = make_curve(rec);
  check_hypotheses(E, cfg.p);
  Json& r = out.report;
  r["curve"] = rec.label;
  r["conductor"] = rec.conductor;
  r["root_number"] = rec.root_number;
  r["p"] = cfg.p;
  r["k"] = cfg.k;
  r["config"] = cfg.to_json();
  r["code_hash"] = kCodeHash;
  if (cfg.tainted()) r["tainted"] = "p < 5: outside the standing hypotheses";
  r["region"] = cfg.region();

  out.primes = sieve(Family::cyc, E, {}, cfg.p, cfg.k, cfg.prime_bound);
  Json pj = Json::array();
  for (auto& kp : out.primes) pj.push_back(prime_json(kp));
  r["sieve"] = {{"count", out.primes.size()}, {"primes", pj}};
  if (stop == Stage::sieve) return out;

  auto bundle = load_or_build_symbol(E, rec.root_number, cfg.cache_dir);
  require_p_integral(bundle.symbol, cfg.p);
  r["symbol"] = {{"basis_size", bundle.basis_size}, {"period_scale", bundle.symbol.period_scale->get_str()}};

  auto indices = build_indices(out.primes, cfg.max_nu, cfg.max_n);
  out.numbers = kurihara_numbers(bundle.symbol, indices, cfg.p, {}, kDefaultValuationCap, cfg.threads);
  Json recs = Json::array();
  for (auto& kn : out.numbers) recs.push_back(number_json(kn));
  r["records"] = recs;
  if (stop == Stage::delta) return out;

  out.stats = delta_stats(out.numbers, cfg.region(), cfg.max_nu);
  r["stats"] = stats_json(out.stats);
  if (stop == Stage::stats) return out;

  try {
    out.prediction = predict_selmer_Q(out.stats);
    Json pr = prediction_json(*out.prediction);
    Json cross = Json::object();
    if (rec.known_rank) cross["known_rank"] = {{"lhs", out.prediction->shape.corank}, {"rhs", *rec.known_rank}, {"ok", out.prediction->shape.corank == *rec.known_rank}};
    if (rec.known_sha_order) {
      // p-part of Sha: the finite part of Sel has order p^{length} when E(Q)[p] = 0
      int vsha = arith::valuation(Integer(static_cast<unsigned long>(*rec.known_sha_order)), cfg.p);
      cross["known_sha_p_length"] = {{"lhs", out.prediction->shape.length()}, {"rhs", vsha}, {"ok", out.prediction->shape.length() == vsha}};
    }
    pr["cross_checks"] = cross;
    r["prediction"] = pr;
  } catch (const InconclusiveError& e) {
    out.inconclusive = e.what();
    r["prediction"] = {{"status", "inconclusive"}, {"reason", e.what()}};
  }
  return out;
}

/// A record for E^K built from E (flags are inherited; rank and Sha unknown).
inline CurveRecord twist_record(const CurveRecord& rec, std::int64_t D_K) {
  auto E = make_curve(rec);
  auto EK = quadratic_twist(E, D_K);
  CurveRecord t;
  t.label = rec.label + "^(" + std::to_string(D_K) + ")";
  t.ainvs = EK.ainvs();
  t.conductor = EK.conductor();
  t.root_number = twist_root_number(E, rec.root_number, D_K);
  t.flags = rec.flags;
  return t;
}

struct GzResult {
  Json report;
  FieldSplit split;
  PipelineResult E, EK;
  std::optional<HeegnerProfile> heegner;
  std::optional<WaldspurgerProfile> waldspurger;
};

/// Runs E and E^K and applies the structural Gross-Zagier (nu(N^-) even) or Waldspurger (odd) dictionary.
/// With mirror = true, the roles of E and E^K are exchanged (root number of E^K used).
inline GzResult gz_pair(const CurveRecord& rec, std::int64_t D_K, const RunConfig& cfg, bool mirror = false) {
  GzResult g;
  g.split = split_conductor(rec.conductor, D_K, cfg.p);
  CurveRecord tw = twist_record(rec, D_K);
  const CurveRecord& first = mirror ? tw : rec;
  const CurveRecord& second = mirror ? rec : tw;
  g.E = run_pipeline(first, cfg);
  g.EK = run_pipeline(second, cfg);
  Json& r = g.report;
  r["curve"] = first.label;
  r["twist"] = second.label;
  r["D_K"] = D_K;
  r["split"] = {{"n_plus", g.split.n_plus}, {"n_minus", g.split.n_minus}, {"nu_minus", g.split.nu_minus}};
  r["branch"] = g.split.nu_minus % 2 == 0 ? "gross_zagier" : "waldspurger";
  r["config"] = cfg.to_json();
  r["code_hash"] = kCodeHash;
  r["E"] = g.E.report;
  r["EK"] = g.EK.report;
  if (g.E.inconclusive || g.EK.inconclusive)
    throw InconclusiveError("gz: component prediction inconclusive: " + g.E.inconclusive.value_or(g.EK.inconclusive.value_or("")));
  if (g.split.nu_minus % 2 == 0) {
    g.heegner = heegner_profile_from_shapes(g.E.prediction->shape, g.EK.prediction->shape, first.root_number);
    if (!rec.tamagawa.empty() && !mirror) {
      // informational comparison only
      attach_tamagawa_expectation(*g.heegner, 0, rec.tamagawa, cfg.p);
    }
    Json h;
    h["ord_kappa"] = g.heegner->ord_kappa;
    h["normalized_partials"] = g.heegner->normalized_partials;
    h["root_number_side"] = g.heegner->root_number_side;
    h["identities"] = identities_json(g.heegner->identities);
    if (g.heegner->tamagawa_expectation)
      h["tamagawa_expectation"] = {{"name", g.heegner->tamagawa_expectation->name}, {"expected", g.heegner->tamagawa_expectation->rhs}};
    r["heegner_profile"] = h;
  } else {
    g.waldspurger = waldspurger_profile_from_shapes(g.E.prediction->shape, g.EK.prediction->shape);
    Json w;
    w["ord_lambda"] = g.waldspurger->ord_lambda;
    Json np = Json::object();
    for (auto& [off, v] : g.waldspurger->normalized_partials) np[std::to_string(off)] = v;
    w["normalized_partials"] = np;
    w["steps"] = g.waldspurger->steps;
    w["merged_shape"] = shape_json(g.waldspurger->merged);
    w["identities"] = identities_json(g.waldspurger->identities);
    r["waldspurger_profile"] = w;
  }
  return g;
}

}  // namespace kurihara
