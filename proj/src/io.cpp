// SPDX-License-Identifier: Apache-2.0
//
// Subcommand dispatch, flag and config-file resolution, and artifact
// serialization.  Real-valued flags travel as decimal strings and are parsed
// only after the working precision is set, so a flag value means the same
// number in every module it reaches.

#include "ldk/io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include "ldk/asymptotics.hpp"
#include "ldk/bigfloat.hpp"
#include "ldk/dirac.hpp"
#include "ldk/effective.hpp"
#include "ldk/indexpair.hpp"
#include "ldk/toeplitz.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace ldk {

const char kToolkitVersion[] = "0.1.0";
const char kPrecisionEnvVar[] = "LDK_PRECISION_BITS";

namespace {

using nlohmann::json;

// Resolved-config echo plus the output path, kept where the error handler can
// reach them so a failed run still leaves a diagnostic artifact.
struct Ctx {
  json cfg;
  std::string out_path;
};

unsigned env_default_bits() {
  const char* s = std::getenv(kPrecisionEnvVar);
  if (s == nullptr || *s == '\0') return 256;
  char* end = nullptr;
  unsigned long v = std::strtoul(s, &end, 10);
  if (end == s || *end != '\0' || v == 0)
    throw ConfigError(std::string(kPrecisionEnvVar) +
                      " must be a positive integer, got \"" + s + "\"");
  return static_cast<unsigned>(v);
}

Real parse_real_flag(const std::string& s, const char* name) {
  try {
    return Real(s);
  } catch (const std::exception&) {
    throw ConfigError(std::string(name) + ": not a number: \"" + s + "\"");
  }
}

// All artifacts go through here: stdout when the path is empty, otherwise a
// temp file renamed into place so readers never see a partial write.
void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    std::fflush(stdout);
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot open for writing: " + tmp);
    f << content;
    f.flush();
    if (!f) throw ConfigError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ConfigError("cannot move " + tmp + " into place");
}

std::string json_artifact(const json& j) { return j.dump(2) + "\n"; }

std::string csv_header(const std::string& command, const json& cfg) {
  return "# " + command + " toolkit-version=" + kToolkitVersion +
         "\n# config " + cfg.dump() + "\n";
}

int fail(const Ctx& ctx, int code, const char* category,
         const std::string& message) {
  std::fprintf(stderr, "ldtool: %s\n", message.c_str());
  json j;
  j["version"] = kToolkitVersion;
  j["error"] = json{{"category", category}, {"message", message}};
  if (!ctx.cfg.is_null()) j["config"] = ctx.cfg;
  if (!ctx.out_path.empty()) {
    try {
      emit(ctx.out_path, json_artifact(j));
    } catch (...) {
      // The diagnostic is best effort; the exit code already tells the story.
    }
  }
  return code;
}

// ---- JSON field access -----------------------------------------------------

json parse_json_text(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

double jdouble(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    char* end = nullptr;
    double x = std::strtod(s.c_str(), &end);
    if (end != s.c_str() && *end == '\0') return x;
  }
  throw ConfigError(where + ": a number is required");
}

double jdouble_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field " + key);
  return jdouble(j.at(key), where + "." + key);
}

double jdouble_or(const json& j, const char* key, double def,
                  const std::string& where) {
  if (!j.contains(key)) return def;
  return jdouble(j.at(key), where + "." + key);
}

// Decimal strings parse at the working precision; numbers pass through the
// exact binary value.
Real jreal(const json& v, const std::string& where) {
  if (v.is_string()) {
    try {
      return Real(v.get<std::string>());
    } catch (const std::exception&) {
      throw ConfigError(where + ": not a number: \"" + v.get<std::string>() +
                        "\"");
    }
  }
  if (v.is_number_integer()) return Real(v.get<long long>());
  if (v.is_number()) return Real(v.get<double>());
  throw ConfigError(where + ": a number or decimal string is required");
}

Real jreal_or(const json& j, const char* key, const Real& def,
              const std::string& where) {
  if (!j.contains(key)) return def;
  return jreal(j.at(key), where + "." + key);
}

// ---- region and profile schemas ---------------------------------------------

Region json_to_region(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError(where + ": an object with a \"kind\" field is required");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "disk") {
    return Region::disk(jdouble_or(j, "cx", 0, where),
                        jdouble_or(j, "cy", 0, where),
                        jdouble_field(j, "r", where));
  }
  if (kind == "segment") {
    return Region::segment(
        jdouble_field(j, "ax", where), jdouble_field(j, "ay", where),
        jdouble_field(j, "bx", where), jdouble_field(j, "by", where));
  }
  if (kind == "polygon") {
    if (!j.contains("vertices") || !j.at("vertices").is_array())
      throw ConfigError(where + ": polygon needs a \"vertices\" array");
    std::vector<std::pair<double, double>> vs;
    for (const json& v : j.at("vertices")) {
      if (!v.is_array() || v.size() != 2)
        throw ConfigError(where + ": each vertex is an [x, y] pair");
      vs.emplace_back(jdouble(v[0], where + ".vertices"),
                      jdouble(v[1], where + ".vertices"));
    }
    return Region::polygon(std::move(vs));
  }
  if (kind == "annulus") {
    return Region::annulus(
        jdouble_or(j, "cx", 0, where), jdouble_or(j, "cy", 0, where),
        jdouble_field(j, "r_inner", where), jdouble_field(j, "r_outer", where));
  }
  if (kind == "unite") {
    if (!j.contains("children") || !j.at("children").is_array())
      throw ConfigError(where + ": unite needs a \"children\" array");
    std::vector<Region> parts;
    for (const json& c : j.at("children"))
      parts.push_back(json_to_region(c, where + ".children"));
    return Region::unite(std::move(parts));
  }
  if (kind == "difference") {
    if (j.contains("left") && j.contains("cut"))
      return Region::difference(json_to_region(j.at("left"), where + ".left"),
                                json_to_region(j.at("cut"), where + ".cut"));
    if (j.contains("children") && j.at("children").is_array() &&
        j.at("children").size() == 2)
      return Region::difference(
          json_to_region(j.at("children")[0], where + ".children"),
          json_to_region(j.at("children")[1], where + ".children"));
    throw ConfigError(where +
                      ": difference needs \"left\" and \"cut\" (or a two-entry "
                      "\"children\" array)");
  }
  throw ConfigError(where + ": unknown region kind \"" + kind +
                    "\" (expected disk, segment, polygon, annulus, unite, or "
                    "difference)");
}

json region_to_json(const Region& e) {
  json j;
  switch (e.kind) {
    case Region::Kind::disk:
      j["kind"] = "disk";
      j["cx"] = e.cx;
      j["cy"] = e.cy;
      j["r"] = e.r;
      break;
    case Region::Kind::segment:
      j["kind"] = "segment";
      j["ax"] = e.ax;
      j["ay"] = e.ay;
      j["bx"] = e.bx;
      j["by"] = e.by;
      break;
    case Region::Kind::polygon: {
      j["kind"] = "polygon";
      json vs = json::array();
      for (const auto& v : e.vertices) vs.push_back(json::array({v.first, v.second}));
      j["vertices"] = std::move(vs);
      break;
    }
    case Region::Kind::annulus:
      j["kind"] = "annulus";
      j["cx"] = e.cx;
      j["cy"] = e.cy;
      j["r_inner"] = e.r_inner;
      j["r_outer"] = e.r;
      break;
    case Region::Kind::unite: {
      j["kind"] = "unite";
      json cs = json::array();
      for (const Region& c : e.children) cs.push_back(region_to_json(c));
      j["children"] = std::move(cs);
      break;
    }
    case Region::Kind::difference:
      j["kind"] = "difference";
      j["left"] = region_to_json(e.children.at(0));
      j["cut"] = region_to_json(e.children.at(1));
      break;
  }
  return j;
}

Profile json_to_profile(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError(where + ": an object with a \"kind\" field is required");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "zero") return RadialStep::zero();
  if (kind == "disk") {
    if (!j.contains("r")) throw ConfigError(where + ": disk needs \"r\"");
    return RadialStep::disk(jreal(j.at("r"), where + ".r"),
                            jreal_or(j, "value", Real(1), where));
  }
  if (kind == "annuli") {
    if (!j.contains("annuli") || !j.at("annuli").is_array())
      throw ConfigError(where + ": annuli needs an \"annuli\" array");
    std::vector<Annulus> as;
    for (const json& a : j.at("annuli")) {
      if (!a.is_object())
        throw ConfigError(where + ": each annulus is an object");
      Annulus an{jreal(a.at("r_lo"), where + ".r_lo"),
                 jreal(a.at("r_hi"), where + ".r_hi"),
                 jreal(a.at("value"), where + ".value")};
      as.push_back(std::move(an));
    }
    return RadialStep::make(std::move(as));
  }
  throw ConfigError(where + ": unknown profile kind \"" + kind +
                    "\" (expected zero, disk, or annuli)");
}

json profile_to_json(const Profile& p) {
  struct Visitor {
    json operator()(const RadialStep& s) const {
      if (s.annuli.empty()) return json{{"kind", "zero"}};
      if (s.annuli.size() == 1 && s.annuli[0].r_lo.is_zero()) {
        json j;
        j["kind"] = "disk";
        j["r"] = to_decimal_string(s.annuli[0].r_hi);
        j["value"] = to_decimal_string(s.annuli[0].value);
        return j;
      }
      json as = json::array();
      for (const Annulus& a : s.annuli)
        as.push_back(json{{"r_lo", to_decimal_string(a.r_lo)},
                          {"r_hi", to_decimal_string(a.r_hi)},
                          {"value", to_decimal_string(a.value)}});
      return json{{"kind", "annuli"}, {"annuli", std::move(as)}};
    }
    json operator()(const SmoothRadial& s) const {
      return json{{"kind", "smooth"},
                  {"descriptor", s.descriptor},
                  {"support_radius", to_decimal_string(s.support_radius)}};
    }
    json operator()(const Grid2D& g) const {
      return json{{"kind", "grid"}, {"nx", g.nx}, {"ny", g.ny}};
    }
  };
  return std::visit(Visitor{}, p);
}

// ---- shared flag resolution --------------------------------------------------

QuadControl resolve_quad(const std::string& rel) {
  QuadControl qc;
  if (rel.empty()) return qc;
  qc.rel_tol = parse_real_flag(rel, "--quad-rel");
  if (!(qc.rel_tol > 0) || !(qc.rel_tol < 1))
    throw ConfigError("--quad-rel must lie in (0, 1)");
  return qc;
}

json quad_echo(const std::string& rel) {
  if (rel.empty()) return json();  // derived from the working precision
  return json(to_decimal_string(parse_real_flag(rel, "--quad-rel")));
}

Profile resolve_scalar_profile(const std::string& disk_r,
                               const std::string& height,
                               const std::string& profile_json) {
  const bool have_disk = !disk_r.empty();
  const bool have_profile = !profile_json.empty();
  if (have_disk && have_profile)
    throw ConfigError("give --disk or --profile, not both");
  if (have_disk)
    return RadialStep::disk(parse_real_flag(disk_r, "--disk"),
                            parse_real_flag(height, "--height"));
  if (have_profile) return parse_profile_json(profile_json);
  throw ConfigError("a potential is required: --disk R or --profile JSON");
}

// ---- levels -------------------------------------------------------------------

struct LevelsOpts {
  std::string b = "2", m = "0";
  int qmax = 5;
  unsigned bits = 256;
  std::string out;
};

int cmd_levels(const LevelsOpts& o, Ctx& ctx) {
  ctx.out_path = o.out;
  PrecisionGuard guard(o.bits);
  if (o.qmax < 0) throw ConfigError("--qmax must be >= 0");
  MagneticParams p{parse_real_flag(o.b, "--b"), parse_real_flag(o.m, "--m")};
  p.validate();

  ctx.cfg = json{{"command", "levels"},
                 {"bits", o.bits},
                 {"b", to_decimal_string(p.b)},
                 {"m", to_decimal_string(p.m)},
                 {"qmax", o.qmax},
                 {"out", o.out}};

  std::ostringstream s;
  s << csv_header("levels", ctx.cfg) << "q,mu,t\n";
  for (int q = -o.qmax; q <= o.qmax; ++q)
    s << q << ',' << to_decimal_string(landau_dirac_level(q, p)) << ','
      << to_decimal_string(t_coefficient(q, p)) << '\n';
  emit(o.out, s.str());
  return 0;
}

// ---- toeplitz-eig, weyl, counting ----------------------------------------------

struct ScalarOpts {
  std::string b = "2", m = "0";
  int level = 0;
  int K = 20;
  std::string disk_r, height = "1", profile, quad_rel;
  unsigned bits = 256;
  std::string out;
  // weyl
  int k_lo = 1, k_hi = 0;  // k_hi 0 resolves to K
  // counting
  double lnl_lo = 50, lnl_hi = 130;
  int points = 17;
  std::string c_minus, c_plus, slack = "0";
};

json scalar_cfg(const char* command, const ScalarOpts& o,
                const MagneticParams& p, const Profile& v) {
  json cfg{{"command", command},
           {"bits", o.bits},
           {"b", to_decimal_string(p.b)},
           {"m", to_decimal_string(p.m)},
           {"level", o.level},
           {"K", o.K},
           {"potential", profile_to_json(v)},
           {"quad_rel", quad_echo(o.quad_rel)},
           {"out", o.out}};
  return cfg;
}

Spectrum scalar_spectrum(const ScalarOpts& o, const MagneticParams& p,
                         const Profile& v) {
  if (o.level < 0) throw ConfigError("--level must be >= 0");
  if (o.K < 0) throw ConfigError("--K must be >= 0");
  HermitianMatrix H =
      assemble_landau_toeplitz(o.level, v, o.K, p, resolve_quad(o.quad_rel));
  return hermitian_eigenvalues(H);
}

int cmd_toeplitz_eig(const ScalarOpts& o, Ctx& ctx) {
  ctx.out_path = o.out;
  PrecisionGuard guard(o.bits);
  MagneticParams p{parse_real_flag(o.b, "--b"), parse_real_flag(o.m, "--m")};
  p.validate();
  Profile v = resolve_scalar_profile(o.disk_r, o.height, o.profile);
  ctx.cfg = scalar_cfg("toeplitz-eig", o, p, v);

  Spectrum sp = scalar_spectrum(o, p, v);
  std::ostringstream s;
  s << csv_header("toeplitz-eig", ctx.cfg);
  s << "# provenance=" << sp.provenance << '\n';
  s << "# precision_bits_used=" << sp.precision_bits_used << '\n';
  s << "# zero_cutoff=" << to_decimal_string(sp.zero_cutoff) << '\n';
  s << "k,value\n";
  for (size_t k = 0; k < sp.values.size(); ++k)
    s << k << ',' << to_decimal_string(sp.values[k]) << '\n';
  emit(o.out, s.str());
  return 0;
}

int cmd_weyl(const ScalarOpts& o, Ctx& ctx) {
  ctx.out_path = o.out;
  PrecisionGuard guard(o.bits);
  MagneticParams p{parse_real_flag(o.b, "--b"), parse_real_flag(o.m, "--m")};
  p.validate();
  Profile v = resolve_scalar_profile(o.disk_r, o.height, o.profile);
  const int k_hi = o.k_hi == 0 ? o.K : o.k_hi;
  ctx.cfg = scalar_cfg("weyl", o, p, v);
  ctx.cfg["k_lo"] = o.k_lo;
  ctx.cfg["k_hi"] = k_hi;

  Spectrum sp = scalar_spectrum(o, p, v);
  WeylSequence ws = weyl_sequence(sp, o.k_lo, k_hi);
  LimitFit fit = limit_fit(ws);

  std::ostringstream s;
  s << csv_header("weyl", ctx.cfg);
  s << "# ln_slope=" << to_decimal_string(fit.ln_slope) << '\n';
  s << "# exp_ln_slope=" << to_decimal_string(exp(fit.ln_slope)) << '\n';
  s << "# liminf_est=" << to_decimal_string(fit.liminf_est) << '\n';
  s << "# limsup_est=" << to_decimal_string(fit.limsup_est) << '\n';
  s << "# max_abs_residual=" << to_decimal_string(fit.max_abs_residual) << '\n';
  s << "# points=" << fit.points << '\n';
  s << "k,log_knu,s\n";
  for (size_t i = 0; i < ws.log_knu.size(); ++i)
    s << (ws.k_lo + static_cast<int>(i)) << ','
      << to_decimal_string(ws.log_knu[i]) << ',' << to_decimal_string(ws.s[i])
      << '\n';
  emit(o.out, s.str());
  return 0;
}

int cmd_counting(const ScalarOpts& o, Ctx& ctx) {
  ctx.out_path = o.out;
  PrecisionGuard guard(o.bits);
  MagneticParams p{parse_real_flag(o.b, "--b"), parse_real_flag(o.m, "--m")};
  p.validate();
  Profile v = resolve_scalar_profile(o.disk_r, o.height, o.profile);
  if (o.c_minus.empty() || o.c_plus.empty())
    throw ConfigError("--c-minus and --c-plus are required");
  Real c_minus = parse_real_flag(o.c_minus, "--c-minus");
  Real c_plus = parse_real_flag(o.c_plus, "--c-plus");
  Real slack = parse_real_flag(o.slack, "--slack");
  if (c_minus > c_plus) throw ConfigError("--c-minus must not exceed --c-plus");
  if (slack < 0) throw ConfigError("--slack must be >= 0");
  if (o.points < 1) throw ConfigError("--points must be >= 1");

  ctx.cfg = scalar_cfg("counting", o, p, v);
  ctx.cfg["lnl_lo"] = o.lnl_lo;
  ctx.cfg["lnl_hi"] = o.lnl_hi;
  ctx.cfg["points"] = o.points;
  ctx.cfg["c_minus"] = to_decimal_string(c_minus);
  ctx.cfg["c_plus"] = to_decimal_string(c_plus);
  ctx.cfg["slack"] = to_decimal_string(slack);

  Spectrum sp = scalar_spectrum(o, p, v);
  std::vector<Real> grid = log_lambda_grid(o.lnl_lo, o.lnl_hi, o.points);
  SandwichReport rep = sandwich_report(sp, c_minus, c_plus, grid, slack);

  std::ostringstream s;
  s << csv_header("counting", ctx.cfg);
  s << "# c_minus=" << to_decimal_string(rep.c_minus) << '\n';
  s << "# c_plus=" << to_decimal_string(rep.c_plus) << '\n';
  s << "# slack=" << to_decimal_string(rep.slack) << '\n';
  s << "# applicable=" << (rep.applicable ? "true" : "false") << '\n';
  s << "# all_within=" << (rep.all_within ? "true" : "false") << '\n';
  s << "abs_ln_lambda,lambda,n_plus,residual,within\n";
  for (const SandwichRow& row : rep.rows)
    s << to_decimal_string(-log(row.lambda)) << ','
      << to_decimal_string(row.lambda) << ',' << row.n_plus << ','
      << to_decimal_string(row.residual) << ','
      << (row.within ? "true" : "false") << '\n';
  emit(o.out, s.str());
  return 0;
}

// ---- capacity -------------------------------------------------------------------

struct CapacityOpts {
  std::string region;
  int nmax = 40;
  int boundary_target = 4096;
  int max_sweeps = 60;
  int refine_rounds = 2;
  std::string out;
};

int cmd_capacity(const CapacityOpts& o, Ctx& ctx) {
  ctx.out_path = o.out;
  if (o.region.empty()) throw ConfigError("--region is required");
  Region e = parse_region_json(o.region);
  if (o.nmax < 2) throw ConfigError("--nmax must be >= 2");
  if (o.boundary_target < 8) throw ConfigError("--boundary-target must be >= 8");
  if (o.max_sweeps < 1) throw ConfigError("--sweeps must be >= 1");
  if (o.refine_rounds < 0) throw ConfigError("--refine must be >= 0");
  CapacityControl ctl{o.boundary_target, o.max_sweeps, o.refine_rounds};

  ctx.cfg = json{{"command", "capacity"},
                 {"region", region_to_json(e)},
                 {"nmax", o.nmax},
                 {"boundary_target", o.boundary_target},
                 {"max_sweeps", o.max_sweeps},
                 {"refine_rounds", o.refine_rounds},
                 {"out", o.out}};

  CapacityEstimate est = capacity_estimate(e, o.nmax, ctl);
  json j;
  j["command"] = "capacity";
  j["version"] = kToolkitVersion;
  j["config"] = ctx.cfg;
  j["lower_seq"] = est.lower_seq;
  j["upper_seq"] = est.upper_seq;
  j["extrapolated"] = est.extrapolated;
  j["n_max"] = est.n_max;
  j["converged"] = est.converged;
  emit(o.out, json_artifact(j));
  return 0;
}

// ---- dirac ---------------------------------------------------------------------

struct DiracOpts {
  std::string mode;
  std::string b = "2", m = "0";
  int K = 20, N = 2, q = 0;
  std::string window = "0", margin = "0", eps = "0.1";
  int grid_points = 8;
  std::string v1, v2;
  int branch = 1;
  std::vector<int> K_list;
  std::string probe = "0", delta, quad_rel;
  unsigned bits = 256;
  std::string out;
};

PotentialSpec resolve_dirac_potential(const DiracOpts& o) {
  PotentialSpec V;
  if (!o.v1.empty()) V.v1 = parse_profile_json(o.v1);
  if (!o.v2.empty()) V.v2 = parse_profile_json(o.v2);
  return V;
}

json dirac_cfg(const DiracOpts& o, const MagneticParams& p) {
  return json{{"command", "dirac"},
              {"mode", o.mode},
              {"bits", o.bits},
              {"b", to_decimal_string(p.b)},
              {"m", to_decimal_string(p.m)},
              {"K", o.K},
              {"N", o.N},
              {"quad_rel", quad_echo(o.quad_rel)},
              {"out", o.out}};
}

int cmd_dirac(const DiracOpts& o, Ctx& ctx) {
  ctx.out_path = o.out;
  PrecisionGuard guard(o.bits);
  MagneticParams p{parse_real_flag(o.b, "--b"), parse_real_flag(o.m, "--m")};
  p.validate();
  TruncationSpec t{o.K, o.N};
  t.validate();
  QuadControl qc = resolve_quad(o.quad_rel);

  json j;
  j["command"] = "dirac";
  j["version"] = kToolkitVersion;

  if (o.mode == "window") {
    if (o.q < -o.N || o.q > o.N)
      throw ConfigError("--q must satisfy |q| <= N for the chosen truncation");
    PotentialSpec V = resolve_dirac_potential(o);
    Real window = parse_real_flag(o.window, "--window");
    if (window.is_zero()) window = default_window(o.q, p);
    Real margin = parse_real_flag(o.margin, "--margin");

    ctx.cfg = dirac_cfg(o, p);
    ctx.cfg["q"] = o.q;
    ctx.cfg["window"] = to_decimal_string(window);
    ctx.cfg["margin"] = to_decimal_string(margin);
    ctx.cfg["v1"] = profile_to_json(V.v1);
    ctx.cfg["v2"] = profile_to_json(V.v2);

    HermitianMatrix H = assemble_perturbed_dirac(p, V, t, qc);
    Spectrum sp = dirac_spectrum(H, t);
    LevelWindow w = eigen_near_level(sp, o.q, window, p, margin);

    j["config"] = ctx.cfg;
    j["q"] = w.q;
    j["mu"] = to_decimal_string(w.mu);
    j["window"] = to_decimal_string(w.window);
    j["cluster_margin"] = to_decimal_string(w.cluster_margin);
    j["cluster_size"] = w.cluster_size;
    json above = json::array(), below = json::array();
    for (const Real& v : w.above) above.push_back(to_decimal_string(v));
    for (const Real& v : w.below) below.push_back(to_decimal_string(v));
    j["above"] = std::move(above);
    j["below"] = std::move(below);
    emit(o.out, json_artifact(j));
    return 0;
  }

  if (o.mode == "sandwich") {
    if (o.q < -o.N || o.q > o.N)
      throw ConfigError("--q must satisfy |q| <= N for the chosen truncation");
    if (o.grid_points < 1) throw ConfigError("--grid-points must be >= 1");
    PotentialSpec V = resolve_dirac_potential(o);
    Real eps = parse_real_flag(o.eps, "--eps");
    Real window = default_window(o.q, p);
    std::vector<Real> grid;
    for (int i = 1; i <= o.grid_points; ++i)
      grid.push_back(window * i / (o.grid_points + 1));

    ctx.cfg = dirac_cfg(o, p);
    ctx.cfg["q"] = o.q;
    ctx.cfg["eps"] = to_decimal_string(eps);
    ctx.cfg["grid_points"] = o.grid_points;
    ctx.cfg["v1"] = profile_to_json(V.v1);
    ctx.cfg["v2"] = profile_to_json(V.v2);

    DiagSandwichReport rep = verify_diag_sandwich(V, o.q, eps, grid, t, p, qc);

    j["config"] = ctx.cfg;
    j["q"] = rep.q;
    j["eps"] = to_decimal_string(rep.eps);
    j["window"] = to_decimal_string(rep.window);
    j["cluster_margin"] = to_decimal_string(rep.cluster_margin);
    j["K"] = rep.K;
    j["K_check"] = rep.K_check;
    json rows = json::array();
    for (const SandwichCounts& r : rep.rows) {
      json row;
      row["lambda"] = to_decimal_string(r.lambda);
      row["n_plus"] = r.n_plus;
      row["n_minus"] = r.n_minus;
      row["n_plus_check"] = r.n_plus_check;
      row["n_minus_check"] = r.n_minus_check;
      row["t_plus_lo"] = r.t_plus_lo;
      row["t_plus_hi"] = r.t_plus_hi;
      row["t_minus_lo"] = r.t_minus_lo;
      row["t_minus_hi"] = r.t_minus_hi;
      row["d_plus_lo"] = r.d_plus_lo;
      row["d_plus_hi"] = r.d_plus_hi;
      row["d_minus_lo"] = r.d_minus_lo;
      row["d_minus_hi"] = r.d_minus_hi;
      row["stable"] = r.stable;
      rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    j["max_abs_defect"] = rep.max_abs_defect;
    j["counts_stable"] = rep.counts_stable;
    emit(o.out, json_artifact(j));
    return 0;
  }

  if (o.mode == "accumulate") {
    if (!o.v1.empty() || !o.v2.empty())
      throw ConfigError(
          "accumulate builds both diagonal components from the mollifier; "
          "--v1/--v2 are not accepted");
    std::optional<Real> delta_override;
    if (!o.delta.empty())
      delta_override = parse_real_flag(o.delta, "--delta");
    Real eps = parse_real_flag(o.eps, "--eps");
    Real window = parse_real_flag(o.window, "--window");
    Real probe = parse_real_flag(o.probe, "--probe");

    BumpReport bump = appendix_bump(0, delta_override);
    AccumulationReport rep = accumulation_experiment(bump.bump, o.branch, eps, t, p,
                                            o.K_list, window, probe, qc);

    ctx.cfg = dirac_cfg(o, p);
    ctx.cfg["branch"] = o.branch;
    ctx.cfg["eps"] = to_decimal_string(rep.eps);
    ctx.cfg["K_list"] = o.K_list;
    ctx.cfg["window"] = to_decimal_string(rep.window);
    ctx.cfg["probe"] = to_decimal_string(rep.probe);
    ctx.cfg["delta"] = to_decimal_string(bump.delta);

    j["config"] = ctx.cfg;
    j["branch"] = rep.branch;
    j["eps"] = to_decimal_string(rep.eps);
    j["window"] = to_decimal_string(rep.window);
    j["probe"] = to_decimal_string(rep.probe);
    j["N"] = rep.N;
    j["v2_descriptor"] = rep.v2_descriptor;
    json rows = json::array();
    for (const AccumulationRow& r : rep.rows) {
      json row;
      row["K"] = r.K;
      row["mu0_count"] = r.mu0_count;
      row["mu0_cluster"] = r.mu0_cluster;
      row["mu1_count"] = r.mu1_count;
      row["mu1_below"] = r.mu1_below;
      row["mu1_probe_above"] = r.mu1_probe_above;
      row["mu1_probe_below"] = r.mu1_probe_below;
      row["mu1_cluster"] = r.mu1_cluster;
      rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    j["mu0_strictly_increasing"] = rep.mu0_strictly_increasing;
    j["mu1_count_max"] = rep.mu1_count_max;
    j["mu1_probe_spread"] = rep.mu1_probe_spread;
    emit(o.out, json_artifact(j));
    return 0;
  }

  throw ConfigError("--mode must be window, sandwich, or accumulate");
}

// ---- index ---------------------------------------------------------------------

struct IndexOpts {
  int trials = 200;
  int dim_max = 40;
  unsigned long long seed = 1;
  std::string out;
};

IndexMatrix random_index_hermitian(int d, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, scale);
  IndexMatrix A = IndexMatrix::zero(d);
  for (int i = 0; i < d; ++i) {
    A.set(i, i, {nd(rng), 0.0});
    for (int j = i + 1; j < d; ++j) {
      std::complex<double> v{nd(rng), nd(rng)};
      A.set(i, j, v);
      A.set(j, i, std::conj(v));
    }
  }
  return A;
}

// M + s * W W^H for a d x r gaussian W; exact hermiticity by mirroring.
IndexMatrix with_semidefinite_bump(const IndexMatrix& M, int r, int s,
                                   std::mt19937_64& rng) {
  const int d = M.dim;
  std::normal_distribution<double> nd(0.0, 0.5);
  std::vector<std::complex<double>> W(static_cast<size_t>(d) * r);
  for (auto& w : W) w = {nd(rng), nd(rng)};
  IndexMatrix out = M;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      std::complex<double> acc{0.0, 0.0};
      for (int k = 0; k < r; ++k)
        acc += W[static_cast<size_t>(i) * r + k] *
               std::conj(W[static_cast<size_t>(j) * r + k]);
      acc *= static_cast<double>(s);
      out.set(i, j, out.at(i, j) + acc);
      if (j > i) out.set(j, i, std::conj(out.at(i, j)));
    }
  return out;
}

std::vector<double> gap_midpoints(std::vector<double> pooled) {
  std::sort(pooled.begin(), pooled.end());
  double scale = 1.0;
  for (double v : pooled) scale = std::max(scale, std::abs(v));
  std::vector<double> mids;
  for (size_t i = 0; i + 1 < pooled.size(); ++i)
    if (pooled[i + 1] - pooled[i] > 1e-3 * scale)
      mids.push_back(0.5 * (pooled[i] + pooled[i + 1]));
  return mids;
}

size_t pick_index(std::mt19937_64& rng, size_t n) {
  return std::uniform_int_distribution<size_t>(0, n - 1)(rng);
}

struct SuiteResult {
  std::string name;
  int trials = 0;
  int failures = 0;
  int first_failure = -1;
};

void record(SuiteResult& sr, int trial, bool pass) {
  ++sr.trials;
  if (!pass) {
    ++sr.failures;
    if (sr.first_failure < 0) sr.first_failure = trial;
  }
}

int cmd_index(const IndexOpts& o, Ctx& ctx) {
  ctx.out_path = o.out;
  if (o.trials < 1) throw ConfigError("--trials must be >= 1");
  if (o.dim_max < 2) throw ConfigError("--dim-max must be >= 2");

  ctx.cfg = json{{"command", "index"},
                 {"trials", o.trials},
                 {"dim_max", o.dim_max},
                 {"seed", o.seed},
                 {"out", o.out}};

  auto dim_of = [&](std::mt19937_64& rng) {
    return std::uniform_int_distribution<int>(2, o.dim_max)(rng);
  };

  std::vector<SuiteResult> suites;

  // Interval counting identity: Xi at the two endpoints against the
  // eigenvalue counts of A and A + M inside (lambda1, lambda2].
  {
    SuiteResult sr{"interval_counts"};
    std::mt19937_64 rng(o.seed * 0x9E3779B97F4A7C15ULL + 1);
    for (int trial = 0; trial < o.trials; ++trial) {
      bool pass = false;
      for (int attempt = 0; attempt < 5; ++attempt) {
        int d = dim_of(rng);
        IndexMatrix A = random_index_hermitian(d, 1.0, rng);
        IndexMatrix M = random_index_hermitian(d, 0.5, rng);
        std::vector<double> pooled = hermitian_spectrum(A);
        std::vector<double> sb = hermitian_spectrum(A.plus(M));
        pooled.insert(pooled.end(), sb.begin(), sb.end());
        std::vector<double> mids = gap_midpoints(std::move(pooled));
        if (mids.size() < 2) continue;
        size_t i = pick_index(rng, mids.size());
        size_t k = pick_index(rng, mids.size() - 1);
        if (k >= i) ++k;
        double l1 = std::min(mids[i], mids[k]);
        double l2 = std::max(mids[i], mids[k]);
        pass = verify_interval_counts(A, M, l1, l2).holds;
        break;
      }
      record(sr, trial, pass);
    }
    suites.push_back(sr);
  }

  // Rank bounds: -rank(M_-) <= Xi <= rank(M_+), with semidefinite M every
  // fourth trial to hit the saturating cases.
  {
    SuiteResult sr{"rank_bounds"};
    std::mt19937_64 rng(o.seed * 0x9E3779B97F4A7C15ULL + 2);
    for (int trial = 0; trial < o.trials; ++trial) {
      bool pass = false;
      for (int attempt = 0; attempt < 5; ++attempt) {
        int d = dim_of(rng);
        IndexMatrix A = random_index_hermitian(d, 1.0, rng);
        IndexMatrix M = IndexMatrix::zero(d);
        if (trial % 4 == 3) {
          int r = 1 + trial % 3;
          int sign = (trial / 4) % 2 == 0 ? 1 : -1;
          M = with_semidefinite_bump(M, std::min(r, d), sign, rng);
        } else {
          M = random_index_hermitian(d, 0.5, rng);
        }
        std::vector<double> pooled = hermitian_spectrum(A);
        std::vector<double> sb = hermitian_spectrum(A.plus(M));
        pooled.insert(pooled.end(), sb.begin(), sb.end());
        std::vector<double> mids = gap_midpoints(std::move(pooled));
        if (mids.empty()) continue;
        double lambda = mids[pick_index(rng, mids.size())];
        pass = verify_rank_bounds(A, M, lambda).holds;
        break;
      }
      record(sr, trial, pass);
    }
    suites.push_back(sr);
  }

  // Monotone ordering plus additive chaining for M1 = M2 + (low rank PSD).
  {
    SuiteResult sr{"monotone_chain"};
    std::mt19937_64 rng(o.seed * 0x9E3779B97F4A7C15ULL + 3);
    for (int trial = 0; trial < o.trials; ++trial) {
      bool pass = false;
      for (int attempt = 0; attempt < 5; ++attempt) {
        int d = dim_of(rng);
        IndexMatrix A = random_index_hermitian(d, 1.0, rng);
        IndexMatrix M2 = random_index_hermitian(d, 0.5, rng);
        int r = 1 + trial % 3;
        IndexMatrix M1 = with_semidefinite_bump(M2, std::min(r, d), 1, rng);
        std::vector<double> pooled = hermitian_spectrum(A);
        for (const IndexMatrix& B : {A.plus(M1), A.plus(M2)}) {
          std::vector<double> sb = hermitian_spectrum(B);
          pooled.insert(pooled.end(), sb.begin(), sb.end());
        }
        std::vector<double> mids = gap_midpoints(std::move(pooled));
        if (mids.empty()) continue;
        double lambda = mids[pick_index(rng, mids.size())];
        pass = verify_monotonicity(A, M1, M2, lambda).holds;
        break;
      }
      record(sr, trial, pass);
    }
    suites.push_back(sr);
  }

  // Index(P, Q) = -Index(Q, P), Index(P, P) = 0, and agreement with the
  // spectral flow computed from the same pair.
  {
    SuiteResult sr{"pair_antisymmetry"};
    std::mt19937_64 rng(o.seed * 0x9E3779B97F4A7C15ULL + 4);
    for (int trial = 0; trial < o.trials; ++trial) {
      bool pass = false;
      for (int attempt = 0; attempt < 5; ++attempt) {
        int d = dim_of(rng);
        IndexMatrix A = random_index_hermitian(d, 1.0, rng);
        IndexMatrix M = random_index_hermitian(d, 0.5, rng);
        IndexMatrix B = A.plus(M);
        std::vector<double> pooled = hermitian_spectrum(A);
        std::vector<double> sb = hermitian_spectrum(B);
        pooled.insert(pooled.end(), sb.begin(), sb.end());
        std::vector<double> mids = gap_midpoints(std::move(pooled));
        if (mids.empty()) continue;
        double lambda = mids[pick_index(rng, mids.size())];
        IndexMatrix P = spectral_projector_below(A, lambda);
        IndexMatrix Q = spectral_projector_below(B, lambda);
        ProjectionPair fwd{P, Q};
        fwd.validate();
        int forward = index_pair(fwd);
        int backward = index_pair(ProjectionPair{Q, P});
        int self_index = index_pair(ProjectionPair{P, P});
        int flow = xi(lambda, A, M);
        pass = forward == -backward && self_index == 0 && forward == flow;
        break;
      }
      record(sr, trial, pass);
    }
    suites.push_back(sr);
  }

  int total_failures = 0;
  json suites_json = json::array();
  for (const SuiteResult& sr : suites) {
    total_failures += sr.failures;
    suites_json.push_back(json{{"name", sr.name},
                               {"trials", sr.trials},
                               {"failures", sr.failures},
                               {"first_failure", sr.first_failure}});
  }

  json j;
  j["command"] = "index";
  j["version"] = kToolkitVersion;
  j["config"] = ctx.cfg;
  j["suites"] = std::move(suites_json);
  j["total_failures"] = total_failures;
  j["all_passed"] = total_failures == 0;
  emit(o.out, json_artifact(j));
  if (total_failures > 0) {
    std::fprintf(stderr, "ldtool: %d trial(s) failed across the index suites\n",
                 total_failures);
    return 4;
  }
  return 0;
}

// ---- bump ----------------------------------------------------------------------

struct BumpOpts {
  int grid = 512;
  std::string delta;
  unsigned bits = 256;
  std::string out;
};

int cmd_bump(const BumpOpts& o, Ctx& ctx) {
  ctx.out_path = o.out;
  PrecisionGuard guard(o.bits);
  if (o.grid < 2 || o.grid % 2 != 0)
    throw ConfigError("--grid must be even and >= 2 (the scan walks one "
                      "quadrant of a centered grid)");
  std::optional<Real> delta_override;
  if (!o.delta.empty()) delta_override = parse_real_flag(o.delta, "--delta");

  ctx.cfg = json{{"command", "bump"},
                 {"bits", o.bits},
                 {"grid", o.grid},
                 {"delta_override", o.delta.empty() ? json() : json(o.delta)},
                 {"out", o.out}};

  BumpReport rep = appendix_bump(0, delta_override);
  Real margin = rep.g_at_eta / 2;
  Real lhs_second = rep.delta * rep.delta * rep.sup_second;
  Real lhs_slope = rep.delta * rep.sup_slope_over_r;

  // Cell centers of an even grid x grid lattice over the centered support
  // square are symmetric under both axis flips, so one quadrant carries the
  // full set of radii.
  const double S = rep.bump.support_radius.convert_to<double>();
  const int half = o.grid / 2;
  const auto& lap = rep.bump.laplacians.at(0);
  Real min_value(0), min_sum(0);
  bool first = true;
  for (int iy = 0; iy < half; ++iy) {
    const double y = (iy + 0.5) * S / half;
    for (int ix = 0; ix < half; ++ix) {
      const double x = (ix + 0.5) * S / half;
      Real r(std::sqrt(x * x + y * y));
      Real g = rep.bump.eval(r);
      Real sum = g + lap(r);
      if (first || g < min_value) min_value = g;
      if (first || sum < min_sum) min_sum = sum;
      first = false;
    }
  }

  json j;
  j["command"] = "bump";
  j["version"] = kToolkitVersion;
  j["config"] = ctx.cfg;
  j["delta"] = to_decimal_string(rep.delta);
  j["eta"] = to_decimal_string(rep.eta);
  j["g_at_eta"] = to_decimal_string(rep.g_at_eta);
  j["sup_second"] = to_decimal_string(rep.sup_second);
  j["sup_slope_over_r"] = to_decimal_string(rep.sup_slope_over_r);
  j["descriptor"] = rep.bump.descriptor;
  j["inequality_second"] = json{{"lhs", to_decimal_string(lhs_second)},
                                {"rhs", to_decimal_string(margin)},
                                {"holds", lhs_second < margin}};
  j["inequality_slope"] = json{{"lhs", to_decimal_string(lhs_slope)},
                               {"rhs", to_decimal_string(margin)},
                               {"holds", lhs_slope < margin}};
  j["grid"] = json{{"resolution", o.grid},
                   {"support_radius", to_decimal_string(rep.bump.support_radius)},
                   {"min_value", to_decimal_string(min_value)},
                   {"min_value_plus_laplacian", to_decimal_string(min_sum)}};
  emit(o.out, json_artifact(j));
  return 0;
}

// ---- encircle ------------------------------------------------------------------

struct EncircleOpts {
  std::string omega, k;
  int resolution = 512;
  std::string raster;
  std::string out;
};

void write_raster(const std::string& path, const Region& omega,
                  const Region& k, int resolution) {
  Box bo = region_bbox(omega);
  Box bk = region_bbox(k);
  double x0 = std::min(bo.x0, bk.x0), y0 = std::min(bo.y0, bk.y0);
  double x1 = std::max(bo.x1, bk.x1), y1 = std::max(bo.y1, bk.y1);
  const double pad = 0.05 * std::max(x1 - x0, y1 - y0);
  x0 -= pad;
  y0 -= pad;
  x1 += pad;
  y1 += pad;
  std::string out;
  out.reserve(static_cast<size_t>(resolution + 1) * resolution);
  for (int row = 0; row < resolution; ++row) {
    const double y = y1 - (row + 0.5) * (y1 - y0) / resolution;
    for (int col = 0; col < resolution; ++col) {
      const double x = x0 + (col + 0.5) * (x1 - x0) / resolution;
      char c = '.';
      if (region_contains(k, x, y))
        c = 'K';
      else if (region_contains(omega, x, y))
        c = 'O';
      out.push_back(c);
    }
    out.push_back('\n');
  }
  emit(path, out);
}

int cmd_encircle(const EncircleOpts& o, Ctx& ctx) {
  ctx.out_path = o.out;
  if (o.omega.empty()) throw ConfigError("--omega is required");
  if (o.k.empty()) throw ConfigError("--k is required");
  Region omega = parse_region_json(o.omega);
  Region k = parse_region_json(o.k);
  if (o.resolution < 8) throw ConfigError("--resolution must be >= 8");

  ctx.cfg = json{{"command", "encircle"},
                 {"omega", region_to_json(omega)},
                 {"k", region_to_json(k)},
                 {"resolution", o.resolution},
                 {"raster", o.raster},
                 {"out", o.out}};

  Encircle decision = encircles(omega, k, o.resolution);
  if (!o.raster.empty()) write_raster(o.raster, omega, k, o.resolution);

  json j;
  j["command"] = "encircle";
  j["version"] = kToolkitVersion;
  j["config"] = ctx.cfg;
  j["decision"] = to_string(decision);
  emit(o.out, json_artifact(j));
  return 0;
}

// ---- config file preload ---------------------------------------------------------

const char* const kCommands[] = {"levels", "toeplitz-eig", "capacity",
                                 "weyl",   "counting",     "dirac",
                                 "index",  "bump",         "encircle"};

bool is_command_token(const std::string& s) {
  for (const char* c : kCommands)
    if (s == c) return true;
  return false;
}

// Rewrites args in place: loads --config FILE, prepends its "command" when the
// line has none, and appends one flag per remaining key unless that flag is
// already present.  Flags on the line always win.
void apply_config_file(std::vector<std::string>& args) {
  std::string file;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size())
        throw ConfigError("--config needs a file path");
      file = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (file.empty()) return;

  std::ifstream f(file);
  if (!f) throw ConfigError("cannot read config file: " + file);
  std::stringstream buf;
  buf << f.rdbuf();
  json j = parse_json_text(buf.str(), "config file");
  if (!j.is_object()) throw ConfigError("config file: an object is required");

  bool have_command = false;
  for (const std::string& a : args)
    if (is_command_token(a)) have_command = true;
  if (!have_command && j.contains("command")) {
    const std::string cmd = j.at("command").get<std::string>();
    if (!is_command_token(cmd))
      throw ConfigError("config file: unknown command \"" + cmd + "\"");
    args.insert(args.begin(), cmd);
  }

  auto flag_present = [&args](const std::string& flag) {
    for (const std::string& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };

  for (const auto& [key, value] : j.items()) {
    if (key == "command") continue;
    const std::string flag = "--" + key;
    if (flag_present(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
      continue;
    }
    args.push_back(flag);
    if (value.is_string()) {
      args.push_back(value.get<std::string>());
    } else if (value.is_array()) {
      std::string joined;
      for (const json& v : value) {
        if (!joined.empty()) joined += ',';
        joined += v.is_string() ? v.get<std::string>() : v.dump();
      }
      args.push_back(joined);
    } else {
      args.push_back(value.dump());
    }
  }
}

}  // namespace

// ---- public parse helpers ---------------------------------------------------------

Region parse_region_json(const std::string& text) {
  Region e = json_to_region(parse_json_text(text, "region"), "region");
  e.validate();
  return e;
}

Profile parse_profile_json(const std::string& text) {
  return json_to_profile(parse_json_text(text, "profile"), "profile");
}

PotentialSpec parse_potential_json(const std::string& text) {
  json j = parse_json_text(text, "potential");
  if (!j.is_object()) throw ConfigError("potential: an object is required");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "v1" && key != "v2" && key != "w")
      throw ConfigError("potential: unknown field \"" + key + "\"");
  }
  PotentialSpec V;
  if (j.contains("v1") && !j.at("v1").is_null())
    V.v1 = json_to_profile(j.at("v1"), "potential.v1");
  if (j.contains("v2") && !j.at("v2").is_null())
    V.v2 = json_to_profile(j.at("v2"), "potential.v2");
  if (j.contains("w") && !j.at("w").is_null())
    throw ConfigError(
        "potential: w must be null here; anti-diagonal fields are built "
        "programmatically");
  return V;
}

// ---- dispatch ---------------------------------------------------------------------

int run(const std::vector<std::string>& args) {
  Ctx ctx;
  try {
    std::vector<std::string> expanded = args;
    apply_config_file(expanded);

    CLI::App app{"Spectral toolkit for truncated Landau and spinor operators"};
    app.set_version_flag("--version", kToolkitVersion);
    app.require_subcommand(1);
    const unsigned default_bits = env_default_bits();

    LevelsOpts lv;
    lv.bits = default_bits;
    CLI::App* levels = app.add_subcommand(
        "levels", "Relativistic Landau levels and spectral weights as CSV");
    levels->add_option("--b", lv.b, "Field amplitude");
    levels->add_option("--m", lv.m, "Mass");
    levels->add_option("--qmax", lv.qmax, "Largest |q| listed");
    levels->add_option("--bits", lv.bits, "Working precision in bits");
    levels->add_option("--out", lv.out, "Output path (default stdout)");

    auto add_scalar_flags = [&default_bits](CLI::App* sub, ScalarOpts& so) {
      so.bits = default_bits;
      sub->add_option("--b", so.b, "Field amplitude");
      sub->add_option("--m", so.m, "Mass");
      sub->add_option("--level", so.level, "Landau level index n >= 0");
      sub->add_option("--K", so.K, "Basis cutoff: seeds k <= K");
      sub->add_option("--disk", so.disk_r, "Disk potential radius");
      sub->add_option("--height", so.height, "Disk potential height");
      sub->add_option("--profile", so.profile, "Potential profile JSON");
      sub->add_option("--quad-rel", so.quad_rel,
                      "Relative quadrature tolerance (default: derived)");
      sub->add_option("--bits", so.bits, "Working precision in bits");
      sub->add_option("--out", so.out, "Output path (default stdout)");
    };

    ScalarOpts te;
    CLI::App* toeplitz = app.add_subcommand(
        "toeplitz-eig", "Eigenvalues of one truncated Toeplitz matrix as CSV");
    add_scalar_flags(toeplitz, te);

    ScalarOpts wy;
    CLI::App* weyl = app.add_subcommand(
        "weyl", "Factorial-compensated root sequence and its limit fit");
    add_scalar_flags(weyl, wy);
    weyl->add_option("--k-lo", wy.k_lo, "First index of the sequence");
    weyl->add_option("--k-hi", wy.k_hi, "Last index (default: K)");

    ScalarOpts co;
    CLI::App* counting = app.add_subcommand(
        "counting", "Counting-function residuals on a log-lambda grid");
    add_scalar_flags(counting, co);
    counting->add_option("--lnl-lo", co.lnl_lo, "Smallest |ln lambda|");
    counting->add_option("--lnl-hi", co.lnl_hi, "Largest |ln lambda|");
    counting->add_option("--points", co.points, "Grid size");
    counting->add_option("--c-minus", co.c_minus, "Lower residual constant");
    counting->add_option("--c-plus", co.c_plus, "Upper residual constant");
    counting->add_option("--slack", co.slack, "Band slack");

    CapacityOpts ca;
    CLI::App* capacity = app.add_subcommand(
        "capacity", "Logarithmic capacity of a planar region as JSON");
    capacity->add_option("--region", ca.region, "Region JSON");
    capacity->add_option("--nmax", ca.nmax, "Largest point count");
    capacity->add_option("--boundary-target", ca.boundary_target,
                         "Boundary discretization size");
    capacity->add_option("--sweeps", ca.max_sweeps, "Ascent sweeps per n");
    capacity->add_option("--refine", ca.refine_rounds,
                         "Continuous polish rounds");
    capacity->add_option("--out", ca.out, "Output path (default stdout)");

    DiracOpts di;
    di.bits = default_bits;
    CLI::App* dirac = app.add_subcommand(
        "dirac", "Spinor truncation reports: window, sandwich, accumulate");
    dirac->add_option("--mode", di.mode, "window | sandwich | accumulate")
        ->required();
    dirac->add_option("--b", di.b, "Field amplitude");
    dirac->add_option("--m", di.m, "Mass");
    dirac->add_option("--K", di.K, "Seed cutoff");
    dirac->add_option("--N", di.N, "Level cutoff");
    dirac->add_option("--q", di.q, "Level index");
    dirac->add_option("--window", di.window, "Window half-width (0: derived)");
    dirac->add_option("--margin", di.margin, "Cluster margin (0: derived)");
    dirac->add_option("--eps", di.eps, "Bracket epsilon");
    dirac->add_option("--grid-points", di.grid_points,
                      "Lambda grid size for sandwich mode");
    dirac->add_option("--v1", di.v1, "Upper diagonal profile JSON");
    dirac->add_option("--v2", di.v2, "Lower diagonal profile JSON");
    dirac->add_option("--branch", di.branch,
                      "1 suppressing second component, 2 cancelling");
    dirac->add_option("--K-list", di.K_list, "Truncations for accumulate mode")
        ->delimiter(',');
    dirac->add_option("--probe", di.probe,
                      "Fixed probe distance (0: window / 4)");
    dirac->add_option("--delta", di.delta, "Mollifier delta override");
    dirac->add_option("--quad-rel", di.quad_rel,
                      "Relative quadrature tolerance (default: derived)");
    dirac->add_option("--bits", di.bits, "Working precision in bits");
    dirac->add_option("--out", di.out, "Output path (default stdout)");

    IndexOpts ix;
    CLI::App* index = app.add_subcommand(
        "index", "Projection-pair index trial suites as JSON");
    index->add_option("--trials", ix.trials, "Trials per suite");
    index->add_option("--dim-max", ix.dim_max, "Largest matrix dimension");
    index->add_option("--seed", ix.seed, "Random seed");
    index->add_option("--out", ix.out, "Output path (default stdout)");

    BumpOpts bu;
    bu.bits = default_bits;
    CLI::App* bump = app.add_subcommand(
        "bump", "Mollifier certificate: smallness inequalities and grid scan");
    bump->add_option("--grid", bu.grid, "Scan resolution per axis (even)");
    bump->add_option("--delta", bu.delta, "Delta override");
    bump->add_option("--bits", bu.bits, "Working precision in bits");
    bump->add_option("--out", bu.out, "Output path (default stdout)");

    EncircleOpts en;
    CLI::App* encircle = app.add_subcommand(
        "encircle", "Does the open region encircle the compact one?");
    encircle->add_option("--omega", en.omega, "Open region JSON");
    encircle->add_option("--k", en.k, "Compact region JSON");
    encircle->add_option("--resolution", en.resolution, "Raster resolution");
    encircle->add_option("--raster", en.raster,
                         "Optional raster dump file path");
    encircle->add_option("--out", en.out, "Output path (default stdout)");

    try {
      std::vector<const char*> argv;
      argv.push_back("ldtool");
      for (const std::string& a : expanded) argv.push_back(a.c_str());
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e);
      return rc == 0 ? 0 : 2;
    }

    if (levels->parsed()) return cmd_levels(lv, ctx);
    if (toeplitz->parsed()) return cmd_toeplitz_eig(te, ctx);
    if (weyl->parsed()) return cmd_weyl(wy, ctx);
    if (counting->parsed()) return cmd_counting(co, ctx);
    if (capacity->parsed()) return cmd_capacity(ca, ctx);
    if (dirac->parsed()) return cmd_dirac(di, ctx);
    if (index->parsed()) return cmd_index(ix, ctx);
    if (bump->parsed()) return cmd_bump(bu, ctx);
    if (encircle->parsed()) return cmd_encircle(en, ctx);
    throw ConfigError("no subcommand given");
  } catch (const ConfigError& e) {
    return fail(ctx, 2, "config", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(ctx, 2, "config", e.what());
  } catch (const NumericalFailure& e) {
    return fail(ctx, 3, "numerical", e.what());
  } catch (const RankFailure& e) {
    return fail(ctx, 3, "numerical", e.what());
  } catch (const HypothesisFailure& e) {
    return fail(ctx, 4, "hypothesis", e.what());
  } catch (const std::exception& e) {
    return fail(ctx, 3, "internal", e.what());
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace ldk
