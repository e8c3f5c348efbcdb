// Command-line driver: model configuration, parameter sweeps, CSV/JSON
// emission for phase diagrams and spectral densities, and a self-check
// suite. Output is deterministic: floats carry 17 significant digits, rows
// are ordered by parameter index.

#include <CLI11.hpp>
#include <json.hpp>

#include <complex>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "loopmaps/critline.hpp"
#include "loopmaps/detail/format.hpp"
#include "loopmaps/gasket.hpp"
#include "loopmaps/mapcount.hpp"
#include "loopmaps/ringgen.hpp"
#include "loopmaps/selfcheck.hpp"
#include "loopmaps/twistline.hpp"

namespace {

using loopmaps::Rational;
using loopmaps::detail::fmt17;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) {
    if (s.find('.') != std::string::npos)
      return loopmaps::rat_from_double(std::stod(s));
    return Rational(loopmaps::BigInt(s));
  }
  loopmaps::BigInt num(s.substr(0, slash)), den(s.substr(slash + 1));
  return Rational(num, den);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  return os;
}

// Model flags shared by several commands.
struct ModelFlags {
  std::string family = "triangular";
  double h = 0, h1 = 0, h2 = 0, a = 1;

  loopmaps::ringgen::RingFamily rings() const {
    using loopmaps::rat_from_double;
    using loopmaps::ringgen::RingFamily;
    if (family == "triangular") return RingFamily::triangular(rat_from_double(h));
    if (family == "quadrangular")
      return RingFamily::quadrangular(rat_from_double(h1), rat_from_double(h2));
    if (family == "rigid") return RingFamily::rigid(rat_from_double(h1));
    if (family == "twisting") return RingFamily::twisting(rat_from_double(h2));
    if (family == "bending")
      return RingFamily::bending(rat_from_double(a), rat_from_double(h));
    throw CLI::ValidationError("--family", "unknown ring family: " + family);
  }
};

double resolve_n(double n, double b, bool twist_convention) {
  if (!std::isnan(n) && !std::isnan(b))
    throw CLI::ValidationError("--n/--b", "give exactly one of n and b");
  if (std::isnan(n) && std::isnan(b))
    throw CLI::ValidationError("--n/--b", "give exactly one of n and b");
  if (!std::isnan(n)) return n;
  return twist_convention ? std::cos(std::numbers::pi * b)
                          : 2 * std::cos(std::numbers::pi * b);
}

void write_json(const std::string& path, const json& j) {
  auto os = open_out(path);
  os << j.dump(2) << "\n";
}

int cmd_rings(const ModelFlags& mf, int kmax, const std::string& out) {
  auto fam = mf.rings();
  auto os = open_out(out);
  os << "k,kprime,value\n";
  auto a = loopmaps::ringgen::ring_matrix(fam, kmax, kmax);
  for (int k = 1; k <= kmax; ++k)
    for (int kp = 0; kp <= kmax; ++kp)
      os << k << "," << kp << ","
         << fmt17(a[static_cast<std::size_t>(k)][static_cast<std::size_t>(kp)]) << "\n";
  return kExitOk;
}

int cmd_enumerate(const std::vector<std::string>& weights, int pmax, int order,
                  const std::string& method, const std::string& out) {
  using loopmaps::mapcount::DiskMethod;
  using loopmaps::mapcount::FormalWeights;
  using loopmaps::qseries::TruncatedSeries;
  int dmax = 1;
  std::vector<std::pair<int, Rational>> parsed;
  for (const std::string& w : weights) {
    auto colon = w.find(':');
    if (colon == std::string::npos)
      throw CLI::ValidationError("--weight", "expected degree:coefficient");
    int k = std::stoi(w.substr(0, colon));
    if (k < 1) throw CLI::ValidationError("--weight", "degree must be >= 1");
    parsed.emplace_back(k, parse_rational(w.substr(colon + 1)));
    dmax = std::max(dmax, k);
  }
  std::vector<loopmaps::qseries::Axis> ax{{'t', order}};
  FormalWeights fw;
  for (int k = 1; k <= dmax; ++k) fw.g.emplace_back(TruncatedSeries(ax));
  for (auto& [k, c] : parsed)
    if (c != 0)
      fw.g[static_cast<std::size_t>(k - 1)] = c * TruncatedSeries::variable(ax, 't');
  DiskMethod m = method == "tutte" ? DiskMethod::tutte : DiskMethod::rs_integration;
  auto os = open_out(out);
  os << "p,order,coefficient_num,coefficient_den\n";
  for (int p = 0; p <= pmax; ++p) {
    TruncatedSeries f = loopmaps::mapcount::disk_series(fw, p, m);
    for (int j = 0; j <= order; ++j) {
      Rational c = f.coeff({j});
      os << p << "," << j << "," << numerator(c) << "," << denominator(c) << "\n";
    }
  }
  return kExitOk;
}

int cmd_fixed_point(const ModelFlags& mf, double n, double g3, double g4, int K,
                    double tol, const std::string& out) {
  std::vector<double> bare{0, 0, g3, g4};
  loopmaps::gasket::LoopModel model{n, loopmaps::mapcount::WeightProfile(bare),
                                    mf.rings()};
  loopmaps::gasket::EffectiveWeights ew =
      loopmaps::gasket::fixed_point_weights(model, {.K = K, .tol = tol});
  loopmaps::mapcount::Cut c = loopmaps::mapcount::cut_endpoints(ew.profile());
  json j;
  j["schema_version"] = 1;
  j["n"] = n;
  j["family"] = mf.family;
  j["K"] = K;
  j["iterations"] = ew.iterations;
  j["residual"] = ew.residual;
  j["tail_estimate"] = ew.tail_estimate;
  j["gamma_minus"] = c.gamma_minus;
  j["gamma_plus"] = c.gamma_plus;
  j["effective_weights"] = ew.g;
  write_json(out, j);
  return kExitOk;
}

int cmd_critical_line(double a, double n, int grid, const std::string& out) {
  auto line = loopmaps::critline::trace_critical_line(a, n, grid);
  auto os = open_out(out);
  os << "param,g,h,kappa_2mb,phase\n";
  for (const auto& s : line) {
    double param = s.a == 1.0 ? 1 - 2 * s.h * s.gamma_minus : s.v_inf.imag();
    os << fmt17(param) << "," << fmt17(s.g) << "," << fmt17(s.h) << ","
       << fmt17(s.kappa_2mb) << "," << to_string(s.phase) << "\n";
  }
  return kExitOk;
}

int cmd_dilute_point(double a, double n, const std::string& out) {
  loopmaps::critline::CriticalSolution s = loopmaps::critline::dilute_point(a, n);
  json j;
  j["schema_version"] = 1;
  j["a"] = a;
  j["n"] = n;
  j["b"] = s.b;
  j["g"] = s.g;
  j["h"] = s.h;
  j["gamma_minus"] = s.gamma_minus;
  j["v_inf_re"] = s.v_inf.real();
  j["v_inf_im"] = s.v_inf.imag();
  j["kappa_b"] = s.kappa_b;
  j["kappa_2mb"] = s.kappa_2mb;
  j["kappa_2pb"] = s.kappa_2pb;
  j["phase"] = to_string(s.phase);
  write_json(out, j);
  return kExitOk;
}

int cmd_density(const std::string& model, double a, double n, const std::string& point,
                double frac, int grid, double vmax, const std::string& out) {
  auto os = open_out(out);
  os << "v,x,rho\n";
  auto emit = [&](double v, double x, double rho) {
    os << fmt17(v) << "," << fmt17(x) << "," << fmt17(rho) << "\n";
  };
  if (model == "twisting") {
    loopmaps::twistline::TwistSolution dil = loopmaps::twistline::dilute_point(n);
    loopmaps::twistline::TwistSolution s =
        point == "dilute"
            ? dil
            : loopmaps::twistline::solution_at(
                  n, dil.h2 + frac * (loopmaps::twistline::h2_at_g0(n) - dil.h2));
    for (int i = 1; i <= grid; ++i) {
      double v = vmax * i / grid;
      auto [x, rho] = loopmaps::twistline::density(s, v);
      emit(v, x, rho);
    }
    return kExitOk;
  }
  if (model != "bending")
    throw CLI::ValidationError("--model", "expected bending or twisting");
  loopmaps::critline::CriticalSolution s = [&] {
    if (a == 1.0) {
      double rho0 = loopmaps::critline::a1_rho_dilute(n);
      if (point == "dilute") return loopmaps::critline::solution_a1(n, rho0);
      double rho1 = loopmaps::critline::a1_rho_at_g0(n);
      return loopmaps::critline::solution_a1(n, rho0 + frac * (rho1 - rho0));
    }
    loopmaps::critline::CriticalSolution dil = loopmaps::critline::dilute_point(a, n);
    if (point == "dilute") return dil;
    auto line = loopmaps::critline::trace_critical_line(a, n, 33);
    return line[static_cast<std::size_t>(frac * 32)];
  }();
  for (int i = 1; i <= grid; ++i) {
    double v = vmax * i / grid;
    auto [x, rho] = loopmaps::critline::density_on_line(s, v);
    emit(v, x, rho);
  }
  return kExitOk;
}

int cmd_twist_line(double n, int grid, const std::string& out) {
  auto line = loopmaps::twistline::critical_line(n, grid);
  auto os = open_out(out);
  os << "h2,g,kappa_2mb,phase\n";
  for (const auto& s : line)
    os << fmt17(s.h2) << "," << fmt17(s.g) << "," << fmt17(s.kappa_2mb) << ","
       << to_string(s.phase) << "\n";
  return kExitOk;
}

int cmd_classify(double alpha, double beta, double delta, double gm, double gp,
                 const std::string& out) {
  loopmaps::ringgen::Homography s{alpha, beta, delta};
  auto c = loopmaps::ringgen::classify_configuration(s, gm, gp);
  json j;
  j["schema_version"] = 1;
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["delta"] = delta;
  j["gamma_minus"] = gm;
  j["gamma_plus"] = gp;
  j["decreasing"] = s.decreasing();
  j["case"] = to_string(c);
  write_json(out, j);
  return kExitOk;
}

// --config file.json: defaults applied before the command line; flags win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") config_path = args[i + 1];
  if (config_path.empty()) return args;

  std::ifstream is(config_path);
  if (!is) throw std::runtime_error("cannot read config file: " + config_path);
  json j = json::parse(is);
  std::vector<std::string> merged;
  if (!args.empty()) merged.push_back(args.front());  // the subcommand
  for (auto& [key, value] : j.items()) {
    merged.push_back("--" + key);
    if (value.is_string())
      merged.push_back(value.get<std::string>());
    else if (!value.is_boolean())
      merged.push_back(value.dump());
  }
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      ++i;
      continue;
    }
    merged.push_back(args[i]);
  }
  return merged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact solver for O(n) loop models on random planar maps"};
  app.require_subcommand(1);
  // "--h" is a model parameter, so the help flag stays long-form only
  app.set_help_flag("--help", "print help");

  auto opt = [](CLI::Option* o) {
    return o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  };
  auto sub = [&](const char* name, const char* desc) {
    CLI::App* s = app.add_subcommand(name, desc);
    s->set_help_flag("--help", "print help");
    return s;
  };

  double nan = std::numeric_limits<double>::quiet_NaN();

  ModelFlags rings_mf;
  int rings_kmax = 10;
  std::string rings_out = "rings.csv";
  auto* rings = sub("rings", "ring generating coefficients");
  opt(rings->add_option("--family", rings_mf.family));
  opt(rings->add_option("--h", rings_mf.h));
  opt(rings->add_option("--h1", rings_mf.h1));
  opt(rings->add_option("--h2", rings_mf.h2));
  opt(rings->add_option("--a", rings_mf.a));
  opt(rings->add_option("--kmax", rings_kmax));
  opt(rings->add_option("--out", rings_out));

  std::vector<std::string> enum_weights;
  int enum_pmax = 6, enum_order = 6;
  std::string enum_method = "rs", enum_out = "enumerate.csv";
  auto* enumerate = sub("enumerate", "exact disk series coefficients");
  enumerate->add_option("--weight", enum_weights,
                        "face weight as degree:coefficient (rational)");
  opt(enumerate->add_option("--pmax", enum_pmax));
  opt(enumerate->add_option("--order", enum_order));
  opt(enumerate->add_option("--method", enum_method)
          ->check(CLI::IsMember({"rs", "tutte"})));
  opt(enumerate->add_option("--out", enum_out));

  ModelFlags fp_mf;
  double fp_n = 0, fp_g3 = 0, fp_g4 = 0, fp_tol = 1e-10;
  int fp_K = 40;
  std::string fp_out = "fixed_point.json";
  auto* fixed = sub("fixed-point", "effective weights of the gasket");
  opt(fixed->add_option("--family", fp_mf.family));
  opt(fixed->add_option("--h", fp_mf.h));
  opt(fixed->add_option("--h1", fp_mf.h1));
  opt(fixed->add_option("--h2", fp_mf.h2));
  opt(fixed->add_option("--a", fp_mf.a));
  opt(fixed->add_option("--n", fp_n));
  opt(fixed->add_option("--g3", fp_g3));
  opt(fixed->add_option("--g4", fp_g4));
  opt(fixed->add_option("--K", fp_K));
  opt(fixed->add_option("--tol", fp_tol));
  opt(fixed->add_option("--out", fp_out));

  double cl_a = 1.0, cl_n = nan, cl_b = nan;
  int cl_grid = 200;
  std::string cl_out = "line.csv";
  auto* cline = sub("critical-line", "non-generic critical line");
  opt(cline->add_option("--a", cl_a));
  opt(cline->add_option("--n", cl_n));
  opt(cline->add_option("--b", cl_b));
  opt(cline->add_option("--grid", cl_grid));
  opt(cline->add_option("--out", cl_out));

  double dp_a = 1.0, dp_n = nan, dp_b = nan;
  std::string dp_out = "dilute_point.json";
  auto* dilute = sub("dilute-point", "dilute endpoint of the line");
  opt(dilute->add_option("--a", dp_a));
  opt(dilute->add_option("--n", dp_n));
  opt(dilute->add_option("--b", dp_b));
  opt(dilute->add_option("--out", dp_out));
  dilute->add_flag("--json", "kept for compatibility; output is always JSON");

  std::string de_model = "bending", de_point = "dilute", de_out = "density.csv";
  double de_a = 1.0, de_n = nan, de_b = nan, de_frac = 0.5, de_vmax = 12.0;
  int de_grid = 400;
  auto* density = sub("density", "spectral density samples");
  opt(density->add_option("--model", de_model)
          ->check(CLI::IsMember({"bending", "twisting"})));
  opt(density->add_option("--a", de_a));
  opt(density->add_option("--n", de_n));
  opt(density->add_option("--b", de_b));
  opt(density->add_option("--point", de_point)
          ->check(CLI::IsMember({"dense", "dilute"})));
  opt(density->add_option("--frac", de_frac));
  opt(density->add_option("--grid", de_grid));
  opt(density->add_option("--vmax", de_vmax));
  opt(density->add_option("--out", de_out));

  double tl_n = nan, tl_b = nan;
  int tl_grid = 200;
  std::string tl_out = "twist_line.csv";
  auto* tline = sub("twist-line", "twisting-model critical line");
  opt(tline->add_option("--n", tl_n));
  opt(tline->add_option("--b", tl_b));
  opt(tline->add_option("--grid", tl_grid));
  opt(tline->add_option("--out", tl_out));

  double cf_alpha = 0, cf_beta = 0, cf_delta = 0, cf_gm = 0, cf_gp = 0;
  std::string cf_out = "classify.json";
  auto* classify = sub("classify", "cut vs involution-image geometry");
  opt(classify->add_option("--alpha", cf_alpha)->required());
  opt(classify->add_option("--beta", cf_beta)->required());
  opt(classify->add_option("--delta", cf_delta));
  opt(classify->add_option("--gm", cf_gm)->required());
  opt(classify->add_option("--gp", cf_gp)->required());
  opt(classify->add_option("--out", cf_out));

  sub("verify", "run the invariant suite; nonzero exit on failure");

  std::string config_dummy;
  app.add_option("--config", config_dummy, "JSON file with option defaults");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    std::vector<const char*> cargs;
    cargs.push_back("loopmaps");
    for (const auto& s : args) cargs.push_back(s.c_str());
    app.parse(static_cast<int>(cargs.size()), const_cast<char**>(cargs.data()));
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (rings->parsed()) return cmd_rings(rings_mf, rings_kmax, rings_out);
    if (enumerate->parsed())
      return cmd_enumerate(enum_weights, enum_pmax, enum_order, enum_method, enum_out);
    if (fixed->parsed())
      return cmd_fixed_point(fp_mf, fp_n, fp_g3, fp_g4, fp_K, fp_tol, fp_out);
    if (cline->parsed())
      return cmd_critical_line(cl_a, resolve_n(cl_n, cl_b, false), cl_grid, cl_out);
    if (dilute->parsed())
      return cmd_dilute_point(dp_a, resolve_n(dp_n, dp_b, false), dp_out);
    if (density->parsed())
      return cmd_density(de_model, de_a, resolve_n(de_n, de_b, de_model == "twisting"),
                         de_point, de_frac, de_grid, de_vmax, de_out);
    if (tline->parsed())
      return cmd_twist_line(resolve_n(tl_n, tl_b, true), tl_grid, tl_out);
    if (classify->parsed())
      return cmd_classify(cf_alpha, cf_beta, cf_delta, cf_gm, cf_gp, cf_out);
    if (app.get_subcommand("verify")->parsed()) {
      int failures = loopmaps::selfcheck::run(std::cout);
      std::cout << (failures == 0 ? "verify: all checks passed\n"
                                  : "verify: FAILURES\n");
      return failures == 0 ? kExitOk : kExitNumeric;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
