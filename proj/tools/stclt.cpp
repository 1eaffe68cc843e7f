// stclt: eigenvalue tables, trace-formula checks and fluctuation statistics
// for level-1 Hecke eigenforms.
//
// Exit codes: 0 pass, 1 invariant failure, 2 usage error, 3 resource guard.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <set>
#include <thread>

#include "cli_support.hpp"
#include "stclt/error.hpp"
#include "stclt/hecke.hpp"
#include "stclt/measures.hpp"
#include "stclt/qexp.hpp"
#include "stclt/selberg.hpp"
#include "stclt/stats.hpp"
#include "stclt/traceformula.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace stclt;
using namespace stclt::cli;

namespace {

enum Exit { kPass = 0, kInvariant = 1, kUsage = 2, kResource = 3 };

constexpr double kSandwichSlack = 1e-9;
constexpr double kDualPathTolerance = 1e-6;
constexpr double kGridSlack = 1e-12;
constexpr long kGridPoints = 10000;
// Largest q-expansion precision trace-check will request for Miller bases.
constexpr long kMaxTraceCheckPrecision = 200000;

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

json config_json(const RunConfig& c) {
  json j;
  j["weights"] = c.weights;
  j["pmax"] = c.pmax;
  j["x"] = c.x;
  json iv = json::array();
  for (const auto& I : c.intervals) iv.push_back({I.a, I.b});
  j["intervals"] = iv;
  j["M"] = c.M ? json(*c.M) : json(nullptr);
  j["M_list"] = c.M_list;
  j["moment_max"] = c.moment_max;
  j["p"] = c.p;
  j["cache"] = c.cache;
  j["out_dir"] = c.out_dir;
  j["threads"] = c.threads;
  j["config_file"] = c.config_file;
  return j;
}

json interval_json(const RealInterval& I) { return json::array({I.a, I.b}); }

class Output {
 public:
  Output(const RunConfig& c, std::string name) : dir_(c.out_dir), name_(std::move(name)) {
    fs::create_directories(dir_);
  }

  std::ofstream csv(const std::string& suffix = "") const {
    const fs::path p = dir_ / (name_ + suffix + ".csv");
    std::ofstream f(p);
    if (!f) throw InvalidArgument("cannot write " + p.string());
    return f;
  }

  void write_json(const json& j) const {
    const fs::path p = dir_ / (name_ + ".json");
    std::ofstream f(p);
    if (!f) throw InvalidArgument("cannot write " + p.string());
    f << j.dump(2) << "\n";
  }

 private:
  fs::path dir_;
  std::string name_;
};

EigenvalueTable load_or_compute(const RunConfig& c, int k, long pmax) {
  if (!c.cache.empty()) {
    if (auto t = table_from_cache(read_cache(c.cache), k, pmax)) return *t;
  }
  return eigen_system(k, pmax);
}

int resolve_M(const RunConfig& c) {
  if (c.M) return *c.M;
  return default_M(c.x);
}

// ---------------------------------------------------------------- compute

int cmd_compute(const RunConfig& c) {
  if (c.cache.empty()) throw InvalidArgument("compute needs --cache");
  std::vector<CacheRecord> records = read_cache(c.cache);
  std::set<std::pair<std::uint32_t, std::uint32_t>> present;
  for (const auto& r : records) present.insert({r.weight, r.prime});
  const std::vector<int> primes = primes_up_to(c.pmax);

  std::vector<int> todo;
  for (int k : c.weights) {
    if (dim_cusp_forms(k) == 0) {
      std::cout << "notice: dim S_" << k << " = 0, nothing to store\n";
      continue;
    }
    bool missing = false;
    for (int p : primes) missing |= !present.count({static_cast<std::uint32_t>(k), p});
    if (missing) todo.push_back(k);
  }

  std::vector<std::vector<CacheRecord>> results(todo.size());
  std::vector<std::string> errors(todo.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < todo.size();) {
      try {
        results[i] = records_from_table(eigen_system(todo[i], c.pmax));
      } catch (const Error& e) {
        errors[i] = "weight " + std::to_string(todo[i]) + ": " + e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min<int>(c.threads, static_cast<int>(todo.size())); ++t)
    pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < todo.size(); ++i) {
    if (!errors[i].empty()) throw NumericalError(errors[i]);
    for (auto& r : results[i])
      if (!present.count({r.weight, r.prime})) records.push_back(std::move(r));
    std::cout << "weight " << todo[i] << ": dim " << dim_cusp_forms(todo[i]) << ", "
              << primes.size() << " primes\n";
  }
  write_cache(c.cache, records);
  std::cout << "cache " << c.cache << ": " << records.size() << " records\n";
  return kPass;
}

// ------------------------------------------------------------ trace-check

int cmd_trace_check(const RunConfig& c, const std::string& k_range, const std::string& n_range) {
  const std::vector<int> weights = parse_weights(k_range);
  const auto nr = parse_int_list([&] {
    std::string s = n_range;
    std::replace(s.begin(), s.end(), ':', ',');
    return s;
  }());
  if (nr.size() != 2 || nr[0] < 1 || nr[0] > nr[1])
    throw InvalidArgument("--n-range must be a:b with 1 <= a <= b");
  Output out(c, "trace_check");
  auto csv = out.csv();
  csv << "k,n,trace_formula,matrix_trace,b1,b2,b3,b4,match\n";
  int failures = 0, rows = 0;
  for (int k : weights) {
    const int d = dim_cusp_forms(k);
    const long prec = static_cast<long>(nr[1]) * (d + 1) + 1;
    if (prec > kMaxTraceCheckPrecision)
      throw ResourceError("trace-check at k = " + std::to_string(k) + ", n = " +
                          std::to_string(nr[1]) + " needs q-expansion precision " +
                          std::to_string(prec));
    const CuspBasis basis = d > 0 ? miller_basis(k, prec) : CuspBasis{};
    for (long n = nr[0]; n <= nr[1]; ++n) {
      const TraceValue tv = trace_unnormalized(k, n);
      const BigInt mt = d > 0 ? hecke_matrix(k, n, basis).trace() : BigInt(0);
      const bool ok = tv.total == Rational(mt);
      failures += !ok;
      ++rows;
      csv << k << ',' << n << ',' << tv.total << ',' << mt << ',' << tv.b1 << ',' << tv.b2 << ','
          << tv.b3 << ',' << tv.b4 << ',' << (ok ? "pass" : "FAIL") << '\n';
    }
  }
  json j;
  j["command"] = "trace-check";
  j["config"] = config_json(c);
  j["k_range"] = k_range;
  j["n_range"] = n_range;
  j["rows"] = rows;
  j["failures"] = failures;
  out.write_json(j);
  std::cout << "trace-check: " << rows << " (k, n) pairs, " << failures << " mismatches\n";
  return failures ? kInvariant : kPass;
}

// -------------------------------------------------------------- bs-verify

int cmd_bs_verify(const RunConfig& c) {
  const std::vector<int> Ms = c.M_list.empty() ? std::vector<int>{c.M.value_or(50)} : c.M_list;
  Output out(c, "bs_verify");
  auto coeffs = out.csv("_coefficients");
  coeffs << "M,interval_a,interval_b,m,s_plus,s_minus,chi_hat_re,chi_hat_im,u_plus,u_minus\n";
  json checks = json::array();
  bool all_ok = true;
  for (int M : Ms) {
    for (const auto& I : c.intervals) {
      const TorusInterval T = map_interval(I.a, I.b);
      const SelbergPair pair(T, M);
      const double w = T.beta - T.alpha;
      const bool b_ok = pair.coeff(Sign::plus, 0).real() == w + 1.0 / (M + 1) &&
                        pair.coeff(Sign::minus, 0).real() == w - 1.0 / (M + 1);
      double c_worst = 0;
      for (int m = 1; m <= M; ++m)
        for (Sign s : {Sign::plus, Sign::minus})
          c_worst = std::max(c_worst, std::abs(pair.coeff(s, m) - indicator_fourier(T, m)) * (M + 1));
      const auto up = evaluate_grid(pair, Sign::plus, kGridPoints);
      const auto lo = evaluate_grid(pair, Sign::minus, kGridPoints);
      double a_worst = 0;
      for (long j = 0; j < kGridPoints; ++j) {
        const double x = static_cast<double>(j) / kGridPoints;
        const double chi = (T.alpha <= x && x <= T.beta) ? 1.0 : 0.0;
        a_worst = std::min({a_worst, up[j] - chi, chi - lo[j]});
      }
      const bool a_ok = a_worst >= -kGridSlack, c_ok = c_worst <= 1;
      all_ok &= a_ok && b_ok && c_ok;
      checks.push_back({{"M", M}, {"interval", interval_json(I)}, {"alpha", T.alpha},
                        {"beta", T.beta}, {"dominance_min", a_worst}, {"dominance_ok", a_ok},
                        {"zeroth_exact", b_ok}, {"coeff_ratio_max", c_worst}, {"coeff_ok", c_ok}});
      const auto uplus = u_coeffs(pair, Sign::plus), uminus = u_coeffs(pair, Sign::minus);
      for (int m = 0; m <= M; ++m) {
        const auto chi = indicator_fourier(T, m);
        coeffs << M << ',' << fmt(I.a) << ',' << fmt(I.b) << ',' << m << ','
               << fmt(symmetrized_coeff(pair, Sign::plus, m)) << ','
               << fmt(symmetrized_coeff(pair, Sign::minus, m)) << ',' << fmt(chi.real()) << ','
               << fmt(chi.imag()) << ',' << (m ? fmt(uplus[m - 1]) : "") << ','
               << (m ? fmt(uminus[m - 1]) : "") << '\n';
      }
    }
  }
  json j;
  j["command"] = "bs-verify";
  j["config"] = config_json(c);
  j["checks"] = checks;
  j["pass"] = all_ok;
  out.write_json(j);
  std::cout << "bs-verify: " << checks.size() << " (M, interval) pairs, "
            << (all_ok ? "pass" : "FAIL") << "\n";
  return all_ok ? kPass : kInvariant;
}

// --------------------------------------------------------------- vertical

int cmd_vertical(const RunConfig& c) {
  Output out(c, "vertical");
  auto csv = out.csv();
  csv << "k,dim,p,ks_plancherel,ks_semicircle\n";
  json rows = json::array();
  bool in_range = true, decreasing = true;
  double prev = 2;
  for (int k : c.weights) {
    if (dim_cusp_forms(k) < 1) {
      std::cout << "notice: dim S_" << k << " = 0, skipped\n";
      continue;
    }
    const auto r = vertical_distribution(load_or_compute(c, k, c.p), c.p);
    in_range &= 0 <= r.ks_plancherel && r.ks_plancherel <= 1;
    decreasing &= r.ks_plancherel < prev;
    prev = r.ks_plancherel;
    csv << k << ',' << r.sample_size << ',' << c.p << ',' << fmt(r.ks_plancherel) << ','
        << fmt(r.ks_semicircle) << '\n';
    rows.push_back({{"k", k}, {"dim", r.sample_size}, {"ks_plancherel", r.ks_plancherel},
                    {"ks_semicircle", r.ks_semicircle}});
    std::cout << "k=" << k << " dim=" << r.sample_size << " KS(mu_" << c.p
              << ")=" << r.ks_plancherel << " KS(mu_inf)=" << r.ks_semicircle << "\n";
  }
  json j;
  j["command"] = "vertical";
  j["config"] = config_json(c);
  j["rows"] = rows;
  j["ks_decreasing"] = decreasing;
  out.write_json(j);
  return in_range ? kPass : kInvariant;
}

// -------------------------------------------------------------------- clt

int cmd_clt(const RunConfig& c) {
  const int M = resolve_M(c);
  Output out(c, "clt");
  auto csv = out.csv("_forms");
  csv << "k,interval_a,interval_b,form,N,S_plus,S_minus,Z\n";
  json reports = json::array();
  long violations = 0;
  for (int k : c.weights) {
    if (dim_cusp_forms(k) < 1) {
      std::cout << "notice: dim S_" << k << " = 0, skipped\n";
      continue;
    }
    const EigenvalueTable t = load_or_compute(c, k, static_cast<long>(std::floor(c.x)));
    for (const auto& I : c.intervals) {
      const FluctuationSample s = fluctuation_sample(t, I, c.x, M);
      const SelbergPair pair(map_interval(I.a, I.b), M);
      const auto sym = [&](Sign sg, int m) { return symmetrized_coeff(pair, sg, m); };
      for (std::size_t f = 0; f < s.per_form.size(); ++f) {
        const auto& r = s.per_form[f];
        const double upper = r.N - s.pi_x * (sym(Sign::plus, 0) - sym(Sign::plus, 2));
        const double lower = r.N - s.pi_x * (sym(Sign::minus, 0) - sym(Sign::minus, 2));
        violations += upper > r.s_plus + kSandwichSlack;
        violations += r.s_minus > lower + kSandwichSlack;
        csv << k << ',' << fmt(I.a) << ',' << fmt(I.b) << ',' << f << ',' << r.N << ','
            << fmt(r.s_plus) << ',' << fmt(r.s_minus) << ',' << fmt(r.z) << '\n';
      }
      const StatsReport rep = stats_report(s, c.moment_max);
      if (rep.degenerate)
        std::cout << "notice: interval [" << I.a << ", " << I.b << "] has semicircle mass "
                  << s.mu << "; Z is identically 0 (degenerate interval)\n";
      const VarianceReport var = t.dim() >= 2 ? variance_report(t, I, c.x) : VarianceReport{};
      reports.push_back({{"k", k},
                         {"x", c.x},
                         {"M", M},
                         {"interval", interval_json(I)},
                         {"sample_size", rep.sample_size},
                         {"pi_x", s.pi_x},
                         {"mu", s.mu},
                         {"degenerate", rep.degenerate},
                         {"moments", rep.moments},
                         {"variance", rep.variance},
                         {"gaussian_targets", rep.gaussian_targets},
                         {"ks_gaussian", rep.ks_gaussian},
                         {"count_variance_empirical", var.empirical},
                         {"count_variance_predicted", var.predicted}});
      std::cout << "k=" << k << " I=[" << I.a << ", " << I.b << "] M=" << M
                << " var(Z)=" << rep.variance << " KS=" << rep.ks_gaussian << "\n";
    }
  }
  json j;
  j["command"] = "clt";
  j["config"] = config_json(c);
  j["reports"] = reports;
  j["sandwich_violations"] = violations;
  out.write_json(j);
  if (violations) std::cout << "clt: " << violations << " sandwich violations\n";
  return violations ? kInvariant : kPass;
}

// ---------------------------------------------------------------- moments

int cmd_moments(const RunConfig& c) {
  const int M = resolve_M(c);
  Output out(c, "moments");
  auto csv = out.csv();
  csv << "k,interval_a,interval_b,M,x,n,sign,theoretical,empirical,abs_diff,pass\n";
  json rows = json::array();
  int failures = 0;
  for (int k : c.weights) {
    if (dim_cusp_forms(k) < 1) continue;
    const EigenvalueTable t = load_or_compute(c, k, static_cast<long>(std::floor(c.x)));
    for (const auto& I : c.intervals) {
      const SelbergPair pair(map_interval(I.a, I.b), M);
      for (Sign sg : {Sign::plus, Sign::minus}) {
        std::vector<double> s;
        for (int f = 0; f < t.dim(); ++f) s.push_back(s_statistic(t, f, pair, sg, c.x));
        const auto emp = empirical_moments(s, c.moment_max);
        for (int n = 1; n <= c.moment_max; ++n) {
          const double th = theoretical_s_moment(k, I, M, c.x, n, sg).convert_to<double>();
          const double diff = std::abs(th - emp[n]);
          const bool ok = diff <= kDualPathTolerance;
          failures += !ok;
          const char* name = sg == Sign::plus ? "plus" : "minus";
          csv << k << ',' << fmt(I.a) << ',' << fmt(I.b) << ',' << M << ',' << fmt(c.x) << ','
              << n << ',' << name << ',' << fmt(th) << ',' << fmt(emp[n]) << ',' << fmt(diff)
              << ',' << (ok ? "pass" : "FAIL") << '\n';
          rows.push_back({{"k", k}, {"interval", interval_json(I)}, {"n", n}, {"sign", name},
                          {"theoretical", th}, {"empirical", emp[n]}, {"abs_diff", diff}});
        }
      }
    }
  }
  json j;
  j["command"] = "moments";
  j["config"] = config_json(c);
  j["M"] = M;
  j["rows"] = rows;
  j["failures"] = failures;
  out.write_json(j);
  std::cout << "moments: " << rows.size() << " comparisons, " << failures << " above "
            << kDualPathTolerance << "\n";
  return failures ? kInvariant : kPass;
}

// ------------------------------------------------------------- export-csv

int cmd_export_csv(const RunConfig& c, const std::string& output) {
  if (c.cache.empty()) throw InvalidArgument("export-csv needs --cache");
  const auto records = read_cache(c.cache);
  std::ofstream file;
  if (!output.empty()) {
    file.open(output);
    if (!file) throw InvalidArgument("cannot write " + output);
  }
  std::ostream& os = output.empty() ? std::cout : file;
  os << "weight,prime,form,value,residual_max\n";
  for (const auto& r : records)
    for (std::size_t f = 0; f < r.values.size(); ++f)
      os << r.weight << ',' << r.prime << ',' << f << ',' << fmt(r.values[f]) << ','
         << fmt(r.residual_max) << '\n';
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sato-Tate fluctuation statistics for level-1 Hecke eigenforms"};
  app.require_subcommand(1);

  std::map<std::string, std::string> flags;
  std::string config_file;
  app.add_option("--config", config_file, "flat key = value config file; flags override it");
  auto flag = [&](CLI::App* sub, const std::string& name, const std::string& key,
                  const std::string& help) {
    sub->add_option_function<std::string>(
        name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
  };
  auto common = [&](CLI::App* sub) {
    flag(sub, "--out-dir", "out_dir", "directory for CSV and JSON reports");
    flag(sub, "--cache", "cache", "binary eigenvalue cache");
  };

  auto* compute = app.add_subcommand("compute", "compute eigenvalue tables into the binary cache");
  common(compute);
  flag(compute, "--weights", "weights", "weights: 12,24 or 12:60 or 500:2000:500");
  flag(compute, "--pmax", "pmax", "largest prime to tabulate");
  flag(compute, "--threads", "threads", "worker threads across weights");

  std::string k_range = "12:60", n_range = "1:50";
  auto* trace = app.add_subcommand(
      "trace-check",
      "compare trace formula against Miller-basis matrix traces; CSV columns: k, n, "
      "trace_formula, matrix_trace, b1, b2, b3, b4, match");
  common(trace);
  trace->add_option("--k-range", k_range, "weights, e.g. 12:60");
  trace->add_option("--n-range", n_range, "n range a:b");

  auto* bs = app.add_subcommand(
      "bs-verify",
      "check Beurling-Selberg dominance, zeroth coefficients and coefficient proximity; "
      "coefficient CSV columns: M, interval_a, interval_b, m, s_plus, s_minus, chi_hat_re, "
      "chi_hat_im, u_plus, u_minus");
  common(bs);
  flag(bs, "--M-list", "M_list", "degrees, e.g. 10,100,1000");
  flag(bs, "--intervals", "intervals", "intervals, e.g. -1:1;0:2");

  auto* vertical = app.add_subcommand(
      "vertical", "KS distance of a_f(p) over f to mu_p and mu_inf; CSV columns: k, dim, p, "
                  "ks_plancherel, ks_semicircle");
  common(vertical);
  flag(vertical, "--weights", "weights", "weights");
  flag(vertical, "--p", "p", "prime");

  auto* clt = app.add_subcommand(
      "clt", "fluctuation sample and moment report; CSV columns: k, interval_a, interval_b, "
             "form, N, S_plus, S_minus, Z");
  common(clt);
  flag(clt, "--weights", "weights", "weights");
  flag(clt, "--x", "x", "prime cutoff");
  flag(clt, "--intervals", "intervals", "intervals");
  flag(clt, "--M", "M", "Selberg degree (default floor(sqrt(pi(x)) log log x), x >= 16)");
  flag(clt, "--moment-max", "moment_max", "largest moment order");

  auto* moments = app.add_subcommand(
      "moments", "trace-formula vs eigenvalue moments of S(M, f)(x); CSV columns: k, "
                 "interval_a, interval_b, M, x, n, sign, theoretical, empirical, abs_diff, pass");
  common(moments);
  flag(moments, "--weights", "weights", "weights");
  flag(moments, "--x", "x", "prime cutoff");
  flag(moments, "--intervals", "intervals", "intervals");
  flag(moments, "--M", "M", "Selberg degree");
  flag(moments, "--moment-max", "moment_max", "largest moment order");

  std::string export_output;
  auto* exp = app.add_subcommand(
      "export-csv", "dump the binary cache; CSV columns: weight, prime, form, value, residual_max");
  common(exp);
  exp->add_option("--output", export_output, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    RunConfig c;
    c.weights = {12};
    if (!config_file.empty()) {
      apply_config(c, read_config_file(config_file));
      c.config_file = config_file;
    }
    apply_config(c, flags);
    validate(c);

    if (*compute) return cmd_compute(c);
    if (*trace) return cmd_trace_check(c, k_range, n_range);
    if (*bs) return cmd_bs_verify(c);
    if (*vertical) return cmd_vertical(c);
    if (*clt) return cmd_clt(c);
    if (*moments) return cmd_moments(c);
    if (*exp) return cmd_export_csv(c, export_output);
  } catch (const InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ResourceError& e) {
    std::cerr << "resource guard: " << e.what() << "\n";
    return kResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvariant;
  }
  return kUsage;
}
