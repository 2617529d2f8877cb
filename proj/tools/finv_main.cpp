// Batch experiment runner: f-invariant levels, counting verification, exact
// rate curves, seeded Monte Carlo, and automorphism checks on finite models.

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "finv/counting.hpp"
#include "finv/montecarlo.hpp"

using namespace finv;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kLevelTolerance = 1e-9;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// git-style blob hash of the file contents
std::string sha1_blob(const std::string& bytes) {
  std::string pre = "blob " + std::to_string(bytes.size());
  pre.push_back('\0');
  pre += bytes;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(pre.data(), pre.size(), md, &len, EVP_sha1(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

json parse_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw input_error(path + ": " + e.what());
  }
}

System load_system(const std::string& path) { return system_from_json(parse_json_file(path)); }

// "a", "a..b" (step 1) or "a..b..step"
std::vector<unsigned long> parse_range(const std::string& text) {
  std::vector<unsigned long> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t dots = text.find("..", pos);
    if (dots == std::string::npos) dots = text.size();
    try {
      parts.push_back(std::stoul(text.substr(pos, dots - pos)));
    } catch (const std::exception&) {
      throw input_error("bad range: " + text);
    }
    pos = dots + 2;
    if (dots == text.size()) break;
  }
  if (parts.size() == 1) return {parts[0]};
  if (parts.size() > 3 || parts[1] < parts[0]) throw input_error("bad range: " + text);
  const unsigned long step = parts.size() == 3 ? parts[2] : 1;
  if (step == 0) throw input_error("range step must be positive");
  std::vector<unsigned long> out;
  for (unsigned long n = parts[0]; n <= parts[1]; n += step) out.push_back(n);
  return out;
}

struct ExperimentRecord {
  std::string command;
  json config = json::object();
  json inputs = json::array();
  json outputs = json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void add_input(const std::string& path) {
    inputs.push_back({{"path", path}, {"sha1", sha1_blob(read_file(path))}});
  }

  json finish() const {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return json{{"command", command}, {"version", kVersion}, {"config", config},
                {"inputs", inputs},   {"outputs", outputs},  {"wall_time_s", secs}};
  }
};

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write " + path);
  out << data;
}

void emit(const std::optional<std::string>& out_path, const std::string& data,
          const ExperimentRecord& record) {
  if (!out_path) return;
  write_file(*out_path, data);
  write_file(*out_path + ".manifest.json", record.finish().dump(2) + "\n");
}

EnumBudget budget_from_flag(std::uint64_t flag) {
  EnumBudget b;
  if (flag > 0) {
    b.max_labelings = flag;
    b.max_brute_pairs = flag;
    b.max_lattice_nodes = flag;
    b.max_psi = flag;
  }
  return b;
}

// ---------------------------------------------------------------- commands

int cmd_f(const std::string& system_path, int levels, std::uint64_t budget_flag,
          const std::optional<std::string>& out, const std::string& format) {
  ExperimentRecord rec;
  rec.command = "f";
  rec.config = {{"system", system_path},
                {"levels", levels},
                {"budget", budget_flag},
                {"format", format}};
  rec.add_input(system_path);

  const System sys = load_system(system_path);
  const FEstimate est = f_estimate(sys, levels, budget_from_flag(budget_flag));

  std::printf("level  F\n");
  for (std::size_t m = 0; m < est.levels.size(); ++m) {
    std::printf("%5zu  %s\n", m, fmt(est.levels[m]).c_str());
  }
  std::printf("min over levels (upper bound for the f-invariant): %s\n",
              fmt(est.min_value).c_str());

  json jlevels = json::array();
  for (double v : est.levels) jlevels.push_back(v);
  rec.outputs = {{"levels", jlevels}, {"min", est.min_value}};

  std::string data;
  if (format == "json") {
    data = json{{"levels", jlevels},
                {"min", est.min_value},
                {"note", "min over finitely many levels; an upper bound for the infimum"}}
               .dump(2) +
           "\n";
  } else {
    data = "m,F\n";
    for (std::size_t m = 0; m < est.levels.size(); ++m) {
      data += std::to_string(m) + ',' + fmt(est.levels[m]) + '\n';
    }
  }
  emit(out, data, rec);
  return 0;
}

int cmd_verify_count(int n_max, int rank, int alphabet, std::uint64_t budget_flag,
                     const std::optional<std::string>& out) {
  ExperimentRecord rec;
  rec.command = "verify-count";
  rec.config = {{"n_max", n_max}, {"r", rank}, {"alphabet", alphabet}, {"budget", budget_flag}};

  if (n_max < 1 || rank < 1 || alphabet < 1) throw input_error("verify-count needs positive sizes");
  const EnumBudget budget = budget_from_flag(budget_flag);

  std::vector<std::string> names;
  for (int i = 0; i < alphabet; ++i) names.push_back(std::string(1, 'a' + i));
  const Weight center = uniform_weight(names, rank);

  bool all_ok = true;
  json cases = json::array();
  std::printf("n  weights  formula=brute  total=|A|^n\n");
  for (int n = 1; n <= n_max; ++n) {
    const auto weights = lattice_weights_vec(center, n, Rat(2 * rank), budget);
    bool ok = true;
    Rat total(0);
    for (const Weight& w : weights) {
      const Rat formula = expected_count_exact(w, n);
      total += formula;
      if (formula != brute_force_expected_count(w, n, budget)) {
        ok = false;
        all_ok = false;
        std::printf("MISMATCH at n=%d, weight:\n%s\n", n, weight_to_json(w).dump(2).c_str());
      }
    }
    Int full;
    mpz_ui_pow_ui(full.get_mpz_t(), alphabet, n);
    const bool total_ok = total == Rat(full);
    if (!total_ok) all_ok = false;
    std::printf("%d  %7zu  %13s  %11s\n", n, weights.size(), ok ? "pass" : "FAIL",
                total_ok ? "pass" : "FAIL");
    cases.push_back({{"n", n}, {"weights", weights.size()}, {"ok", ok && total_ok}});
  }
  rec.outputs = {{"cases", cases}, {"all_ok", all_ok}};
  emit(out, rec.outputs.dump(2) + "\n", rec);
  return all_ok ? 0 : 1;
}

int cmd_rate(const std::string& system_path, const std::string& eps_text,
             const std::string& range_text, std::uint64_t budget_flag,
             const std::optional<std::string>& out, const std::string& format) {
  ExperimentRecord rec;
  rec.command = "rate";
  rec.config = {{"system", system_path},
                {"epsilon", eps_text},
                {"n", range_text},
                {"budget", budget_flag},
                {"format", format}};
  rec.add_input(system_path);

  const System sys = load_system(system_path);
  const Rat eps = parse_fraction(eps_text);
  if (sgn(eps) < 0) throw input_error("epsilon must be nonnegative");
  const auto ns = parse_range(range_text);
  const RateCurve curve = rate_curve(sys, eps, ns, budget_from_flag(budget_flag));

  std::printf("F(T,phi) reference: %s\n", fmt(curve.F_target).c_str());
  std::printf("n    log_count        rate\n");
  for (const auto& p : curve.points) {
    std::printf("%-4lu %-16s %s\n", p.n, fmt(p.log_count).c_str(), fmt(p.rate).c_str());
  }

  json points = json::array();
  for (const auto& p : curve.points) {
    points.push_back({{"n", p.n}, {"log_count", p.log_count}, {"rate", p.rate}});
  }
  rec.outputs = {{"F_target", curve.F_target}, {"points", points}};
  emit(out, format == "json" ? rec.outputs.dump(2) + "\n" : rate_curve_csv(curve), rec);
  return 0;
}

std::optional<std::vector<Word>> parse_kset(const std::string& text, const GroupSpec& g) {
  if (text == "star") return std::nullopt;
  if (text == "gens") {
    std::vector<Word> words{Word()};
    for (int c = 1; c <= g.rank; ++c) words.push_back(reduce({c}, g));
    return words;
  }
  if (text.rfind("ball:", 0) == 0) {
    int m = 0;
    try {
      m = std::stoi(text.substr(5));
    } catch (const std::exception&) {
      throw input_error("bad kset: " + text);
    }
    return ball(g, m);
  }
  throw input_error("kset must be star, gens, or ball:M");
}

int cmd_mc(const std::string& system_path, std::uint64_t seed, long samples,
           const std::string& range_text, const std::string& eps_text, const std::string& kset,
           std::uint64_t budget_flag, const std::optional<std::string>& out,
           const std::string& format) {
  ExperimentRecord rec;
  rec.command = "mc";
  rec.config = {{"system", system_path}, {"seed", seed},        {"samples", samples},
                {"n", range_text},       {"epsilon", eps_text}, {"kset", kset},
                {"budget", budget_flag},  {"format", format}};
  rec.add_input(system_path);

  const System sys = load_system(system_path);
  const Rat eps = parse_fraction(eps_text);
  const auto ns = parse_range(range_text);
  const auto K = parse_kset(kset, sys.group());

  RunConfig base;
  base.seed = seed;
  base.samples = samples;
  const HRateCurve curve = estimate_h_rate(sys, K, eps, ns, base, budget_from_flag(budget_flag));

  std::printf("F(T,phi) reference: %s\n", fmt(curve.F_target).c_str());
  if (curve.level_reference) {
    std::printf("F level reference for this K: %s\n", fmt(*curve.level_reference).c_str());
  }
  std::printf("n    mean             stderr           rate\n");
  for (const auto& p : curve.points) {
    std::printf("%-4lu %-16s %-16s %s\n", p.n, fmt(p.mean).c_str(), fmt(p.stderr_val).c_str(),
                fmt(p.rate).c_str());
  }

  json points = json::array();
  for (const auto& p : curve.points) {
    points.push_back({{"n", p.n}, {"mean", p.mean}, {"stderr", p.stderr_val}, {"rate", p.rate}});
  }
  rec.outputs = {{"F_target", curve.F_target}, {"points", points}};
  if (curve.level_reference) rec.outputs["F_level_reference"] = *curve.level_reference;
  emit(out, format == "json" ? rec.outputs.dump(2) + "\n" : h_rate_csv(curve, samples, seed), rec);
  return 0;
}

int cmd_auto(const std::string& system_path, const std::string& omega_path, int levels,
             std::uint64_t budget_flag, const std::optional<std::string>& out) {
  ExperimentRecord rec;
  rec.command = "auto";
  rec.config = {{"system", system_path},
                {"omega", omega_path},
                {"levels", levels},
                {"budget", budget_flag}};
  rec.add_input(system_path);
  rec.add_input(omega_path);

  const System sys = load_system(system_path);
  const json omega = parse_json_file(omega_path);
  if (!omega.contains("images") || !omega.contains("inverse_images")) {
    throw input_error("omega file needs images and inverse_images");
  }
  std::vector<Word> images, inverses;
  for (const auto& t : omega.at("images")) {
    images.push_back(parse_word(t.get<std::string>(), sys.group()));
  }
  for (const auto& t : omega.at("inverse_images")) {
    inverses.push_back(parse_word(t.get<std::string>(), sys.group()));
  }
  const TransformedSystem twisted = transform_system(sys, images, inverses);

  const EnumBudget budget = budget_from_flag(budget_flag);
  double max_diff = 0.0;
  json rows = json::array();
  std::printf("level  F(T)             F(T^omega)       |diff|\n");
  for (int m = 0; m <= levels; ++m) {
    const double base = F_level(sys, m, budget);
    const double transformed = F_level(twisted, m, budget);
    const double diff = std::abs(base - transformed);
    max_diff = std::max(max_diff, diff);
    std::printf("%5d  %-16s %-16s %s\n", m, fmt(base).c_str(), fmt(transformed).c_str(),
                fmt(diff).c_str());
    rows.push_back({{"m", m}, {"F", base}, {"F_transformed", transformed}, {"diff", diff}});
  }
  const bool ok = max_diff <= kLevelTolerance;
  std::printf("max |diff| = %s -> %s\n", fmt(max_diff).c_str(), ok ? "pass" : "FAIL");

  rec.outputs = {{"rows", rows}, {"max_abs_diff", max_diff}, {"ok", ok}};
  emit(out, rec.outputs.dump(2) + "\n", rec);
  return ok ? 0 : 1;
}

int cmd_freeness(unsigned long n, int rank, const std::string& kind_text, const std::string& g1,
                 const std::string& g2, std::uint64_t seed, long samples,
                 const std::optional<std::string>& out) {
  ExperimentRecord rec;
  rec.command = "freeness";
  rec.config = {{"n", n},   {"r", rank},    {"kind", kind_text},  {"g1", g1},
                {"g2", g2}, {"seed", seed}, {"samples", samples}};

  GroupSpec g{rank, GroupKind::group};
  if (kind_text == "semigroup") {
    g.kind = GroupKind::semigroup;
  } else if (kind_text != "group") {
    throw input_error("kind must be group or semigroup");
  }
  RunConfig cfg;
  cfg.seed = seed;
  cfg.samples = samples;
  const auto stat = freeness_fraction(n, g, parse_word(g1, g), parse_word(g2, g), cfg);

  std::printf("coincidence fraction: mean %s, stderr %s, mean*n %s\n", fmt(stat.mean).c_str(),
              fmt(stat.stderr_val).c_str(), fmt(stat.mean * static_cast<double>(n)).c_str());
  rec.outputs = {{"mean", stat.mean}, {"stderr", stat.stderr_val}};

  std::string csv = "n,samples,mean,stderr,mean_times_n,seed\n";
  csv += std::to_string(n) + ',' + std::to_string(samples) + ',' + fmt(stat.mean) + ',' +
         fmt(stat.stderr_val) + ',' + fmt(stat.mean * static_cast<double>(n)) + ',' +
         std::to_string(seed) + '\n';
  emit(out, csv, rec);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"f-invariant and sofic-entropy rate experiments on finite models"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string system_path, omega_path, range_text = "2..4", eps_text = "0", format = "csv",
              kset = "star", g1 = "e", g2 = "s1", kind_text = "group";
  std::string out_path;
  int levels = 2, n_max = 4, rank = 2, alphabet = 2;
  unsigned long mc_n = 10;
  std::uint64_t seed = 0, budget_flag = 0;
  long samples = 100;

  auto* f_cmd = app.add_subcommand("f", "per-level F values and their minimum");
  f_cmd->add_option("system", system_path, "system JSON file")->required();
  f_cmd->add_option("--levels", levels, "largest ball radius");
  f_cmd->add_option("--budget", budget_flag, "override every enumeration cap");
  f_cmd->add_option("--out", out_path, "write results to this file");
  f_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* vc_cmd =
      app.add_subcommand("verify-count", "formula vs brute-force expected counts, exact");
  vc_cmd->add_option("--n-max", n_max, "largest n");
  vc_cmd->add_option("--r", rank, "rank");
  vc_cmd->add_option("--alphabet", alphabet, "alphabet size");
  vc_cmd->add_option("--budget", budget_flag, "override every enumeration cap");
  vc_cmd->add_option("--out", out_path, "write results to this file");

  auto* rate_cmd = app.add_subcommand("rate", "exact epsilon-ball rate curve");
  rate_cmd->add_option("system", system_path, "system JSON file")->required();
  rate_cmd->add_option("--epsilon", eps_text, "exact fraction p/q")->required();
  rate_cmd->add_option("--n,--n-range", range_text, "range a..b..step")->required();
  rate_cmd->add_option("--budget", budget_flag, "override every enumeration cap");
  rate_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  rate_cmd->add_option("--out", out_path, "write CSV to this file");

  auto* mc_cmd = app.add_subcommand("mc", "seeded Monte Carlo epsilon-counts");
  mc_cmd->add_option("system", system_path, "system JSON file")->required();
  mc_cmd->add_option("--seed", seed, "RNG seed");
  mc_cmd->add_option("--samples", samples, "draws per n");
  mc_cmd->add_option("--n,--n-range", range_text, "range a..b..step");
  mc_cmd->add_option("--epsilon", eps_text, "exact fraction p/q")->required();
  mc_cmd->add_option("--kset", kset, "star, gens, or ball:M");
  mc_cmd->add_option("--budget", budget_flag, "override every enumeration cap");
  mc_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  mc_cmd->add_option("--out", out_path, "write CSV to this file");

  auto* auto_cmd = app.add_subcommand("auto", "per-level F under an automorphism");
  auto_cmd->add_option("system", system_path, "system JSON file")->required();
  auto_cmd->add_option("omega", omega_path, "generator images JSON file")->required();
  auto_cmd->add_option("--levels", levels, "largest ball radius");
  auto_cmd->add_option("--budget", budget_flag, "override every enumeration cap");
  auto_cmd->add_option("--out", out_path, "write results to this file");

  auto* free_cmd = app.add_subcommand("freeness", "coincidence fraction of two words");
  free_cmd->add_option("--n", mc_n, "points");
  free_cmd->add_option("--r", rank, "rank");
  free_cmd->add_option("--kind", kind_text, "group or semigroup");
  free_cmd->add_option("--g1", g1, "first word");
  free_cmd->add_option("--g2", g2, "second word");
  free_cmd->add_option("--seed", seed, "RNG seed");
  free_cmd->add_option("--samples", samples, "draws");
  free_cmd->add_option("--out", out_path, "write CSV to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::optional<std::string> out =
      out_path.empty() ? std::nullopt : std::optional<std::string>(out_path);
  try {
    if (f_cmd->parsed()) return cmd_f(system_path, levels, budget_flag, out, format);
    if (vc_cmd->parsed()) return cmd_verify_count(n_max, rank, alphabet, budget_flag, out);
    if (rate_cmd->parsed()) {
      return cmd_rate(system_path, eps_text, range_text, budget_flag, out, format);
    }
    if (mc_cmd->parsed()) {
      return cmd_mc(system_path, seed, samples, range_text, eps_text, kset, budget_flag, out,
                    format);
    }
    if (auto_cmd->parsed()) {
      return cmd_auto(system_path, omega_path, levels, budget_flag, out);
    }
    if (free_cmd->parsed()) {
      return cmd_freeness(mc_n, rank, kind_text, g1, g2, seed, samples, out);
    }
  } catch (const budget_error& e) {
    std::fprintf(stderr, "budget error: %s\n", e.what());
    return 3;
  } catch (const input_error& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
