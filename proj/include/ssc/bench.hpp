#pragma once

// Experiment harness: missing-ratio sweeps with resumable CSV output, the
// f-margin curves, certificate-vs-solver comparisons, noisy-data checks, and
// the small config / manifest plumbing the CLI needs.

#include "ssc/certificates.hpp"
#include "ssc/parallel.hpp"
#include "ssc/pipeline.hpp"
#include "ssc/random_model.hpp"

#include <boost/property_tree/ini_parser.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#ifndef SSC_VERSION
#define SSC_VERSION "0.0.0"
#endif

namespace ssc {

inline constexpr const char* kVersion = SSC_VERSION;

// ---------------------------------------------------------------------------
// Config files: INI read through Boost.PropertyTree, flattened so keys are
// addressed as "section.key"; keys before any header have no prefix.

class Config {
 public:
  static Config parse(std::istream& is) {
    boost::property_tree::ptree tree;
    try {
      boost::property_tree::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(e.line()) + ": " + e.message());
    }
    Config c;
    for (const auto& [name, node] : tree) {
      if (node.empty()) {
        c.values_[name] = trim(node.data());
        continue;
      }
      for (const auto& [key, leaf] : node) c.values_[name + "." + key] = trim(leaf.data());
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::Io, "cannot open " + path);
    return parse(in);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }
  double get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return parse_number(key, values_.at(key));
  }
  long get_long(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const double v = parse_number(key, values_.at(key));
    require(v == std::floor(v), ErrorCode::Parse, key + " must be an integer");
    return static_cast<long>(v);
  }
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    std::stringstream ss(values_.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
    return out;
  }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }
  static double parse_number(const std::string& key, const std::string& text) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    require(!text.empty() && end && *end == '\0', ErrorCode::Parse, key + ": '" + text + "' is not a number");
    return v;
  }

  std::map<std::string, std::string> values_;
};

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Writes `run-manifest` into `dir`: version, command, config hash and seed.
inline std::string write_manifest(const std::string& dir, const std::string& command, const std::string& config_text,
                                  std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / "run-manifest").string();
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + path);
  out << "[run]\n"
      << "version=" << kVersion << "\n"
      << "command=" << command << "\n"
      << "config_hash=" << hex64(fnv1a64(config_text)) << "\n"
      << "seed=" << seed << "\n\n[config]\n"
      << config_text;
  return path;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepConfig {
  RandomModelParams model{};  // m is overridden per grid point
  std::vector<double> omega_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  std::vector<Variant> variants{Variant::ZeroFilled, Variant::ProjectedZeroFilled};
  int trials = 20;
  LambdaRule lambda_rule = LambdaRule::adaptive(2.0);
  bool certificates = true;  // per-column T3 / T5 checks at the lambda used
  int spectral_restarts = 20;

  int m_for(double omega) const { return static_cast<int>(std::lround(omega * model.D)); }

  void validate() const {
    require(trials >= 1, ErrorCode::InvalidArgument, "trials must be >= 1");
    require(!omega_grid.empty() && !variants.empty(), ErrorCode::InvalidArgument, "empty sweep grid");
    for (double w : omega_grid) {
      const int m = m_for(w);
      require(w >= 0.0 && m >= 0 && m < model.D - model.d, ErrorCode::InvalidArgument,
              "omega " + format_double(w) + " gives m = " + std::to_string(m) + ", need 0 <= m < D - d");
    }
    RandomModelParams p = model;
    p.m = 0;
    p.validate();
  }

  /// Canonical key=value text; hashed for resume checks and the manifest.
  std::string to_text() const {
    std::ostringstream os;
    os << "[model]\nn=" << model.n << "\nd=" << model.d << "\nD=" << model.D << "\nrho=" << format_double(model.rho)
       << "\nepsilon=" << format_double(model.epsilon) << "\nseed=" << model.seed << "\n\n[sweep]\nomega=";
    for (std::size_t k = 0; k < omega_grid.size(); ++k) os << (k ? "," : "") << format_double(omega_grid[k]);
    os << "\nvariants=";
    for (std::size_t k = 0; k < variants.size(); ++k) os << (k ? "," : "") << to_string(variants[k]);
    os << "\ntrials=" << trials << "\nlambda_rule=" << lambda_rule.describe()
       << "\ncertificates=" << (certificates ? 1 : 0) << "\nspectral_restarts=" << spectral_restarts << "\n";
    return os.str();
  }

  static SweepConfig from_config(const Config& c) {
    SweepConfig s;
    s.model.n = static_cast<int>(c.get_long("model.n", s.model.n));
    s.model.d = static_cast<int>(c.get_long("model.d", s.model.d));
    s.model.D = static_cast<int>(c.get_long("model.D", s.model.D));
    s.model.rho = c.get_double("model.rho", s.model.rho);
    s.model.epsilon = c.get_double("model.epsilon", s.model.epsilon);
    s.model.seed = static_cast<std::uint64_t>(c.get_long("model.seed", static_cast<long>(s.model.seed)));
    s.omega_grid = c.get_list("sweep.omega", s.omega_grid);
    if (c.has("sweep.variants")) {
      s.variants.clear();
      std::stringstream ss(c.get("sweep.variants", ""));
      std::string item;
      while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        s.variants.push_back(parse_variant(item));
      }
    }
    s.trials = static_cast<int>(c.get_long("sweep.trials", s.trials));
    if (c.has("sweep.lambda")) s.lambda_rule = LambdaRule::fixed(c.get_double("sweep.lambda", 1.0));
    if (c.has("sweep.adaptive")) s.lambda_rule = LambdaRule::adaptive(c.get_double("sweep.adaptive", 2.0));
    s.certificates = c.get_long("sweep.certificates", 1) != 0;
    s.spectral_restarts = static_cast<int>(c.get_long("sweep.spectral_restarts", s.spectral_restarts));
    return s;
  }
};

struct SweepRow {
  double omega = 0.0;
  int m = 0;
  Variant variant = Variant::ZeroFilled;
  int trial = 0;
  double sp_rate = std::nan("");
  double clustering_error = std::nan("");
  std::string cert_theorem;                   // T3 for PZF rows, T5 for ZF, T8 for complete
  double cert_pass = std::nan("");            // fraction of columns certified at their lambda
  long cert_violations = 0;                   // certified but not subspace preserving
  double f_pzf = std::nan("");
  double f_zf = std::nan("");
  std::string error;                          // empty when the cell ran
};

struct SweepResult {
  std::vector<SweepRow> rows;  // canonical order (omega, variant, trial)
  std::size_t resumed_blocks = 0;

  double mean_sp_rate(double omega, Variant v) const {
    double sum = 0.0;
    long count = 0;
    for (const auto& r : rows)
      if (r.omega == omega && r.variant == v && std::isfinite(r.sp_rate)) {
        sum += r.sp_rate;
        ++count;
      }
    return count ? sum / static_cast<double>(count) : std::nan("");
  }
  long total_violations() const {
    long v = 0;
    for (const auto& r : rows) v += r.cert_violations;
    return v;
  }
};

inline std::string sweep_csv_header() {
  return "omega,m,variant,trial,sp_rate,clustering_error,cert_theorem,cert_pass,cert_violations,f_pzf,f_zf,error";
}

inline std::string to_csv_row(const SweepRow& r) {
  std::ostringstream os;
  os << format_double(r.omega) << ',' << r.m << ',' << to_string(r.variant) << ',' << r.trial << ','
     << format_double(r.sp_rate) << ',' << format_double(r.clustering_error) << ',' << r.cert_theorem << ','
     << format_double(r.cert_pass) << ',' << r.cert_violations << ',' << format_double(r.f_pzf) << ','
     << format_double(r.f_zf) << ',' << r.error;
  return os.str();
}

inline SweepRow parse_sweep_row(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) f.push_back(item);
  if (!line.empty() && line.back() == ',') f.emplace_back();
  require(f.size() == 12, ErrorCode::Parse, "sweep row has " + std::to_string(f.size()) + " fields");
  auto num = [](const std::string& s) { return std::strtod(s.c_str(), nullptr); };
  SweepRow r;
  r.omega = num(f[0]);
  r.m = std::stoi(f[1]);
  r.variant = parse_variant(f[2]);
  r.trial = std::stoi(f[3]);
  r.sp_rate = num(f[4]);
  r.clustering_error = num(f[5]);
  r.cert_theorem = f[6];
  r.cert_pass = num(f[7]);
  r.cert_violations = std::stol(f[8]);
  r.f_pzf = num(f[9]);
  r.f_zf = num(f[10]);
  r.error = f[11];
  return r;
}

/// Seed for the dataset of (grid point m, trial); shared by all variants so
/// they are compared on the same draw.
inline std::uint64_t sweep_seed(std::uint64_t master, int m, int trial) {
  return derive_seed(master, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(trial));
}

struct ColumnCertificates {
  double pass = 0.0;
  long violations = 0;
};

/// Certifies every column of `expr` at the lambda it was solved with and
/// counts certified columns that are not subspace preserving.
inline ColumnCertificates certify_columns(const MaskedDataset& data, const SubspaceArrangement& arr,
                                          const SelfExpression& expr, const LassoOptions& lasso = {}) {
  ColumnCertificates out;
  long passed = 0;
  for (Index j = 0; j < data.size(); ++j) {
    const double lambda = expr.lambdas[static_cast<std::size_t>(j)];
    if (!std::isfinite(lambda)) continue;
    try {
      const AnchorProblem p = make_anchor_problem(data, arr, j, expr.variant);
      GeometryOptions gopts;
      gopts.lasso = lasso;
      const GeometryReport g = analyze_anchor(p, view_of(expr.variant), lambda, Matrix(), gopts);
      if (certify_variant(expr.variant, g, lambda).certified()) {
        ++passed;
        if (!expr.sp_flags[static_cast<std::size_t>(j)]) ++out.violations;
      }
    } catch (const Error&) {
      // Degenerate anchors (lonely, zero view column, rank-0 projection) are
      // simply not certified.
    }
  }
  out.pass = static_cast<double>(passed) / static_cast<double>(data.size());
  return out;
}

inline const char* certificate_theorem(Variant v) {
  switch (v) {
    case Variant::Complete: return "T8";
    case Variant::ZeroFilled: return "T5";
    case Variant::ProjectedZeroFilled: return "T3";
  }
  return "?";
}

/// All rows of one (omega, trial) cell, one per variant.
inline std::vector<SweepRow> run_sweep_cell(const SweepConfig& cfg, double omega, int trial) {
  RandomModelParams p = cfg.model;
  p.m = cfg.m_for(omega);
  p.seed = sweep_seed(cfg.model.seed, p.m, trial);
  std::vector<SweepRow> rows;
  for (Variant v : cfg.variants) {
    SweepRow r;
    r.omega = omega;
    r.m = p.m;
    r.variant = v;
    r.trial = trial;
    r.cert_theorem = certificate_theorem(v);
    rows.push_back(r);
  }
  try {
    const double w = p.omega(), a = p.alpha(), b = p.beta();
    const GeneratedInstance inst = generate(p);
    for (auto& r : rows) {
      r.f_pzf = f_pzf(w, a, b, p.epsilon);
      r.f_zf = f_zf(w, a, b, p.epsilon);
      try {
        SpectralOptions sopts;
        sopts.seed = derive_seed(p.seed, 0x5bec);
        sopts.restarts = cfg.spectral_restarts;
        const PipelineResult res = run_pipeline(inst.data, r.variant, cfg.lambda_rule, {}, sopts);
        r.sp_rate = res.clustering.sp_rate;
        r.clustering_error = res.clustering.clustering_error;
        if (cfg.certificates) {
          const auto cc = certify_columns(inst.data, inst.arrangement, res.expression);
          r.cert_pass = cc.pass;
          r.cert_violations = cc.violations;
        }
      } catch (const Error& e) {
        r.error = to_string(e.code());
      }
    }
  } catch (const Error& e) {
    for (auto& r : rows) r.error = to_string(e.code());
  }
  return rows;
}

struct SweepRunOptions {
  std::string csv_path;  // empty: no file output, no resume
  unsigned threads = 1;
};

namespace detail {

inline std::string sweep_preamble(const SweepConfig& cfg) {
  return "# ssc sweep " + std::string(kVersion) + " config_hash=" + hex64(fnv1a64(cfg.to_text())) +
         " (self-generated regression baseline, no published table)";
}

}  // namespace detail

/// Runs the grid block by block (one block per omega). With a CSV path, each
/// finished block is appended and flushed; rerunning with the same config
/// keeps the complete blocks already on disk, drops any partial tail, and
/// continues, so the final file is identical to an uninterrupted run.
inline SweepResult run_sweep(const SweepConfig& cfg, const SweepRunOptions& run = {}) {
  cfg.validate();
  SweepResult result;
  const std::size_t block = cfg.variants.size() * static_cast<std::size_t>(cfg.trials);
  const std::string preamble = detail::sweep_preamble(cfg);

  std::vector<std::string> kept;
  if (!run.csv_path.empty() && std::filesystem::exists(run.csv_path)) {
    std::ifstream in(run.csv_path);
    std::string first, header, line;
    if (std::getline(in, first) && first == preamble && std::getline(in, header) && header == sweep_csv_header()) {
      std::vector<std::string> lines;
      // A line without its trailing newline was cut mid-write.
      std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      std::size_t pos = 0;
      while (true) {
        const auto nl = all.find('\n', pos);
        if (nl == std::string::npos) break;
        lines.push_back(all.substr(pos, nl - pos));
        pos = nl + 1;
      }
      const std::size_t blocks = std::min(lines.size() / block, cfg.omega_grid.size());
      for (std::size_t b = 0; b < blocks; ++b) {
        bool ok = true;
        std::vector<SweepRow> parsed;
        try {
          for (std::size_t k = 0; k < block; ++k) parsed.push_back(parse_sweep_row(lines[b * block + k]));
        } catch (const std::exception&) {
          ok = false;
        }
        for (std::size_t k = 0; ok && k < block; ++k) {
          const auto& r = parsed[k];
          ok = r.omega == cfg.omega_grid[b] && r.variant == cfg.variants[k / cfg.trials] &&
               r.trial == static_cast<int>(k % cfg.trials);
        }
        if (!ok) break;
        for (std::size_t k = 0; k < block; ++k) kept.push_back(lines[b * block + k]);
        result.rows.insert(result.rows.end(), parsed.begin(), parsed.end());
        ++result.resumed_blocks;
      }
    }
  }

  std::ofstream out;
  if (!run.csv_path.empty()) {
    const auto parent = std::filesystem::path(run.csv_path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    out.open(run.csv_path, std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + run.csv_path);
    out << preamble << '\n' << sweep_csv_header() << '\n';
    for (const auto& l : kept) out << l << '\n';
    out.flush();
  }

  for (std::size_t b = result.resumed_blocks; b < cfg.omega_grid.size(); ++b) {
    const double omega = cfg.omega_grid[b];
    std::vector<std::vector<SweepRow>> cells(static_cast<std::size_t>(cfg.trials));
    parallel_for(cells.size(), run.threads,
                 [&](std::size_t t) { cells[t] = run_sweep_cell(cfg, omega, static_cast<int>(t)); });
    // Canonical order inside the block: variant-major, then trial.
    for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
      for (std::size_t t = 0; t < cells.size(); ++t) {
        const SweepRow& r = cells[t][v];
        result.rows.push_back(r);
        if (out.is_open()) out << to_csv_row(r) << '\n';
      }
    }
    if (out.is_open()) out.flush();
  }
  return result;
}

// ---------------------------------------------------------------------------
// f-margin curves

struct Fig1Data {
  std::vector<double> omega, pzf, zf;
};

/// `points` interior grid points omega_k = k / (points + 1), k = 1..points.
inline Fig1Data fig1_curves(double alpha, double beta, double eps, int points) {
  require(points >= 2, ErrorCode::InvalidArgument, "need at least two grid points");
  Fig1Data f;
  for (int k = 1; k <= points; ++k) {
    const double w = static_cast<double>(k) / (points + 1);
    f.omega.push_back(w);
    f.pzf.push_back(f_pzf(w, alpha, beta, eps));
    f.zf.push_back(f_zf(w, alpha, beta, eps));
  }
  return f;
}

inline std::string fig1_csv(const Fig1Data& f) {
  std::ostringstream os;
  os << "omega,f_pzf,f_zf\n";
  for (std::size_t k = 0; k < f.omega.size(); ++k)
    os << format_double(f.omega[k]) << ',' << format_double(f.pzf[k]) << ',' << format_double(f.zf[k]) << '\n';
  return os.str();
}

inline std::string fig1_svg(const Fig1Data& f, double alpha, double beta, double eps) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 55;
  double lo = 0.0, hi = 0.0;
  for (std::size_t k = 0; k < f.omega.size(); ++k) {
    lo = std::min({lo, f.pzf[k], f.zf[k]});
    hi = std::max({hi, f.pzf[k], f.zf[k]});
  }
  const double pad = 0.05 * std::max(hi - lo, 1e-9);
  lo -= pad;
  hi += pad;
  auto sx = [&](double w) { return L + w * (W - L - R); };
  auto sy = [&](double v) { return T + (hi - v) / (hi - lo) * (H - T - B); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  auto path = [&](const std::vector<double>& ys) {
    std::ostringstream p;
    for (std::size_t k = 0; k < ys.size(); ++k) p << (k ? " L" : "M") << num(sx(f.omega[k])) << ',' << num(sy(ys[k]));
    return p.str();
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">f_PZF and f_ZF, alpha="
     << format_double(alpha) << " beta=" << format_double(beta) << " eps=" << format_double(eps) << "</text>\n"
     << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double w = k / 5.0;
    os << "<line x1=\"" << num(sx(w)) << "\" y1=\"" << H - B << "\" x2=\"" << num(sx(w)) << "\" y2=\"" << H - B + 5
       << "\" stroke=\"black\"/><text x=\"" << num(sx(w)) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
       << num(w) << "</text>\n";
    const double v = lo + (hi - lo) * k / 5.0;
    os << "<line x1=\"" << L - 5 << "\" y1=\"" << num(sy(v)) << "\" x2=\"" << L << "\" y2=\"" << num(sy(v))
       << "\" stroke=\"black\"/><text x=\"" << L - 8 << "\" y=\"" << num(sy(v) + 4) << "\" text-anchor=\"end\">"
       << num(v) << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">missing ratio omega</text>\n"
     << "<line x1=\"" << L << "\" y1=\"" << num(sy(0.0)) << "\" x2=\"" << W - R << "\" y2=\"" << num(sy(0.0))
     << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n"
     << "<path d=\"" << path(f.pzf) << "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n"
     << "<path d=\"" << path(f.zf) << "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>\n"
     << "<text x=\"" << W - R - 10 << "\" y=\"" << T + 18 << "\" text-anchor=\"end\" fill=\"#1f77b4\">f_PZF</text>\n"
     << "<text x=\"" << W - R - 10 << "\" y=\"" << T + 34 << "\" text-anchor=\"end\" fill=\"#d62728\">f_ZF</text>\n"
     << "</svg>\n";
  return os.str();
}

/// Writes `out_svg` and a CSV next to it (same stem, .csv extension).
inline Fig1Data emit_fig1(double alpha, double beta, double eps, int points, const std::string& out_svg) {
  const Fig1Data f = fig1_curves(alpha, beta, eps, points);
  const std::filesystem::path svg(out_svg);
  if (svg.has_parent_path()) std::filesystem::create_directories(svg.parent_path());
  std::filesystem::path csv = svg;
  csv.replace_extension(".csv");
  std::ofstream c(csv), s(svg);
  require(static_cast<bool>(c) && static_cast<bool>(s), ErrorCode::Io, "cannot write " + out_svg);
  c << fig1_csv(f);
  s << fig1_svg(f, alpha, beta, eps);
  return f;
}

/// Largest grid omega up to which the curve stays positive (0 if it starts
/// nonpositive).
inline double positive_prefix(const std::vector<double>& omega, const std::vector<double>& f) {
  double end = 0.0;
  for (std::size_t k = 0; k < f.size() && f[k] > 0.0; ++k) end = omega[k];
  return end;
}

// ---------------------------------------------------------------------------
// Certificates against actual solves

struct Confusion {
  long certified_preserved = 0;
  long certified_violated = 0;
  long uncertified_preserved = 0;
  long uncertified_violated = 0;

  void add(bool certified, bool preserved) {
    if (certified)
      ++(preserved ? certified_preserved : certified_violated);
    else
      ++(preserved ? uncertified_preserved : uncertified_violated);
  }
  long total() const { return certified_preserved + certified_violated + uncertified_preserved + uncertified_violated; }
};

struct ComparisonRow {
  Index anchor = 0;
  double lambda = 0.0;
  Theorem theorem = Theorem::T8;
  Verdict verdict = Verdict::NotCertified;
  bool preserved = false;  // nonzero and subspace preserving
  bool solver_converged = false;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  std::map<Theorem, Confusion> confusion;

  long certified_violated() const {
    long v = 0;
    for (const auto& [t, c] : confusion) v += c.certified_violated;
    return v;
  }
};

struct CompareOptions {
  std::vector<double> lambda_grid;   // absolute lambdas, or multiples of 1/zeta when `relative`
  bool relative = false;             // zeta of the complete view at each anchor
  std::vector<Index> anchors;        // empty: every point
  std::vector<Theorem> theorems{Theorem::T3, Theorem::T5, Theorem::T8};
  GeometryOptions geometry{};        // inradius_method must be set for T1
  double sp_rel_threshold = 1e-6;
};

inline Variant variant_for(Theorem t) {
  switch (t) {
    case Theorem::T3: return Variant::ProjectedZeroFilled;
    case Theorem::T5: return Variant::ZeroFilled;
    case Theorem::T1:
    case Theorem::T8: return Variant::Complete;
    default: break;
  }
  throw Error(ErrorCode::NotApplicable, std::string("no per-lambda comparison for ") + to_string(t));
}

/// For every anchor and lambda, evaluates the requested theorems and solves
/// the matching full Lasso problem, tabulating verdict against outcome.
inline ComparisonReport compare_certificates(const MaskedDataset& data, const SubspaceArrangement& arr,
                                             const CompareOptions& opts) {
  require(!opts.lambda_grid.empty(), ErrorCode::InvalidArgument, "empty lambda grid");
  ComparisonReport rep;
  std::vector<Index> anchors = opts.anchors;
  if (anchors.empty())
    for (Index j = 0; j < data.size(); ++j) anchors.push_back(j);
  for (Index a : anchors) {
    double scale = 1.0;
    if (opts.relative) {
      const AnchorProblem p = make_anchor_problem(data, arr, a, Variant::Complete);
      scale = 1.0 / compute_zeta(p);
    }
    std::optional<InradiusResult> radius;
    for (double g : opts.lambda_grid) {
      const double lambda = g * scale;
      for (Theorem t : opts.theorems) {
        const Variant v = variant_for(t);
        ComparisonRow row;
        row.anchor = a;
        row.lambda = lambda;
        row.theorem = t;
        const LassoSolution s = express_column(data, v, a, lambda, opts.geometry.lasso);
        row.solver_converged = s.converged;
        row.preserved = subspace_preserving(s.coeffs, data.labels(), a, opts.sp_rel_threshold);
        try {
          const AnchorProblem p = make_anchor_problem(data, arr, a, v);
          GeometryOptions gopts = opts.geometry;
          gopts.inradius_method.reset();
          const GeometryReport geo = analyze_anchor(p, view_of(v), lambda, Matrix(), gopts);
          CertificateReport c;
          if (t == Theorem::T1) {
            require(opts.geometry.inradius_method.has_value(), ErrorCode::InvalidArgument, "T1 needs an inradius method");
            if (!radius)
              radius = inradius(select_columns(data.points(), data.companions(a)), *opts.geometry.inradius_method,
                                opts.geometry.inradius);
            c = certify_t1(geo.mu_lambda, radius->value, geo.zeta, lambda, radius->certified);
          } else {
            c = certify_variant(v, geo, lambda);
          }
          row.verdict = c.verdict;
        } catch (const Error& e) {
          if (e.code() == ErrorCode::InvalidArgument) throw;
          row.verdict = Verdict::NotCertified;
        }
        rep.confusion[t].add(row.verdict == Verdict::Certified, row.preserved);
        rep.rows.push_back(row);
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Bounded additive noise

/// One noisy anchor: clean points X, perturbed points X + Delta.
struct NoiseTrial {
  double r = 0.0;
  bool r_certified = false;
  double mu_prime = 0.0;
  double delta = 0.0;  // max column norm of Delta
  CertificateReport t7;
  CertificateReport t5;  // gap / interval for the noisy data read as ZF data with leak -Delta
  bool preserved = false;
  double lambda = 0.0;
};

/// Evaluates the noise certificate at `lambda` for column `anchor`.
/// mu' uses the dual direction of the noisy reduced problem against the clean
/// other-cluster points; the solver check runs on the noisy data.
inline NoiseTrial noise_trial(const Matrix& clean, const Matrix& noise, const Labels& labels,
                              const SubspaceArrangement& arr, Index anchor, double lambda,
                              InradiusMethod method, const InradiusOptions& ropts = {}, const LassoOptions& lasso = {}) {
  require(clean.rows() == noise.rows() && clean.cols() == noise.cols(), ErrorCode::InvalidArgument,
          "noise shape differs from data");
  NoiseTrial t;
  t.lambda = lambda;
  t.delta = noise.colwise().norm().maxCoeff();
  AnchorProblem p;
  p.view = clean + noise;
  p.leak = -noise;
  p.labels = labels;
  p.anchor = anchor;
  p.basis = arr.basis(labels[static_cast<std::size_t>(anchor)]);

  std::vector<Index> comp;
  for (Index j = 0; j < clean.cols(); ++j)
    if (j != anchor && labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(anchor)]) comp.push_back(j);
  const InradiusResult rr = inradius(select_columns(clean, comp), method, ropts);
  t.r = rr.value;
  t.r_certified = rr.certified;

  const MuResult mu = compute_mu(p, lambda, lasso);
  for (Index k : p.others()) t.mu_prime = std::max(t.mu_prime, std::abs(clean.col(k).dot(mu.direction)));
  t.t7 = certify_t7_noise(t.r, t.mu_prime, t.delta, t.r_certified);

  GeometryOptions gopts;
  gopts.lasso = lasso;
  const GeometryReport geo = analyze_anchor(p, ViewTag::ZeroFilled, lambda, Matrix(), gopts);
  t.t5 = certify_t5_zf(geo, lambda);

  const auto idx = detail::all_but(clean.cols(), anchor);
  const LassoSolution s = solve_lasso(p.view(Eigen::all, idx), p.view.col(anchor), lambda, lasso);
  Vector full = Vector::Zero(clean.cols());
  for (std::size_t a = 0; a < idx.size(); ++a) full(idx[a]) = s.coeffs(static_cast<Index>(a));
  t.preserved = subspace_preserving(full, labels, anchor);
  return t;
}

// ---------------------------------------------------------------------------
// Lemma validator CSV

inline std::string lemma_csv_header() { return "lemma,params,trials,exceedances,empirical_rate,bound,tolerance,verdict"; }

inline std::string to_csv_row(const LemmaCheck& c) {
  std::ostringstream os;
  os << c.name << ",\"" << c.params << "\"," << c.trials << ',' << c.exceedances << ','
     << format_double(c.empirical_rate) << ',' << format_double(c.bound) << ',' << format_double(c.tolerance) << ','
     << (c.pass() ? "PASS" : "FAIL");
  return os.str();
}

}  // namespace ssc
