// Command-line front end: dataset generation, clustering, certificates,
// sweeps, f-curves and the concentration validators.

#include "ssc/ssc.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace ssc;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out_dir = ".";
};

// Bare file names land in --out-dir; anything with a directory part is used as given.
std::string in_out_dir(const Globals& g, const std::string& name) {
  fs::path p(name);
  if (!p.is_absolute() && name.find('/') == std::string::npos) p = fs::path(g.out_dir) / name;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p.string();
}

std::ofstream open_out(const std::string& path) {
  const auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + path);
  return out;
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string s;
  for (const auto& f : flags) s += (s.empty() ? "" : ";") + f;
  return s;
}

std::string join_inputs(const std::map<std::string, double>& inputs) {
  std::string s;
  for (const auto& [k, v] : inputs) s += (s.empty() ? "" : ";") + k + "=" + format_double(v);
  return s;
}

std::string certificate_csv_header() {
  return "anchor,theorem,lambda,verdict,gap_condition,margin,lambda_lower,lambda_upper,lambda_member,flags,inputs";
}

std::string certificate_csv_row(long anchor, const CertificateReport& c) {
  std::ostringstream os;
  os << anchor << ',' << to_string(c.theorem) << ',' << (c.lambda ? format_double(*c.lambda) : "") << ','
     << to_string(c.verdict) << ',' << (c.gap_condition ? 1 : 0) << ',' << format_double(c.margin) << ',';
  if (c.lambda_interval)
    os << format_double(c.lambda_interval->lower) << ',' << format_double(c.lambda_interval->upper);
  else
    os << ',';
  os << ',' << (c.lambda_member ? (*c.lambda_member ? "1" : "0") : "") << ',' << join_flags(c.flags) << ",\""
     << join_inputs(c.inputs) << '"';
  return os.str();
}

std::vector<double> parse_grid(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = spec.find(':', a == std::string::npos ? a : a + 1);
  require(a != std::string::npos && b != std::string::npos, ErrorCode::InvalidArgument,
          "lambda grid must be lo:hi:steps");
  return log_grid(std::stod(spec.substr(0, a)), std::stod(spec.substr(a + 1, b - a - 1)),
                  std::stoi(spec.substr(b + 1)));
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

// Dimension and density implied by a dataset: d from the span of cluster 0,
// rho = (N_i - 1) / d.
std::pair<int, double> infer_model(const MaskedDataset& data) {
  const auto members = data.members(0);
  const int d = static_cast<int>(numerical_rank(select_columns(data.points(), members)));
  return {d, static_cast<double>(members.size() - 1) / d};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse subspace clustering with missing entries: certificates and experiments"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "directory for outputs and the run manifest")->capture_default_str();

  // generate
  RandomModelParams gen;
  std::string gen_out = "dataset.txt";
  auto* cmd_gen = app.add_subcommand("generate", "draw a dataset from the random model");
  cmd_gen->add_option("--n", gen.n, "subspaces")->capture_default_str();
  cmd_gen->add_option("--d", gen.d, "subspace dimension")->capture_default_str();
  cmd_gen->add_option("--D", gen.D, "ambient dimension")->capture_default_str();
  cmd_gen->add_option("--rho", gen.rho, "density; rho*d+1 points per subspace")->capture_default_str();
  cmd_gen->add_option("--m", gen.m, "missing entries per point")->capture_default_str();
  cmd_gen->add_option("--out", gen_out, "dataset path")->capture_default_str();

  // cluster
  std::string cl_in, cl_out = "clusters.csv", cl_variant = "pzf";
  double cl_lambda = 0.0, cl_adaptive = 2.0;
  auto* cmd_cl = app.add_subcommand("cluster", "self-expression, affinity and spectral clustering");
  cmd_cl->add_option("--in", cl_in, "dataset path")->required();
  cmd_cl->add_option("--variant", cl_variant, "complete, zf or pzf")
      ->transform(CLI::IsMember({"complete", "zf", "pzf"}, CLI::ignore_case))
      ->capture_default_str();
  auto* opt_lambda = cmd_cl->add_option("--lambda", cl_lambda, "fixed lambda");
  auto* opt_adaptive = cmd_cl->add_option("--adaptive", cl_adaptive, "adaptive factor a > 1")->capture_default_str();
  opt_lambda->excludes(opt_adaptive);
  cmd_cl->add_option("--out", cl_out, "output CSV")->capture_default_str();

  // certify
  std::string ce_in, ce_view = "pzf", ce_theorem = "t3", ce_grid, ce_out = "certificates.csv";
  long ce_anchor = -1;
  double ce_eps = 0.001, ce_delta = 0.0;
  auto* cmd_ce = app.add_subcommand("certify", "evaluate a theorem's certificate on a dataset");
  cmd_ce->add_option("--in", ce_in, "dataset path")->required();
  cmd_ce->add_option("--view", ce_view, "complete, zf or pzf")
      ->transform(CLI::IsMember({"complete", "zf", "pzf"}, CLI::ignore_case))
      ->capture_default_str();
  cmd_ce->add_option("--theorem", ce_theorem, "t1, t3, t4, t5, t6, t7 or t8")
      ->transform(CLI::IsMember({"t1", "t3", "t4", "t5", "t6", "t7", "t8"}, CLI::ignore_case))
      ->capture_default_str();
  cmd_ce->add_option("--lambda-grid", ce_grid, "lo:hi:steps, log spaced (default 0.5/zeta..20/zeta, 40 steps)");
  cmd_ce->add_option("--anchor", ce_anchor, "anchor column (default: all)");
  cmd_ce->add_option("--epsilon", ce_eps, "epsilon for t4/t6")->capture_default_str();
  cmd_ce->add_option("--delta", ce_delta, "noise level for t7")->capture_default_str();
  cmd_ce->add_option("--out", ce_out, "output CSV")->capture_default_str();

  // sweep
  std::string sw_config, sw_out = "sweep.csv", sw_omega;
  int sw_trials = -1;
  bool sw_no_cert = false;
  auto* cmd_sw = app.add_subcommand("sweep", "missing-ratio sweep, resumable");
  cmd_sw->add_option("--config", sw_config, "key=value profile");
  cmd_sw->add_option("--trials", sw_trials, "override trials per grid point");
  cmd_sw->add_option("--omega", sw_omega, "override grid, comma separated");
  cmd_sw->add_flag("--no-certificates", sw_no_cert, "skip per-column certificates");
  cmd_sw->add_option("--out", sw_out, "output CSV")->capture_default_str();

  // fig1
  double f_alpha = 0.9, f_beta = 0.01, f_eps = 0.001;
  int f_points = 1000;
  std::string f_out = "fig1.svg";
  auto* cmd_f = app.add_subcommand("fig1", "f_pzf and f_zf curves over the missing ratio");
  cmd_f->add_option("--alpha", f_alpha)->capture_default_str();
  cmd_f->add_option("--beta", f_beta)->capture_default_str();
  cmd_f->add_option("--epsilon", f_eps)->capture_default_str();
  cmd_f->add_option("--points", f_points)->capture_default_str();
  cmd_f->add_option("--out", f_out, "SVG path; CSV written alongside")->capture_default_str();

  // validate-lemmas
  long vl_trials = 10000;
  std::string vl_out = "lemmas.csv";
  auto* cmd_vl = app.add_subcommand("validate-lemmas", "Monte-Carlo checks of the concentration bounds");
  cmd_vl->add_option("--trials", vl_trials, "trials for the tail checks (inradius uses trials/50)")
      ->capture_default_str();
  cmd_vl->add_option("--out", vl_out, "output CSV")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    std::ostringstream cmdline;
    for (int k = 1; k < argc; ++k) cmdline << (k > 1 ? " " : "") << argv[k];

    if (cmd_gen->parsed()) {
      gen.seed = g.seed;
      gen.validate();
      const GeneratedInstance inst = generate(gen);
      const std::string path = in_out_dir(g, gen_out);
      save_dataset(path, inst.data);
      std::ostringstream cfg;
      cfg << "n=" << gen.n << "\nd=" << gen.d << "\nD=" << gen.D << "\nrho=" << format_double(gen.rho)
          << "\nm=" << gen.m << "\n";
      write_manifest(g.out_dir, cmdline.str(), cfg.str(), g.seed);
      std::cout << "wrote " << path << " (N=" << inst.data.size() << ")\n";
    } else if (cmd_cl->parsed()) {
      const MaskedDataset data = load_dataset(cl_in);
      const LambdaRule rule = opt_lambda->count() ? LambdaRule::fixed(cl_lambda) : LambdaRule::adaptive(cl_adaptive);
      SelfExpressOptions eo;
      eo.threads = g.threads;
      SpectralOptions so;
      so.seed = g.seed;
      const PipelineResult r = run_pipeline(data, parse_variant(cl_variant), rule, eo, so);
      const std::string path = in_out_dir(g, cl_out);
      auto out = open_out(path);
      out << "point,label,assignment,sp_flag,lambda_used\n";
      for (Index j = 0; j < data.size(); ++j) {
        const auto jj = static_cast<std::size_t>(j);
        out << j << ',' << data.label(j) << ',' << r.clustering.assignments[jj] << ','
            << (r.expression.sp_flags[jj] ? 1 : 0) << ',' << format_double(r.expression.lambdas[jj]) << '\n';
      }
      out << "\nsp_rate,clustering_error\n"
          << format_double(r.clustering.sp_rate) << ',' << format_double(r.clustering.clustering_error) << '\n';
      write_manifest(g.out_dir, cmdline.str(), "variant=" + cl_variant + "\nlambda_rule=" + rule.describe() + "\n",
                     g.seed);
      std::printf("sp_rate=%.4f clustering_error=%.4f", r.clustering.sp_rate, r.clustering.clustering_error);
      if (!r.clustering.flags.empty()) std::printf(" flags=%s", join_flags(r.clustering.flags).c_str());
      std::printf("\n");
    } else if (cmd_ce->parsed()) {
      const MaskedDataset data = load_dataset(ce_in);
      const SubspaceArrangement arr = estimate_arrangement(data);
      const Theorem thm = parse_theorem(ce_theorem);
      const Variant variant = parse_variant(ce_view);
      const std::string path = in_out_dir(g, ce_out);
      auto out = open_out(path);
      out << certificate_csv_header() << '\n';
      long certified = 0, rows = 0;
      if (thm == Theorem::T4 || thm == Theorem::T6) {
        const auto [d, rho] = infer_model(data);
        RandomModelParams p;
        p.n = data.cluster_count();
        p.d = d;
        p.D = static_cast<int>(data.ambient_dim());
        p.rho = rho;
        const double w = data.missing_ratio();
        const double n_total = static_cast<double>(data.size());
        const double beta = std::sqrt(6.0 * std::log(n_total) / p.D);
        const CertificateReport c = thm == Theorem::T4 ? certify_t4(w, p.alpha(), beta, ce_eps)
                                                       : certify_t6(w, p.alpha(), beta, ce_eps);
        out << certificate_csv_row(-1, c) << '\n';
        certified += c.certified();
        ++rows;
      } else {
        std::vector<Index> anchors;
        if (ce_anchor >= 0)
          anchors.push_back(ce_anchor);
        else
          for (Index j = 0; j < data.size(); ++j) anchors.push_back(j);
        for (Index a : anchors) {
          const AnchorProblem p = make_anchor_problem(data, arr, a, variant);
          const double zeta = compute_zeta(p);
          const auto grid = ce_grid.empty() ? default_lambda_grid(zeta) : parse_grid(ce_grid);
          std::optional<InradiusResult> radius;
          if (thm == Theorem::T1 || thm == Theorem::T7)
            radius = inradius_auto(select_columns(data.points(), data.companions(a)), {.seed = g.seed});
          for (double lambda : grid) {
            const GeometryReport geo = analyze_anchor(p, view_of(variant), lambda, Matrix());
            CertificateReport c;
            switch (thm) {
              case Theorem::T1: c = certify_t1(geo.mu_lambda, radius->value, geo.zeta, lambda, radius->certified); break;
              case Theorem::T3: c = certify_t3_pzf(geo, lambda); break;
              case Theorem::T5: c = certify_t5_zf(geo, lambda); break;
              case Theorem::T8: c = certify_t8(geo.mu_lambda, geo.zeta, lambda); break;
              case Theorem::T7:
                c = certify_t7_noise(radius->value, geo.mu_lambda, ce_delta, radius->certified);
                c.lambda = lambda;
                break;
              default: break;
            }
            out << certificate_csv_row(a, c) << '\n';
            certified += c.certified();
            ++rows;
          }
        }
      }
      write_manifest(g.out_dir, cmdline.str(), "view=" + ce_view + "\ntheorem=" + ce_theorem + "\n", g.seed);
      std::cout << certified << " of " << rows << " rows certified; wrote " << path << "\n";
    } else if (cmd_sw->parsed()) {
      SweepConfig cfg = sw_config.empty() ? SweepConfig{} : SweepConfig::from_config(Config::load(sw_config));
      if (!sw_config.empty() && !Config::load(sw_config).has("model.seed")) cfg.model.seed = g.seed;
      if (sw_config.empty()) cfg.model.seed = g.seed;
      if (sw_trials > 0) cfg.trials = sw_trials;
      if (!sw_omega.empty()) cfg.omega_grid = parse_list(sw_omega);
      if (sw_no_cert) cfg.certificates = false;
      const std::string path = in_out_dir(g, sw_out);
      const SweepResult res = run_sweep(cfg, {path, g.threads});
      write_manifest(g.out_dir, cmdline.str(), cfg.to_text(), cfg.model.seed);
      if (res.resumed_blocks) std::cout << "resumed " << res.resumed_blocks << " grid point(s) from " << path << "\n";
      std::cout << "omega";
      for (Variant v : cfg.variants) std::cout << "  sp_rate(" << to_string(v) << ")";
      std::cout << "\n";
      for (double w : cfg.omega_grid) {
        std::printf("%5.2f", w);
        for (Variant v : cfg.variants) std::printf("  %12.4f", res.mean_sp_rate(w, v));
        std::printf("\n");
      }
      std::cout << "certified-but-violated columns: " << res.total_violations() << "\nwrote " << path << "\n";
    } else if (cmd_f->parsed()) {
      const std::string path = in_out_dir(g, f_out);
      const Fig1Data f = emit_fig1(f_alpha, f_beta, f_eps, f_points, path);
      write_manifest(g.out_dir, cmdline.str(),
                     "alpha=" + format_double(f_alpha) + "\nbeta=" + format_double(f_beta) +
                         "\nepsilon=" + format_double(f_eps) + "\npoints=" + std::to_string(f_points) + "\n",
                     g.seed);
      std::printf("f_pzf > 0 up to omega=%.4f, f_zf > 0 up to omega=%.4f\nwrote %s\n",
                  positive_prefix(f.omega, f.pzf), positive_prefix(f.omega, f.zf), path.c_str());
    } else if (cmd_vl->parsed()) {
      RandomModelParams ip;
      ip.d = 2;
      ip.rho = 50;
      ip.seed = g.seed;
      const std::vector<LemmaCheck> checks{
          validate_inradius_bound(std::max(1L, vl_trials / 50), ip),
          validate_inner_product_tail(vl_trials, 100, 0.5, g.seed),
          validate_projection_norm(vl_trials, 100, 25, 0.2, g.seed),
      };
      const std::string path = in_out_dir(g, vl_out);
      auto out = open_out(path);
      out << lemma_csv_header() << '\n';
      for (const auto& c : checks) {
        out << to_csv_row(c) << '\n';
        std::cout << to_csv_row(c) << (c.regime_ok ? "" : " (outside the asymptotic regime)") << '\n';
      }
      write_manifest(g.out_dir, cmdline.str(), "trials=" + std::to_string(vl_trials) + "\n", g.seed);
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
