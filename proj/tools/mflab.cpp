// mflab — command-line front end for the mean-field laboratory.
//
//   mflab <verb> --config <file> [--out <dir>] [--seed <u64>]
//
// Verbs: scat, microstructure, gnorms, smear, weights, gp, nbody,
// run, validate.  Exit code 0 = all PASS, 1 = any FAIL, 2 = bad config.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mflab/harness.hpp"

namespace {

using mflab::json;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  bool seed_set = false;
  bool out_set = false;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config_path, "JSON configuration file")->required();
  sub->add_option("--out", o.out_dir, "output directory")->each([&](const std::string&) {
    o.out_set = true;
  });
  sub->add_option("--seed", o.seed, "RNG seed")->each([&](const std::string&) {
    o.seed_set = true;
  });
}

json load(const CommonOpts& o) { return mflab::read_json_file(o.config_path); }

mflab::RadialProfile base_potential(const json& cfg) {
  return mflab::cfg::potential(cfg.at("potential"));
}

std::vector<long> n_values(const json& cfg) {
  std::vector<long> ns;
  if (cfg.contains("N") && cfg["N"].is_array())
    for (const auto& v : cfg["N"]) ns.push_back(v.get<long>());
  else if (cfg.contains("N"))
    ns.push_back(cfg["N"].get<long>());
  else
    throw mflab::ConfigError("config: missing N");
  return ns;
}

int emit(const mflab::CsvTable& table, const CommonOpts& o, const char* name) {
  if (o.out_set) {
    std::filesystem::create_directories(o.out_dir);
    table.write(std::filesystem::path(o.out_dir) / name);
  } else {
    std::cout << table.to_string();
  }
  return 0;
}

// scat: per-N scattering summary for a β-scaled potential
int cmd_scat(const CommonOpts& o) {
  const json cfg = load(o);
  const auto base = base_potential(cfg);
  const double beta = cfg.value("beta", 1.0);
  mflab::CsvTable t({"N", "scat_length[len]", "coupling_4piN_scat[len]", "l1_norm[len^2]"});
  for (long N : n_values(cfg)) {
    const auto V = mflab::scale(base, N, beta);
    const double a = mflab::scat(V);
    t.add_row({double(N), a, 4.0 * mflab::pi * double(N) * a, V.l1_norm()});
  }
  t.sort_rows();
  return emit(t, o, "scat.csv");
}

// microstructure: compensator construction (a_N, K, R_flat) + profile dump
int cmd_microstructure(const CommonOpts& o) {
  const json cfg = load(o);
  const auto base = base_potential(cfg);
  const double beta = cfg.value("beta", 1.0);
  const double beta1 = cfg.at("beta1").get<double>();
  mflab::CsvTable t({"N", "a_N[len]", "K", "R_flat[len]", "W_height[1/len^2]",
                     "compensation_integral"});
  json dumps = json::array();
  const bool dump = cfg.value("dump_profile", false);
  for (long N : n_values(cfg)) {
    const auto V = mflab::scale(base, N, beta);
    const auto c = mflab::build_compensator(V, beta1);
    t.add_row({double(N), c.a_N, c.K, c.W_outer_radius, c.W_height,
               mflab::compensation_integral(c)});
    if (dump) {
      json prof;
      prof["N"] = N;
      json rows = json::array();
      const std::size_t pts = 400;
      for (std::size_t i = 1; i <= pts; ++i) {
        const double r = c.W_outer_radius * double(i) / double(pts);
        rows.push_back({r, c.f(r), V(r), c.W(r)});
      }
      prof["columns"] = {"r", "f", "V", "W"};
      prof["rows"] = rows;
      dumps.push_back(prof);
    }
  }
  t.sort_rows();
  if (dump && o.out_set) {
    std::filesystem::create_directories(o.out_dir);
    mflab::write_text(std::filesystem::path(o.out_dir) / "profiles.json",
                      dumps.dump(2) + "\n");
  }
  return emit(t, o, "microstructure.csv");
}

// gnorms: norms of g = 1 - f over N
int cmd_gnorms(const CommonOpts& o) {
  const json cfg = load(o);
  const auto base = base_potential(cfg);
  const double beta = cfg.value("beta", 1.0);
  const double beta1 = cfg.at("beta1").get<double>();
  mflab::CsvTable t({"N", "g_l1[len^3]", "g_l2[len^1.5]", "g_l3[len]"});
  for (long N : n_values(cfg)) {
    const auto c = mflab::build_compensator(mflab::scale(base, N, beta), beta1);
    const auto gn = mflab::g_norms(c);
    t.add_row({double(N), gn.l1, gn.l2, gn.l3});
  }
  t.sort_rows();
  return emit(t, o, "gnorms.csv");
}

int cmd_smear(const CommonOpts& o) {
  const json cfg = load(o);
  mflab::ExperimentConfig ec;
  ec.kind = "smear-sweep";
  ec.params = cfg;
  const auto rep = mflab::run_smear_sweep(ec);
  emit(rep.series, o, "smear.csv");
  return rep.pass ? 0 : 1;
}

int cmd_weights(const CommonOpts& o, long N, bool dump) {
  if (dump) {
    const auto fam = mflab::build_m_family(N);
    mflab::CsvTable t({"j", "k", "m"});
    for (int j = 0; j <= 5; ++j)
      for (long k = 0; k <= N; ++k) t.add_row({double(j), double(k), fam.m(j, k)});
    emit(t, o, "weights.csv");
  }
  const auto rep = mflab::check_bounds(mflab::build_m_family(N));
  if (!dump) {
    std::cout << "N=" << N << " recursion_residual=" << mflab::fmt_num(rep.recursion_residual)
              << " violations=" << rep.violations << "\n";
  }
  return rep.violations == 0 ? 0 : 1;
}

int run_experiment(const CommonOpts& o, const std::string& kind) {
  json cfg = load(o);
  json wrapped;
  if (cfg.contains("experiment")) {
    wrapped = cfg;  // full experiment config accepted directly
  } else {
    wrapped["experiment"] = kind;
    wrapped["params"] = cfg;
  }
  auto ec = mflab::ExperimentConfig::from_json(wrapped);
  if (o.out_set) ec.out_dir = o.out_dir;
  if (o.seed_set) ec.seed = o.seed;
  const auto diags = mflab::validate(ec);
  if (!diags.empty()) {
    for (const auto& d : diags) std::cerr << "config: " << d << "\n";
    return 2;
  }
  const auto rep = mflab::run(ec);
  mflab::persist(ec, rep);
  if (ec.out_dir.empty()) std::cout << rep.series.to_string();
  std::cout << (rep.pass ? "PASS" : "FAIL") << " " << rep.kind << "\n";
  for (const auto& n : rep.notes) std::cout << "  " << n << "\n";
  return rep.pass ? 0 : 1;
}

int cmd_nbody(const CommonOpts& o) {
  const json cfg = load(o);
  const auto t = mflab::nbody_time_series(cfg.contains("params") ? cfg["params"] : cfg);
  return emit(t, o, "nbody.csv");
}

int cmd_validate(const CommonOpts& o) {
  json cfg = load(o);
  if (!cfg.contains("experiment"))
    throw mflab::ConfigError("validate: config must name an experiment");
  const auto ec = mflab::ExperimentConfig::from_json(cfg);
  const auto diags = mflab::validate(ec);
  for (const auto& d : diags) std::cout << d << "\n";
  if (diags.empty()) std::cout << "ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mean-field laboratory"};
  app.require_subcommand(1);

  CommonOpts o;
  long weights_N = 0;
  bool weights_dump = false;

  auto* scat = app.add_subcommand("scat", "scattering length sweep");
  add_common(scat, o);
  auto* micro = app.add_subcommand("microstructure", "compensated pair construction");
  add_common(micro, o);
  auto* gnorms = app.add_subcommand("gnorms", "norms of the correlation deficit g = 1 - f");
  add_common(gnorms, o);
  auto* smear = app.add_subcommand("smear", "smeared potential audit");
  add_common(smear, o);
  auto* weights = app.add_subcommand("weights", "weight family audit / dump");
  weights->add_option("--N", weights_N, "number of particles")->required();
  weights->add_flag("--dump", weights_dump, "emit CSV (j, k, m)");
  weights->add_option("--out", o.out_dir, "output directory")->each([&](const std::string&) {
    o.out_set = true;
  });
  auto* gp = app.add_subcommand("gp", "condensate equation run");
  add_common(gp, o);
  auto* nbody = app.add_subcommand("nbody", "exact N-body run vs condensate");
  add_common(nbody, o);
  auto* runv = app.add_subcommand("run", "named experiment from a full config");
  add_common(runv, o);
  auto* val = app.add_subcommand("validate", "static config checks only");
  add_common(val, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (scat->parsed()) return cmd_scat(o);
    if (micro->parsed()) return cmd_microstructure(o);
    if (gnorms->parsed()) return cmd_gnorms(o);
    if (smear->parsed()) return cmd_smear(o);
    if (weights->parsed()) return cmd_weights(o, weights_N, weights_dump);
    if (gp->parsed()) return run_experiment(o, "gp-run");
    if (nbody->parsed()) return cmd_nbody(o);
    if (runv->parsed()) return run_experiment(o, "");
    if (val->parsed()) return cmd_validate(o);
  } catch (const mflab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mflab::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
