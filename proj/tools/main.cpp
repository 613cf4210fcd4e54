#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli.hpp"
#include "ercomp/errors.hpp"

namespace {

using ercomp::Rational;

std::optional<Rational> rational_flag(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return ercomp::parse_rational(text);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace ercomp::cli;
  CLI::App app{"Exact and simulated component laws of Erdos-Renyi graphs"};
  app.require_subcommand(1);

  std::string format = "json";
  std::string out;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", out, "write the report here instead of stdout");
  };

  // Rational flags are taken as text and parsed exactly.
  int n = 1;
  std::string p_text, t_text, precision;
  long j = 0;
  std::uint64_t seed = 1, replicas = 0;
  int threads = 1;

  auto* exact = app.add_subcommand("exact-dist", "law of |C| in G(n,p)");
  exact->add_option("--n", n)->required();
  exact->add_option("--p", p_text, "edge probability (fraction or decimal)");
  exact->add_option("--t", t_text, "intensity, p = 1 - exp(-t/n); wins over --p");
  exact->add_option("--precision", precision, "double | ext:<bits> | rational");
  common(exact);

  int n_max = 12, com_max = 10;
  auto* verify = app.add_subcommand("verify-identity", "shift identity and change-of-measure sweeps");
  verify->add_option("--n", n_max, "largest n in the sweep (the n of a single case with --j)");
  verify->add_option("--com-max", com_max, "largest M, N in the change-of-measure sweep");
  verify->add_option("--p", p_text, "single p instead of the grid 1/10..9/10");
  auto* j_opt = verify->add_option("--j", j, "check the single shift j at n");
  verify->add_option("--precision", precision);
  common(verify);

  int recover_n = 10;
  auto* recover = app.add_subcommand("recover", "law of |C| from the shift identities alone");
  recover->add_option("--n", recover_n)->required();
  recover->add_option("--p", p_text);
  recover->add_option("--t", t_text);
  recover->add_option("--precision", precision);
  common(recover);

  std::vector<int> n_list;
  std::string t_sus = "1/2";
  auto* sus = app.add_subcommand("susceptibility", "exact moments against their expansions");
  sus->add_option("--t", t_sus);
  sus->add_option("--n", n_list, "list of n (default 250 500 1000 2000)");
  sus->add_option("--precision", precision);
  common(sus);

  int clt_n = 50000;
  std::optional<double> clt_t, clt_p;
  std::string raw_csv;
  auto* clt = app.add_subcommand("clt", "giant-component fluctuations by simulation");
  clt->add_option("--n", clt_n);
  clt->add_option("--t", clt_t);
  clt->add_option("--p", clt_p);
  clt->add_option("--replicas", replicas);
  clt->add_option("--seed", seed);
  clt->add_option("--threads", threads);
  clt->add_option("--raw", raw_csv, "CSV file for the raw samples");
  common(clt);

  int rigid_n = 500;
  std::string rigid_t = "4/5";
  auto* rigid = app.add_subcommand("rigid", "rigid representation against the exact law");
  rigid->add_option("--n", rigid_n);
  rigid->add_option("--t", rigid_t);
  rigid->add_option("--replicas", replicas);
  rigid->add_option("--seed", seed);
  rigid->add_option("--threads", threads);
  rigid->add_option("--precision", precision);
  common(rigid);

  double u = 1.0;
  std::vector<double> betas;
  auto* crit = app.add_subcommand("critical-window", "exact critical-window functional");
  crit->add_option("--u", u);
  crit->add_option("--beta", betas, "one or more beta values (default 0.5)");
  crit->add_option("--n", n_list, "list of n (default 512 1728 4096)");
  crit->add_option("--precision", precision);
  common(crit);

  std::string preset = "all", p_matrix;
  std::vector<int> counts;
  auto* sbm = app.add_subcommand("sbm-verify", "stochastic block model identity sweeps");
  sbm->add_option("--preset", preset, "all | l1 | 2,2 | 3,2 | 2,3 | custom");
  sbm->add_option("--counts", counts, "label counts for the custom preset")->delimiter(',');
  sbm->add_option("--p-matrix", p_matrix, "rows ';'-separated, entries ','-separated");
  sbm->add_option("--precision", precision);
  common(sbm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  return run_and_emit(format, out, [&]() -> ExperimentReport {
    if (exact->parsed()) {
      return cmd_exact_dist({n, rational_flag(p_text), rational_flag(t_text), precision});
    }
    if (verify->parsed()) {
      VerifyIdentityOptions o;
      o.n_max = n_max;
      o.com_max = com_max;
      o.p = rational_flag(p_text);
      if (j_opt->count() > 0) o.j = j;
      if (!precision.empty()) o.precision = precision;
      return cmd_verify_identity(o);
    }
    if (recover->parsed()) {
      return cmd_recover({recover_n, rational_flag(p_text), rational_flag(t_text), precision});
    }
    if (sus->parsed()) {
      SusceptibilityOptions o;
      o.t = ercomp::parse_rational(t_sus);
      if (!n_list.empty()) o.n_list = n_list;
      if (!precision.empty()) o.precision = precision;
      return cmd_susceptibility(o);
    }
    if (clt->parsed()) {
      CltOptions o;
      o.n = clt_n;
      o.t = clt_t;
      o.p = clt_p;
      if (replicas > 0) o.replicas = replicas;
      o.seed = seed;
      o.threads = threads;
      o.raw_csv = raw_csv;
      return cmd_clt(o);
    }
    if (rigid->parsed()) {
      RigidOptions o;
      o.n = rigid_n;
      o.t = ercomp::parse_rational(rigid_t);
      if (replicas > 0) o.replicas = replicas;
      o.seed = seed;
      o.threads = threads;
      if (!precision.empty()) o.precision = precision;
      return cmd_rigid(o);
    }
    if (crit->parsed()) {
      CriticalWindowOptions o;
      o.u = u;
      if (!betas.empty()) o.betas = betas;
      if (!n_list.empty()) o.n_list = n_list;
      if (!precision.empty()) o.precision = precision;
      return cmd_critical_window(o);
    }
    SbmVerifyOptions o;
    o.preset = preset;
    o.counts = counts;
    o.p_matrix = p_matrix;
    if (!precision.empty()) o.precision = precision;
    return cmd_sbm_verify(o);
  });
}
