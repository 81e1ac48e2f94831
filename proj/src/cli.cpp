#include "uot/cli.h"

#include <omp.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "uot/checks.h"
#include "uot/divergences.h"
#include "uot/errors.h"
#include "uot/flows.h"
#include "uot/measure_io.h"

namespace uot::cli {

namespace {

using nlohmann::json;

struct Common {
  std::string entropy = "kl:rho=1";
  double eps = 1.0;
  double tol = 1e-9;
  int max_iter = 10000;
  std::string cost = "sqeuclidean";
  std::string out;
  std::string format = "json";
  int threads = 0;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--entropy", c.entropy, "balanced | kl:rho=R | tv:rho=R | range:a=A,b=B | power:rho=R,s=S | berg:rho=R");
  sub->add_option("--eps", c.eps, "Entropic regularization (> 0)");
  sub->add_option("--tol", c.tol, "Sup-norm tolerance on potential updates");
  sub->add_option("--max-iter", c.max_iter, "Maximum Sinkhorn sweeps");
  sub->add_option("--cost", c.cost, "sqeuclidean[:scale=S] | euclidean:p=P[,scale=S]");
  sub->add_option("--out", c.out, "Output file (default: stdout)");
  sub->add_option("--format", c.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--threads", c.threads, "Worker threads (default: UOT_THREADS or all cores)");
  sub->add_option("--seed", c.seed, "Seed for randomized instances");
}

CostSpec parse_cost(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::map<std::string, double> params;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ParseError("cost parameter without '=': " + item);
      try {
        params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
      } catch (const std::exception&) {
        throw ParseError("bad cost parameter value: " + item);
      }
    }
  }
  const double scale = params.count("scale") ? params["scale"] : 1.0;
  if (name == "sqeuclidean") return CostSpec::sq_euclidean(scale);
  if (name == "euclidean") return CostSpec::euclidean_pow(params.count("p") ? params["p"] : 1.0, scale);
  throw ParseError("unknown cost: " + spec);
}

SolveOptions solve_options(const Common& c) {
  SolveOptions o;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  return o;
}

void set_threads(int threads) {
  if (threads <= 0) {
    if (const char* env = std::getenv("UOT_THREADS")) threads = std::atoi(env);
  }
  if (threads > 0) omp_set_num_threads(threads);
}

json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json points_json(const Points& p) {
  json rows = json::array();
  for (Index i = 0; i < p.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < p.cols(); ++k) row.push_back(p(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json report_json(const SolveReport& r) {
  return {{"status", to_string(r.status)}, {"iterations", r.iterations}, {"final_update", r.final_update}};
}

json value_json(ExtendedReal v) { return v.is_infinite() ? json("+inf") : json(v.value()); }

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + c.out);
  f << text;
}

int cmd_solve(const Common& c, const std::string& pa, const std::string& pb, std::ostream& out, std::ostream& err) {
  const DiscreteMeasure a = read_measure(pa);
  const DiscreteMeasure b = read_measure(pb);
  const Entropy e = Entropy::parse(c.entropy);
  const CostSpec cost = parse_cost(c.cost);
  if (feasible(e, total_mass(a), total_mass(b)) == Feasibility::Infeasible) {
    err << "infeasible\n";
    return kInfeasible;
  }
  const SolveResult r = solve(a, b, cost_matrix(a.points(), b.points(), cost), e, c.eps, solve_options(c));
  const DualPotentials& p = *r.potentials;
  if (c.format == "csv") {
    std::string s = "side,i,potential\n";
    for (Index i = 0; i < p.f.size(); ++i) s += "a," + std::to_string(i) + "," + format_double(p.f[i]) + "\n";
    for (Index j = 0; j < p.g.size(); ++j) s += "b," + std::to_string(j) + "," + format_double(p.g[j]) + "\n";
    emit(c, s, out);
  } else {
    const json doc = {{"f", vec_json(p.f)},
                      {"g", vec_json(p.g)},
                      {"eps", p.eps},
                      {"entropy", e.to_string()},
                      {"report", report_json(r.report)}};
    emit(c, doc.dump() + "\n", out);
  }
  return kOk;
}

int cmd_div(const Common& c, const std::string& kind, const std::string& pa, const std::string& pb, std::ostream& out,
            std::ostream& err) {
  const DiscreteMeasure a = read_measure(pa);
  const Entropy e = Entropy::parse(c.entropy);
  const CostSpec cost = parse_cost(c.cost);
  const SolveOptions o = solve_options(c);
  DivergenceValue v;
  if (kind == "F") {
    v = sinkhorn_entropy_F(a, cost, e, c.eps, o);
  } else {
    if (pb.empty()) throw CLI::ValidationError("div --kind " + kind + " needs two measures");
    const DiscreteMeasure b = read_measure(pb);
    if (kind == "OT")
      v = ot_eps(a, b, cost, e, c.eps, o);
    else if (kind == "S")
      v = sinkhorn_divergence_S(a, b, cost, e, c.eps, o);
    else
      v = hausdorff_H(a, b, cost, e, c.eps, o);
  }
  if (v.value.is_infinite()) {
    err << "infeasible\n";
    return kInfeasible;
  }
  if (c.format == "csv")
    emit(c, "kind,value\n" + kind + "," + format_double(v.value.value()) + "\n", out);
  else
    emit(c, json({{"kind", kind}, {"value", value_json(v.value)}, {"report", report_json(v.report)}}).dump() + "\n",
         out);
  return kOk;
}

int cmd_grad(const Common& c, const std::string& which_s, const std::string& pa, const std::string& pb,
             std::ostream& out, std::ostream& err) {
  const DiscreteMeasure a = read_measure(pa);
  const DiscreteMeasure b = read_measure(pb);
  const Entropy e = Entropy::parse(c.entropy);
  const CostSpec cost = parse_cost(c.cost);
  if (feasible(e, total_mass(a), total_mass(b)) == Feasibility::Infeasible) {
    err << "infeasible\n";
    return kInfeasible;
  }
  const Objective which = which_s == "OT" ? Objective::OT : Objective::S;
  const SolveOptions o = solve_options(c);
  Gradients g = grad_positions(a, b, cost, e, c.eps, which, o);
  const bool weights = e.is_smooth();
  if (weights) {
    const Gradients gw = grad_weights(a, b, cost, e, c.eps, which, o);
    g.d_weights_a = gw.d_weights_a;
    g.d_weights_b = gw.d_weights_b;
  }
  if (c.format == "csv") {
    std::string s = "side,i,d_weight";
    for (Index k = 0; k < a.dim(); ++k) s += ",d_x" + std::to_string(k + 1);
    s += "\n";
    auto rows = [&](const char* side, const Vector& w, const Points& p) {
      for (Index i = 0; i < p.rows(); ++i) {
        s += std::string(side) + "," + std::to_string(i) + "," + (weights ? format_double(w[i]) : std::string());
        for (Index k = 0; k < p.cols(); ++k) s += "," + format_double(p(i, k));
        s += "\n";
      }
    };
    rows("a", g.d_weights_a, g.d_points_a);
    rows("b", g.d_weights_b, g.d_points_b);
    emit(c, s, out);
    return kOk;
  }
  json doc = {{"value", value_json(g.value)},
              {"grad_points_a", points_json(g.d_points_a)},
              {"grad_points_b", points_json(g.d_points_b)}};
  if (weights) {
    doc["grad_weights_a"] = vec_json(g.d_weights_a);
    doc["grad_weights_b"] = vec_json(g.d_weights_b);
  }
  emit(c, doc.dump() + "\n", out);
  return kOk;
}

struct FlowArgs {
  int steps = 300;
  double eta_x = 60.0;
  double eta_r = 0.3;
  std::string mass_rate = "eta_x";
  bool no_mass = false;
  int snapshot_every = 1;
  std::string out_dir = ".";
  bool tol_given = false;  // otherwise the flow solve defaults apply
  bool max_iter_given = false;
};

std::string snapshot_csv(const FlowState& s) {
  std::string out = "step,i";
  for (Index k = 0; k < s.positions.cols(); ++k) out += ",x" + std::to_string(k + 1);
  out += ",mass\n";
  for (Index i = 0; i < s.positions.rows(); ++i) {
    out += std::to_string(s.step) + "," + std::to_string(i);
    for (Index k = 0; k < s.positions.cols(); ++k) out += "," + format_double(s.positions(i, k));
    out += "," + format_double(s.r[i] * s.r[i]) + "\n";
  }
  return out;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

int cmd_flow(const Common& c, const FlowArgs& fa, const std::string& pa, const std::string& pb, std::ostream& out,
             std::ostream& err) {
  const DiscreteMeasure a = read_measure(pa);
  const DiscreteMeasure b = read_measure(pb);
  FlowParams p;
  p.entropy = Entropy::parse(c.entropy);
  p.eps = c.eps;
  p.steps = fa.steps;
  p.eta_x = fa.eta_x;
  p.eta_r = fa.eta_r;
  p.mass_updates = !fa.no_mass;
  p.mass_rate = fa.mass_rate == "eta_r" ? MassRate::EtaR : MassRate::EtaX;
  if (fa.tol_given) p.solve.tol = c.tol;
  if (fa.max_iter_given) p.solve.max_iter = c.max_iter;
  if (p.entropy.kind() == Entropy::Kind::Balanced &&
      feasible(p.entropy, total_mass(a), total_mass(b)) == Feasibility::Infeasible) {
    err << "infeasible\n";
    return kInfeasible;
  }
  const auto traj = run_flow(FlowState::from_measure(a), b, parse_cost(c.cost), p, fa.snapshot_every);
  const std::filesystem::path dir(fa.out_dir);
  std::filesystem::create_directories(dir);
  std::string summary = "step,S_eps\n";
  char name[64];
  for (const FlowSnapshot& s : traj) {
    std::snprintf(name, sizeof(name), "snapshot_%05d.csv", s.state.step);
    write_file(dir / name, snapshot_csv(s.state));
    summary += std::to_string(s.state.step) + "," + format_double(s.s_eps) + "\n";
  }
  write_file(dir / "summary.csv", summary);
  out << "wrote " << traj.size() << " snapshots to " << dir.string() << "\n";
  return kOk;
}

int cmd_check(const Common& c, std::ostream& out) {
  const auto results = run_oracle_checks(c.seed);
  json checks = json::array();
  bool all = true;
  for (const CheckResult& r : results) {
    checks.push_back({{"name", r.name}, {"pass", r.pass}, {"metric", r.detail}});
    all = all && r.pass;
  }
  emit(c, json({{"seed", c.seed}, {"pass", all}, {"checks", checks}}).dump(2) + "\n", out);
  return all ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unbalanced entropic optimal transport solver"};
  app.require_subcommand(1);
  Common c;
  std::string pa;
  std::string pb;

  auto* solve_cmd = app.add_subcommand("solve", "Solve for the dual potentials");
  add_common(solve_cmd, c);
  solve_cmd->add_option("a", pa, "Measure alpha (.json or .csv)")->required();
  solve_cmd->add_option("b", pb, "Measure beta")->required();

  std::string kind = "S";
  auto* div_cmd = app.add_subcommand("div", "Evaluate OT_eps, S_eps, F_eps or H_eps");
  add_common(div_cmd, c);
  div_cmd->add_option("--kind", kind, "S | OT | F | H")->check(CLI::IsMember({"S", "OT", "F", "H"}));
  div_cmd->add_option("a", pa, "Measure alpha")->required();
  div_cmd->add_option("b", pb, "Measure beta (not needed for F)");

  std::string which = "S";
  auto* grad_cmd = app.add_subcommand("grad", "Gradients w.r.t. weights and positions");
  add_common(grad_cmd, c);
  grad_cmd->add_option("--which", which, "OT | S")->check(CLI::IsMember({"OT", "S"}));
  grad_cmd->add_option("a", pa, "Measure alpha")->required();
  grad_cmd->add_option("b", pb, "Measure beta")->required();

  FlowArgs fa;
  auto* flow_cmd = app.add_subcommand("flow", "Particle gradient flow of S_eps(., beta)");
  add_common(flow_cmd, c);
  flow_cmd->add_option("--steps", fa.steps, "Number of steps");
  flow_cmd->add_option("--eta-x", fa.eta_x, "Position learning rate");
  flow_cmd->add_option("--eta-r", fa.eta_r, "Mass learning rate");
  flow_cmd->add_option("--mass-rate", fa.mass_rate, "Rate in the mass exponent: eta_x | eta_r")
      ->check(CLI::IsMember({"eta_x", "eta_r"}));
  flow_cmd->add_flag("--no-mass-updates", fa.no_mass, "Keep particle masses fixed");
  flow_cmd->add_option("--snapshot-every", fa.snapshot_every, "Snapshot period in steps");
  flow_cmd->add_option("--out-dir", fa.out_dir, "Directory for snapshot CSVs");
  flow_cmd->add_option("a", pa, "Initial particles")->required();
  flow_cmd->add_option("b", pb, "Target measure")->required();

  auto* check_cmd = app.add_subcommand("check", "Run the oracle cross-checks");
  add_common(check_cmd, c);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    set_threads(c.threads);
    if (*solve_cmd) return cmd_solve(c, pa, pb, out, err);
    if (*div_cmd) return cmd_div(c, kind, pa, pb, out, err);
    if (*grad_cmd) return cmd_grad(c, which, pa, pb, out, err);
    if (*flow_cmd) {
      fa.tol_given = flow_cmd->count("--tol") > 0;
      fa.max_iter_given = flow_cmd->count("--max-iter") > 0;
      return cmd_flow(c, fa, pa, pb, out, err);
    }
    if (*check_cmd) return cmd_check(c, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace uot::cli
