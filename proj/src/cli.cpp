#include "papdiff/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "papdiff/autodiff.hpp"
#include "papdiff/detail/numfmt.hpp"
#include "papdiff/gallery.hpp"
#include "papdiff/pap.hpp"
#include "papdiff/verify.hpp"

namespace papdiff {

namespace {

std::vector<double> parse_csv(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
      ++used;
    if (used != item.size()) throw std::invalid_argument("malformed number: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty vector");
  return out;
}

std::string csv_row(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += detail::format_double(values[i]);
  }
  return out;
}

// Largest input index mentioned in the expression text, for subcommands that
// take no input vector to size the arity from.
int infer_arity(const std::string& text) {
  static const std::regex var_re("\\bx([0-9]+)\\b");
  int arity = 1;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), var_re);
       it != std::sregex_iterator(); ++it)
    arity = std::max(arity, std::stoi((*it)[1].str()));
  return arity;
}

struct OutStream {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit OutStream(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw std::runtime_error("cannot open output file " + path);
      os = &file;
    }
  }
  std::ostream& get() { return *os; }
};

struct EvalOpts {
  std::string expr;
  std::string input_csv;
};

struct GradOpts {
  std::string mode;
  std::string expr;
  std::string input_csv;
  std::string tangent_csv;
  double cotangent = 1.0;
};

struct GradcheckOpts {
  std::string expr;
  int arity = 0;
  std::string lo = "-1";
  std::string hi = "1";
  std::size_t samples = 1000;
  double tol = 1e-4;
  std::uint64_t seed = 12345;
  double min_fraction = 0.99;
  bool serial = false;
  std::string out;
};

struct ReprOpts {
  std::string expr;
  int arity = 0;
  std::string format = "table";
  bool prune = false;
  bool registry = false;
};

struct CorpusOpts {
  std::uint64_t seed = 12345;
  std::size_t count = 100;
  int max_depth = 6;
  int dims = 4;
};

struct CantorOpts {
  double lambda = 0.5;
  int depth = 20;
  std::size_t samples = 100;
  std::uint64_t seed = 12345;
  std::string out;
};

struct ProbeOpts {
  std::string claim;
  int depth = 12;
  int k = 5;
  std::size_t count = 100;
  std::size_t compose_samples = 1000;
  std::uint64_t seed = 12345;
  std::string out;
};

int run_eval(const EvalOpts& o) {
  const std::vector<double> v = parse_csv(o.input_csv);
  const Program prog = parse(o.expr, static_cast<int>(v.size()));
  std::cout << detail::format_double(eval(prog, v)) << "\n";
  return 0;
}

int run_grad(const GradOpts& o) {
  const std::vector<double> v = parse_csv(o.input_csv);
  const Program prog = parse(o.expr, static_cast<int>(v.size()));
  if (o.mode == "forward") {
    if (o.tangent_csv.empty())
      throw std::invalid_argument("forward mode needs a tangent vector (-w)");
    const std::vector<double> w = parse_csv(o.tangent_csv);
    std::cout << detail::format_double(jvp(prog, v, w)) << "\n";
  } else if (o.mode == "reverse") {
    std::cout << csv_row(vjp(prog, v, o.cotangent)) << "\n";
  } else if (o.mode == "symbolic") {
    std::cout << csv_row(symbolic_jacobian(prog, v)) << "\n";
  } else {
    throw std::invalid_argument("mode must be forward, reverse, or symbolic");
  }
  return 0;
}

int run_gradcheck(const GradcheckOpts& o) {
  std::vector<double> lo = parse_csv(o.lo);
  std::vector<double> hi = parse_csv(o.hi);
  int arity = o.arity;
  if (arity == 0)
    arity = std::max(static_cast<int>(std::max(lo.size(), hi.size())),
                     infer_arity(o.expr));
  if (lo.size() == 1) lo.assign(arity, lo[0]);
  if (hi.size() == 1) hi.assign(arity, hi[0]);
  if (static_cast<int>(lo.size()) != arity || static_cast<int>(hi.size()) != arity)
    throw std::invalid_argument("bounds length does not match arity");

  const Program prog = parse(o.expr, arity);
  Sampler sampler;
  sampler.seed = o.seed;
  for (int i = 0; i < arity; ++i) {
    if (!(lo[i] < hi[i])) throw std::invalid_argument("need lo < hi per coordinate");
    sampler.bounds.emplace_back(lo[i], hi[i]);
  }
  const GradCheckReport report = gradcheck(prog, sampler, o.samples, o.tol,
                                           o.serial ? Exec::serial : Exec::parallel);
  OutStream out(o.out);
  out.get() << gradcheck_report_json(report) << "\n";
  return report.agreement_fraction >= o.min_fraction ? 0 : 1;
}

int run_repr(const ReprOpts& o) {
  if (o.registry) {
    std::cout << registry_json() << "\n";
    return 0;
  }
  if (o.expr.empty())
    throw std::invalid_argument("repr needs an expression (-e) or --registry");
  const int arity = o.arity > 0 ? o.arity : infer_arity(o.expr);
  const Program prog = parse(o.expr, arity);
  PapRepr gamma = expr_to_repr(prog);
  if (o.prune) gamma = prune_contradictory(gamma);

  if (o.format == "json") {
    nlohmann::json j;
    j["input_dim"] = gamma.input_dim;
    j["output_dim"] = gamma.output_dim;
    auto pieces = nlohmann::json::array();
    for (const PapPiece& p : gamma.pieces) {
      auto cell = nlohmann::json::array();
      for (const Guard& g : p.cell.guards) cell.push_back(g.str());
      auto comp = nlohmann::json::array();
      for (const AnalyticExpr& c : p.component) comp.push_back(c.str());
      pieces.push_back({{"cell", cell}, {"component", comp}});
    }
    j["pieces"] = pieces;
    std::cout << j.dump(2) << "\n";
  } else if (o.format == "table") {
    std::cout << "pieces: " << gamma.pieces.size() << "  (R^" << gamma.input_dim
              << " -> R^" << gamma.output_dim << ")\n";
    for (std::size_t i = 0; i < gamma.pieces.size(); ++i) {
      const PapPiece& p = gamma.pieces[i];
      std::string comps;
      for (std::size_t c = 0; c < p.component.size(); ++c) {
        if (c) comps += ", ";
        comps += p.component[c].str();
      }
      std::cout << i << " | " << p.cell.str() << " | " << comps << "\n";
    }
  } else {
    throw std::invalid_argument("format must be table or json");
  }
  return 0;
}

int run_corpus(const CorpusOpts& o) {
  for (const Program& prog : generate_corpus(o.seed, o.count, o.max_depth, o.dims))
    std::cout << to_string(prog) << "\n";
  return 0;
}

int run_cantor(const CantorOpts& o) {
  const CantorApprox approx(o.lambda, o.depth);
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(1e-9, 1.0 - 1e-9);
  std::vector<double> xs(o.samples);
  for (auto& x : xs) x = unit(rng);
  std::sort(xs.begin(), xs.end());

  OutStream out(o.out);
  out.get() << "x,phi_lambda,f,g,g_of_f\n";
  for (double x : xs) {
    const double f = cantor_inverse_f(o.depth, x);
    const double row[] = {x, approx.phi(x), f, bump_g(o.depth, x), bump_g(o.depth, f)};
    out.get() << csv_row(row) << "\n";
  }
  return 0;
}

int run_probe(const ProbeOpts& o) {
  OutStream out(o.out);
  if (o.claim == "claim1") {
    const CantorApprox half(0.5, o.depth);
    const std::uint64_t survivors = half.surviving_count();
    const std::uint64_t n = std::min<std::uint64_t>(o.count, survivors - 1);
    out.get() << "x,x1,x2,q1,q2,k,d_k\n";
    for (std::uint64_t j = 0; j < n; ++j) {
      const std::uint64_t pos = 1 + j * (survivors - 1) / n;
      const double x = half.surviving_interval(pos).lo;
      const ProbeRecord rec = probe_claim1(o.depth, x, o.k);
      const double row[] = {rec.x, rec.x1, rec.x2, rec.q1, rec.q2,
                            static_cast<double>(rec.k), rec.dk};
      out.get() << csv_row(row) << "\n";
    }
    return 0;
  }
  if (o.claim == "claim3") {
    const Claim3Report rep =
        probe_claim3(o.depth, o.count, o.compose_samples, o.seed);
    out.get() << "midpoints,worst_f_slope_err,worst_gf_slope_err,compose_samples,"
                 "worst_compose_diff\n";
    const double row[] = {static_cast<double>(rep.midpoints), rep.worst_f_slope_err,
                          rep.worst_gf_slope_err, static_cast<double>(rep.compose_samples),
                          rep.worst_compose_diff};
    out.get() << csv_row(row) << "\n";
    return 0;
  }
  throw std::invalid_argument("probe claim must be claim1 or claim3");
}

}  // namespace

int cli_run(const std::vector<std::string>& args) {
  CLI::App app{"Intensional-derivative autodiff engine with a PAP representation "
               "algebra and numerical verification gallery"};
  app.require_subcommand(1);

  EvalOpts eval_opts;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a program at an input vector");
  eval_cmd->add_option("-e,--expr", eval_opts.expr, "program text")->required();
  eval_cmd->add_option("-v,--input", eval_opts.input_csv, "input vector, CSV")->required();

  GradOpts grad_opts;
  auto* grad_cmd = app.add_subcommand("grad", "differentiate a program");
  grad_cmd->add_option("--mode", grad_opts.mode, "forward | reverse | symbolic")
      ->required();
  grad_cmd->add_option("-e,--expr", grad_opts.expr, "program text")->required();
  grad_cmd->add_option("-v,--input", grad_opts.input_csv, "input vector, CSV")->required();
  grad_cmd->add_option("-w,--tangent", grad_opts.tangent_csv, "tangent vector, CSV");
  grad_cmd->add_option("-u,--cotangent", grad_opts.cotangent, "cotangent scalar");

  GradcheckOpts gc_opts;
  auto* gc_cmd = app.add_subcommand(
      "gradcheck", "compare the intensional derivative against finite differences");
  gc_cmd->add_option("-e,--expr", gc_opts.expr, "program text")->required();
  gc_cmd->add_option("-n,--arity", gc_opts.arity, "input arity (default: inferred)");
  gc_cmd->add_option("--lo", gc_opts.lo, "lower bounds, scalar or CSV");
  gc_cmd->add_option("--hi", gc_opts.hi, "upper bounds, scalar or CSV");
  gc_cmd->add_option("--samples", gc_opts.samples, "sample count");
  gc_cmd->add_option("--tol", gc_opts.tol, "relative tolerance");
  gc_cmd->add_option("--seed", gc_opts.seed, "sampler seed");
  gc_cmd->add_option("--min-fraction", gc_opts.min_fraction,
                     "exit 0 iff agreement fraction >= this");
  gc_cmd->add_flag("--serial", gc_opts.serial, "use the serial reference kernel");
  gc_cmd->add_option("--out", gc_opts.out, "write the JSON report to a file");

  ReprOpts repr_opts;
  auto* repr_cmd =
      app.add_subcommand("repr", "print the PAP piece table of a program");
  repr_cmd->add_option("-e,--expr", repr_opts.expr, "program text");
  repr_cmd->add_option("-n,--arity", repr_opts.arity, "input arity (default: inferred)");
  repr_cmd->add_option("--format", repr_opts.format, "table | json");
  repr_cmd->add_flag("--prune", repr_opts.prune,
                     "drop syntactically contradictory cells");
  repr_cmd->add_flag("--registry", repr_opts.registry,
                     "print the primitive registry listing as JSON");

  CorpusOpts corpus_opts;
  auto* corpus_cmd =
      app.add_subcommand("corpus", "generate a reproducible random program corpus");
  corpus_cmd->add_option("--seed", corpus_opts.seed, "generator seed");
  corpus_cmd->add_option("--count", corpus_opts.count, "number of programs");
  corpus_cmd->add_option("--max-depth", corpus_opts.max_depth, "expression depth bound");
  corpus_cmd->add_option("-N,--dims", corpus_opts.dims, "input arity");

  CantorOpts cantor_opts;
  ProbeOpts probe_opts;
  auto* cantor_cmd = app.add_subcommand(
      "cantor", "sample the lambda-Cantor constructions, or run the claim probes");
  cantor_cmd->add_option("--lambda", cantor_opts.lambda, "removal fraction in (0,1]");
  cantor_cmd->add_option("--depth", cantor_opts.depth, "construction depth K");
  cantor_cmd->add_option("--samples", cantor_opts.samples, "sample count");
  cantor_cmd->add_option("--seed", cantor_opts.seed, "sampler seed");
  cantor_cmd->add_option("--out", cantor_opts.out, "write CSV to a file");
  auto* probe_cmd = cantor_cmd->add_subcommand("probe", "difference-quotient probes");
  probe_cmd->add_option("claim", probe_opts.claim, "claim1 | claim3")->required();
  probe_cmd->add_option("--depth", probe_opts.depth, "construction depth K");
  probe_cmd->add_option("--k", probe_opts.k, "removal step for claim1");
  probe_cmd->add_option("--count", probe_opts.count, "probe count");
  probe_cmd->add_option("--compose-samples", probe_opts.compose_samples,
                        "claim3 composition samples");
  probe_cmd->add_option("--seed", probe_opts.seed, "sampler seed");
  probe_cmd->add_option("--out", probe_opts.out, "write CSV to a file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*eval_cmd) return run_eval(eval_opts);
    if (*grad_cmd) return run_grad(grad_opts);
    if (*gc_cmd) return run_gradcheck(gc_opts);
    if (*repr_cmd) return run_repr(repr_opts);
    if (*corpus_cmd) return run_corpus(corpus_opts);
    if (*cantor_cmd) {
      if (*probe_cmd) return run_probe(probe_opts);
      return run_cantor(cantor_opts);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace papdiff
