// voxcal: exact formal-calculus verification runs with machine-readable
// reports.  Exit codes: 0 pass, 1 verification failure, 2 usage/parse error,
// 3 inconclusive (and nothing failed).
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "voxcal/fock.hpp"
#include "voxcal/qseries.hpp"
#include "voxcal/rational.hpp"
#include "voxcal/series.hpp"
#include "voxcal/twisted_vertex.hpp"
#include "voxcal/vertex_axioms.hpp"

namespace {

using nlohmann::ordered_json;
using namespace voxcal;

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_usage = 2;
constexpr int exit_inconclusive = 3;

struct Options {
  std::string format = "text";
  int which = 1;
  std::int64_t order = 300;
  std::int64_t brute_max = 40;
  std::int64_t index_bound = 2;
  std::int64_t fit = 4;
  std::int64_t verify = 8;
  std::string sign = "+";
  std::string instance_path;
  int demo_dim = 0;
  std::int64_t window = 6;
  std::int64_t kmax = 8;
};

void emit(const ordered_json& j, const std::string& format, const std::string& text) {
  if (format == "json")
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

int run_rr(const Options& opt) {
  const RRReport rep = rr_verify(opt.which, opt.order);
  const QSeries product = rr_product_series(opt.which, opt.order);
  const QSeries sum = rr_sum_series(opt.which, opt.order);

  // Independent enumeration against both computed sides.
  const std::int64_t brute_to = std::min(opt.order, opt.brute_max);
  const PartitionPredicate prod_pred = rr_product_predicate(opt.which);
  const PartitionPredicate sum_pred = rr_sum_predicate(opt.which);
  std::optional<std::int64_t> brute_mismatch;
  for (std::int64_t n = 0; n <= brute_to && !brute_mismatch; ++n) {
    const Rational p(Integer(count_partitions_brute(n, prod_pred)));
    const Rational s(Integer(count_partitions_brute(n, sum_pred)));
    const Rational d(Integer(count_partitions_dp(n, sum_pred)));
    if (p != product.coefficient(Half(n)) || s != sum.coefficient(Half(n)) || s != d)
      brute_mismatch = n;
  }
  const bool pass = rep.pass && !brute_mismatch;

  ordered_json j{{"schema", "voxcal/1"},
                 {"kind", "rr_report"},
                 {"which", opt.which},
                 {"order", opt.order},
                 {"brute_max", brute_to},
                 {"pass", pass}};
  j["first_mismatch"] =
      rep.first_mismatch ? ordered_json(rep.first_mismatch->str()) : ordered_json(nullptr);
  j["brute_mismatch"] = brute_mismatch ? ordered_json(*brute_mismatch) : ordered_json(nullptr);

  std::ostringstream text;
  text << "Rogers-Ramanujan identity " << opt.which << " up to q^" << opt.order << "\n"
       << "  congruence product side vs difference-two sum side: "
       << (rep.pass ? "EQUAL" : "MISMATCH") << "\n"
       << "  brute-force enumeration (n <= " << brute_to << "): "
       << (brute_mismatch ? "MISMATCH at n=" + std::to_string(*brute_mismatch) : "agrees")
       << "\n"
       << (pass ? "PASS" : "FAIL") << "\n";
  if (opt.format == "csv") {
    std::cout << "n,product,sum\n";
    for (std::int64_t n = 0; n <= opt.order; ++n)
      std::cout << n << "," << to_string(product.coefficient(Half(n))) << ","
                << to_string(sum.coefficient(Half(n))) << "\n";
  } else {
    emit(j, opt.format, text.str());
  }
  return pass ? exit_pass : exit_fail;
}

int run_sl2(const Options& opt) {
  const BasicModuleSign sign =
      opt.sign == "-" ? BasicModuleSign::minus : BasicModuleSign::plus;
  const ClosureReport rep = verify_sl2_closure(
      Half(opt.index_bound), Half(opt.fit), Half(opt.verify), sign);
  std::ostringstream text;
  text << "affine sl(2) closure: indices |i|,|j| <= " << opt.index_bound << ", fit <= "
       << opt.fit << ", verify <= " << opt.verify << ", sign " << opt.sign << "\n"
       << "  bracket pairs: " << rep.a_pairs.size() << " A-A, " << rep.mixed_pairs.size()
       << " mixed/Heisenberg\n"
       << "  antisymmetry: " << (rep.antisymmetry_pass ? "ok" : "FAIL") << "\n"
       << "  Lie Jacobi (" << rep.jacobi_triples_checked
       << " triples): " << (rep.jacobi_pass ? "ok" : "FAIL") << "\n";
  for (const auto& f : rep.failures) text << "  failure: " << f << "\n";
  text << (rep.pass ? "PASS" : "FAIL") << "\n";
  emit(to_json(rep), opt.format, text.str());
  return rep.pass ? exit_pass : exit_fail;
}

int run_axioms(const Options& opt) {
  VertexAlgebraInstance inst;
  if (!opt.instance_path.empty()) {
    std::ifstream in(opt.instance_path);
    if (!in) {
      std::cerr << "error: cannot open instance file '" << opt.instance_path << "'\n";
      return exit_usage;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    inst = parse_instance(buf.str());
  } else {
    inst = from_derivation(DerivationAlgebra::truncated_polynomial(opt.demo_dim));
  }
  const AxiomReport rep = run_axiom_checks(inst, Half(opt.window), opt.kmax);
  std::ostringstream text;
  text << "axiom suite (" << rep.mode << "), window radius " << opt.window << ", k_max "
       << opt.kmax << "\n";
  for (const auto& c : rep.checks) {
    text << "  " << verdict_name(c.verdict) << "  " << c.name;
    if (!c.detail.empty()) text << "  [" << c.detail << "]";
    text << "\n";
    for (const auto& w : c.witnesses) text << "      " << w << "\n";
  }
  text << verdict_name(rep.overall()) << "\n";
  emit(to_json(rep, Half(opt.window), opt.kmax), opt.format, text.str());
  switch (rep.overall()) {
    case Verdict::pass: return exit_pass;
    case Verdict::fail: return exit_fail;
    case Verdict::inconclusive: return exit_inconclusive;
  }
  return exit_fail;
}

int run_fockdim(const Options& opt) {
  const Half order(opt.order);
  const QSeries dims = fock_graded_dimension(order);
  const QSeries euler = euler_product(parts_half_odd(order), order);
  const bool match = dims == euler;
  ordered_json coeffs = ordered_json::array();
  std::ostringstream text;
  text << "graded dimension of the half-odd Fock space up to weight " << opt.order << "\n";
  for (Half w : weight_grid(order)) {
    coeffs.push_back({{"weight", w.str()}, {"dim", to_string(dims.coefficient(w))}});
    text << "  q^" << w.str() << ": " << to_string(dims.coefficient(w)) << "\n";
  }
  text << "  Euler product over parts 1/2, 3/2, ...: " << (match ? "EQUAL" : "MISMATCH")
       << "\n"
       << (match ? "PASS" : "FAIL") << "\n";
  ordered_json j{{"schema", "voxcal/1"},
                 {"kind", "fockdim_report"},
                 {"order", opt.order},
                 {"coefficients", coeffs},
                 {"euler_match", match},
                 {"pass", match}};
  if (opt.format == "csv") {
    std::cout << "weight,dim\n";
    for (Half w : weight_grid(order))
      std::cout << w.str() << "," << to_string(dims.coefficient(w)) << "\n";
  } else {
    emit(j, opt.format, text.str());
  }
  return match ? exit_pass : exit_fail;
}

int run_constants(const Options& opt) {
  const MoonshineConstants c = moonshine_constants();
  ordered_json j{{"schema", "voxcal/1"},
                 {"kind", "constants"},
                 {"j_coefficients",
                  {{"q^-1", c.j_coefficient_q_minus_1},
                   {"q^0", c.j_coefficient_q_0},
                   {"q^1", c.j_coefficient_q_1}}},
                 {"griess_dimension", c.griess_dimension},
                 {"griess_enlarged_dimension", c.griess_enlarged_dimension},
                 {"moonshine_central_charge", c.moonshine_central_charge},
                 {"leech_rank", c.leech_rank}};
  std::ostringstream text;
  text << "stored constants\n"
       << "  J(q) coefficients at q^-1, q^0, q^1: " << c.j_coefficient_q_minus_1 << ", "
       << c.j_coefficient_q_0 << ", " << c.j_coefficient_q_1 << "\n"
       << "  Griess algebra dimension:  " << c.griess_dimension << "\n"
       << "  enlarged algebra dimension: " << c.griess_enlarged_dimension << "\n"
       << "  moonshine central charge:  " << c.moonshine_central_charge << "\n"
       << "  Leech lattice rank:        " << c.leech_rank << "\n";
  emit(j, opt.format, text.str());
  return exit_pass;
}

int run_delta_demo(const Options& opt) {
  const auto inst = from_derivation(DerivationAlgebra::truncated_polynomial(4));
  const Half radius(2);
  ordered_json extractions = ordered_json::array();
  std::ostringstream text;
  text << "main-identity coefficient extractions for the t^4 = 0 demo, window radius "
       << radius.str() << "\n";
  bool all_equal = true;
  const std::vector<std::pair<int, int>> uv = {{1, 1}, {2, 1}};
  for (auto [u, v] : uv) {
    for (int w = 0; w < 2; ++w) {
      auto [lhs, rhs] = jacobi_sides(inst, u, v, w, radius);
      std::set<ExpKey> keys;
      for (const auto& [e, c] : lhs.terms()) keys.insert(e);
      for (const auto& [e, c] : rhs.terms()) keys.insert(e);
      text << "  Y(" << inst.basis[u].name << "), Y(" << inst.basis[v].name
           << ") applied to " << inst.basis[w].name << ":\n";
      for (const auto& e : keys) {
        const RatVec l = coefficient(lhs, e);
        const RatVec r = coefficient(rhs, e);
        const bool eq = l == r;
        all_equal = all_equal && eq;
        std::string mono;
        for (std::size_t i = 0; i < e.size(); ++i)
          mono += (i ? " " : "") + jacobi_vars[i] + "^" + e[i].str();
        extractions.push_back({{"u", inst.basis[u].name},
                               {"v", inst.basis[v].name},
                               {"w", inst.basis[w].name},
                               {"monomial", mono},
                               {"lhs", inst.coords_str(l)},
                               {"rhs", inst.coords_str(r)},
                               {"equal", eq}});
        text << "    " << mono << ": lhs = " << inst.coords_str(l)
             << ", rhs = " << inst.coords_str(r) << (eq ? "" : "  MISMATCH") << "\n";
      }
    }
  }
  text << (all_equal ? "PASS" : "FAIL") << "\n";
  ordered_json j{{"schema", "voxcal/1"},
                 {"kind", "delta_demo"},
                 {"window_radius", radius.str()},
                 {"extractions", extractions},
                 {"pass", all_equal}};
  emit(j, opt.format, text.str());
  return all_equal ? exit_pass : exit_fail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact formal-calculus verification suite"};
  app.require_subcommand(1);
  Options opt;

  auto add_format = [&](CLI::App* cmd, bool csv) {
    cmd->add_option("--format", opt.format, "output format")
        ->check(csv ? CLI::IsMember({"text", "json", "csv"})
                    : CLI::IsMember({"text", "json"}));
  };

  CLI::App* rr = app.add_subcommand("rr", "verify a Rogers-Ramanujan identity");
  rr->add_option("--which", opt.which)->check(CLI::IsMember({1, 2}));
  rr->add_option("--order", opt.order)->check(CLI::PositiveNumber);
  rr->add_option("--brute-max", opt.brute_max)->check(CLI::PositiveNumber);
  add_format(rr, true);

  CLI::App* sl2 = app.add_subcommand("sl2", "verify the twisted operator closure");
  sl2->add_option("--index-bound", opt.index_bound)->check(CLI::PositiveNumber);
  sl2->add_option("--fit", opt.fit)->check(CLI::PositiveNumber);
  sl2->add_option("--verify", opt.verify)->check(CLI::PositiveNumber);
  sl2->add_option("--sign", opt.sign)->check(CLI::IsMember({"+", "-"}));
  add_format(sl2, false);

  CLI::App* ax = app.add_subcommand("axioms", "run the vertex-algebra axiom checkers");
  auto* inst_opt = ax->add_option("--instance", opt.instance_path, "instance JSON file");
  auto* demo_opt = ax->add_option("--derivation-demo", opt.demo_dim,
                                  "truncated-polynomial demo dimension")
                       ->check(CLI::Range(1, 6));
  ax->add_option("--window", opt.window)->check(CLI::PositiveNumber);
  ax->add_option("--kmax", opt.kmax)->check(CLI::PositiveNumber);
  add_format(ax, false);

  CLI::App* fd = app.add_subcommand("fockdim", "graded dimension of the Fock space");
  fd->add_option("--order", opt.order)->check(CLI::PositiveNumber);
  add_format(fd, true);

  CLI::App* cn = app.add_subcommand("constants", "stored display constants");
  add_format(cn, false);

  CLI::App* dd = app.add_subcommand("delta-demo", "worked coefficient extractions");
  add_format(dd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return exit_usage;
  }

  try {
    if (rr->parsed()) return run_rr(opt);
    if (sl2->parsed()) {
      if (opt.verify < opt.fit) {
        std::cerr << "error: --verify must be >= --fit\n";
        return exit_usage;
      }
      return run_sl2(opt);
    }
    if (ax->parsed()) {
      if ((inst_opt->count() == 0) == (demo_opt->count() == 0)) {
        std::cerr << "error: exactly one of --instance / --derivation-demo is required\n";
        return exit_usage;
      }
      return run_axioms(opt);
    }
    if (fd->parsed()) return run_fockdim(opt);
    if (cn->parsed()) return run_constants(opt);
    if (dd->parsed()) return run_delta_demo(opt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_fail;
  }
  return exit_usage;
}
