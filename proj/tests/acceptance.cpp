// Acceptance suite: one PASS/FAIL line per criterion.  Takes the CLI binary
// path as argv[1] for the determinism and exit-code checks.
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "voxcal/fock.hpp"
#include "voxcal/qseries.hpp"
#include "voxcal/series.hpp"
#include "voxcal/twisted_vertex.hpp"
#include "voxcal/vertex_axioms.hpp"

using namespace voxcal;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what) {
  std::cout << (pass ? "PASS" : "FAIL") << " - criterion " << criterion << ": " << what
            << "\n";
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FockVector random_vector(std::mt19937& rng, Half max_weight) {
  std::uniform_int_distribution<int> nterms(1, 4), coeff(-3, 3);
  FockVector v;
  const int n = nterms(rng);
  for (int i = 0; i < n; ++i) {
    std::vector<Half> parts;
    Half budget = max_weight;
    std::uniform_int_distribution<int> more(0, 2);
    while (budget >= half(1)) {
      std::uniform_int_distribution<std::int64_t> pick(1, budget.twice());
      std::int64_t t = pick(rng);
      if (t % 2 == 0) --t;
      parts.push_back(half(t));
      budget = budget - half(t);
      if (more(rng) == 0) break;
    }
    v.accumulate(FockMonomial(parts), Rational(Integer(coeff(rng))));
  }
  return v;
}

std::string cli_path;

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = "'" + cli_path + "' " + args + " > '" + out.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void criterion_rr(int criterion, int which) {
  const auto t0 = std::chrono::steady_clock::now();
  const QSeries product = rr_product_series(which, 300);
  const QSeries sum = rr_sum_series(which, 300);
  bool equal = product == sum;
  const double elapsed = seconds_since(t0);

  bool brute_ok = true;
  for (std::int64_t n = 0; n <= 40 && brute_ok; ++n) {
    const std::int64_t prod_count = count_partitions_brute(n, rr_product_predicate(which));
    const std::int64_t sum_count = count_partitions_brute(n, rr_sum_predicate(which));
    const std::int64_t tuples = difference_two_monomial_count(n, which == 2);
    brute_ok = Rational(Integer(prod_count)) == product.coefficient(Half(n)) &&
               Rational(Integer(sum_count)) == sum.coefficient(Half(n)) &&
               tuples == sum_count;
  }
  std::ostringstream what;
  what << "identity " << which << " product vs difference-two series to q^300 ("
       << elapsed << " s), brute force to n = 40";
  report(criterion, equal && brute_ok && elapsed < 5.0, what.str());
}

void criterion_closure() {
  const auto t0 = std::chrono::steady_clock::now();
  const ClosureReport plus =
      verify_sl2_closure(Half(2), Half(4), Half(8), BasicModuleSign::plus);
  const double t_plus = seconds_since(t0);
  const auto t1 = std::chrono::steady_clock::now();
  const ClosureReport minus =
      verify_sl2_closure(Half(2), Half(4), Half(8), BasicModuleSign::minus);
  const double t_minus = seconds_since(t1);
  bool residuals = plus.pass && minus.pass;
  for (const auto& e : plus.a_pairs) residuals = residuals && e.residual_zero;
  for (const auto& e : minus.a_pairs) residuals = residuals && e.residual_zero;
  std::ostringstream what;
  what << "closure |i|,|j| <= 2 fit 4 verify 8, sign + (" << t_plus << " s) and sign - ("
       << t_minus << " s)";
  report(3, residuals && t_plus < 60.0 && t_minus < 60.0, what.str());
}

void criterion_heisenberg() {
  std::mt19937 rng(97);
  bool ok = true;
  std::vector<Half> indices;
  for (Half n = half(1); n <= half(11); n += Half(1)) indices.push_back(n);
  for (int trial = 0; trial < 8 && ok; ++trial) {
    const FockVector v = random_vector(rng, Half(8));
    for (Half m : indices)
      for (Half n : indices) {
        const FockVector lhs = d_y(m, mul_y(n, v)) - mul_y(n, d_y(m, v));
        ok = ok && (m == n ? lhs == v : lhs.is_zero_vector());
      }
  }
  report(4, ok, "Heisenberg commutators for n, m <= 11/2 on random weight <= 8 vectors");
}

void criterion_jacobi_demos() {
  bool ok = true;
  std::string note;
  for (int n = 2; n <= 5 && ok; ++n) {
    const auto inst = from_derivation(DerivationAlgebra::truncated_polynomial(n));
    const int d = static_cast<int>(inst.dim());
    for (int u = 0; u < d && ok; ++u)
      for (int v = 0; v < d && ok; ++v) {
        for (int w = 0; w < d && ok; ++w)
          ok = check_jacobi(inst, u, v, w, Half(6)).verdict == Verdict::pass;
        ok = ok && check_commutator_formula(inst, u, v, Half(6)).verdict == Verdict::pass;
        ok = ok && check_iterate_formula(inst, u, v, Half(6)).verdict == Verdict::pass;
        const auto wc = check_weak_commutativity(inst, u, v, 4, Half(6));
        ok = ok && wc.k.has_value() && *wc.k == 0;
        if (!ok) note = "first failure at N=" + std::to_string(n);
      }
  }
  report(5, ok, "derivation instances t^N = 0, N in {2..5}: main identity on [-6,6]^3, "
                "residue formulas, weak commutativity k = 0 " + note);
}

void criterion_fuzz() {
  const auto base = from_derivation(DerivationAlgebra::truncated_polynomial(3));
  std::mt19937 rng(20260809);
  std::uniform_int_distribution<int> idx(0, 2), comp(0, 2);
  std::uniform_int_distribution<std::int64_t> npick(-4, 1);
  int detected = 0, tested = 0;
  while (tested < 100) {
    auto inst = base;
    const int u = idx(rng), v = idx(rng), k = comp(rng);
    const std::int64_t n = npick(rng);
    // Skip the one direction that rescales the derivation: that perturbed
    // table is itself a valid instance (see the unit suite) and must pass.
    if (u == 1 && n == -2 && v == 0 && k == 2) continue;
    ++tested;
    RatVec c = inst.known(u, n, v) ? inst.product(u, n, v) : RatVec(3);
    c[k] += Rational(1);
    inst.set_entry(u, n, v, c);
    if (any_axiom_fails(inst, Half(6), 4)) ++detected;
  }
  report(6, detected == 100,
         "single-entry perturbations detected: " + std::to_string(detected) + "/100");
}

void criterion_delta() {
  bool ok = true;
  const Series d = delta_window("x", Half(-51), Half(51));
  for (int n = -50; n <= 50; ++n)
    ok = ok && coefficient(d, {Half(n)}) == Rational(1);
  Series p = series_zero<Rational>({"x"});
  p.accumulate({Half(0)}, Rational(1));
  p.accumulate({Half(1)}, Rational(-1));
  ok = ok && mul(p, d, {Interval::bounded(Half(-50), Half(50))}).empty();

  const Window box(3, Interval::bounded(Half(-6), Half(6)));
  const Series comp = shift_exponent(
      delta_composite("x1", "x2", "x0", SignOrder::plus_minus, box), "x0", Half(-1));
  ok = ok && !comp.empty();
  for (const auto& [e, c] : comp.terms()) ok = ok && e[0] + e[1] + e[2] == Half(-1);
  report(7, ok, "delta coefficients on [-50,50], (1-x)delta = 0, composite homogeneity -1");
}

void criterion_fock_dimension() {
  const QSeries dims = fock_graded_dimension(Half(20));
  bool ok = dims == euler_product(parts_half_odd(Half(20)), Half(20));
  const std::vector<std::pair<Half, std::int64_t>> first = {
      {Half(0), 1}, {half(1), 1}, {Half(1), 1}, {half(3), 2}, {Half(2), 2}};
  for (const auto& [w, c] : first) ok = ok && dims.coefficient(w) == Rational(Integer(c));
  report(8, ok, "graded dimension equals the half-odd Euler product to weight 20; "
                "first five coefficients 1,1,1,2,2");
}

void criterion_constants() {
  const MoonshineConstants c = moonshine_constants();
  const bool ok = c.j_coefficient_q_minus_1 == 1 && c.j_coefficient_q_0 == 0 &&
                  c.j_coefficient_q_1 == 196884 && c.griess_dimension == 196883 &&
                  c.griess_enlarged_dimension == 196884 &&
                  c.moonshine_central_charge == 24 && c.leech_rank == 24;
  report(9, ok, "stored constants table");
}

void criterion_cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / "voxcal_acceptance";
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"rr", "rr --which 1 --order 80 --brute-max 20 --format json"},
      {"rr2", "rr --which 2 --order 80 --brute-max 20 --format json"},
      {"sl2", "sl2 --index-bound 1 --fit 3 --verify 5 --format json"},
      {"axioms", "axioms --derivation-demo 3 --window 6 --kmax 4 --format json"},
      {"fockdim", "fockdim --order 10 --format json"},
      {"constants", "constants --format json"},
      {"delta", "delta-demo --format json"},
  };
  bool ok = true;
  std::string note;
  for (const auto& [name, args] : runs) {
    const fs::path a = dir / (name + "_a.json");
    const fs::path b = dir / (name + "_b.json");
    const int ra = run_cli(args, a);
    const int rb = run_cli(args, b);
    if (ra != 0 || rb != 0) {
      ok = false;
      note = name + " exited " + std::to_string(ra) + "/" + std::to_string(rb);
      break;
    }
    const std::string sa = slurp(a), sb = slurp(b);
    if (sa.empty() || sa != sb) {
      ok = false;
      note = name + " reports differ between runs";
      break;
    }
  }
  report(10, ok, "byte-identical JSON reports across consecutive CLI runs " + note);
}

// CLI exit-code contract fixtures (module invariant, reported alongside the
// numbered criteria).
void exit_code_contract() {
  const fs::path dir = fs::temp_directory_path() / "voxcal_acceptance";
  fs::create_directories(dir);
  const fs::path sink = dir / "sink.txt";

  const auto demo = from_derivation(DerivationAlgebra::truncated_polynomial(3));
  const fs::path good = dir / "demo.json";
  std::ofstream(good) << serialize_instance(demo).dump(2);

  auto corrupted = demo;
  RatVec c = corrupted.product(0, -1, 0);
  c[1] += Rational(1);  // vacuum action breaks
  corrupted.set_entry(0, -1, 0, c);
  const fs::path bad = dir / "corrupt.json";
  std::ofstream(bad) << serialize_instance(corrupted).dump(2);

  const fs::path malformed = dir / "malformed.json";
  std::ofstream(malformed) << "{ not json";

  struct Fixture {
    std::string args;
    int expect;
  };
  const std::vector<Fixture> fixtures = {
      {"rr --which 1 --order 40", 0},
      {"rr --which 3 --order 40", 2},
      {"rr --bogus-flag", 2},
      {"sl2 --index-bound 1 --fit 4 --verify 2", 2},
      {"axioms --derivation-demo 3", 0},
      {"axioms --derivation-demo 9", 2},
      {"axioms --instance '" + bad.string() + "'", 1},
      {"axioms --instance '" + good.string() + "'", 3},
      {"axioms --instance '" + malformed.string() + "'", 2},
      {"axioms", 2},
      {"axioms --derivation-demo 3 --instance '" + good.string() + "'", 2},
      {"fockdim --order 8", 0},
      {"constants", 0},
      {"delta-demo", 0},
  };
  bool ok = true;
  std::string note;
  for (const auto& f : fixtures) {
    const int got = run_cli(f.args, sink);
    if (got != f.expect) {
      ok = false;
      note += " [" + f.args + " -> " + std::to_string(got) + ", want " +
              std::to_string(f.expect) + "]";
    }
  }
  std::cout << (ok ? "PASS" : "FAIL") << " - exit-code contract" << note << "\n";
  if (!ok) ++failures;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-cli>\n";
    return 2;
  }
  cli_path = argv[1];

  criterion_rr(1, 1);
  criterion_rr(2, 2);
  criterion_closure();
  criterion_heisenberg();
  criterion_jacobi_demos();
  criterion_fuzz();
  criterion_delta();
  criterion_fock_dimension();
  criterion_constants();
  criterion_cli_determinism();
  exit_code_contract();

  std::cout << (failures == 0 ? "all criteria passed" : "criteria failed: ")
            << (failures == 0 ? "" : std::to_string(failures)) << "\n";
  return failures == 0 ? 0 : 1;
}
