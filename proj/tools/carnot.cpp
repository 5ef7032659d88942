// Command-line driver. Subcommands cover basis and table generation,
// structure constants, the embedding solver and its verifier, the span
// tables, the step-9 counterexample certificate, surface emission,
// predicate checks on stratified algebras, quasiconformal distortion,
// product decomposition, and a seeded selftest.
//
// Exit codes: 0 on success, 1 on a mathematical verification failure
// (infeasible ansatz, failed verification, failed certificate, false
// predicate), 2 on usage or input errors.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "carnot/json.hpp"
#include "carnot/random.hpp"
#include "carnot/selftest.hpp"

namespace {

using namespace carnot;

constexpr int kExitSuccess = 0;
constexpr int kExitMathFailure = 1;
constexpr int kExitUsage = 2;

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file '" + out_path + "'");
  out << text;
}

Json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open input file '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("invalid JSON in '" + path + "': " + e.what());
  }
  return j;
}

std::string vector_text(const std::vector<int>& v) { return detail::vector_to_text(v); }

// --- hall -------------------------------------------------------------------

int run_hall(int step, const std::string& format, const std::string& out) {
  HallBasis basis = generate_hall_basis(step);
  std::string text;
  if (format == "json")
    text = hall_to_json(basis).dump(2) + "\n";
  else if (format == "latex")
    text = hall_latex(basis);
  else
    text = hall_text(basis);
  write_output(text, out);
  return kExitSuccess;
}

// --- structure-constants ------------------------------------------------------

int run_structure_constants(int step, const std::string& format, const std::string& out) {
  StructureConstants sc = structure_constants(realize(step));
  std::string text;
  if (format == "json") {
    text = sc_to_json(sc).dump(2) + "\n";
  } else {
    std::ostringstream os;
    for (const auto& [ij, terms] : sc.table) {
      os << "[X_" << ij.first << ", X_" << ij.second << "] =";
      bool first = true;
      for (const auto& [k, c] : terms) {
        Rat a = c;
        os << (first ? (a < 0 ? " -" : " ") : (a < 0 ? " - " : " + "));
        if (a < 0) a = -a;
        if (a != 1) os << format_rat(a) << " ";
        os << "X_" << k;
        first = false;
      }
      os << "\n";
    }
    text = os.str();
  }
  write_output(text, out);
  return kExitSuccess;
}

// --- embed ---------------------------------------------------------------------

int run_embed(int step, const std::string& ansatz, const std::string& out) {
  EmbeddingSolution sol = solve_embedding(step, ansatz_from_string(ansatz));
  write_output(solution_to_json(sol).dump(2) + "\n", out);
  std::vector<const EmbedEntry*> failed;
  for (const EmbedEntry& e : sol.entries)
    if (!e.feasible) failed.push_back(&e);
  if (failed.empty()) {
    std::cerr << "solved " << sol.entries.size() << " indices at step " << step << "\n";
    return kExitSuccess;
  }
  std::cerr << "ansatz '" << ansatz << "' infeasible at " << failed.size() << " of "
            << sol.entries.size() << " indices:\n";
  for (const EmbedEntry* e : failed)
    std::cerr << "  index " << e->j << ", vector " << vector_text(e->vec) << "\n";
  return kExitMathFailure;
}

// --- verify ---------------------------------------------------------------------

int run_verify(const std::string& solution_path) {
  EmbeddingSolution sol = solution_from_json(load_json(solution_path));
  VerifyReport report = verify_solution(sol);
  if (report.ok()) {
    std::cout << "verified " << report.checked << " entries exactly";
    if (report.skipped > 0) std::cout << " (" << report.skipped << " infeasible skipped)";
    std::cout << "\n";
    return kExitSuccess;
  }
  std::cout << "verification failed at " << report.violations.size() << " indices:";
  for (int j : report.violations) std::cout << " " << j;
  std::cout << "\n";
  return kExitMathFailure;
}

// --- lemmas ---------------------------------------------------------------------

int run_lemmas(int step, const std::string& format, const std::string& out) {
  HallBasis basis = generate_hall_basis(step);
  auto products = lemma42_table(basis);   // throws SpanViolation on failure
  auto verticals = lemma43_table(basis);

  std::string text;
  if (format == "json") {
    Json j;
    j["step"] = step;
    Json prods = Json::array();
    for (const auto& [jk, ls] : products) {
      Json row;
      row["j"] = jk.first;
      row["k"] = jk.second;
      row["l"] = ls.first;
      row["scalar"] = rat_to_json(ls.second);
      prods.push_back(std::move(row));
    }
    j["products"] = std::move(prods);
    Json verts = Json::array();
    for (const auto& [jj, e] : verticals) {
      Json row;
      row["j"] = jj;
      row["l"] = e.ell;
      row["scalar"] = rat_to_json(e.scalar);
      row["special"] = e.special;
      verts.push_back(std::move(row));
    }
    j["verticals"] = std::move(verts);
    text = j.dump(2) + "\n";
  } else {
    std::ostringstream os;
    for (const auto& [jk, ls] : products)
      os << "x1 p_" << jk.second << " d_" << jk.second << " p_" << jk.first << " = "
         << format_rat(ls.second) << " p_" << ls.first << "\n";
    for (const auto& [jj, e] : verticals) {
      os << "x1 d_2 p_" << jj << " = " << format_rat(e.scalar) << " ";
      if (e.special) os << "x_" << e.ell << " ";
      os << "p_" << e.ell << (e.special ? "   [special]" : "") << "\n";
    }
    text = os.str();
  }
  write_output(text, out);
  return kExitSuccess;
}

// --- counterexample ---------------------------------------------------------------

int run_counterexample() {
  Step9Certificate cert = step9_certificate();  // throws CertificateFailure on failure
  std::cout << "witness index " << cert.index << ", vector " << vector_text(cert.vec)
            << ", leading coefficient " << format_rat(cert.c) << "\n";
  std::cout << "restricted ansatz: infeasible\n";
  std::cout << "full ansatz: solvable, x_4^2 x_5 coefficient "
            << format_rat(cert.square_coefficient) << " in every solution (nullity "
            << cert.full_nullity << ", all nullspace vectors zero there)\n";
  return cert.ok() ? kExitSuccess : kExitMathFailure;
}

// --- surface ---------------------------------------------------------------------

int run_surface(const std::string& solution_path, const std::string& format,
                const std::string& out) {
  EmbeddingSolution sol = solution_from_json(load_json(solution_path));
  VerifyReport report = verify_solution(sol);
  if (!report.ok() || !sol.all_feasible()) {
    std::cerr << "solution does not verify; refusing to emit a surface\n";
    return kExitMathFailure;
  }
  SurfaceDescription surf = emit_surface(sol);
  std::string text;
  if (format == "latex")
    text = surface_to_latex(surf);
  else
    text = surface_to_json(surf).dump(2) + "\n";
  write_output(text, out);
  return kExitSuccess;
}

// --- check ---------------------------------------------------------------------

RatMatrix first_stratum_map(const StratifiedAlgebra& alg, const RatMatrix& T,
                            const char* predicate) {
  int d1 = alg.strata_dims[0];
  if (T.rows() == d1 && T.cols() == d1) return T;
  if (T.rows() == alg.dim() && T.cols() == alg.dim()) return restrict_to_first_stratum(alg, T);
  throw std::invalid_argument(std::string("predicate '") + predicate +
                              "': map must be d1 x d1 or dim x dim");
}

int run_check(const std::string& algebra_path, const std::string& map_path,
              const std::string& predicate) {
  AlgebraInput in = algebra_from_json(load_json(algebra_path));
  const StratifiedAlgebra& alg = in.algebra;
  int d1 = alg.strata_dims[0];

  if (predicate == "tight") {
    TightResult r = is_tight(alg);
    std::cout << "tight: " << (r.tight ? "true" : "false");
    if (r.tag == TightClass::TwoGenerator) std::cout << " (two-generator)";
    if (r.tag == TightClass::Heisenberg) std::cout << " (heisenberg)";
    std::cout << "\n";
    return r.tight ? kExitSuccess : kExitMathFailure;
  }

  if (map_path.empty())
    throw std::invalid_argument("predicate '" + predicate + "' requires --map");
  RatMatrix T = matrix_from_json(load_json(map_path));

  if (predicate == "automorphism") {
    if (T.rows() != alg.dim() || T.cols() != alg.dim())
      throw std::invalid_argument("predicate 'automorphism': map must be dim x dim");
    bool r = is_strata_automorphism(alg, T);
    std::cout << "strata automorphism: " << (r ? "true" : "false") << "\n";
    return r ? kExitSuccess : kExitMathFailure;
  }

  RatMatrix T1 = first_stratum_map(alg, T, predicate.c_str());

  if (predicate == "conformal") {
    RatMatrix gram = in.gram ? *in.gram : RatMatrix::identity(d1);
    ConformalResult r = is_conformal(T1, gram);
    std::cout << "conformal: " << (r.conformal ? "true" : "false");
    if (r.conformal && r.lambda_sq) std::cout << ", lambda^2 = " << format_rat(*r.lambda_sq);
    std::cout << "\n";
    return r.conformal ? kExitSuccess : kExitMathFailure;
  }

  // cr / anticr
  RatMatrix J = [&] {
    if (in.J) return *in.J;
    if (d1 % 2 == 0) return standard_J(d1 / 2);
    throw std::invalid_argument("predicate '" + predicate +
                                "': algebra file has no J and the first stratum is odd");
  }();
  if (predicate == "cr") {
    bool r = is_cr(T1, J);
    std::cout << "cr: " << (r ? "true" : "false") << "\n";
    return r ? kExitSuccess : kExitMathFailure;
  }
  bool r = is_anti_cr(T1, J);
  std::cout << "anticr: " << (r ? "true" : "false") << "\n";
  return r ? kExitSuccess : kExitMathFailure;
}

// --- distortion -------------------------------------------------------------------

int run_distortion(const std::string& algebra_path, const std::string& map_path, double tol) {
  AlgebraInput in = algebra_from_json(load_json(algebra_path));
  RatMatrix T = matrix_from_json(load_json(map_path));
  RatMatrix T1 = first_stratum_map(in.algebra, T, "distortion");
  RatMatrix gram = in.gram ? *in.gram : RatMatrix::identity(in.algebra.strata_dims[0]);
  double value = distortion(T1, gram, tol);
  std::ostringstream os;
  os.precision(15);
  os << value << "\n";
  std::cout << os.str();
  return kExitSuccess;
}

// --- product ---------------------------------------------------------------------

int run_product(const std::vector<std::string>& factor_paths, const std::string& decompose_path,
                const std::string& out) {
  std::vector<StratifiedAlgebra> factors;
  for (const std::string& path : factor_paths)
    factors.push_back(algebra_from_json(load_json(path)).algebra);
  DirectSum ds = direct_sum(std::move(factors));

  if (decompose_path.empty()) {
    write_output(algebra_to_json(ds.sum).dump(2) + "\n", out);
    return kExitSuccess;
  }

  RatMatrix T = matrix_from_json(load_json(decompose_path));
  auto dec = decompose_product_automorphism(ds, T);
  if (!dec) {
    std::cerr << "map is not product-compatible\n";
    return kExitMathFailure;
  }
  Json j;
  j["sigma"] = dec->sigma;
  Json blocks = Json::array();
  for (const RatMatrix& B : dec->blocks) blocks.push_back(matrix_to_json(B));
  j["blocks"] = std::move(blocks);
  write_output(j.dump(2) + "\n", out);
  if (assemble_product_automorphism(ds, *dec) != T) {
    std::cerr << "reassembly mismatch\n";
    return kExitMathFailure;
  }
  return kExitSuccess;
}

// --- selftest ---------------------------------------------------------------------

int run_selftest_cmd(unsigned long long seed) {
  SelfTestReport report = run_selftest(seed);
  std::cout << "seed " << report.seed << "\n";
  for (const auto& [name, passed] : report.checks)
    std::cout << (passed ? "[PASS] " : "[FAIL] ") << name << "\n";
  std::cout << (report.ok() ? "all checks passed" : "CHECKS FAILED") << "\n";
  return report.ok() ? kExitSuccess : kExitMathFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact-arithmetic tools for free nilpotent Lie algebras on two "
               "generators: Hall bases, polynomial realizations, the "
               "graph-coordinate embedding system, and stratified-algebra "
               "predicates."};
  app.require_subcommand(1);

  int step = 2;
  std::string format_hall = "text";
  std::string format_sc = "json";
  std::string format_lemmas = "text";
  std::string format_surface = "json";
  std::string ansatz = "restricted";
  std::string out;
  std::string solution_path;
  std::string algebra_path;
  std::string map_path;
  std::string predicate;
  std::string decompose_path;
  std::vector<std::string> factor_paths;
  double tol = 1e-12;
  unsigned long long seed = 20240816ULL;

  CLI::App* hall = app.add_subcommand("hall", "Generate the Hall basis and its monomial table");
  hall->add_option("--step", step, "nilpotency step")->required()->check(CLI::Range(1, 64));
  hall->add_option("--format", format_hall)->check(CLI::IsMember({"text", "json", "latex"}));
  hall->add_option("--out", out, "output file (stdout if omitted)");

  CLI::App* sc = app.add_subcommand("structure-constants",
                                    "Bracket table of the polynomial realization");
  sc->add_option("--step", step)->required()->check(CLI::Range(1, 64));
  sc->add_option("--format", format_sc)->check(CLI::IsMember({"text", "json"}));
  sc->add_option("--out", out);

  CLI::App* embed = app.add_subcommand("embed", "Solve the embedding system");
  embed->add_option("--step", step)->required()->check(CLI::Range(2, 64));
  embed->add_option("--ansatz", ansatz)->check(CLI::IsMember({"restricted", "linear", "full"}));
  embed->add_option("--out", out, "solution JSON file (stdout if omitted)");

  CLI::App* verify = app.add_subcommand("verify", "Re-verify a solution file exactly");
  verify->add_option("--solution", solution_path)->required();

  CLI::App* lemmas = app.add_subcommand("lemmas", "Span tables for the product terms");
  lemmas->add_option("--step", step)->required()->check(CLI::Range(2, 8));
  lemmas->add_option("--format", format_lemmas)->check(CLI::IsMember({"text", "json"}));
  lemmas->add_option("--out", out);

  app.add_subcommand("counterexample",
                     "Certify the step-9 obstruction for the restricted ansatz");

  CLI::App* surface = app.add_subcommand("surface", "Emit the embedded surface");
  surface->add_option("--solution", solution_path)->required();
  surface->add_option("--format", format_surface)->check(CLI::IsMember({"json", "latex"}));
  surface->add_option("--out", out);

  CLI::App* check = app.add_subcommand("check", "Evaluate a predicate on an algebra/map");
  check->add_option("--algebra", algebra_path)->required();
  check->add_option("--map", map_path);
  check->add_option("--predicate", predicate)
      ->required()
      ->check(CLI::IsMember({"conformal", "cr", "anticr", "tight", "automorphism"}));

  CLI::App* dist = app.add_subcommand("distortion", "Quasiconformal distortion of a map");
  dist->add_option("--algebra", algebra_path)->required();
  dist->add_option("--map", map_path)->required();
  dist->add_option("--tol", tol, "enclosure width for the eigenvalue bisection");

  CLI::App* product = app.add_subcommand("product", "Direct sums and product decompositions");
  product->add_option("--factors", factor_paths, "factor algebra files")
      ->required()
      ->expected(1, -1);
  product->add_option("--decompose", decompose_path, "map file to decompose");
  product->add_option("--out", out);

  CLI::App* selftest = app.add_subcommand("selftest", "Run the seeded property suite");
  selftest->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (app.got_subcommand(hall)) return run_hall(step, format_hall, out);
    if (app.got_subcommand(sc)) return run_structure_constants(step, format_sc, out);
    if (app.got_subcommand(embed)) return run_embed(step, ansatz, out);
    if (app.got_subcommand(verify)) return run_verify(solution_path);
    if (app.got_subcommand(lemmas)) return run_lemmas(step, format_lemmas, out);
    if (app.got_subcommand("counterexample")) return run_counterexample();
    if (app.got_subcommand(surface)) return run_surface(solution_path, format_surface, out);
    if (app.got_subcommand(check)) return run_check(algebra_path, map_path, predicate);
    if (app.got_subcommand(dist)) return run_distortion(algebra_path, map_path, tol);
    if (app.got_subcommand(product)) return run_product(factor_paths, decompose_path, out);
    if (app.got_subcommand(selftest)) return run_selftest_cmd(seed);
  } catch (const SpanViolation& e) {
    std::cerr << "span violation: " << e.what() << "\n";
    return kExitMathFailure;
  } catch (const CertificateFailure& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    return kExitMathFailure;
  } catch (const ExpansionFailure& e) {
    std::cerr << "expansion failure: " << e.what() << "\n";
    return kExitMathFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitMathFailure;
  }
  return kExitUsage;
}
