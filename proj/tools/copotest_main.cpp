#include <CLI11.hpp>
#include <atomic>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "copo/corpus.hpp"
#include "copo/sdp.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Eigen::MatrixXd read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  int n = 0;
  in >> n;
  if (n < 1) throw std::runtime_error("matrix file: bad dimension");
  Eigen::MatrixXd A(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (!(in >> A(r, c)))
        throw std::runtime_error("matrix file: not enough entries");
  return A;
}

copo::Polynomial load_input(const std::string& path, const std::string& form,
                            const copo::VarSpace& space) {
  if (form == "poly") {
    std::string text = read_file(path);
    // Strip comment lines starting with '#'.
    std::string cleaned;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      cleaned += line + " ";
    }
    return copo::parse_polynomial(cleaned, space);
  }
  const Eigen::MatrixXd A = read_matrix_file(path);
  if (form == "quad") return copo::quadratic_form(space, A);
  if (form == "trace-xa2") return copo::trace_xa_squared(space, A);
  if (form == "trace-x2a-xax") return copo::trace_x2a_plus_xax(space, A);
  throw std::runtime_error("unknown input form: " + form);
}

void print_verdict(const copo::Verdict& v) {
  switch (v.kind) {
    case copo::Verdict::Kind::Copositive:
      std::cout << "Copositive at k=" << v.order << " (bound "
                << copo::format_double(v.bound) << ")\n";
      break;
    case copo::Verdict::Kind::NotCopositive: {
      std::cout << "NotCopositive at k=" << v.order << " (bound "
                << copo::format_double(v.bound) << ")\n";
      std::cout << "witness u = (";
      for (size_t i = 0; i < v.witness_u.size(); ++i)
        std::cout << (i ? ", " : "") << copo::format_double(v.witness_u[i]);
      std::cout << ")\n";
      if (!v.witness_v.empty()) {
        std::cout << "witness v = (";
        for (size_t i = 0; i < v.witness_v.size(); ++i)
          std::cout << (i ? ", " : "") << copo::format_double(v.witness_v[i]);
        std::cout << ")\n";
      }
      std::cout << "f(witness) = " << copo::format_double(v.value) << "\n";
      break;
    }
    case copo::Verdict::Kind::Inconclusive:
      std::cout << "Inconclusive up to k=" << v.order << " (best bound "
                << copo::format_double(v.bound) << ")\n";
      break;
    case copo::Verdict::Kind::Error:
      std::cout << "Error: " << v.message << "\n";
      break;
  }
}

int exit_code(const copo::Verdict& v) {
  switch (v.kind) {
    case copo::Verdict::Kind::Copositive:
      return 0;
    case copo::Verdict::Kind::NotCopositive:
      return 1;
    case copo::Verdict::Kind::Inconclusive:
      return 2;
    default:
      return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copositivity testing over the semidefinite cone"};
  app.require_subcommand(1);

  std::string input, form = "poly", backend = "internal", json_path;
  int n = 1, m = 0;
  std::optional<int> kmax, kstart;
  std::uint64_t seed = 0;
  bool allow_inhomogeneous = false, verbose = false;

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    auto* in = cmd->add_option("--input", input, "input file");
    cmd->add_option("--form", form,
                    "input form: poly|quad|trace-xa2|trace-x2a-xax");
    cmd->add_option("--n", n, "matrix dimension")->required();
    cmd->add_option("--m", m, "orthant dimension");
    cmd->add_option("--seed", seed, "RNG seed for the generic direction");
    cmd->add_flag("--allow-inhomogeneous", allow_inhomogeneous,
                  "accept objectives mixing degrees (uses d = deg f)");
    cmd->add_flag("-v,--verbose", verbose, "per-iteration diagnostics");
    if (needs_input) in->required();
  };

  auto* test = app.add_subcommand("test", "decide copositivity of an input");
  add_common(test, true);
  test->add_option("--kmax", kmax, "relaxation order cap (default d0+4)");
  test->add_option("--kstart", kstart, "first relaxation order");
  test->add_option("--backend", backend, "internal or sdpa:<command>");
  test->add_option("--json", json_path, "write the verdict as JSON");

  auto* corpus = app.add_subcommand("corpus", "run the built-in case suites");
  std::string suite = "all";
  int jobs = 1;
  bool include_slow = false;
  std::string corpus_json;
  corpus->add_option("--suite", suite,
                     "table1|table2|table3|table4|horn|mixed|all");
  corpus->add_option("--jobs", jobs, "parallel case workers");
  corpus->add_flag("--slow", include_slow, "include slow-tagged cases");
  corpus->add_option("--json", corpus_json, "write the report as JSON");
  corpus->add_option("--seed", seed, "RNG seed");
  corpus->add_option("--backend", backend, "internal or sdpa:<command>");

  auto* emit = app.add_subcommand("emit", "write a relaxation in SDPA format");
  add_common(emit, true);
  int order = 0;
  std::string out_path;
  std::optional<double> aux_bound;
  emit->add_option("--order", order, "relaxation order k")->required();
  emit->add_option("--out", out_path, "output path")->required();
  emit->add_option("--aux", aux_bound,
                   "emit the auxiliary program for this bound");

  auto* solve_cmd = app.add_subcommand(
      "solve-sdpa", "solve a sparse SDPA file with the internal solver");
  std::string sdpa_in, sdpa_out;
  solve_cmd->add_option("input", sdpa_in, "problem file (.dat-s)")->required();
  solve_cmd->add_option("output", sdpa_out, "result file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (test->parsed()) {
      copo::VarSpace space(n, m);
      copo::Polynomial f = load_input(input, form, space);
      copo::TestOptions opts;
      opts.k_start = kstart;
      opts.k_max = kmax;
      opts.seed = seed;
      opts.allow_inhomogeneous = allow_inhomogeneous;
      opts.verbose = verbose;
      opts.solver.backend = backend;
      copo::Verdict v = copo::test_copositivity(f, opts);
      print_verdict(v);
      if (!json_path.empty()) {
        std::ofstream out(json_path);
        out << v.to_json() << "\n";
      }
      return exit_code(v);
    }

    if (corpus->parsed()) {
      std::vector<copo::CorpusCase> cases;
      for (auto& c : copo::corpus_cases()) {
        if (suite != "all" && c.suite != suite) continue;
        if (suite == "all" && c.slow && !include_slow) continue;
        cases.push_back(std::move(c));
      }
      if (cases.empty()) {
        std::cerr << "no cases selected for suite '" << suite << "'\n";
        return 3;
      }
      copo::TestOptions opts;
      opts.seed = seed;
      opts.solver.backend = backend;

      std::vector<copo::CaseResult> results(cases.size());
      std::atomic<size_t> next{0};
      auto worker = [&] {
        while (true) {
          const size_t i = next.fetch_add(1);
          if (i >= cases.size()) break;
          results[i] = copo::run_corpus_case(cases[i], opts);
        }
      };
      const int nworkers =
          std::max(1, std::min<int>(jobs, static_cast<int>(cases.size())));
      std::vector<std::thread> pool;
      for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();

      std::printf("%-18s %-6s %-15s %4s %14s %9s  %s\n", "case", "suite",
                  "verdict", "k", "bound", "time(s)", "check");
      bool all_pass = true;
      for (size_t i = 0; i < cases.size(); ++i) {
        const auto& r = results[i];
        all_pass = all_pass && r.pass;
        std::printf("%-18s %-6s %-15s %4d %14.6g %9.2f  %s%s\n",
                    r.name.c_str(), cases[i].suite.c_str(),
                    copo::to_string(r.verdict.kind).c_str(), r.verdict.order,
                    r.verdict.bound, r.verdict.total_time_s,
                    r.pass ? "pass" : "FAIL ", r.detail.c_str());
      }
      if (!corpus_json.empty()) {
        nlohmann::json j;
        j["suite"] = suite;
        j["cases"] = nlohmann::json::array();
        for (size_t i = 0; i < cases.size(); ++i) {
          nlohmann::json jc = nlohmann::json::parse(results[i].verdict.to_json());
          jc["name"] = results[i].name;
          jc["pass"] = results[i].pass;
          if (!results[i].detail.empty()) jc["detail"] = results[i].detail;
          j["cases"].push_back(jc);
        }
        std::ofstream out(corpus_json);
        out << j.dump(2) << "\n";
      }
      return all_pass ? 0 : 1;
    }

    if (emit->parsed()) {
      copo::VarSpace space(n, m);
      copo::Polynomial f = load_input(input, form, space);
      copo::ProblemSpec spec =
          copo::build_problem_spec(f, allow_inhomogeneous);
      copo::ConicProblem problem;
      if (aux_bound) {
        const auto xi =
            copo::sample_generic_direction(space, spec.degree, seed);
        problem = copo::assemble_auxiliary(spec, xi, *aux_bound, order);
      } else {
        problem = copo::assemble_relaxation(spec, order);
      }
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot write " + out_path);
      out << copo::export_sdpa(problem);
      std::cout << "wrote " << out_path << " (nz=" << problem.nz << ", "
                << problem.eq_rows.size() << " equality rows, "
                << problem.psd_blocks.size() << " PSD blocks)\n";
      return 0;
    }

    if (solve_cmd->parsed()) {
      copo::ConicProblem problem = copo::parse_sdpa(read_file(sdpa_in));
      copo::SolveResult res = copo::solve(problem);
      const std::string text = copo::format_sdpa_result(res);
      if (sdpa_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(sdpa_out);
        out << text;
      }
      return res.status == copo::SolveStatus::Optimal ? 0 : 1;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  }
  return 3;
}
