// qcert: command-line front end for the certification simulator.
//
// Subcommands: certify, analyze, dtbasis, lowerbound {gen,tv,claim}.
// Reports are JSONL keyed by a master seed; rerunning with the same seed
// reproduces every row byte for byte (wall-clock timing goes to stdout only).
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/parse error,
// 3 dimension or contract violation, 4 cap exceeded.

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcert/analyzer.hpp"
#include "qcert/certify.hpp"
#include "qcert/io.hpp"
#include "qcert/lowerbound.hpp"
#include "qcert/parallel.hpp"

using json = nlohmann::ordered_json;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

class JsonlFile {
 public:
  explicit JsonlFile(const std::string& path) : out_(path) {
    if (!out_) throw qcert::FileFormatError("cannot write " + path);
  }
  void row(const json& j) { out_ << j.dump() << '\n'; }
  void raw(const std::string& line) { out_ << line << '\n'; }

 private:
  std::ofstream out_;
};

std::unique_ptr<qcert::TargetOracle> make_oracle(const qcert::LoadedState& loaded) {
  if (loaded.is_dense()) {
    return std::make_unique<qcert::DenseOracle>(std::get<qcert::StateVector>(loaded.state));
  }
  return std::make_unique<qcert::MpsOracle>(std::get<qcert::MpsState>(loaded.state));
}

void print_warnings(const qcert::LoadedState& loaded) {
  for (const std::string& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
}

// ---------------------------------------------------------------- certify --

struct CertifyArgs {
  std::string target_path, lab_path, out_path;
  double epsilon = 0, delta = 0;
  std::optional<uint64_t> copies;
  std::optional<double> threshold;
  uint64_t seed = 0;
  int max_n = 24;
};

int run_certify(const CertifyArgs& a) {
  Timer timer;
  const qcert::LoadedState target = qcert::load_state_file(a.target_path, a.max_n);
  const qcert::LoadedState lab_loaded = qcert::load_state_file(a.lab_path, a.max_n);
  print_warnings(target);
  print_warnings(lab_loaded);

  auto oracle = make_oracle(target);
  const qcert::StateVector lab = qcert::as_dense_state(lab_loaded, a.max_n);
  if (lab.n != oracle->qubit_count()) {
    throw qcert::ContractError("target and lab qubit counts differ");
  }

  qcert::WrapperConfig cfg;
  cfg.epsilon = a.epsilon;
  cfg.delta = a.delta;
  if (a.copies) cfg.copies = *a.copies;
  if (a.threshold) cfg.reject_threshold = *a.threshold;

  const qcert::PureMixture mixture = qcert::PureMixture::pure(lab);
  const qcert::WrapperResult res =
      qcert::certify_amplified(mixture, *oracle, cfg, a.seed, /*keep_transcripts=*/true);

  double fid = -1;
  if (target.is_dense()) {
    fid = mixture.fidelity_with(std::get<qcert::StateVector>(target.state));
  } else {
    fid = mixture.fidelity_with(qcert::as_dense_state(target, a.max_n));
  }

  JsonlFile out(a.out_path);
  json header;
  header["row"] = "header";
  header["run_id"] = qcert::run_id(a.seed, "certify");
  header["subcommand"] = "certify";
  header["format_version"] = 1;
  header["master_seed"] = a.seed;
  header["n"] = lab.n;
  header["epsilon"] = a.epsilon;
  header["delta"] = a.delta;
  header["copies"] = res.copies;
  header["threshold"] = res.threshold;
  header["copies_constant"] = qcert::WrapperConfig::kCopiesConstant;
  header["target_kind"] = target.is_dense() ? "dense" : "mps";
  header["fid"] = fid;
  out.row(header);

  for (uint64_t i = 0; i < res.transcripts.size(); ++i) {
    out.raw(qcert::transcript_jsonl_row(res.transcripts[i], i));
  }

  json summary;
  summary["row"] = "summary";
  summary["verdict"] = res.verdict == qcert::Verdict::Accept ? "accept" : "reject";
  summary["reject_fraction"] = res.reject_fraction;
  summary["rejected"] = res.rejected;
  summary["copies"] = res.copies;
  summary["total_oracle_queries"] = oracle->query_count();
  out.row(summary);

  std::cout << "verdict: " << (res.verdict == qcert::Verdict::Accept ? "Accept" : "Reject")
            << "\nreject_fraction: " << res.reject_fraction << " (threshold " << res.threshold
            << ")\ncopies: " << res.copies << "\nelapsed_s: " << timer.seconds() << '\n';
  return 0;
}

// ---------------------------------------------------------------- analyze --

struct AnalyzeArgs {
  std::string target_path, lab_path, out_path;
  int analyzer_cap = qcert::kDefaultAnalyzerCap;
  int max_n = 24;
};

int run_analyze(const AnalyzeArgs& a) {
  Timer timer;
  const qcert::LoadedState target = qcert::load_state_file(a.target_path, a.max_n);
  const qcert::LoadedState lab_loaded = qcert::load_state_file(a.lab_path, a.max_n);
  print_warnings(target);
  print_warnings(lab_loaded);
  const qcert::StateVector tar = qcert::as_dense_state(target, a.max_n);
  const qcert::StateVector lab = qcert::as_dense_state(lab_loaded, a.max_n);
  if (lab.n != tar.n) throw qcert::ContractError("target and lab qubit counts differ");

  const qcert::ExactDistribution dist = qcert::exact_distribution(lab, tar, a.analyzer_cap);
  const double fid = std::norm(qcert::overlap(tar, lab));
  const std::vector<double> phi = qcert::phi_sequence(lab, tar);
  const double mean_gap = qcert::expected_fidelity_gap(lab, tar);
  const bool full_support = qcert::full_target_support(lab, tar);
  const int n = lab.n;

  JsonlFile out(a.out_path);
  json header;
  header["row"] = "header";
  header["run_id"] = qcert::run_id(0, "analyze");
  header["subcommand"] = "analyze";
  header["format_version"] = 1;
  header["n"] = n;
  out.row(header);

  json r;
  r["row"] = "result";
  r["fid"] = fid;
  r["p_accept"] = dist.p_accept;
  r["p_reject"] = dist.p_reject;
  r["accept_margin"] = dist.p_accept - fid;
  r["reject_margin"] = dist.p_reject - (1.0 - fid) / n;
  r["phi"] = phi;
  r["expected_fidelity_gap"] = mean_gap;
  r["telescoping_residual"] = mean_gap - (phi[n] - phi[0]) / n;
  r["full_target_support"] = full_support;
  r["pruned_mass"] = dist.pruned_mass;
  r["degenerate_mass"] = dist.degenerate_mass;
  out.row(r);

  std::cout << "Fid: " << fid << "\np_accept: " << dist.p_accept
            << " (margin " << dist.p_accept - fid << ")\np_reject: " << dist.p_reject
            << " (margin " << dist.p_reject - (1.0 - fid) / n << ")\nE[fidelity gap]: "
            << mean_gap << "\nfull_target_support: " << (full_support ? "yes" : "no")
            << "\nelapsed_s: " << timer.seconds() << '\n';
  return 0;
}

// ---------------------------------------------------------------- dtbasis --

struct DtbasisArgs {
  std::string state0_path, state1_path, dump_path;
  bool check = false;
  int eager_cap = qcert::kDefaultEagerCap;
  int max_n = 24;
};

int run_dtbasis(const DtbasisArgs& a) {
  const qcert::LoadedState s0 = qcert::load_state_file(a.state0_path, a.max_n);
  const qcert::LoadedState s1 = qcert::load_state_file(a.state1_path, a.max_n);
  print_warnings(s0);
  print_warnings(s1);
  const qcert::StateVector phi0 = qcert::as_dense_state(s0, a.max_n);
  const qcert::StateVector phi1 = qcert::as_dense_state(s1, a.max_n);
  if (phi0.n != phi1.n) throw qcert::ContractError("state qubit counts differ");

  const qcert::DtTree tree = qcert::build_phase_tree(phi0, phi1, a.eager_cap);
  std::cout << "built depth-" << tree.depth << " tree (" << tree.node_count() << " nodes)\n";

  if (a.check) {
    const double expect = std::pow(0.5, tree.depth);
    double max_dev = 0;
    for (const qcert::StateVector* s : {&phi0, &phi1}) {
      const std::vector<qcert::Amp> leaves = qcert::leaf_amplitudes(tree, *s);
      for (const qcert::Amp& amp : leaves) {
        max_dev = std::max(max_dev, std::abs(std::norm(amp) - expect));
      }
    }
    std::cout << "max leaf probability deviation: " << max_dev << '\n';
    if (max_dev > qcert::tol::kValidate) {
      std::cerr << "leaf uniformity check failed\n";
      return 1;
    }
  }
  if (!a.dump_path.empty()) {
    qcert::save_dt_tree(a.dump_path, tree);
    std::cout << "tree written to " << a.dump_path << '\n';
  }
  return 0;
}

// -------------------------------------------------------------- lowerbound --

struct LowerboundArgs {
  std::string mode;  // gen | tv | claim
  int n = 8;
  int codewords = 16;
  int trials = 10;
  uint64_t seed = 0;
  std::string out_path;
  int bases = 50;
  int adaptivity = 0;
  int grid = 20000;
  int refine = 24;
  int dense_cap = qcert::kDefaultDenseCap;
};

json ensemble_row_base(const qcert::CodeEnsemble& c) {
  json j;
  j["seed"] = c.seed;
  j["trial"] = c.trial;
  j["n"] = c.n;
  j["N"] = c.codeword_count;
  return j;
}

int run_lowerbound(const LowerboundArgs& a) {
  Timer timer;
  if (a.mode == "claim") {
    const qcert::UncertaintyScan scan = qcert::verify_uncertainty_claim(a.grid, a.refine);
    std::cout << "max_min_value: " << scan.max_min_value << "\nargmax_axis: ["
              << scan.argmax.x << ", " << scan.argmax.y << ", " << scan.argmax.z
              << "]\nbases_evaluated: " << scan.bases_evaluated
              << "\nelapsed_s: " << timer.seconds() << '\n';
    if (!a.out_path.empty()) {
      JsonlFile out(a.out_path);
      json j;
      j["row"] = "claim";
      j["run_id"] = qcert::run_id(a.seed, "lowerbound.claim");
      j["grid"] = a.grid;
      j["refine"] = a.refine;
      j["bases_evaluated"] = scan.bases_evaluated;
      j["max_min_value"] = scan.max_min_value;
      j["argmax_axis"] = json::array({scan.argmax.x, scan.argmax.y, scan.argmax.z});
      out.row(j);
    }
    if (scan.max_min_value > 0.99 + 1e-6) {
      std::cerr << "bound violated: " << scan.max_min_value << " > 0.99\n";
      return 1;
    }
    return 0;
  }

  if (a.out_path.empty()) throw CLI::ValidationError("--out is required for gen/tv");
  if (a.n > a.dense_cap) {
    throw qcert::CapacityError("lowerbound: n exceeds dense cap " + std::to_string(a.dense_cap));
  }
  JsonlFile out(a.out_path);
  json header;
  header["row"] = "header";
  header["run_id"] = qcert::run_id(a.seed, "lowerbound." + a.mode);
  header["subcommand"] = "lowerbound " + a.mode;
  header["format_version"] = 1;
  header["master_seed"] = a.seed;
  header["n"] = a.n;
  header["N"] = a.codewords;
  header["trials"] = a.trials;
  out.row(header);

  for (int trial = 0; trial < a.trials; ++trial) {
    const qcert::CodeEnsemble c =
        qcert::random_code_ensemble(a.n, a.codewords, a.seed, static_cast<uint64_t>(trial));
    const qcert::CodewordSuperposition sup = qcert::build_codeword_superposition(c);
    if (a.mode == "gen") {
      json j = ensemble_row_base(c);
      j["row"] = "gen";
      j["norm_sq"] = sup.norm_sq;
      j["fidelity"] = qcert::mixture_fidelity(c);
      out.row(j);
      continue;
    }
    // tv: sampled bases per trial
    qcert::PhiloxRng basis_rng(a.seed ^ 0x9e3779b97f4a7c15ull, static_cast<uint64_t>(trial));
    for (int b = 0; b < a.bases; ++b) {
      qcert::AdaptiveProductBasis basis;
      std::string descriptor = "product";
      if (a.adaptivity > 0) {
        std::vector<int> s_qubits;
        while (static_cast<int>(s_qubits.size()) < std::min(a.adaptivity, a.n)) {
          const int q = 1 + static_cast<int>(basis_rng.uniform_below(a.n));
          if (std::find(s_qubits.begin(), s_qubits.end(), q) == s_qubits.end()) {
            s_qubits.push_back(q);
          }
        }
        std::sort(s_qubits.begin(), s_qubits.end());
        basis = qcert::random_adaptive_basis(a.n, s_qubits, basis_rng);
        descriptor = "adaptive:S=";
        for (std::size_t i = 0; i < s_qubits.size(); ++i) {
          descriptor += (i ? "," : "") + std::to_string(s_qubits[i]);
        }
      } else {
        basis = qcert::random_product_basis(a.n, basis_rng);
      }
      json j = ensemble_row_base(c);
      j["row"] = "tv";
      j["basis_index"] = b;
      j["basis_descriptor"] = descriptor;
      j["norm_sq"] = sup.norm_sq;
      j["cross_term"] = qcert::cross_term_sum(c, basis);
      if (basis.is_product()) {
        j["cross_term_bound"] = qcert::cross_term_upper_bound(c, basis);
      }
      j["spectral_slack"] = std::abs(1.0 - sup.norm_sq);
      j["tv"] = qcert::tv_distance_in_basis(sup.psi, c, basis);
      out.row(j);
    }
  }
  std::cout << "wrote " << a.out_path << "\nelapsed_s: " << timer.seconds() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certification of pure quantum states with single-qubit measurements"};
  app.require_subcommand(1);

  CertifyArgs cert;
  CLI::App* certify = app.add_subcommand("certify", "Run the amplified certification test");
  certify->add_option("--target", cert.target_path, "Target state file (dense or mps)")->required();
  certify->add_option("--lab", cert.lab_path, "Lab state file")->required();
  certify->add_option("--epsilon", cert.epsilon, "Infidelity scale in (0,1)")
      ->required()->check(CLI::Range(1e-12, 1.0));
  certify->add_option("--delta", cert.delta, "Failure probability in (0,1)")
      ->required()->check(CLI::Range(1e-12, 1.0));
  certify->add_option("--copies", cert.copies, "Copy count override (>= 1)")
      ->check(CLI::Range(uint64_t{1}, std::numeric_limits<uint64_t>::max()));
  certify->add_option("--threshold", cert.threshold, "Reject-fraction threshold override");
  certify->add_option("--seed", cert.seed, "Master seed")->required();
  certify->add_option("--out", cert.out_path, "JSONL report path")->required();
  certify->add_option("--max-n", cert.max_n, "Dense state cap");

  AnalyzeArgs ana;
  CLI::App* analyze = app.add_subcommand("analyze", "Exact outcome distribution and margins");
  analyze->add_option("--target", ana.target_path, "Target state file")->required();
  analyze->add_option("--lab", ana.lab_path, "Lab state file")->required();
  analyze->add_option("--out", ana.out_path, "JSONL report path")->required();
  analyze->add_option("--analyzer-cap", ana.analyzer_cap, "Enumeration qubit cap (memory ~ n 2^n rows)");
  analyze->add_option("--max-n", ana.max_n, "Dense state cap");

  DtbasisArgs dtb;
  CLI::App* dtbasis = app.add_subcommand("dtbasis", "Build the two-state phase tree");
  dtbasis->add_option("--state0", dtb.state0_path, "First generator state")->required();
  dtbasis->add_option("--state1", dtb.state1_path, "Second generator state")->required();
  dtbasis->add_option("--dump", dtb.dump_path, "Write the tree as JSON");
  dtbasis->add_flag("--check", dtb.check, "Verify leaf uniformity");
  dtbasis->add_option("--eager-cap", dtb.eager_cap, "Tree depth cap (memory ~ 2^m nodes)");
  dtbasis->add_option("--max-n", dtb.max_n, "Dense state cap");

  LowerboundArgs lb;
  CLI::App* lowerbound = app.add_subcommand("lowerbound", "Hard-instance constructions");
  lowerbound->add_option("mode", lb.mode, "gen | tv | claim")
      ->required()->check(CLI::IsMember({"gen", "tv", "claim"}));
  lowerbound->add_option("--n", lb.n, "Qubit count")->check(CLI::Range(1, 24));
  lowerbound->add_option("--N", lb.codewords, "Codeword count")->check(CLI::Range(1, 1 << 20));
  lowerbound->add_option("--trials", lb.trials, "Ensemble trials")->check(CLI::Range(1, 1 << 20));
  lowerbound->add_option("--seed", lb.seed, "Master seed");
  lowerbound->add_option("--out", lb.out_path, "JSONL report path");
  lowerbound->add_option("--bases", lb.bases, "Sampled bases per trial (tv)");
  lowerbound->add_option("--adaptive", lb.adaptivity, "Adaptive qubit budget (tv)")
      ->check(CLI::Range(0, 8));
  lowerbound->add_option("--grid", lb.grid, "Sphere grid resolution (claim)")
      ->check(CLI::Range(1000, 100000000));
  lowerbound->add_option("--refine", lb.refine, "Refinement rounds (claim)")
      ->check(CLI::Range(0, 1000));
  lowerbound->add_option("--dense-cap", lb.dense_cap, "Dense construction cap (memory ~ 16 B * 4^n)");

  try {
    app.parse(argc, argv);
    if (certify->parsed()) return run_certify(cert);
    if (analyze->parsed()) return run_analyze(ana);
    if (dtbasis->parsed()) return run_dtbasis(dtb);
    if (lowerbound->parsed()) return run_lowerbound(lb);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const qcert::CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const qcert::FileFormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const qcert::ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
