#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qcert/io.hpp"
#include "testutil.hpp"

using namespace qcert;
namespace tu = qcert::testutil;
namespace fs = std::filesystem;

namespace {

std::string g_cli_path;  // set from --cli=PATH

fs::path temp_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "qcert_test_io";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = g_cli_path + " " + args + " >" + (temp_dir() / "stdout.txt").string() +
                          " 2>" + (temp_dir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("dense state files round trip bitwise") {
  PhiloxRng rng(701);
  const StateVector s = tu::haar_state(4, rng);
  const fs::path p = temp_dir() / "dense.json";
  save_dense_state_file(p, s);
  const LoadedState loaded = load_state_file(p);
  REQUIRE(loaded.is_dense());
  CHECK(loaded.warnings.empty());
  const StateVector& back = std::get<StateVector>(loaded.state);
  REQUIRE(back.n == s.n);
  for (std::size_t i = 0; i < s.amps.size(); ++i) CHECK(back.amps[i] == s.amps[i]);

  // Re-saving yields identical bytes.
  const fs::path p2 = temp_dir() / "dense2.json";
  save_dense_state_file(p2, back);
  CHECK(slurp(p) == slurp(p2));
}

TEST_CASE("mps state files round trip") {
  PhiloxRng rng(702);
  const MpsState mps = random_mps(5, 3, rng);
  const fs::path p = temp_dir() / "mps.json";
  save_mps_state_file(p, mps);
  const LoadedState loaded = load_state_file(p);
  REQUIRE_FALSE(loaded.is_dense());
  const MpsState& back = std::get<MpsState>(loaded.state);
  const StateVector a = mps_to_dense(mps);
  const StateVector b = mps_to_dense(back);
  for (std::size_t i = 0; i < a.amps.size(); ++i) CHECK(a.amps[i] == b.amps[i]);
}

TEST_CASE("ingest normalization policy") {
  const fs::path p = temp_dir() / "norm.json";
  {
    std::ofstream out(p);
    out << R"({"format_version":1,"kind":"dense","n":1,"amplitudes":[[1.00000002,0],[0,0]]})";
  }
  const LoadedState mild = load_state_file(p);  // ~4e-8 norm error: renormalized
  CHECK(mild.warnings.size() == 1);
  CHECK(std::abs(std::get<StateVector>(mild.state).amps[0] - Amp(1, 0)) < 1e-9);

  {
    std::ofstream out(p);
    out << R"({"format_version":1,"kind":"dense","n":1,"amplitudes":[[1.01,0],[0,0]]})";
  }
  CHECK_THROWS_AS(load_state_file(p), FileFormatError);
}

TEST_CASE("malformed inputs are rejected") {
  const fs::path p = temp_dir() / "bad.json";
  {
    std::ofstream out(p);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_state_file(p), FileFormatError);
  {
    std::ofstream out(p);
    out << R"({"format_version":1,"kind":"dense","n":2,"amplitudes":[[1,0]]})";
  }
  CHECK_THROWS_AS(load_state_file(p), FileFormatError);
  {
    std::ofstream out(p);
    out << R"({"format_version":2,"kind":"dense","n":1,"amplitudes":[[1,0],[0,0]]})";
  }
  CHECK_THROWS_AS(load_state_file(p), FileFormatError);
  CHECK_THROWS_AS(load_state_file(temp_dir() / "missing.json"), FileFormatError);
}

TEST_CASE("qubit cap on ingest") {
  PhiloxRng rng(703);
  const fs::path p = temp_dir() / "five.json";
  save_dense_state_file(p, tu::haar_state(5, rng));
  CHECK_THROWS_AS(load_state_file(p, 4), CapacityError);
}

TEST_CASE("tree dump round trip") {
  PhiloxRng rng(704);
  const StateVector a = tu::haar_state(3, rng);
  const StateVector b = tu::haar_state(3, rng);
  const DtTree tree = build_phase_tree(a, b);
  const fs::path p = temp_dir() / "tree.json";
  save_dt_tree(p, tree);
  const DtTree back = load_dt_tree(p);
  REQUIRE(back.depth == tree.depth);
  REQUIRE(back.node_count() == tree.node_count());
  for (uint64_t i = 0; i < tree.node_count(); ++i) {
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(tree.node(i).b[j] - back.node(i).b[j]) < 1e-15);
      CHECK(std::abs(tree.node(i).b_perp[j] - back.node(i).b_perp[j]) < 1e-15);
    }
  }
}

TEST_CASE("transcript rows and run ids are deterministic") {
  PhiloxRng state_rng(705);
  const StateVector tar = tu::haar_state(3, state_rng);
  DenseOracle oracle(tar);
  PhiloxRng r1(706, 0), r2(706, 0);
  const CertifyTranscript t1 = certify_once(tar, oracle, r1);
  const CertifyTranscript t2 = certify_once(tar, oracle, r2);
  CHECK(transcript_jsonl_row(t1, 0) == transcript_jsonl_row(t2, 0));
  CHECK(run_id(7, "certify") == run_id(7, "certify"));
  CHECK(run_id(7, "certify") != run_id(7, "analyze"));
  CHECK(run_id(7, "certify") != run_id(8, "certify"));
}

TEST_CASE("cli: end-to-end flows and exit codes") {
  if (g_cli_path.empty()) {
    MESSAGE("--cli not provided; skipping CLI end-to-end checks");
    return;
  }
  const fs::path dir = temp_dir();
  PhiloxRng rng(707);
  const StateVector tar = tu::haar_state(3, rng);
  const StateVector other = tu::haar_state(4, rng);
  save_dense_state_file(dir / "tar.json", tar);
  save_dense_state_file(dir / "lab.json", tar);  // identical: must accept
  save_dense_state_file(dir / "other.json", other);

  SUBCASE("certify accepts identical states") {
    const int rc = run_cli("certify --target " + (dir / "tar.json").string() + " --lab " +
                           (dir / "lab.json").string() +
                           " --epsilon 0.3 --delta 0.2 --copies 50 --seed 9 --out " +
                           (dir / "report.jsonl").string());
    CHECK(rc == 0);
    const std::string report = slurp(dir / "report.jsonl");
    CHECK(report.find("\"verdict\":\"accept\"") != std::string::npos);
  }

  SUBCASE("certify is byte-deterministic in the seed") {
    const std::string base = "certify --target " + (dir / "tar.json").string() + " --lab " +
                             (dir / "lab.json").string() +
                             " --epsilon 0.3 --delta 0.2 --copies 40 --seed 1234 --out ";
    CHECK(run_cli(base + (dir / "d1.jsonl").string()) == 0);
    CHECK(run_cli(base + (dir / "d2.jsonl").string()) == 0);
    CHECK(slurp(dir / "d1.jsonl") == slurp(dir / "d2.jsonl"));
  }

  SUBCASE("usage errors exit 2") {
    CHECK(run_cli("certify --target " + (dir / "tar.json").string() + " --lab " +
                  (dir / "lab.json").string() +
                  " --epsilon 0.3 --delta 0.2 --copies 0 --seed 1 --out " +
                  (dir / "x.jsonl").string()) == 2);
    CHECK(run_cli("certify") == 2);
    CHECK(run_cli("nonsense") == 2);
  }

  SUBCASE("malformed input exits 2") {
    std::ofstream bad(dir / "bad.json");
    bad << "{ nope";
    bad.close();
    CHECK(run_cli("analyze --target " + (dir / "bad.json").string() + " --lab " +
                  (dir / "lab.json").string() + " --out " + (dir / "x.jsonl").string()) == 2);
  }

  SUBCASE("dimension mismatch exits 3") {
    CHECK(run_cli("certify --target " + (dir / "tar.json").string() + " --lab " +
                  (dir / "other.json").string() + " --epsilon 0.3 --delta 0.2 --seed 1 --out " +
                  (dir / "x.jsonl").string()) == 3);
    CHECK(run_cli("dtbasis --state0 " + (dir / "tar.json").string() + " --state1 " +
                  (dir / "other.json").string()) == 3);
  }

  SUBCASE("cap exceeded exits 4") {
    CHECK(run_cli("analyze --target " + (dir / "tar.json").string() + " --lab " +
                  (dir / "lab.json").string() + " --analyzer-cap 2 --out " +
                  (dir / "x.jsonl").string()) == 4);
    CHECK(run_cli("dtbasis --state0 " + (dir / "tar.json").string() + " --state1 " +
                  (dir / "tar.json").string() + " --eager-cap 2") == 4);
  }

  SUBCASE("analyze reports unit accept probability for identical files") {
    const int rc = run_cli("analyze --target " + (dir / "tar.json").string() + " --lab " +
                           (dir / "lab.json").string() + " --out " + (dir / "an.jsonl").string());
    CHECK(rc == 0);
    const std::string report = slurp(dir / "an.jsonl");
    CHECK(report.find("\"p_accept\":1.0") != std::string::npos);
  }

  SUBCASE("dtbasis check passes and dumps") {
    const int rc = run_cli("dtbasis --state0 " + (dir / "tar.json").string() + " --state1 " +
                           (dir / "lab.json").string() + " --check --dump " +
                           (dir / "tree.json").string());
    CHECK(rc == 0);
    CHECK_NOTHROW(load_dt_tree(dir / "tree.json"));
  }

  SUBCASE("certify accepts an mps-backed target") {
    save_mps_state_file(dir / "tar_mps.json", mps_ghz(4));
    save_dense_state_file(dir / "lab_ghz.json", tu::ghz(4));
    const int rc = run_cli("certify --target " + (dir / "tar_mps.json").string() + " --lab " +
                           (dir / "lab_ghz.json").string() +
                           " --epsilon 0.3 --delta 0.2 --copies 40 --seed 5 --out " +
                           (dir / "mps_report.jsonl").string());
    CHECK(rc == 0);
    const std::string report = slurp(dir / "mps_report.jsonl");
    CHECK(report.find("\"target_kind\":\"mps\"") != std::string::npos);
    CHECK(report.find("\"verdict\":\"accept\"") != std::string::npos);
  }

  SUBCASE("lowerbound gen with a single codeword reports unit norm") {
    const int rc = run_cli("lowerbound gen --n 4 --N 1 --trials 2 --seed 7 --out " +
                           (dir / "gen1.jsonl").string());
    CHECK(rc == 0);
    const std::string rows = slurp(dir / "gen1.jsonl");
    CHECK(rows.find("\"norm_sq\":1.0") != std::string::npos);
  }

  SUBCASE("lowerbound gen and tv rows are deterministic") {
    const std::string gen = "lowerbound gen --n 5 --N 8 --trials 3 --seed 11 --out ";
    CHECK(run_cli(gen + (dir / "g1.jsonl").string()) == 0);
    CHECK(run_cli(gen + (dir / "g2.jsonl").string()) == 0);
    CHECK(slurp(dir / "g1.jsonl") == slurp(dir / "g2.jsonl"));

    const std::string tv = "lowerbound tv --n 4 --N 4 --trials 2 --bases 3 --seed 12 --out ";
    CHECK(run_cli(tv + (dir / "t1.jsonl").string()) == 0);
    CHECK(run_cli(tv + (dir / "t2.jsonl").string()) == 0);
    CHECK(slurp(dir / "t1.jsonl") == slurp(dir / "t2.jsonl"));
    CHECK(slurp(dir / "t1.jsonl").find("\"tv\":") != std::string::npos);
  }

  SUBCASE("lowerbound claim prints a value below the bound") {
    CHECK(run_cli("lowerbound claim --grid 2000 --refine 4") == 0);
    const std::string out = slurp(dir / "stdout.txt");
    CHECK(out.find("max_min_value") != std::string::npos);
  }
}

int main(int argc, char** argv) {
  doctest::Context ctx;
  std::vector<char*> pass;
  for (int i = 0; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--cli=", 0) == 0) {
      g_cli_path = arg.substr(6);
    } else {
      pass.push_back(argv[i]);
    }
  }
  ctx.applyCommandLine(static_cast<int>(pass.size()), pass.data());
  return ctx.run();
}
