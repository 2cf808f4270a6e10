#include "qcert/io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "qcert/rng.hpp"

namespace qcert {
namespace {

using json = nlohmann::ordered_json;

json amp_to_json(const Amp& a) { return json::array({a.real(), a.imag()}); }

Amp amp_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw FileFormatError("amplitude entries must be [re, im] number pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json basis_to_json(const SingleQubitBasis& b) {
  return json{{"b", json::array({amp_to_json(b.b[0]), amp_to_json(b.b[1])})},
              {"b_perp", json::array({amp_to_json(b.b_perp[0]), amp_to_json(b.b_perp[1])})}};
}

SingleQubitBasis basis_from_json(const json& j) {
  const auto read_pair = [](const json& v) -> Qubit1 {
    if (!v.is_array() || v.size() != 2) throw FileFormatError("basis vector must have 2 entries");
    return {amp_from_json(v[0]), amp_from_json(v[1])};
  };
  SingleQubitBasis b{read_pair(j.at("b")), read_pair(j.at("b_perp"))};
  validate_basis(b);
  return b;
}

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileFormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FileFormatError(path.string() + ": " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw FileFormatError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string bits_string(uint64_t bits, int count) {
  std::string s;
  s.reserve(count);
  for (int i = count - 1; i >= 0; --i) s.push_back(((bits >> i) & 1) ? '1' : '0');
  return s;
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : s) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

int LoadedState::qubit_count() const {
  return is_dense() ? std::get<StateVector>(state).n : std::get<MpsState>(state).n;
}

LoadedState load_state_file(const std::filesystem::path& path, int max_n) {
  const json j = parse_file(path);
  if (!j.is_object()) throw FileFormatError(path.string() + ": top level must be an object");
  if (j.value("format_version", 0) != 1) {
    throw FileFormatError(path.string() + ": unsupported format_version");
  }
  const std::string kind = j.value("kind", "");
  if (!j.contains("n") || !j["n"].is_number_integer()) {
    throw FileFormatError(path.string() + ": missing qubit count");
  }
  const int n = j["n"].get<int>();
  if (n < 1) throw FileFormatError(path.string() + ": qubit count must be positive");
  if (n > max_n) {
    throw CapacityError(path.string() + ": " + std::to_string(n) + " qubits exceeds cap " +
                        std::to_string(max_n));
  }

  LoadedState out;
  if (kind == "dense") {
    const auto it = j.find("amplitudes");
    if (it == j.end() || !it->is_array()) {
      throw FileFormatError(path.string() + ": dense file needs an amplitudes array");
    }
    const std::size_t dim = std::size_t{1} << n;
    if (it->size() != dim) {
      throw FileFormatError(path.string() + ": amplitude count does not match n");
    }
    std::vector<Amp> amps(dim);
    for (std::size_t i = 0; i < dim; ++i) amps[i] = amp_from_json((*it)[i]);

    double ns = 0;
    for (const Amp& a : amps) ns += std::norm(a);
    const double err = std::abs(ns - 1.0);
    if (err > 1e-6) {
      throw FileFormatError(path.string() + ": norm^2 deviates from 1 by " + std::to_string(err));
    }
    if (err > tol::kValidate) {
      const double inv = 1.0 / std::sqrt(ns);
      for (Amp& a : amps) a *= inv;
      out.warnings.push_back("renormalized input state (norm^2 error " + std::to_string(err) + ")");
    }
    out.state = StateVector(n, std::move(amps));
    return out;
  }
  if (kind == "mps") {
    const auto it = j.find("tensors");
    if (it == j.end() || !it->is_array() || static_cast<int>(it->size()) != n) {
      throw FileFormatError(path.string() + ": mps file needs n site tensors");
    }
    std::vector<MpsTensor> tensors(n);
    for (int i = 0; i < n; ++i) {
      const json& tj = (*it)[i];
      MpsTensor t;
      t.chi_left = tj.value("chi_left", 0);
      t.chi_right = tj.value("chi_right", 0);
      const auto dit = tj.find("data");
      if (t.chi_left < 1 || t.chi_right < 1 || dit == tj.end() || !dit->is_array()) {
        throw FileFormatError(path.string() + ": malformed site tensor");
      }
      const std::size_t want = static_cast<std::size_t>(t.chi_left) * 2 * t.chi_right;
      if (dit->size() != want) {
        throw FileFormatError(path.string() + ": site tensor payload size mismatch");
      }
      t.data.resize(want);
      for (std::size_t d = 0; d < want; ++d) t.data[d] = amp_from_json((*dit)[d]);
      tensors[i] = std::move(t);
    }
    try {
      out.state = MpsState::validated(n, std::move(tensors));
    } catch (const ContractError& e) {
      throw FileFormatError(path.string() + ": " + e.what());
    }
    return out;
  }
  throw FileFormatError(path.string() + ": kind must be \"dense\" or \"mps\"");
}

StateVector as_dense_state(const LoadedState& loaded, int dense_cap) {
  if (loaded.is_dense()) return std::get<StateVector>(loaded.state);
  return mps_to_dense(std::get<MpsState>(loaded.state), dense_cap);
}

void save_dense_state_file(const std::filesystem::path& path, const StateVector& state) {
  json j;
  j["format_version"] = 1;
  j["kind"] = "dense";
  j["n"] = state.n;
  json amps = json::array();
  for (const Amp& a : state.amps) amps.push_back(amp_to_json(a));
  j["amplitudes"] = std::move(amps);
  write_file(path, j);
}

void save_mps_state_file(const std::filesystem::path& path, const MpsState& state) {
  json j;
  j["format_version"] = 1;
  j["kind"] = "mps";
  j["n"] = state.n;
  json tensors = json::array();
  for (const MpsTensor& t : state.tensors) {
    json tj;
    tj["chi_left"] = t.chi_left;
    tj["chi_right"] = t.chi_right;
    json data = json::array();
    for (const Amp& a : t.data) data.push_back(amp_to_json(a));
    tj["data"] = std::move(data);
    tensors.push_back(std::move(tj));
  }
  j["tensors"] = std::move(tensors);
  write_file(path, j);
}

void save_dt_tree(const std::filesystem::path& path, const DtTree& tree) {
  json j;
  j["format_version"] = 1;
  j["kind"] = "dt_tree";
  j["depth"] = tree.depth;
  json nodes = json::array();
  for (const SingleQubitBasis& b : tree.nodes) nodes.push_back(basis_to_json(b));
  j["nodes"] = std::move(nodes);
  write_file(path, j);
}

DtTree load_dt_tree(const std::filesystem::path& path) {
  const json j = parse_file(path);
  if (j.value("kind", "") != "dt_tree" || j.value("format_version", 0) != 1) {
    throw FileFormatError(path.string() + ": not a dt_tree file");
  }
  DtTree tree;
  tree.depth = j.value("depth", -1);
  if (tree.depth < 0 || tree.depth > 30) throw FileFormatError("bad tree depth");
  const auto it = j.find("nodes");
  const uint64_t want = (uint64_t{1} << tree.depth) - 1;
  if (it == j.end() || !it->is_array() || it->size() != want) {
    throw FileFormatError(path.string() + ": node count does not match depth");
  }
  tree.nodes.reserve(want);
  for (const json& nj : *it) tree.nodes.push_back(basis_from_json(nj));
  return tree;
}

std::string transcript_jsonl_row(const CertifyTranscript& t, uint64_t copy_index) {
  json j;
  j["row"] = "copy";
  j["copy"] = copy_index;
  j["k"] = t.k;
  j["x"] = bits_string(t.prefix, t.k - 1);
  j["leaf"] = t.leaf.leaf_index;
  j["leaf_outcomes"] = bits_string(t.leaf.leaf_index, static_cast<int>(t.leaf.outcomes.size()));
  j["final_outcome"] = t.final_outcome;
  j["verdict"] = t.verdict == Verdict::Accept ? "accept" : "reject";
  j["degenerate_target"] = t.degenerate_target;
  j["oracle_queries"] = t.oracle_queries;
  json bases = json::array();
  for (const SingleQubitBasis& b : t.walk_bases) bases.push_back(basis_to_json(b));
  j["walk_bases"] = std::move(bases);
  j["final_basis"] = basis_to_json(t.final_basis);
  return j.dump();
}

std::string run_id(uint64_t master_seed, const std::string& subcommand) {
  const auto block = PhiloxRng::block({fnv1a64(subcommand), 0, 0, 0}, {master_seed, 0x71d67fffeda60000ull});
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(block[0]));
  return std::string(buf);
}

}  // namespace qcert
