// State-file formats, tree dumps, and JSONL report rows. JSON handling stays
// behind this interface; all payloads round-trip doubles exactly.
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qcert/certify.hpp"
#include "qcert/dtbasis.hpp"
#include "qcert/mps.hpp"
#include "qcert/qmath.hpp"

namespace qcert {

// Malformed or unreadable input file (syntax, schema, or payload).
class FileFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedState {
  std::variant<StateVector, MpsState> state;
  std::vector<std::string> warnings;  // e.g. renormalization notices

  bool is_dense() const { return std::holds_alternative<StateVector>(state); }
  int qubit_count() const;
};

// Reads a dense or MPS state file. Dense payloads with norm error in
// (1e-9, 1e-6] are renormalized with a warning; larger errors are rejected.
// Throws FileFormatError on malformed input and CapacityError when the
// declared n exceeds max_n.
LoadedState load_state_file(const std::filesystem::path& path, int max_n = 24);

// Densifies MPS inputs when needed (subject to dense_cap).
StateVector as_dense_state(const LoadedState& loaded, int dense_cap = 24);

void save_dense_state_file(const std::filesystem::path& path, const StateVector& state);
void save_mps_state_file(const std::filesystem::path& path, const MpsState& state);

void save_dt_tree(const std::filesystem::path& path, const DtTree& tree);
DtTree load_dt_tree(const std::filesystem::path& path);

// One-line JSON serializations for report rows (no trailing newline).
std::string transcript_jsonl_row(const CertifyTranscript& t, uint64_t copy_index);

// Deterministic run identifier from the master seed and subcommand name.
std::string run_id(uint64_t master_seed, const std::string& subcommand);

}  // namespace qcert
