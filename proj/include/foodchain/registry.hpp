#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace foodchain {

// Append-only model registry rooted at a directory. Artifacts are written to
// <root>/artifacts/ via temp-file + rename; metadata lines are appended to
// <root>/index.tsv under an exclusive flock. Ordering is by logical sequence
// number (line order), never wall time, so concurrent publishers stay
// deterministic per interleaving and reruns are reproducible.
struct RegistryEntry {
  std::uint64_t sequence = 0;  // assigned at publish; later = newer
  std::string model_id;
  std::string artifact;  // path relative to the registry root
  double validation_rmse = 0.0;
  std::string fingerprint;  // training config fingerprint
  std::string note;         // free-form, optional (no tabs/newlines)
};

// Copies `param_file` into the registry and appends an index line.
// Returns the stored entry (with its assigned sequence number).
RegistryEntry registry_publish(const std::string& root,
                               const std::string& model_id,
                               const std::string& param_file,
                               double validation_rmse,
                               const std::string& fingerprint,
                               const std::string& note = "");

// All entries in index order. Throws on a corrupt index, naming the
// offending line.
std::vector<RegistryEntry> registry_list(const std::string& root);

// Entry with the lowest validation RMSE; ties go to the newest (highest
// sequence). Throws if the registry is empty. If `model_id` is non-empty,
// only entries for that model are considered.
RegistryEntry registry_best(const std::string& root,
                            const std::string& model_id = "");

}  // namespace foodchain
