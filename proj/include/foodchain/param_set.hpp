#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "foodchain/tensor.hpp"

namespace foodchain {

/// Named view over the trainable tensors of one or more models.
/// Insertion order is preserved so optimizer updates, gradient checks and
/// serialization all walk parameters in the same order.
class ParamSet {
 public:
  void add(const std::string& name, Tensor* t);

  Tensor* find(const std::string& name);
  const Tensor* find(const std::string& name) const;

  const std::vector<std::pair<std::string, Tensor*>>& entries() const {
    return entries_;
  }
  std::size_t tensor_count() const { return entries_.size(); }
  std::size_t scalar_count() const;

  void zero_grads();
  double grad_norm() const;

  std::uint64_t step() const { return step_; }
  void bump_step() { ++step_; }

  /// Snapshot/restore of parameter values only (used for best-epoch
  /// checkpointing). The snapshot is tied to this set's layout.
  std::vector<std::vector<double>> snapshot() const;
  void restore(const std::vector<std::vector<double>>& snap);

  // Versioned named-tensor text format with a trailing crc32 line.
  void save(std::ostream& os) const;
  void load(std::istream& is);
  void save_file(const std::string& path) const;
  void load_from_file(const std::string& path);

 private:
  std::vector<std::pair<std::string, Tensor*>> entries_;
  std::uint64_t step_ = 0;
};

}  // namespace foodchain
