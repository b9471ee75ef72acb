#pragma once

#include "avlt/core.hpp"

#include <Eigen/Dense>

#include <map>
#include <string>

namespace avlt {

// Named parameter arrays with shapes fixed at insertion. Vectors are stored
// as n x 1 matrices.
class ParamStore {
 public:
  Eigen::MatrixXd& add(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    auto [it, inserted] = arrays_.try_emplace(name, Eigen::MatrixXd::Zero(rows, cols));
    if (!inserted) throw InvalidArgument("ParamStore: duplicate name " + name);
    return it->second;
  }

  Eigen::MatrixXd& at(const std::string& name) {
    auto it = arrays_.find(name);
    if (it == arrays_.end()) throw InvalidArgument("ParamStore: missing " + name);
    return it->second;
  }
  const Eigen::MatrixXd& at(const std::string& name) const {
    auto it = arrays_.find(name);
    if (it == arrays_.end()) throw InvalidArgument("ParamStore: missing " + name);
    return it->second;
  }

  bool has(const std::string& name) const { return arrays_.count(name) != 0; }

  auto begin() { return arrays_.begin(); }
  auto end() { return arrays_.end(); }
  auto begin() const { return arrays_.begin(); }
  auto end() const { return arrays_.end(); }
  std::size_t size() const { return arrays_.size(); }

  void check_finite() const {
    for (const auto& [name, m] : arrays_) {
      if (!m.array().isFinite().all()) {
        throw NumericalError("ParamStore: non-finite values in " + name);
      }
    }
  }

  // Zero-valued store with the same names and shapes (gradient accumulators).
  ParamStore zeros_like() const {
    ParamStore g;
    for (const auto& [name, m] : arrays_) g.add(name, m.rows(), m.cols());
    return g;
  }

 private:
  std::map<std::string, Eigen::MatrixXd> arrays_;
};

// Versioned binary container: magic "AVLT1", then for each array
// u32 name length, name bytes, u32 rank, u64 dims, little-endian f64 payload.
void save_params(const ParamStore& params, const std::string& path);
ParamStore load_params(const std::string& path);

}  // namespace avlt
