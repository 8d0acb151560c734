#pragma once

#include <Eigen/Core>
#include <functional>
#include <stdexcept>
#include <string>

namespace mvlpe {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Bad arguments or configuration. CLI exit code 1.
class ArgumentError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed or non-finite input data. CLI exit code 2.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Numerical failure (singular system, divergence). CLI exit code 3.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Worker-thread cap for parallel maps. 1 disables threading entirely.
// Results are identical for any setting: tasks write disjoint outputs
// and reductions run serially in index order.
void set_max_threads(int n);
int max_threads();

// Runs fn(i) for i in [0, n). Partitioned into contiguous chunks when
// more than one worker is allowed; fn must only touch slot i's output.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace mvlpe
