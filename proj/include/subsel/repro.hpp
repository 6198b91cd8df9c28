#pragma once

// Desk-scale reproduction pipelines for the three worked examples.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "subsel/iboss.hpp"
#include "subsel/robust.hpp"
#include "subsel/sequential.hpp"
#include "subsel/simulate.hpp"

namespace subsel {

struct Example1Config {
  std::size_t n = 100000;
  std::size_t n_test = 10010;
  std::size_t n_init = 5000;
  std::size_t n_target = 6200;
  std::size_t batch = 10;
  std::size_t quantiles = 10;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct Example1Run {
  std::string strategy;  // dope, random, stratified
  SeqResult result;
};

struct Example1Report {
  Example1Config config;
  Vector theta_true;
  std::size_t positives = 0;
  std::vector<Example1Run> runs;
  FitResult random_fit;  // logistic fit on a random sample of size n_target
  std::map<std::string, ConfusionMatrix> confusion;  // on the held-out set
};

Example1Report run_example1(const Example1Config& config);
void write_example1(const Example1Report& report, const std::filesystem::path& dir);

/// One sequential (grid-driven) and one IBOSS subsample of the same size.
struct DesignComparison {
  std::string label;
  SubsampleSelection sequential;
  SubsampleSelection iboss;
  double d_sequential = 0.0;  // log det of the subsample information
  double d_iboss = 0.0;
  double boundary_sequential = 0.0;  // mean |standardized x|
  double boundary_iboss = 0.0;
};

struct Example2Report {
  std::uint64_t seed = 0;
  Dataset data;
  DesignComparison with_confounder;     // utility on (1, x, z)
  DesignComparison without_confounder;  // utility on (1, x)
};

Example2Report run_example2(std::uint64_t seed, std::size_t design_size = 12, unsigned threads = 1);
void write_example2(const Example2Report& report, const std::filesystem::path& dir);

struct Example3Report {
  std::uint64_t seed = 0;
  Dataset data;
  DesignComparison with_confounder;
  DesignComparison without_confounder;
  CandidateGrid grid_xz;
  CandidateGrid grid_x;
  WiensResult wiens_xz;
  WiensResult wiens_x;
};

Example3Report run_example3(std::uint64_t seed, std::size_t design_size = 12, std::size_t wiens_iters = 2000,
                            unsigned threads = 1);
void write_example3(const Example3Report& report, const std::filesystem::path& dir);

/// Dataset whose feature columns are x followed by z (no confounders).
Dataset fold_confounders(const Dataset& data);

}  // namespace subsel
