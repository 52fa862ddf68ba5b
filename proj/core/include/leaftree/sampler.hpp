#pragma once

#include "leaftree/binary_tree.hpp"
#include "leaftree/split_kernel.hpp"

#include <cstdint>
#include <random>

namespace leaftree {

// The generator behind every sampler. Seeds pass through splitmix64 first.
using Rng = std::mt19937_64;

enum class SplitStrategy {
  cdf_row,      // inverse CDF over the kernel row
  specialized,  // direct draws where the kernel admits one (bst, binomial)
};

struct SampleConfig {
  int n = 1;
  int replicates = 1;
  std::uint64_t seed = 0;
  SplitStrategy strategy = SplitStrategy::cdf_row;
};

// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

// Seed of replicate `stream` under `master`: splitmix64(master + (stream + 1) * golden gamma),
// i.e. element stream + 1 of the splitmix64 sequence started at master.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

Rng make_rng(std::uint64_t seed);

// Draws the left subtree size of a node with n >= 2 leaves.
int draw_split(const SplitKernel& kernel, int n, Rng& rng,
               SplitStrategy strategy = SplitStrategy::cdf_row);

// Runs the leaf-centric generative process for size n, left subtree before right.
// Throws KernelRowError when an encountered row is not normalized.
BinaryTree sample_tree(const SplitKernel& kernel, int n, Rng& rng,
                       SplitStrategy strategy = SplitStrategy::cdf_row);
BinaryTree sample_tree(const SplitKernel& kernel, int n, std::uint64_t seed,
                       SplitStrategy strategy = SplitStrategy::cdf_row);

// Same draws as sample_tree, but only tracks the height.
int sample_height(const SplitKernel& kernel, int n, Rng& rng,
                  SplitStrategy strategy = SplitStrategy::cdf_row);

// Uniform tree on T_n by Remy's leaf insertion; independent of any kernel.
BinaryTree sample_uniform_remy(int n, Rng& rng);
BinaryTree sample_uniform_remy(int n, std::uint64_t seed);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int replicates = 0;
};

// Replicate r uses derive_seed(seed, r), so the result does not depend on the
// thread count. threads == 0 means default_thread_count().
McEstimate mc_expected_height(const SplitKernel& kernel, int n, int replicates,
                              std::uint64_t seed,
                              SplitStrategy strategy = SplitStrategy::cdf_row,
                              unsigned threads = 0);

// LEAFTREE_THREADS if set to a positive integer, else hardware concurrency.
unsigned default_thread_count();

}  // namespace leaftree
