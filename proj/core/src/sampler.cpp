#include "leaftree/sampler.hpp"

#include "leaftree/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

namespace leaftree {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// Uniform double in [0, 1) from the top 53 bits.
double unit_draw(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void check_row(const SplitKernel& kernel, const SplitRow& row) {
  const double dev = std::abs(row.total - 1.0);
  if (dev > kernel.default_tolerance() || row.min_value < 0.0) {
    std::ostringstream os;
    os.precision(15);
    os << "kernel row n = " << row.n << " is not a probability distribution (sum "
       << row.total << ")";
    throw KernelRowError(row.n, os.str());
  }
}

// Pre-order walk of the generative process. `emit(size, depth)` sees every node.
template <class Emit>
void run_process(const SplitKernel& kernel, int n, Rng& rng, SplitStrategy strategy,
                 Emit&& emit) {
  if (n < 1) throw std::invalid_argument("tree size must be >= 1");
  struct Task {
    std::uint32_t size;
    std::uint32_t depth;
  };
  std::vector<Task> stack;
  stack.push_back({static_cast<std::uint32_t>(n), 0});
  while (!stack.empty()) {
    const Task t = stack.back();
    stack.pop_back();
    emit(t.size, t.depth);
    if (t.size == 1) continue;
    const int left = draw_split(kernel, static_cast<int>(t.size), rng, strategy);
    stack.push_back({t.size - static_cast<std::uint32_t>(left), t.depth + 1});
    stack.push_back({static_cast<std::uint32_t>(left), t.depth + 1});
  }
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master + (stream + 1) * kGoldenGamma);
}

Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed + kGoldenGamma)); }

int draw_split(const SplitKernel& kernel, int n, Rng& rng, SplitStrategy strategy) {
  if (n < 2) throw std::invalid_argument("draw_split requires n >= 2");
  if (n == 2) return 1;
  if (strategy == SplitStrategy::specialized) {
    switch (kernel.effective_kind(n)) {
      case KernelKind::bst:
        return 1 + static_cast<int>(std::uniform_int_distribution<int>(0, n - 2)(rng));
      case KernelKind::binomial:
        return 1 + std::binomial_distribution<int>(n - 2, kernel.effective_p(n))(rng);
      default:
        break;
    }
  }
  const auto row = kernel.row(n);
  check_row(kernel, *row);
  const double u = unit_draw(rng) * row->total;
  const auto it = std::upper_bound(row->cdf.begin(), row->cdf.end(), u);
  const auto k = std::min<std::ptrdiff_t>(it - row->cdf.begin(), n - 2);
  return static_cast<int>(k) + 1;
}

BinaryTree sample_tree(const SplitKernel& kernel, int n, Rng& rng, SplitStrategy strategy) {
  std::vector<std::uint32_t> sizes;
  sizes.reserve(2 * static_cast<std::size_t>(std::max(n, 1)) - 1);
  run_process(kernel, n, rng, strategy,
              [&](std::uint32_t size, std::uint32_t) { sizes.push_back(size); });
  return BinaryTree::from_preorder_sizes(std::move(sizes));
}

BinaryTree sample_tree(const SplitKernel& kernel, int n, std::uint64_t seed,
                       SplitStrategy strategy) {
  Rng rng = make_rng(seed);
  return sample_tree(kernel, n, rng, strategy);
}

int sample_height(const SplitKernel& kernel, int n, Rng& rng, SplitStrategy strategy) {
  std::uint32_t h = 0;
  run_process(kernel, n, rng, strategy, [&](std::uint32_t size, std::uint32_t depth) {
    if (size == 1) h = std::max(h, depth);
  });
  return static_cast<int>(h);
}

BinaryTree sample_uniform_remy(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("tree size must be >= 1");
  constexpr std::uint32_t kNone = UINT32_MAX;
  const std::size_t total = 2 * static_cast<std::size_t>(n) - 1;
  std::vector<std::uint32_t> parent(total, kNone), left(total, kNone), right(total, kNone);
  std::uint32_t root = 0;
  // Each step picks one of the 2k - 1 current nodes and a side, and splices a new
  // inner node above it whose other child is a fresh leaf.
  for (std::uint32_t k = 1; k < static_cast<std::uint32_t>(n); ++k) {
    const std::uint32_t count = 2 * k - 1;
    const auto x = static_cast<std::uint32_t>(
        std::uniform_int_distribution<std::uint64_t>(0, 2ULL * count - 1)(rng));
    const std::uint32_t target = x >> 1;
    const bool keep_left = (x & 1U) == 0;
    const std::uint32_t inner = count;
    const std::uint32_t fresh = count + 1;
    const std::uint32_t up = parent[target];
    if (up == kNone) {
      root = inner;
    } else if (left[up] == target) {
      left[up] = inner;
    } else {
      right[up] = inner;
    }
    parent[inner] = up;
    left[inner] = keep_left ? target : fresh;
    right[inner] = keep_left ? fresh : target;
    parent[target] = inner;
    parent[fresh] = inner;
  }

  // Leaf counts bottom-up, then emit pre-order.
  std::vector<std::uint32_t> leaves(total, 0);
  std::vector<std::uint32_t> order;
  order.reserve(total);
  std::vector<std::uint32_t> stack{root};
  while (!stack.empty()) {
    const std::uint32_t v = stack.back();
    stack.pop_back();
    order.push_back(v);
    if (left[v] != kNone) {
      stack.push_back(right[v]);
      stack.push_back(left[v]);
    }
  }
  for (std::size_t k = order.size(); k-- > 0;) {
    const std::uint32_t v = order[k];
    leaves[v] = left[v] == kNone ? 1 : leaves[left[v]] + leaves[right[v]];
  }
  std::vector<std::uint32_t> sizes(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) sizes[k] = leaves[order[k]];
  return BinaryTree::from_preorder_sizes(std::move(sizes));
}

BinaryTree sample_uniform_remy(int n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample_uniform_remy(n, rng);
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("LEAFTREE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

McEstimate mc_expected_height(const SplitKernel& kernel, int n, int replicates,
                              std::uint64_t seed, SplitStrategy strategy, unsigned threads) {
  if (replicates < 2) throw std::invalid_argument("mc_expected_height requires >= 2 replicates");
  if (n < 1) throw std::invalid_argument("tree size must be >= 1");
  if (threads == 0) threads = default_thread_count();
  threads = std::min<unsigned>(threads, static_cast<unsigned>(replicates));

  std::vector<int> heights(static_cast<std::size_t>(replicates));
  auto work = [&](unsigned worker) {
    for (int r = static_cast<int>(worker); r < replicates; r += static_cast<int>(threads)) {
      Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
      heights[r] = sample_height(kernel, n, rng, strategy);
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          work(w);
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  CompensatedSum sum;
  for (int h : heights) sum += h;
  const double mean = sum.value() / replicates;
  CompensatedSum sq;
  for (int h : heights) sq += (h - mean) * (h - mean);
  const double variance = sq.value() / (replicates - 1);
  return {mean, std::sqrt(variance / replicates), replicates};
}

}  // namespace leaftree
