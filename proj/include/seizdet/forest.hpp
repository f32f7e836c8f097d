#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "seizdet/common.hpp"

namespace seizdet::forest {

enum class ClassMode { three_class, binary };

/// Canonical class lists. Three-class posteriors are indexed
/// [early_ictal, ictal, interictal]; binary ones [non_seizure, seizure].
std::vector<std::string> class_list_for(ClassMode mode);

struct ForestParams {
  int n_trees = 3000;
  // candidate features examined per split; 0 means floor(sqrt(d))
  int max_features = 0;
  int min_samples_leaf = 1;
  int max_depth = -1;  // -1 = unlimited
  std::uint64_t rng_seed = 0;
  ClassMode class_mode = ClassMode::three_class;
  bool compute_oob = false;

  int n_classes() const { return class_mode == ClassMode::three_class ? 3 : 2; }
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<std::uint32_t> class_counts;  // leaves only
};

struct Tree {
  std::vector<TreeNode> nodes;
};

enum class ImportanceKind { split_frequency, impurity_decrease };

struct ForestModel {
  std::vector<Tree> trees;
  // per-feature count of split-point usage across all trees
  std::vector<std::uint64_t> split_counts;
  // per-feature accumulated weighted impurity decrease (comparison variant)
  std::vector<double> impurity_sums;
  std::vector<std::string> class_list;
  ForestParams params;
  std::size_t n_features = 0;
  double oob_accuracy = -1.0;  // -1 when not computed

  int n_classes() const { return static_cast<int>(class_list.size()); }
};

/// Trains params.n_trees CART trees on bootstrap samples using Gini impurity.
/// Deterministic given the seed: each tree derives its own RNG from
/// (rng_seed, tree index), so parallel training is bit-identical to
/// sequential. Throws DataError on single-class input or non-finite features.
ForestModel train(const Matrix& features, const std::vector<int>& labels,
                  const ForestParams& params, int threads = 1);

/// Average of per-tree leaf class frequencies; sums to 1.
std::vector<double> predict_proba(const ForestModel& model,
                                  std::span<const double> x);

/// Normalized per-feature importance. The default counts how often a feature
/// is used at split points; the impurity_decrease variant weights splits by
/// their Gini decrease. An all-leaf forest yields the uniform vector.
std::vector<double> feature_importance(
    const ForestModel& model,
    ImportanceKind kind = ImportanceKind::split_frequency);

/// early_ictal and ictal map to seizure (1); interictal to non_seizure (0).
std::vector<int> to_binary_labels(const std::vector<int>& labels3);

// versioned JSON model dump; reloads reproduce predictions bit-exactly
void save_model(const std::filesystem::path& path, const ForestModel& model);
ForestModel load_model(const std::filesystem::path& path);

std::string model_to_json(const ForestModel& model);
ForestModel model_from_json(const std::string& text);

}  // namespace seizdet::forest
