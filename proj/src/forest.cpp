#include "seizdet/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "seizdet/dataset.hpp"

namespace seizdet::forest {
namespace {

using nlohmann::json;

double gini_term(const std::vector<std::uint32_t>& counts) {
  // sum of squared counts; gini = 1 - term / n^2
  double s = 0.0;
  for (std::uint32_t c : counts) s += static_cast<double>(c) * c;
  return s;
}

struct TreeBuild {
  Tree tree;
  std::vector<std::uint64_t> split_counts;
  std::vector<double> impurity_sums;
  std::vector<std::uint8_t> in_bag;  // only filled when OOB is requested
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<int>& y, int n_classes,
              int mtry, int min_leaf, int max_depth, std::uint64_t seed)
      : x_(x),
        y_(y),
        n_classes_(n_classes),
        mtry_(mtry),
        min_leaf_(min_leaf),
        max_depth_(max_depth),
        rng_(seed),
        feature_pool_(x.cols()) {
    for (std::size_t f = 0; f < x.cols(); ++f) feature_pool_[f] = static_cast<int>(f);
  }

  TreeBuild run(bool track_bag) {
    std::size_t n = x_.rows();
    out_.split_counts.assign(x_.cols(), 0);
    out_.impurity_sums.assign(x_.cols(), 0.0);
    if (track_bag) out_.in_bag.assign(n, 0);

    std::vector<int> samples(n);
    for (std::size_t i = 0; i < n; ++i) {
      samples[i] = static_cast<int>(rng_.index(n));
      if (track_bag) out_.in_bag[samples[i]] = 1;
    }
    n_root_ = n;
    build(samples, 0);
    return std::move(out_);
  }

 private:
  struct Split {
    double gain = -1.0;  // sumsq_l/n_l + sumsq_r/n_r; larger is purer
    int feature = -1;
    double threshold = 0.0;
  };

  int build(std::vector<int>& samples, int depth) {
    std::vector<std::uint32_t> counts(n_classes_, 0);
    for (int i : samples) ++counts[y_[i]];
    std::size_t n = samples.size();

    int node_id = static_cast<int>(out_.tree.nodes.size());
    out_.tree.nodes.emplace_back();

    bool pure = std::count(counts.begin(), counts.end(), 0u) ==
                static_cast<long>(counts.size()) - 1;
    bool depth_capped = max_depth_ >= 0 && depth >= max_depth_;
    Split best;
    if (!pure && !depth_capped && n >= 2 * static_cast<std::size_t>(min_leaf_))
      best = find_split(samples, counts);

    if (best.feature < 0) {
      out_.tree.nodes[node_id].class_counts = std::move(counts);
      return node_id;
    }

    ++out_.split_counts[best.feature];
    double nn = static_cast<double>(n);
    double parent = 1.0 - gini_term(counts) / (nn * nn);
    // weighted child impurity recovered from the gain form
    double children = 1.0 - best.gain / nn;
    out_.impurity_sums[best.feature] +=
        (nn / static_cast<double>(n_root_)) * (parent - children);

    std::vector<int> left, right;
    left.reserve(n);
    right.reserve(n);
    for (int i : samples)
      (x_(i, best.feature) <= best.threshold ? left : right).push_back(i);
    samples.clear();
    samples.shrink_to_fit();

    int li = build(left, depth + 1);
    int ri = build(right, depth + 1);
    TreeNode& node = out_.tree.nodes[node_id];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = li;
    node.right = ri;
    return node_id;
  }

  Split find_split(const std::vector<int>& samples,
                   const std::vector<std::uint32_t>& counts) {
    std::size_t d = x_.cols();
    // Partial Fisher-Yates over a pool that persists across nodes; only the
    // sampled set matters, so the pool is not restored between nodes.
    std::size_t mtry = std::min<std::size_t>(mtry_, d);
    for (std::size_t i = 0; i < mtry; ++i) {
      std::size_t j = i + rng_.index(d - i);
      std::swap(feature_pool_[i], feature_pool_[j]);
    }
    picked_.assign(feature_pool_.begin(), feature_pool_.begin() + mtry);
    // ascending feature order makes the strict-improvement rule below break
    // gain ties toward the lowest feature index, then the lowest threshold
    std::sort(picked_.begin(), picked_.end());

    std::size_t n = samples.size();
    Split best;
    std::vector<std::uint32_t> left(n_classes_), right(n_classes_);
    for (int f : picked_) {
      order_.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        order_[i] = {x_(samples[i], f), y_[samples[i]]};
      std::sort(order_.begin(), order_.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (order_.front().first == order_.back().first) continue;

      std::fill(left.begin(), left.end(), 0u);
      right.assign(counts.begin(), counts.end());
      double sumsq_l = 0.0;
      double sumsq_r = gini_term(counts);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        int cls = order_[i].second;
        // move one sample left, updating both squared sums incrementally
        sumsq_l += 2.0 * left[cls] + 1.0;
        sumsq_r -= 2.0 * right[cls] - 1.0;
        ++left[cls];
        --right[cls];
        double a = order_[i].first;
        double b = order_[i + 1].first;
        if (a == b) continue;
        std::size_t nl = i + 1;
        std::size_t nr = n - nl;
        if (nl < static_cast<std::size_t>(min_leaf_) ||
            nr < static_cast<std::size_t>(min_leaf_))
          continue;
        double gain = sumsq_l / static_cast<double>(nl) +
                      sumsq_r / static_cast<double>(nr);
        if (gain > best.gain) {
          double t = 0.5 * (a + b);
          if (t >= b) t = a;  // keep the rule x <= t routing a left, b right
          best = {gain, f, t};
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  const std::vector<int>& y_;
  int n_classes_;
  int mtry_;
  int min_leaf_;
  int max_depth_;
  Rng rng_;
  std::vector<int> feature_pool_;
  std::vector<int> picked_;
  std::vector<std::pair<double, int>> order_;
  std::size_t n_root_ = 0;
  TreeBuild out_;
};

const TreeNode& descend(const Tree& tree, std::span<const double> x) {
  int idx = 0;
  while (tree.nodes[idx].feature >= 0) {
    const TreeNode& nd = tree.nodes[idx];
    idx = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
  }
  return tree.nodes[idx];
}

void add_leaf_freq(const TreeNode& leaf, std::vector<double>& acc) {
  double total = 0.0;
  for (std::uint32_t c : leaf.class_counts) total += c;
  for (std::size_t k = 0; k < acc.size(); ++k)
    acc[k] += leaf.class_counts[k] / total;
}

json node_to_json(const TreeNode& nd) {
  if (nd.feature < 0) return json{{"c", nd.class_counts}};
  return json{{"f", nd.feature}, {"t", nd.threshold}, {"l", nd.left}, {"r", nd.right}};
}

TreeNode node_from_json(const json& j, std::size_t n_features, int n_classes,
                        std::size_t self, std::size_t n_nodes) {
  TreeNode nd;
  if (j.contains("c")) {
    nd.class_counts = j.at("c").get<std::vector<std::uint32_t>>();
    if (nd.class_counts.size() != static_cast<std::size_t>(n_classes))
      throw DataError("forest model: leaf count length mismatch");
    return nd;
  }
  nd.feature = j.at("f").get<int>();
  nd.threshold = j.at("t").get<double>();
  nd.left = j.at("l").get<int>();
  nd.right = j.at("r").get<int>();
  if (nd.feature < 0 || static_cast<std::size_t>(nd.feature) >= n_features)
    throw DataError("forest model: node feature index out of range");
  // children always follow their parent, which also rules out cycles
  if (nd.left <= static_cast<int>(self) || nd.right <= static_cast<int>(self) ||
      static_cast<std::size_t>(nd.left) >= n_nodes ||
      static_cast<std::size_t>(nd.right) >= n_nodes)
    throw DataError("forest model: node child index out of range");
  return nd;
}

}  // namespace

std::vector<std::string> class_list_for(ClassMode mode) {
  if (mode == ClassMode::three_class)
    return {"early_ictal", "ictal", "interictal"};
  return {"non_seizure", "seizure"};
}

ForestModel train(const Matrix& features, const std::vector<int>& labels,
                  const ForestParams& params, int threads) {
  std::size_t n = features.rows();
  std::size_t d = features.cols();
  if (params.n_trees < 1) throw UsageError("forest: n_trees must be >= 1");
  if (params.min_samples_leaf < 1)
    throw UsageError("forest: min_samples_leaf must be >= 1");
  if (n < 2) throw DataError("forest: training needs at least 2 samples");
  if (d < 1) throw DataError("forest: training needs at least 1 feature");
  if (labels.size() != n)
    throw DataError("forest: label count does not match feature rows");
  if (!features.all_finite())
    throw DataError("forest: non-finite feature value in training data");
  int n_classes = params.n_classes();
  for (int y : labels)
    if (y < 0 || y >= n_classes)
      throw DataError("forest: label out of range for class mode");
  if (std::count(labels.begin(), labels.end(), labels.front()) ==
      static_cast<long>(n))
    throw DataError("forest: training data contains a single class");

  int mtry = params.max_features > 0
                 ? params.max_features
                 : static_cast<int>(std::floor(std::sqrt(static_cast<double>(d))));
  mtry = std::clamp(mtry, 1, static_cast<int>(d));

  ForestModel model;
  model.params = params;
  model.class_list = class_list_for(params.class_mode);
  model.n_features = d;

  std::vector<TreeBuild> builds(params.n_trees);
  parallel_for(static_cast<std::size_t>(params.n_trees), threads,
               [&](std::size_t t) {
                 std::uint64_t seed = derive_seed(
                     params.rng_seed, "tree-" + std::to_string(t));
                 TreeBuilder builder(features, labels, n_classes, mtry,
                                     params.min_samples_leaf, params.max_depth,
                                     seed);
                 builds[t] = builder.run(params.compute_oob);
               });

  // Reduce in tree order so the result is bit-identical for any thread count.
  model.split_counts.assign(d, 0);
  model.impurity_sums.assign(d, 0.0);
  model.trees.reserve(builds.size());
  for (TreeBuild& b : builds) {
    for (std::size_t f = 0; f < d; ++f) {
      model.split_counts[f] += b.split_counts[f];
      model.impurity_sums[f] += b.impurity_sums[f];
    }
    model.trees.push_back(std::move(b.tree));
  }

  if (params.compute_oob) {
    std::vector<double> votes(n * n_classes, 0.0);
    std::vector<double> acc(n_classes);
    for (std::size_t t = 0; t < builds.size(); ++t) {
      for (std::size_t i = 0; i < n; ++i) {
        if (builds[t].in_bag[i]) continue;
        std::fill(acc.begin(), acc.end(), 0.0);
        add_leaf_freq(descend(model.trees[t], features.row(i)), acc);
        for (int k = 0; k < n_classes; ++k) votes[i * n_classes + k] += acc[k];
      }
    }
    std::size_t counted = 0, correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* v = votes.data() + i * n_classes;
      double total = 0.0;
      for (int k = 0; k < n_classes; ++k) total += v[k];
      if (total == 0.0) continue;  // in-bag in every tree
      int arg = 0;
      for (int k = 1; k < n_classes; ++k)
        if (v[k] > v[arg]) arg = k;
      ++counted;
      if (arg == labels[i]) ++correct;
    }
    model.oob_accuracy =
        counted ? static_cast<double>(correct) / counted : -1.0;
  }
  return model;
}

std::vector<double> predict_proba(const ForestModel& model,
                                  std::span<const double> x) {
  if (x.size() != model.n_features)
    throw DataError("forest: feature vector length " + std::to_string(x.size()) +
                    " does not match model dimension " +
                    std::to_string(model.n_features));
  std::vector<double> acc(model.class_list.size(), 0.0);
  for (const Tree& tree : model.trees) add_leaf_freq(descend(tree, x), acc);
  for (double& p : acc) p /= static_cast<double>(model.trees.size());
  return acc;
}

std::vector<double> feature_importance(const ForestModel& model,
                                       ImportanceKind kind) {
  std::size_t d = model.n_features;
  std::vector<double> imp(d, 0.0);
  double total = 0.0;
  if (kind == ImportanceKind::split_frequency) {
    for (std::size_t f = 0; f < d; ++f) {
      imp[f] = static_cast<double>(model.split_counts[f]);
      total += imp[f];
    }
  } else {
    for (std::size_t f = 0; f < d; ++f) {
      imp[f] = model.impurity_sums[f];
      total += imp[f];
    }
  }
  if (total <= 0.0) {
    std::fill(imp.begin(), imp.end(), 1.0 / static_cast<double>(d));
    return imp;
  }
  for (double& v : imp) v /= total;
  return imp;
}

std::vector<int> to_binary_labels(const std::vector<int>& labels3) {
  std::vector<int> out(labels3.size());
  for (std::size_t i = 0; i < labels3.size(); ++i) {
    int y = labels3[i];
    if (y < 0 || y > 2)
      throw DataError("to_binary_labels: label " + std::to_string(y) +
                      " is not a three-class value");
    out[i] = (y == static_cast<int>(dataset::ClassLabel3::early_ictal) ||
              y == static_cast<int>(dataset::ClassLabel3::ictal))
                 ? 1
                 : 0;
  }
  return out;
}

std::string model_to_json(const ForestModel& model) {
  json j;
  j["format"] = "seizdet-forest-v1";
  j["n_features"] = model.n_features;
  j["class_list"] = model.class_list;
  j["params"] = {
      {"n_trees", model.params.n_trees},
      {"max_features", model.params.max_features},
      {"min_samples_leaf", model.params.min_samples_leaf},
      {"max_depth", model.params.max_depth},
      {"rng_seed", model.params.rng_seed},
      {"class_mode", model.params.class_mode == ClassMode::three_class
                         ? "three_class"
                         : "binary"},
      {"compute_oob", model.params.compute_oob},
  };
  j["split_counts"] = model.split_counts;
  j["impurity_sums"] = model.impurity_sums;
  j["oob_accuracy"] = model.oob_accuracy;
  json trees = json::array();
  for (const Tree& tree : model.trees) {
    json nodes = json::array();
    for (const TreeNode& nd : tree.nodes) nodes.push_back(node_to_json(nd));
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  return j.dump();
}

ForestModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("forest model: invalid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "seizdet-forest-v1")
      throw DataError("forest model: unsupported format tag");
    ForestModel model;
    model.n_features = j.at("n_features").get<std::size_t>();
    model.class_list = j.at("class_list").get<std::vector<std::string>>();
    const json& p = j.at("params");
    model.params.n_trees = p.at("n_trees").get<int>();
    model.params.max_features = p.at("max_features").get<int>();
    model.params.min_samples_leaf = p.at("min_samples_leaf").get<int>();
    model.params.max_depth = p.at("max_depth").get<int>();
    model.params.rng_seed = p.at("rng_seed").get<std::uint64_t>();
    model.params.class_mode = p.at("class_mode").get<std::string>() == "binary"
                                  ? ClassMode::binary
                                  : ClassMode::three_class;
    model.params.compute_oob = p.at("compute_oob").get<bool>();
    model.split_counts = j.at("split_counts").get<std::vector<std::uint64_t>>();
    model.impurity_sums = j.at("impurity_sums").get<std::vector<double>>();
    model.oob_accuracy = j.at("oob_accuracy").get<double>();
    if (model.split_counts.size() != model.n_features ||
        model.impurity_sums.size() != model.n_features)
      throw DataError("forest model: importance vector length mismatch");
    int n_classes = static_cast<int>(model.class_list.size());
    for (const json& jt : j.at("trees")) {
      Tree tree;
      tree.nodes.reserve(jt.size());
      for (const json& jn : jt)
        tree.nodes.push_back(node_from_json(jn, model.n_features, n_classes,
                                            tree.nodes.size(), jt.size()));
      if (tree.nodes.empty())
        throw DataError("forest model: empty tree");
      model.trees.push_back(std::move(tree));
    }
    if (model.trees.empty()) throw DataError("forest model: no trees");
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("forest model: missing or mistyped field: ") +
                    e.what());
  }
}

void save_model(const std::filesystem::path& path, const ForestModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << model_to_json(model) << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

ForestModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace seizdet::forest
