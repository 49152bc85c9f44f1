#include "touchauth/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "touchauth/errors.hpp"

namespace touchauth {

namespace {

void check_training_set(const std::vector<std::vector<double>>& X, const std::vector<int>& y) {
  if (X.empty() || X.size() != y.size()) throw DataError("training set empty or mislabeled");
  const std::size_t dim = X.front().size();
  if (dim == 0) throw DataError("zero-dimensional training rows");
  for (const auto& row : X) {
    if (row.size() != dim) throw DimensionMismatchError("ragged training rows");
  }
  bool has0 = false;
  bool has1 = false;
  for (int label : y) {
    if (label != 0 && label != 1) throw DataError("labels must be 0 or 1");
    (label == 1 ? has1 : has0) = true;
  }
  if (!has0 || !has1) throw SingleClassError("training set needs both classes");
}

}  // namespace

void MlpClassifier::train(const std::vector<std::vector<double>>& X, const std::vector<int>& y) {
  check_training_set(X, y);
  if (cfg_.epochs < 1 || cfg_.batch < 1 || !(cfg_.lr > 0.0)) {
    throw ConfigError("mlp: epochs, batch, and step size must be positive");
  }
  const auto dim = static_cast<int>(X.front().size());
  std::vector<int> widths;
  widths.push_back(dim);
  widths.insert(widths.end(), cfg_.hidden.begin(), cfg_.hidden.end());
  widths.push_back(1);
  net_ = DenseNet(widths, Activation::leaky_relu, Activation::sigmoid, cfg_.leak);

  Rng rng(cfg_.seed);
  net_.init_weights(rng);
  Sgd opt(cfg_.lr);

  std::vector<std::size_t> order(X.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grads(net_.parameter_count());
  epoch_losses_.clear();

  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg_.batch)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg_.batch));
      const double inv = 1.0 / static_cast<double>(stop - start);
      std::fill(grads.begin(), grads.end(), 0.0);
      for (std::size_t i = start; i < stop; ++i) {
        const auto& x = X[order[i]];
        const double target = y[order[i]];
        DenseNet::Trace trace;
        const double p = net_.forward(x, trace).front();
        epoch_loss += bce_loss(p, target);
        net_.backward(trace, {bce_loss_dp(p, target) * inv}, grads);
      }
      opt.step(net_.parameters(), grads);
    }
    epoch_loss /= static_cast<double>(X.size());
    if (!std::isfinite(epoch_loss)) {
      throw NonFiniteLossError(static_cast<std::size_t>(epoch), "mlp epoch loss is not finite");
    }
    epoch_losses_.push_back(epoch_loss);
  }
  trained_ = true;
}

double MlpClassifier::score(const std::vector<double>& x) const {
  if (!trained_) throw Error("mlp classifier not trained");
  return net_.forward(x).front();
}

nlohmann::json MlpClassifier::to_json() const {
  if (!trained_) throw Error("mlp classifier not trained");
  return nlohmann::json{{"kind", "mlp"},
                        {"hidden", cfg_.hidden},
                        {"epochs", cfg_.epochs},
                        {"batch", cfg_.batch},
                        {"lr", cfg_.lr},
                        {"leak", cfg_.leak},
                        {"seed", cfg_.seed},
                        {"net", net_.to_json()}};
}

std::unique_ptr<MlpClassifier> MlpClassifier::from_json(const nlohmann::json& j) {
  MlpConfig cfg;
  cfg.hidden = j.at("hidden").get<std::vector<int>>();
  cfg.epochs = j.at("epochs").get<int>();
  cfg.batch = j.at("batch").get<int>();
  cfg.lr = j.at("lr").get<double>();
  cfg.leak = j.at("leak").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  auto model = std::make_unique<MlpClassifier>(cfg);
  model->net_ = DenseNet::from_json(j.at("net"));
  model->trained_ = true;
  return model;
}

namespace {

double gini(std::size_t n0, std::size_t n1) {
  const double n = static_cast<double>(n0 + n1);
  if (n == 0.0) return 0.0;
  const double p0 = static_cast<double>(n0) / n;
  const double p1 = static_cast<double>(n1) / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

}  // namespace

int RandomForestClassifier::grow_node(std::vector<Node>& tree,
                                      const std::vector<std::vector<double>>& X,
                                      const std::vector<int>& y, std::vector<std::size_t>& idx,
                                      std::size_t begin, std::size_t end, int depth, int mtry,
                                      Rng& rng) const {
  const int node_id = static_cast<int>(tree.size());
  tree.emplace_back();
  const std::size_t n = end - begin;

  std::size_t ones = 0;
  for (std::size_t i = begin; i < end; ++i) ones += static_cast<std::size_t>(y[idx[i]]);
  const bool pure = (ones == 0 || ones == n);
  const bool depth_capped = cfg_.max_depth > 0 && depth >= cfg_.max_depth;
  if (pure || depth_capped || n < 2 * static_cast<std::size_t>(cfg_.min_leaf)) {
    tree[static_cast<std::size_t>(node_id)].label = ones * 2 > n ? 1 : 0;
    return node_id;
  }

  const auto d = static_cast<int>(X.front().size());
  std::vector<int> features(static_cast<std::size_t>(d));
  std::iota(features.begin(), features.end(), 0);
  for (int i = 0; i < mtry; ++i) {
    const auto j = static_cast<std::size_t>(i) +
                   rng.uniform_index(static_cast<std::size_t>(d - i));
    std::swap(features[static_cast<std::size_t>(i)], features[j]);
  }
  features.resize(static_cast<std::size_t>(mtry));
  std::sort(features.begin(), features.end());

  int best_feature = -1;
  double best_threshold = 0.0;
  double best_impurity = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, int>> column(n);
  for (int f : features) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = {X[idx[begin + i]][static_cast<std::size_t>(f)], y[idx[begin + i]]};
    }
    std::sort(column.begin(), column.end());
    std::size_t left_ones = 0;
    for (std::size_t s = 1; s < n; ++s) {
      left_ones += static_cast<std::size_t>(column[s - 1].second);
      if (s < static_cast<std::size_t>(cfg_.min_leaf) ||
          n - s < static_cast<std::size_t>(cfg_.min_leaf)) {
        continue;
      }
      if (!(column[s - 1].first < column[s].first)) continue;
      const std::size_t left_zeros = s - left_ones;
      const std::size_t right_ones = ones - left_ones;
      const std::size_t right_zeros = (n - s) - right_ones;
      const double impurity = (static_cast<double>(s) * gini(left_zeros, left_ones) +
                               static_cast<double>(n - s) * gini(right_zeros, right_ones)) /
                              static_cast<double>(n);
      if (impurity < best_impurity) {
        best_impurity = impurity;
        best_feature = f;
        best_threshold = column[s - 1].first + 0.5 * (column[s].first - column[s - 1].first);
      }
    }
  }

  if (best_feature < 0) {
    tree[static_cast<std::size_t>(node_id)].label = ones * 2 > n ? 1 : 0;
    return node_id;
  }

  const auto mid_iter =
      std::partition(idx.begin() + static_cast<std::ptrdiff_t>(begin),
                     idx.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t row) {
                       return X[row][static_cast<std::size_t>(best_feature)] <= best_threshold;
                     });
  const auto mid = static_cast<std::size_t>(mid_iter - idx.begin());
  tree[static_cast<std::size_t>(node_id)].feature = best_feature;
  tree[static_cast<std::size_t>(node_id)].threshold = best_threshold;
  const int left = grow_node(tree, X, y, idx, begin, mid, depth + 1, mtry, rng);
  tree[static_cast<std::size_t>(node_id)].left = left;
  const int right = grow_node(tree, X, y, idx, mid, end, depth + 1, mtry, rng);
  tree[static_cast<std::size_t>(node_id)].right = right;
  return node_id;
}

void RandomForestClassifier::train(const std::vector<std::vector<double>>& X,
                                   const std::vector<int>& y) {
  check_training_set(X, y);
  if (cfg_.trees < 1 || cfg_.min_leaf < 1) throw ConfigError("rf: trees and min_leaf must be >= 1");
  const auto d = static_cast<int>(X.front().size());
  int mtry = cfg_.mtry;
  if (mtry <= 0) mtry = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(d)))));
  mtry = std::min(mtry, d);

  trees_.assign(static_cast<std::size_t>(cfg_.trees), {});
  for (int t = 0; t < cfg_.trees; ++t) {
    Rng rng(mix_seed(cfg_.seed, hash_tag("tree"), static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> idx(X.size());
    if (cfg_.bootstrap) {
      for (auto& v : idx) v = rng.uniform_index(X.size());
    } else {
      std::iota(idx.begin(), idx.end(), std::size_t{0});
    }
    auto& tree = trees_[static_cast<std::size_t>(t)];
    tree.reserve(2 * X.size());
    grow_node(tree, X, y, idx, 0, idx.size(), 0, mtry, rng);
  }
}

double RandomForestClassifier::score(const std::vector<double>& x) const {
  if (trees_.empty()) throw Error("random forest not trained");
  std::size_t votes = 0;
  for (const auto& tree : trees_) {
    int node = 0;
    while (tree[static_cast<std::size_t>(node)].label < 0) {
      const auto& cell = tree[static_cast<std::size_t>(node)];
      node = x[static_cast<std::size_t>(cell.feature)] <= cell.threshold ? cell.left : cell.right;
    }
    votes += static_cast<std::size_t>(tree[static_cast<std::size_t>(node)].label);
  }
  return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

nlohmann::json RandomForestClassifier::to_json() const {
  if (trees_.empty()) throw Error("random forest not trained");
  nlohmann::json forest = nlohmann::json::array();
  for (const auto& tree : trees_) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree) {
      nodes.push_back(nlohmann::json{
          {"f", n.feature}, {"t", n.threshold}, {"l", n.left}, {"r", n.right}, {"c", n.label}});
    }
    forest.push_back(std::move(nodes));
  }
  return nlohmann::json{{"kind", "rf"},
                        {"trees", cfg_.trees},
                        {"max_depth", cfg_.max_depth},
                        {"min_leaf", cfg_.min_leaf},
                        {"mtry", cfg_.mtry},
                        {"bootstrap", cfg_.bootstrap},
                        {"seed", cfg_.seed},
                        {"forest", forest}};
}

std::unique_ptr<RandomForestClassifier> RandomForestClassifier::from_json(const nlohmann::json& j) {
  RfConfig cfg;
  cfg.trees = j.at("trees").get<int>();
  cfg.max_depth = j.at("max_depth").get<int>();
  cfg.min_leaf = j.at("min_leaf").get<int>();
  cfg.mtry = j.at("mtry").get<int>();
  cfg.bootstrap = j.at("bootstrap").get<bool>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  auto model = std::make_unique<RandomForestClassifier>(cfg);
  for (const auto& tree_json : j.at("forest")) {
    std::vector<Node> tree;
    tree.reserve(tree_json.size());
    for (const auto& n : tree_json) {
      Node node;
      node.feature = n.at("f").get<int>();
      node.threshold = n.at("t").get<double>();
      node.left = n.at("l").get<int>();
      node.right = n.at("r").get<int>();
      node.label = n.at("c").get<int>();
      tree.push_back(node);
    }
    model->trees_.push_back(std::move(tree));
  }
  if (model->trees_.empty()) throw DataError("random forest payload has no trees");
  return model;
}

std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "mlp") return MlpClassifier::from_json(j);
  if (kind == "rf") return RandomForestClassifier::from_json(j);
  throw DataError("unknown classifier kind '" + kind + "'");
}

ThresholdResult select_threshold_eer(const std::vector<double>& genuine_scores,
                                     const std::vector<double>& impostor_scores) {
  if (genuine_scores.empty() || impostor_scores.empty()) {
    throw EmptyListError("threshold selection needs both score lists");
  }
  std::vector<double> distinct;
  distinct.reserve(genuine_scores.size() + impostor_scores.size());
  distinct.insert(distinct.end(), genuine_scores.begin(), genuine_scores.end());
  distinct.insert(distinct.end(), impostor_scores.begin(), impostor_scores.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> candidates;
  candidates.reserve(2 * distinct.size());
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    candidates.push_back(distinct[i]);
    if (i + 1 < distinct.size()) candidates.push_back(0.5 * (distinct[i] + distinct[i + 1]));
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<double> gen_sorted = genuine_scores;
  std::sort(gen_sorted.begin(), gen_sorted.end());
  std::vector<double> imp_sorted = impostor_scores;
  std::sort(imp_sorted.begin(), imp_sorted.end());
  const auto n_gen = static_cast<double>(gen_sorted.size());
  const auto n_imp = static_cast<double>(imp_sorted.size());

  ThresholdResult best;
  double best_diff = std::numeric_limits<double>::infinity();
  for (double tau : candidates) {
    const auto imp_below = std::lower_bound(imp_sorted.begin(), imp_sorted.end(), tau) -
                           imp_sorted.begin();
    const auto gen_below = std::lower_bound(gen_sorted.begin(), gen_sorted.end(), tau) -
                           gen_sorted.begin();
    const double far = (n_imp - static_cast<double>(imp_below)) / n_imp;
    const double frr = static_cast<double>(gen_below) / n_gen;
    const double diff = std::abs(far - frr);
    if (diff < best_diff) {
      best_diff = diff;
      best = {tau, (far + frr) / 2.0, far, frr};
    }
  }
  return best;
}

CvPlan make_cv_plan(const std::vector<int>& labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cv needs >= 2 folds");
  if (labels.empty()) throw DataError("cv needs samples");
  CvPlan plan;
  plan.folds = folds;
  plan.assignment.assign(labels.size(), -1);
  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) idx.push_back(i);
    }
    if (idx.size() < static_cast<std::size_t>(folds)) {
      throw SingleClassFoldError("class " + std::to_string(cls) +
                                 " has fewer samples than folds");
    }
    Rng rng(mix_seed(seed, hash_tag("cv-fold"), static_cast<std::uint64_t>(cls)));
    rng.shuffle(idx);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      plan.assignment[idx[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    }
  }
  return plan;
}

CvResult cross_validate(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                        const CvPlan& plan, const CvTrainer& trainer, const CvMetric& metric) {
  if (plan.folds < 2) throw ConfigError("cv needs >= 2 folds");
  if (plan.assignment.size() != X.size() || X.size() != y.size()) {
    throw DimensionMismatchError("cv plan does not match the data");
  }
  CvResult result;
  for (int fold = 0; fold < plan.folds; ++fold) {
    std::vector<std::vector<double>> x_train;
    std::vector<int> y_train;
    std::vector<std::vector<double>> x_val;
    std::vector<int> y_val;
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (plan.assignment[i] == fold) {
        x_val.push_back(X[i]);
        y_val.push_back(y[i]);
      } else {
        x_train.push_back(X[i]);
        y_train.push_back(y[i]);
      }
    }
    const auto has_both = [](const std::vector<int>& v) {
      bool a = false;
      bool b = false;
      for (int label : v) (label == 1 ? a : b) = true;
      return a && b;
    };
    if (!has_both(y_train) || !has_both(y_val)) {
      throw SingleClassFoldError("fold " + std::to_string(fold) + " lacks a class");
    }
    const auto model = trainer(x_train, y_train, fold);
    result.fold_metrics.push_back(metric(*model, x_val, y_val));
  }
  result.mean = std::accumulate(result.fold_metrics.begin(), result.fold_metrics.end(), 0.0) /
                static_cast<double>(result.fold_metrics.size());
  return result;
}

}  // namespace touchauth
