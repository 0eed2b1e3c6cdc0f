#ifndef FLINT_LEARN_HPP
#define FLINT_LEARN_HPP

#include <array>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "flint/records.hpp"

namespace flint::learn {

enum class Source { Stack, Constraints, Combined };
Source parse_source(const std::string& s);
std::string source_name(Source s);

enum class ModelKind { NB, SVM, RF };
ModelKind parse_model_kind(const std::string& s);
std::string model_kind_name(ModelKind k);

using Row = std::vector<double>;
using Matrix = std::vector<Row>;

struct Vocabulary {
  std::vector<std::string> tokens;  // lexicographic
  Source source = Source::Stack;
  int index_of(const std::string& t) const;  // -1 when absent
};

// Strips metadata-variable instance suffixes from identifiers embedded in an
// atom text: `fRes_2` -> `fRes`.
std::string strip_instance_suffixes(const std::string& atom_text);

// Token multiset of one record under the chosen source: function names from
// every call sequence, suffix-stripped atom texts, or both.
std::vector<std::string> doc_tokens(const modelx::PathRecord& r, Source source);

struct DocMatrix {
  Matrix x;
  std::vector<int> y;  // 1 = failure, 0 = normal
  Vocabulary vocab;
};

// Builds the vocabulary from `records` (training data only).
DocMatrix vectorize(const std::vector<modelx::PathRecord>& records, Source source);
// Projects onto an existing vocabulary; unseen tokens are dropped.
Matrix vectorize_with(const std::vector<modelx::PathRecord>& records,
                      const Vocabulary& vocab);

struct SmoteResult {
  Matrix x;
  std::vector<int> y;
  bool duplicated = false;  // minority of size 1 fell back to duplication
};

// Balances classes by interpolating each minority point toward one of its k
// nearest minority neighbours with a uniform (0,1) factor.
SmoteResult smote(const Matrix& x, const std::vector<int>& y, int k,
                  std::mt19937& rng);

struct RfNode {
  int feature = -1;  // -1 = leaf
  double threshold = 0;
  int left = -1, right = -1;
  int label = 0;  // leaf majority class
};
struct RfTree {
  std::vector<RfNode> nodes;  // node 0 is the root
};

struct Model {
  ModelKind kind = ModelKind::NB;
  Vocabulary vocab;
  // Naive Bayes (multinomial, additive smoothing alpha = 1)
  std::array<double, 2> nb_log_prior{};
  std::array<std::vector<double>, 2> nb_log_like{};
  // Linear SVM (hinge loss, stochastic subgradient)
  std::vector<double> svm_w;
  double svm_b = 0;
  // Random forest
  std::vector<RfTree> rf_trees;
  std::vector<double> rf_importance;  // mean impurity decrease per token
  bool constant = false;              // degenerate always-`constant_label` model
  int constant_label = 0;

  int predict_row(const Row& x) const;
  std::vector<int> predict(const Matrix& x) const;
};

struct Hyperparams {
  // SVM
  double svm_lambda = 1e-4;
  int svm_epochs = 50;
  // RF
  int rf_trees = 100;
  int rf_max_depth = 16;
};

Model train_model(ModelKind kind, const Matrix& x, const std::vector<int>& y,
                  Vocabulary vocab, unsigned seed,
                  const Hyperparams& hp = Hyperparams{});

struct Metrics {
  double bac = 0, recall = 0, precision = 0;
  double train_secs = 0, predict_secs = 0;
  bool degenerate = false;  // some denominator was zero
};

Metrics compute_metrics(const std::vector<int>& truth, const std::vector<int>& pred);

struct EvalPlan {
  double test_fraction = 0.2;
  int repeats = 5;
  int folds = 10;
  int smote_k = 5;
  unsigned seed = 1;
  Hyperparams hp{};
};

struct EvalResult {
  Metrics held_out;
  std::vector<double> cv_bacs;  // (repeat, fold) order
  double cv_mean_bac = 0;
  int folds_redrawn = 0;
  bool smote_duplicated = false;
  Model model;  // refit on the full training partition
  std::vector<int> train_idx, test_idx;
};

// Stratified 80/20 split, repeated k-fold cross-validation inside the
// training partition (SMOTE per training fold), refit, held-out metrics.
EvalResult evaluate(const std::vector<modelx::PathRecord>& corpus, Source source,
                    ModelKind kind, const EvalPlan& plan);

struct LoioRow {
  std::string spec_id;
  int n_fail = 0;
  int n_detected = 0;
  bool detected = false;
};
struct LoioResult {
  std::vector<LoioRow> rows;
  double percent_detected = 0;
};

// Per interaction id: hold out all of its records, train on the remainder,
// count it detected when at least one held-out path classifies as failure.
LoioResult leave_one_interaction_out(const std::vector<modelx::PathRecord>& corpus,
                                     Source source, ModelKind kind,
                                     const EvalPlan& plan);

struct PartialRow {
  double fraction = 0;
  Metrics metrics;
  int dropped = 0;  // documents emptied by truncation
};

// Re-scores the held-out partition after removing the given fraction from
// the head of each call sequence and of the sorted atom list.
std::vector<PartialRow> partial_data_eval(const std::vector<modelx::PathRecord>& corpus,
                                          const EvalResult& eval, Source source,
                                          const std::vector<double>& fractions);

// (token, normalized Gini importance), score descending, ties by token.
std::vector<std::pair<std::string, double>> feature_importance(const Model& rf);

void save_model(const std::string& path, const Model& m);
Model load_model(const std::string& path);

std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& dataset, Source source,
                            ModelKind kind, const Metrics& m, bool real_times);
std::string importance_csv(const std::vector<std::pair<std::string, double>>& rows);

}  // namespace flint::learn

#endif
