#include "flint/learn.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "flint/error.hpp"
#include "json.hpp"

namespace flint::learn {

Source parse_source(const std::string& s) {
  if (s == "stack") return Source::Stack;
  if (s == "constraints") return Source::Constraints;
  if (s == "combined") return Source::Combined;
  fail_usage("unknown source '" + s + "' (expected stack, constraints or combined)");
}

std::string source_name(Source s) {
  switch (s) {
    case Source::Stack: return "stack";
    case Source::Constraints: return "constraints";
    case Source::Combined: return "combined";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "nb") return ModelKind::NB;
  if (s == "svm") return ModelKind::SVM;
  if (s == "rf") return ModelKind::RF;
  fail_usage("unknown model '" + s + "' (expected nb, svm or rf)");
}

std::string model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::NB: return "nb";
    case ModelKind::SVM: return "svm";
    case ModelKind::RF: return "rf";
  }
  return "?";
}

int Vocabulary::index_of(const std::string& t) const {
  auto it = std::lower_bound(tokens.begin(), tokens.end(), t);
  if (it == tokens.end() || *it != t) return -1;
  return static_cast<int>(it - tokens.begin());
}

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

std::string strip_instance_suffixes(const std::string& atom_text) {
  std::string out;
  size_t i = 0, n = atom_text.size();
  while (i < n) {
    if (!ident_start(atom_text[i])) {
      out.push_back(atom_text[i++]);
      continue;
    }
    size_t j = i;
    while (j < n && ident_char(atom_text[j])) ++j;
    std::string word = atom_text.substr(i, j - i);
    auto us = word.rfind('_');
    if (us != std::string::npos && us > 0 && us + 1 < word.size()) {
      bool all_digits = true;
      for (size_t k = us + 1; k < word.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(word[k]))) all_digits = false;
      if (all_digits) word.resize(us);
    }
    out += word;
    i = j;
  }
  return out;
}

std::vector<std::string> doc_tokens(const modelx::PathRecord& r, Source source) {
  std::vector<std::string> toks;
  if (source == Source::Stack || source == Source::Combined)
    for (const auto& seq : r.call_sequences)
      for (const auto& e : seq) toks.push_back(e.fn);
  if (source == Source::Constraints || source == Source::Combined)
    for (const auto& a : r.atoms) toks.push_back(strip_instance_suffixes(a));
  return toks;
}

DocMatrix vectorize(const std::vector<modelx::PathRecord>& records, Source source) {
  if (records.empty()) fail_input("empty corpus: nothing to vectorize");
  std::vector<std::vector<std::string>> docs;
  docs.reserve(records.size());
  std::set<std::string> token_set;
  for (size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (source == Source::Combined && r.atoms.empty())
      fail_input("combined source: record " + std::to_string(i) + " in product '" +
                 r.product + "' has no constraint atoms");
    docs.push_back(doc_tokens(r, source));
    for (const auto& t : docs.back()) token_set.insert(t);
  }
  DocMatrix dm;
  dm.vocab.source = source;
  dm.vocab.tokens.assign(token_set.begin(), token_set.end());
  dm.x.assign(records.size(), Row(dm.vocab.tokens.size(), 0.0));
  dm.y.resize(records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    for (const auto& t : docs[i]) {
      int c = dm.vocab.index_of(t);
      if (c >= 0) dm.x[i][c] += 1.0;
    }
    dm.y[i] = records[i].status == "failure" ? 1 : 0;
  }
  return dm;
}

Matrix vectorize_with(const std::vector<modelx::PathRecord>& records,
                      const Vocabulary& vocab) {
  Matrix x(records.size(), Row(vocab.tokens.size(), 0.0));
  for (size_t i = 0; i < records.size(); ++i)
    for (const auto& t : doc_tokens(records[i], vocab.source)) {
      int c = vocab.index_of(t);
      if (c >= 0) x[i][c] += 1.0;
    }
  return x;
}

SmoteResult smote(const Matrix& x, const std::vector<int>& y, int k,
                  std::mt19937& rng) {
  SmoteResult out{x, y, false};
  std::vector<int> of[2];
  for (size_t i = 0; i < y.size(); ++i) of[y[i]].push_back(static_cast<int>(i));
  if (of[0].size() == of[1].size()) return out;
  int minority = of[0].size() < of[1].size() ? 0 : 1;
  const auto& mi = of[minority];
  long long need = static_cast<long long>(of[1 - minority].size()) -
                   static_cast<long long>(mi.size());
  if (mi.empty()) fail_input("cannot rebalance: one class is empty");

  if (mi.size() == 1) {
    out.duplicated = true;
    for (long long i = 0; i < need; ++i) {
      out.x.push_back(x[mi[0]]);
      out.y.push_back(minority);
    }
    return out;
  }

  // k nearest minority neighbours of each minority point (Euclidean, ties by
  // index), precomputed once.
  int kk = std::min<int>(k, static_cast<int>(mi.size()) - 1);
  std::vector<std::vector<int>> nbrs(mi.size());
  for (size_t a = 0; a < mi.size(); ++a) {
    std::vector<std::pair<double, int>> d;
    for (size_t b = 0; b < mi.size(); ++b) {
      if (a == b) continue;
      double s = 0;
      for (size_t c = 0; c < x[mi[a]].size(); ++c) {
        double t = x[mi[a]][c] - x[mi[b]][c];
        s += t * t;
      }
      d.emplace_back(s, mi[b]);
    }
    std::sort(d.begin(), d.end());
    for (int t = 0; t < kk; ++t) nbrs[a].push_back(d[t].second);
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  size_t cursor = 0;
  for (long long made = 0; made < need; ++made, ++cursor) {
    size_t a = cursor % mi.size();
    std::uniform_int_distribution<int> pick(0, kk - 1);
    const Row& p = x[mi[a]];
    const Row& q = x[nbrs[a][pick(rng)]];
    double u = unit(rng);
    while (u == 0.0) u = unit(rng);
    Row s(p.size());
    for (size_t c = 0; c < p.size(); ++c) s[c] = p[c] + u * (q[c] - p[c]);
    out.x.push_back(std::move(s));
    out.y.push_back(minority);
  }
  return out;
}

namespace {

void train_nb(Model& m, const Matrix& x, const std::vector<int>& y) {
  size_t v = m.vocab.tokens.size();
  double n[2] = {0, 0};
  std::vector<double> cnt[2] = {std::vector<double>(v, 0.0),
                                std::vector<double>(v, 0.0)};
  for (size_t i = 0; i < x.size(); ++i) {
    n[y[i]] += 1;
    for (size_t c = 0; c < v; ++c) cnt[y[i]][c] += x[i][c];
  }
  for (int c = 0; c < 2; ++c) {
    m.nb_log_prior[c] = std::log(n[c] / (n[0] + n[1]));
    double total = std::accumulate(cnt[c].begin(), cnt[c].end(), 0.0);
    m.nb_log_like[c].resize(v);
    for (size_t t = 0; t < v; ++t)
      m.nb_log_like[c][t] =
          std::log((cnt[c][t] + 1.0) / (total + static_cast<double>(v)));
  }
}

void train_svm(Model& m, const Matrix& x, const std::vector<int>& y,
               unsigned seed, const Hyperparams& hp) {
  size_t v = m.vocab.tokens.size();
  m.svm_w.assign(v, 0.0);
  m.svm_b = 0.0;
  std::mt19937 rng(seed);
  std::vector<int> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  long long t = 0;
  for (int epoch = 0; epoch < hp.svm_epochs; ++epoch) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int i : idx) {
      ++t;
      double eta = 1.0 / (hp.svm_lambda * static_cast<double>(t));
      double yd = y[i] == 1 ? 1.0 : -1.0;
      double margin = m.svm_b;
      for (size_t c = 0; c < v; ++c) margin += m.svm_w[c] * x[i][c];
      margin *= yd;
      // The bias shrinks with the weights (an always-on virtual feature);
      // leaving it unregularised lets the huge early step sizes push it on
      // a random walk it never recovers from.
      double shrink = 1.0 - eta * hp.svm_lambda;
      for (size_t c = 0; c < v; ++c) m.svm_w[c] *= shrink;
      m.svm_b *= shrink;
      if (margin < 1.0) {
        for (size_t c = 0; c < v; ++c) m.svm_w[c] += eta * yd * x[i][c];
        m.svm_b += eta * yd;
      }
    }
  }
}

double gini(const std::array<double, 2>& cnt) {
  double n = cnt[0] + cnt[1];
  if (n == 0) return 0;
  double p0 = cnt[0] / n, p1 = cnt[1] / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

struct TreeBuilder {
  const Matrix& x;
  const std::vector<int>& y;
  RfTree& tree;
  std::vector<double>& importance;  // accumulated weighted impurity decreases
  std::mt19937& rng;
  int max_depth;
  double n_root;
  int n_candidates;

  int build(std::vector<int> idx, int depth) {
    std::array<double, 2> cnt{0, 0};
    for (int i : idx) cnt[y[i]] += 1;
    int majority = cnt[1] >= cnt[0] ? 1 : 0;
    auto leaf = [&]() {
      tree.nodes.push_back(RfNode{-1, 0, -1, -1, majority});
      return static_cast<int>(tree.nodes.size()) - 1;
    };
    double g = gini(cnt);
    if (g == 0.0 || depth >= max_depth || idx.size() < 2) return leaf();

    size_t v = x[0].size();
    // Candidate features: n_candidates sampled without replacement.
    std::vector<int> feats(v);
    std::iota(feats.begin(), feats.end(), 0);
    for (int i = 0; i < n_candidates && i + 1 < static_cast<int>(v); ++i) {
      std::uniform_int_distribution<int> pick(i, static_cast<int>(v) - 1);
      std::swap(feats[i], feats[pick(rng)]);
    }
    feats.resize(std::min<size_t>(n_candidates, v));
    std::sort(feats.begin(), feats.end());

    // Features and thresholds are visited in ascending order; keeping only
    // strictly better gains makes ties resolve to the lowest (feature,
    // threshold) pair deterministically.
    double best_gain = 1e-9;
    int best_f = -1;
    double best_thr = 0;
    for (int f : feats) {
      std::vector<double> vals;
      vals.reserve(idx.size());
      for (int i : idx) vals.push_back(x[i][f]);
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      for (size_t t = 0; t + 1 < vals.size(); ++t) {
        double thr = (vals[t] + vals[t + 1]) / 2.0;
        std::array<double, 2> lc{0, 0}, rc{0, 0};
        for (int i : idx) (x[i][f] <= thr ? lc : rc)[y[i]] += 1;
        double nl = lc[0] + lc[1], nr = rc[0] + rc[1];
        double gain =
            g - (nl / idx.size()) * gini(lc) - (nr / idx.size()) * gini(rc);
        if (gain > best_gain) {
          best_gain = gain;
          best_f = f;
          best_thr = thr;
        }
      }
    }
    if (best_f < 0) return leaf();

    std::vector<int> li, ri;
    for (int i : idx)
      (x[i][best_f] <= best_thr ? li : ri).push_back(i);
    if (li.empty() || ri.empty()) return leaf();

    importance[best_f] += (static_cast<double>(idx.size()) / n_root) * best_gain;
    int self = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(RfNode{best_f, best_thr, -1, -1, majority});
    idx.clear();
    idx.shrink_to_fit();
    int l = build(std::move(li), depth + 1);
    int r = build(std::move(ri), depth + 1);
    tree.nodes[self].left = l;
    tree.nodes[self].right = r;
    return self;
  }
};

void train_rf(Model& m, const Matrix& x, const std::vector<int>& y,
              unsigned seed, const Hyperparams& hp) {
  size_t v = m.vocab.tokens.size();
  size_t n = x.size();
  int cand = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(v))));
  m.rf_trees.resize(hp.rf_trees);
  m.rf_importance.assign(v, 0.0);
  for (int t = 0; t < hp.rf_trees; ++t) {
    std::mt19937 rng(seed + 0x9e3779b9u * static_cast<unsigned>(t + 1));
    std::uniform_int_distribution<int> pick(0, static_cast<int>(n) - 1);
    std::vector<int> idx(n);
    for (auto& i : idx) i = pick(rng);
    TreeBuilder tb{x,   y,
                   m.rf_trees[t],
                   m.rf_importance,
                   rng,
                   hp.rf_max_depth,
                   static_cast<double>(n),
                   cand};
    tb.build(std::move(idx), 0);
  }
  for (auto& s : m.rf_importance) s /= hp.rf_trees;
}

}  // namespace

Model train_model(ModelKind kind, const Matrix& x, const std::vector<int>& y,
                  Vocabulary vocab, unsigned seed, const Hyperparams& hp) {
  if (x.empty()) fail_input("empty training set");
  bool has[2] = {false, false};
  for (int l : y) has[l] = true;
  if (!has[0] || !has[1]) fail_input("single-class training set");
  Model m;
  m.kind = kind;
  m.vocab = std::move(vocab);
  switch (kind) {
    case ModelKind::NB: train_nb(m, x, y); break;
    case ModelKind::SVM: train_svm(m, x, y, seed, hp); break;
    case ModelKind::RF: train_rf(m, x, y, seed, hp); break;
  }
  return m;
}

int Model::predict_row(const Row& x) const {
  if (constant) return constant_label;
  switch (kind) {
    case ModelKind::NB: {
      double s0 = nb_log_prior[0], s1 = nb_log_prior[1];
      for (size_t c = 0; c < x.size(); ++c) {
        if (x[c] == 0.0) continue;
        s0 += x[c] * nb_log_like[0][c];
        s1 += x[c] * nb_log_like[1][c];
      }
      return s1 >= s0 ? 1 : 0;
    }
    case ModelKind::SVM: {
      double s = svm_b;
      for (size_t c = 0; c < x.size(); ++c) s += svm_w[c] * x[c];
      return s >= 0 ? 1 : 0;
    }
    case ModelKind::RF: {
      int votes = 0;
      for (const auto& t : rf_trees) {
        int n = 0;
        while (t.nodes[n].feature >= 0)
          n = x[t.nodes[n].feature] <= t.nodes[n].threshold ? t.nodes[n].left
                                                            : t.nodes[n].right;
        votes += t.nodes[n].label;
      }
      return 2 * votes >= static_cast<int>(rf_trees.size()) ? 1 : 0;
    }
  }
  return 0;
}

std::vector<int> Model::predict(const Matrix& x) const {
  std::vector<int> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = predict_row(x[i]);
  return out;
}

Metrics compute_metrics(const std::vector<int>& truth, const std::vector<int>& pred) {
  if (truth.size() != pred.size()) fail_internal("metrics: size mismatch");
  double tp = 0, fn = 0, tn = 0, fp = 0;
  for (size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1)
      (pred[i] == 1 ? tp : fn) += 1;
    else
      (pred[i] == 0 ? tn : fp) += 1;
  }
  Metrics m;
  double tpr = 0, tnr = 0;
  if (tp + fn > 0)
    tpr = tp / (tp + fn);
  else
    m.degenerate = true;
  if (tn + fp > 0)
    tnr = tn / (tn + fp);
  else
    m.degenerate = true;
  m.bac = 0.5 * (tpr + tnr);
  m.recall = tpr;
  if (tp + fp > 0)
    m.precision = tp / (tp + fp);
  else
    m.degenerate = true;
  return m;
}

namespace {

using Clock = std::chrono::steady_clock;

double secs_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Stratified split: per class, shuffle and set aside ~`fraction` for test,
// always leaving at least one record of each class on both sides.
void stratified_split(const std::vector<int>& labels, double fraction,
                      std::mt19937& rng, std::vector<int>& train,
                      std::vector<int>& test) {
  std::vector<int> of[2];
  for (size_t i = 0; i < labels.size(); ++i)
    of[labels[i]].push_back(static_cast<int>(i));
  for (int c = 0; c < 2; ++c) {
    auto& idx = of[c];
    std::shuffle(idx.begin(), idx.end(), rng);
    int n = static_cast<int>(idx.size());
    int nt = static_cast<int>(std::floor(n * fraction + 0.5));
    nt = std::clamp(nt, 1, n - 1);
    for (int i = 0; i < n; ++i)
      (i < nt ? test : train).push_back(idx[i]);
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
}

std::vector<modelx::PathRecord> select(const std::vector<modelx::PathRecord>& rs,
                                       const std::vector<int>& idx) {
  std::vector<modelx::PathRecord> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(rs[i]);
  return out;
}

// One train/predict round: vocabulary from `train` only, SMOTE, fit, score.
Metrics fit_and_score(const std::vector<modelx::PathRecord>& train,
                      const std::vector<modelx::PathRecord>& test, Source source,
                      ModelKind kind, int smote_k, unsigned seed,
                      const Hyperparams& hp, Model* out_model, bool* out_dup) {
  DocMatrix dm = vectorize(train, source);
  std::mt19937 rng(seed);
  auto t0 = Clock::now();
  SmoteResult sm = smote(dm.x, dm.y, smote_k, rng);
  Model m = train_model(kind, sm.x, sm.y, dm.vocab, seed, hp);
  double train_secs = secs_since(t0);
  t0 = Clock::now();
  Matrix tx = vectorize_with(test, dm.vocab);
  std::vector<int> pred = m.predict(tx);
  double predict_secs = secs_since(t0);
  std::vector<int> truth(test.size());
  for (size_t i = 0; i < test.size(); ++i)
    truth[i] = test[i].status == "failure" ? 1 : 0;
  Metrics mt = compute_metrics(truth, pred);
  mt.train_secs = train_secs;
  mt.predict_secs = predict_secs;
  if (out_model) *out_model = std::move(m);
  if (out_dup) *out_dup = sm.duplicated;
  return mt;
}

}  // namespace

EvalResult evaluate(const std::vector<modelx::PathRecord>& corpus, Source source,
                    ModelKind kind, const EvalPlan& plan) {
  if (corpus.empty()) fail_input("empty corpus");
  std::vector<int> labels(corpus.size());
  bool has[2] = {false, false};
  for (size_t i = 0; i < corpus.size(); ++i) {
    labels[i] = corpus[i].status == "failure" ? 1 : 0;
    has[labels[i]] = true;
  }
  if (!has[0] || !has[1])
    fail_input("corpus has a single class: cannot train a classifier");

  EvalResult res;
  std::mt19937 rng(plan.seed);
  stratified_split(labels, plan.test_fraction, rng, res.train_idx, res.test_idx);

  // Repeated k-fold cross-validation inside the training partition. A shuffle
  // that leaves any fold single-class is redrawn with the next seed.
  int n_train = static_cast<int>(res.train_idx.size());
  if (n_train < plan.folds)
    fail_input("training partition smaller than the fold count");
  for (int rep = 0; rep < plan.repeats; ++rep) {
    std::vector<int> order;
    unsigned attempt = 0;
    for (;; ++attempt) {
      if (attempt > 1000)
        fail_input("cannot draw cross-validation folds with both classes; "
                   "corpus is too imbalanced");
      std::mt19937 frng(plan.seed + 1000003u * static_cast<unsigned>(rep + 1) +
                        attempt);
      order = res.train_idx;
      std::shuffle(order.begin(), order.end(), frng);
      bool ok = true;
      for (int f = 0; f < plan.folds && ok; ++f) {
        int lo = static_cast<int>(static_cast<long long>(n_train) * f / plan.folds);
        int hi = static_cast<int>(static_cast<long long>(n_train) * (f + 1) / plan.folds);
        bool fh[2] = {false, false};
        for (int i = lo; i < hi; ++i) fh[labels[order[i]]] = true;
        if (!fh[0] || !fh[1]) ok = false;
      }
      if (ok) break;
      ++res.folds_redrawn;
    }
    for (int f = 0; f < plan.folds; ++f) {
      int lo = static_cast<int>(static_cast<long long>(n_train) * f / plan.folds);
      int hi = static_cast<int>(static_cast<long long>(n_train) * (f + 1) / plan.folds);
      std::vector<int> val_idx(order.begin() + lo, order.begin() + hi);
      std::vector<int> tr_idx;
      tr_idx.insert(tr_idx.end(), order.begin(), order.begin() + lo);
      tr_idx.insert(tr_idx.end(), order.begin() + hi, order.end());
      unsigned fold_seed = plan.seed + 7919u * static_cast<unsigned>(rep * plan.folds + f + 1);
      Metrics mt = fit_and_score(select(corpus, tr_idx), select(corpus, val_idx),
                                 source, kind, plan.smote_k, fold_seed, plan.hp,
                                 nullptr, nullptr);
      res.cv_bacs.push_back(mt.bac);
    }
  }
  res.cv_mean_bac = res.cv_bacs.empty()
                        ? 0.0
                        : std::accumulate(res.cv_bacs.begin(), res.cv_bacs.end(),
                                          0.0) /
                              res.cv_bacs.size();

  res.held_out = fit_and_score(select(corpus, res.train_idx),
                               select(corpus, res.test_idx), source, kind,
                               plan.smote_k, plan.seed, plan.hp, &res.model,
                               &res.smote_duplicated);
  return res;
}

LoioResult leave_one_interaction_out(const std::vector<modelx::PathRecord>& corpus,
                                     Source source, ModelKind kind,
                                     const EvalPlan& plan) {
  std::set<std::string> ids;
  for (const auto& r : corpus)
    if (r.status == "failure" && !r.spec_id.empty()) ids.insert(r.spec_id);
  if (ids.empty()) fail_input("no failure records with interaction ids");

  LoioResult res;
  for (const auto& id : ids) {
    std::vector<modelx::PathRecord> train, test;
    for (const auto& r : corpus)
      (r.spec_id == id ? test : train).push_back(r);
    if (test.empty()) fail_input("interaction '" + id + "' has no records");

    LoioRow row;
    row.spec_id = id;
    row.n_fail = static_cast<int>(test.size());

    bool tr_has[2] = {false, false};
    for (const auto& r : train) tr_has[r.status == "failure" ? 1 : 0] = true;
    if (tr_has[0] && tr_has[1]) {
      DocMatrix dm = vectorize(train, source);
      std::mt19937 rng(plan.seed);
      SmoteResult sm = smote(dm.x, dm.y, plan.smote_k, rng);
      Model m = train_model(kind, sm.x, sm.y, dm.vocab, plan.seed, plan.hp);
      std::vector<int> pred = m.predict(vectorize_with(test, dm.vocab));
      for (int p : pred) row.n_detected += p;
    }
    // A single-class training remainder (the only interaction in the corpus)
    // yields a model that never predicts failure: nothing detected.
    row.detected = row.n_detected > 0;
    res.rows.push_back(std::move(row));
  }
  int det = 0;
  for (const auto& r : res.rows) det += r.detected ? 1 : 0;
  res.percent_detected = 100.0 * det / static_cast<double>(res.rows.size());
  return res;
}

std::vector<PartialRow> partial_data_eval(const std::vector<modelx::PathRecord>& corpus,
                                          const EvalResult& eval, Source source,
                                          const std::vector<double>& fractions) {
  if (source != eval.model.vocab.source)
    fail_usage("source does not match the trained model");
  std::vector<PartialRow> out;
  for (double f : fractions) {
    if (f < 0.0 || f > 1.0) fail_usage("fraction must lie in [0, 1]");
    PartialRow row;
    row.fraction = f;
    std::vector<modelx::PathRecord> kept;
    std::vector<int> truth;
    for (int i : eval.test_idx) {
      modelx::PathRecord r = corpus[i];
      for (auto& seq : r.call_sequences) {
        size_t cut = static_cast<size_t>(std::floor(f * seq.size()));
        seq.erase(seq.begin(), seq.begin() + cut);
      }
      size_t cut = static_cast<size_t>(std::floor(f * r.atoms.size()));
      r.atoms.erase(r.atoms.begin(), r.atoms.begin() + cut);
      if (doc_tokens(r, source).empty()) {
        ++row.dropped;
        continue;
      }
      truth.push_back(r.status == "failure" ? 1 : 0);
      kept.push_back(std::move(r));
    }
    if (kept.empty())
      fail_input("truncation at fraction " + std::to_string(f) +
                 " emptied every document");
    Matrix tx = vectorize_with(kept, eval.model.vocab);
    row.metrics = compute_metrics(truth, eval.model.predict(tx));
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::pair<std::string, double>> feature_importance(const Model& rf) {
  if (rf.kind != ModelKind::RF) fail_usage("feature importance needs a random forest model");
  double total = std::accumulate(rf.rf_importance.begin(), rf.rf_importance.end(), 0.0);
  std::vector<std::pair<std::string, double>> rows;
  rows.reserve(rf.vocab.tokens.size());
  for (size_t i = 0; i < rf.vocab.tokens.size(); ++i)
    rows.emplace_back(rf.vocab.tokens[i],
                      total > 0 ? rf.rf_importance[i] / total : 0.0);
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return rows;
}

void save_model(const std::string& path, const Model& m) {
  nlohmann::ordered_json j;
  j["format"] = "flint-model";
  j["version"] = 1;
  j["kind"] = model_kind_name(m.kind);
  j["source"] = source_name(m.vocab.source);
  j["vocab"] = m.vocab.tokens;
  switch (m.kind) {
    case ModelKind::NB: {
      j["nb"]["log_prior"] = m.nb_log_prior;
      j["nb"]["log_like"] = m.nb_log_like;
      break;
    }
    case ModelKind::SVM: {
      j["svm"]["w"] = m.svm_w;
      j["svm"]["b"] = m.svm_b;
      break;
    }
    case ModelKind::RF: {
      nlohmann::ordered_json trees = nlohmann::ordered_json::array();
      for (const auto& t : m.rf_trees) {
        nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
        for (const auto& n : t.nodes)
          nodes.push_back({n.feature, n.threshold, n.left, n.right, n.label});
        trees.push_back(std::move(nodes));
      }
      j["rf"]["trees"] = std::move(trees);
      j["rf"]["importance"] = m.rf_importance;
      break;
    }
  }
  modelx::write_text_atomic(path, j.dump(2) + "\n");
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_input("cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail_input("bad model file " + path + ": " + e.what());
  }
  try {
    if (j.at("format") != "flint-model") fail_input("not a model file: " + path);
    if (j.at("version") != 1)
      fail_input("unsupported model version in " + path);
    Model m;
    m.kind = parse_model_kind(j.at("kind").get<std::string>());
    m.vocab.source = parse_source(j.at("source").get<std::string>());
    m.vocab.tokens = j.at("vocab").get<std::vector<std::string>>();
    switch (m.kind) {
      case ModelKind::NB: {
        auto lp = j.at("nb").at("log_prior").get<std::vector<double>>();
        if (lp.size() != 2) fail_input("bad model file " + path);
        m.nb_log_prior = {lp[0], lp[1]};
        auto ll = j.at("nb").at("log_like").get<std::vector<std::vector<double>>>();
        if (ll.size() != 2) fail_input("bad model file " + path);
        m.nb_log_like = {ll[0], ll[1]};
        break;
      }
      case ModelKind::SVM: {
        m.svm_w = j.at("svm").at("w").get<std::vector<double>>();
        m.svm_b = j.at("svm").at("b").get<double>();
        break;
      }
      case ModelKind::RF: {
        for (const auto& t : j.at("rf").at("trees")) {
          RfTree tree;
          for (const auto& n : t) {
            RfNode node;
            node.feature = n.at(0).get<int>();
            node.threshold = n.at(1).get<double>();
            node.left = n.at(2).get<int>();
            node.right = n.at(3).get<int>();
            node.label = n.at(4).get<int>();
            tree.nodes.push_back(node);
          }
          m.rf_trees.push_back(std::move(tree));
        }
        m.rf_importance = j.at("rf").at("importance").get<std::vector<double>>();
        break;
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail_input("bad model file " + path + ": " + e.what());
  }
}

std::string metrics_csv_header() {
  return "dataset,source,model,bac,recall,precision,train_secs,predict_secs";
}

namespace {
std::string fixed3(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << v;
  return os.str();
}
std::string fixed6(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << v;
  return os.str();
}
}  // namespace

std::string metrics_csv_row(const std::string& dataset, Source source,
                            ModelKind kind, const Metrics& m, bool real_times) {
  std::ostringstream os;
  os << dataset << ',' << source_name(source) << ',' << model_kind_name(kind)
     << ',' << fixed6(m.bac) << ',' << fixed6(m.recall) << ','
     << fixed6(m.precision) << ',' << fixed3(real_times ? m.train_secs : 0.0)
     << ',' << fixed3(real_times ? m.predict_secs : 0.0);
  return os.str();
}

std::string importance_csv(const std::vector<std::pair<std::string, double>>& rows) {
  std::ostringstream os;
  os << "token,score\n";
  for (const auto& [tok, score] : rows) os << tok << ',' << fixed6(score) << "\n";
  return os.str();
}

}  // namespace flint::learn
