#include "poincavec/roleclf.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "poincavec/csv.hpp"
#include "poincavec/errors.hpp"
#include "poincavec/rng.hpp"

namespace poincavec::roleclf {

namespace {

constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.1;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

std::unordered_map<std::string, std::size_t> index_by_name(
    const std::vector<std::string>& names) {
  std::unordered_map<std::string, std::size_t> map;
  map.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) map.emplace(names[i], i);
  return map;
}

}  // namespace

FeatureSet assemble_features(
    const embed::EmbeddingMatrix& ball_emb,
    const embed::EmbeddingMatrix* walk_emb,
    const std::vector<hierfeat::HierFeatureVector>* hier,
    const std::vector<std::string>* hier_names, AblationFlags flags) {
  FeatureSet set;
  set.layout.ball_dim = ball_emb.dim;
  set.layout.walk_dim = flags.use_walk ? walk_emb->dim : 0;
  set.layout.hier_dim = flags.use_hier ? hierfeat::kFeatureCount : 0;

  std::unordered_map<std::string, std::size_t> walk_idx;
  if (flags.use_walk) {
    if (!walk_emb || walk_emb->node_count() != ball_emb.node_count()) {
      fail(ErrorCode::MisalignedInputs,
           "walk embedding does not cover the same nodes");
    }
    walk_idx = index_by_name(walk_emb->node_names);
  }
  std::unordered_map<std::string, std::size_t> hier_idx;
  if (flags.use_hier) {
    if (!hier || !hier_names || hier->size() != ball_emb.node_count() ||
        hier_names->size() != hier->size()) {
      fail(ErrorCode::MisalignedInputs,
           "node features do not cover the same nodes");
    }
    hier_idx = index_by_name(*hier_names);
  }

  set.rows.reserve(ball_emb.node_count());
  for (std::size_t i = 0; i < ball_emb.node_count(); ++i) {
    FeatureRow row;
    row.node = ball_emb.node_names[i];
    row.x.reserve(set.layout.total());
    auto ball = ball_emb.row(i);
    row.x.insert(row.x.end(), ball.begin(), ball.end());
    if (flags.use_walk) {
      auto it = walk_idx.find(row.node);
      if (it == walk_idx.end()) {
        fail(ErrorCode::MisalignedInputs,
             "walk embedding missing node " + row.node);
      }
      auto w = walk_emb->row(it->second);
      row.x.insert(row.x.end(), w.begin(), w.end());
    }
    if (flags.use_hier) {
      auto it = hier_idx.find(row.node);
      if (it == hier_idx.end()) {
        fail(ErrorCode::MisalignedInputs,
             "node features missing node " + row.node);
      }
      auto h = (*hier)[it->second].as_array();
      row.x.insert(row.x.end(), h.begin(), h.end());
    }
    set.rows.push_back(std::move(row));
  }
  return set;
}

std::size_t attach_labels(std::vector<FeatureRow>& rows,
                          std::span<const LabeledAddress> labels) {
  std::unordered_map<std::string, std::size_t> row_idx;
  row_idx.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) row_idx.emplace(rows[i].node, i);
  std::size_t attached = 0;
  for (const auto& label : labels) {
    auto it = row_idx.find(label.address);
    if (it == row_idx.end()) continue;
    if (rows[it->second].label) continue;
    rows[it->second].label = label.role;
    ++attached;
  }
  return attached;
}

SplitIndices stratified_split(const std::vector<FeatureRow>& rows,
                              double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    fail(ErrorCode::BadConfig, "test fraction must lie in (0, 1)");
  }
  std::array<std::vector<std::size_t>, kRoleCount> by_class;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].label) by_class[static_cast<std::size_t>(*rows[i].label)].push_back(i);
  }
  for (std::size_t c = 0; c < kRoleCount; ++c) {
    if (!by_class[c].empty() && by_class[c].size() < 2) {
      fail(ErrorCode::ClassTooSmall,
           std::string("class ") + to_string(static_cast<Role>(c)) +
               " has fewer than 2 labeled rows");
    }
  }
  Rng rng(derive_seed(seed, "stratified-split"));
  SplitIndices split;
  for (std::size_t c = 0; c < kRoleCount; ++c) {
    auto& members = by_class[c];
    if (members.empty()) continue;
    rng.shuffle(members);
    auto n = members.size();
    auto want = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) * test_fraction));
    std::size_t n_test = std::min(want, n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      (i < n_test ? split.test : split.train).push_back(members[i]);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

void write_split_csv(const std::string& path,
                     const std::vector<FeatureRow>& rows,
                     const SplitIndices& split) {
  CsvWriter w(path);
  w.row({"node", "part"});
  for (std::size_t i : split.train) w.row({rows[i].node, "train"});
  for (std::size_t i : split.test) w.row({rows[i].node, "test"});
}

SplitIndices read_split_csv(const std::string& path,
                            const std::vector<FeatureRow>& rows) {
  CsvTable table = read_csv(path);
  auto c_node = table.column("node");
  auto c_part = table.column("part");
  if (!c_node || !c_part) {
    fail(ErrorCode::MissingColumn, path + ": need columns 'node' and 'part'");
  }
  std::unordered_map<std::string, std::size_t> row_idx;
  for (std::size_t i = 0; i < rows.size(); ++i) row_idx.emplace(rows[i].node, i);
  SplitIndices split;
  for (const auto& row : table.rows) {
    auto it = row_idx.find(row[*c_node]);
    if (it == row_idx.end()) {
      fail(ErrorCode::MisalignedInputs,
           path + ": split references unknown node " + row[*c_node]);
    }
    if (row[*c_part] == "train") {
      split.train.push_back(it->second);
    } else if (row[*c_part] == "test") {
      split.test.push_back(it->second);
    } else {
      fail(ErrorCode::MisalignedInputs,
           path + ": part must be 'train' or 'test'");
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

void Scaler::fit(const std::vector<FeatureRow>& rows,
                 std::span<const std::size_t> indices) {
  if (indices.empty()) fail(ErrorCode::EmptyInput, "scaler needs rows to fit");
  const std::size_t d = rows[indices[0]].x.size();
  mean.assign(d, 0.0);
  scale.assign(d, 1.0);
  const double n = static_cast<double>(indices.size());
  for (std::size_t i : indices) {
    for (std::size_t t = 0; t < d; ++t) mean[t] += rows[i].x[t];
  }
  for (double& m : mean) m /= n;
  std::vector<double> var(d, 0.0);
  for (std::size_t i : indices) {
    for (std::size_t t = 0; t < d; ++t) {
      double diff = rows[i].x[t] - mean[t];
      var[t] += diff * diff;
    }
  }
  for (std::size_t t = 0; t < d; ++t) {
    double sd = std::sqrt(var[t] / n);
    if (sd < 1e-12) {
      mean[t] = 0.0;  // constant column: leave values as they are
      scale[t] = 1.0;
    } else {
      scale[t] = sd;
    }
  }
}

void Scaler::apply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t t = 0; t < x.size(); ++t) {
    out[t] = (x[t] - mean[t]) / scale[t];
  }
}

double softmax_cross_entropy(std::span<const double> logits,
                             std::size_t truth) {
  double mx = logits[0];
  for (double z : logits) mx = std::max(mx, z);
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - mx);
  return std::log(sum) - (logits[truth] - mx);
}

namespace {

struct Parameters {
  std::vector<double> w1, b1, gamma, beta, w2, b2;
  std::vector<double> run_mean, run_var;
};

struct AdamState {
  std::vector<double> m, v;
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

void adamw_update(std::vector<double>& p, const std::vector<double>& g,
                  AdamState& state, double lr, double wd, std::size_t t) {
  double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(t));
  double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(t));
  for (std::size_t i = 0; i < p.size(); ++i) {
    state.m[i] = kAdamBeta1 * state.m[i] + (1.0 - kAdamBeta1) * g[i];
    state.v[i] = kAdamBeta2 * state.v[i] + (1.0 - kAdamBeta2) * g[i] * g[i];
    double mhat = state.m[i] / c1;
    double vhat = state.v[i] / c2;
    p[i] -= lr * (mhat / (std::sqrt(vhat) + kAdamEps) + wd * p[i]);
  }
}

// eval-mode forward for one already-scaled row
void eval_logits(const std::vector<double>& w1, const std::vector<double>& b1,
                 const std::vector<double>& gamma,
                 const std::vector<double>& beta,
                 const std::vector<double>& run_mean,
                 const std::vector<double>& run_var,
                 const std::vector<double>& w2, const std::vector<double>& b2,
                 std::size_t input_dim, std::size_t hidden,
                 std::span<const double> xs, std::span<double> logits) {
  std::vector<double> a(hidden);
  for (std::size_t h = 0; h < hidden; ++h) {
    double s = b1[h];
    const double* wrow = w1.data() + h * input_dim;
    for (std::size_t d = 0; d < input_dim; ++d) s += wrow[d] * xs[d];
    double xhat = (s - run_mean[h]) / std::sqrt(run_var[h] + kBnEps);
    double y = gamma[h] * xhat + beta[h];
    a[h] = y > 0.0 ? y : 0.0;
  }
  for (std::size_t c = 0; c < kRoleCount; ++c) {
    double s = b2[c];
    const double* wrow = w2.data() + c * hidden;
    for (std::size_t h = 0; h < hidden; ++h) s += wrow[h] * a[h];
    logits[c] = s;
  }
}

void forward_eval(const Parameters& par, std::size_t input_dim,
                  std::size_t hidden, std::span<const double> xs,
                  std::span<double> logits) {
  eval_logits(par.w1, par.b1, par.gamma, par.beta, par.run_mean, par.run_var,
              par.w2, par.b2, input_dim, hidden, xs, logits);
}

std::array<double, kRoleCount> softmax4(std::span<const double> logits) {
  double mx = logits[0];
  for (double z : logits) mx = std::max(mx, z);
  std::array<double, kRoleCount> p{};
  double sum = 0.0;
  for (std::size_t c = 0; c < kRoleCount; ++c) {
    p[c] = std::exp(logits[c] - mx);
    sum += p[c];
  }
  for (double& x : p) x /= sum;
  return p;
}

double macro_f1_of(const std::vector<Role>& truth,
                   const std::vector<Role>& pred) {
  Metrics m = compute_metrics(truth, pred);
  return m.macro_f1;
}

}  // namespace

std::array<double, kRoleCount> MlpModel::predict_probs(
    std::span<const double> x) const {
  if (x.size() != input_dim) {
    fail(ErrorCode::MisalignedInputs,
         "feature width does not match the model");
  }
  std::vector<double> xs(x.size());
  scaler.apply(x, xs);
  std::array<double, kRoleCount> logits{};
  eval_logits(w1, b1, bn_gamma, bn_beta, bn_mean, bn_var, w2, b2, input_dim,
              hidden, xs, logits);
  return softmax4(logits);
}

Role MlpModel::predict(std::span<const double> x) const {
  auto probs = predict_probs(x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < kRoleCount; ++c) {
    if (probs[c] > probs[best]) best = c;
  }
  return static_cast<Role>(best);
}

ClassifierTrainResult train_classifier(const std::vector<FeatureRow>& rows,
                                       std::span<const std::size_t> train_indices,
                                       const ClassifierConfig& cfg) {
  if (train_indices.empty()) {
    fail(ErrorCode::EmptyInput, "no training rows");
  }
  for (std::size_t i : train_indices) {
    if (!rows[i].label) {
      fail(ErrorCode::MisalignedInputs, "unlabeled row in training set");
    }
  }
  {
    std::array<bool, kRoleCount> present{};
    for (std::size_t i : train_indices) {
      present[static_cast<std::size_t>(*rows[i].label)] = true;
    }
    if (std::count(present.begin(), present.end(), true) < 2) {
      fail(ErrorCode::SingleClassTrain,
           "training rows contain a single class");
    }
  }

  // validation carve, stratified inside the training rows
  std::vector<std::size_t> fit_idx, val_idx;
  {
    std::array<std::vector<std::size_t>, kRoleCount> by_class;
    for (std::size_t i : train_indices) {
      by_class[static_cast<std::size_t>(*rows[i].label)].push_back(i);
    }
    Rng rng(derive_seed(cfg.seed, "val-carve"));
    for (auto& members : by_class) {
      if (members.empty()) continue;
      rng.shuffle(members);
      auto n = members.size();
      auto want = static_cast<std::size_t>(
          std::llround(static_cast<double>(n) * cfg.val_fraction));
      std::size_t n_val = n >= 2 ? std::min(want, n - 1) : 0;
      for (std::size_t i = 0; i < n; ++i) {
        (i < n_val ? val_idx : fit_idx).push_back(members[i]);
      }
    }
    std::sort(fit_idx.begin(), fit_idx.end());
    std::sort(val_idx.begin(), val_idx.end());
  }

  const std::size_t input_dim = rows[train_indices[0]].x.size();
  const std::size_t hidden = cfg.hidden_width;
  const std::size_t n_fit = fit_idx.size();

  ClassifierTrainResult result;
  MlpModel& model = result.model;
  model.input_dim = input_dim;
  model.hidden = hidden;
  model.dropout = cfg.dropout;
  model.layout = cfg.layout;
  model.ablation = cfg.ablation;
  if (model.layout.total() == 0) {
    model.layout.ball_dim = input_dim;  // raw rows without a declared layout
  }
  model.scaler.fit(rows, train_indices);

  // pre-scaled design matrices
  std::vector<double> xs_fit(n_fit * input_dim);
  std::vector<std::size_t> y_fit(n_fit);
  for (std::size_t i = 0; i < n_fit; ++i) {
    model.scaler.apply(rows[fit_idx[i]].x,
                       {xs_fit.data() + i * input_dim, input_dim});
    y_fit[i] = static_cast<std::size_t>(*rows[fit_idx[i]].label);
  }
  std::vector<double> xs_val(val_idx.size() * input_dim);
  std::vector<Role> y_val(val_idx.size());
  for (std::size_t i = 0; i < val_idx.size(); ++i) {
    model.scaler.apply(rows[val_idx[i]].x,
                       {xs_val.data() + i * input_dim, input_dim});
    y_val[i] = *rows[val_idx[i]].label;
  }

  std::array<double, kRoleCount> class_weight;
  class_weight.fill(1.0);
  if (cfg.class_weighting) {
    std::array<std::size_t, kRoleCount> counts{};
    for (std::size_t y : y_fit) counts[y] += 1;
    std::size_t present = 0;
    for (auto c : counts) present += c > 0 ? 1 : 0;
    for (std::size_t c = 0; c < kRoleCount; ++c) {
      if (counts[c] > 0) {
        class_weight[c] = static_cast<double>(n_fit) /
                          (static_cast<double>(present) *
                           static_cast<double>(counts[c]));
      }
    }
  }

  Parameters par;
  par.w1.resize(hidden * input_dim);
  par.b1.assign(hidden, 0.0);
  par.gamma.assign(hidden, 1.0);
  par.beta.assign(hidden, 0.0);
  par.w2.resize(kRoleCount * hidden);
  par.b2.assign(kRoleCount, 0.0);
  par.run_mean.assign(hidden, 0.0);
  par.run_var.assign(hidden, 1.0);
  Rng rng(derive_seed(cfg.seed, "mlp-init"));
  {
    double s1 = std::sqrt(2.0 / static_cast<double>(input_dim));
    for (double& w : par.w1) w = s1 * rng.normal();
    double s2 = std::sqrt(2.0 / static_cast<double>(hidden));
    for (double& w : par.w2) w = s2 * rng.normal();
  }

  AdamState st_w1(par.w1.size()), st_b1(par.b1.size());
  AdamState st_gamma(par.gamma.size()), st_beta(par.beta.size());
  AdamState st_w2(par.w2.size()), st_b2(par.b2.size());

  Rng drop_rng(derive_seed(cfg.seed, "dropout"));
  Rng order_rng(derive_seed(cfg.seed, "batch-order"));
  const double keep = 1.0 - cfg.dropout;

  Parameters best = par;
  double best_f1 = -1.0;
  std::size_t best_epoch = 0;
  std::size_t stale = 0;
  std::size_t step = 0;  // Adam bias correction counts updates, not epochs

  const std::size_t batch_cap =
      cfg.batch_size == 0 ? n_fit : std::min(cfg.batch_size, n_fit);
  std::vector<std::size_t> order(n_fit);
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> xb(batch_cap * input_dim);
  std::vector<std::size_t> y_b(batch_cap);
  std::vector<double> h1(batch_cap * hidden), xhat(batch_cap * hidden),
      yb(batch_cap * hidden), act(batch_cap * hidden), mask(batch_cap * hidden);
  std::vector<double> bmean(hidden), bvar(hidden), inv_std(hidden);
  std::vector<double> logits(batch_cap * kRoleCount), dz(batch_cap * kRoleCount);
  std::vector<double> g_w1(par.w1.size()), g_b1(hidden), g_gamma(hidden),
      g_beta(hidden), g_w2(par.w2.size()), g_b2(kRoleCount);
  std::vector<double> dact(batch_cap * hidden), dh1(batch_cap * hidden);
  std::vector<double> dvar(hidden), dmean(hidden);

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    order_rng.shuffle(order);
    double epoch_loss = 0.0;
    double epoch_weight = 0.0;

    for (std::size_t start = 0; start < n_fit; start += batch_cap) {
      const std::size_t nb = std::min(batch_cap, n_fit - start);
      // a single-row tail batch has zero batch variance: normalization
      // erases the row's own signal and drags the running stats toward a
      // degenerate estimate, so the row waits for the next shuffle
      if (nb < 2) break;
      for (std::size_t i = 0; i < nb; ++i) {
        std::size_t src = order[start + i];
        std::memcpy(xb.data() + i * input_dim, xs_fit.data() + src * input_dim,
                    input_dim * sizeof(double));
        y_b[i] = y_fit[src];
      }

      // forward: affine
      for (std::size_t i = 0; i < nb; ++i) {
        const double* x = xb.data() + i * input_dim;
        for (std::size_t h = 0; h < hidden; ++h) {
          double s = par.b1[h];
          const double* wrow = par.w1.data() + h * input_dim;
          for (std::size_t d = 0; d < input_dim; ++d) s += wrow[d] * x[d];
          h1[i * hidden + h] = s;
        }
      }
      // batch stats
      const double nf = static_cast<double>(nb);
      for (std::size_t h = 0; h < hidden; ++h) {
        double m = 0.0;
        for (std::size_t i = 0; i < nb; ++i) m += h1[i * hidden + h];
        m /= nf;
        double v = 0.0;
        for (std::size_t i = 0; i < nb; ++i) {
          double d = h1[i * hidden + h] - m;
          v += d * d;
        }
        v /= nf;
        bmean[h] = m;
        bvar[h] = v;
        inv_std[h] = 1.0 / std::sqrt(v + kBnEps);
        par.run_mean[h] =
            (1.0 - kBnMomentum) * par.run_mean[h] + kBnMomentum * m;
        par.run_var[h] = (1.0 - kBnMomentum) * par.run_var[h] + kBnMomentum * v;
      }
      // normalize, relu, dropout
      for (std::size_t i = 0; i < nb; ++i) {
        for (std::size_t h = 0; h < hidden; ++h) {
          std::size_t idx = i * hidden + h;
          xhat[idx] = (h1[idx] - bmean[h]) * inv_std[h];
          yb[idx] = par.gamma[h] * xhat[idx] + par.beta[h];
          double a = yb[idx] > 0.0 ? yb[idx] : 0.0;
          double mk = 1.0;
          if (cfg.dropout > 0.0) {
            mk = drop_rng.next_double() < keep ? 1.0 / keep : 0.0;
          }
          mask[idx] = mk;
          act[idx] = a * mk;
        }
      }
      // output affine + loss
      double weight_sum = 0.0;
      for (std::size_t i = 0; i < nb; ++i) {
        double* z = logits.data() + i * kRoleCount;
        const double* a = act.data() + i * hidden;
        for (std::size_t c = 0; c < kRoleCount; ++c) {
          double s = par.b2[c];
          const double* wrow = par.w2.data() + c * hidden;
          for (std::size_t h = 0; h < hidden; ++h) s += wrow[h] * a[h];
          z[c] = s;
        }
        double w = class_weight[y_b[i]];
        weight_sum += w;
        double li = w * softmax_cross_entropy({z, kRoleCount}, y_b[i]);
        epoch_loss += li;
        auto p = softmax4({z, kRoleCount});
        double* dzi = dz.data() + i * kRoleCount;
        for (std::size_t c = 0; c < kRoleCount; ++c) {
          dzi[c] = w * (p[c] - (c == y_b[i] ? 1.0 : 0.0));
        }
      }
      epoch_weight += weight_sum;
      for (std::size_t i = 0; i < nb * kRoleCount; ++i) dz[i] /= weight_sum;

      // backward
      std::fill(g_w2.begin(), g_w2.end(), 0.0);
      std::fill(g_b2.begin(), g_b2.end(), 0.0);
      for (std::size_t i = 0; i < nb; ++i) {
        const double* dzi = dz.data() + i * kRoleCount;
        const double* a = act.data() + i * hidden;
        for (std::size_t c = 0; c < kRoleCount; ++c) {
          double g = dzi[c];
          g_b2[c] += g;
          double* grow = g_w2.data() + c * hidden;
          for (std::size_t h = 0; h < hidden; ++h) grow[h] += g * a[h];
        }
        double* da = dact.data() + i * hidden;
        for (std::size_t h = 0; h < hidden; ++h) {
          double s = 0.0;
          for (std::size_t c = 0; c < kRoleCount; ++c) {
            s += dzi[c] * par.w2[c * hidden + h];
          }
          std::size_t idx = i * hidden + h;
          // chain through dropout and relu
          da[h] = s * mask[idx] * (yb[idx] > 0.0 ? 1.0 : 0.0);
        }
      }
      std::fill(g_gamma.begin(), g_gamma.end(), 0.0);
      std::fill(g_beta.begin(), g_beta.end(), 0.0);
      std::fill(dvar.begin(), dvar.end(), 0.0);
      std::fill(dmean.begin(), dmean.end(), 0.0);
      for (std::size_t h = 0; h < hidden; ++h) {
        double dg = 0.0, db = 0.0, dv = 0.0, dm = 0.0;
        for (std::size_t i = 0; i < nb; ++i) {
          std::size_t idx = i * hidden + h;
          double dy = dact[i * hidden + h];
          dg += dy * xhat[idx];
          db += dy;
          double dxh = dy * par.gamma[h];
          dv += dxh * (h1[idx] - bmean[h]);
          dm += dxh;
        }
        g_gamma[h] = dg;
        g_beta[h] = db;
        dvar[h] = dv * -0.5 * inv_std[h] * inv_std[h] * inv_std[h];
        dmean[h] = -dm * inv_std[h];
      }
      for (std::size_t i = 0; i < nb; ++i) {
        for (std::size_t h = 0; h < hidden; ++h) {
          std::size_t idx = i * hidden + h;
          double dxh = dact[idx] * par.gamma[h];
          dh1[idx] = dxh * inv_std[h] +
                     dvar[h] * 2.0 * (h1[idx] - bmean[h]) / nf + dmean[h] / nf;
        }
      }
      std::fill(g_w1.begin(), g_w1.end(), 0.0);
      std::fill(g_b1.begin(), g_b1.end(), 0.0);
      for (std::size_t i = 0; i < nb; ++i) {
        const double* x = xb.data() + i * input_dim;
        for (std::size_t h = 0; h < hidden; ++h) {
          double g = dh1[i * hidden + h];
          g_b1[h] += g;
          double* grow = g_w1.data() + h * input_dim;
          for (std::size_t d = 0; d < input_dim; ++d) grow[d] += g * x[d];
        }
      }

      ++step;
      adamw_update(par.w1, g_w1, st_w1, cfg.learning_rate, cfg.weight_decay, step);
      adamw_update(par.b1, g_b1, st_b1, cfg.learning_rate, 0.0, step);
      adamw_update(par.gamma, g_gamma, st_gamma, cfg.learning_rate, 0.0, step);
      adamw_update(par.beta, g_beta, st_beta, cfg.learning_rate, 0.0, step);
      adamw_update(par.w2, g_w2, st_w2, cfg.learning_rate, cfg.weight_decay, step);
      adamw_update(par.b2, g_b2, st_b2, cfg.learning_rate, 0.0, step);
    }

    double loss = epoch_loss / epoch_weight;

    // validation macro-F1 decides the checkpoint; with no carved rows the
    // fit rows stand in
    double val_f1;
    {
      std::array<double, kRoleCount> lg{};
      if (!val_idx.empty()) {
        std::vector<Role> pred(val_idx.size());
        for (std::size_t i = 0; i < val_idx.size(); ++i) {
          forward_eval(par, input_dim, hidden,
                       {xs_val.data() + i * input_dim, input_dim}, lg);
          std::size_t bestc = 0;
          for (std::size_t c = 1; c < kRoleCount; ++c) {
            if (lg[c] > lg[bestc]) bestc = c;
          }
          pred[i] = static_cast<Role>(bestc);
        }
        val_f1 = macro_f1_of(y_val, pred);
      } else {
        std::vector<Role> truth(n_fit), pred(n_fit);
        for (std::size_t i = 0; i < n_fit; ++i) {
          truth[i] = static_cast<Role>(y_fit[i]);
          forward_eval(par, input_dim, hidden,
                       {xs_fit.data() + i * input_dim, input_dim}, lg);
          std::size_t bestc = 0;
          for (std::size_t c = 1; c < kRoleCount; ++c) {
            if (lg[c] > lg[bestc]) bestc = c;
          }
          pred[i] = static_cast<Role>(bestc);
        }
        val_f1 = macro_f1_of(truth, pred);
      }
    }

    result.trace.push_back(TrainTraceRow{epoch, loss, val_f1});
    // ties refresh the checkpoint and the patience window: on a plateaued
    // validation score the latest (most trained) matching model wins, and
    // training only stops after `patience` strictly-worse epochs in a row
    if (val_f1 >= best_f1) {
      best_f1 = val_f1;
      best = par;
      best_epoch = epoch;
      stale = 0;
    } else {
      ++stale;
      if (stale >= cfg.patience) break;
    }
  }

  model.w1 = std::move(best.w1);
  model.b1 = std::move(best.b1);
  model.bn_gamma = std::move(best.gamma);
  model.bn_beta = std::move(best.beta);
  model.bn_mean = std::move(best.run_mean);
  model.bn_var = std::move(best.run_var);
  model.w2 = std::move(best.w2);
  model.b2 = std::move(best.b2);
  result.best_epoch = best_epoch;
  return result;
}

Metrics compute_metrics(std::span<const Role> truth,
                        std::span<const Role> predicted) {
  if (truth.size() != predicted.size()) {
    fail(ErrorCode::MisalignedInputs, "truth and prediction sizes differ");
  }
  std::array<std::array<std::size_t, kRoleCount>, kRoleCount> cm{};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    cm[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])] += 1;
  }
  return metrics_from_confusion(cm);
}

Metrics metrics_from_confusion(
    const std::array<std::array<std::size_t, kRoleCount>, kRoleCount>& cm) {
  Metrics m;
  m.confusion = cm;
  std::size_t correct = 0;
  for (std::size_t c = 0; c < kRoleCount; ++c) {
    std::size_t tp = cm[c][c];
    std::size_t row = 0, col = 0;
    for (std::size_t k = 0; k < kRoleCount; ++k) {
      row += cm[c][k];
      col += cm[k][c];
    }
    m.support[c] = row;
    m.total += row;
    correct += tp;
    m.precision[c] = col > 0 ? static_cast<double>(tp) / static_cast<double>(col) : 0.0;
    m.recall[c] = row > 0 ? static_cast<double>(tp) / static_cast<double>(row) : 0.0;
    double pr = m.precision[c] + m.recall[c];
    m.f1[c] = pr > 0.0 ? 2.0 * m.precision[c] * m.recall[c] / pr : 0.0;
  }
  std::size_t present = 0;
  for (std::size_t c = 0; c < kRoleCount; ++c) {
    if (m.support[c] == 0) continue;
    ++present;
    m.macro_precision += m.precision[c];
    m.macro_recall += m.recall[c];
    m.macro_f1 += m.f1[c];
    double w = static_cast<double>(m.support[c]);
    m.weighted_precision += w * m.precision[c];
    m.weighted_recall += w * m.recall[c];
    m.weighted_f1 += w * m.f1[c];
  }
  if (present > 0) {
    m.macro_precision /= static_cast<double>(present);
    m.macro_recall /= static_cast<double>(present);
    m.macro_f1 /= static_cast<double>(present);
  }
  if (m.total > 0) {
    m.weighted_precision /= static_cast<double>(m.total);
    m.weighted_recall /= static_cast<double>(m.total);
    m.weighted_f1 /= static_cast<double>(m.total);
    m.accuracy = static_cast<double>(correct) / static_cast<double>(m.total);
  }
  return m;
}

Metrics evaluate(const MlpModel& model, const std::vector<FeatureRow>& rows,
                 std::span<const std::size_t> test_indices) {
  if (test_indices.empty()) {
    fail(ErrorCode::EmptyTest, "test split is empty");
  }
  std::vector<Role> truth, pred;
  truth.reserve(test_indices.size());
  pred.reserve(test_indices.size());
  for (std::size_t i : test_indices) {
    if (!rows[i].label) {
      fail(ErrorCode::MisalignedInputs, "unlabeled row in test set");
    }
    truth.push_back(*rows[i].label);
    pred.push_back(model.predict(rows[i].x));
  }
  return compute_metrics(truth, pred);
}

Role majority_role(const std::vector<FeatureRow>& rows,
                   std::span<const std::size_t> indices) {
  std::array<std::size_t, kRoleCount> counts{};
  for (std::size_t i : indices) {
    if (rows[i].label) counts[static_cast<std::size_t>(*rows[i].label)] += 1;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < kRoleCount; ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return static_cast<Role>(best);
}

namespace {

void put_vector(std::ostringstream& out, const char* name,
                const std::vector<double>& v) {
  out << name;
  for (double x : v) out << ' ' << format_double(x);
  out << '\n';
}

}  // namespace

void save_model(const std::string& path, const MlpModel& model) {
  std::ostringstream out;
  out << "poincavec_model v1\n";
  out << "ablation " << (model.ablation.use_hier ? 1 : 0) << ' '
      << (model.ablation.use_walk ? 1 : 0) << '\n';
  out << "layout " << model.layout.ball_dim << ' ' << model.layout.walk_dim
      << ' ' << model.layout.hier_dim << '\n';
  out << "dims " << model.input_dim << ' ' << model.hidden << ' ' << kRoleCount
      << '\n';
  out << "dropout " << format_double(model.dropout) << '\n';
  put_vector(out, "scaler_mean", model.scaler.mean);
  put_vector(out, "scaler_scale", model.scaler.scale);
  put_vector(out, "w1", model.w1);
  put_vector(out, "b1", model.b1);
  put_vector(out, "bn_gamma", model.bn_gamma);
  put_vector(out, "bn_beta", model.bn_beta);
  put_vector(out, "bn_mean", model.bn_mean);
  put_vector(out, "bn_var", model.bn_var);
  put_vector(out, "w2", model.w2);
  put_vector(out, "b2", model.b2);
  write_text_file(path, out.str());
}

namespace {

std::vector<double> take_vector(std::istringstream& line, std::size_t expect,
                                const std::string& path, const char* name) {
  std::vector<double> v;
  v.reserve(expect);
  std::string tok;
  while (line >> tok) {
    auto x = parse_double(tok);
    if (!x) {
      fail(ErrorCode::BadModelFile,
           path + ": bad number in section " + name);
    }
    v.push_back(*x);
  }
  if (v.size() != expect) {
    fail(ErrorCode::BadModelFile,
         path + ": section " + name + " has wrong length");
  }
  return v;
}

}  // namespace

MlpModel load_model(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "poincavec_model v1") {
    fail(ErrorCode::BadModelFile, path + ": unrecognized model header");
  }
  MlpModel model;
  std::map<std::string, std::string> sections;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto space = line.find(' ');
    if (space == std::string::npos) {
      fail(ErrorCode::BadModelFile, path + ": malformed line");
    }
    sections[line.substr(0, space)] = line.substr(space + 1);
  }
  auto need = [&](const char* name) -> std::istringstream {
    auto it = sections.find(name);
    if (it == sections.end()) {
      fail(ErrorCode::BadModelFile,
           path + ": missing section " + std::string(name));
    }
    return std::istringstream(it->second);
  };
  {
    auto s = need("ablation");
    int h = 0, w = 0;
    if (!(s >> h >> w)) fail(ErrorCode::BadModelFile, path + ": bad ablation");
    model.ablation.use_hier = h != 0;
    model.ablation.use_walk = w != 0;
  }
  {
    auto s = need("layout");
    if (!(s >> model.layout.ball_dim >> model.layout.walk_dim >>
          model.layout.hier_dim)) {
      fail(ErrorCode::BadModelFile, path + ": bad layout");
    }
  }
  {
    auto s = need("dims");
    std::size_t classes = 0;
    if (!(s >> model.input_dim >> model.hidden >> classes) ||
        classes != kRoleCount) {
      fail(ErrorCode::BadModelFile, path + ": bad dims");
    }
    if (model.input_dim != model.layout.total()) {
      fail(ErrorCode::BadModelFile, path + ": layout does not add up");
    }
  }
  {
    auto s = need("dropout");
    std::string tok;
    s >> tok;
    auto x = parse_double(tok);
    if (!x) fail(ErrorCode::BadModelFile, path + ": bad dropout");
    model.dropout = *x;
  }
  auto grab = [&](const char* name, std::size_t expect) {
    auto s = need(name);
    return take_vector(s, expect, path, name);
  };
  model.scaler.mean = grab("scaler_mean", model.input_dim);
  model.scaler.scale = grab("scaler_scale", model.input_dim);
  model.w1 = grab("w1", model.hidden * model.input_dim);
  model.b1 = grab("b1", model.hidden);
  model.bn_gamma = grab("bn_gamma", model.hidden);
  model.bn_beta = grab("bn_beta", model.hidden);
  model.bn_mean = grab("bn_mean", model.hidden);
  model.bn_var = grab("bn_var", model.hidden);
  model.w2 = grab("w2", kRoleCount * model.hidden);
  model.b2 = grab("b2", kRoleCount);
  return model;
}

void write_predictions_csv(const std::string& path,
                           const std::vector<FeatureRow>& rows,
                           const MlpModel& model) {
  CsvWriter w(path);
  w.row({"node", "predicted_role", "prob_Trader", "prob_Bot", "prob_Treasury",
         "prob_Other"});
  for (const auto& row : rows) {
    auto probs = model.predict_probs(row.x);
    std::size_t best = 0;
    for (std::size_t c = 1; c < kRoleCount; ++c) {
      if (probs[c] > probs[best]) best = c;
    }
    w.row({row.node, to_string(static_cast<Role>(best)),
           format_double(probs[0]), format_double(probs[1]),
           format_double(probs[2]), format_double(probs[3])});
  }
}

void write_metrics_csv(const std::string& path, const Metrics& metrics,
                       const Metrics* majority_baseline) {
  CsvWriter w(path);
  w.row({"scope", "precision", "recall", "f1", "accuracy", "support"});
  w.row({"macro", format_double(metrics.macro_precision),
         format_double(metrics.macro_recall), format_double(metrics.macro_f1),
         format_double(metrics.accuracy), std::to_string(metrics.total)});
  w.row({"weighted", format_double(metrics.weighted_precision),
         format_double(metrics.weighted_recall),
         format_double(metrics.weighted_f1), format_double(metrics.accuracy),
         std::to_string(metrics.total)});
  for (std::size_t c = 0; c < kRoleCount; ++c) {
    w.row({std::string("class_") + to_string(static_cast<Role>(c)),
           format_double(metrics.precision[c]), format_double(metrics.recall[c]),
           format_double(metrics.f1[c]), "", std::to_string(metrics.support[c])});
  }
  if (majority_baseline) {
    w.row({"majority_baseline", format_double(majority_baseline->macro_precision),
           format_double(majority_baseline->macro_recall),
           format_double(majority_baseline->macro_f1),
           format_double(majority_baseline->accuracy),
           std::to_string(majority_baseline->total)});
  }
}

void write_confusion_csv(const std::string& path, const Metrics& metrics) {
  CsvWriter w(path);
  w.row({"truth_pred", "Trader", "Bot", "Treasury", "Other"});
  for (std::size_t t = 0; t < kRoleCount; ++t) {
    w.row({to_string(static_cast<Role>(t)),
           std::to_string(metrics.confusion[t][0]),
           std::to_string(metrics.confusion[t][1]),
           std::to_string(metrics.confusion[t][2]),
           std::to_string(metrics.confusion[t][3])});
  }
}

}  // namespace poincavec::roleclf
