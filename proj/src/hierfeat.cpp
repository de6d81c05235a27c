#include "poincavec/hierfeat.hpp"

#include <algorithm>
#include <cmath>

#include "poincavec/csv.hpp"
#include "poincavec/errors.hpp"
#include "poincavec/geometry.hpp"

namespace poincavec::hierfeat {

std::array<double, kFeatureCount> HierFeatureVector::as_array() const {
  return {r_self,  mean_r,  stddev_r, frac_deeper, frac_shallower, min_rel,
          max_rel, hist[0], hist[1],  hist[2],     hist[3]};
}

namespace {

// nodes within k hops of v, v excluded
std::vector<NodeId> k_hop_neighborhood(const TxGraph& graph, NodeId v,
                                       std::size_t k_hop,
                                       std::vector<std::int32_t>& visit_mark,
                                       std::int32_t stamp) {
  std::vector<NodeId> frontier{v};
  std::vector<NodeId> out;
  visit_mark[v] = stamp;
  for (std::size_t hop = 0; hop < k_hop && !frontier.empty(); ++hop) {
    std::vector<NodeId> next;
    for (NodeId u : frontier) {
      for (NodeId w : graph.neighbors[u]) {
        if (visit_mark[w] == stamp) continue;
        visit_mark[w] = stamp;
        next.push_back(w);
        out.push_back(w);
      }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace

std::vector<HierFeatureVector> hier_features(const embed::EmbeddingMatrix& emb,
                                             const TxGraph& graph,
                                             std::size_t k_hop) {
  if (emb.node_count() != graph.node_count()) {
    fail(ErrorCode::MisalignedInputs,
         "embedding and graph disagree on node count");
  }
  const std::size_t n = graph.node_count();
  std::vector<double> radii(n);
  for (std::size_t i = 0; i < n; ++i) {
    radii[i] = geometry::radius(emb.row(i));
  }

  std::vector<HierFeatureVector> out(n);
  std::vector<std::int32_t> visit_mark(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    HierFeatureVector& f = out[v];
    f.r_self = radii[v];
    auto hood = k_hop_neighborhood(graph, static_cast<NodeId>(v), k_hop,
                                   visit_mark, static_cast<std::int32_t>(v));
    if (hood.empty()) continue;

    const double m = static_cast<double>(hood.size());
    double sum = 0.0;
    for (NodeId u : hood) sum += radii[u];
    f.mean_r = sum / m;
    double sq = 0.0;
    std::size_t deeper = 0;
    std::size_t shallower = 0;
    f.min_rel = radii[hood[0]] - f.r_self;
    f.max_rel = f.min_rel;
    std::array<std::size_t, 4> counts{};
    for (NodeId u : hood) {
      double r = radii[u];
      sq += (r - f.mean_r) * (r - f.mean_r);
      double rel = r - f.r_self;
      if (rel > 0.0) ++deeper;
      if (rel < 0.0) ++shallower;
      f.min_rel = std::min(f.min_rel, rel);
      f.max_rel = std::max(f.max_rel, rel);
      double clamped = std::clamp(rel, -1.0, 1.0);
      auto bin = static_cast<std::size_t>(
          std::min(3.0, std::floor((clamped + 1.0) / 0.5)));
      counts[bin] += 1;
    }
    f.stddev_r = std::sqrt(sq / m);
    f.frac_deeper = static_cast<double>(deeper) / m;
    f.frac_shallower = static_cast<double>(shallower) / m;
    for (std::size_t b = 0; b < 4; ++b) {
      f.hist[b] = static_cast<double>(counts[b]) / m;
    }
  }
  return out;
}

void write_hier_csv(const std::string& path, const TxGraph& graph,
                    const std::vector<HierFeatureVector>& feats) {
  CsvWriter w(path);
  w.row({"node", "r_self", "mu", "sigma", "alpha", "beta", "delta", "Delta",
         "b0", "b1", "b2", "b3"});
  for (std::size_t v = 0; v < feats.size(); ++v) {
    auto a = feats[v].as_array();
    std::vector<std::string> fields;
    fields.reserve(a.size() + 1);
    fields.push_back(graph.addresses[v]);
    for (double x : a) fields.push_back(format_double(x));
    w.row(fields);
  }
}

std::vector<HierFeatureVector> read_hier_csv(
    const std::string& path, std::vector<std::string>* node_names) {
  CsvTable table = read_csv(path);
  if (table.header.size() != kFeatureCount + 1 || table.header[0] != "node") {
    fail(ErrorCode::MissingColumn, path + ": unexpected header");
  }
  std::vector<HierFeatureVector> out;
  if (node_names) node_names->clear();
  for (const auto& row : table.rows) {
    if (row.size() != kFeatureCount + 1) {
      fail(ErrorCode::MisalignedInputs, path + ": ragged feature row");
    }
    std::array<double, kFeatureCount> a{};
    for (std::size_t t = 0; t < kFeatureCount; ++t) {
      auto x = parse_double(row[t + 1]);
      if (!x) {
        fail(ErrorCode::MisalignedInputs,
             path + ": bad number '" + row[t + 1] + "'");
      }
      a[t] = *x;
    }
    HierFeatureVector f;
    f.r_self = a[0];
    f.mean_r = a[1];
    f.stddev_r = a[2];
    f.frac_deeper = a[3];
    f.frac_shallower = a[4];
    f.min_rel = a[5];
    f.max_rel = a[6];
    f.hist = {a[7], a[8], a[9], a[10]};
    if (node_names) node_names->push_back(row[0]);
    out.push_back(f);
  }
  if (out.empty()) fail(ErrorCode::EmptyFile, path + ": no feature rows");
  return out;
}

}  // namespace poincavec::hierfeat
