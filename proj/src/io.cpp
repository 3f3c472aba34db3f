#include "hwg/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace hwg {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw data_error(path + ": " + e.what());
  }
  return j;
}

void write_json_atomic(const std::string& path, const nlohmann::json& j) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw data_error("cannot write '" + tmp + "'");
    out << j.dump(2) << '\n';
    if (!out) throw data_error("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

namespace {

std::string hub_method_name(HubSet::Method m) {
  switch (m) {
    case HubSet::Method::threshold: return "threshold";
    case HubSet::Method::kmeans: return "kmeans";
    case HubSet::Method::known: return "known";
    case HubSet::Method::planted: return "planted";
  }
  return "?";
}

HubSet::Method hub_method_from_name(const std::string& s) {
  if (s == "threshold") return HubSet::Method::threshold;
  if (s == "kmeans") return HubSet::Method::kmeans;
  if (s == "known") return HubSet::Method::known;
  if (s == "planted") return HubSet::Method::planted;
  throw data_error("unknown hub method '" + s + "'");
}

nlohmann::json finite_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

}  // namespace

nlohmann::json hubset_to_json(const HubSet& h) {
  nlohmann::json j;
  std::vector<std::size_t> one_based;
  for (std::size_t i : h.indices) one_based.push_back(i + 1);
  j["indices"] = one_based;
  j["method"] = hub_method_name(h.method);
  return j;
}

HubSet hubset_from_json(const nlohmann::json& j) {
  HubSet h;
  for (const auto& v : j.at("indices")) {
    std::size_t idx = v.get<std::size_t>();
    if (idx == 0) throw data_error("hub indices are 1-based");
    h.indices.push_back(idx - 1);
  }
  h.method = hub_method_from_name(j.value("method", "known"));
  std::sort(h.indices.begin(), h.indices.end());
  h.indices.erase(std::unique(h.indices.begin(), h.indices.end()), h.indices.end());
  return h;
}

nlohmann::json fit_summary_json(const FitResult& fit) {
  nlohmann::json j;
  j["objective"] = fit.objective;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["kkt_violation"] = fit.kkt_violation;
  j["jitter_used"] = fit.jitter_used;
  j["edges"] = edge_count(fit.theta);
  return j;
}

nlohmann::json selection_report_json(const SelectionReport& report) {
  nlohmann::json j;
  j["pair"] = report.pair;
  j["chosen"] = report.chosen;
  j["note"] = report.note;
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& pt : report.points) {
    nlohmann::json e;
    e["lambda1"] = pt.lambda1;
    e["lambda2"] = finite_or_null(pt.lambda2);
    e["bic"] = pt.bic;
    e["objective"] = pt.objective;
    e["edges"] = pt.edges;
    e["converged"] = pt.converged;
    pts.push_back(e);
  }
  j["points"] = pts;
  return j;
}

void write_selection_path_csv(const std::string& path, const SelectionReport& report) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  out << "lambda1,lambda2,bic,objective,edges,converged,chosen\n";
  for (std::size_t k = 0; k < report.points.size(); ++k) {
    const auto& pt = report.points[k];
    out << format_double(pt.lambda1) << ','
        << (std::isfinite(pt.lambda2) ? format_double(pt.lambda2) : "") << ','
        << format_double(pt.bic) << ',' << format_double(pt.objective) << ','
        << pt.edges << ',' << (pt.converged ? 1 : 0) << ','
        << (k == report.chosen ? 1 : 0) << '\n';
  }
}

void write_edge_list_tsv(const std::string& path, const SymMatrix& theta,
                         const std::vector<std::string>& labels,
                         const SymMatrix* reproducibility) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  bool named = labels.size() == theta.dim();
  out << "i\tj";
  if (named) out << "\tname_i\tname_j";
  out << "\tvalue";
  if (reproducibility) out << "\treproducibility";
  out << '\n';
  for (std::size_t j = 0; j < theta.dim(); ++j)
    for (std::size_t i = 0; i < j; ++i) {
      if (!is_nonzero(theta(i, j))) continue;
      out << (i + 1) << '\t' << (j + 1);
      if (named) out << '\t' << labels[i] << '\t' << labels[j];
      out << '\t' << format_double(theta(i, j));
      if (reproducibility) out << '\t' << format_double((*reproducibility)(i, j));
      out << '\n';
    }
}

nlohmann::json stability_json(const StabilityResult& s,
                              const std::vector<std::string>& labels) {
  nlohmann::json j;
  j["replicates"] = s.replicates;
  j["threshold"] = s.threshold;
  j["failures"] = s.failures;
  nlohmann::json edges = nlohmann::json::array();
  bool named = labels.size() == s.proportion.dim();
  for (auto [i, jdx] : s.stable_edges) {
    nlohmann::json e;
    e["i"] = i + 1;
    e["j"] = jdx + 1;
    if (named) {
      e["name_i"] = labels[i];
      e["name_j"] = labels[jdx];
    }
    e["proportion"] = s.proportion(i, jdx);
    edges.push_back(e);
  }
  j["stable_edges"] = edges;
  return j;
}

nlohmann::json permtest_json(const PermTestResult& r,
                             const std::vector<std::string>& labels) {
  nlohmann::json j;
  j["permutations"] = r.permutations;
  j["failures"] = r.failures;
  j["density"] = {{"observed_diff", r.obs_density}, {"p_value", r.p_density}};
  j["global_clustering"] = {{"observed_diff", r.obs_clustering},
                            {"p_value", r.p_clustering}};
  j["avg_path_length"] = {{"observed_diff", r.apl_defined ? nlohmann::json(r.obs_apl)
                                                          : nlohmann::json(nullptr)},
                          {"p_value", finite_or_null(r.p_apl)},
                          {"defined", r.apl_defined}};
  auto per_node = [&](const std::vector<double>& obs, const std::vector<double>& pv) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < obs.size(); ++i) {
      nlohmann::json e;
      e["node"] = i + 1;
      if (labels.size() == obs.size()) e["name"] = labels[i];
      e["observed_diff"] = obs[i];
      e["p_value"] = pv[i];
      arr.push_back(e);
    }
    return arr;
  };
  j["degree_centrality"] = per_node(r.obs_degree_diff, r.p_degree);
  j["betweenness"] = per_node(r.obs_betweenness_diff, r.p_betweenness);
  return j;
}

namespace {

void write_cell(std::ofstream& out, const AggregateCell& c) {
  out << ',' << format_double(c.mean) << ',' << (c.se_defined ? format_double(c.se) : "NA");
}

}  // namespace

void write_aggregate_csv(const std::string& path, const ExperimentResult& result) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  out << "method,replicates,tpr_mean,tpr_se,tnr_mean,tnr_se,hub_edge_pct_mean,"
         "hub_edge_pct_se,hub_node_pct_mean,hub_node_pct_se,nonhub_node_pct_mean,"
         "nonhub_node_pct_se,edges_mean,edges_se,frobenius_mean,frobenius_se\n";
  for (const auto& row : result.rows) {
    out << method_to_string(row.method) << ',' << row.replicates_used;
    write_cell(out, row.tpr);
    write_cell(out, row.tnr);
    write_cell(out, row.hub_edge_pct);
    write_cell(out, row.hub_node_pct);
    write_cell(out, row.nonhub_node_pct);
    write_cell(out, row.edges);
    write_cell(out, row.frobenius);
    out << '\n';
  }
}

void write_replicate_log_csv(const std::string& path, const ExperimentResult& result) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  out << "replicate,method,ok,error,tpr,tnr,hub_edge_pct,hub_node_pct,"
         "nonhub_node_pct,edges,frobenius,frobenius_full,kkt,lambda1,lambda2,"
         "data_checksum\n";
  for (const auto& rec : result.log) {
    out << rec.replicate << ',' << method_to_string(rec.method) << ','
        << (rec.ok ? 1 : 0) << ',' << '"' << rec.error << '"' << ',';
    if (rec.ok) {
      out << format_double(rec.metrics.tpr) << ',' << format_double(rec.metrics.tnr)
          << ',' << format_double(rec.metrics.hub_edge_pct) << ','
          << format_double(rec.metrics.hub_node_pct) << ','
          << format_double(rec.metrics.nonhub_node_pct) << ','
          << format_double(rec.metrics.edge_count) << ','
          << format_double(rec.metrics.frobenius) << ','
          << format_double(rec.metrics.frobenius_full) << ',' << format_double(rec.kkt)
          << ',' << format_double(rec.lambda1) << ',' << format_double(rec.lambda2);
    } else {
      out << ",,,,,,,,,,";
    }
    out << ',' << rec.data_checksum << '\n';
  }
}

void write_rate_csv(const std::string& path, const std::vector<RatePoint>& points) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  out << "n,mean_frobenius_error,mean_zero_fraction,replicates\n";
  for (const auto& pt : points)
    out << pt.n << ',' << format_double(pt.mean_frobenius_error) << ','
        << format_double(pt.mean_zero_fraction) << ',' << pt.replicates_used << '\n';
}

}  // namespace hwg
