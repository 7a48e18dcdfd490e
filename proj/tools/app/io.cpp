#include "io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "config.hpp"
#include "scc/csv.hpp"
#include "scc/types.hpp"

namespace scc::app {
namespace {

using nlohmann::json;

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

bool has_prefix(const std::string& s, std::string_view prefix) { return s.rfind(prefix, 0) == 0; }

json labels_to_json(std::span<const Label> z) {
  json out = json::array();
  for (Label l : z) out.push_back(l + 1);
  return out;
}

std::vector<Label> labels_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw InputError(field + ": expected an array of cluster labels");
  std::vector<Label> z;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<long long>() < 1) throw InputError(field + ": labels must be integers >= 1");
    z.push_back(static_cast<Label>(v.get<long long>() - 1));
  }
  return z;
}

json intervals_to_json(const std::vector<Interval>& v) {
  json out = json::array();
  for (const auto& i : v) out.push_back({i.lower, i.upper});
  return out;
}

std::vector<Interval> intervals_from_json(const json& j) {
  std::vector<Interval> out;
  for (const auto& v : j) out.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  return out;
}

std::vector<Vector> vectors_from_json(const json& j, const std::string& field) {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vector_from_json(j[i], field));
  return out;
}

json vectors_to_json(const std::vector<Vector>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(to_json(x));
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

CompositionalDataset read_dataset_csv(const fs::path& path) {
  const CsvTable t = read_csv_file(path.string());
  const std::size_t id_col = t.column("id");
  const std::size_t y_col = t.column("y");
  std::vector<std::size_t> comp_cols, cov_cols;
  for (int k = 1;; ++k) {
    auto it = std::find(t.header.begin(), t.header.end(), "comp_" + std::to_string(k));
    if (it == t.header.end()) break;
    comp_cols.push_back(static_cast<std::size_t>(it - t.header.begin()));
  }
  for (int k = 1;; ++k) {
    auto it = std::find(t.header.begin(), t.header.end(), "cov_" + std::to_string(k));
    if (it == t.header.end()) break;
    cov_cols.push_back(static_cast<std::size_t>(it - t.header.begin()));
  }
  for (const auto& h : t.header) {
    const bool known = h == "id" || h == "y" ||
                       (has_prefix(h, "comp_") && std::find_if(comp_cols.begin(), comp_cols.end(), [&](auto c) {
                                                    return t.header[c] == h;
                                                  }) != comp_cols.end()) ||
                       (has_prefix(h, "cov_") && std::find_if(cov_cols.begin(), cov_cols.end(), [&](auto c) {
                                                   return t.header[c] == h;
                                                 }) != cov_cols.end());
    if (!known) throw InputError(t.source + ":1: unexpected column '" + h + "'");
  }
  if (comp_cols.size() < 2) throw InputError(t.source + ":1: need at least comp_1 and comp_2");
  if (t.rows.empty()) throw InputError(t.source + ": no data rows");

  const auto n = static_cast<Eigen::Index>(t.rows.size());
  std::vector<std::string> ids;
  Vector y(n);
  Matrix comp(n, static_cast<Eigen::Index>(comp_cols.size()));
  Matrix cov(n, static_cast<Eigen::Index>(cov_cols.size()));
  std::set<std::string> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    const std::string& id = t.rows[r][id_col];
    if (id.empty() || !seen.insert(id).second) {
      throw InputError(t.source + ":" + std::to_string(t.line_numbers[r]) + ": empty or duplicate id '" + id + "'");
    }
    ids.push_back(id);
    y(i) = t.number(r, y_col);
    for (std::size_t k = 0; k < comp_cols.size(); ++k) comp(i, static_cast<Eigen::Index>(k)) = t.number(r, comp_cols[k]);
    for (std::size_t k = 0; k < cov_cols.size(); ++k) cov(i, static_cast<Eigen::Index>(k)) = t.number(r, cov_cols[k]);
  }
  CompositionMatrix composition = [&] {
    try {
      return CompositionMatrix::from_proportions(comp);
    } catch (const std::invalid_argument& e) {
      throw InputError(t.source + ": " + e.what());
    }
  }();
  CompositionalDataset data{std::move(ids), std::move(y), std::move(composition), std::move(cov)};
  data.validate();
  return data;
}

void write_dataset_csv(const fs::path& path, const CompositionalDataset& data) {
  std::ofstream out = open_out(path);
  out << "id,y";
  for (Eigen::Index k = 0; k < data.composition.parts(); ++k) out << ",comp_" << k + 1;
  for (Eigen::Index k = 0; k < data.covariates.cols(); ++k) out << ",cov_" << k + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    out << data.ids[static_cast<std::size_t>(i)] << ',' << format_double(data.y(i));
    for (Eigen::Index k = 0; k < data.composition.parts(); ++k) out << ',' << format_double(data.composition.values()(i, k));
    for (Eigen::Index k = 0; k < data.covariates.cols(); ++k) out << ',' << format_double(data.covariates(i, k));
    out << '\n';
  }
}

std::vector<Edge> read_edge_list_csv(const fs::path& path) {
  const CsvTable t = read_csv_file(path.string());
  const std::size_t s = t.column("src");
  const std::size_t d = t.column("dst");
  std::vector<Edge> edges;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r][s].empty() || t.rows[r][d].empty()) {
      throw InputError(t.source + ":" + std::to_string(t.line_numbers[r]) + ": empty endpoint");
    }
    edges.emplace_back(t.rows[r][s], t.rows[r][d]);
  }
  return edges;
}

void write_edge_list_csv(const fs::path& path, std::span<const Edge> edges) {
  std::ofstream out = open_out(path);
  out << "src,dst\n";
  for (const auto& [a, b] : edges) out << a << ',' << b << '\n';
}

NamedPartition read_partition_csv(const fs::path& path) {
  const CsvTable t = read_csv_file(path.string());
  const std::size_t id_col = t.column("id");
  const std::size_t c_col = t.column("cluster");
  NamedPartition p;
  p.name = path.string();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double c = t.number(r, c_col);
    if (c < 1 || c != static_cast<double>(static_cast<Label>(c))) {
      throw InputError(t.source + ":" + std::to_string(t.line_numbers[r]) + ": cluster must be an integer >= 1");
    }
    p.ids.push_back(t.rows[r][id_col]);
    p.labels.push_back(static_cast<Label>(c) - 1);
  }
  if (p.ids.empty()) throw InputError(t.source + ": no data rows");
  return p;
}

void write_partition_csv(const fs::path& path, std::span<const std::string> ids, std::span<const Label> labels) {
  std::ofstream out = open_out(path);
  out << "id,cluster\n";
  for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ',' << labels[i] + 1 << '\n';
}

SpatialGraph align_graph(const SpatialGraph& graph, const std::vector<std::string>& ids) {
  std::vector<std::string> missing_in_graph, missing_in_data;
  const std::set<std::string> id_set(ids.begin(), ids.end());
  for (const auto& id : ids) {
    if (!graph.index_of(id)) missing_in_graph.push_back(id);
  }
  for (const auto& v : graph.labels()) {
    if (!id_set.count(v)) missing_in_data.push_back(v);
  }
  if (!missing_in_graph.empty() || !missing_in_data.empty()) {
    std::ostringstream msg;
    msg << "data and adjacency ids differ;";
    if (!missing_in_graph.empty()) {
      msg << " not in adjacency:";
      for (const auto& s : missing_in_graph) msg << ' ' << s;
      msg << ';';
    }
    if (!missing_in_data.empty()) {
      msg << " not in data:";
      for (const auto& s : missing_in_data) msg << ' ' << s;
    }
    throw InputError(msg.str());
  }
  const auto edges = graph.edges();
  return SpatialGraph::from_edge_list(edges, ids);
}

void write_trace_jsonl(const fs::path& path, const ChainTrace& trace) {
  std::ofstream out = open_out(path);
  for (std::size_t m = 0; m < trace.snapshots.size(); ++m) {
    const auto& snap = trace.snapshots[m];
    json rec;
    rec["iteration"] = snap.iteration;
    rec["z"] = labels_to_json(snap.state.z);
    rec["beta"] = vectors_to_json(snap.state.betas);
    rec["sigma2"] = snap.state.sigma2s;
    rec["eta"] = to_json(snap.state.eta);
    rec["loglik"] = to_json(Vector(trace.loglik.row(static_cast<Eigen::Index>(m)).transpose()));
    out << rec.dump() << '\n';
  }
}

ChainTrace read_trace_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  ChainTrace trace;
  std::vector<Vector> loglik;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    try {
      const json rec = json::parse(line);
      Snapshot snap;
      snap.iteration = rec.at("iteration").get<int>();
      snap.state.z = labels_from_json(rec.at("z"), where + ": z");
      snap.state.betas = vectors_from_json(rec.at("beta"), where + ": beta");
      snap.state.sigma2s = rec.at("sigma2").get<std::vector<double>>();
      snap.state.eta = vector_from_json(rec.at("eta"), where + ": eta");
      loglik.push_back(vector_from_json(rec.at("loglik"), where + ": loglik"));
      trace.snapshots.push_back(std::move(snap));
    } catch (const json::exception& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  const auto n = loglik.empty() ? 0 : loglik.front().size();
  trace.loglik.resize(static_cast<Eigen::Index>(loglik.size()), n);
  for (std::size_t m = 0; m < loglik.size(); ++m) {
    if (loglik[m].size() != n) throw InputError(path.string() + ": loglik length varies between records");
    trace.loglik.row(static_cast<Eigen::Index>(m)) = loglik[m].transpose();
  }
  return trace;
}

json to_json(const FitReport& r) {
  const PosteriorSummary& s = r.summary;
  json clusters = json::array();
  for (std::size_t c = 0; c < s.beta_hat.size(); ++c) {
    std::size_t size = static_cast<std::size_t>(std::count(s.z_hat.begin(), s.z_hat.end(), static_cast<Label>(c)));
    clusters.push_back({
        {"cluster", c + 1},
        {"size", size},
        {"beta", to_json(s.beta_hat[c])},
        {"beta_tilde", to_json(s.beta_tilde_hat[c])},
        {"sigma2", s.sigma2_hat[c]},
        {"sigma2_interval", {s.sigma2_interval[c].lower, s.sigma2_interval[c].upper}},
    });
  }
  json grid = json::array();
  for (std::size_t j = 0; j < r.lambda_grid.size(); ++j) grid.push_back({{"lambda", r.lambda_grid[j]}, {"lpml", r.lpml_grid[j]}});
  return {
      {"lambda", r.lambda},
      {"lpml", s.lpml},
      {"grid", grid},
      {"dahl_draw", s.m_best},
      {"dahl_iteration", s.iteration},
      {"k_hat", s.k_hat},
      {"ids", r.ids},
      {"z_hat", labels_to_json(s.z_hat)},
      {"clusters", clusters},
      {"eta", to_json(s.eta_hat)},
      {"eta_interval", intervals_to_json(s.eta_interval)},
  };
}

FitReport fit_report_from_json(const json& j) {
  try {
    FitReport r;
    PosteriorSummary& s = r.summary;
    r.lambda = j.at("lambda").get<double>();
    s.lpml = j.at("lpml").get<double>();
    for (const auto& g : j.at("grid")) {
      r.lambda_grid.push_back(g.at("lambda").get<double>());
      r.lpml_grid.push_back(g.at("lpml").get<double>());
    }
    s.m_best = j.at("dahl_draw").get<std::size_t>();
    s.iteration = j.at("dahl_iteration").get<int>();
    s.k_hat = j.at("k_hat").get<std::size_t>();
    r.ids = j.at("ids").get<std::vector<std::string>>();
    s.z_hat = labels_from_json(j.at("z_hat"), "summary z_hat");
    for (const auto& c : j.at("clusters")) {
      s.beta_hat.push_back(vector_from_json(c.at("beta"), "summary beta"));
      s.beta_tilde_hat.push_back(vector_from_json(c.at("beta_tilde"), "summary beta_tilde"));
      s.sigma2_hat.push_back(c.at("sigma2").get<double>());
      s.sigma2_interval.push_back({c.at("sigma2_interval").at(0).get<double>(), c.at("sigma2_interval").at(1).get<double>()});
    }
    s.eta_hat = vector_from_json(j.at("eta"), "summary eta");
    s.eta_interval = intervals_from_json(j.at("eta_interval"));
    if (r.ids.size() != s.z_hat.size()) throw InputError("summary: ids and z_hat differ in length");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("summary: ") + e.what());
  }
}

json to_json(const Truth& t) {
  return {
      {"ids", t.ids},
      {"z", labels_to_json(t.labels)},
      {"beta_tilde", to_json(t.beta_tilde)},
      {"eta", to_json(t.eta)},
  };
}

Truth truth_from_json(const json& j) {
  try {
    Truth t;
    t.ids = j.at("ids").get<std::vector<std::string>>();
    t.labels = labels_from_json(j.at("z"), "truth z");
    t.beta_tilde = matrix_from_json(j.at("beta_tilde"), "truth beta_tilde");
    t.eta = vector_from_json(j.at("eta"), "truth eta");
    if (t.ids.size() != t.labels.size() || static_cast<std::size_t>(t.beta_tilde.rows()) != t.ids.size()) {
      throw InputError("truth: ids, z and beta_tilde differ in length");
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("truth: ") + e.what());
  }
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
}

}  // namespace scc::app
