/*
 * Copyright (c) 2026, the delkm authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "delkm/serialize.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "delkm/errors.hpp"

namespace delkm {

using nlohmann::json;

std::uint64_t dataset_fingerprint(const DataMatrix& data) {
  constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
  constexpr std::uint64_t kPrime = 0x00000100000001b3ULL;
  std::uint64_t h = kOffset;
  auto feed = [&](const void* bytes, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < size; ++i) {
      h ^= p[i];
      h *= kPrime;
    }
  };
  const std::uint64_t dim = data.dim();
  feed(&dim, sizeof(dim));
  data.for_each_live([&](RowId id, const double* p) {
    const std::uint64_t id64 = id;
    feed(&id64, sizeof(id64));
    feed(p, data.dim() * sizeof(double));
  });
  return h;
}

namespace {

json centroids_to_json(const CentroidSet& c) {
  return json{{"dim", c.dim}, {"values", c.values}};
}

CentroidSet centroids_from_json(const json& j) {
  CentroidSet c;
  c.dim = j.at("dim").get<std::size_t>();
  c.values = j.at("values").get<std::vector<double>>();
  return c;
}

json qk_to_json(const QkModel& m) {
  json j;
  j["params"] = {{"k", m.params.k},
                 {"max_iters", m.params.max_iters},
                 {"gamma", m.params.gamma},
                 {"epsilon", m.params.epsilon}};
  j["final_centroids"] = centroids_to_json(m.final_centroids);
  j["seed_rows"] = m.seed_rows;
  j["seed_points"] = m.seed_points;
  j["initial_loss"] = m.initial_loss;
  j["accepted_count"] = m.accepted_count;
  j["training_seed"] = m.training_seed;
  j["retrain_count"] = m.retrain_count;
  j["n_live"] = m.n_live;
  j["dim"] = m.dim;
  json iters = json::array();
  for (const QkIterationRecord& rec : m.iterations) {
    json reinits = json::array();
    for (const QkReinitEvent& ev : rec.reinits)
      reinits.push_back({{"cluster", ev.cluster}, {"row", ev.row}});
    iters.push_back({{"raw_means", rec.raw_means},
                     {"analog", rec.analog},
                     {"phase", rec.phase},
                     {"quantized", rec.quantized},
                     {"source_sizes", rec.source_sizes},
                     {"new_sizes", rec.new_sizes},
                     {"loss", rec.loss},
                     {"accepted", rec.accepted},
                     {"reinits", std::move(reinits)}});
  }
  j["iterations"] = std::move(iters);
  return j;
}

QkModel qk_from_json(const json& j) {
  QkModel m;
  const json& p = j.at("params");
  m.params.k = p.at("k").get<std::size_t>();
  m.params.max_iters = p.at("max_iters").get<std::size_t>();
  m.params.gamma = p.at("gamma").get<double>();
  m.params.epsilon = p.at("epsilon").get<double>();
  m.final_centroids = centroids_from_json(j.at("final_centroids"));
  m.seed_rows = j.at("seed_rows").get<std::vector<RowId>>();
  m.seed_points = j.at("seed_points").get<std::vector<double>>();
  m.initial_loss = j.at("initial_loss").get<double>();
  m.accepted_count = j.at("accepted_count").get<std::size_t>();
  m.training_seed = j.at("training_seed").get<std::uint64_t>();
  m.retrain_count = j.at("retrain_count").get<std::uint64_t>();
  m.n_live = j.at("n_live").get<std::size_t>();
  m.dim = j.at("dim").get<std::size_t>();
  for (const json& ji : j.at("iterations")) {
    QkIterationRecord rec;
    rec.raw_means = ji.at("raw_means").get<std::vector<double>>();
    rec.analog = ji.at("analog").get<std::vector<double>>();
    rec.phase = ji.at("phase").get<std::vector<double>>();
    rec.quantized = ji.at("quantized").get<std::vector<double>>();
    rec.source_sizes = ji.at("source_sizes").get<std::vector<std::size_t>>();
    rec.new_sizes = ji.at("new_sizes").get<std::vector<std::size_t>>();
    rec.loss = ji.at("loss").get<double>();
    rec.accepted = ji.at("accepted").get<bool>();
    for (const json& je : ji.at("reinits"))
      rec.reinits.push_back(QkReinitEvent{je.at("cluster").get<std::uint32_t>(),
                                          je.at("row").get<RowId>()});
    m.iterations.push_back(std::move(rec));
  }
  return m;
}

json dc_to_json(const DcModel& m) {
  json j;
  j["params"] = {{"k", m.params.k},
                 {"iters", m.params.iters},
                 {"width", m.params.width},
                 {"height", m.params.height},
                 {"width_from_heuristic", m.params.width_from_heuristic}};
  j["width_requested"] = m.width_requested;
  j["leaf_count"] = m.leaf_count;
  j["training_seed"] = m.training_seed;
  j["retrain_count"] = m.retrain_count;
  j["n_live"] = m.n_live;
  j["dim"] = m.dim;
  json nodes = json::array();
  for (const DcNode& node : m.nodes) {
    nodes.push_back({{"id", node.id},
                     {"level", node.level},
                     {"parent", node.parent},
                     {"children", node.children},
                     {"rows", node.rows},
                     {"centroids", centroids_to_json(node.centroids)},
                     {"epoch", node.epoch},
                     {"seed", node.seed}});
  }
  j["nodes"] = std::move(nodes);
  json scatter = json::array();
  for (RowId id = 0; id < m.leaf_of.size(); ++id)
    if (m.leaf_of[id] >= 0) scatter.push_back({id, m.leaf_of[id]});
  j["leaf_of"] = std::move(scatter);
  j["total_rows"] = m.leaf_of.size();
  return j;
}

DcModel dc_from_json(const json& j) {
  DcModel m;
  const json& p = j.at("params");
  m.params.k = p.at("k").get<std::size_t>();
  m.params.iters = p.at("iters").get<std::size_t>();
  m.params.width = p.at("width").get<std::size_t>();
  m.params.height = p.at("height").get<std::size_t>();
  m.params.width_from_heuristic = p.at("width_from_heuristic").get<bool>();
  m.width_requested = j.at("width_requested").get<std::size_t>();
  m.leaf_count = j.at("leaf_count").get<std::size_t>();
  m.training_seed = j.at("training_seed").get<std::uint64_t>();
  m.retrain_count = j.at("retrain_count").get<std::uint64_t>();
  m.n_live = j.at("n_live").get<std::size_t>();
  m.dim = j.at("dim").get<std::size_t>();
  for (const json& jn : j.at("nodes")) {
    DcNode node;
    node.id = jn.at("id").get<std::uint32_t>();
    node.level = jn.at("level").get<std::uint32_t>();
    node.parent = jn.at("parent").get<std::uint32_t>();
    node.children = jn.at("children").get<std::vector<std::uint32_t>>();
    node.rows = jn.at("rows").get<std::vector<RowId>>();
    node.centroids = centroids_from_json(jn.at("centroids"));
    node.epoch = jn.at("epoch").get<std::uint64_t>();
    node.seed = jn.at("seed").get<std::uint64_t>();
    m.nodes.push_back(std::move(node));
  }
  m.leaf_of.assign(j.at("total_rows").get<std::size_t>(), -1);
  for (const json& je : j.at("leaf_of"))
    m.leaf_of[je.at(0).get<RowId>()] = je.at(1).get<std::int64_t>();
  return m;
}

json baseline_to_json(const LloydModel& m) {
  return json{{"centroids", centroids_to_json(m.centroids)},
              {"k", m.k},
              {"max_iters", m.max_iters},
              {"loss", m.loss},
              {"training_seed", m.training_seed},
              {"retrain_count", m.retrain_count}};
}

LloydModel baseline_from_json(const json& j) {
  LloydModel m;
  m.centroids = centroids_from_json(j.at("centroids"));
  m.k = j.at("k").get<std::size_t>();
  m.max_iters = j.at("max_iters").get<std::size_t>();
  m.loss = j.at("loss").get<double>();
  m.training_seed = j.at("training_seed").get<std::uint64_t>();
  m.retrain_count = j.at("retrain_count").get<std::uint64_t>();
  return m;
}

}  // namespace

std::string model_to_json(const ModelFile& model) {
  json j;
  j["schema"] = "delkm-model/1";
  j["kind"] = model.kind;
  j["scaled"] = model.scaled;
  j["deleted_rows"] = model.deleted_rows;
  j["dataset_fingerprint"] = model.fingerprint;
  if (model.kind == "baseline")
    j["model"] = baseline_to_json(model.baseline);
  else if (model.kind == "qkmeans")
    j["model"] = qk_to_json(model.qk);
  else if (model.kind == "dckmeans")
    j["model"] = dc_to_json(model.dc);
  else
    throw DataError("model_to_json: unknown kind '" + model.kind + "'");
  return j.dump(2);
}

ModelFile model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("model parse error: ") + e.what());
  }
  try {
    if (j.at("schema").get<std::string>() != "delkm-model/1")
      throw DataError("unsupported model schema");
    ModelFile m;
    m.kind = j.at("kind").get<std::string>();
    m.scaled = j.at("scaled").get<bool>();
    m.deleted_rows = j.at("deleted_rows").get<std::vector<RowId>>();
    m.fingerprint = j.at("dataset_fingerprint").get<std::uint64_t>();
    if (m.kind == "baseline")
      m.baseline = baseline_from_json(j.at("model"));
    else if (m.kind == "qkmeans")
      m.qk = qk_from_json(j.at("model"));
    else if (m.kind == "dckmeans")
      m.dc = dc_from_json(j.at("model"));
    else
      throw DataError("unknown model kind '" + m.kind + "'");
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

void save_model_file(const ModelFile& model, const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw DataError("cannot open for writing: " + tmp.string());
    out << model_to_json(model) << '\n';
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw DataError("cannot replace " + path + ": " + ec.message());
}

ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

void write_centroids_csv(const CentroidSet& centroids, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out.precision(17);
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double* row = centroids.row(c);
    for (std::size_t j = 0; j < centroids.dim; ++j) {
      if (j) out << ',';
      out << row[j];
    }
    out << '\n';
  }
}

void write_deletion_stream(const DeletionStream& stream, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  for (RowId id : stream.ids) out << id << '\n';
}

DeletionStream read_deletion_stream(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  DeletionStream stream;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    stream.ids.push_back(std::stoull(line));
  }
  return stream;
}

void write_dataset_csv(const LabeledDataset& dataset, const std::string& path,
                       bool include_labels) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out.precision(17);
  const std::size_t d = dataset.data.dim();
  dataset.data.for_each_live([&](RowId id, const double* p) {
    if (include_labels && !dataset.labels.empty()) out << dataset.labels[id] << ',';
    for (std::size_t j = 0; j < d; ++j) {
      if (j) out << ',';
      out << p[j];
    }
    out << '\n';
  });
}

}  // namespace delkm
