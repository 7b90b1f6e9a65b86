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

#include <doctest.h>

#include <cstdio>
#include <cstring>

#include "delkm/dataset.hpp"
#include "delkm/dckmeans.hpp"
#include "delkm/errors.hpp"
#include "delkm/qkmeans.hpp"
#include "delkm/serialize.hpp"

using namespace delkm;

namespace {

struct TempPath {
  std::string path;
  explicit TempPath(const char* name) : path(name) {}
  ~TempPath() { std::remove(path.c_str()); }
};

}  // namespace

TEST_SUITE("serialize") {

TEST_CASE("fingerprint tracks live content") {
  const LabeledDataset ds = gen_gaussian_mixture(30, 2, 2, 0.3, 501);
  DataMatrix a = ds.data;
  DataMatrix b = ds.data;
  CHECK(dataset_fingerprint(a) == dataset_fingerprint(b));
  b.delete_row(3);
  CHECK(dataset_fingerprint(a) != dataset_fingerprint(b));
  a.delete_row(3);
  CHECK(dataset_fingerprint(a) == dataset_fingerprint(b));
}

TEST_CASE("a trained quantized model round-trips bit for bit") {
  const LabeledDataset ds = gen_gaussian_mixture(60, 3, 2, 0.2, 502);
  QkParams p;
  p.k = 2;
  p.max_iters = 6;
  p.epsilon = 0.0625;
  RngStream rng(91);
  ModelFile file;
  file.kind = "qkmeans";
  file.qk = qkmeans_train(ds.data, p, rng);
  file.scaled = true;
  file.deleted_rows = {4, 9};
  file.fingerprint = dataset_fingerprint(ds.data);

  const std::string text = model_to_json(file);
  const ModelFile back = model_from_json(text);
  CHECK(model_to_json(back) == text);  // byte-stable round trip
  CHECK(back.qk.final_centroids.values == file.qk.final_centroids.values);
  CHECK(back.qk.seed_rows == file.qk.seed_rows);
  REQUIRE(back.qk.iterations.size() == file.qk.iterations.size());
  for (std::size_t t = 0; t < file.qk.iterations.size(); ++t) {
    CHECK(back.qk.iterations[t].phase == file.qk.iterations[t].phase);
    CHECK(back.qk.iterations[t].loss == file.qk.iterations[t].loss);
  }
  CHECK(back.deleted_rows == file.deleted_rows);
  CHECK(back.scaled == file.scaled);
}

TEST_CASE("a tree model round-trips and keeps per-node state") {
  const LabeledDataset ds = gen_gaussian_mixture(50, 2, 2, 0.2, 503);
  DcParams p;
  p.k = 2;
  p.iters = 3;
  p.width = 4;
  RngStream rng(92);
  ModelFile file;
  file.kind = "dckmeans";
  file.dc = dckmeans_train(ds.data, p, rng);
  file.fingerprint = dataset_fingerprint(ds.data);

  const ModelFile back = model_from_json(model_to_json(file));
  REQUIRE(back.dc.nodes.size() == file.dc.nodes.size());
  for (std::size_t i = 0; i < file.dc.nodes.size(); ++i) {
    CHECK(back.dc.nodes[i].seed == file.dc.nodes[i].seed);
    CHECK(back.dc.nodes[i].rows == file.dc.nodes[i].rows);
    CHECK(back.dc.nodes[i].centroids.values == file.dc.nodes[i].centroids.values);
  }
  CHECK(back.dc.leaf_of == file.dc.leaf_of);
}

TEST_CASE("save is atomic-by-rename and load validates the schema") {
  const LabeledDataset ds = gen_gaussian_mixture(20, 2, 2, 0.2, 504);
  RngStream rng(93);
  ModelFile file;
  file.kind = "baseline";
  file.baseline = lloyd_train(ds.data, 2, 3, rng);
  TempPath path("serialize_test_model.json");
  save_model_file(file, path.path);
  const ModelFile back = load_model_file(path.path);
  CHECK(back.kind == "baseline");
  CHECK(back.baseline.centroids.values == file.baseline.centroids.values);

  CHECK_THROWS_AS(model_from_json("{not json"), DataError);
  CHECK_THROWS_AS(model_from_json("{\"schema\":\"nope\"}"), DataError);
  CHECK_THROWS_AS(load_model_file("does_not_exist.json"), DataError);
}

TEST_CASE("deletion streams survive a file round trip") {
  const LabeledDataset ds = gen_gaussian_mixture(40, 2, 2, 0.2, 505);
  const DeletionStream stream = gen_deletion_stream(ds.data, 10, 77);
  TempPath path("serialize_test_stream.txt");
  write_deletion_stream(stream, path.path);
  const DeletionStream back = read_deletion_stream(path.path);
  CHECK(back.ids == stream.ids);
}

}  // TEST_SUITE
