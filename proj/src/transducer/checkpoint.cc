// src/transducer/checkpoint.cc
//
// Copyright 2026 The rnntk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rnntk/transducer/checkpoint.h"

#include "json.hpp"
#include "rnntk/errors.h"
#include "rnntk/io/file_util.h"
#include "rnntk/numcore/matrix_io.h"

namespace rnntk {

using nlohmann::json;

namespace {

constexpr const char *kFormat = "rnntk-transducer-1";

json LayerDims(const RecurrentLayer &l) {
  return {{"input_dim", l.InputDim()}, {"hidden_dim", l.HiddenDim()}};
}

std::vector<RecurrentLayer> LayersFromDims(const json &list) {
  std::vector<RecurrentLayer> out;
  for (const json &d : list) {
    out.push_back(RecurrentLayer::Zeros(d.at("input_dim").get<std::size_t>(),
                                        d.at("hidden_dim").get<std::size_t>()));
  }
  return out;
}

std::string FileFor(const std::string &param) { return param + ".tdm"; }

}  // namespace

void SaveModel(const std::filesystem::path &dir, const TransducerModel &model) {
  model.Validate();
  std::filesystem::create_directories(dir);
  json manifest;
  manifest["format"] = kFormat;
  manifest["input_dim"] = model.input_dim;
  manifest["vocabulary"] = model.vocab.symbols();
  manifest["blank_id"] = model.vocab.blank_id();
  manifest["phones"] = model.phones;
  manifest["shared_layers"] = model.encoder_lower.size();
  json enc = json::array();
  for (std::size_t i = 0; i < model.EncoderDepth(); ++i) {
    json d = LayerDims(model.EncoderLayer(i));
    d["name"] = EncoderGroup(i);
    enc.push_back(d);
  }
  manifest["encoder"] = enc;
  manifest["embedding_dim"] = model.embedding.cols();
  json pred = json::array();
  for (std::size_t i = 0; i < model.prediction.size(); ++i) {
    json d = LayerDims(model.prediction[i]);
    d["name"] = PredictionGroup(i);
    pred.push_back(d);
  }
  manifest["prediction"] = pred;
  manifest["joint_dim"] = model.joint.OutputDim();
  if (model.phone_branch) {
    json br = json::array();
    for (std::size_t i = 0; i < model.phone_branch->layers.size(); ++i) {
      json d = LayerDims(model.phone_branch->layers[i]);
      d["name"] = BranchGroup(i);
      br.push_back(d);
    }
    manifest["phone_branch"] = {{"layers", br},
                                {"output_dim", model.phone_branch->output.OutputDim()}};
  }
  json params = json::array();
  for (const ConstParamBlock &b : model.Params()) {
    params.push_back({{"name", b.name}, {"file", FileFor(b.name)}, {"size", b.values.size()}});
    Matrix m(b.values.size(), 1, std::vector<double>(b.values.begin(), b.values.end()));
    WriteMatrixFile(dir / FileFor(b.name), m);
  }
  manifest["params"] = params;
  WriteFileAtomic(dir / "model.json", manifest.dump(2) + "\n");
}

TransducerModel LoadModel(const std::filesystem::path &dir) {
  json manifest;
  try {
    manifest = json::parse(ReadFileBytes(dir / "model.json"));
  } catch (const json::exception &e) {
    Fail(ErrorKind::kData, "bad model manifest in " + dir.string() + ": " + e.what());
  }
  try {
    Require(manifest.at("format") == kFormat, ErrorKind::kData, "unknown model format");
    TransducerModel m;
    m.vocab = Vocabulary(manifest.at("vocabulary").get<std::vector<std::string>>());
    Require(manifest.at("blank_id").get<int>() == m.vocab.blank_id(), ErrorKind::kData,
            "blank id disagrees with vocabulary");
    m.phones = manifest.at("phones").get<std::vector<std::string>>();
    m.input_dim = manifest.at("input_dim").get<std::size_t>();
    std::vector<RecurrentLayer> enc = LayersFromDims(manifest.at("encoder"));
    const auto shared = manifest.at("shared_layers").get<std::size_t>();
    Require(shared >= 1 && shared <= enc.size(), ErrorKind::kData, "bad shared_layers");
    m.encoder_lower.assign(enc.begin(), enc.begin() + static_cast<std::ptrdiff_t>(shared));
    m.encoder_upper.assign(enc.begin() + static_cast<std::ptrdiff_t>(shared), enc.end());
    m.embedding = Matrix(m.vocab.size(), manifest.at("embedding_dim").get<std::size_t>());
    m.prediction = LayersFromDims(manifest.at("prediction"));
    Require(!m.prediction.empty(), ErrorKind::kData, "no prediction layers");
    const auto joint_dim = manifest.at("joint_dim").get<std::size_t>();
    m.joint = DenseLayer::Zeros(m.EncoderDim() + m.PredictionDim(), joint_dim);
    m.output = DenseLayer::Zeros(joint_dim, m.vocab.size());
    if (manifest.contains("phone_branch")) {
      PhoneBranch br;
      br.layers = LayersFromDims(manifest["phone_branch"].at("layers"));
      const std::size_t in = br.layers.empty() ? m.LowerDim() : br.layers.back().HiddenDim();
      br.output = DenseLayer::Zeros(in, manifest["phone_branch"].at("output_dim").get<std::size_t>());
      m.phone_branch = std::move(br);
    }
    for (ParamBlock &b : m.Params()) {
      Matrix stored = ReadMatrixFile(dir / FileFor(b.name));
      Require(stored.size() == b.values.size(), ErrorKind::kData,
              "parameter " + b.name + " has " + std::to_string(stored.size()) +
                  " values, expected " + std::to_string(b.values.size()));
      std::copy(stored.values().begin(), stored.values().end(), b.values.begin());
    }
    m.Validate();
    return m;
  } catch (const json::exception &e) {
    Fail(ErrorKind::kData, "bad model manifest in " + dir.string() + ": " + e.what());
  }
}

std::string NBestToJsonLine(const NBestList &nbest, const Vocabulary &vocab) {
  json hyps = json::array();
  for (const Hypothesis &h : nbest.hyps) {
    std::vector<std::string> symbols;
    for (TokenId id : h.tokens) symbols.push_back(vocab.Symbol(id));
    hyps.push_back({{"tokens", symbols},
                    {"token_ids", h.tokens},
                    {"logp", h.log_prob},
                    {"emit_frames", h.emit_frames},
                    {"wp_logp", h.wp_log_probs},
                    {"neg_entropy", h.neg_entropies},
                    {"emitted_count", h.emitted_count},
                    {"hyp_logp", h.hyp_log_probs},
                    {"emitted_counts", h.emitted_counts}});
  }
  json line = {{"utt_id", nbest.utt_id}, {"hyps", hyps}};
  return line.dump();
}

NBestList NBestFromJsonLine(const std::string &line) {
  try {
    json j = json::parse(line);
    NBestList out;
    out.utt_id = j.at("utt_id").get<std::string>();
    for (const json &h : j.at("hyps")) {
      Hypothesis hyp;
      hyp.tokens = h.at("token_ids").get<std::vector<TokenId>>();
      hyp.log_prob = h.at("logp").get<double>();
      hyp.emit_frames = h.at("emit_frames").get<std::vector<int>>();
      hyp.wp_log_probs = h.at("wp_logp").get<std::vector<double>>();
      hyp.neg_entropies = h.at("neg_entropy").get<std::vector<double>>();
      hyp.emitted_count = h.at("emitted_count").get<int>();
      if (h.contains("hyp_logp")) hyp.hyp_log_probs = h["hyp_logp"].get<std::vector<double>>();
      if (h.contains("emitted_counts")) {
        hyp.emitted_counts = h["emitted_counts"].get<std::vector<int>>();
      }
      const std::size_t n = hyp.tokens.size();
      Require(hyp.emit_frames.size() == n && hyp.wp_log_probs.size() == n &&
                  hyp.neg_entropies.size() == n,
              ErrorKind::kData, "per-token fields not aligned in " + out.utt_id);
      out.hyps.push_back(std::move(hyp));
    }
    return out;
  } catch (const json::exception &e) {
    Fail(ErrorKind::kData, std::string("bad N-best line: ") + e.what());
  }
}

}  // namespace rnntk
