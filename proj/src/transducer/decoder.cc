// src/transducer/decoder.cc
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

#include "rnntk/transducer/decoder.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "rnntk/errors.h"
#include "rnntk/numcore/ops.h"

namespace rnntk {

namespace {

struct PredState {
  std::vector<Vector> layers;  // hidden state per prediction layer
  Vector proj;                 // joint weight (prediction half) times top state
};

// Incremental joint evaluation for frame-synchronous decoding.
class JointScorer {
 public:
  JointScorer(const Sequence &h_enc, const TransducerModel &model) : model_(model) {
    const std::size_t enc_dim = model.EncoderDim(), J = model.joint.OutputDim();
    enc_proj_.reserve(h_enc.size());
    for (const Vector &h : h_enc) {
      Require(h.size() == enc_dim, ErrorKind::kShape, "encoder state dim");
      Vector a = model.joint.bias;
      for (std::size_t j = 0; j < J; ++j) {
        const double *row = model.joint.weight.Row(j).data();
        double acc = 0.0;
        for (std::size_t c = 0; c < enc_dim; ++c) acc += row[c] * h[c];
        a[j] += acc;
      }
      enc_proj_.push_back(std::move(a));
    }
  }

  PredState Initial() const {
    return Step(nullptr, Vector(model_.embedding.cols(), 0.0));
  }

  PredState Advance(const PredState &prev, TokenId token) const {
    auto row = model_.embedding.Row(static_cast<std::size_t>(token));
    return Step(&prev, Vector(row.begin(), row.end()));
  }

  Vector LogProbs(std::size_t t, const PredState &state) const {
    const std::size_t J = model_.joint.OutputDim();
    Vector z(J);
    for (std::size_t j = 0; j < J; ++j) z[j] = std::tanh(enc_proj_[t][j] + state.proj[j]);
    return LogSoftmax(DenseForward(z, model_.output));
  }

 private:
  PredState Step(const PredState *prev, Vector x) const {
    PredState next;
    for (std::size_t l = 0; l < model_.prediction.size(); ++l) {
      std::span<const double> h_prev;
      if (prev != nullptr) h_prev = prev->layers[l];
      x = RecurrentStep(x, h_prev, model_.prediction[l]);
      next.layers.push_back(x);
    }
    const std::size_t enc_dim = model_.EncoderDim(), J = model_.joint.OutputDim();
    next.proj.assign(J, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
      const double *row = model_.joint.weight.Row(j).data() + enc_dim;
      double acc = 0.0;
      for (std::size_t c = 0; c < x.size(); ++c) acc += row[c] * x[c];
      next.proj[j] = acc;
    }
    return next;
  }

  const TransducerModel &model_;
  std::vector<Vector> enc_proj_;
};

void EmitPiece(Hypothesis *hyp, TokenId k, std::size_t t, std::span<const double> lp,
               TokenId blank, bool entropy_includes_blank) {
  hyp->log_prob += lp[k];
  hyp->emitted_count += 1;
  hyp->tokens.push_back(k);
  hyp->emit_frames.push_back(static_cast<int>(t));
  hyp->wp_log_probs.push_back(lp[k]);
  hyp->hyp_log_probs.push_back(hyp->log_prob);
  hyp->neg_entropies.push_back(PieceNegEntropy(lp, blank, entropy_includes_blank));
  hyp->emitted_counts.push_back(hyp->emitted_count);
}

void EmitBlank(Hypothesis *hyp, std::span<const double> lp, TokenId blank) {
  hyp->log_prob += lp[blank];
  hyp->emitted_count += 1;
}

void CheckOptions(const DecodeOptions &options) {
  Require(options.max_symbols_per_frame >= 1, ErrorKind::kConfig,
          "max symbols per frame must be at least 1");
}

struct BeamEntry {
  Hypothesis hyp;
  PredState state;
};

// Keeps the higher-scoring entry per token sequence; earlier insert wins ties.
void Merge(std::map<std::vector<TokenId>, BeamEntry> *set, BeamEntry entry) {
  auto it = set->find(entry.hyp.tokens);
  if (it == set->end()) {
    std::vector<TokenId> key = entry.hyp.tokens;
    set->emplace(std::move(key), std::move(entry));
  } else if (entry.hyp.log_prob > it->second.hyp.log_prob) {
    it->second = std::move(entry);
  }
}

std::vector<BeamEntry> TopEntries(std::map<std::vector<TokenId>, BeamEntry> set,
                                  std::size_t limit) {
  std::vector<BeamEntry> out;
  out.reserve(set.size());
  for (auto &kv : set) out.push_back(std::move(kv.second));
  // Map order already sorts by token sequence; stable sort keeps it for ties.
  std::stable_sort(out.begin(), out.end(), [](const BeamEntry &a, const BeamEntry &b) {
    return a.hyp.log_prob > b.hyp.log_prob;
  });
  if (out.size() > limit) out.resize(limit);
  return out;
}

}  // namespace

double PieceNegEntropy(std::span<const double> log_probs, TokenId blank, bool include_blank) {
  if (include_blank) {
    double acc = 0.0;
    for (double lp : log_probs) acc += std::exp(lp) * lp;
    return acc;
  }
  Vector rest;
  rest.reserve(log_probs.size());
  for (std::size_t k = 0; k < log_probs.size(); ++k) {
    if (static_cast<TokenId>(k) != blank) rest.push_back(log_probs[k]);
  }
  if (rest.empty()) return 0.0;
  const double norm = LogSumExp(rest);
  double acc = 0.0;
  for (double lp : rest) acc += std::exp(lp - norm) * (lp - norm);
  return acc;
}

Hypothesis GreedyDecodeEncoded(const Sequence &h_enc, const TransducerModel &model,
                               const DecodeOptions &options) {
  CheckOptions(options);
  JointScorer scorer(h_enc, model);
  const TokenId blank = model.vocab.blank_id();
  Hypothesis hyp;
  PredState state = scorer.Initial();
  for (std::size_t t = 0; t < h_enc.size(); ++t) {
    for (int s = 0;; ++s) {
      Vector lp = scorer.LogProbs(t, state);
      const auto k = static_cast<TokenId>(std::max_element(lp.begin(), lp.end()) - lp.begin());
      if (k == blank || s == options.max_symbols_per_frame) {
        EmitBlank(&hyp, lp, blank);
        break;
      }
      EmitPiece(&hyp, k, t, lp, blank, options.entropy_includes_blank);
      state = scorer.Advance(state, k);
    }
  }
  return hyp;
}

Hypothesis GreedyDecode(const Sequence &features, const TransducerModel &model,
                        const DecodeOptions &options) {
  return GreedyDecodeEncoded(Encode(features, model).final, model, options);
}

NBestList BeamSearchEncoded(const Sequence &h_enc, const TransducerModel &model,
                            const DecodeOptions &options) {
  CheckOptions(options);
  Require(options.nbest >= 1 && options.beam >= options.nbest, ErrorKind::kConfig,
          "need beam >= n >= 1");
  JointScorer scorer(h_enc, model);
  const TokenId blank = model.vocab.blank_id();
  const std::size_t K = model.vocab.size();

  std::vector<BeamEntry> beams;
  beams.push_back({Hypothesis{}, scorer.Initial()});
  for (std::size_t t = 0; t < h_enc.size(); ++t) {
    std::map<std::vector<TokenId>, BeamEntry> frame_done;
    std::vector<BeamEntry> active = std::move(beams);
    for (int s = 0; !active.empty(); ++s) {
      const bool at_cap = s == options.max_symbols_per_frame;
      struct Candidate {
        double score;
        TokenId token;
        std::size_t parent;
      };
      std::vector<Candidate> cands;
      std::vector<Vector> parent_lp(active.size());
      for (std::size_t i = 0; i < active.size(); ++i) {
        parent_lp[i] = scorer.LogProbs(t, active[i].state);
        for (std::size_t k = 0; k < K; ++k) {
          const auto tok = static_cast<TokenId>(k);
          if (at_cap && tok != blank) continue;
          cands.push_back({active[i].hyp.log_prob + parent_lp[i][k], tok, i});
        }
      }
      std::stable_sort(cands.begin(), cands.end(), [](const Candidate &a, const Candidate &b) {
        if (a.score != b.score) return a.score > b.score;
        return a.token < b.token;
      });
      if (cands.size() > options.beam) cands.resize(options.beam);
      std::map<std::vector<TokenId>, BeamEntry> expanded;
      for (const Candidate &c : cands) {
        const BeamEntry &parent = active[c.parent];
        BeamEntry next{parent.hyp, PredState{}};
        if (c.token == blank) {
          EmitBlank(&next.hyp, parent_lp[c.parent], blank);
          next.state = parent.state;
          Merge(&frame_done, std::move(next));
        } else {
          EmitPiece(&next.hyp, c.token, t, parent_lp[c.parent], blank,
                    options.entropy_includes_blank);
          next.state = scorer.Advance(parent.state, c.token);
          Merge(&expanded, std::move(next));
        }
      }
      active = TopEntries(std::move(expanded), options.beam);
    }
    beams = TopEntries(std::move(frame_done), options.beam);
  }

  NBestList out;
  for (std::size_t i = 0; i < beams.size() && i < options.nbest; ++i) {
    out.hyps.push_back(std::move(beams[i].hyp));
  }
  return out;
}

NBestList BeamSearch(const Sequence &features, const TransducerModel &model,
                     const DecodeOptions &options) {
  return BeamSearchEncoded(Encode(features, model).final, model, options);
}

}  // namespace rnntk
