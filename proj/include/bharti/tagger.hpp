#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bharti/script_core.hpp"

namespace bharti {

// Grapheme vocabulary plus the tag inventory. Ids are dense; 0 is the
// padding id and 1 the unknown id. Tag 0 is always the null tag "O".
struct Vocab {
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  std::vector<std::string> tokens;  // id -> text; [0]="<pad>", [1]="<unk>"
  std::vector<std::string> tags;    // id -> label; [0]="O"

  static Vocab build(const std::vector<std::string>& token_texts,
                     const std::vector<std::string>& tag_labels);

  int token_id(std::string_view text) const;  // kUnk when absent
  std::optional<int> tag_id(std::string_view label) const;
  int vocab_size() const { return static_cast<int>(tokens.size()); }
  int tag_count() const { return static_cast<int>(tags.size()); }

 private:
  std::unordered_map<std::string, int> token_index_;
  std::unordered_map<std::string, int> tag_index_;
};

// One direction's parameters for one layer. Gates are stacked [i; f; g; o]
// along the rows: W is 4H x D, U is 4H x H, b is 4H.
struct LstmParams {
  Eigen::MatrixXd W;
  Eigen::MatrixXd U;
  Eigen::VectorXd b;
};

struct HiddenState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;
  static HiddenState zero(int hidden_dim);
};

// All tagger parameters plus the vocabulary. Immutable once trained or
// loaded; safe to share across threads.
struct TaggerModel {
  int embed_dim = 0;
  int hidden_dim = 0;
  int layers = 1;
  double dropout = 0.0;
  uint64_t seed = 0;
  Vocab vocab;
  Eigen::MatrixXd embedding;     // |V| x E
  std::vector<LstmParams> fwd;   // one per layer
  std::vector<LstmParams> bwd;
  Eigen::MatrixXd head_w;        // |tags| x 2H
  Eigen::VectorXd head_b;
};

// One step of the standard LSTM cell:
//   i,f,o = sigmoid, g = tanh of the affine slices of W x + U h_prev + b;
//   c = f.c_prev + i.g;  h = o.tanh(c).
HiddenState lstm_step(const Eigen::VectorXd& x, const HiddenState& prev,
                      const LstmParams& params);

// Runs the forward and backward passes from zero states, concatenates the
// per-position hidden states and applies the linear head. Returns the
// T x |tags| score matrix. Dropout applies to the embeddings and to the
// final layer's outputs, only in train mode; masks derive from the model
// seed and dropout_call, so a fixed (seed, call) is reproducible.
Eigen::MatrixXd bilstm_forward(std::span<const int> ids,
                               const TaggerModel& model,
                               bool train_mode = false,
                               uint64_t dropout_call = 0);

struct TrainOptions {
  int epochs = 30;
  double learning_rate = 0.1;
  int embed_dim = 32;
  int hidden_dim = 64;
  int layers = 1;
  double dropout = 0.25;
  uint64_t seed = 1;
};

struct TrainExample {
  std::vector<int> token_ids;
  std::vector<int> tag_ids;
};

// Parameter gradients in the same shapes as TaggerModel.
struct Gradients {
  Eigen::MatrixXd embedding;
  std::vector<LstmParams> fwd;
  std::vector<LstmParams> bwd;
  Eigen::MatrixXd head_w;
  Eigen::VectorXd head_b;
};

// Mean per-token softmax cross-entropy of one example.
double example_loss(const TaggerModel& model, const TrainExample& example,
                    bool train_mode = false, uint64_t dropout_call = 0);

// Full backpropagation through time. Returns the loss and the gradients of
// every parameter. The same (train_mode, dropout_call) pair reproduces the
// dropout masks used by example_loss.
std::pair<double, Gradients> backprop(const TaggerModel& model,
                                      const TrainExample& example,
                                      bool train_mode = false,
                                      uint64_t dropout_call = 0);

TaggerModel init_model(const Vocab& vocab, const TrainOptions& options);

// Plain SGD, one example per step, order reshuffled each epoch from the
// seeded generator. Bitwise reproducible for a fixed seed. Throws
// divergence_error if the loss leaves the finite range.
TaggerModel train(const std::vector<TrainExample>& corpus, const Vocab& vocab,
                  const TrainOptions& options,
                  std::vector<double>* loss_trace = nullptr);

// Word-level training text: token texts with one gold tag per token.
struct TaggedSentence {
  Script script = Script::Devanagari;
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
};
using TaggedCorpus = std::vector<TaggedSentence>;

// TSV: SCRIPT, space-joined graphemes, space-joined tags. known_tags, when
// non-empty, is the closed tag set (plus "O"); unknown tags are corpus
// errors with a line number.
TaggedCorpus load_tagged_corpus(const std::string& path,
                                const std::vector<std::string>& known_tags);
void save_tagged_corpus(const TaggedCorpus& corpus, std::ostream& out);

// Builds the vocabulary from the corpus and trains.
TaggerModel train_on_corpus(const TaggedCorpus& corpus,
                            const std::vector<std::string>& table_tags,
                            const TrainOptions& options,
                            std::vector<double>* loss_trace = nullptr);

// Versioned flat text format; decimal with 17 significant digits, so
// load(save(m)) reproduces every parameter bit for bit.
void save_model(const TaggerModel& model, std::ostream& out);
void save_model(const TaggerModel& model, const std::string& path);
TaggerModel load_model(std::istream& in);
TaggerModel load_model(const std::string& path);

// One ambiguous position inside a word: the token index and the candidate
// tag labels, in candidate order.
struct SiteQuery {
  std::size_t position = 0;
  std::vector<std::string> candidate_tags;
};

// Evaluation-mode resolution: for each site, the candidate whose tag scores
// highest at that position; ties break toward the lowest tag id. Tags
// outside the candidate set are never selected. Throws unknown_tag_error
// when a candidate tag is missing from the model's inventory.
std::vector<std::size_t> disambiguate(const std::vector<std::string>& tokens,
                                      const std::vector<SiteQuery>& sites,
                                      const TaggerModel& model);

}  // namespace bharti
