#include "bharti/tagger.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "bharti/errors.hpp"

namespace bharti {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// [0, 1) with 53 bits, identical across platforms for a given engine state.
double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

uint64_t mix(uint64_t seed, uint64_t call) {
  uint64_t x = seed ^ (0x9E3779B97F4A7C15ull * (call + 1));
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  return x;
}

// Inverted dropout masks: kept entries scale by 1/(1-p) so evaluation mode
// needs no rescaling.
Eigen::MatrixXd dropout_mask(std::mt19937_64& rng, Eigen::Index rows,
                             Eigen::Index cols, double p) {
  Eigen::MatrixXd mask(rows, cols);
  const double keep = 1.0 - p;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      mask(r, c) = next_uniform(rng) < keep ? 1.0 / keep : 0.0;
  return mask;
}

struct StepCache {
  Eigen::VectorXd x;
  Eigen::VectorXd i, f, g, o;
  Eigen::VectorXd c, tanh_c;
  Eigen::VectorXd h;
  Eigen::VectorXd h_prev, c_prev;
};

struct ForwardCache {
  // [layer][direction 0=fwd,1=bwd][t], t in input order for fwd and in
  // reversed scan order for bwd bookkeeping kept by absolute position.
  std::vector<std::array<std::vector<StepCache>, 2>> steps;
  std::vector<Eigen::MatrixXd> layer_input;  // [layer]: D x T
  Eigen::MatrixXd concat;                    // 2H x T before output dropout
  Eigen::MatrixXd dropped;                   // 2H x T after output dropout
  Eigen::MatrixXd emb_mask;                  // E x T (ones in eval mode)
  Eigen::MatrixXd out_mask;                  // 2H x T
  Eigen::MatrixXd scores;                    // |tags| x T
};

void run_direction(const LstmParams& params, const Eigen::MatrixXd& input,
                   bool reversed, int hidden_dim,
                   std::vector<StepCache>& steps, Eigen::MatrixXd& out) {
  const Eigen::Index T = input.cols();
  const int H = hidden_dim;
  HiddenState state = HiddenState::zero(H);
  steps.resize(T);
  out.resize(H, T);
  for (Eigen::Index n = 0; n < T; ++n) {
    Eigen::Index t = reversed ? T - 1 - n : n;
    StepCache& sc = steps[t];
    sc.x = input.col(t);
    sc.h_prev = state.h;
    sc.c_prev = state.c;
    Eigen::VectorXd z = params.W * sc.x + params.U * state.h + params.b;
    sc.i = z.segment(0, H).unaryExpr([](double v) { return sigmoid(v); });
    sc.f = z.segment(H, H).unaryExpr([](double v) { return sigmoid(v); });
    sc.g = z.segment(2 * H, H).array().tanh();
    sc.o = z.segment(3 * H, H).unaryExpr([](double v) { return sigmoid(v); });
    sc.c = sc.f.cwiseProduct(sc.c_prev) + sc.i.cwiseProduct(sc.g);
    sc.tanh_c = sc.c.array().tanh();
    sc.h = sc.o.cwiseProduct(sc.tanh_c);
    state.h = sc.h;
    state.c = sc.c;
    out.col(t) = sc.h;
  }
}

ForwardCache forward_pass(const TaggerModel& model, std::span<const int> ids,
                          bool train_mode, uint64_t dropout_call) {
  if (ids.empty()) throw error("empty sequence");
  for (int id : ids)
    if (id < 0 || id >= model.vocab.vocab_size())
      throw error("token id out of range: " + std::to_string(id));
  const Eigen::Index T = static_cast<Eigen::Index>(ids.size());
  const int E = model.embed_dim;
  const int H = model.hidden_dim;
  const int L = model.layers;

  ForwardCache cache;
  const bool drop = train_mode && model.dropout > 0.0;
  std::mt19937_64 drop_rng(mix(model.seed, dropout_call));
  cache.emb_mask = drop ? dropout_mask(drop_rng, E, T, model.dropout)
                        : Eigen::MatrixXd::Ones(E, T);
  cache.out_mask = drop ? dropout_mask(drop_rng, 2 * H, T, model.dropout)
                        : Eigen::MatrixXd::Ones(2 * H, T);

  cache.layer_input.resize(L);
  cache.steps.resize(L);
  Eigen::MatrixXd input(E, T);
  for (Eigen::Index t = 0; t < T; ++t)
    input.col(t) = model.embedding.row(ids[t]).transpose();
  input = input.cwiseProduct(cache.emb_mask);

  Eigen::MatrixXd hf, hb;
  for (int l = 0; l < L; ++l) {
    cache.layer_input[l] = input;
    run_direction(model.fwd[l], input, false, H, cache.steps[l][0], hf);
    run_direction(model.bwd[l], input, true, H, cache.steps[l][1], hb);
    input.resize(2 * H, T);
    input.topRows(H) = hf;
    input.bottomRows(H) = hb;
  }
  cache.concat = input;
  cache.dropped = input.cwiseProduct(cache.out_mask);
  cache.scores.resize(model.head_w.rows(), T);
  for (Eigen::Index t = 0; t < T; ++t)
    cache.scores.col(t) = model.head_w * cache.dropped.col(t) + model.head_b;
  return cache;
}

double loss_from_scores(const Eigen::MatrixXd& scores,
                        const std::vector<int>& tags,
                        Eigen::MatrixXd* dscores) {
  const Eigen::Index T = scores.cols();
  double loss = 0.0;
  if (dscores) dscores->setZero(scores.rows(), T);
  for (Eigen::Index t = 0; t < T; ++t) {
    Eigen::VectorXd col = scores.col(t);
    double m = col.maxCoeff();
    Eigen::VectorXd exps = (col.array() - m).exp();
    double z = exps.sum();
    loss += -(col(tags[t]) - m - std::log(z));
    if (dscores) {
      Eigen::VectorXd p = exps / z;
      p(tags[t]) -= 1.0;
      dscores->col(t) = p / static_cast<double>(T);
    }
  }
  return loss / static_cast<double>(T);
}

Gradients zero_gradients(const TaggerModel& model) {
  Gradients g;
  g.embedding = Eigen::MatrixXd::Zero(model.embedding.rows(),
                                      model.embedding.cols());
  g.head_w = Eigen::MatrixXd::Zero(model.head_w.rows(), model.head_w.cols());
  g.head_b = Eigen::VectorXd::Zero(model.head_b.size());
  for (int l = 0; l < model.layers; ++l) {
    for (auto* side : {&g.fwd, &g.bwd}) {
      LstmParams p;
      const LstmParams& ref = (side == &g.fwd) ? model.fwd[l] : model.bwd[l];
      p.W = Eigen::MatrixXd::Zero(ref.W.rows(), ref.W.cols());
      p.U = Eigen::MatrixXd::Zero(ref.U.rows(), ref.U.cols());
      p.b = Eigen::VectorXd::Zero(ref.b.size());
      side->push_back(std::move(p));
    }
  }
  return g;
}

// Backward scan of one direction; accumulates parameter gradients and the
// gradient w.r.t. the layer input.
void backward_direction(const LstmParams& params,
                        const std::vector<StepCache>& steps,
                        const Eigen::MatrixXd& dh_out, bool reversed,
                        int hidden_dim, LstmParams& grad,
                        Eigen::MatrixXd& dinput) {
  const Eigen::Index T = dh_out.cols();
  const int H = hidden_dim;
  Eigen::VectorXd dh_carry = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd dc_carry = Eigen::VectorXd::Zero(H);
  for (Eigen::Index n = T - 1; n >= 0; --n) {
    // Walk opposite to the scan order.
    Eigen::Index t = reversed ? T - 1 - n : n;
    const StepCache& sc = steps[t];
    Eigen::VectorXd dh = dh_out.col(t) + dh_carry;
    Eigen::VectorXd do_ = dh.cwiseProduct(sc.tanh_c);
    Eigen::VectorXd dc =
        dc_carry + dh.cwiseProduct(sc.o).cwiseProduct(
                       (1.0 - sc.tanh_c.array().square()).matrix());
    Eigen::VectorXd di = dc.cwiseProduct(sc.g);
    Eigen::VectorXd df = dc.cwiseProduct(sc.c_prev);
    Eigen::VectorXd dg = dc.cwiseProduct(sc.i);
    Eigen::VectorXd dz(4 * H);
    dz.segment(0, H) =
        di.cwiseProduct(sc.i).cwiseProduct((1.0 - sc.i.array()).matrix());
    dz.segment(H, H) =
        df.cwiseProduct(sc.f).cwiseProduct((1.0 - sc.f.array()).matrix());
    dz.segment(2 * H, H) =
        dg.cwiseProduct((1.0 - sc.g.array().square()).matrix());
    dz.segment(3 * H, H) =
        do_.cwiseProduct(sc.o).cwiseProduct((1.0 - sc.o.array()).matrix());
    grad.W.noalias() += dz * sc.x.transpose();
    grad.U.noalias() += dz * sc.h_prev.transpose();
    grad.b += dz;
    dinput.col(t) += params.W.transpose() * dz;
    dh_carry = params.U.transpose() * dz;
    dc_carry = dc.cwiseProduct(sc.f);
  }
}

void check_dims(const TaggerModel& model) {
  if (model.embed_dim <= 0 || model.hidden_dim <= 0 || model.layers <= 0)
    throw error("model dimensions must be positive");
  if (static_cast<int>(model.fwd.size()) != model.layers ||
      static_cast<int>(model.bwd.size()) != model.layers)
    throw error("layer parameter count mismatch");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Vocab Vocab::build(const std::vector<std::string>& token_texts,
                   const std::vector<std::string>& tag_labels) {
  Vocab v;
  v.tokens = {"<pad>", "<unk>"};
  v.token_index_ = {{"<pad>", kPad}, {"<unk>", kUnk}};
  for (const auto& text : token_texts) {
    if (v.token_index_.emplace(text, static_cast<int>(v.tokens.size()))
            .second)
      v.tokens.push_back(text);
  }
  v.tags = {"O"};
  v.tag_index_ = {{"O", 0}};
  for (const auto& label : tag_labels) {
    if (v.tag_index_.emplace(label, static_cast<int>(v.tags.size())).second)
      v.tags.push_back(label);
  }
  return v;
}

int Vocab::token_id(std::string_view text) const {
  auto it = token_index_.find(std::string(text));
  return it == token_index_.end() ? kUnk : it->second;
}

std::optional<int> Vocab::tag_id(std::string_view label) const {
  auto it = tag_index_.find(std::string(label));
  if (it == tag_index_.end()) return std::nullopt;
  return it->second;
}

HiddenState HiddenState::zero(int hidden_dim) {
  return {Eigen::VectorXd::Zero(hidden_dim),
          Eigen::VectorXd::Zero(hidden_dim)};
}

HiddenState lstm_step(const Eigen::VectorXd& x, const HiddenState& prev,
                      const LstmParams& params) {
  const int H = static_cast<int>(params.U.cols());
  Eigen::VectorXd z = params.W * x + params.U * prev.h + params.b;
  Eigen::VectorXd i =
      z.segment(0, H).unaryExpr([](double v) { return sigmoid(v); });
  Eigen::VectorXd f =
      z.segment(H, H).unaryExpr([](double v) { return sigmoid(v); });
  Eigen::VectorXd g = z.segment(2 * H, H).array().tanh();
  Eigen::VectorXd o =
      z.segment(3 * H, H).unaryExpr([](double v) { return sigmoid(v); });
  HiddenState next;
  next.c = f.cwiseProduct(prev.c) + i.cwiseProduct(g);
  next.h = o.cwiseProduct(next.c.array().tanh().matrix());
  return next;
}

Eigen::MatrixXd bilstm_forward(std::span<const int> ids,
                               const TaggerModel& model, bool train_mode,
                               uint64_t dropout_call) {
  check_dims(model);
  ForwardCache cache = forward_pass(model, ids, train_mode, dropout_call);
  return cache.scores.transpose();
}

double example_loss(const TaggerModel& model, const TrainExample& example,
                    bool train_mode, uint64_t dropout_call) {
  ForwardCache cache =
      forward_pass(model, example.token_ids, train_mode, dropout_call);
  return loss_from_scores(cache.scores, example.tag_ids, nullptr);
}

std::pair<double, Gradients> backprop(const TaggerModel& model,
                                      const TrainExample& example,
                                      bool train_mode, uint64_t dropout_call) {
  check_dims(model);
  ForwardCache cache =
      forward_pass(model, example.token_ids, train_mode, dropout_call);
  Eigen::MatrixXd dscores;
  double loss = loss_from_scores(cache.scores, example.tag_ids, &dscores);

  Gradients grads = zero_gradients(model);
  const Eigen::Index T = cache.scores.cols();
  const int H = model.hidden_dim;

  grads.head_b = dscores.rowwise().sum();
  grads.head_w.noalias() = dscores * cache.dropped.transpose();
  Eigen::MatrixXd dconcat =
      (model.head_w.transpose() * dscores).cwiseProduct(cache.out_mask);

  for (int l = model.layers - 1; l >= 0; --l) {
    Eigen::MatrixXd dinput = Eigen::MatrixXd::Zero(
        cache.layer_input[l].rows(), cache.layer_input[l].cols());
    backward_direction(model.fwd[l], cache.steps[l][0], dconcat.topRows(H),
                       false, H, grads.fwd[l], dinput);
    backward_direction(model.bwd[l], cache.steps[l][1], dconcat.bottomRows(H),
                       true, H, grads.bwd[l], dinput);
    dconcat = std::move(dinput);
  }
  // dconcat is now the gradient of the masked embeddings, E x T.
  dconcat = dconcat.cwiseProduct(cache.emb_mask);
  for (Eigen::Index t = 0; t < T; ++t)
    grads.embedding.row(example.token_ids[t]) += dconcat.col(t).transpose();
  return {loss, std::move(grads)};
}

TaggerModel init_model(const Vocab& vocab, const TrainOptions& options) {
  if (options.embed_dim <= 0 || options.hidden_dim <= 0 ||
      options.layers <= 0 || options.dropout < 0.0 || options.dropout >= 1.0)
    throw error("invalid hyperparameters");
  TaggerModel model;
  model.embed_dim = options.embed_dim;
  model.hidden_dim = options.hidden_dim;
  model.layers = options.layers;
  model.dropout = options.dropout;
  model.seed = options.seed;
  model.vocab = vocab;

  std::mt19937_64 rng(options.seed);
  auto uniform = [&rng]() { return -0.1 + 0.2 * next_uniform(rng); };
  auto fill_matrix = [&](Eigen::MatrixXd& m, Eigen::Index r, Eigen::Index c) {
    m.resize(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = uniform();
  };
  auto fill_vector = [&](Eigen::VectorXd& v, Eigen::Index n) {
    v.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform();
  };

  const int E = options.embed_dim;
  const int H = options.hidden_dim;
  fill_matrix(model.embedding, vocab.vocab_size(), E);
  for (int l = 0; l < options.layers; ++l) {
    const int D = l == 0 ? E : 2 * H;
    for (auto* side : {&model.fwd, &model.bwd}) {
      LstmParams p;
      fill_matrix(p.W, 4 * H, D);
      fill_matrix(p.U, 4 * H, H);
      fill_vector(p.b, 4 * H);
      p.b.segment(H, H).array() += 1.0;  // forget gate bias starts open
      side->push_back(std::move(p));
    }
  }
  fill_matrix(model.head_w, vocab.tag_count(), 2 * H);
  fill_vector(model.head_b, vocab.tag_count());
  return model;
}

TaggerModel train(const std::vector<TrainExample>& corpus, const Vocab& vocab,
                  const TrainOptions& options,
                  std::vector<double>* loss_trace) {
  if (corpus.empty()) throw error("training corpus is empty");
  for (const auto& ex : corpus) {
    if (ex.token_ids.empty()) throw error("empty training sequence");
    if (ex.token_ids.size() != ex.tag_ids.size())
      throw error("token/tag length mismatch");
    for (int tag : ex.tag_ids)
      if (tag < 0 || tag >= vocab.tag_count())
        throw error("tag id out of range");
  }
  TaggerModel model = init_model(vocab, options);
  std::mt19937_64 shuffle_rng(mix(options.seed, 0x51u));
  // Explicit Fisher-Yates keeps the permutation identical across platforms.
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  uint64_t call = 0;
  const double lr = options.learning_rate;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng() % i]);
    double epoch_loss = 0.0;
    for (std::size_t idx : order) {
      auto [loss, grads] = backprop(model, corpus[idx], true, call++);
      if (!std::isfinite(loss))
        throw divergence_error("training loss became non-finite at epoch " +
                               std::to_string(epoch));
      epoch_loss += loss;
      model.embedding -= lr * grads.embedding;
      for (int l = 0; l < model.layers; ++l) {
        model.fwd[l].W -= lr * grads.fwd[l].W;
        model.fwd[l].U -= lr * grads.fwd[l].U;
        model.fwd[l].b -= lr * grads.fwd[l].b;
        model.bwd[l].W -= lr * grads.bwd[l].W;
        model.bwd[l].U -= lr * grads.bwd[l].U;
        model.bwd[l].b -= lr * grads.bwd[l].b;
      }
      model.head_w -= lr * grads.head_w;
      model.head_b -= lr * grads.head_b;
    }
    epoch_loss /= static_cast<double>(corpus.size());
    if (!std::isfinite(epoch_loss))
      throw divergence_error("epoch loss became non-finite");
    if (loss_trace) loss_trace->push_back(epoch_loss);
  }
  return model;
}

TaggedCorpus load_tagged_corpus(const std::string& path,
                                const std::vector<std::string>& known_tags) {
  std::ifstream in(path);
  if (!in) throw corpus_error("cannot open corpus: " + path, 0);
  TaggedCorpus corpus;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string script_name, tokens_field, tags_field;
    if (!std::getline(fields, script_name, '\t') ||
        !std::getline(fields, tokens_field, '\t') ||
        !std::getline(fields, tags_field))
      throw corpus_error("expected SCRIPT\\tTOKENS\\tTAGS", lineno);
    auto script = parse_script(script_name);
    if (!script)
      throw corpus_error("unknown script '" + script_name + "'", lineno);
    TaggedSentence sentence;
    sentence.script = *script;
    std::istringstream ts(tokens_field);
    std::string item;
    while (ts >> item) sentence.tokens.push_back(item);
    std::istringstream gs(tags_field);
    while (gs >> item) sentence.tags.push_back(item);
    if (sentence.tokens.empty())
      throw corpus_error("empty token sequence", lineno);
    if (sentence.tokens.size() != sentence.tags.size())
      throw corpus_error("token and tag counts differ", lineno);
    if (!known_tags.empty()) {
      for (const auto& tag : sentence.tags) {
        if (tag == "O") continue;
        if (std::find(known_tags.begin(), known_tags.end(), tag) ==
            known_tags.end())
          throw corpus_error("unknown tag '" + tag + "'", lineno);
      }
    }
    corpus.push_back(std::move(sentence));
  }
  return corpus;
}

void save_tagged_corpus(const TaggedCorpus& corpus, std::ostream& out) {
  for (const auto& sentence : corpus) {
    out << script_name(sentence.script) << '\t';
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i)
      out << (i ? " " : "") << sentence.tokens[i];
    out << '\t';
    for (std::size_t i = 0; i < sentence.tags.size(); ++i)
      out << (i ? " " : "") << sentence.tags[i];
    out << '\n';
  }
}

TaggerModel train_on_corpus(const TaggedCorpus& corpus,
                            const std::vector<std::string>& table_tags,
                            const TrainOptions& options,
                            std::vector<double>* loss_trace) {
  std::vector<std::string> token_texts;
  for (const auto& sentence : corpus)
    for (const auto& token : sentence.tokens) token_texts.push_back(token);
  Vocab vocab = Vocab::build(token_texts, table_tags);
  std::vector<TrainExample> examples;
  examples.reserve(corpus.size());
  for (const auto& sentence : corpus) {
    TrainExample ex;
    for (const auto& token : sentence.tokens)
      ex.token_ids.push_back(vocab.token_id(token));
    for (const auto& tag : sentence.tags) {
      auto id = vocab.tag_id(tag);
      if (!id) throw error("tag '" + tag + "' missing from inventory");
      ex.tag_ids.push_back(*id);
    }
    examples.push_back(std::move(ex));
  }
  return train(examples, vocab, options, loss_trace);
}

namespace {

void write_matrix(std::ostream& out, const std::string& name,
                  const Eigen::MatrixXd& m) {
  out << "PARAM\t" << name << '\t' << m.rows() << '\t' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out << (c ? " " : "") << format_double(m(r, c));
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix(std::istream& in, const std::string& expect_name,
                            Eigen::Index expect_rows,
                            Eigen::Index expect_cols) {
  std::string line;
  if (!std::getline(in, line))
    throw format_error("missing parameter block", expect_name);
  std::istringstream header(line);
  std::string keyword, name;
  Eigen::Index rows = 0, cols = 0;
  if (!std::getline(header, keyword, '\t') || keyword != "PARAM" ||
      !std::getline(header, name, '\t') || !(header >> rows >> cols))
    throw format_error("malformed PARAM header", expect_name);
  if (name != expect_name)
    throw format_error("expected this block, found '" + name + "'",
                       expect_name);
  if (rows != expect_rows || cols != expect_cols)
    throw format_error("dimensions disagree with the header", expect_name);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!std::getline(in, line))
      throw format_error("truncated parameter block", expect_name);
    std::istringstream values(line);
    for (Eigen::Index c = 0; c < cols; ++c)
      if (!(values >> m(r, c)))
        throw format_error("short row " + std::to_string(r), expect_name);
  }
  return m;
}

}  // namespace

void save_model(const TaggerModel& model, std::ostream& out) {
  out << "BBTAGGER\t1\n";
  out << "DIMS\t" << model.embed_dim << '\t' << model.hidden_dim << '\t'
      << model.layers << '\t' << model.vocab.vocab_size() << '\t'
      << model.vocab.tag_count() << '\n';
  out << "DROPOUT\t" << format_double(model.dropout) << '\n';
  out << "SEED\t" << model.seed << '\n';
  out << "TOKENS\t" << model.vocab.vocab_size() << '\n';
  for (const auto& token : model.vocab.tokens) out << token << '\n';
  out << "TAGS\t" << model.vocab.tag_count() << '\n';
  for (const auto& tag : model.vocab.tags) out << tag << '\n';
  write_matrix(out, "embedding", model.embedding);
  for (int l = 0; l < model.layers; ++l) {
    const std::string base = "lstm." + std::to_string(l) + ".";
    write_matrix(out, base + "fwd.W", model.fwd[l].W);
    write_matrix(out, base + "fwd.U", model.fwd[l].U);
    write_matrix(out, base + "fwd.b", model.fwd[l].b);
    write_matrix(out, base + "bwd.W", model.bwd[l].W);
    write_matrix(out, base + "bwd.U", model.bwd[l].U);
    write_matrix(out, base + "bwd.b", model.bwd[l].b);
  }
  write_matrix(out, "head.W", model.head_w);
  write_matrix(out, "head.b", model.head_b);
  out << "END\n";
}

void save_model(const TaggerModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw format_error("cannot write model file: " + path);
  save_model(model, out);
  if (!out) throw format_error("failed writing model file: " + path);
}

TaggerModel load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "BBTAGGER\t1")
    throw format_error("bad magic; expected BBTAGGER 1", "header");
  TaggerModel model;
  int vocab_size = 0, tag_count = 0;
  {
    if (!std::getline(in, line)) throw format_error("missing DIMS", "header");
    std::istringstream fields(line);
    std::string keyword;
    if (!std::getline(fields, keyword, '\t') || keyword != "DIMS" ||
        !(fields >> model.embed_dim >> model.hidden_dim >> model.layers >>
          vocab_size >> tag_count))
      throw format_error("malformed DIMS line", "header");
    if (model.embed_dim <= 0 || model.hidden_dim <= 0 || model.layers <= 0 ||
        vocab_size < 2 || tag_count < 1)
      throw format_error("dimensions out of range", "header");
  }
  {
    if (!std::getline(in, line))
      throw format_error("missing DROPOUT", "header");
    std::istringstream fields(line);
    std::string keyword;
    if (!std::getline(fields, keyword, '\t') || keyword != "DROPOUT" ||
        !(fields >> model.dropout) || model.dropout < 0.0 ||
        model.dropout >= 1.0)
      throw format_error("malformed DROPOUT line", "header");
  }
  {
    if (!std::getline(in, line)) throw format_error("missing SEED", "header");
    std::istringstream fields(line);
    std::string keyword;
    if (!std::getline(fields, keyword, '\t') || keyword != "SEED" ||
        !(fields >> model.seed))
      throw format_error("malformed SEED line", "header");
  }
  auto read_string_block = [&](const std::string& keyword,
                               int count) -> std::vector<std::string> {
    if (!std::getline(in, line))
      throw format_error("missing " + keyword, keyword);
    std::istringstream fields(line);
    std::string kw;
    int n = 0;
    if (!std::getline(fields, kw, '\t') || kw != keyword || !(fields >> n) ||
        n != count)
      throw format_error("malformed " + keyword + " header", keyword);
    std::vector<std::string> items;
    for (int i = 0; i < n; ++i) {
      if (!std::getline(in, line))
        throw format_error("truncated " + keyword + " block", keyword);
      items.push_back(line);
    }
    return items;
  };
  std::vector<std::string> tokens = read_string_block("TOKENS", vocab_size);
  std::vector<std::string> tags = read_string_block("TAGS", tag_count);
  if (tokens.size() < 2 || tokens[0] != "<pad>" || tokens[1] != "<unk>")
    throw format_error("reserved token rows missing", "TOKENS");
  if (tags.empty() || tags[0] != "O")
    throw format_error("null tag row missing", "TAGS");
  model.vocab = Vocab::build({tokens.begin() + 2, tokens.end()},
                             {tags.begin() + 1, tags.end()});
  if (model.vocab.vocab_size() != vocab_size ||
      model.vocab.tag_count() != tag_count)
    throw format_error("duplicate vocabulary entries", "TOKENS");

  const int E = model.embed_dim;
  const int H = model.hidden_dim;
  model.embedding = read_matrix(in, "embedding", vocab_size, E);
  for (int l = 0; l < model.layers; ++l) {
    const std::string base = "lstm." + std::to_string(l) + ".";
    const int D = l == 0 ? E : 2 * H;
    LstmParams f, b;
    f.W = read_matrix(in, base + "fwd.W", 4 * H, D);
    f.U = read_matrix(in, base + "fwd.U", 4 * H, H);
    f.b = read_matrix(in, base + "fwd.b", 4 * H, 1);
    b.W = read_matrix(in, base + "bwd.W", 4 * H, D);
    b.U = read_matrix(in, base + "bwd.U", 4 * H, H);
    b.b = read_matrix(in, base + "bwd.b", 4 * H, 1);
    model.fwd.push_back(std::move(f));
    model.bwd.push_back(std::move(b));
  }
  model.head_w = read_matrix(in, "head.W", tag_count, 2 * H);
  model.head_b = read_matrix(in, "head.b", tag_count, 1);
  if (!std::getline(in, line) || line != "END")
    throw format_error("missing END marker", "END");
  return model;
}

TaggerModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw format_error("cannot open model file: " + path);
  return load_model(in);
}

std::vector<std::size_t> disambiguate(const std::vector<std::string>& tokens,
                                      const std::vector<SiteQuery>& sites,
                                      const TaggerModel& model) {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& token : tokens) ids.push_back(model.vocab.token_id(token));
  Eigen::MatrixXd scores = bilstm_forward(ids, model, false, 0);
  std::vector<std::size_t> chosen;
  chosen.reserve(sites.size());
  for (const auto& site : sites) {
    if (site.position >= tokens.size())
      throw error("site position out of range");
    if (site.candidate_tags.size() < 2)
      throw error("ambiguous site needs at least two candidates");
    std::size_t best_candidate = 0;
    int best_tag = std::numeric_limits<int>::max();
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < site.candidate_tags.size(); ++k) {
      auto tag = model.vocab.tag_id(site.candidate_tags[k]);
      if (!tag)
        throw unknown_tag_error("tag '" + site.candidate_tags[k] +
                                "' missing from the model inventory");
      double score = scores(static_cast<Eigen::Index>(site.position), *tag);
      if (score > best_score || (score == best_score && *tag < best_tag)) {
        best_score = score;
        best_tag = *tag;
        best_candidate = k;
      }
    }
    chosen.push_back(best_candidate);
  }
  return chosen;
}

}  // namespace bharti
