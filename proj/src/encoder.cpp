#include "wltag/encoder.hpp"

#include <cmath>

#include "wltag/error.hpp"

namespace wltag {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Builds (width * char_dim) x L windows of char embeddings, zero outside the word.
Matrix char_windows(const std::vector<int>& chars, const Matrix& char_emb, int width) {
  const auto L = static_cast<Eigen::Index>(chars.size());
  const auto Cd = char_emb.rows();
  const int half = width / 2;
  Matrix w = Matrix::Zero(width * Cd, L);
  for (Eigen::Index j = 0; j < L; ++j) {
    for (int k = 0; k < width; ++k) {
      const Eigen::Index src = j + k - half;
      if (src < 0 || src >= L) continue;
      w.block(k * Cd, j, Cd, 1) = char_emb.col(chars[static_cast<std::size_t>(src)]);
    }
  }
  return w;
}

Vector char_features(const std::vector<int>& chars, const ModelParams& params, Rng* dropout_rng, CharPathTape& tape) {
  const auto& dims = params.dims;
  tape.windows = char_windows(chars, params[ParamId::CharEmbedding], dims.char_width);
  Matrix conv = params[ParamId::ConvWeight] * tape.windows;
  conv.colwise() += params[ParamId::ConvBias].col(0);

  const Eigen::Index F = conv.rows();
  Vector pooled(F);
  tape.argmax.assign(static_cast<std::size_t>(F), 0);
  for (Eigen::Index f = 0; f < F; ++f) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < conv.cols(); ++j)
      if (conv(f, j) > conv(f, best)) best = j;
    tape.argmax[static_cast<std::size_t>(f)] = static_cast<int>(best);
    pooled(f) = conv(f, best);
  }
  if (dropout_rng && dims.char_dropout > 0.0) {
    const double keep = 1.0 - dims.char_dropout;
    tape.mask.resize(F);
    for (Eigen::Index f = 0; f < F; ++f) tape.mask(f) = dropout_rng->uniform() < keep ? 1.0 / keep : 0.0;
    pooled.array() *= tape.mask.array();
  } else {
    tape.mask.resize(0);
  }
  return pooled;
}

// Runs one LSTM direction. reverse = true walks positions n-1 .. 0.
void lstm_forward(const Matrix& inputs, const Matrix& w_in, const Matrix& w_rec, const Matrix& bias, bool reverse,
                  LstmTape& tape) {
  const Eigen::Index n = inputs.cols();
  const Eigen::Index H = w_rec.cols();
  Matrix pre = w_in * inputs;
  pre.colwise() += bias.col(0);
  tape.gates.resize(4 * H, n);
  tape.cells.resize(H, n);
  tape.hidden.resize(H, n);

  Vector h = Vector::Zero(H), c = Vector::Zero(H), z(4 * H);
  for (Eigen::Index step = 0; step < n; ++step) {
    const Eigen::Index t = reverse ? n - 1 - step : step;
    z.noalias() = pre.col(t);
    z.noalias() += w_rec * h;
    auto g = tape.gates.col(t);
    for (Eigen::Index k = 0; k < H; ++k) {
      g(k) = sigmoid(z(k));
      g(H + k) = sigmoid(z(H + k));
      g(2 * H + k) = std::tanh(z(2 * H + k));
      g(3 * H + k) = sigmoid(z(3 * H + k));
      c(k) = g(H + k) * c(k) + g(k) * g(2 * H + k);
      h(k) = g(3 * H + k) * std::tanh(c(k));
    }
    tape.cells.col(t) = c;
    tape.hidden.col(t) = h;
  }
}

// Reverse pass of one direction. d_hidden is d(loss)/d(h_t) from above; adds
// input gradients into d_inputs.
void lstm_backward(const Matrix& inputs, const LstmTape& tape, const Matrix& d_hidden, const Matrix& w_in,
                   const Matrix& w_rec, bool reverse, Matrix& g_in, Matrix& g_rec, Matrix& g_bias, Matrix& d_inputs) {
  const Eigen::Index n = inputs.cols();
  const Eigen::Index H = w_rec.cols();
  Matrix dz(4 * H, n);
  Matrix h_prev = Matrix::Zero(H, n);
  Vector dh_next = Vector::Zero(H), dc_next = Vector::Zero(H);

  for (Eigen::Index step = n - 1; step >= 0; --step) {
    const Eigen::Index t = reverse ? n - 1 - step : step;
    const bool has_prev = step > 0;
    const Eigen::Index prev = reverse ? t + 1 : t - 1;
    const auto g = tape.gates.col(t);
    auto d = dz.col(t);
    for (Eigen::Index k = 0; k < H; ++k) {
      const double i = g(k), f = g(H + k), gg = g(2 * H + k), o = g(3 * H + k);
      const double c = tape.cells(k, t);
      const double c_prev = has_prev ? tape.cells(k, prev) : 0.0;
      const double tc = std::tanh(c);
      const double dh = d_hidden(k, t) + dh_next(k);
      const double dc = dh * o * (1.0 - tc * tc) + dc_next(k);
      d(k) = dc * gg * i * (1.0 - i);
      d(H + k) = dc * c_prev * f * (1.0 - f);
      d(2 * H + k) = dc * i * (1.0 - gg * gg);
      d(3 * H + k) = dh * tc * o * (1.0 - o);
      dc_next(k) = dc * f;
    }
    if (has_prev) h_prev.col(t) = tape.hidden.col(prev);
    dh_next.noalias() = w_rec.transpose() * d;
  }
  g_in.noalias() += dz * inputs.transpose();
  g_rec.noalias() += dz * h_prev.transpose();
  g_bias.col(0) += dz.rowwise().sum();
  d_inputs.noalias() += w_in.transpose() * dz;
}

void log_softmax_columns(Matrix& logits) {
  for (Eigen::Index t = 0; t < logits.cols(); ++t) {
    auto col = logits.col(t);
    const double m = col.maxCoeff();
    const double lse = m + std::log((col.array() - m).exp().sum());
    col.array() -= lse;
  }
}

}  // namespace

EncodedSentence encode_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab, std::size_t max_length,
                              bool* truncated) {
  const std::size_t n = std::min(tokens.size(), max_length);
  if (truncated) *truncated = tokens.size() > max_length;
  EncodedSentence out;
  out.words.reserve(n);
  out.chars.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.words.push_back(vocab.word_id(tokens[i]));
    out.chars.push_back(vocab.char_ids(tokens[i]));
  }
  return out;
}

EncoderTape encoder_forward(const EncodedSentence& sentence, const ModelParams& params, Rng* dropout_rng) {
  const auto n = static_cast<Eigen::Index>(sentence.size());
  if (n == 0) throw ContractError("cannot encode an empty sentence");
  const auto& dims = params.dims;
  EncoderTape tape;
  tape.words = sentence.words;
  tape.chars = sentence.chars;
  tape.char_paths.resize(sentence.size());
  tape.inputs.resize(dims.input_dim(), n);
  const auto& word_emb = params[ParamId::WordEmbedding];
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    const int w = sentence.words[ti];
    if (w < 0 || w >= word_emb.cols()) throw ContractError("word id outside the embedding table");
    for (int c : sentence.chars[ti])
      if (c < 0 || c >= params[ParamId::CharEmbedding].cols()) throw ContractError("char id outside the embedding table");
    tape.inputs.block(0, t, dims.word_dim, 1) = word_emb.col(w);
    tape.inputs.block(dims.word_dim, t, dims.char_filters, 1) =
        char_features(sentence.chars[ti], params, dropout_rng, tape.char_paths[ti]);
  }

  lstm_forward(tape.inputs, params[ParamId::FwdInput], params[ParamId::FwdRecurrent], params[ParamId::FwdBias], false,
               tape.forward);
  lstm_forward(tape.inputs, params[ParamId::BwdInput], params[ParamId::BwdRecurrent], params[ParamId::BwdBias], true,
               tape.backward);
  const int H = dims.hidden;
  tape.outputs.resize(2 * H, n);
  tape.outputs.topRows(H) = tape.forward.hidden;
  tape.outputs.bottomRows(H) = tape.backward.hidden;

  tape.log_probs = params[ParamId::ProjWeight] * tape.outputs;
  tape.log_probs.colwise() += params[ParamId::ProjBias].col(0);
  log_softmax_columns(tape.log_probs);
  return tape;
}

void encoder_backward(const EncoderTape& tape, const Matrix& d_log_probs, const ModelParams& params, Gradients& grads) {
  const auto& dims = params.dims;
  const Eigen::Index n = tape.log_probs.cols();
  const int H = dims.hidden;

  // log-softmax: dz = g - softmax * sum(g)
  Matrix d_logits = d_log_probs;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double s = d_log_probs.col(t).sum();
    d_logits.col(t).array() -= tape.log_probs.col(t).array().exp() * s;
  }
  grads[ParamId::ProjWeight].noalias() += d_logits * tape.outputs.transpose();
  grads[ParamId::ProjBias].col(0) += d_logits.rowwise().sum();
  const Matrix d_outputs = params[ParamId::ProjWeight].transpose() * d_logits;

  Matrix d_inputs = Matrix::Zero(dims.input_dim(), n);
  lstm_backward(tape.inputs, tape.forward, d_outputs.topRows(H), params[ParamId::FwdInput],
                params[ParamId::FwdRecurrent], false, grads[ParamId::FwdInput], grads[ParamId::FwdRecurrent],
                grads[ParamId::FwdBias], d_inputs);
  lstm_backward(tape.inputs, tape.backward, d_outputs.bottomRows(H), params[ParamId::BwdInput],
                params[ParamId::BwdRecurrent], true, grads[ParamId::BwdInput], grads[ParamId::BwdRecurrent],
                grads[ParamId::BwdBias], d_inputs);

  auto& g_word = grads[ParamId::WordEmbedding];
  auto& g_char = grads[ParamId::CharEmbedding];
  const auto& w_conv = params[ParamId::ConvWeight];
  const int Cd = dims.char_dim;
  const int half = dims.char_width / 2;
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    g_word.col(tape.words[ti]) += d_inputs.block(0, t, dims.word_dim, 1);

    const auto& path = tape.char_paths[ti];
    Vector d_pool = d_inputs.block(dims.word_dim, t, dims.char_filters, 1);
    if (path.mask.size() > 0) d_pool.array() *= path.mask.array();

    const auto L = path.windows.cols();
    Matrix d_conv = Matrix::Zero(dims.char_filters, L);
    for (int f = 0; f < dims.char_filters; ++f) d_conv(f, path.argmax[static_cast<std::size_t>(f)]) = d_pool(f);
    grads[ParamId::ConvWeight].noalias() += d_conv * path.windows.transpose();
    grads[ParamId::ConvBias].col(0) += d_pool;
    const Matrix d_windows = w_conv.transpose() * d_conv;
    const auto& chars = tape.chars[ti];
    for (Eigen::Index j = 0; j < L; ++j) {
      for (int k = 0; k < dims.char_width; ++k) {
        const Eigen::Index src = j + k - half;
        if (src < 0 || src >= L) continue;
        g_char.col(chars[static_cast<std::size_t>(src)]) += d_windows.block(k * Cd, j, Cd, 1);
      }
    }
  }
}

Vector embed_word(int word_id, const std::vector<int>& char_ids, const ModelParams& params, bool dropout_active,
                  Rng* rng) {
  const auto& dims = params.dims;
  std::vector<int> chars = char_ids.empty() ? std::vector<int>{Vocabulary::kPad} : char_ids;
  CharPathTape tape;
  Vector out(dims.input_dim());
  out.head(dims.word_dim) = params[ParamId::WordEmbedding].col(word_id);
  out.tail(dims.char_filters) = char_features(chars, params, dropout_active ? rng : nullptr, tape);
  return out;
}

std::vector<Vector> encode_sequence(const std::vector<Vector>& inputs, const ModelParams& params) {
  if (inputs.empty()) throw ContractError("cannot encode an empty sequence");
  const auto n = static_cast<Eigen::Index>(inputs.size());
  Matrix x(params.dims.input_dim(), n);
  for (Eigen::Index t = 0; t < n; ++t) x.col(t) = inputs[static_cast<std::size_t>(t)];
  LstmTape fwd, bwd;
  lstm_forward(x, params[ParamId::FwdInput], params[ParamId::FwdRecurrent], params[ParamId::FwdBias], false, fwd);
  lstm_forward(x, params[ParamId::BwdInput], params[ParamId::BwdRecurrent], params[ParamId::BwdBias], true, bwd);
  std::vector<Vector> out;
  out.reserve(inputs.size());
  for (Eigen::Index t = 0; t < n; ++t) {
    Vector h(2 * params.dims.hidden);
    h << fwd.hidden.col(t), bwd.hidden.col(t);
    out.push_back(std::move(h));
  }
  return out;
}

Vector emission_log_probs(const Vector& h, const ModelParams& params) {
  Matrix logits = params[ParamId::ProjWeight] * h + params[ParamId::ProjBias];
  log_softmax_columns(logits);
  return logits.col(0);
}

}  // namespace wltag
