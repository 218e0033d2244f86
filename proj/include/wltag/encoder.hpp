#pragma once

// Char-CNN + word embedding -> Bi-LSTM -> softmax projection, with a
// hand-written reverse pass. The forward pass records everything the
// reverse pass needs in an EncoderTape.

#include <string>
#include <vector>

#include "wltag/params.hpp"
#include "wltag/rng.hpp"

namespace wltag {

inline constexpr std::size_t kMaxSentenceLength = 256;

struct EncodedSentence {
  std::vector<int> words;
  std::vector<std::vector<int>> chars;
  std::size_t size() const { return words.size(); }
};

// Truncates to max_length tokens; *truncated reports whether it did.
EncodedSentence encode_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                              std::size_t max_length = kMaxSentenceLength, bool* truncated = nullptr);

struct CharPathTape {
  Matrix windows;            // (width * char_dim) x chars
  std::vector<int> argmax;   // winning window per filter
  Vector mask;               // dropout scale per filter; empty when dropout is off
};

struct LstmTape {
  Matrix gates;   // 4H x n, post-activation (i, f, g, o)
  Matrix cells;   // H x n
  Matrix hidden;  // H x n
};

struct EncoderTape {
  std::vector<CharPathTape> char_paths;
  std::vector<int> words;
  std::vector<std::vector<int>> chars;
  Matrix inputs;     // D x n
  LstmTape forward;  // left-to-right
  LstmTape backward; // right-to-left, stored by position
  Matrix outputs;    // 2H x n, [forward; backward]
  Matrix log_probs;  // |Y| x n
};

// Dropout applies to the char features only, and only when dropout_rng is non-null.
EncoderTape encoder_forward(const EncodedSentence& sentence, const ModelParams& params, Rng* dropout_rng = nullptr);

// Accumulates d(loss)/d(params) into grads given d(loss)/d(log_probs).
void encoder_backward(const EncoderTape& tape, const Matrix& d_log_probs, const ModelParams& params, Gradients& grads);

// Single-word representation [word embedding; char features].
Vector embed_word(int word_id, const std::vector<int>& char_ids, const ModelParams& params, bool dropout_active,
                  Rng* rng);

// Bi-LSTM over a sequence of word vectors; each output is [forward; backward].
// Throws ContractError on an empty sequence.
std::vector<Vector> encode_sequence(const std::vector<Vector>& inputs, const ModelParams& params);

// log-softmax(W h + b)
Vector emission_log_probs(const Vector& h, const ModelParams& params);

}  // namespace wltag
