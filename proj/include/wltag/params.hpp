#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wltag {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Word and character indices. 0 is PAD and 1 is UNK in both tables.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  Vocabulary();

  int add_word(const std::string& word);
  void add_chars_of(std::string_view word);
  int word_id(const std::string& word) const;
  int char_id(char32_t c) const;
  // Character ids of a word; a single PAD for the empty word.
  std::vector<int> char_ids(std::string_view word) const;

  std::size_t num_words() const { return words_.size(); }
  std::size_t num_chars() const { return chars_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<char32_t>& chars() const { return chars_; }

  // Rebuilds a vocabulary from its serialized tables (specials included).
  static Vocabulary from_tables(std::vector<std::string> words, std::vector<char32_t> chars);

  bool operator==(const Vocabulary& o) const { return words_ == o.words_ && chars_ == o.chars_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> word_index_;
  std::vector<char32_t> chars_;
  std::unordered_map<char32_t, int> char_index_;
};

struct EncoderDims {
  int word_dim = 100;
  int char_dim = 30;
  int char_filters = 30;
  int char_width = 3;
  int hidden = 150;  // per direction
  double char_dropout = 0.5;

  int input_dim() const { return word_dim + char_filters; }
  int output_dim() const { return 2 * hidden; }
  bool operator==(const EncoderDims&) const = default;
};

enum class ParamId : std::size_t {
  WordEmbedding,   // word_dim x |V|, one column per word
  CharEmbedding,   // char_dim x |Vc|
  ConvWeight,      // filters x (width * char_dim)
  ConvBias,        // filters x 1
  FwdInput,        // 4H x D, gate rows ordered i, f, g, o
  FwdRecurrent,    // 4H x H
  FwdBias,         // 4H x 1
  BwdInput,
  BwdRecurrent,
  BwdBias,
  ProjWeight,      // |Y| x 2H
  ProjBias,        // |Y| x 1
  Transition,      // (|Y|+2) x (|Y|+2); row = from, col = to; START = |Y|, STOP = |Y|+1
  Count
};

inline constexpr std::size_t kNumParams = static_cast<std::size_t>(ParamId::Count);
std::string_view param_name(ParamId id);
inline ParamId param_at(std::size_t i) { return static_cast<ParamId>(i); }

// A set of tensors shaped like the model; used for values, gradients and optimizer moments.
struct TensorSet {
  std::array<Matrix, kNumParams> tensors;

  Matrix& operator[](ParamId id) { return tensors[static_cast<std::size_t>(id)]; }
  const Matrix& operator[](ParamId id) const { return tensors[static_cast<std::size_t>(id)]; }

  static TensorSet zeros_like(const TensorSet& other);
  void set_zero();
  TensorSet& operator+=(const TensorSet& other);
  std::size_t size() const;
  bool all_finite() const;
  bool operator==(const TensorSet& other) const;
};

using Gradients = TensorSet;

struct ModelParams {
  EncoderDims dims;
  std::size_t num_labels = 0;
  TensorSet values;

  Matrix& operator[](ParamId id) { return values[id]; }
  const Matrix& operator[](ParamId id) const { return values[id]; }

  int start_state() const { return static_cast<int>(num_labels); }
  int stop_state() const { return static_cast<int>(num_labels) + 1; }

  // LSTM/projection/conv weights uniform in [-0.1, 0.1]; embeddings uniform in
  // ±sqrt(3/dim); biases zero except forget gates (1.0); transitions zero.
  static ModelParams initialize(const EncoderDims& dims, std::size_t num_words, std::size_t num_chars,
                                std::size_t num_labels, std::uint64_t seed);

  Gradients zero_gradients() const { return TensorSet::zeros_like(values); }
};

// Overwrites rows of the word embedding table from `word v1 ... vD` lines.
// Words missing from the vocabulary are skipped; returns the number loaded.
std::size_t load_word_vectors(std::istream& in, const Vocabulary& vocab, ModelParams& params);

}  // namespace wltag
