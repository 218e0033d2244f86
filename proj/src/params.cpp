#include "wltag/params.hpp"

#include <cmath>
#include <istream>
#include <sstream>
#include <tuple>

#include "wltag/error.hpp"
#include "wltag/rng.hpp"
#include "wltag/text.hpp"

namespace wltag {

Vocabulary::Vocabulary() {
  words_ = {"<pad>", "<unk>"};
  word_index_ = {{"<pad>", kPad}, {"<unk>", kUnk}};
  // Private-use code points stand in for the char specials.
  chars_ = {U'\U000F0000', U'\U000F0001'};
  char_index_ = {{chars_[0], kPad}, {chars_[1], kUnk}};
}

int Vocabulary::add_word(const std::string& word) {
  auto [it, inserted] = word_index_.try_emplace(word, static_cast<int>(words_.size()));
  if (inserted) words_.push_back(word);
  return it->second;
}

void Vocabulary::add_chars_of(std::string_view word) {
  for (char32_t c : utf8_codepoints(word)) {
    auto [it, inserted] = char_index_.try_emplace(c, static_cast<int>(chars_.size()));
    if (inserted) chars_.push_back(c);
  }
}

int Vocabulary::word_id(const std::string& word) const {
  auto it = word_index_.find(word);
  return it == word_index_.end() ? kUnk : it->second;
}

int Vocabulary::char_id(char32_t c) const {
  auto it = char_index_.find(c);
  return it == char_index_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::char_ids(std::string_view word) const {
  std::vector<int> ids;
  for (char32_t c : utf8_codepoints(word)) ids.push_back(char_id(c));
  if (ids.empty()) ids.push_back(kPad);
  return ids;
}

Vocabulary Vocabulary::from_tables(std::vector<std::string> words, std::vector<char32_t> chars) {
  Vocabulary v;
  if (words.size() < 2 || chars.size() < 2 || words[0] != v.words_[0] || words[1] != v.words_[1] ||
      chars[0] != v.chars_[0] || chars[1] != v.chars_[1])
    throw FormatError("vocabulary tables lack the PAD/UNK entries");
  v.words_.clear();
  v.word_index_.clear();
  v.chars_.clear();
  v.char_index_.clear();
  for (auto& w : words) {
    if (!v.word_index_.emplace(w, static_cast<int>(v.words_.size())).second)
      throw FormatError("duplicate word in vocabulary: " + w);
    v.words_.push_back(std::move(w));
  }
  for (char32_t c : chars) {
    if (!v.char_index_.emplace(c, static_cast<int>(v.chars_.size())).second)
      throw FormatError("duplicate character in vocabulary");
    v.chars_.push_back(c);
  }
  return v;
}

std::string_view param_name(ParamId id) {
  switch (id) {
    case ParamId::WordEmbedding: return "word_embedding";
    case ParamId::CharEmbedding: return "char_embedding";
    case ParamId::ConvWeight: return "conv_weight";
    case ParamId::ConvBias: return "conv_bias";
    case ParamId::FwdInput: return "fwd_input";
    case ParamId::FwdRecurrent: return "fwd_recurrent";
    case ParamId::FwdBias: return "fwd_bias";
    case ParamId::BwdInput: return "bwd_input";
    case ParamId::BwdRecurrent: return "bwd_recurrent";
    case ParamId::BwdBias: return "bwd_bias";
    case ParamId::ProjWeight: return "proj_weight";
    case ParamId::ProjBias: return "proj_bias";
    case ParamId::Transition: return "transition";
    case ParamId::Count: break;
  }
  return "?";
}

TensorSet TensorSet::zeros_like(const TensorSet& other) {
  TensorSet t;
  for (std::size_t i = 0; i < kNumParams; ++i) t.tensors[i] = Matrix::Zero(other.tensors[i].rows(), other.tensors[i].cols());
  return t;
}

void TensorSet::set_zero() {
  for (auto& m : tensors) m.setZero();
}

TensorSet& TensorSet::operator+=(const TensorSet& other) {
  for (std::size_t i = 0; i < kNumParams; ++i) tensors[i] += other.tensors[i];
  return *this;
}

std::size_t TensorSet::size() const {
  std::size_t n = 0;
  for (const auto& m : tensors) n += static_cast<std::size_t>(m.size());
  return n;
}

bool TensorSet::all_finite() const {
  for (const auto& m : tensors)
    if (!m.allFinite()) return false;
  return true;
}

bool TensorSet::operator==(const TensorSet& other) const {
  for (std::size_t i = 0; i < kNumParams; ++i) {
    const auto& a = tensors[i];
    const auto& b = other.tensors[i];
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    if (a.size() > 0 && a != b) return false;
  }
  return true;
}

ModelParams ModelParams::initialize(const EncoderDims& dims, std::size_t num_words, std::size_t num_chars,
                                    std::size_t num_labels, std::uint64_t seed) {
  if (dims.word_dim <= 0 || dims.char_dim <= 0 || dims.char_filters <= 0 || dims.char_width <= 0 ||
      dims.hidden <= 0 || dims.char_width % 2 == 0)
    throw ConfigError("encoder dimensions must be positive and the char window odd");
  if (num_labels == 0) throw ConfigError("model needs at least one label");

  ModelParams p;
  p.dims = dims;
  p.num_labels = num_labels;
  Rng rng(stream_seed(seed, {0x1417u}));
  auto uniform = [&](Eigen::Index rows, Eigen::Index cols, double scale) {
    Matrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.uniform(-scale, scale);
    return m;
  };

  const int H = dims.hidden;
  const int D = dims.input_dim();
  const auto K = static_cast<Eigen::Index>(num_labels);
  p[ParamId::WordEmbedding] = uniform(dims.word_dim, static_cast<Eigen::Index>(num_words), std::sqrt(3.0 / dims.word_dim));
  p[ParamId::CharEmbedding] = uniform(dims.char_dim, static_cast<Eigen::Index>(num_chars), std::sqrt(3.0 / dims.char_dim));
  p[ParamId::ConvWeight] = uniform(dims.char_filters, dims.char_width * dims.char_dim, 0.1);
  p[ParamId::ConvBias] = Matrix::Zero(dims.char_filters, 1);
  for (auto [in, rec, bias] : {std::tuple{ParamId::FwdInput, ParamId::FwdRecurrent, ParamId::FwdBias},
                               std::tuple{ParamId::BwdInput, ParamId::BwdRecurrent, ParamId::BwdBias}}) {
    p[in] = uniform(4 * H, D, 0.1);
    p[rec] = uniform(4 * H, H, 0.1);
    p[bias] = Matrix::Zero(4 * H, 1);
    p[bias].block(H, 0, H, 1).setOnes();
  }
  p[ParamId::ProjWeight] = uniform(K, 2 * H, 0.1);
  p[ParamId::ProjBias] = Matrix::Zero(K, 1);
  p[ParamId::Transition] = Matrix::Zero(K + 2, K + 2);
  return p;
}

std::size_t load_word_vectors(std::istream& in, const Vocabulary& vocab, ModelParams& params) {
  auto& emb = params[ParamId::WordEmbedding];
  std::string line;
  std::size_t loaded = 0, lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    if (fields.size() == 2 && lineno == 1) continue;  // word2vec-style "count dim" header
    if (static_cast<Eigen::Index>(fields.size()) != emb.rows() + 1)
      throw FormatError("embedding line " + std::to_string(lineno) + ": expected " + std::to_string(emb.rows()) +
                        " values");
    const int id = vocab.word_id(fields[0]);
    if (id == Vocabulary::kUnk && fields[0] != "<unk>") continue;
    for (Eigen::Index d = 0; d < emb.rows(); ++d) {
      try {
        emb(d, id) = std::stod(fields[static_cast<std::size_t>(d) + 1]);
      } catch (const std::exception&) {
        throw FormatError("embedding line " + std::to_string(lineno) + ": bad number");
      }
    }
    ++loaded;
  }
  return loaded;
}

}  // namespace wltag
