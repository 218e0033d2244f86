#include "wltag/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <tuple>

#include "wltag/error.hpp"

namespace wltag {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'W', 'L', 'T', 'A', 'G', 'C', 'K', 'P'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError("checkpoint truncated");
  return v;
}

std::string get_string(std::istream& in) {
  const auto n = get<std::uint32_t>(in);
  if (n > (1u << 24)) throw FormatError("checkpoint string too long");
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw FormatError("checkpoint truncated");
  return s;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.types.num_types()));
  for (const auto& t : ckpt.types.types()) put_string(out, t);

  const auto& d = ckpt.params.dims;
  for (int v : {d.word_dim, d.char_dim, d.char_filters, d.char_width, d.hidden}) put<std::int32_t>(out, v);
  put<double>(out, d.char_dropout);
  put<std::uint64_t>(out, ckpt.params.num_labels);

  put<std::uint64_t>(out, ckpt.vocab.num_words());
  for (const auto& w : ckpt.vocab.words()) put_string(out, w);
  put<std::uint64_t>(out, ckpt.vocab.num_chars());
  for (char32_t c : ckpt.vocab.chars()) put<std::uint32_t>(out, static_cast<std::uint32_t>(c));

  put<std::uint32_t>(out, static_cast<std::uint32_t>(kNumParams));
  for (std::size_t k = 0; k < kNumParams; ++k) {
    const auto& m = ckpt.params.values.tensors[k];
    put_string(out, std::string(param_name(param_at(k))));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
    out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  }
  if (!out) throw FormatError("failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw FormatError("not a wltag checkpoint");
  const auto version = get<std::uint32_t>(in);
  if (version != kCheckpointVersion) throw FormatError("unsupported checkpoint version " + std::to_string(version));

  Checkpoint ck;
  std::vector<std::string> types(get<std::uint32_t>(in));
  for (auto& t : types) t = get_string(in);
  ck.types = TypeSystem::build(std::move(types));

  auto& d = ck.params.dims;
  d.word_dim = get<std::int32_t>(in);
  d.char_dim = get<std::int32_t>(in);
  d.char_filters = get<std::int32_t>(in);
  d.char_width = get<std::int32_t>(in);
  d.hidden = get<std::int32_t>(in);
  d.char_dropout = get<double>(in);
  ck.params.num_labels = get<std::uint64_t>(in);
  if (ck.params.num_labels != ck.types.num_labels()) throw FormatError("checkpoint label count does not match types");

  const auto nw = get<std::uint64_t>(in);
  if (nw > (1u << 28)) throw FormatError("checkpoint vocabulary too large");
  std::vector<std::string> words(nw);
  for (auto& w : words) w = get_string(in);
  const auto nc = get<std::uint64_t>(in);
  if (nc > (1u << 24)) throw FormatError("checkpoint char table too large");
  std::vector<char32_t> chars(nc);
  for (auto& c : chars) c = static_cast<char32_t>(get<std::uint32_t>(in));
  ck.vocab = Vocabulary::from_tables(std::move(words), std::move(chars));

  const auto count = get<std::uint32_t>(in);
  if (count != kNumParams) throw FormatError("checkpoint tensor count mismatch");
  for (std::size_t k = 0; k < kNumParams; ++k) {
    const auto name = get_string(in);
    if (name != param_name(param_at(k))) throw FormatError("unexpected tensor " + name);
    const auto rows = get<std::uint64_t>(in), cols = get<std::uint64_t>(in);
    if (rows * cols > (1ull << 32)) throw FormatError("tensor too large in checkpoint");
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) throw FormatError("checkpoint truncated");
    ck.params.values.tensors[k] = std::move(m);
  }

  // Shapes must agree with dims, vocabulary and labels.
  const auto H = d.hidden, D = d.input_dim();
  const auto K = static_cast<Eigen::Index>(ck.params.num_labels);
  auto expect = [&](ParamId id, Eigen::Index r, Eigen::Index c) {
    const auto& m = ck.params[id];
    if (m.rows() != r || m.cols() != c)
      throw FormatError("checkpoint tensor " + std::string(param_name(id)) + " has the wrong shape");
  };
  expect(ParamId::WordEmbedding, d.word_dim, static_cast<Eigen::Index>(ck.vocab.num_words()));
  expect(ParamId::CharEmbedding, d.char_dim, static_cast<Eigen::Index>(ck.vocab.num_chars()));
  expect(ParamId::ConvWeight, d.char_filters, d.char_width * d.char_dim);
  expect(ParamId::ConvBias, d.char_filters, 1);
  for (auto [in_id, rec, bias] : {std::tuple{ParamId::FwdInput, ParamId::FwdRecurrent, ParamId::FwdBias},
                                  std::tuple{ParamId::BwdInput, ParamId::BwdRecurrent, ParamId::BwdBias}}) {
    expect(in_id, 4 * H, D);
    expect(rec, 4 * H, H);
    expect(bias, 4 * H, 1);
  }
  expect(ParamId::ProjWeight, K, 2 * H);
  expect(ParamId::ProjBias, K, 1);
  expect(ParamId::Transition, K + 2, K + 2);
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace wltag
