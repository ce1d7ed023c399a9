#include "eqop/operator_io.hpp"

#include "eqop/binary_io.hpp"
#include "eqop/errors.hpp"

namespace eqop {

namespace {

constexpr std::uint16_t kOperatorVersion = 1;

}  // namespace

std::vector<std::uint8_t> encode_operator(const LatentOperator& op, const std::vector<int>& factors) {
  const auto& g = op.element();
  if (factors.size() != g.size() || factors.size() > 255) {
    throw ValidationError("operator element " + to_string(g) + " does not match the factor list");
  }
  io::ByteWriter out;
  out.tag("EQOP");
  out.u16(kOperatorVersion);
  out.u8(static_cast<std::uint8_t>(op.form()));
  out.u32(static_cast<std::uint32_t>(op.dim()));
  out.u8(static_cast<std::uint8_t>(factors.size()));
  for (int k : factors) out.u32(static_cast<std::uint32_t>(k));
  for (int i : g.indices) out.u32(static_cast<std::uint32_t>(i));
  switch (op.form()) {
    case OperatorForm::PermutationBlock:
      out.u32(static_cast<std::uint32_t>(op.block()));
      for (auto s : op.source()) out.u32(s);
      break;
    case OperatorForm::ComplexDiagonal:
      for (const auto& v : op.diagonal()) {
        out.f64(v.real());
        out.f64(v.imag());
      }
      break;
    case OperatorForm::DenseComplex:
      for (Eigen::Index r = 0; r < op.dim(); ++r) {
        for (Eigen::Index c = 0; c < op.dim(); ++c) {
          out.f64(op.matrix()(r, c).real());
          out.f64(op.matrix()(r, c).imag());
        }
      }
      break;
  }
  return out.data();
}

StoredOperator decode_operator(const std::vector<std::uint8_t>& bytes) {
  io::ByteReader in(bytes);
  in.expect_tag("EQOP", "operator");
  const std::size_t version_at = in.offset();
  if (in.u16() != kOperatorVersion) throw ParseError("unsupported EQOP version", version_at);
  const std::size_t form_at = in.offset();
  const auto form = in.u8();
  if (form > 2) throw ParseError("unknown operator form", form_at);
  const auto N = static_cast<Eigen::Index>(in.u32());
  const auto m = in.u8();
  std::vector<int> factors(m), idx(m);
  for (auto& k : factors) k = static_cast<int>(in.u32());
  const std::size_t element_at = in.offset();
  for (auto& i : idx) i = static_cast<int>(in.u32());
  for (std::size_t i = 0; i < m; ++i) {
    if (factors[i] < 1 || idx[i] < 0 || idx[i] >= factors[i]) {
      throw ParseError("operator element out of range", element_at);
    }
  }
  GroupElement g(std::move(idx));
  const std::size_t payload_at = in.offset();
  auto wrap = [&](auto&& build) {
    try {
      return build();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(std::string("invalid operator payload: ") + e.what(), payload_at);
    }
  };
  StoredOperator out{wrap([&] {
                       switch (static_cast<OperatorForm>(form)) {
                         case OperatorForm::PermutationBlock: {
                           const auto block = static_cast<int>(in.u32());
                           std::vector<std::uint32_t> source(static_cast<std::size_t>(N));
                           for (auto& s : source) s = in.u32();
                           return LatentOperator::permutation(std::move(source), block, g);
                         }
                         case OperatorForm::ComplexDiagonal: {
                           Eigen::VectorXcd d(N);
                           for (Eigen::Index n = 0; n < N; ++n) {
                             const double re = in.f64();
                             d[n] = {re, in.f64()};
                           }
                           return LatentOperator::diagonal(std::move(d), g);
                         }
                         case OperatorForm::DenseComplex:
                           break;
                       }
                       Eigen::MatrixXcd a(N, N);
                       for (Eigen::Index r = 0; r < N; ++r) {
                         for (Eigen::Index c = 0; c < N; ++c) {
                           const double re = in.f64();
                           a(r, c) = {re, in.f64()};
                         }
                       }
                       return LatentOperator::dense(std::move(a), g);
                     }),
                     factors};
  if (in.remaining() != 0) throw ParseError("trailing bytes after operator payload", in.offset());
  return out;
}

void write_operator(const LatentOperator& op, const std::vector<int>& factors, const std::filesystem::path& path) {
  io::write_atomic(path, encode_operator(op, factors));
}

StoredOperator read_operator(const std::filesystem::path& path) { return decode_operator(io::read_file(path)); }

}  // namespace eqop
