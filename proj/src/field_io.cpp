#include "hyperns/field_io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "hyperns/errors.hpp"

namespace hyperns {

json field_to_json(const SparseSpectralField& u, double alpha) {
  json modes = json::array();
  for (const auto& e : u.entries()) {
    modes.push_back({e.k.x, e.k.y, e.k.z, e.coeff[0].real(), e.coeff[0].imag(), e.coeff[1].real(),
                     e.coeff[1].imag(), e.coeff[2].real(), e.coeff[2].imag()});
  }
  return json{{"header", {{"alpha", alpha}, {"convention", kShellConvention}, {"normalization", kNormalization}}},
              {"modes", std::move(modes)}};
}

SparseSpectralField field_from_json(const json& doc) {
  try {
    if (!doc.is_object() || !doc.contains("header") || !doc.contains("modes"))
      throw FormatError("field file needs 'header' and 'modes'");
    const auto& header = doc.at("header");
    if (header.value("convention", std::string{}) != kShellConvention)
      throw FormatError("unsupported shell convention");
    if (header.value("normalization", std::string{}) != kNormalization)
      throw FormatError("unsupported Fourier normalization");
    const auto& modes = doc.at("modes");
    if (!modes.is_array()) throw FormatError("'modes' must be an array");
    std::vector<SpectralEntry> entries;
    entries.reserve(modes.size());
    for (const auto& rec : modes) {
      if (!rec.is_array() || rec.size() != 9) throw FormatError("mode records have 9 entries");
      for (int i = 0; i < 3; ++i)
        if (!rec[i].is_number_integer()) throw FormatError("frequencies must be integers");
      for (int i = 3; i < 9; ++i)
        if (!rec[i].is_number()) throw FormatError("coefficients must be numbers");
      SpectralEntry e;
      e.k = {rec[0].get<int>(), rec[1].get<int>(), rec[2].get<int>()};
      for (int c = 0; c < 3; ++c) e.coeff[c] = {rec[3 + 2 * c].get<double>(), rec[4 + 2 * c].get<double>()};
      entries.push_back(e);
    }
    return SparseSpectralField(std::move(entries));
  } catch (const json::exception& ex) {
    throw FormatError(std::string("malformed field file: ") + ex.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& ex) {
    throw FormatError(path.string() + ": " + ex.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << doc.dump(1) << '\n';
}

std::string git_blob_hash(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, content.data(), content.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

}  // namespace hyperns
