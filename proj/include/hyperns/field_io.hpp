#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "hyperns/sparse_field.hpp"

namespace hyperns {

using json = nlohmann::json;

inline constexpr const char* kShellConvention = "sharp-1.5";
inline constexpr const char* kNormalization = "normalized-measure";

/// {"header": {alpha, convention, normalization}, "modes": [[kx,ky,kz,re1,im1,re2,im2,re3,im3], ...]}
/// Both members of each Hermitian pair are written, in lexicographic order.
json field_to_json(const SparseSpectralField& u, double alpha);

/// Inverse of field_to_json. Throws FormatError on any schema violation.
SparseSpectralField field_from_json(const json& doc);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& doc);

std::string read_text_file(const std::filesystem::path& path);

/// SHA-1 of "blob <size>\0<content>", i.e. the object id git assigns a file.
std::string git_blob_hash(const std::string& content);

}  // namespace hyperns
