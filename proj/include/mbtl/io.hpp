#pragma once

#include "mbtl/core.hpp"

#include <string>

namespace mbtl {

/// Reads a transfer matrix from the JSON schema (schema_version 1). Rejects
/// dims/contexts/trials size mismatches with a descriptive error.
TransferMatrix load_transfer_matrix(const std::string& path);

void save_transfer_matrix(const TransferMatrix& matrix, const std::string& path);

}  // namespace mbtl
