#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "qtomo/measurement.hpp"

namespace qtomo {

/// Text format:
///
///     n m provenance
///     re,im re,im ...      (n entries; one line per row, m*n lines)
///
/// Rows of unitary k occupy lines k*n .. k*n+n-1. Numbers are written with
/// 17 significant digits, so reading back reproduces every double exactly.
void write_ensemble(std::ostream& os, const UnitaryEnsemble& e);
UnitaryEnsemble read_ensemble(std::istream& is);

void save_ensemble(const std::filesystem::path& path, const UnitaryEnsemble& e);
UnitaryEnsemble load_ensemble(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over path.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

}  // namespace qtomo
