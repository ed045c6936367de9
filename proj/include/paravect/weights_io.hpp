#pragma once

#include "paravect/circuits.hpp"

#include <string>
#include <vector>

namespace paravect::io {

/// Decimal rendering of a double with enough digits (17 significant) to
/// round-trip the exact IEEE value.
std::string formatDouble(double v);

/// Weight file schema: a JSON object with d_model, d_vocab, n, W_E, W_U and
/// layers (a list of lists of per-head objects W_Q/W_K/W_V/W_O/mixer), every
/// matrix as {"rows", "cols", "data"} with row-major data. Parse errors name
/// the offending field. Entries must be finite.
circuits::ToyModel readToyModel(const std::string& path);
void writeToyModel(const std::string& path, const circuits::ToyModel& m);

/// Encoding tables are bare JSON arrays of rows. For large tables a second
/// form is accepted: {"rows": R, "cols": C, "data_file": "relative/path"}
/// pointing at a raw little-endian double sidecar.
std::vector<Vector> readEncodingTable(const std::string& path);
void writeEncodingTable(const std::string& path, const std::vector<Vector>& rows);

/// Writes the sidecar variant: a small JSON descriptor at `path` plus the raw
/// doubles at `path` + ".bin".
void writeEncodingTableRaw(const std::string& path, const std::vector<Vector>& rows);

} // namespace paravect::io
