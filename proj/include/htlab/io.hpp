#pragma once

#include <cstdint>
#include <string>

#include "htlab/grid.hpp"
#include "htlab/kernel.hpp"
#include "json.hpp"

namespace htlab {

/// Payload precision of the binary grid container.
enum class Precision : std::uint32_t { Complex128 = 0, Complex64 = 1 };

/// Binary grid container (layout in docs/FORMAT.md): "HTGF", version, header,
/// axes, then the row-major payload, all little-endian.
std::string encode_grid_function(const GridFunction& f, Precision p = Precision::Complex128);
/// Throws FormatError on a malformed or truncated buffer.
GridFunction decode_grid_function(const std::string& bytes);

void write_grid_function(const std::string& path, const GridFunction& f, Precision p = Precision::Complex128);
GridFunction read_grid_function(const std::string& path);

/// Sidecar describing the container: grid, precision, flags and caller provenance.
nlohmann::json grid_sidecar(const GridFunction& f, Precision p, const nlohmann::json& provenance);

/// Spectral record of a kernel table (everything but the samples).
nlohmann::json kernel_record_to_json(const KernelTable& K);
/// Restores the record; the result has no samples.
KernelTable kernel_record_from_json(const nlohmann::json& j);

/// Writes <base>.spectral.json and, when the table has samples, <base>.htgf with its
/// sidecar <base>.htgf.json. Returns the paths written.
std::vector<std::string> export_kernel(const std::string& base, const KernelTable& K, const nlohmann::json& provenance);

/// Reads a JSON document from a file; throws FormatError with the path on failure.
nlohmann::json read_json_file(const std::string& path);
/// Writes text verbatim (binary mode, no newline translation).
void write_text_file(const std::string& path, const std::string& text);
/// JSON with 2-space indentation and a trailing newline; numbers round-trip.
std::string dump_json(const nlohmann::json& j);

}  // namespace htlab
