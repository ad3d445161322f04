#pragma once

#include <cstdint>
#include <string>

#include "lplab/grid.hpp"

namespace lplab {

// Collections serialize to text, one cube per line: "k x_1 ... x_d".
std::string collection_to_text(const Collection& c);
// Dimension is inferred from the token count per line; blank lines and
// lines starting with '#' are ignored.
Collection collection_from_text(const std::string& text, int cap_scale = 0);
void save_collection(const std::string& path, const Collection& c);
Collection load_collection(const std::string& path, int cap_scale = 0);

// Grid functions serialize as a single-line JSON header followed by the
// raw little-endian 64-bit float payload.  Complex samples interleave
// (re, im); real fields store one float per sample.
void save_gridfunction(const std::string& path, const GridFunction& f);
GridFunction load_gridfunction(const std::string& path);
void save_realfield(const std::string& path, const RealField& f);
RealField load_realfield(const std::string& path);

// FNV-1a 64-bit digest, used to tag report records with their inputs.
std::uint64_t fnv1a(const void* data, std::size_t n);
std::uint64_t digest_of(const GridFunction& f);
std::uint64_t digest_of(const RealField& f);
std::string hex64(std::uint64_t v);

}  // namespace lplab
