#include "lplab/io.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

namespace lplab {

std::string collection_to_text(const Collection& c) {
  std::ostringstream os;
  for (const auto& cube : c.cubes) os << cube.str() << '\n';
  return os.str();
}

Collection collection_from_text(const std::string& text, int cap_scale) {
  std::istringstream is(text);
  std::string line;
  std::vector<DyadicCube> cubes;
  int dim = -1;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    long k;
    if (!(ls >> k)) throw std::runtime_error("collection_from_text: bad scale token");
    std::vector<std::uint32_t> pos;
    long v;
    while (ls >> v) {
      if (v < 0) throw std::runtime_error("collection_from_text: negative position");
      pos.push_back(static_cast<std::uint32_t>(v));
    }
    if (pos.empty()) throw std::runtime_error("collection_from_text: missing position");
    if (dim < 0) dim = static_cast<int>(pos.size());
    if (static_cast<int>(pos.size()) != dim)
      throw std::runtime_error("collection_from_text: inconsistent dimension");
    cubes.emplace_back(dim, static_cast<int>(k), pos);
  }
  if (dim < 0) dim = 1;
  return Collection(dim, std::move(cubes), cap_scale);
}

void save_collection(const std::string& path, const Collection& c) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_collection: cannot open " + path);
  os << collection_to_text(c);
}

Collection load_collection(const std::string& path, int cap_scale) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_collection: cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return collection_from_text(buf.str(), cap_scale);
}

namespace {

using nlohmann::json;

json header_json(const GridSpec& spec, const std::vector<std::size_t>& vshape,
                 const char* layout, std::size_t count) {
  json h;
  h["logres"] = spec.logres;
  h["grouping"] = spec.grouping;
  h["vshape"] = vshape;
  h["layout"] = layout;
  h["count"] = count;
  return h;
}

void write_payload(std::ofstream& os, const double* data, std::size_t n) {
  os.write(reinterpret_cast<const char*>(data),
           static_cast<std::streamsize>(n * sizeof(double)));
}

json read_header(std::ifstream& is, const std::string& path) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("grid function load: missing header in " + path);
  return json::parse(line);
}

GridSpec spec_from_header(const json& h) {
  return GridSpec(h.at("logres").get<std::vector<int>>(),
                  h.at("grouping").get<std::vector<int>>());
}

}  // namespace

void save_gridfunction(const std::string& path, const GridFunction& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_gridfunction: cannot open " + path);
  os << header_json(f.spec(), f.vshape(), "complex64x2", f.values().size()).dump()
     << '\n';
  write_payload(os, reinterpret_cast<const double*>(f.values().data()),
                f.values().size() * 2);
}

GridFunction load_gridfunction(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_gridfunction: cannot open " + path);
  json h = read_header(is, path);
  if (h.at("layout") != "complex64x2")
    throw std::runtime_error("load_gridfunction: layout mismatch in " + path);
  GridFunction f(spec_from_header(h), h.at("vshape").get<std::vector<std::size_t>>());
  std::size_t count = h.at("count").get<std::size_t>();
  if (count != f.values().size())
    throw std::runtime_error("load_gridfunction: count mismatch in " + path);
  is.read(reinterpret_cast<char*>(f.values().data()),
          static_cast<std::streamsize>(count * 2 * sizeof(double)));
  if (!is) throw std::runtime_error("load_gridfunction: truncated payload in " + path);
  return f;
}

void save_realfield(const std::string& path, const RealField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_realfield: cannot open " + path);
  os << header_json(f.spec(), f.vshape(), "real64", f.values().size()).dump() << '\n';
  write_payload(os, f.values().data(), f.values().size());
}

RealField load_realfield(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_realfield: cannot open " + path);
  json h = read_header(is, path);
  if (h.at("layout") != "real64")
    throw std::runtime_error("load_realfield: layout mismatch in " + path);
  RealField f(spec_from_header(h), h.at("vshape").get<std::vector<std::size_t>>());
  std::size_t count = h.at("count").get<std::size_t>();
  if (count != f.values().size())
    throw std::runtime_error("load_realfield: count mismatch in " + path);
  is.read(reinterpret_cast<char*>(f.values().data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!is) throw std::runtime_error("load_realfield: truncated payload in " + path);
  return f;
}

std::uint64_t fnv1a(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t digest_of(const GridFunction& f) {
  return fnv1a(f.values().data(), f.values().size() * sizeof(cplx));
}

std::uint64_t digest_of(const RealField& f) {
  return fnv1a(f.values().data(), f.values().size() * sizeof(double));
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

}  // namespace lplab
