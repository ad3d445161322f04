#include "lplab/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "lplab/io.hpp"

namespace lplab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

void ReportRecord::add(const std::string& key, const std::string& value) {
  fields.push_back({key, "\"" + json_escape(value) + "\"", value});
}

void ReportRecord::add(const std::string& key, const char* value) {
  add(key, std::string(value));
}

void ReportRecord::add(const std::string& key, double value) {
  std::string t = format_double(value);
  // inf/nan are not JSON numbers; quote them so every line stays parseable.
  bool plain = std::isfinite(value);
  fields.push_back({key, plain ? t : "\"" + t + "\"", t});
}

void ReportRecord::add(const std::string& key, std::uint64_t value) {
  std::string t = std::to_string(value);
  fields.push_back({key, t, t});
}

void ReportRecord::add(const std::string& key, std::int64_t value) {
  std::string t = std::to_string(value);
  fields.push_back({key, t, t});
}

void ReportRecord::add(const std::string& key, int value) {
  add(key, static_cast<std::int64_t>(value));
}

void ReportRecord::add(const std::string& key, bool value) {
  std::string t = value ? "true" : "false";
  fields.push_back({key, t, t});
}

const std::string* ReportRecord::find(const std::string& key) const {
  for (const Field& f : fields)
    if (f.key == key) return &f.csv;
  return nullptr;
}

namespace {

std::string record_json(const ReportRecord& rec) {
  std::string out = "{";
  bool first = true;
  for (const ReportRecord::Field& f : rec.fields) {
    if (!first) out += ",";
    first = false;
    out += "\"" + json_escape(f.key) + "\":" + f.json;
  }
  out += "}";
  return out;
}

std::vector<std::string> csv_columns(const Report& r) {
  if (!r.columns.empty()) return r.columns;
  std::vector<std::string> cols;
  for (const ReportRecord& rec : r.records)
    for (const ReportRecord::Field& f : rec.fields) {
      bool seen = false;
      for (const std::string& c : cols) seen = seen || c == f.key;
      if (!seen) cols.push_back(f.key);
    }
  return cols;
}

std::string csv_cell(const std::string& v) {
  bool quote = v.find_first_of(",\"\n") != std::string::npos;
  if (!quote) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

std::string to_jsonl(const Report& r) {
  std::string out;
  for (const ReportRecord& rec : r.records) out += record_json(rec) + "\n";
  return out;
}

std::string to_csv(const Report& r) {
  std::vector<std::string> cols = csv_columns(r);
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ",";
    out += csv_cell(cols[i]);
  }
  out += "\n";
  for (const ReportRecord& rec : r.records) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out += ",";
      const std::string* v = rec.find(cols[i]);
      if (v) out += csv_cell(*v);
    }
    out += "\n";
  }
  return out;
}

std::string to_summary_json(const Report& r) {
  ReportRecord head;
  head.add("kind", r.kind);
  head.add("version", kLpLabVersion);
  std::string out = record_json(head);
  if (!r.summary.fields.empty()) {
    ReportRecord merged = head;
    for (const ReportRecord::Field& f : r.summary.fields)
      merged.fields.push_back(f);
    out = record_json(merged);
  }
  return out + "\n";
}

std::uint64_t fnv1a64(const std::string& bytes) {
  return fnv1a(bytes.data(), bytes.size());
}

std::string digest_hex(const std::string& bytes) {
  return hex64(fnv1a64(bytes));
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace lplab
