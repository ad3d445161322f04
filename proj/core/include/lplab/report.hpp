#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lplab {

inline constexpr const char* kLpLabVersion = "0.1.0";

// One flat record with insertion-ordered fields.  Values are rendered at
// insertion time with shortest-round-trip formatting, so emitting the
// same report twice yields identical bytes.
struct ReportRecord {
  struct Field {
    std::string key;
    std::string json;  // ready-to-emit JSON token (quoted if a string)
    std::string csv;   // unquoted text for CSV cells
  };
  std::vector<Field> fields;

  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, const char* value);
  void add(const std::string& key, double value);
  void add(const std::string& key, std::uint64_t value);
  void add(const std::string& key, std::int64_t value);
  void add(const std::string& key, int value);
  void add(const std::string& key, bool value);
  const std::string* find(const std::string& key) const;  // csv text or null
};

struct Report {
  std::string kind;
  std::vector<std::string> columns;  // declared CSV header, may be empty
  ReportRecord summary;
  std::vector<ReportRecord> records;
};

std::string format_double(double v);
std::string json_escape(const std::string& s);

// One JSON object per line, records only.
std::string to_jsonl(const Report& r);
// Header row (declared columns, else union of record keys in first
// appearance order), then one row per record; missing cells are empty.
std::string to_csv(const Report& r);
// Single JSON object with the summary fields.
std::string to_summary_json(const Report& r);

std::uint64_t fnv1a64(const std::string& bytes);
std::string digest_hex(const std::string& bytes);

void write_file(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

}  // namespace lplab
