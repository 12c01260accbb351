#pragma once

// RFC 4180 CSV reading and writing. The reader yields logical records
// (quoted fields may span physical lines) together with the raw text of the
// record, so subset copies can reproduce source bytes exactly.

#include <istream>
#include <string>
#include <vector>

namespace gime {

struct CsvRecord {
  std::vector<std::string> fields;
  std::string raw;       // record text without the trailing newline
  uint64_t line = 0;     // 1-based physical line where the record starts
};

class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // False at end of input. Throws nothing; malformed trailing quotes are
  // consumed as literal text.
  bool next(CsvRecord& out);

 private:
  std::istream& in_;
  uint64_t line_ = 1;
};

std::string csv_escape(const std::string& field);
std::string csv_join(const std::vector<std::string>& fields);

}  // namespace gime
