#include "gime/csv.hpp"

namespace gime {

bool CsvReader::next(CsvRecord& out) {
  out.fields.clear();
  out.raw.clear();
  out.line = line_;

  int c = in_.get();
  if (c == std::istream::traits_type::eof()) return false;

  std::string field;
  bool in_quotes = false;
  bool seen_any = false;
  for (;;) {
    if (c == std::istream::traits_type::eof()) {
      out.fields.push_back(std::move(field));
      return true;
    }
    seen_any = true;
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        const int peek = in_.peek();
        if (peek == '"') {
          in_.get();
          out.raw += "\"\"";
          field += '"';
        } else {
          in_quotes = false;
          out.raw += '"';
        }
      } else {
        if (ch == '\n') ++line_;
        out.raw += ch;
        field += ch;
      }
    } else {
      if (ch == '"') {
        in_quotes = true;
        out.raw += '"';
      } else if (ch == ',') {
        out.raw += ',';
        out.fields.push_back(std::move(field));
        field.clear();
      } else if (ch == '\r') {
        const int peek = in_.peek();
        if (peek == '\n') {
          in_.get();
          ++line_;
          out.fields.push_back(std::move(field));
          return true;
        }
        out.raw += '\r';
        field += '\r';
      } else if (ch == '\n') {
        ++line_;
        out.fields.push_back(std::move(field));
        return true;
      } else {
        out.raw += ch;
        field += ch;
      }
    }
    c = in_.get();
  }
  (void)seen_any;
}

std::string csv_escape(const std::string& field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(fields[i]);
  }
  return out;
}

}  // namespace gime
