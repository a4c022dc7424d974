#ifndef CAUSAL_RESAMPLE_CSV_HPP
#define CAUSAL_RESAMPLE_CSV_HPP

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

// Minimal RFC-4180 reader/writer for the result tables.
namespace causal_resample::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column, or -1.
  int column(std::string_view name) const;
};

Table read(std::istream& in);

// Quotes fields containing separators, quotes or line breaks.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest representation that round-trips to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

}  // namespace causal_resample::csv

#endif  // CAUSAL_RESAMPLE_CSV_HPP
