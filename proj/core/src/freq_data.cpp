#include "bpm/freq_data.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bpm {

long long FrequencyTable::n() const {
  return std::accumulate(freqs.begin(), freqs.end(), 0LL);
}

long long FrequencyTable::f(int k) const {
  if (k < 1 || k > max_count()) throw std::out_of_range("count index outside 1..M");
  return freqs[static_cast<std::size_t>(k) - 1];
}

namespace {

long long parse_integer(const std::string& token, int line_no, const char* what) {
  std::size_t pos = 0;
  long long value;
  try {
    value = std::stoll(token, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("line " + std::to_string(line_no) + ": non-integer " +
                                what + " '" + token + "'");
  }
  if (pos != token.size())
    throw std::invalid_argument("line " + std::to_string(line_no) + ": non-integer " +
                                what + " '" + token + "'");
  return value;
}

}  // namespace

FrequencyTable parse_frequency_table(std::istream& in, const std::string& label) {
  std::map<long long, long long> cells;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& ch : line)
      if (ch == ',' || ch == '\t') ch = ' ';
    std::istringstream fields(line);
    std::string k_tok, f_tok, extra;
    if (!(fields >> k_tok)) continue;  // blank line
    if (!(fields >> f_tok))
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 'k f_k'");
    if (fields >> extra)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": trailing token '" +
                                  extra + "'");
    const long long k = parse_integer(k_tok, line_no, "count");
    const long long fk = parse_integer(f_tok, line_no, "frequency");
    if (k < 1)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": count must be >= 1");
    if (fk < 0)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": negative frequency");
    if (!cells.emplace(k, fk).second)
      throw std::invalid_argument("line " + std::to_string(line_no) + ": duplicate count " +
                                  std::to_string(k));
  }
  FrequencyTable table;
  table.label = label;
  long long max_k = 0;
  for (const auto& [k, fk] : cells)
    if (fk > 0) max_k = std::max(max_k, k);
  if (max_k == 0) throw std::invalid_argument("no positive frequency in table");
  table.freqs.assign(static_cast<std::size_t>(max_k), 0);
  for (const auto& [k, fk] : cells)
    if (k <= max_k) table.freqs[static_cast<std::size_t>(k) - 1] = fk;
  return table;
}

FrequencyTable parse_frequency_table(const std::string& text, const std::string& label) {
  std::istringstream in(text);
  return parse_frequency_table(in, label);
}

std::string serialize(const FrequencyTable& table) {
  std::ostringstream out;
  out << "# " << table.label << "\n";
  for (int k = 1; k <= table.max_count(); ++k)
    out << k << "," << table.f(k) << "\n";
  return out.str();
}

TruncationResult right_truncate(const FrequencyTable& table, int m_star) {
  if (m_star < 1) throw std::invalid_argument("m_star must be >= 1");
  TruncationResult result;
  result.table = table;
  if (m_star >= table.max_count()) return result;
  result.table.freqs.resize(static_cast<std::size_t>(m_star));
  result.table.tail_flagged = false;
  for (int k = m_star + 1; k <= table.max_count(); ++k) result.tail_units += table.f(k);
  return result;
}

FrequencyTable pad_cells(FrequencyTable table, std::size_t m_star) {
  if (m_star > table.freqs.size()) table.freqs.resize(m_star, 0);
  return table;
}

namespace {

FrequencyTable fixture(const char* label, std::vector<long long> freqs, bool flagged) {
  FrequencyTable t;
  t.label = label;
  t.freqs = std::move(freqs);
  t.tail_flagged = flagged;
  return t;
}

}  // namespace

const std::vector<FrequencyTable>& builtin_datasets() {
  static const std::vector<FrequencyTable> datasets = {
      fixture("traffic", {1317, 239, 42, 14, 4, 4, 1}, false),
      fixture("root",
              {2187, 490, 133, 121, 37, 51, 22, 19, 7, 8, 6, 7, 6, 4, 5, 5, 18},
              true),
      fixture("polyps_low", {145, 66, 39, 17, 8, 8, 7, 3, 1, 0, 2, 3}, true),
      fixture("polyps_high", {144, 61, 55, 37, 17, 5, 4, 6, 5, 1, 1, 5}, true),
      fixture("scrapie", {298, 89, 42, 17, 20, 7, 11, 7, 3, 22}, true),
      fixture("methamphetamine", {3114, 163, 23, 20, 9, 3, 3, 3, 4, 3}, false),
  };
  return datasets;
}

const FrequencyTable& builtin_dataset(const std::string& name) {
  for (const auto& t : builtin_datasets())
    if (t.label == name) return t;
  throw std::invalid_argument("unknown dataset '" + name +
                              "' (try: traffic, root, polyps_low, polyps_high, "
                              "scrapie, methamphetamine)");
}

}  // namespace bpm
