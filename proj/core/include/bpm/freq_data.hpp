#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bpm {

// Frequency-of-frequencies table: freqs[k-1] = f_k, the number of population
// units observed exactly k times, k = 1..M.  f_0 is never stored (it equals
// N - n).  Tables parsed from text always end in a positive cell; tables
// produced by right_truncate may carry trailing zeros up to the cut.
struct FrequencyTable {
  std::vector<long long> freqs;
  std::string label;
  // true when the last cell is an aggregated open-ended tail ("17+"): the
  // cell stores the tail frequency at the boundary count and analyses must
  // truncate below it.
  bool tail_flagged = false;

  long long n() const;
  int max_count() const { return static_cast<int>(freqs.size()); }
  long long f(int k) const;  // f_k, k in 1..M
};

struct TruncationResult {
  FrequencyTable table;    // first m_star cells
  long long tail_units{};  // units with observed count > m_star
};

FrequencyTable parse_frequency_table(std::istream& in, const std::string& label);
FrequencyTable parse_frequency_table(const std::string& text, const std::string& label);
std::string serialize(const FrequencyTable& table);

// Keeps cells 1..m_star and pools the rest into tail_units; downstream
// estimators add tail_units back to N estimates and interval endpoints.
TruncationResult right_truncate(const FrequencyTable& table, int m_star);

// Extend with zero cells so the model dimension can exceed the largest
// observed count (replication studies fit every dataset at one fixed M*).
FrequencyTable pad_cells(FrequencyTable table, std::size_t m_star);

const std::vector<FrequencyTable>& builtin_datasets();
const FrequencyTable& builtin_dataset(const std::string& name);

}  // namespace bpm
