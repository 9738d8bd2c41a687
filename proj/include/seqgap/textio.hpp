#pragma once

#include <string>
#include <vector>

namespace seqgap {

// Shortest decimal string that round-trips the exact double. All file output
// goes through this so repeated runs are byte-identical.
std::string fmt_double(double v);

std::string join_doubles(const std::vector<double>& v, char sep = ' ');

}  // namespace seqgap
