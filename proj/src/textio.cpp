#include "seqgap/textio.hpp"

#include <charconv>

namespace seqgap {

std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string join_doubles(const std::vector<double>& v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out.push_back(sep);
        out += fmt_double(v[i]);
    }
    return out;
}

}  // namespace seqgap
