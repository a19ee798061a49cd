#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "pubfin/error.hpp"
#include "pubfin/format.hpp"
#include "pubfin/neural/params.hpp"

namespace pubfin::neural {

struct Checkpoint {
    ModelParams params;
    int lookback = 0;
};

/// Line 1 `H=<int> W=<int>`, then one parameter per line in flatten() order
/// with round-trip precision.
inline void write_checkpoint(std::ostream& out, const ModelParams& p, int lookback) {
    out << "H=" << p.hidden_size() << " W=" << lookback << '\n';
    for (double x : flatten(p)) out << format_double(x) << '\n';
}

inline Checkpoint read_checkpoint(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("checkpoint is empty");
    std::size_t hidden = 0;
    int lookback = 0;
    const auto sp = line.find(' ');
    const std::string_view head(line);
    if (!head.starts_with("H=") || sp == std::string::npos || head.substr(sp + 1, 2) != "W=" ||
        !parse_int(trim(head.substr(2, sp - 2)), hidden) || !parse_int(trim(head.substr(sp + 3)), lookback) ||
        hidden < 1 || lookback < 1)
        throw DataError("bad checkpoint header '" + line + "'");

    std::vector<double> flat;
    flat.reserve(param_count(hidden));
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty()) continue;
        double x = 0.0;
        if (!parse_double(t, x)) throw DataError("bad checkpoint value '" + line + "'");
        flat.push_back(x);
    }
    if (flat.size() != param_count(hidden))
        throw DataError("checkpoint holds " + std::to_string(flat.size()) + " parameters, expected " +
                        std::to_string(param_count(hidden)));
    return {unflatten(flat, hidden), lookback};
}

}  // namespace pubfin::neural
