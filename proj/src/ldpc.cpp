#include "lcqkd/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lcqkd/rng.hpp"

namespace lcqkd {

namespace {

// Message magnitudes are clamped so tanh/atanh stay away from their
// saturation points.
constexpr double kLlrClamp = 30.0;

struct PegState {
    std::size_t n, m;
    std::vector<std::vector<std::uint32_t>> var_checks;
    std::vector<std::vector<std::uint32_t>> check_vars;
    std::vector<std::uint64_t> priority;  // seeded tie-break order

    // Distance from variable v to every check in the current graph; -1 when
    // unreachable.
    std::vector<int> check_distances(std::uint32_t v) const {
        std::vector<int> dist(m, -1);
        std::vector<std::uint8_t> var_seen(n, 0);
        std::queue<std::uint32_t> frontier;
        var_seen[v] = 1;
        frontier.push(v);
        int depth = 0;
        while (!frontier.empty()) {
            std::queue<std::uint32_t> next;
            while (!frontier.empty()) {
                const std::uint32_t u = frontier.front();
                frontier.pop();
                for (std::uint32_t c : var_checks[u]) {
                    if (dist[c] >= 0) continue;
                    dist[c] = depth;
                    for (std::uint32_t w : check_vars[c]) {
                        if (!var_seen[w]) {
                            var_seen[w] = 1;
                            next.push(w);
                        }
                    }
                }
            }
            frontier = std::move(next);
            ++depth;
        }
        return dist;
    }

    std::uint32_t pick(const std::vector<int>& dist, bool unreachable_only,
                       int target_depth) const {
        std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
        std::size_t best_deg = 0;
        std::uint64_t best_pri = 0;
        for (std::uint32_t c = 0; c < m; ++c) {
            const bool eligible =
                unreachable_only ? (dist[c] < 0) : (dist[c] == target_depth);
            if (!eligible) continue;
            const std::size_t deg = check_vars[c].size();
            if (best == std::numeric_limits<std::uint32_t>::max() || deg < best_deg ||
                (deg == best_deg && priority[c] < best_pri)) {
                best = c;
                best_deg = deg;
                best_pri = priority[c];
            }
        }
        return best;
    }
};

}  // namespace

SyndromeCode SyndromeCode::make_regular(std::size_t n, std::size_t m,
                                        unsigned var_degree, std::uint64_t seed) {
    if (n == 0 || m == 0 || m >= n)
        throw std::domain_error("code needs 0 < checks < variables");
    if (var_degree < 2 || var_degree > m)
        throw std::domain_error("variable degree must lie in [2, checks]");

    PegState st;
    st.n = n;
    st.m = m;
    st.var_checks.resize(n);
    st.check_vars.resize(m);
    st.priority.resize(m);
    RandomStream rng(seed, RandomStream::kCodes, 0);
    for (auto& p : st.priority) p = rng.next_u64();

    for (std::uint32_t v = 0; v < n; ++v) {
        for (unsigned k = 0; k < var_degree; ++k) {
            std::uint32_t c;
            if (k == 0) {
                // First edge: any lowest-degree check keeps the row weights
                // balanced.
                const std::vector<int> dist(m, 0);
                c = st.pick(dist, false, 0);
            } else {
                const std::vector<int> dist = st.check_distances(v);
                const bool has_unreachable =
                    std::any_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
                if (has_unreachable) {
                    c = st.pick(dist, true, 0);
                } else {
                    // All checks reachable: connect at the largest distance so
                    // the shortest new cycle is as long as possible.
                    const int far = *std::max_element(dist.begin(), dist.end());
                    c = st.pick(dist, false, far);
                }
            }
            st.var_checks[v].push_back(c);
            st.check_vars[c].push_back(v);
        }
    }

    SyndromeCode code;
    code.n = n;
    code.m = m;
    code.check_vars = std::move(st.check_vars);
    for (auto& row : code.check_vars) std::sort(row.begin(), row.end());
    return code;
}

SyndromeCode SyndromeCode::load(std::istream& in) {
    SyndromeCode code;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("parity-check file is empty");
    {
        std::istringstream head(line);
        if (!(head >> code.n >> code.m) || code.n == 0 || code.m == 0)
            throw std::runtime_error("parity-check header must be 'n m'");
    }
    code.check_vars.reserve(code.m);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::vector<std::uint32_t> vars;
        std::uint32_t idx;
        while (row >> idx) {
            if (idx >= code.n)
                throw std::runtime_error("variable index out of range in parity-check file");
            vars.push_back(idx);
        }
        code.check_vars.push_back(std::move(vars));
    }
    if (code.check_vars.size() != code.m)
        throw std::runtime_error("parity-check file row count does not match header");
    return code;
}

void SyndromeCode::save(std::ostream& out) const {
    out << n << ' ' << m << '\n';
    for (const auto& row : check_vars) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ' ';
            out << row[i];
        }
        out << '\n';
    }
}

std::vector<std::uint8_t> SyndromeCode::syndrome(
    std::span<const std::uint8_t> bits) const {
    if (bits.size() != n)
        throw std::domain_error("bit vector length does not match block length");
    std::vector<std::uint8_t> s(m, 0);
    for (std::size_t c = 0; c < m; ++c) {
        std::uint8_t parity = 0;
        for (std::uint32_t v : check_vars[c]) parity ^= (bits[v] & 1u);
        s[c] = parity;
    }
    return s;
}

DecodeResult bp_decode(const SyndromeCode& code, std::span<const double> llr,
                       std::span<const std::uint8_t> target_syndrome,
                       unsigned max_iterations) {
    if (llr.size() != code.n)
        throw std::domain_error("llr length does not match block length");
    if (target_syndrome.size() != code.m)
        throw std::domain_error("syndrome length does not match check count");

    DecodeResult out;
    out.bits.resize(code.n);

    // Posterior accumulator per variable plus one stored check-to-variable
    // message per edge (layered schedule updates in place).
    std::vector<double> belief(code.n);
    std::vector<std::vector<double>> r_msg(code.m);

    auto hard_matches = [&] {
        for (std::size_t i = 0; i < code.n; ++i) out.bits[i] = belief[i] < 0.0 ? 1 : 0;
        for (std::size_t c = 0; c < code.m; ++c) {
            std::uint8_t parity = 0;
            for (std::uint32_t v : code.check_vars[c]) parity ^= out.bits[v];
            if (parity != target_syndrome[c]) return false;
        }
        return true;
    };

    std::vector<double> a_msg, fwd;
    // One decoding phase from fresh channel messages. Damping blends each
    // new check message with the previous one, which breaks the oscillations
    // that trap plain belief propagation near small graph structures.
    auto run_phase = [&](double damping) {
        for (std::size_t i = 0; i < code.n; ++i)
            belief[i] = std::clamp(llr[i], -kLlrClamp, kLlrClamp);
        for (std::size_t c = 0; c < code.m; ++c)
            r_msg[c].assign(code.check_vars[c].size(), 0.0);
        if (hard_matches()) return true;

        for (unsigned it = 1; it <= max_iterations; ++it) {
            for (std::size_t c = 0; c < code.m; ++c) {
                const auto& vars = code.check_vars[c];
                const std::size_t deg = vars.size();
                if (deg == 0) continue;
                a_msg.resize(deg);
                fwd.resize(deg);

                for (std::size_t i = 0; i < deg; ++i) {
                    const double a = std::clamp(belief[vars[i]] - r_msg[c][i],
                                                -kLlrClamp, kLlrClamp);
                    a_msg[i] = a;
                }
                // Exclusive tanh products via forward/backward sweeps.
                double acc = 1.0;
                for (std::size_t i = 0; i < deg; ++i) {
                    fwd[i] = acc;
                    acc *= std::tanh(a_msg[i] / 2.0);
                }
                double back = 1.0;
                const double sign = target_syndrome[c] ? -1.0 : 1.0;
                for (std::size_t i = deg; i-- > 0;) {
                    double prod = fwd[i] * back;
                    back *= std::tanh(a_msg[i] / 2.0);
                    prod = std::clamp(prod, -(1.0 - 1e-15), 1.0 - 1e-15);
                    double r = sign * 2.0 * std::atanh(prod);
                    r = damping * r + (1.0 - damping) * r_msg[c][i];
                    r_msg[c][i] = r;
                    belief[vars[i]] =
                        std::clamp(a_msg[i] + r, -kLlrClamp, kLlrClamp);
                }
            }
            out.iterations += 1;
            if (hard_matches()) return true;
        }
        return false;
    };

    for (const double damping : {1.0, 0.5, 0.3}) {
        if (run_phase(damping)) {
            out.success = true;
            return out;
        }
    }
    return out;
}

}  // namespace lcqkd
