#include "sandpile/oracle.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>
#include <string>

#include "sandpile/error.hpp"

namespace sandpile {

Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            Rational r{mpz_class(text)};
            return r;
        }
        const mpz_class num(text.substr(0, slash));
        const mpz_class den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        Rational r(num, den);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("malformed rational '" + text + "' (expected a or a/b)");
    }
}

namespace {

std::int32_t leftmost_unstable(const std::vector<std::int32_t>& counts) {
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (counts[i] >= 2) return static_cast<std::int32_t>(i);
    return -1;
}

// Applies one instruction at array position v; bounds were sized so that a
// reachable chain never writes outside [0, 2n].
std::vector<std::int32_t> apply(const std::vector<std::int32_t>& counts, std::int32_t v,
                                bool left, bool right) {
    if ((left && v == 0) || (right && v + 1 == static_cast<std::int32_t>(counts.size())))
        throw Error(Errc::ArenaOverflow, "oracle chain left the [-n, n] arena");
    std::vector<std::int32_t> next = counts;
    next[static_cast<std::size_t>(v)] -= static_cast<std::int32_t>(left) + static_cast<std::int32_t>(right);
    if (left) ++next[static_cast<std::size_t>(v - 1)];
    if (right) ++next[static_cast<std::size_t>(v + 1)];
    return next;
}

}  // namespace

ChainGraph enumerate_states(std::int64_t n, SelectionOrder order, const OracleOptions& options) {
    if (n < 1) throw std::invalid_argument("particle count must be >= 1");
    ChainGraph g;
    g.n = n;
    g.order = order;

    const std::size_t width = static_cast<std::size_t>(2 * n + 1);
    ChainNode start;
    start.counts.assign(width, 0);
    start.counts[static_cast<std::size_t>(n)] = static_cast<std::int32_t>(n);
    if (order == SelectionOrder::Fifo && n >= 2)
        start.queue.push_back(static_cast<std::int32_t>(n));

    std::map<ChainNode, std::int32_t> index;
    auto intern = [&](ChainNode node) {
        auto [it, inserted] = index.emplace(std::move(node), static_cast<std::int32_t>(g.nodes.size()));
        if (inserted) {
            g.nodes.push_back(it->first);
            g.arcs.emplace_back();
            if (static_cast<std::int64_t>(g.nodes.size()) > options.state_limit)
                throw Error(Errc::StateLimitExceeded,
                            "more than " + std::to_string(options.state_limit) +
                                " chain states at n=" + std::to_string(n));
        }
        return it->second;
    };

    intern(start);
    for (std::size_t cursor = 0; cursor < g.nodes.size(); ++cursor) {
        const ChainNode node = g.nodes[cursor];  // copy: intern() may grow g.nodes
        std::int32_t v = -1;
        if (order == SelectionOrder::Leftmost) {
            v = leftmost_unstable(node.counts);
        } else if (!node.queue.empty()) {
            v = node.queue.front();
        }
        if (v < 0) continue;  // absorbing

        auto successor = [&](bool left, bool right) {
            ChainNode next;
            next.counts = apply(node.counts, v, left, right);
            if (order == SelectionOrder::Fifo) {
                next.queue.assign(node.queue.begin() + 1, node.queue.end());
                for (std::int32_t cand : {v - 1, v + 1, v}) {
                    if (next.counts[static_cast<std::size_t>(cand)] >= 2 &&
                        std::find(next.queue.begin(), next.queue.end(), cand) == next.queue.end())
                        next.queue.push_back(cand);
                }
            }
            return intern(std::move(next));
        };

        ChainArcs arcs;
        arcs.left = successor(true, false);
        arcs.right = successor(false, true);
        arcs.both = successor(true, true);
        if (order == SelectionOrder::Fifo) arcs.none = successor(false, false);
        g.arcs[cursor] = arcs;
    }

    g.absorbing.resize(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const bool transient = order == SelectionOrder::Leftmost
                                   ? leftmost_unstable(g.nodes[i].counts) >= 0
                                   : !g.nodes[i].queue.empty();
        g.absorbing[i] = !transient;
        if (transient)
            ++g.transient_count;
        else
            ++g.absorbing_count;
    }
    return g;
}

namespace {

// Gaussian elimination with partial pivoting by the magnitude of the exact
// entries. Dense is fine here: the chains stay in the hundreds of states.
std::vector<Rational> solve_dense(std::vector<std::vector<Rational>>& a,
                                  std::vector<Rational>& b) {
    const std::size_t m = a.size();
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (cmp(abs(a[r][col]), abs(a[piv][col])) > 0) piv = r;
        if (a[piv][col] == 0)
            throw Error(Errc::SingularSystem, "zero pivot in column " + std::to_string(col));
        if (piv != col) {
            std::swap(a[piv], a[col]);
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < m; ++r) {
            if (a[r][col] == 0) continue;
            const Rational f = a[r][col] / a[col][col];
            a[r][col] = 0;
            for (std::size_t c = col + 1; c < m; ++c)
                if (a[col][c] != 0) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<Rational> x(m, Rational(0));
    for (std::size_t r = m; r-- > 0;) {
        Rational acc = b[r];
        for (std::size_t c = r + 1; c < m; ++c)
            if (a[r][c] != 0) acc -= a[r][c] * x[c];
        x[r] = acc / a[r][r];
    }
    return x;
}

ExactOutcome describe_outcome(const std::vector<std::int32_t>& counts, std::int64_t n) {
    ExactOutcome o;
    o.counts = counts;
    std::int64_t left = 0, right = 0;
    bool found = false;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const std::int64_t site = static_cast<std::int64_t>(i) - n;
        if (counts[i] > 0) {
            if (!found) left = site;
            right = site;
            found = true;
            o.mass_center += site * counts[i];
            o.square_mass += site * site * counts[i];
        }
    }
    if (!found) throw Error(Errc::EmptyConfiguration, "absorbing state with no particles");
    o.left = left;
    o.right = right;
    for (std::int64_t v = left + 1; v < right; ++v) {
        if (counts[static_cast<std::size_t>(v + n)] == 0) {
            if (o.hole)
                throw Error(Errc::MultipleHoles,
                            "oracle support state with two interior vacancies");
            o.hole = v;
        }
    }
    return o;
}

}  // namespace

ExactDistribution absorption_distribution(std::int64_t n, const Rational& p,
                                          SelectionOrder order, const OracleOptions& options) {
    if (!(p > 0 && p < 1))
        throw std::invalid_argument("toppling probability must lie strictly inside (0,1)");
    const ChainGraph g = enumerate_states(n, order, options);

    ExactDistribution dist;
    dist.n = n;
    dist.p = p;
    dist.order = order;
    dist.expected_topplings = 0;
    dist.mean_mass_center = 0;
    dist.mean_mass_center_sq = 0;
    dist.mean_square_mass = 0;

    // Transition weights per outcome. Leftmost uses the None-collapsed chain,
    // so each collapsed step accounts for 1/(p(2-p)) raw topplings.
    const Rational two_minus_p = Rational(2) - p;
    const Rational w_side = order == SelectionOrder::Leftmost ? Rational((1 - p) / two_minus_p)
                                                              : Rational(p * (1 - p));
    const Rational w_both =
        order == SelectionOrder::Leftmost ? Rational(p / two_minus_p) : Rational(p * p);
    const Rational w_none = (1 - p) * (1 - p);

    std::vector<std::int32_t> local(g.nodes.size(), -1);
    std::vector<std::int32_t> transient;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (!g.absorbing[i]) {
            local[i] = static_cast<std::int32_t>(transient.size());
            transient.push_back(static_cast<std::int32_t>(i));
        }
    }

    std::map<std::vector<std::int32_t>, Rational> law;
    if (transient.empty()) {
        law.emplace(g.nodes[0].counts, Rational(1));
    } else {
        const std::size_t m = transient.size();
        // Expected visit counts y solve (I - Q^T) y = e_start.
        std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m, Rational(0)));
        std::vector<Rational> b(m, Rational(0));
        for (std::size_t r = 0; r < m; ++r) a[r][r] = 1;
        for (std::size_t t = 0; t < m; ++t) {
            const ChainArcs& arcs = g.arcs[static_cast<std::size_t>(transient[t])];
            auto subtract = [&](std::int32_t target, const Rational& w) {
                if (target >= 0 && local[static_cast<std::size_t>(target)] >= 0)
                    a[static_cast<std::size_t>(local[static_cast<std::size_t>(target)])][t] -= w;
            };
            subtract(arcs.left, w_side);
            subtract(arcs.right, w_side);
            subtract(arcs.both, w_both);
            subtract(arcs.none, w_none);
        }
        if (local[0] < 0)
            throw Error(Errc::SingularSystem, "start state is absorbing but transients exist");
        b[static_cast<std::size_t>(local[0])] = 1;
        const std::vector<Rational> visits = solve_dense(a, b);

        Rational effective_steps = 0;
        for (std::size_t t = 0; t < m; ++t) {
            effective_steps += visits[t];
            const ChainArcs& arcs = g.arcs[static_cast<std::size_t>(transient[t])];
            auto deposit = [&](std::int32_t target, const Rational& w) {
                if (target >= 0 && local[static_cast<std::size_t>(target)] < 0)
                    law[g.nodes[static_cast<std::size_t>(target)].counts] += visits[t] * w;
            };
            deposit(arcs.left, w_side);
            deposit(arcs.right, w_side);
            deposit(arcs.both, w_both);
            deposit(arcs.none, w_none);
        }
        dist.expected_topplings = order == SelectionOrder::Leftmost
                                      ? effective_steps / (p * two_minus_p)
                                      : effective_steps;
    }

    Rational total = 0;
    for (auto& [counts, prob] : law) {
        ExactOutcome o = describe_outcome(counts, n);
        o.probability = prob;
        total += prob;
        dist.mean_mass_center += prob * o.mass_center;
        dist.mean_mass_center_sq += prob * (o.mass_center * o.mass_center);
        dist.mean_square_mass += prob * o.square_mass;
        dist.support.push_back(std::move(o));
    }
    if (total != 1)
        throw Error(Errc::SingularSystem,
                    "absorption probabilities sum to " + rational_string(total));
    return dist;
}

ExactMarginals marginals(const ExactDistribution& dist) {
    ExactMarginals m;
    m.hole_present = 0;
    m.expected_topplings = dist.expected_topplings;
    m.mean_square_mass = dist.mean_square_mass;
    for (const ExactOutcome& o : dist.support) {
        m.left_law[o.left] += o.probability;
        m.right_law[o.right] += o.probability;
        if (o.hole) {
            m.hole_position_law[*o.hole] += o.probability;
            m.hole_present += o.probability;
        }
        m.joint[BoundarySignature{o.left, o.right, o.hole}] += o.probability;
    }
    return m;
}

}  // namespace sandpile
