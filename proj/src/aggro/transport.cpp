#include "aggro/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "aggro/error.hpp"

namespace aggro {

namespace {

using Int = NetworkSimplex::Int;

constexpr signed char state_upper = -1, state_tree = 0, state_lower = 1;
constexpr signed char dir_down = -1, dir_up = 1;
constexpr Int inf_flow = std::numeric_limits<Int>::max();

}  // namespace

NetworkSimplex::NetworkSimplex(int nodes, std::vector<Int> supply, Int max_cost)
    : n_(nodes), root_(nodes), supply_(std::move(supply)) {
    if (nodes < 1) fail(Errc::invalid_argument, "network needs at least one node");
    if (supply_.size() != std::size_t(nodes)) fail(Errc::invalid_argument, "supply size does not match node count");
    Int total = 0;
    for (Int s : supply_) total += s;
    if (total != 0) fail(Errc::mass_mismatch, "supplies do not balance");
    if (max_cost < 0 || max_cost + 1 > std::numeric_limits<Int>::max() / 8 / Int(nodes + 1))
        fail(Errc::invalid_argument, "arc costs too large for the network solver");
    art_cost_ = (max_cost + 1) * Int(nodes + 1);
    source_.assign(std::size_t(n_), 0);
    target_.assign(std::size_t(n_), 0);
    cost_.assign(std::size_t(n_), 0);
    flow_.assign(std::size_t(n_), 0);
    state_.assign(std::size_t(n_), state_tree);
    const std::size_t N = std::size_t(n_) + 1;
    parent_.assign(N, -1);
    pred_.assign(N, -1);
    thread_.assign(N, 0);
    rev_thread_.assign(N, 0);
    succ_num_.assign(N, 0);
    last_succ_.assign(N, 0);
    pred_dir_.assign(N, dir_up);
    pi_.assign(N, 0);
    next_arc_ = n_;
}

int NetworkSimplex::add_arc(int u, int v, Int cost) {
    if (u < 0 || v < 0 || u >= n_ || v >= n_) fail(Errc::invalid_argument, "arc endpoint out of range");
    if (cost < 0 || cost > art_cost_ / Int(n_ + 1)) fail(Errc::invalid_argument, "arc cost out of range");
    source_.push_back(u);
    target_.push_back(v);
    cost_.push_back(cost);
    flow_.push_back(0);
    state_.push_back(state_lower);
    return int(source_.size()) - 1 - n_;
}

bool NetworkSimplex::run() {
    if (!initialized_) {
        parent_[root_] = -1;
        pred_[root_] = -1;
        thread_[root_] = 0;
        rev_thread_[0] = root_;
        succ_num_[root_] = n_ + 1;
        last_succ_[root_] = root_ - 1;
        pi_[root_] = 0;
        for (int u = 0; u < n_; ++u) {
            const int e = u;
            parent_[u] = root_;
            pred_[u] = e;
            thread_[u] = u + 1;
            rev_thread_[u + 1] = u;
            succ_num_[u] = 1;
            last_succ_[u] = u;
            state_[e] = state_tree;
            if (supply_[u] >= 0) {
                pred_dir_[u] = dir_up;
                pi_[u] = 0;
                source_[e] = u;
                target_[e] = root_;
                flow_[e] = supply_[u];
                cost_[e] = 0;
            } else {
                pred_dir_[u] = dir_down;
                pi_[u] = art_cost_;
                source_[e] = root_;
                target_[e] = u;
                flow_[e] = -supply_[u];
                cost_[e] = art_cost_;
            }
        }
        initialized_ = true;
    }
    const int m = int(source_.size()) - n_;
    block_size_ = std::max(int(std::sqrt(double(std::max(m, 1)))), 10);
    if (next_arc_ >= int(source_.size())) next_arc_ = n_;
    while (find_entering()) {
        join_ = find_join(source_[in_arc_], target_[in_arc_]);
        const bool change = find_leaving();
        if (delta_ >= inf_flow) fail(Errc::internal, "unbounded transshipment problem");
        change_flow(change);
        if (change) {
            update_tree();
            update_potential();
        }
        ++pivots_;
    }
    for (int u = 0; u < n_; ++u)
        if (flow_[std::size_t(u)] != 0) return false;
    return true;
}

bool NetworkSimplex::find_entering() {
    Int best = 0;
    int cnt = block_size_;
    const int end = int(source_.size());
    int e;
    for (e = next_arc_; e < end; ++e) {
        const Int c = state_[e] * (cost_[e] + pi_[source_[e]] - pi_[target_[e]]);
        if (c < best) {
            best = c;
            in_arc_ = e;
        }
        if (--cnt == 0) {
            if (best < 0) goto found;
            cnt = block_size_;
        }
    }
    for (e = n_; e < next_arc_; ++e) {
        const Int c = state_[e] * (cost_[e] + pi_[source_[e]] - pi_[target_[e]]);
        if (c < best) {
            best = c;
            in_arc_ = e;
        }
        if (--cnt == 0) {
            if (best < 0) goto found;
            cnt = block_size_;
        }
    }
    if (best >= 0) return false;
found:
    next_arc_ = e < end ? e : n_;
    return true;
}

int NetworkSimplex::find_join(int u, int v) const {
    while (u != v) {
        if (succ_num_[u] < succ_num_[v])
            u = parent_[u];
        else
            v = parent_[v];
    }
    return u;
}

bool NetworkSimplex::find_leaving() {
    int first, second;
    if (state_[in_arc_] == state_lower) {
        first = source_[in_arc_];
        second = target_[in_arc_];
    } else {
        first = target_[in_arc_];
        second = source_[in_arc_];
    }
    delta_ = inf_flow;
    int result = 0;
    for (int u = first; u != join_; u = parent_[u]) {
        const int e = pred_[u];
        const Int d = pred_dir_[u] == dir_down ? inf_flow : flow_[e];
        if (d < delta_) {
            delta_ = d;
            u_out_ = u;
            result = 1;
        }
    }
    for (int u = second; u != join_; u = parent_[u]) {
        const int e = pred_[u];
        const Int d = pred_dir_[u] == dir_up ? inf_flow : flow_[e];
        if (d <= delta_) {
            delta_ = d;
            u_out_ = u;
            result = 2;
        }
    }
    if (result == 1) {
        u_in_ = first;
        v_in_ = second;
    } else {
        u_in_ = second;
        v_in_ = first;
    }
    return result != 0;
}

void NetworkSimplex::change_flow(bool change) {
    if (delta_ > 0) {
        const Int val = state_[in_arc_] * delta_;
        flow_[in_arc_] += val;
        for (int u = source_[in_arc_]; u != join_; u = parent_[u]) flow_[pred_[u]] -= pred_dir_[u] * val;
        for (int u = target_[in_arc_]; u != join_; u = parent_[u]) flow_[pred_[u]] += pred_dir_[u] * val;
    }
    if (change) {
        state_[in_arc_] = state_tree;
        state_[pred_[u_out_]] = flow_[pred_[u_out_]] == 0 ? state_lower : state_upper;
    } else {
        state_[in_arc_] = static_cast<signed char>(-state_[in_arc_]);
    }
}

void NetworkSimplex::update_tree() {
    const int old_rev_thread = rev_thread_[u_out_];
    const int old_succ_num = succ_num_[u_out_];
    const int old_last_succ = last_succ_[u_out_];
    v_out_ = parent_[u_out_];

    if (u_in_ == u_out_) {
        parent_[u_in_] = v_in_;
        pred_[u_in_] = in_arc_;
        pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? dir_up : dir_down;
        if (thread_[v_in_] != u_out_) {
            int after = thread_[old_last_succ];
            thread_[old_rev_thread] = after;
            rev_thread_[after] = old_rev_thread;
            after = thread_[v_in_];
            thread_[v_in_] = u_out_;
            rev_thread_[u_out_] = v_in_;
            thread_[old_last_succ] = after;
            rev_thread_[after] = old_last_succ;
        }
    } else {
        const int thread_continue = old_rev_thread == v_in_ ? thread_[old_last_succ] : thread_[v_in_];
        int stem = u_in_;
        int par_stem = v_in_;
        int next_stem;
        int last = last_succ_[u_in_];
        int before, after = thread_[last];
        thread_[v_in_] = u_in_;
        dirty_revs_.clear();
        dirty_revs_.push_back(v_in_);
        while (stem != u_out_) {
            next_stem = parent_[stem];
            thread_[last] = next_stem;
            dirty_revs_.push_back(last);
            before = rev_thread_[stem];
            thread_[before] = after;
            rev_thread_[after] = before;
            parent_[stem] = par_stem;
            par_stem = stem;
            stem = next_stem;
            last = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem] : last_succ_[stem];
            after = thread_[last];
        }
        parent_[u_out_] = par_stem;
        thread_[last] = thread_continue;
        rev_thread_[thread_continue] = last;
        last_succ_[u_out_] = last;
        if (old_rev_thread != v_in_) {
            thread_[old_rev_thread] = after;
            rev_thread_[after] = old_rev_thread;
        }
        for (int u : dirty_revs_) rev_thread_[thread_[u]] = u;

        int tmp_sc = 0, tmp_ls = last_succ_[u_out_];
        for (int u = u_out_, p = parent_[u]; u != u_in_; u = p, p = parent_[u]) {
            pred_[u] = pred_[p];
            pred_dir_[u] = static_cast<signed char>(-pred_dir_[p]);
            tmp_sc += succ_num_[u] - succ_num_[p];
            succ_num_[u] = tmp_sc;
            last_succ_[p] = tmp_ls;
        }
        pred_[u_in_] = in_arc_;
        pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? dir_up : dir_down;
        succ_num_[u_in_] = old_succ_num;
    }

    const int up_limit_out = last_succ_[join_] == v_in_ ? join_ : -1;
    const int last_succ_out = last_succ_[u_out_];
    for (int u = v_in_; u != -1 && last_succ_[u] == v_in_; u = parent_[u]) last_succ_[u] = last_succ_out;

    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
        for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
            last_succ_[u] = old_rev_thread;
    } else if (last_succ_out != old_last_succ) {
        for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
            last_succ_[u] = last_succ_out;
    }

    for (int u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (int u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
}

void NetworkSimplex::update_potential() {
    const Int sigma = pi_[v_in_] - pi_[u_in_] - pred_dir_[u_in_] * cost_[in_arc_];
    const int end = thread_[last_succ_[u_in_]];
    for (int u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
}

void quantize_pair(const std::vector<double>& a, const std::vector<double>& b, std::vector<std::int64_t>& qa,
                   std::vector<std::int64_t>& qb, double& unit) {
    double Ma = 0.0, Mb = 0.0;
    for (double x : a) {
        if (!(x >= 0.0) || !std::isfinite(x)) fail(Errc::invalid_argument, "transport masses must be finite and nonnegative");
        Ma += x;
    }
    for (double x : b) {
        if (!(x >= 0.0) || !std::isfinite(x)) fail(Errc::invalid_argument, "transport masses must be finite and nonnegative");
        Mb += x;
    }
    if (!(Ma > 0.0) || !(Mb > 0.0)) fail(Errc::mass_mismatch, "transport between empty measures");
    if (std::abs(Ma - Mb) > 1e-9 * std::max(Ma, Mb))
        fail(Errc::mass_mismatch, "masses differ beyond tolerance: " + std::to_string(Ma) + " vs " + std::to_string(Mb));
    const double T = std::ldexp(1.0, 50);
    auto cum = [T](const std::vector<double>& v, double M, std::vector<std::int64_t>& q) {
        q.assign(v.size(), 0);
        double s = 0.0;
        std::int64_t prev = 0;
        for (std::size_t k = 0; k < v.size(); ++k) {
            s += v[k];
            const std::int64_t now = k + 1 == v.size() ? std::int64_t(T) : std::llround(s / M * T);
            q[k] = now - prev;
            prev = now;
        }
    };
    cum(a, Ma, qa);
    cum(b, Mb, qb);
    unit = std::max(Ma, Mb) / T;
}

TransportResult transport_ssp(const std::vector<Atom2D>& mu, const std::vector<Atom2D>& nu) {
    const int n = int(mu.size()), m = int(nu.size());
    std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(m));
    for (int i = 0; i < n; ++i) a[i] = mu[i].m;
    for (int j = 0; j < m; ++j) b[j] = nu[j].m;
    std::vector<std::int64_t> qa, qb;
    double unit = 0.0;
    quantize_pair(a, b, qa, qb, unit);

    auto cost = [&](int i, int j) { return std::hypot(mu[i].x - nu[j].x, mu[i].y - nu[j].y); };
    const int V = n + m;
    std::vector<double> pot(std::size_t(V), 0.0), dist(static_cast<std::size_t>(V));
    std::vector<int> prev(static_cast<std::size_t>(V));
    std::vector<char> done(static_cast<std::size_t>(V));
    std::vector<std::vector<std::pair<int, std::int64_t>>> back(static_cast<std::size_t>(m));  // sink j -> (source, flow)
    std::vector<std::int64_t> rs(qa), rt(qb);
    std::int64_t remaining = std::accumulate(rs.begin(), rs.end(), std::int64_t(0));
    const double inf = std::numeric_limits<double>::infinity();

    while (remaining > 0) {
        std::fill(dist.begin(), dist.end(), inf);
        std::fill(done.begin(), done.end(), 0);
        std::fill(prev.begin(), prev.end(), -1);
        for (int i = 0; i < n; ++i)
            if (rs[i] > 0) dist[i] = 0.0;
        int target = -1;
        for (;;) {
            int best = -1;
            for (int v = 0; v < V; ++v)
                if (!done[v] && dist[v] < inf && (best < 0 || dist[v] < dist[best])) best = v;
            if (best < 0) break;
            done[best] = 1;
            if (best >= n && rt[best - n] > 0) {
                target = best;
                break;
            }
            if (best < n) {
                for (int j = 0; j < m; ++j) {
                    const int v = n + j;
                    if (done[v]) continue;
                    const double nd = dist[best] + std::max(0.0, cost(best, j) + pot[best] - pot[v]);
                    if (nd < dist[v]) {
                        dist[v] = nd;
                        prev[v] = best;
                    }
                }
            } else {
                const int j = best - n;
                for (const auto& [i, f] : back[j]) {
                    if (f <= 0 || done[i]) continue;
                    const double nd = dist[best] + std::max(0.0, -cost(i, j) + pot[best] - pot[i]);
                    if (nd < dist[i]) {
                        dist[i] = nd;
                        prev[i] = best;
                    }
                }
            }
        }
        if (target < 0) fail(Errc::internal, "transport solver found no augmenting path");
        const double D = dist[target];
        for (int v = 0; v < V; ++v) pot[v] += std::min(dist[v], D);

        std::int64_t delta = rt[target - n];
        int v = target;
        while (prev[v] >= 0) {
            const int u = prev[v];
            if (u >= n) {  // backward arc sink u -> source v
                for (const auto& [i, f] : back[u - n])
                    if (i == v) delta = std::min(delta, f);
            }
            v = u;
        }
        delta = std::min(delta, rs[v]);
        rs[v] -= delta;
        rt[target - n] -= delta;
        remaining -= delta;
        v = target;
        while (prev[v] >= 0) {
            const int u = prev[v];
            if (u < n) {
                auto& lst = back[v - n];
                auto it = std::find_if(lst.begin(), lst.end(), [u](const auto& p) { return p.first == u; });
                if (it == lst.end())
                    lst.push_back({u, delta});
                else
                    it->second += delta;
            } else {
                auto& lst = back[u - n];
                for (auto& p : lst)
                    if (p.first == v) p.second -= delta;
            }
            v = u;
        }
    }

    TransportResult r;
    long double primal = 0.0L;
    for (int j = 0; j < m; ++j)
        for (const auto& [i, f] : back[j])
            if (f > 0) primal += (long double)f * (long double)cost(i, j);
    long double dual = 0.0L;
    for (int j = 0; j < m; ++j) dual += (long double)qb[j] * pot[n + j];
    for (int i = 0; i < n; ++i) dual -= (long double)qa[i] * pot[i];
    double viol = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) viol = std::max(viol, pot[n + j] - pot[i] - cost(i, j));
    r.cost = double(primal * unit);
    r.dual_gap = double(std::abs(primal - dual) * unit);
    r.max_violation = viol;
    const double scale = 1.0 + r.cost;
    if (r.max_violation > 1e-9 * scale || r.dual_gap > 1e-9 * scale)
        fail(Errc::internal, "transport certificate failed: gap " + std::to_string(r.dual_gap) + ", violation " +
                                 std::to_string(r.max_violation));
    return r;
}

namespace {

struct Offset {
    int p, q;
};

std::vector<Offset> primitive_offsets(int radius) {
    std::vector<Offset> out;
    for (int p = -radius; p <= radius; ++p)
        for (int q = -radius; q <= radius; ++q) {
            if (p == 0 && q == 0) continue;
            if (p * p + q * q > radius * radius) continue;
            if (std::gcd(std::abs(p), std::abs(q)) != 1) continue;
            out.push_back({p, q});
        }
    return out;
}

}  // namespace

TransportResult transport_grid(const Measure2D& mu, const Measure2D& nu, int radius) {
    const Grid2D& g = mu.grid;
    const Grid2D& h = nu.grid;
    if (g.nx != h.nx || g.ny != h.ny || g.x0 != h.x0 || g.y0 != h.y0 || g.dx != h.dx || g.dy != h.dy)
        fail(Errc::invalid_argument, "lattice transport needs both measures on the same grid");
    if (radius < 1) fail(Errc::invalid_argument, "stencil radius must be positive");
    const int nx = g.nx, ny = g.ny;
    const int N = nx * ny;
    std::vector<double> a(static_cast<std::size_t>(N)), b(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) {
        a[k] = g.area() * mu.rho[k];
        b[k] = g.area() * nu.rho[k];
    }
    std::vector<std::int64_t> qa, qb;
    double unit = 0.0;
    quantize_pair(a, b, qa, qb, unit);
    std::vector<Int> supply(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) supply[k] = qa[k] - qb[k];

    const double hmin = std::min(g.dx, g.dy);
    const double S = std::ldexp(1.0, 28);  // cost quanta per lattice unit
    auto length = [&](int p, int q) { return std::hypot(p * g.dx, q * g.dy); };
    auto icost = [&](int p, int q) { return Int(std::llround(length(p, q) / hmin * S)); };
    const Int max_cost = icost(nx, ny) + 1;

    NetworkSimplex ns(N, supply, max_cost);
    for (const Offset& o : primitive_offsets(radius)) {
        const Int c = icost(o.p, o.q);
        for (int i = std::max(0, -o.p); i < std::min(nx, nx - o.p); ++i)
            for (int j = std::max(0, -o.q); j < std::min(ny, ny - o.q); ++j)
                ns.add_arc(i * ny + j, (i + o.p) * ny + (j + o.q), c);
    }

    // with metric costs the bipartite dual between excess and deficit nodes certifies the flow
    std::vector<int> sources, sinks;
    for (int k = 0; k < N; ++k) {
        if (supply[k] > 0) sources.push_back(k);
        if (supply[k] < 0) sinks.push_back(k);
    }
    const double sx = g.dx / hmin * S, sy = g.dy / hmin * S;
    std::vector<double> tx(sinks.size()), ty(sinks.size());
    for (std::size_t t = 0; t < sinks.size(); ++t) {
        tx[t] = (sinks[t] / ny) * sx;
        ty[t] = (sinks[t] % ny) * sy;
    }
    std::vector<Int> tp(sinks.size());
    constexpr int per_node = 8;
    constexpr double slack = 2.0;  // rounding allowance in cost quanta

    TransportResult r;
    for (;;) {
        ++r.rounds;
        if (!ns.run()) fail(Errc::internal, "lattice transport is infeasible");
        for (std::size_t t = 0; t < sinks.size(); ++t) tp[t] = ns.potential(sinks[t]);
        std::vector<std::pair<int, int>> add;
        double worst = 0.0;
        for (const int u : sources) {
            const Int pu = ns.potential(u);
            const double ux = (u / ny) * sx, uy = (u % ny) * sy;
            std::array<std::pair<double, int>, per_node> top{};
            int found = 0;
            for (std::size_t t = 0; t < sinks.size(); ++t) {
                const double d = double(tp[t] - pu) - slack;
                if (d <= 0.0) continue;
                const double ex = tx[t] - ux, ey = ty[t] - uy;
                const double c2 = ex * ex + ey * ey;
                if (d * d <= c2) continue;
                const double excess = d - std::sqrt(c2);
                if (found < per_node) {
                    top[std::size_t(found++)] = {excess, int(t)};
                } else {
                    auto it = std::min_element(top.begin(), top.end());
                    if (excess > it->first) *it = {excess, int(t)};
                }
            }
            for (int k = 0; k < found; ++k) {
                worst = std::max(worst, top[std::size_t(k)].first);
                add.push_back({u, sinks[std::size_t(top[std::size_t(k)].second)]});
            }
        }
        r.max_violation = worst / S * hmin;
        if (add.empty()) break;
        for (const auto& [u, v] : add) ns.add_arc(u, v, icost(v / ny - u / ny, v % ny - u % ny));
    }

    long double primal = 0.0L, primal_q = 0.0L;
    for (int e = 0; e < ns.arcs(); ++e) {
        const Int f = ns.flow(e);
        if (f == 0) continue;
        const int u = ns.arc_source(e), v = ns.arc_target(e);
        primal += (long double)f * (long double)length(v / ny - u / ny, v % ny - u % ny);
        primal_q += (long double)f * (long double)ns.arc_cost(e);
    }
    long double dual = 0.0L;
    for (int k = 0; k < N; ++k) dual -= (long double)supply[k] * (long double)ns.potential(k);
    r.cost = double(primal * unit);
    r.dual_gap = double(std::abs(primal_q - dual) / S * hmin * unit);
    r.arcs = ns.arcs();
    if (r.dual_gap > 1e-12 * (1.0 + r.cost)) fail(Errc::internal, "lattice transport certificate failed");
    return r;
}

double d1_2d(const std::vector<Atom2D>& mu, const std::vector<Atom2D>& nu, const D1Options& opt) {
    std::vector<Atom2D> a, b;
    for (const auto& x : mu)
        if (x.m > opt.threshold) a.push_back(x);
    for (const auto& x : nu)
        if (x.m > opt.threshold) b.push_back(x);
    if (int(a.size() + b.size()) > opt.cap)
        fail(Errc::cap_exceeded, "transport instance has " + std::to_string(a.size() + b.size()) + " atoms, cap is " +
                                     std::to_string(opt.cap));
    return transport_ssp(a, b).cost;
}

double d1_2d(const Measure2D& mu, const Measure2D& nu, const D1Options& opt) {
    const Grid2D& g = mu.grid;
    const Grid2D& h = nu.grid;
    const bool same = g.nx == h.nx && g.ny == h.ny && g.x0 == h.x0 && g.y0 == h.y0 && g.dx == h.dx && g.dy == h.dy;
    if (!same) return d1_2d(atoms_of(mu, opt.threshold), atoms_of(nu, opt.threshold), opt);
    Measure2D a(mu.grid), b(nu.grid);
    for (std::size_t k = 0; k < a.rho.size(); ++k) {
        a.rho[k] = g.area() * mu.rho[k] > opt.threshold ? mu.rho[k] : 0.0;
        b.rho[k] = g.area() * nu.rho[k] > opt.threshold ? nu.rho[k] : 0.0;
    }
    return transport_grid(a, b, opt.radius).cost;
}

}  // namespace aggro
