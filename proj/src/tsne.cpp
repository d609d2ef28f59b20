#include "hullforge/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "hullforge/errors.hpp"

namespace hullforge {

namespace {

constexpr double kProbFloor = 1e-12;

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

// Gaussian bandwidth search: find beta so the conditional distribution
// over `d2` has entropy log(perplexity). Expand until bracketed, then
// bisect. Writes the conditional probabilities into `probs`.
void calibrate_row(const std::vector<double>& d2, double perplexity,
                   std::vector<double>& probs) {
    const double target = std::log(perplexity);
    double beta = 1.0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    const std::size_t m = d2.size();
    probs.assign(m, 0.0);

    for (int iter = 0; iter < 512; ++iter) {
        double sum = 0.0, weighted = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double p = std::exp(-beta * d2[j]);
            probs[j] = p;
            sum += p;
            weighted += p * d2[j];
        }
        if (sum <= 0.0) {
            // beta overshot every finite distance; fall back toward lo.
            hi = beta;
            beta = lo > 0.0 ? 0.5 * (lo + hi) : beta * 0.5;
            continue;
        }
        const double entropy = std::log(sum) + beta * weighted / sum;
        const double diff = entropy - target;
        if (std::abs(diff) < 1e-7) break;
        if (diff > 0.0) {
            lo = beta;
            beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
        } else {
            hi = beta;
            beta = std::isinf(lo) ? beta * 0.5 : 0.5 * (beta + lo);
        }
    }
    double sum = 0.0;
    for (const double p : probs) sum += p;
    if (sum <= 0.0) {
        const double uniform = 1.0 / static_cast<double>(m);
        for (double& p : probs) p = uniform;
    } else {
        for (double& p : probs) p /= sum;
    }
}

void require_perplexity(std::size_t n, double perplexity) {
    if (perplexity < 2.0) throw PerplexityError("perplexity must be at least 2");
    if (static_cast<double>(n) < 3.0 * perplexity) {
        throw PerplexityError("need n >= 3*perplexity, have n=" + std::to_string(n));
    }
}

// Sparse symmetrized affinities over 3*perplexity nearest neighbors.
std::vector<std::vector<std::pair<std::size_t, double>>> sparse_affinities(
    const Matrix& data, double perplexity) {
    const std::size_t n = data.rows;
    const auto k = std::min<std::size_t>(
        n - 1, static_cast<std::size_t>(std::floor(3.0 * perplexity)));

    std::vector<std::vector<std::pair<double, std::size_t>>> knn(n);
    parallel_for(n, [&](std::size_t i) {
        std::vector<std::pair<double, std::size_t>> dists;
        dists.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) dists.emplace_back(sq_dist(data.row(i), data.row(j)), j);
        }
        std::partial_sort(dists.begin(), dists.begin() + static_cast<long>(k), dists.end());
        dists.resize(k);
        knn[i] = std::move(dists);
    });

    std::vector<std::vector<double>> cond(n);
    parallel_for(n, [&](std::size_t i) {
        std::vector<double> d2(k);
        for (std::size_t j = 0; j < k; ++j) d2[j] = knn[i][j].first;
        calibrate_row(d2, perplexity, cond[i]);
    });

    std::vector<std::map<std::size_t, double>> sym(n);
    const double scale = 1.0 / (2.0 * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t target = knn[i][j].second;
            const double p = cond[i][j] * scale;
            sym[i][target] += p;
            sym[target][i] += p;
        }
    }
    std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i].assign(sym[i].begin(), sym[i].end());
    return rows;
}

// Barnes-Hut quadtree over 2-d embedding points.
struct QuadTree {
    struct Node {
        double cx, cy, half;          // square cell
        double mx = 0.0, my = 0.0;    // center of mass
        std::size_t count = 0;
        int child[4] = {-1, -1, -1, -1};
        int point = -1;               // leaf payload
        bool leaf = true;
    };
    std::vector<Node> nodes;
    const Matrix& y;

    explicit QuadTree(const Matrix& coords) : y(coords) {
        double x_lo = coords(0, 0), x_hi = x_lo, y_lo = coords(0, 1), y_hi = y_lo;
        for (std::size_t i = 1; i < coords.rows; ++i) {
            x_lo = std::min(x_lo, coords(i, 0));
            x_hi = std::max(x_hi, coords(i, 0));
            y_lo = std::min(y_lo, coords(i, 1));
            y_hi = std::max(y_hi, coords(i, 1));
        }
        const double half = 0.5 * std::max(x_hi - x_lo, y_hi - y_lo) + 1e-9;
        nodes.push_back({0.5 * (x_lo + x_hi), 0.5 * (y_lo + y_hi), half});
        for (std::size_t i = 0; i < coords.rows; ++i) insert(0, static_cast<int>(i), 0);
    }

    void insert(int node, int p, int depth) {
        Node& nd = nodes[static_cast<std::size_t>(node)];
        const double px = y(static_cast<std::size_t>(p), 0);
        const double py = y(static_cast<std::size_t>(p), 1);
        nd.mx = (nd.mx * static_cast<double>(nd.count) + px) / static_cast<double>(nd.count + 1);
        nd.my = (nd.my * static_cast<double>(nd.count) + py) / static_cast<double>(nd.count + 1);
        nd.count++;
        if (nd.leaf && nd.point < 0) {
            nd.point = p;
            return;
        }
        // Coincident points past the depth limit share one leaf.
        if (depth > 64) return;
        if (nd.leaf) {
            const int old = nd.point;
            nd.point = -1;
            nd.leaf = false;
            descend(node, old, depth);
        }
        descend(node, p, depth);
    }

    void descend(int node, int p, int depth) {
        const double px = y(static_cast<std::size_t>(p), 0);
        const double py = y(static_cast<std::size_t>(p), 1);
        Node& nd = nodes[static_cast<std::size_t>(node)];
        const int qx = px >= nd.cx ? 1 : 0;
        const int qy = py >= nd.cy ? 1 : 0;
        const int q = qy * 2 + qx;
        if (nd.child[q] < 0) {
            const double h = 0.5 * nd.half;
            Node child;
            child.cx = nd.cx + (qx ? h : -h);
            child.cy = nd.cy + (qy ? h : -h);
            child.half = h;
            nodes.push_back(child);
            nodes[static_cast<std::size_t>(node)].child[q] =
                static_cast<int>(nodes.size() - 1);
        }
        insert(nodes[static_cast<std::size_t>(node)].child[q], p, depth + 1);
    }

    // Accumulates the repulsive numerator and the Z partial for point i.
    void force(std::size_t i, double theta, double& fx, double& fy, double& z) const {
        const double px = y(i, 0);
        const double py = y(i, 1);
        std::vector<int> stack{0};
        while (!stack.empty()) {
            const Node& nd = nodes[static_cast<std::size_t>(stack.back())];
            stack.pop_back();
            if (nd.count == 0) continue;
            const double dx = px - nd.mx;
            const double dy = py - nd.my;
            const double d2 = dx * dx + dy * dy;
            const bool summarize =
                nd.leaf || (2.0 * nd.half) * (2.0 * nd.half) < theta * theta * d2;
            if (summarize) {
                const double w = 1.0 / (1.0 + d2);
                const double mass = static_cast<double>(nd.count);
                z += mass * w;
                const double ww = mass * w * w;
                fx += ww * dx;
                fy += ww * dy;
            } else {
                for (const int c : nd.child) {
                    if (c >= 0) stack.push_back(c);
                }
            }
        }
        // Remove the self term (w = 1 at distance 0).
        z -= 1.0;
    }
};

Matrix random_init(std::size_t n, std::uint64_t seed) {
    RandomEngine rng(seed);
    Matrix y(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        y(i, 0) = 1e-4 * rng.normal();
        y(i, 1) = 1e-4 * rng.normal();
    }
    return y;
}

double kl_exact(const Matrix& p, const Matrix& y) {
    const std::size_t n = y.rows;
    std::vector<double> zpart(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) acc += 1.0 / (1.0 + sq_dist(y.row(i), y.row(j)));
        }
        zpart[i] = acc;
    });
    double z = 0.0;
    for (const double v : zpart) z += v;
    z = std::max(z, kProbFloor);

    std::vector<double> klpart(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double pij = p(i, j);
            if (pij <= 0.0) continue;
            const double q =
                std::max(1.0 / ((1.0 + sq_dist(y.row(i), y.row(j))) * z), kProbFloor);
            acc += pij * std::log(std::max(pij, kProbFloor) / q);
        }
        klpart[i] = acc;
    });
    double kl = 0.0;
    for (const double v : klpart) kl += v;
    return kl;
}

double kl_sparse(const std::vector<std::vector<std::pair<std::size_t, double>>>& p,
                 const Matrix& y, double theta) {
    const std::size_t n = y.rows;
    const QuadTree tree(y);
    std::vector<double> zpart(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        double fx = 0.0, fy = 0.0, z = 0.0;
        tree.force(i, theta, fx, fy, z);
        zpart[i] = z;
    });
    double z = 0.0;
    for (const double v : zpart) z += v;
    z = std::max(z, kProbFloor);

    std::vector<double> klpart(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        double acc = 0.0;
        for (const auto& [j, pij] : p[i]) {
            if (pij <= 0.0) continue;
            const double q =
                std::max(1.0 / ((1.0 + sq_dist(y.row(i), y.row(j))) * z), kProbFloor);
            acc += pij * std::log(std::max(pij, kProbFloor) / q);
        }
        klpart[i] = acc;
    });
    double kl = 0.0;
    for (const double v : klpart) kl += v;
    return kl;
}

} // namespace

Matrix tsne_affinities(const Matrix& data, double perplexity) {
    const std::size_t n = data.rows;
    require_perplexity(n, perplexity);

    Matrix p(n, n);
    parallel_for(n, [&](std::size_t i) {
        std::vector<double> d2(n - 1);
        std::vector<std::size_t> idx(n - 1);
        std::size_t m = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            d2[m] = sq_dist(data.row(i), data.row(j));
            idx[m] = j;
            ++m;
        }
        std::vector<double> probs;
        calibrate_row(d2, perplexity, probs);
        for (std::size_t j = 0; j < m; ++j) p(i, idx[j]) = probs[j];
    });

    // Joint distribution: symmetrize and normalize to total mass 1.
    Matrix joint(n, n);
    const double scale = 1.0 / (2.0 * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            joint(i, j) = (p(i, j) + p(j, i)) * scale;
        }
    }
    return joint;
}

EmbeddingResult tsne_embed(const Matrix& data, double perplexity, int iters,
                           std::uint64_t seed) {
    TsneOptions opts;
    opts.perplexity = perplexity;
    opts.iters = iters;
    return tsne_embed(data, seed, opts);
}

EmbeddingResult tsne_embed(const Matrix& data, std::uint64_t seed, const TsneOptions& opts) {
    const std::size_t n = data.rows;
    require_perplexity(n, opts.perplexity);
    const bool exact = n <= opts.exact_threshold;

    Matrix dense_p;
    std::vector<std::vector<std::pair<std::size_t, double>>> sparse_p;
    if (exact) {
        dense_p = tsne_affinities(data, opts.perplexity);
    } else {
        sparse_p = sparse_affinities(data, opts.perplexity);
    }

    Matrix y = random_init(n, seed);
    EmbeddingResult result;
    result.perplexity = opts.perplexity;
    result.seed = seed;
    result.initial_kl =
        exact ? kl_exact(dense_p, y) : kl_sparse(sparse_p, y, opts.theta);

    Matrix inc(n, 2), gains(n, 2), grad(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        gains(i, 0) = gains(i, 1) = 1.0;
        inc(i, 0) = inc(i, 1) = 0.0;
    }
    std::vector<double> zpart(n, 0.0);

    for (int iter = 0; iter < opts.iters; ++iter) {
        const double exag = iter < opts.exaggeration_iters ? opts.exaggeration : 1.0;
        const double momentum =
            iter < opts.momentum_switch ? opts.initial_momentum : opts.final_momentum;

        if (exact) {
            parallel_for(n, [&](std::size_t i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j != i) acc += 1.0 / (1.0 + sq_dist(y.row(i), y.row(j)));
                }
                zpart[i] = acc;
            });
            double z = 0.0;
            for (const double v : zpart) z += v;
            z = std::max(z, kProbFloor);
            parallel_for(n, [&](std::size_t i) {
                double gx = 0.0, gy = 0.0;
                const double yi0 = y(i, 0), yi1 = y(i, 1);
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i) continue;
                    const double dx = yi0 - y(j, 0);
                    const double dy = yi1 - y(j, 1);
                    const double w = 1.0 / (1.0 + dx * dx + dy * dy);
                    const double coeff = (exag * dense_p(i, j) - w / z) * w;
                    gx += coeff * dx;
                    gy += coeff * dy;
                }
                grad(i, 0) = 4.0 * gx;
                grad(i, 1) = 4.0 * gy;
            });
        } else {
            const QuadTree tree(y);
            parallel_for(n, [&](std::size_t i) {
                double fx = 0.0, fy = 0.0, z = 0.0;
                tree.force(i, opts.theta, fx, fy, z);
                zpart[i] = z;
                grad(i, 0) = fx; // repulsive numerators, scaled below
                grad(i, 1) = fy;
            });
            double z = 0.0;
            for (const double v : zpart) z += v;
            z = std::max(z, kProbFloor);
            parallel_for(n, [&](std::size_t i) {
                double ax = 0.0, ay = 0.0;
                const double yi0 = y(i, 0), yi1 = y(i, 1);
                for (const auto& [j, pij] : sparse_p[i]) {
                    const double dx = yi0 - y(j, 0);
                    const double dy = yi1 - y(j, 1);
                    const double w = 1.0 / (1.0 + dx * dx + dy * dy);
                    ax += exag * pij * w * dx;
                    ay += exag * pij * w * dy;
                }
                grad(i, 0) = 4.0 * (ax - grad(i, 0) / z);
                grad(i, 1) = 4.0 * (ay - grad(i, 1) / z);
            });
        }

        // Delta-bar-delta gains, then momentum step and recentering.
        double mean0 = 0.0, mean1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < 2; ++d) {
                const bool same_sign = (grad(i, d) > 0.0) == (inc(i, d) > 0.0);
                gains(i, d) = same_sign ? gains(i, d) * 0.8 : gains(i, d) + 0.2;
                gains(i, d) = std::max(gains(i, d), 0.01);
                inc(i, d) = momentum * inc(i, d) - opts.learning_rate * gains(i, d) * grad(i, d);
                y(i, d) += inc(i, d);
            }
            mean0 += y(i, 0);
            mean1 += y(i, 1);
        }
        mean0 /= static_cast<double>(n);
        mean1 /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            y(i, 0) -= mean0;
            y(i, 1) -= mean1;
        }
    }

    result.final_kl = exact ? kl_exact(dense_p, y) : kl_sparse(sparse_p, y, opts.theta);
    result.coords = std::move(y);
    return result;
}

} // namespace hullforge
