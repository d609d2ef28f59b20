#include "hullforge/gmm.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "hullforge/errors.hpp"
#include "hullforge/kmeans.hpp"
#include "hullforge/params.hpp"

namespace hullforge {

namespace {

constexpr double kDegenerateMass = 1e-3;    // responsibility mass below this collapses
constexpr double kDegenerateVariance = 1e-12;

using EMatrix = Eigen::MatrixXd;
using EVector = Eigen::VectorXd;

EVector to_eigen(std::span<const double> x) {
    EVector v(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) v[static_cast<Eigen::Index>(i)] = x[i];
    return v;
}

// Working state of one mixture in normalized space.
struct Mixture {
    std::vector<double> weights;
    EMatrix means;              // k x d
    std::vector<EMatrix> covs;  // d x d
    std::vector<EMatrix> lower; // Cholesky factors
    std::vector<double> log_norm;

    std::size_t k() const { return weights.size(); }
    std::size_t dim() const { return static_cast<std::size_t>(means.cols()); }

    // Factors every covariance; false when any component has collapsed
    // beyond what the ridge can repair.
    bool prepare() {
        const auto kk = k();
        const auto d = static_cast<Eigen::Index>(dim());
        lower.assign(kk, EMatrix());
        log_norm.assign(kk, 0.0);
        for (std::size_t c = 0; c < kk; ++c) {
            if (covs[c].diagonal().mean() < kDegenerateVariance) return false;
            Eigen::LLT<EMatrix> llt(covs[c]);
            if (llt.info() != Eigen::Success) return false;
            lower[c] = llt.matrixL();
            double log_det = 0.0;
            for (Eigen::Index i = 0; i < d; ++i) log_det += std::log(lower[c](i, i));
            log_det *= 2.0;
            log_norm[c] = -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) +
                                  log_det);
        }
        return true;
    }

    double log_component(std::size_t c, const EVector& x) const {
        const EVector diff = x - means.row(static_cast<Eigen::Index>(c)).transpose();
        const EVector y = lower[c].triangularView<Eigen::Lower>().solve(diff);
        return log_norm[c] - 0.5 * y.squaredNorm();
    }

    // log-sum-exp of log w_c + log N_c(x); optionally writes the
    // posterior responsibilities.
    double log_density(const EVector& x, double* resp) const {
        const auto kk = k();
        std::vector<double> lp(kk);
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < kk; ++c) {
            lp[c] = std::log(weights[c]) + log_component(c, x);
            top = std::max(top, lp[c]);
        }
        double sum = 0.0;
        for (std::size_t c = 0; c < kk; ++c) sum += std::exp(lp[c] - top);
        const double lse = top + std::log(sum);
        if (resp) {
            for (std::size_t c = 0; c < kk; ++c) resp[c] = std::exp(lp[c] - lse);
        }
        return lse;
    }
};

void apply_floor(EMatrix& cov, double floor_scale) {
    const double ridge = floor_scale * cov.diagonal().mean();
    cov += ridge * EMatrix::Identity(cov.rows(), cov.cols());
}

EMatrix global_covariance(const Matrix& x) {
    const auto n = static_cast<Eigen::Index>(x.rows);
    const auto d = static_cast<Eigen::Index>(x.cols);
    EVector mean = EVector::Zero(d);
    for (Eigen::Index i = 0; i < n; ++i) mean += to_eigen(x.row(static_cast<std::size_t>(i)));
    mean /= static_cast<double>(n);
    EMatrix cov = EMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        const EVector diff = to_eigen(x.row(static_cast<std::size_t>(i))) - mean;
        cov += diff * diff.transpose();
    }
    cov /= std::max(1.0, static_cast<double>(n - 1));
    return cov;
}

Mixture init_mixture(const Matrix& x, std::size_t k, std::uint64_t seed, double floor_scale) {
    const std::size_t n = x.rows;
    const std::size_t d = x.cols;
    const KMeansModel km = kmeans(x, k, seed, 1);

    Mixture m;
    m.weights.assign(k, 0.0);
    m.means = EMatrix(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
    m.covs.assign(k, EMatrix());

    const EMatrix global = global_covariance(x);
    std::vector<std::size_t> counts(k, 0);
    for (const int label : km.labels) counts[static_cast<std::size_t>(label)]++;

    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t j = 0; j < d; ++j) {
            m.means(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)) =
                km.centroids(c, j);
        }
        m.weights[c] = std::max(static_cast<double>(counts[c]), 1.0) / static_cast<double>(n);
        if (counts[c] >= 2) {
            EMatrix cov = EMatrix::Zero(static_cast<Eigen::Index>(d),
                                        static_cast<Eigen::Index>(d));
            const EVector mu = m.means.row(static_cast<Eigen::Index>(c)).transpose();
            for (std::size_t i = 0; i < n; ++i) {
                if (static_cast<std::size_t>(km.labels[i]) != c) continue;
                const EVector diff = to_eigen(x.row(i)) - mu;
                cov += diff * diff.transpose();
            }
            cov /= static_cast<double>(counts[c]);
            m.covs[c] = cov;
        } else {
            m.covs[c] = global;
        }
        apply_floor(m.covs[c], floor_scale);
    }
    const double total = std::accumulate(m.weights.begin(), m.weights.end(), 0.0);
    for (double& w : m.weights) w /= total;
    return m;
}

struct EmRun {
    Mixture mixture;
    double avg_ll = -std::numeric_limits<double>::infinity();
    std::vector<double> history;
};

// One EM run to convergence. Throws DegenerateComponentError when a
// component collapses twice (it is reseeded on the worst-explained
// point the first time).
EmRun run_em(const Matrix& x, std::size_t k, std::uint64_t seed, const GmmFitOptions& opts) {
    const std::size_t n = x.rows;
    const std::size_t d = x.cols;

    EmRun run;
    run.mixture = init_mixture(x, k, seed, opts.floor_scale);
    Mixture& m = run.mixture;

    std::vector<EVector> points;
    points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) points.push_back(to_eigen(x.row(i)));

    const EMatrix global = global_covariance(x);
    Matrix resp(n, k);
    std::vector<double> point_ll(n, 0.0);
    bool reseeded_once = false;
    double prev_ll = -std::numeric_limits<double>::infinity();

    auto reseed_component = [&](std::size_t c) {
        // Move the dead component onto the point the mixture explains
        // worst; every weight is pulled back onto the simplex.
        std::size_t worst = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (point_ll[i] < point_ll[worst]) worst = i;
        }
        m.means.row(static_cast<Eigen::Index>(c)) = points[worst].transpose();
        m.covs[c] = global;
        apply_floor(m.covs[c], opts.floor_scale);
        m.weights[c] = 1.0 / static_cast<double>(n);
        const double total = std::accumulate(m.weights.begin(), m.weights.end(), 0.0);
        for (double& w : m.weights) w /= total;
    };

    if (!m.prepare()) {
        reseeded_once = true;
        for (std::size_t c = 0; c < k; ++c) {
            m.covs[c] = global;
            apply_floor(m.covs[c], opts.floor_scale);
        }
        if (!m.prepare()) throw DegenerateComponentError("initial covariances are singular");
    }

    for (int iter = 0;; ++iter) {
        // E-step at the current parameters.
        parallel_for(n, [&](std::size_t i) {
            point_ll[i] = m.log_density(points[i], resp.row(i).data());
        });
        double avg_ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) avg_ll += point_ll[i];
        avg_ll /= static_cast<double>(n);
        run.history.push_back(avg_ll);
        run.avg_ll = avg_ll;

        const bool converged =
            iter > 0 && std::abs(avg_ll - prev_ll) / (std::abs(prev_ll) + 1e-12) < opts.tol;
        prev_ll = avg_ll;
        if (converged || iter >= opts.max_iter) break;

        // M-step.
        bool degenerate = false;
        for (std::size_t c = 0; c < k && !degenerate; ++c) {
            double mass = 0.0;
            for (std::size_t i = 0; i < n; ++i) mass += resp(i, c);
            if (mass < kDegenerateMass) {
                degenerate = true;
                break;
            }
            EVector mu = EVector::Zero(static_cast<Eigen::Index>(d));
            for (std::size_t i = 0; i < n; ++i) mu += resp(i, c) * points[i];
            mu /= mass;
            EMatrix cov = EMatrix::Zero(static_cast<Eigen::Index>(d),
                                        static_cast<Eigen::Index>(d));
            for (std::size_t i = 0; i < n; ++i) {
                const EVector diff = points[i] - mu;
                cov += resp(i, c) * (diff * diff.transpose());
            }
            cov /= mass;
            apply_floor(cov, opts.floor_scale);
            m.means.row(static_cast<Eigen::Index>(c)) = mu.transpose();
            m.covs[c] = cov;
            m.weights[c] = mass / static_cast<double>(n);
        }
        if (!degenerate) {
            const double total = std::accumulate(m.weights.begin(), m.weights.end(), 0.0);
            for (double& w : m.weights) w /= total;
            degenerate = !m.prepare();
        }
        if (degenerate) {
            if (reseeded_once) {
                throw DegenerateComponentError("component collapsed twice during EM");
            }
            reseeded_once = true;
            // Identify every dead component and restart it.
            for (std::size_t c = 0; c < k; ++c) {
                double mass = 0.0;
                for (std::size_t i = 0; i < n; ++i) mass += resp(i, c);
                if (mass < kDegenerateMass ||
                    m.covs[c].diagonal().mean() < kDegenerateVariance) {
                    reseed_component(c);
                }
            }
            if (!m.prepare()) {
                throw DegenerateComponentError("component collapsed twice during EM");
            }
        }
        if (opts.observer) opts.observer(m.weights, avg_ll);
    }
    return run;
}

// Shared prepared-factor view over a stored model.
Mixture mixture_from_model(const GmmModel& model) {
    Mixture m;
    m.weights = model.weights;
    m.means = EMatrix(static_cast<Eigen::Index>(model.k), static_cast<Eigen::Index>(model.dim));
    for (std::size_t c = 0; c < model.k; ++c) {
        for (std::size_t j = 0; j < model.dim; ++j) {
            m.means(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)) =
                model.means(c, j);
        }
    }
    m.covs.reserve(model.k);
    for (const Matrix& cov : model.covariances) {
        EMatrix e(static_cast<Eigen::Index>(cov.rows), static_cast<Eigen::Index>(cov.cols));
        for (std::size_t i = 0; i < cov.rows; ++i) {
            for (std::size_t j = 0; j < cov.cols; ++j) {
                e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cov(i, j);
            }
        }
        m.covs.push_back(std::move(e));
    }
    if (!m.prepare()) throw DegenerateComponentError("stored covariance is not positive definite");
    return m;
}

} // namespace

GmmModel fit_gmm(const Matrix& data, std::size_t k, std::uint64_t seed,
                 const GmmFitOptions& opts) {
    if (k < 1) throw KRangeError("k must be at least 1");
    if (k > data.rows) {
        throw KRangeError("k=" + std::to_string(k) + " exceeds n=" + std::to_string(data.rows));
    }
    const Normalizer norm = Normalizer::fit(data);
    const Matrix x = norm.apply(data);

    EmRun best;
    bool have = false;
    std::string last_error;
    for (int r = 0; r < std::max(opts.restarts, 1); ++r) {
        const std::uint64_t sub =
            seed ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(r + 1));
        try {
            EmRun run = run_em(x, k, sub, opts);
            if (!have || run.avg_ll > best.avg_ll) {
                best = std::move(run);
                have = true;
            }
        } catch (const DegenerateComponentError& e) {
            last_error = e.what();
        }
    }
    if (!have) throw DegenerateComponentError(last_error.empty() ? "all restarts degenerate"
                                                                 : last_error);

    GmmModel model;
    model.k = k;
    model.dim = data.cols;
    model.weights = best.mixture.weights;
    model.means = Matrix(k, data.cols);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t j = 0; j < data.cols; ++j) {
            model.means(c, j) = best.mixture.means(static_cast<Eigen::Index>(c),
                                                   static_cast<Eigen::Index>(j));
        }
    }
    model.covariances.reserve(k);
    for (const EMatrix& cov : best.mixture.covs) {
        Matrix out(data.cols, data.cols);
        for (std::size_t i = 0; i < data.cols; ++i) {
            for (std::size_t j = 0; j < data.cols; ++j) {
                out(i, j) = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
        model.covariances.push_back(std::move(out));
    }
    model.train_loglik = best.avg_ll;
    model.seed = seed;
    model.normalizer = norm;
    model.loglik_history = std::move(best.history);
    return model;
}

GmmSelection select_gmm(const Matrix& data, std::size_t k_min, std::size_t k_max,
                        std::uint64_t seed, const GmmFitOptions& opts) {
    if (k_min < 1 || k_min > k_max) throw KRangeError("need 1 <= k_min <= k_max");
    GmmSelection sel;
    bool have = false;
    double best_bic = std::numeric_limits<double>::infinity();
    const auto n = static_cast<double>(data.rows);
    const auto d = static_cast<double>(data.cols);
    std::string last_error;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        GmmModel model;
        try {
            model = fit_gmm(data, k, seed, opts);
        } catch (const Error& e) {
            // A k too rich for the data drops out of the scan instead
            // of aborting it.
            last_error = e.what();
            continue;
        }
        const double params =
            static_cast<double>(k) * (d + d * (d + 1.0) / 2.0) + (static_cast<double>(k) - 1.0);
        const double bic = -2.0 * model.train_loglik * n + params * std::log(n);
        sel.bic_curve.emplace_back(k, bic);
        if (bic < best_bic) {
            best_bic = bic;
            sel.best = std::move(model);
            have = true;
        }
    }
    if (!have) {
        throw DegenerateComponentError(last_error.empty() ? "no component count could be fitted"
                                                          : last_error);
    }
    return sel;
}

std::vector<double> responsibilities(const GmmModel& model, std::span<const double> x) {
    if (x.size() != model.dim) throw ArityError("point dimension does not match model");
    const Mixture m = mixture_from_model(model);
    std::vector<double> norm_x(model.dim);
    model.normalizer.apply(x, norm_x);
    std::vector<double> out(model.k, 0.0);
    m.log_density(to_eigen(norm_x), out.data());
    return out;
}

GmmSampler::GmmSampler(const GmmModel& model, std::uint64_t seed)
    : model_(&model), rng_(seed) {
    const Mixture m = mixture_from_model(model);
    chol_.reserve(model.k);
    for (const EMatrix& l : m.lower) {
        Matrix out(model.dim, model.dim);
        for (std::size_t i = 0; i < model.dim; ++i) {
            for (std::size_t j = 0; j < model.dim; ++j) {
                out(i, j) = l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
        chol_.push_back(std::move(out));
    }
    cum_weights_.resize(model.k);
    double acc = 0.0;
    for (std::size_t c = 0; c < model.k; ++c) {
        acc += model.weights[c];
        cum_weights_[c] = acc;
    }
    cum_weights_.back() = 1.0;
    scratch_.resize(model.dim);
}

void GmmSampler::draw(std::span<double> out) {
    const std::size_t d = model_->dim;
    const double u = rng_.uniform01();
    std::size_t c = 0;
    while (c + 1 < cum_weights_.size() && u > cum_weights_[c]) ++c;
    for (std::size_t j = 0; j < d; ++j) scratch_[j] = rng_.normal();
    const Matrix& l = chol_[c];
    std::vector<double> norm_x(d);
    for (std::size_t i = 0; i < d; ++i) {
        double acc = model_->means(c, i);
        for (std::size_t j = 0; j <= i; ++j) acc += l(i, j) * scratch_[j];
        norm_x[i] = acc;
    }
    model_->normalizer.invert(norm_x, out);
    if (d == kParamCount) snap_flags(out);
}

Matrix sample_gmm(const GmmModel& model, std::size_t n, std::uint64_t seed) {
    GmmSampler sampler(model, seed);
    Matrix out(n, model.dim);
    for (std::size_t i = 0; i < n; ++i) sampler.draw(out.row(i));
    return out;
}

Matrix component_prototypes(const GmmModel& model) {
    Matrix out(model.k, model.dim);
    for (std::size_t c = 0; c < model.k; ++c) {
        model.normalizer.invert(model.means.row(c), out.row(c));
    }
    return out;
}

std::vector<double> interpolate_designs(const GmmModel& model, std::span<const double> a,
                                        std::span<const double> b, double t) {
    if (a.size() != model.dim || b.size() != model.dim) {
        throw ArityError("endpoint dimension does not match model");
    }
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("blend parameter must be in [0, 1]");
    const std::size_t d = model.dim;
    std::vector<double> na(d), nb(d), mix(d), out(d);
    model.normalizer.apply(a, na);
    model.normalizer.apply(b, nb);
    for (std::size_t j = 0; j < d; ++j) mix[j] = na[j] + (nb[j] - na[j]) * t;
    model.normalizer.invert(mix, out);
    if (d == kParamCount) {
        const auto& specs = param_specs();
        for (std::size_t j = 0; j < d; ++j) {
            if (!specs[j].is_flag) continue;
            // Flags stay binary: take whichever endpoint the blend is
            // closer to (ties to the first).
            out[j] = std::abs(out[j] - a[j]) <= std::abs(out[j] - b[j]) ? a[j] : b[j];
        }
        validate_params(out);
    }
    return out;
}

OutlierReport outlier_scores(const GmmModel& model, const Matrix& data, double quantile) {
    if (data.cols != model.dim) throw ArityError("data dimension does not match model");
    const Mixture m = mixture_from_model(model);
    OutlierReport rep;
    rep.scores.assign(data.rows, 0.0);
    const Matrix x = model.normalizer.apply(data);
    parallel_for(data.rows, [&](std::size_t i) {
        rep.scores[i] = m.log_density(to_eigen(x.row(i)), nullptr);
    });
    std::vector<std::size_t> order(data.rows);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (rep.scores[i] != rep.scores[j]) return rep.scores[i] < rep.scores[j];
        return i < j;
    });
    const auto count = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(quantile * static_cast<double>(data.rows))));
    rep.lowest.assign(order.begin(), order.begin() + static_cast<long>(std::min(count, data.rows)));
    return rep;
}

NoveltyResult novelty_check(std::span<const double> sample, const Matrix& training,
                            const Normalizer& norm, double epsilon) {
    if (training.rows == 0) throw EmptyDataError("novelty check needs training rows");
    const std::size_t d = training.cols;
    std::vector<double> ns(d), nt(d);
    norm.apply(sample, ns);
    NoveltyResult result;
    result.nearest_distance = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < training.rows; ++r) {
        norm.apply(training.row(r), nt);
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = ns[j] - nt[j];
            s += diff * diff;
        }
        result.nearest_distance = std::min(result.nearest_distance, std::sqrt(s));
    }
    result.is_novel = result.nearest_distance > epsilon;
    return result;
}

NoveltyResult novelty_check(std::span<const double> sample, const Matrix& training,
                            double epsilon) {
    return novelty_check(sample, training, Normalizer::fit(training), epsilon);
}

void GmmModel::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << "hullforge-gmm 1\n";
    os << "k " << k << " dim " << dim << "\n";
    os << "seed " << seed << "\n";
    os << "train_loglik " << format_double(train_loglik) << "\n";
    os << "weights";
    for (const double w : weights) os << " " << format_double(w);
    os << "\nmeans\n";
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t j = 0; j < dim; ++j) os << (j ? " " : "") << format_double(means(c, j));
        os << "\n";
    }
    os << "covariances\n";
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                os << (j ? " " : "") << format_double(covariances[c](i, j));
            }
            os << "\n";
        }
    }
    os << "loglik_history";
    for (const double v : loglik_history) os << " " << format_double(v);
    os << "\n";
    normalizer.write(os);
    if (!os) throw IoError("write failed: " + path);
}

GmmModel GmmModel::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(is, line) || line != "hullforge-gmm 1") {
        throw ParseError("not a mixture model file: " + path);
    }
    GmmModel model;
    std::string tag;
    if (!(is >> tag >> model.k) || tag != "k" || !(is >> tag >> model.dim) || tag != "dim") {
        throw ParseError("bad model dimensions in " + path);
    }
    if (!(is >> tag >> model.seed) || tag != "seed") throw ParseError("bad seed in " + path);
    std::string value;
    if (!(is >> tag >> value) || tag != "train_loglik" || !parse_double(value, model.train_loglik)) {
        throw ParseError("bad train_loglik in " + path);
    }
    if (!(is >> tag) || tag != "weights") throw ParseError("bad weights in " + path);
    model.weights.resize(model.k);
    for (double& w : model.weights) {
        if (!(is >> value) || !parse_double(value, w)) throw ParseError("bad weight in " + path);
    }
    if (!(is >> tag) || tag != "means") throw ParseError("bad means in " + path);
    model.means = Matrix(model.k, model.dim);
    for (std::size_t c = 0; c < model.k; ++c) {
        for (std::size_t j = 0; j < model.dim; ++j) {
            if (!(is >> value) || !parse_double(value, model.means(c, j))) {
                throw ParseError("bad mean entry in " + path);
            }
        }
    }
    if (!(is >> tag) || tag != "covariances") throw ParseError("bad covariances in " + path);
    model.covariances.assign(model.k, Matrix(model.dim, model.dim));
    for (std::size_t c = 0; c < model.k; ++c) {
        for (std::size_t i = 0; i < model.dim; ++i) {
            for (std::size_t j = 0; j < model.dim; ++j) {
                if (!(is >> value) || !parse_double(value, model.covariances[c](i, j))) {
                    throw ParseError("bad covariance entry in " + path);
                }
            }
        }
    }
    if (!(is >> tag) || tag != "loglik_history") throw ParseError("bad history in " + path);
    std::getline(is, line);
    {
        std::istringstream ss(line);
        while (ss >> value) {
            double v = 0.0;
            if (!parse_double(value, v)) throw ParseError("bad history entry in " + path);
            model.loglik_history.push_back(v);
        }
    }
    model.normalizer = Normalizer::read(is);
    return model;
}

} // namespace hullforge
