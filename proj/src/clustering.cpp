#include "nullboot/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>

#include "nullboot/dissimilarity.hpp"
#include "nullboot/errors.hpp"
#include "nullboot/rng.hpp"

namespace nullboot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Nearest {
    std::vector<double> first;   // distance to nearest medoid
    std::vector<double> second;  // distance to second nearest medoid
    std::vector<std::size_t> slot;  // position in the medoid list of the nearest medoid
};

Nearest nearest_medoids(const DissimilarityMatrix& d, const std::vector<std::size_t>& medoids) {
    const std::size_t n = d.size();
    Nearest nr{std::vector<double>(n, kInf), std::vector<double>(n, kInf), std::vector<std::size_t>(n, 0)};
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t s = 0; s < medoids.size(); ++s) {
            const double dj = d(j, medoids[s]);
            if (dj < nr.first[j] || (dj == nr.first[j] && medoids[s] < medoids[nr.slot[j]])) {
                nr.second[j] = nr.first[j];
                nr.first[j] = dj;
                nr.slot[j] = s;
            } else if (dj < nr.second[j]) {
                nr.second[j] = dj;
            }
        }
    }
    return nr;
}

}  // namespace

double medoid_objective(const DissimilarityMatrix& d, std::span<const std::size_t> medoids) {
    double total = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
        double best = kInf;
        for (std::size_t m : medoids) best = std::min(best, d(j, m));
        total += best;
    }
    return total;
}

Partition pam(const DissimilarityMatrix& d, std::size_t k) {
    const std::size_t n = d.size();
    if (k < 2 || k > n) throw ValidationError("pam: k out of range (2 <= k <= n required)");

    std::vector<std::size_t> medoids;
    std::vector<char> is_medoid(n, 0);
    std::vector<double> nearest(n, kInf);

    // BUILD
    {
        std::size_t best = 0;
        double best_sum = kInf;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += d(i, j);
            if (s < best_sum) {
                best_sum = s;
                best = i;
            }
        }
        medoids.push_back(best);
        is_medoid[best] = 1;
        for (std::size_t j = 0; j < n; ++j) nearest[j] = d(j, best);
    }
    while (medoids.size() < k) {
        std::size_t best = n;
        double best_gain = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (is_medoid[i]) continue;
            double gain = 0.0;
            for (std::size_t j = 0; j < n; ++j) gain += std::max(0.0, nearest[j] - d(j, i));
            if (gain > best_gain) {
                best_gain = gain;
                best = i;
            }
        }
        medoids.push_back(best);
        is_medoid[best] = 1;
        for (std::size_t j = 0; j < n; ++j) nearest[j] = std::min(nearest[j], d(j, best));
    }

    // SWAP
    double objective = medoid_objective(d, medoids);
    for (std::size_t iter = 0; iter < 100 * n + 100; ++iter) {
        const Nearest nr = nearest_medoids(d, medoids);
        double best_delta = 0.0;
        std::size_t best_slot = k, best_h = n;
        for (std::size_t s = 0; s < k; ++s) {
            for (std::size_t h = 0; h < n; ++h) {
                if (is_medoid[h]) continue;
                double delta = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double djh = d(j, h);
                    if (nr.slot[j] == s)
                        delta += std::min(djh, nr.second[j]) - nr.first[j];
                    else if (djh < nr.first[j])
                        delta += djh - nr.first[j];
                }
                if (delta < best_delta) {
                    best_delta = delta;
                    best_slot = s;
                    best_h = h;
                }
            }
        }
        if (best_slot == k || best_delta > -1e-12 * (1.0 + objective)) break;
        is_medoid[medoids[best_slot]] = 0;
        medoids[best_slot] = best_h;
        is_medoid[best_h] = 1;
        objective = medoid_objective(d, medoids);
    }

    std::sort(medoids.begin(), medoids.end());
    std::vector<int> labels(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        double best = kInf;
        for (std::size_t s = 0; s < k; ++s) {
            if (d(j, medoids[s]) < best) {
                best = d(j, medoids[s]);
                labels[j] = static_cast<int>(s);
            }
        }
    }
    for (std::size_t s = 0; s < k; ++s) labels[medoids[s]] = static_cast<int>(s);
    return Partition(std::move(labels), k, std::move(medoids));
}

Dendrogram linkage_cluster(const DissimilarityMatrix& d, Linkage linkage) {
    const std::size_t n = d.size();
    if (n < 2) throw ValidationError("linkage_cluster: n >= 2 required");
    // Slot i holds the cluster whose smallest member is i. For average linkage `w` holds the
    // sum of member-pair dissimilarities; for complete linkage the maximum.
    std::vector<double> w(d.values().begin(), d.values().end());
    std::vector<std::size_t> size(n, 1), id(n);
    std::iota(id.begin(), id.end(), 0);
    std::vector<std::size_t> active(n);
    std::iota(active.begin(), active.end(), 0);

    auto height = [&](std::size_t a, std::size_t b) {
        const double v = w[a * n + b];
        return linkage == Linkage::average ? v / static_cast<double>(size[a] * size[b]) : v;
    };

    Dendrogram tree{n, linkage, {}};
    tree.merges.reserve(n - 1);
    for (std::size_t step = 0; step + 1 < n; ++step) {
        double best = kInf;
        std::size_t ba = 0, bb = 0;
        for (std::size_t x = 0; x < active.size(); ++x) {
            for (std::size_t y = x + 1; y < active.size(); ++y) {
                const double h = height(active[x], active[y]);
                if (h < best) {
                    best = h;
                    ba = x;
                    bb = y;
                }
            }
        }
        const std::size_t a = active[ba], b = active[bb];
        tree.merges.push_back({std::min(id[a], id[b]), std::max(id[a], id[b]), best});
        for (std::size_t c : active) {
            if (c == a || c == b) continue;
            const double v = linkage == Linkage::average ? w[a * n + c] + w[b * n + c] : std::max(w[a * n + c], w[b * n + c]);
            w[a * n + c] = w[c * n + a] = v;
        }
        size[a] += size[b];
        id[a] = n + step;
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(bb));
    }
    return tree;
}

Partition cut_tree(const Dendrogram& tree, std::size_t k) {
    const std::size_t n = tree.n;
    if (k < 1 || k > n) throw ValidationError("cut_tree: k out of range (1 <= k <= n required)");
    if (tree.merges.size() + 1 != n) throw ValidationError("cut_tree: malformed dendrogram");
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<std::size_t> rep(2 * n - 1);
    std::iota(rep.begin(), rep.begin() + static_cast<std::ptrdiff_t>(n), 0);
    for (std::size_t s = 0; s < n - k; ++s) {
        const auto& m = tree.merges[s];
        if (m.a >= n + s || m.b >= n + s) throw ValidationError("cut_tree: merge refers to a cluster not yet formed");
        const std::size_t ra = find(rep[m.a]), rb = find(rep[m.b]);
        parent[std::max(ra, rb)] = std::min(ra, rb);
        rep[n + s] = std::min(ra, rb);
    }
    std::vector<int> labels(n);
    std::vector<int> root_label(n, -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (root_label[r] < 0) root_label[r] = next++;
        labels[i] = root_label[r];
    }
    return Partition(std::move(labels), k);
}

MdsResult classical_mds(const DissimilarityMatrix& d, std::size_t q) {
    const std::size_t n = d.size();
    if (q < 1 || q + 1 > n) throw ValidationError("classical_mds: target dimension out of range (1 <= q <= n-1)");
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd b(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) {
            const double v = d(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            b(i, j) = -0.5 * v * v;
        }
    const Eigen::VectorXd row_mean = b.rowwise().mean();
    const double grand = row_mean.mean();
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) b(i, j) = b(i, j) - row_mean(i) - row_mean(j) + grand;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    if (es.info() != Eigen::Success) throw NumericalError("classical_mds: eigendecomposition failed");
    MdsResult out;
    out.eigenvalues = es.eigenvalues().reverse();
    out.coords.resize(N, static_cast<Eigen::Index>(q));
    for (std::size_t c = 0; c < q; ++c) {
        const Eigen::Index src = N - 1 - static_cast<Eigen::Index>(c);
        Eigen::VectorXd v = es.eigenvectors().col(src);
        const double lambda = es.eigenvalues()(src);
        for (Eigen::Index i = 0; i < N; ++i) {
            if (std::abs(v(i)) > 1e-10) {
                if (v(i) < 0) v = -v;
                break;
            }
        }
        out.coords.col(static_cast<Eigen::Index>(c)) = lambda > 0 ? Eigen::VectorXd(v * std::sqrt(lambda)) : Eigen::VectorXd::Zero(N);
    }
    return out;
}

std::vector<int> GmmFit::map_labels() const {
    std::vector<int> labels(static_cast<std::size_t>(responsibilities.rows()));
    for (Eigen::Index i = 0; i < responsibilities.rows(); ++i) {
        Eigen::Index best = 0;
        responsibilities.row(i).maxCoeff(&best);
        labels[static_cast<std::size_t>(i)] = (with_noise && static_cast<std::size_t>(best) == k) ? kNoise : static_cast<int>(best);
    }
    return labels;
}

std::size_t gmm_parameter_count(std::size_t k, std::size_t q, bool with_noise) {
    return (k - 1) + k * q + k * q * (q + 1) / 2 + (with_noise ? 1 : 0);
}

namespace {

struct Component {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    Eigen::MatrixXd chol_l;  // lower Cholesky factor of cov
    double log_det = 0.0;
};

struct EmRun {
    bool ok = false;
    std::vector<double> trace;
    std::vector<double> weights;
    std::vector<Component> comps;
    Eigen::MatrixXd resp;
    bool floored = false;
    bool converged = false;
};

class EmSolver {
public:
    EmSolver(const Eigen::MatrixXd& y, std::size_t k, const GmmOptions& opt) : y_(y), k_(k), opt_(opt) {
        n_ = static_cast<std::size_t>(y.rows());
        q_ = static_cast<std::size_t>(y.cols());
        const Eigen::RowVectorXd mean = y.colwise().mean();
        const Eigen::MatrixXd centered = y.rowwise() - mean;
        const double mean_var = (centered.array().square().colwise().sum() / static_cast<double>(n_)).mean();
        if (!(mean_var > 0.0)) throw NumericalError("gmm_noise_fit: data have zero variance");
        floor_ = opt.floor_factor * mean_var;
        if (opt.with_noise) {
            double vol = 1.0;
            for (Eigen::Index c = 0; c < y.cols(); ++c) vol *= y.col(c).maxCoeff() - y.col(c).minCoeff();
            if (!(vol > 0.0)) throw NumericalError("gmm_noise_fit: bounding box has zero volume");
            log_noise_ = -std::log(vol);
        }
    }

    double floor() const { return floor_; }
    double log_noise() const { return log_noise_; }
    std::size_t columns() const { return k_ + (opt_.with_noise ? 1 : 0); }

    // Hard labels (kNoise allowed) -> converged EM run.
    EmRun run(const std::vector<int>& labels) const {
        Eigen::MatrixXd z = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(columns()));
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t c = labels[i] == kNoise ? k_ : static_cast<std::size_t>(labels[i]);
            z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = 1.0;
        }
        EmRun run;
        double prev = -kInf;
        for (std::size_t it = 0; it < opt_.max_iter; ++it) {
            if (!m_step(z, run)) return run;
            const double ll = e_step(run, z);
            if (!std::isfinite(ll)) return run;
            run.trace.push_back(ll);
            if (it > 0 && std::abs(ll - prev) < opt_.tol * std::abs(ll)) {
                run.converged = true;
                break;
            }
            prev = ll;
        }
        run.resp = std::move(z);
        run.ok = true;
        return run;
    }

private:
    bool m_step(const Eigen::MatrixXd& z, EmRun& run) const {
        const double n = static_cast<double>(n_);
        run.weights.assign(columns(), 0.0);
        run.comps.assign(k_, Component{});
        run.floored = false;
        for (std::size_t c = 0; c < columns(); ++c) run.weights[c] = z.col(static_cast<Eigen::Index>(c)).sum() / n;
        for (std::size_t c = 0; c < k_; ++c) {
            const auto C = static_cast<Eigen::Index>(c);
            const double nc = z.col(C).sum();
            if (!(nc > 1e-10)) return false;
            Component comp;
            comp.mean = (y_.transpose() * z.col(C)) / nc;
            const Eigen::MatrixXd centered = y_.rowwise() - comp.mean.transpose();
            Eigen::MatrixXd cov = (centered.transpose() * z.col(C).asDiagonal() * centered) / nc;
            cov = 0.5 * (cov + cov.transpose());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
            Eigen::VectorXd ev = es.eigenvalues();
            if (ev.minCoeff() < floor_) {
                run.floored = true;
                ev = ev.cwiseMax(floor_);
                cov = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
                cov = 0.5 * (cov + cov.transpose());
            }
            Eigen::LLT<Eigen::MatrixXd> llt(cov);
            if (llt.info() != Eigen::Success) return false;
            comp.cov = cov;
            comp.chol_l = llt.matrixL();
            comp.log_det = 2.0 * comp.chol_l.diagonal().array().log().sum();
            run.comps[c] = std::move(comp);
        }
        return true;
    }

    // Returns the log-likelihood under the current parameters and refreshes z.
    double e_step(const EmRun& run, Eigen::MatrixXd& z) const {
        const double log2pi = std::log(2.0 * std::numbers::pi);
        const auto cols = static_cast<Eigen::Index>(columns());
        Eigen::MatrixXd logp(static_cast<Eigen::Index>(n_), cols);
        for (std::size_t c = 0; c < k_; ++c) {
            const auto& comp = run.comps[c];
            const Eigen::MatrixXd centered = (y_.rowwise() - comp.mean.transpose()).transpose();
            const Eigen::MatrixXd sol = comp.chol_l.triangularView<Eigen::Lower>().solve(centered);
            const Eigen::VectorXd maha = sol.colwise().squaredNorm().transpose();
            const double lw = run.weights[c] > 0 ? std::log(run.weights[c]) : -kInf;
            logp.col(static_cast<Eigen::Index>(c)) =
                (lw - 0.5 * (static_cast<double>(q_) * log2pi + comp.log_det) - 0.5 * maha.array()).matrix();
        }
        if (opt_.with_noise) {
            const double lw = run.weights[k_] > 0 ? std::log(run.weights[k_]) : -kInf;
            logp.col(cols - 1).setConstant(lw + log_noise_);
        }
        double ll = 0.0;
        for (Eigen::Index i = 0; i < logp.rows(); ++i) {
            const double mx = logp.row(i).maxCoeff();
            if (!std::isfinite(mx)) return -kInf;
            const Eigen::RowVectorXd e = (logp.row(i).array() - mx).exp().matrix();
            const double s = e.sum();
            z.row(i) = e / s;
            ll += mx + std::log(s);
        }
        return ll;
    }

    const Eigen::MatrixXd& y_;
    std::size_t k_, n_ = 0, q_ = 0;
    GmmOptions opt_;
    double floor_ = 0.0;
    double log_noise_ = 0.0;
};

std::vector<int> noise_initialization(const Eigen::MatrixXd& y, double fraction) {
    const auto n = static_cast<std::size_t>(y.rows());
    std::vector<double> nn(n, kInf);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j)
                nn[i] = std::min(nn[i], (y.row(static_cast<Eigen::Index>(i)) - y.row(static_cast<Eigen::Index>(j))).norm());
    const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nn[a] > nn[b]; });
    std::vector<int> labels(n, 0);
    for (std::size_t t = 0; t < std::min(count, n); ++t) labels[order[t]] = kNoise;
    return labels;
}

}  // namespace

GmmFit gmm_noise_fit(const Eigen::MatrixXd& y, std::size_t k, const GmmOptions& options) {
    const auto n = static_cast<std::size_t>(y.rows());
    const auto q = static_cast<std::size_t>(y.cols());
    if (k < 1) throw ValidationError("gmm_noise_fit: k >= 1 required");
    if (q < 1 || n <= q + 1) throw ValidationError("gmm_noise_fit: n > q + 1 required");
    if (options.restarts < 1) throw ValidationError("gmm_noise_fit: restarts >= 1 required");
    if (!y.allFinite()) throw ValidationError("gmm_noise_fit: non-finite coordinates");

    const EmSolver solver(y, k, options);
    const std::vector<int> base = options.with_noise ? noise_initialization(y, options.noise_init_fraction) : std::vector<int>(n, 0);
    std::vector<std::size_t> clustered;
    for (std::size_t i = 0; i < n; ++i)
        if (base[i] != kNoise) clustered.push_back(i);

    EmRun best;
    std::size_t best_restart = 0;
    double best_ll = -kInf;
    const std::size_t restarts = k == 1 ? 1 : options.restarts;
    for (std::size_t r = 0; r < restarts; ++r) {
        std::vector<int> labels = base;
        if (k > 1 && clustered.size() >= k) {
            Eigen::MatrixXd sub(static_cast<Eigen::Index>(clustered.size()), y.cols());
            for (std::size_t t = 0; t < clustered.size(); ++t) sub.row(static_cast<Eigen::Index>(t)) = y.row(static_cast<Eigen::Index>(clustered[t]));
            if (r == 0) {
                const Partition part = pam(euclidean_distance(sub), k);
                for (std::size_t t = 0; t < clustered.size(); ++t) labels[clustered[t]] = part.label(t);
            } else {
                Rng rng(derive_seed(options.seed, r));
                std::vector<std::size_t> pool(clustered.size());
                std::iota(pool.begin(), pool.end(), 0);
                std::vector<std::size_t> centers;
                for (std::size_t c = 0; c < k; ++c) {
                    std::uniform_int_distribution<std::size_t> pick(c, pool.size() - 1);
                    std::swap(pool[c], pool[pick(rng)]);
                    centers.push_back(pool[c]);
                }
                for (std::size_t t = 0; t < clustered.size(); ++t) {
                    double bd = kInf;
                    for (std::size_t c = 0; c < k; ++c) {
                        const double dist = (sub.row(static_cast<Eigen::Index>(t)) - sub.row(static_cast<Eigen::Index>(centers[c]))).squaredNorm();
                        if (dist < bd) {
                            bd = dist;
                            labels[clustered[t]] = static_cast<int>(c);
                        }
                    }
                }
            }
        } else if (k > 1) {
            continue;
        }
        EmRun run = solver.run(labels);
        if (!run.ok || run.trace.empty()) continue;
        const double ll = run.trace.back();
        // Unregularized fits take precedence over fits held up by the eigenvalue floor.
        const bool better = !best.ok || (best.floored && !run.floored) || (best.floored == run.floored && ll > best_ll);
        if (better) {
            best_ll = ll;
            best_restart = r;
            best = std::move(run);
        }
    }
    if (!best.ok) throw NumericalError("gmm_noise_fit: every EM restart degenerated (k=" + std::to_string(k) + ")");

    GmmFit fit;
    fit.k = k;
    fit.q = q;
    fit.with_noise = options.with_noise;
    fit.weights = best.weights;
    for (auto& c : best.comps) {
        fit.means.push_back(c.mean);
        fit.covariances.push_back(c.cov);
    }
    fit.noise_density = options.with_noise ? std::exp(solver.log_noise()) : 0.0;
    fit.loglik = best.trace.back();
    fit.n_params = gmm_parameter_count(k, q, options.with_noise);
    fit.responsibilities = std::move(best.resp);
    fit.loglik_trace = std::move(best.trace);
    fit.regularized = best.floored;
    fit.converged = best.converged;
    fit.restart = best_restart;
    return fit;
}

}  // namespace nullboot
