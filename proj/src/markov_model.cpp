#include "nullboot/markov_model.hpp"

#include <array>
#include <cmath>
#include <string>

#include "nullboot/errors.hpp"
#include "nullboot/log.hpp"
#include "nullboot/rng.hpp"

namespace nullboot {

TransitionRegime regime_for_day(std::size_t day, int prescription_period) {
    if (day < 2) throw ValidationError("day 1 has no incoming transition");
    if (prescription_period < 1) throw ValidationError("prescription_period >= 1 required");
    const auto period = static_cast<std::size_t>(prescription_period);
    if ((day - 1) % period != 0) return TransitionRegime::normal;
    const std::size_t event = (day - 1) / period + 1;
    if (event == 2) return TransitionRegime::prescription2;
    if (event == 3) return TransitionRegime::prescription3;
    return TransitionRegime::prescription_later;
}

const Eigen::MatrixXd& MarkovDosageParams::matrix(TransitionRegime r) const {
    switch (r) {
        case TransitionRegime::prescription2: return p2;
        case TransitionRegime::prescription3: return p3;
        case TransitionRegime::prescription_later: return plater;
        case TransitionRegime::normal: return pnormal;
    }
    return pnormal;
}

void MarkovDosageParams::validate() const {
    if (h < 1 || T < 2 || prescription_period < 1) throw ValidationError("Markov parameters: bad dimensions");
    if (initial.size() != static_cast<std::size_t>(h)) throw ValidationError("Markov parameters: initial distribution size");
    double s = 0;
    for (double v : initial) {
        if (!(v >= 0)) throw ValidationError("Markov parameters: negative initial probability");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-12) throw ValidationError("Markov parameters: initial distribution must sum to 1");
    for (const auto* m : {&p2, &p3, &plater, &pnormal}) {
        if (m->rows() != h || m->cols() != h) throw ValidationError("Markov parameters: transition matrix must be h x h");
        if ((m->array() < 0).any()) throw ValidationError("Markov parameters: negative transition probability");
        for (Eigen::Index r = 0; r < h; ++r)
            if (std::abs(m->row(r).sum() - 1.0) > 1e-12) throw ValidationError("Markov parameters: rows must sum to 1");
    }
    if (missingness.empty()) throw ValidationError("Markov parameters: empty missingness bag");
    for (const auto& pat : missingness)
        if (pat.size() != T) throw ValidationError("Markov parameters: missingness pattern length mismatch");
}

MarkovDosageParams estimate_markov(const CategoricalSeriesDataset& data) {
    const int h = data.h();
    const std::size_t T = data.T();
    MarkovDosageParams params;
    params.h = h;
    params.T = T;
    params.prescription_period = data.prescription_period();

    std::array<Eigen::MatrixXd, 4> counts;
    for (auto& c : counts) c = Eigen::MatrixXd::Zero(h, h);
    std::vector<double> initial(static_cast<std::size_t>(h), 0.0);
    double initial_total = 0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        const auto s = data.series(i);
        if (s[0] != kMissing) {
            initial[static_cast<std::size_t>(s[0])] += 1.0;
            initial_total += 1.0;
        }
        for (std::size_t t = 1; t < T; ++t) {
            if (s[t - 1] == kMissing || s[t] == kMissing) continue;
            const auto r = static_cast<std::size_t>(regime_for_day(t + 1, params.prescription_period));
            counts[r](s[t - 1], s[t]) += 1.0;
        }
        std::vector<std::uint8_t> pattern(T);
        for (std::size_t t = 0; t < T; ++t) pattern[t] = s[t] == kMissing ? 1 : 0;
        params.missingness.push_back(std::move(pattern));
    }
    if (initial_total == 0) throw ValidationError("estimate_markov: no series is observed on day 1");
    for (auto& v : initial) v /= initial_total;
    params.initial = std::move(initial);

    static constexpr const char* names[] = {"prescription-day-2", "prescription-day-3", "later-prescription-day", "normal-day"};
    std::array<Eigen::MatrixXd*, 4> targets{&params.p2, &params.p3, &params.plater, &params.pnormal};
    for (std::size_t r = 0; r < 4; ++r) {
        Eigen::MatrixXd m = counts[r];
        for (Eigen::Index a = 0; a < h; ++a) {
            const double total = m.row(a).sum();
            if (total > 0) {
                m.row(a) /= total;
            } else {
                m.row(a).setZero();
                m(a, a) = 1.0;
                warn(std::string("estimate_markov: no observed ") + names[r] + " transitions from category " +
                     std::to_string(a + 1) + "; identity row used");
            }
        }
        *targets[r] = std::move(m);
    }
    return params;
}

CategoricalSeriesDataset sample_markov(const MarkovDosageParams& params, std::size_t n, std::size_t T, std::uint64_t seed) {
    params.validate();
    if (T != params.T) throw ValidationError("sample_markov: T must match the estimated series length");
    Rng rng(seed);
    std::discrete_distribution<int> init(params.initial.begin(), params.initial.end());
    std::array<std::vector<std::discrete_distribution<int>>, 4> rows;
    for (std::size_t r = 0; r < 4; ++r) {
        const auto& m = params.matrix(static_cast<TransitionRegime>(r));
        for (Eigen::Index a = 0; a < params.h; ++a) {
            std::vector<double> w(static_cast<std::size_t>(params.h));
            for (Eigen::Index b = 0; b < params.h; ++b) w[static_cast<std::size_t>(b)] = m(a, b);
            rows[r].emplace_back(w.begin(), w.end());
        }
    }
    std::vector<TransitionRegime> regime(T, TransitionRegime::normal);
    for (std::size_t t = 1; t < T; ++t) regime[t] = regime_for_day(t + 1, params.prescription_period);
    std::uniform_int_distribution<std::size_t> pick(0, params.missingness.size() - 1);

    std::vector<std::vector<int>> series(n, std::vector<int>(T));
    for (auto& s : series) {
        s[0] = init(rng);
        for (std::size_t t = 1; t < T; ++t)
            s[t] = rows[static_cast<std::size_t>(regime[t])][static_cast<std::size_t>(s[t - 1])](rng);
        const auto& pattern = params.missingness[pick(rng)];
        for (std::size_t t = 0; t < T; ++t)
            if (pattern[t]) s[t] = kMissing;
    }
    return CategoricalSeriesDataset(T, params.h, params.prescription_period, std::move(series));
}

}  // namespace nullboot
