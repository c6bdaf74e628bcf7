#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "nullboot/data_model.hpp"

namespace nullboot {

// Which transition matrix governs the move into a given day. Days are 1-based; day t is a
// prescription day iff (t - 1) is a multiple of the prescription period. The second
// prescription day (day 1 + period) uses `prescription2`, the third `prescription3`, all later
// ones `prescription_later`; every other day uses `normal`.
enum class TransitionRegime { prescription2, prescription3, prescription_later, normal };

TransitionRegime regime_for_day(std::size_t day, int prescription_period);

struct MarkovDosageParams {
    int h = 0;
    std::size_t T = 0;
    int prescription_period = 7;
    std::vector<double> initial;
    Eigen::MatrixXd p2, p3, plater, pnormal;  // h x h, row-stochastic
    std::vector<std::vector<std::uint8_t>> missingness;  // one length-T pattern per observed series, 1 = missing

    const Eigen::MatrixXd& matrix(TransitionRegime r) const;
    void validate() const;
};

// Empirical transition frequencies over pairs of observed consecutive days, routed by the
// regime of the target day. Rows without observed transitions become identity rows (with a
// warning). The initial distribution is the empirical day-1 distribution.
MarkovDosageParams estimate_markov(const CategoricalSeriesDataset& data);

// Independent chains: initial draw, day-appropriate transitions, then an independently drawn
// missingness pattern blanks days. T must equal params.T.
CategoricalSeriesDataset sample_markov(const MarkovDosageParams& params, std::size_t n, std::size_t T,
                                       std::uint64_t seed);

}  // namespace nullboot
