#include "pairclone/data.hpp"

#include <numeric>
#include <set>

namespace pairclone {

ReadCountTensor::ReadCountTensor(std::size_t num_samples, std::size_t num_pairs)
: num_samples_ {num_samples}
, num_pairs_ {num_pairs}
, counts_(num_samples * num_pairs * kNumCategories, 0)
{
    sample_ids.resize(num_samples);
    pair_ids.resize(num_pairs);
    for (std::size_t t = 0; t < num_samples; ++t) sample_ids[t] = "s" + std::to_string(t + 1);
    for (std::size_t k = 0; k < num_pairs; ++k) pair_ids[k] = "p" + std::to_string(k + 1);
}

std::int64_t ReadCountTensor::total(std::size_t t, std::size_t k) const noexcept
{
    const auto* row = counts_.data() + offset(t, k);
    return std::accumulate(row, row + kNumCategories, std::int64_t {0});
}

std::int64_t ReadCountTensor::grand_total() const noexcept
{
    return std::accumulate(counts_.begin(), counts_.end(), std::int64_t {0});
}

void ReadCountTensor::validate() const
{
    if (num_samples_ < 1 || num_pairs_ < 1) throw Error {"count tensor needs at least one sample and one pair"};
    if (sample_ids.size() != num_samples_ || pair_ids.size() != num_pairs_) {
        throw Error {"label count does not match tensor dimensions"};
    }
    for (auto c : counts_) {
        if (c < 0) throw Error {"negative read count"};
    }
    if (std::set<std::string>(sample_ids.begin(), sample_ids.end()).size() != num_samples_) {
        throw Error {"duplicate sample id"};
    }
    if (std::set<std::string>(pair_ids.begin(), pair_ids.end()).size() != num_pairs_) {
        throw Error {"duplicate pair id"};
    }
}

MissingnessRates::MissingnessRates(std::size_t num_samples, std::size_t num_pairs)
: num_samples_ {num_samples}
, num_pairs_ {num_pairs}
, rates_(num_samples * num_pairs, std::array<double, 3> {1.0, 0.0, 0.0})
{}

MissingnessRates MissingnessRates::empirical(const ReadCountTensor& data)
{
    MissingnessRates v {data.num_samples(), data.num_pairs()};
    for (std::size_t t = 0; t < data.num_samples(); ++t) {
        for (std::size_t k = 0; k < data.num_pairs(); ++k) {
            const auto total = data.total(t, k);
            if (total == 0) {
                v(t, k) = {1.0 / 3, 1.0 / 3, 1.0 / 3};
                continue;
            }
            std::array<double, 3> groups {};
            for (int g = 0; g < kNumCategories; ++g) groups[missingness_case_of(g)] += static_cast<double>(data.n(t, k, g));
            for (auto& x : groups) x /= static_cast<double>(total);
            v(t, k) = groups;
        }
    }
    return v;
}

MissingnessRates MissingnessRates::constant(std::size_t num_samples, std::size_t num_pairs, std::array<double, 3> rates)
{
    MissingnessRates v {num_samples, num_pairs};
    for (auto& r : v.rates_) r = rates;
    return v;
}

WeightedCounts WeightedCounts::scaled(const ReadCountTensor& data, double fraction)
{
    WeightedCounts out;
    out.num_samples = data.num_samples();
    out.num_pairs = data.num_pairs();
    out.n.resize(data.counts().size());
    for (std::size_t i = 0; i < out.n.size(); ++i) out.n[i] = fraction * static_cast<double>(data.counts()[i]);
    return out;
}

std::vector<double> WeightedCounts::sample_totals() const
{
    std::vector<double> totals(num_samples, 0.0);
    const std::size_t per_sample = num_pairs * kNumCategories;
    for (std::size_t t = 0; t < num_samples; ++t) {
        totals[t] = std::accumulate(n.begin() + t * per_sample, n.begin() + (t + 1) * per_sample, 0.0);
    }
    return totals;
}

double WeightedCounts::total() const
{
    return std::accumulate(n.begin(), n.end(), 0.0);
}

} // namespace pairclone
