#include "pairclone/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pairclone {

namespace {

constexpr std::array<const char*, 10> kCountHeader {"sample_id", "pair_id", "n00", "n01", "n10", "n11", "nm0", "nm1", "n0m", "n1m"};
constexpr std::array<const char*, 4> kSnvHeader {"sample_id", "snv_id", "total", "variant"};

std::vector<std::string> split_tabs(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto tab = line.find('\t', start);
        out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
    return out;
}

std::int64_t parse_count(const std::string& s, std::size_t line)
{
    std::int64_t x = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc {} || ptr != s.data() + s.size()) {
        throw Error {"line " + std::to_string(line) + ": bad count '" + s + "'"};
    }
    if (x < 0) throw Error {"line " + std::to_string(line) + ": negative count"};
    return x;
}

template <std::size_t N>
void check_header(const std::string& line, const std::array<const char*, N>& expected, const char* what)
{
    const auto fields = split_tabs(line);
    bool ok = fields.size() == N;
    for (std::size_t i = 0; ok && i < N; ++i) ok = fields[i] == expected[i];
    if (!ok) {
        std::string want;
        for (std::size_t i = 0; i < N; ++i) want += (i ? "\t" : "") + std::string {expected[i]};
        throw Error {std::string {what} + ": expected header '" + want + "'"};
    }
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in {path};
    if (!in) throw Error {"cannot open " + path.string()};
    return in;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out {path};
    if (!out) throw Error {"cannot write " + path.string()};
    return out;
}

} // namespace

ReadCountTensor parse_counts(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw Error {"counts: empty input"};
    check_header(line, kCountHeader, "counts");

    std::vector<std::string> samples, pairs;
    std::map<std::string, std::size_t> sample_index, pair_index;
    std::map<std::pair<std::size_t, std::size_t>, std::array<std::int64_t, kNumCategories>> cells;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_tabs(line);
        if (f.size() != kCountHeader.size()) {
            throw Error {"line " + std::to_string(lineno) + ": expected " + std::to_string(kCountHeader.size()) + " fields"};
        }
        auto [si, s_new] = sample_index.try_emplace(f[0], samples.size());
        if (s_new) samples.push_back(f[0]);
        auto [pi, p_new] = pair_index.try_emplace(f[1], pairs.size());
        if (p_new) pairs.push_back(f[1]);
        std::array<std::int64_t, kNumCategories> n {};
        for (int g = 0; g < kNumCategories; ++g) n[g] = parse_count(f[2 + g], lineno);
        if (!cells.emplace(std::pair {si->second, pi->second}, n).second) {
            throw Error {"line " + std::to_string(lineno) + ": duplicate cell (" + f[0] + ", " + f[1] + ")"};
        }
    }
    if (samples.empty()) throw Error {"counts: no data rows"};
    if (cells.size() != samples.size() * pairs.size()) {
        throw Error {"counts: inconsistent pair sets across samples (" + std::to_string(cells.size()) + " cells for " +
                     std::to_string(samples.size()) + " samples x " + std::to_string(pairs.size()) + " pairs)"};
    }
    ReadCountTensor data {samples.size(), pairs.size()};
    data.sample_ids = samples;
    data.pair_ids = pairs;
    for (const auto& [key, n] : cells) {
        for (int g = 0; g < kNumCategories; ++g) data.n(key.first, key.second, g) = n[g];
    }
    data.validate();
    return data;
}

ReadCountTensor parse_counts(const std::filesystem::path& path)
{
    auto in = open_in(path);
    return parse_counts(in);
}

void write_counts(std::ostream& out, const ReadCountTensor& data)
{
    for (std::size_t i = 0; i < kCountHeader.size(); ++i) out << (i ? "\t" : "") << kCountHeader[i];
    out << '\n';
    for (std::size_t t = 0; t < data.num_samples(); ++t) {
        for (std::size_t k = 0; k < data.num_pairs(); ++k) {
            out << data.sample_ids[t] << '\t' << data.pair_ids[k];
            for (int g = 0; g < kNumCategories; ++g) out << '\t' << data.n(t, k, g);
            out << '\n';
        }
    }
}

void write_counts(const std::filesystem::path& path, const ReadCountTensor& data)
{
    auto out = open_out(path);
    write_counts(out, data);
}

SnvCounts parse_snvs(std::istream& in, const std::vector<std::string>& sample_ids)
{
    std::string line;
    if (!std::getline(in, line)) throw Error {"snv: empty input"};
    check_header(line, kSnvHeader, "snv");
    std::vector<std::string> samples = sample_ids, snvs;
    std::map<std::string, std::size_t> sample_index, snv_index;
    for (std::size_t i = 0; i < samples.size(); ++i) sample_index[samples[i]] = i;
    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::int64_t, std::int64_t>> cells;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_tabs(line);
        if (f.size() != kSnvHeader.size()) throw Error {"snv line " + std::to_string(lineno) + ": expected 4 fields"};
        auto it = sample_index.find(f[0]);
        if (it == sample_index.end()) {
            if (!sample_ids.empty()) throw Error {"snv line " + std::to_string(lineno) + ": unknown sample '" + f[0] + "'"};
            it = sample_index.emplace(f[0], samples.size()).first;
            samples.push_back(f[0]);
        }
        auto [si, s_new] = snv_index.try_emplace(f[1], snvs.size());
        if (s_new) snvs.push_back(f[1]);
        const auto total = parse_count(f[2], lineno);
        const auto variant = parse_count(f[3], lineno);
        if (variant > total) throw Error {"snv line " + std::to_string(lineno) + ": variant count exceeds total"};
        if (!cells.emplace(std::pair {it->second, si->second}, std::pair {total, variant}).second) {
            throw Error {"snv line " + std::to_string(lineno) + ": duplicate cell (" + f[0] + ", " + f[1] + ")"};
        }
    }
    if (cells.size() != samples.size() * snvs.size()) throw Error {"snv: inconsistent SNV sets across samples"};
    SnvCounts out;
    out.num_samples = samples.size();
    out.num_snvs = snvs.size();
    out.snv_ids = snvs;
    out.total.assign(out.num_samples * out.num_snvs, 0);
    out.variant.assign(out.num_samples * out.num_snvs, 0);
    for (const auto& [key, tv] : cells) {
        out.total[key.first * out.num_snvs + key.second] = tv.first;
        out.variant[key.first * out.num_snvs + key.second] = tv.second;
    }
    return out;
}

SnvCounts parse_snvs(const std::filesystem::path& path, const std::vector<std::string>& sample_ids)
{
    auto in = open_in(path);
    return parse_snvs(in, sample_ids);
}

void write_snvs(std::ostream& out, const SnvCounts& snvs, const std::vector<std::string>& sample_ids)
{
    out << "sample_id\tsnv_id\ttotal\tvariant\n";
    for (std::size_t t = 0; t < snvs.num_samples; ++t) {
        for (std::size_t s = 0; s < snvs.num_snvs; ++s) {
            out << sample_ids[t] << '\t' << snvs.snv_ids[s] << '\t' << snvs.total_at(t, s) << '\t' << snvs.variant_at(t, s) << '\n';
        }
    }
}

void write_snvs(const std::filesystem::path& path, const SnvCounts& snvs, const std::vector<std::string>& sample_ids)
{
    auto out = open_out(path);
    write_snvs(out, snvs, sample_ids);
}

nlohmann::json truth_json(const SimulatedData& sim)
{
    const auto& spec = sim.spec;
    std::vector<std::vector<int>> z(spec.num_pairs);
    for (std::size_t k = 0; k < spec.num_pairs; ++k) {
        for (int c = 0; c < spec.num_subclones; ++c) z[k].push_back(spec.z[k * spec.num_subclones + c] + 1);
    }
    const std::size_t stride = static_cast<std::size_t>(spec.num_subclones) + 1;
    std::vector<std::vector<double>> w(spec.num_samples);
    for (std::size_t t = 0; t < spec.num_samples; ++t) w[t].assign(sim.w.begin() + t * stride, sim.w.begin() + (t + 1) * stride);
    std::vector<std::array<double, 3>> v = spec.v;
    nlohmann::json j {
        {"scenario", spec.name},
        {"seed", sim.seed},
        {"num_samples", spec.num_samples},
        {"num_pairs", spec.num_pairs},
        {"num_subclones", spec.num_subclones},
        {"z", z},
        {"w", w},
        {"rho", sim.rho},
        {"v", v},
        {"normal_first_column", spec.normal_first_column},
        {"version", PAIRCLONE_VERSION},
    };
    if (spec.unphased_from) j["unphased_from"] = *spec.unphased_from + 1;
    return j;
}

nlohmann::json selection_json(const SelectionResult& r)
{
    nlohmann::json probs = nlohmann::json::object();
    nlohmann::json visits = nlohmann::json::object();
    nlohmann::json laplace = nlohmann::json::object();
    nlohmann::json swaps = nlohmann::json::object();
    for (std::size_t i = 0; i < r.candidates.size(); ++i) {
        const auto key = std::to_string(r.candidates[i]);
        probs[key] = r.probabilities[i];
        visits[key] = r.visits[i];
        laplace[key] = r.laplace[i];
        std::vector<double> rate;
        const auto& s = r.traces[i].swaps;
        for (std::size_t p = 0; p < s.proposed.size(); ++p) {
            rate.push_back(s.proposed[p] ? static_cast<double>(s.accepted[p]) / static_cast<double>(s.proposed[p]) : 0.0);
        }
        swaps[key] = rate;
    }
    return {
        {"probabilities", probs},
        {"mode", r.mode},
        {"b", r.b},
        {"test_mass", r.test_mass},
        {"visits", visits},
        {"laplace_cross_check", laplace},
        {"indicator_acceptance", r.indicator_moves ? static_cast<double>(r.indicator_accepted) / static_cast<double>(r.indicator_moves) : 0.0},
        {"swap_acceptance", swaps},
        {"version", PAIRCLONE_VERSION},
    };
}

nlohmann::json summary_json(const PointEstimate& est, const ResidualSummary& res, const SplitGenotypes* split)
{
    const int C = est.z.num_subclones;
    const std::size_t stride = static_cast<std::size_t>(C) + 1;
    std::vector<std::vector<double>> w;
    for (std::size_t t = 0; t * stride < est.w.size(); ++t) w.emplace_back(est.w.begin() + t * stride, est.w.begin() + (t + 1) * stride);
    const std::size_t K = split ? split->num_pairs : est.z.num_pairs;
    std::vector<std::vector<int>> z(K);
    for (std::size_t k = 0; k < K; ++k) {
        for (int c = 0; c < C; ++c) z[k].push_back(est.z.at(k, c) + 1);
    }
    nlohmann::json j {
        {"C", C},
        {"z", z},
        {"w", w},
        {"rho", est.rho},
        {"medoid_index", est.index},
        {"medoid_iteration", est.iteration},
        {"residuals", {{"count", res.count}, {"mean", res.mean}, {"sd", res.sd}, {"max_abs", res.max_abs},
                       {"band", res.band}, {"fraction_within_band", res.fraction_within}}},
        {"version", PAIRCLONE_VERSION},
    };
    if (!est.wstar.empty()) j["wstar"] = est.wstar;
    if (split) {
        std::vector<std::vector<double>> zs(split->num_snvs);
        for (std::size_t s = 0; s < split->num_snvs; ++s) {
            for (int c = 0; c < C; ++c) zs[s].push_back(split->snv_dosage[s * C + c]);
        }
        j["z_snv"] = zs;
    }
    return j;
}

void write_residuals(const std::filesystem::path& path, const std::vector<Residual>& r, const ReadCountTensor& data)
{
    auto out = open_out(path);
    out << "sample_id\tpair_id\tcategory\tresidual\n";
    for (const auto& x : r) {
        out << data.sample_ids[x.t] << '\t' << data.pair_ids[x.k] << '\t' << HapCategory {x.g + 1}.label() << '\t' << x.value << '\n';
    }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j)
{
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

} // namespace pairclone
