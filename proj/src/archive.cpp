#include "pairclone/archive.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pairclone/data.hpp"

namespace pairclone {

namespace {

void append_double(std::string& out, double x)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, ptr);
}

double read_double(std::string_view s)
{
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc {} || ptr != s.data() + s.size()) throw Error {"archive: bad number '" + std::string {s} + "'"};
    return x;
}

std::int64_t read_int(std::string_view s)
{
    std::int64_t x = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc {} || ptr != s.data() + s.size()) throw Error {"archive: bad integer '" + std::string {s} + "'"};
    return x;
}

std::vector<std::string_view> split_tabs(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto tab = line.find('\t', start);
        out.push_back(line.substr(start, tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return out;
}

nlohmann::json manifest_json(const ArchiveManifest& m)
{
    return {
        {"version", m.version},
        {"seed", m.seed},
        {"num_subclones", m.num_subclones},
        {"num_samples", m.num_samples},
        {"num_pairs", m.num_pairs},
        {"purity", m.purity},
        {"hyperparameters", m.hyperparameters},
        {"ladder", m.hyperparameters.ladder},
        {"config_hash", m.config_hash},
        {"initial_row", true},
    };
}

std::string header(const ArchiveManifest& m)
{
    std::string h = "iter";
    const int C = m.num_subclones;
    for (std::size_t k = 0; k < m.num_pairs; ++k) {
        for (int c = 0; c < C; ++c) h += "\tz_" + std::to_string(k + 1) + "_" + std::to_string(c + 1);
    }
    for (std::size_t t = 0; t < m.num_samples; ++t) {
        for (int c = 0; c <= C; ++c) h += "\tw_" + std::to_string(t + 1) + "_" + std::to_string(c);
    }
    if (m.purity) {
        for (std::size_t t = 0; t < m.num_samples; ++t) h += "\twstar_" + std::to_string(t + 1);
    }
    for (int g = 0; g < kNumCategories; ++g) h += "\trho_" + std::to_string(g + 1);
    for (int c = 0; c < C; ++c) {
        for (int q = 0; q < kNumCodes; ++q) h += "\tpi_" + std::to_string(c + 1) + "_" + std::to_string(q + 1);
    }
    return h;
}

std::string row(const ArchiveSample& s)
{
    std::string out = std::to_string(s.iteration);
    for (auto q : s.z) {
        out += '\t';
        out += std::to_string(q + 1);
    }
    for (double x : s.w) {
        out += '\t';
        append_double(out, x);
    }
    for (double x : s.wstar) {
        out += '\t';
        append_double(out, x);
    }
    for (double x : s.rho) {
        out += '\t';
        append_double(out, x);
    }
    for (double x : s.pi) {
        out += '\t';
        append_double(out, x);
    }
    return out;
}

ArchiveSample parse_row(std::string_view line, const ArchiveManifest& m)
{
    const auto fields = split_tabs(line);
    const std::size_t C = static_cast<std::size_t>(m.num_subclones);
    const std::size_t nz = m.num_pairs * C;
    const std::size_t nw = m.num_samples * (C + 1);
    const std::size_t ns = m.purity ? m.num_samples : 0;
    const std::size_t expected = 1 + nz + nw + ns + kNumCategories + C * kNumCodes;
    if (fields.size() != expected) throw Error {"archive: row has " + std::to_string(fields.size()) + " fields, expected " + std::to_string(expected)};
    ArchiveSample s;
    std::size_t i = 0;
    s.iteration = read_int(fields[i++]);
    s.z.resize(nz);
    for (auto& q : s.z) {
        const auto code = read_int(fields[i++]);
        if (code < 1 || code > kNumCodes) throw Error {"archive: genotype code out of range"};
        q = static_cast<std::uint8_t>(code - 1);
    }
    s.w.resize(nw);
    for (auto& x : s.w) x = read_double(fields[i++]);
    s.wstar.resize(ns);
    for (auto& x : s.wstar) x = read_double(fields[i++]);
    for (auto& x : s.rho) x = read_double(fields[i++]);
    s.pi.resize(C * kNumCodes);
    for (auto& x : s.pi) x = read_double(fields[i++]);
    return s;
}

} // namespace

bool ArchiveManifest::operator==(const ArchiveManifest& other) const
{
    return manifest_json(*this) == manifest_json(other);
}

ArchiveSample snapshot(const ModelState& state, std::int64_t iteration)
{
    ArchiveSample s;
    s.iteration = iteration;
    s.z = state.z;
    s.w = state.w;
    if (state.purity) s.wstar = state.wstar;
    s.rho = state.rho;
    s.pi.resize(state.log_pi.size());
    for (std::size_t i = 0; i < s.pi.size(); ++i) s.pi[i] = std::exp(state.log_pi[i]);
    return s;
}

ModelState restore(const ArchiveSample& sample, const ArchiveManifest& manifest)
{
    auto state = ModelState::zeros(manifest.num_samples, manifest.num_pairs, manifest.num_subclones, manifest.purity);
    state.z = sample.z;
    for (std::size_t i = 0; i < sample.pi.size(); ++i) state.log_pi[i] = std::log(sample.pi[i]);
    const std::size_t stride = state.weight_stride();
    for (std::size_t t = 0; t < manifest.num_samples; ++t) {
        const std::span<const double> row {sample.w.data() + t * stride, stride};
        state.set_weights(t, row, manifest.purity ? sample.wstar[t] : 0.0);
    }
    state.set_rho(sample.rho);
    return state;
}

std::string fnv1a_hex(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_hash(const Hyperparameters& hp, std::uint64_t seed, int num_subclones, std::size_t num_samples,
                        std::size_t num_pairs, bool purity)
{
    const nlohmann::json j {
        {"hyperparameters", hp}, {"seed", seed}, {"num_subclones", num_subclones},
        {"num_samples", num_samples}, {"num_pairs", num_pairs}, {"purity", purity},
    };
    return fnv1a_hex(j.dump());
}

void write_archive(const PosteriorArchive& archive, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    {
        std::ofstream out {dir / "manifest.json"};
        if (!out) throw Error {"cannot write " + (dir / "manifest.json").string()};
        out << manifest_json(archive.manifest).dump(2) << '\n';
    }
    std::ofstream out {dir / "samples.tsv"};
    if (!out) throw Error {"cannot write " + (dir / "samples.tsv").string()};
    out << header(archive.manifest) << '\n';
    out << row(archive.initial) << '\n';
    for (const auto& s : archive.samples) out << row(s) << '\n';
}

PosteriorArchive read_archive(const std::filesystem::path& dir)
{
    const auto manifest_path = dir / "manifest.json";
    if (!std::filesystem::exists(manifest_path)) throw Error {"missing archive: " + dir.string()};
    PosteriorArchive archive;
    {
        std::ifstream in {manifest_path};
        nlohmann::json j;
        try {
            in >> j;
            auto& m = archive.manifest;
            j.at("version").get_to(m.version);
            j.at("seed").get_to(m.seed);
            j.at("num_subclones").get_to(m.num_subclones);
            j.at("num_samples").get_to(m.num_samples);
            j.at("num_pairs").get_to(m.num_pairs);
            j.at("purity").get_to(m.purity);
            j.at("hyperparameters").get_to(m.hyperparameters);
            j.at("config_hash").get_to(m.config_hash);
        } catch (const nlohmann::json::exception& e) {
            throw Error {std::string {"archive: bad manifest: "} + e.what()};
        }
    }
    std::ifstream in {dir / "samples.tsv"};
    if (!in) throw Error {"missing archive: no samples.tsv in " + dir.string()};
    std::string line;
    if (!std::getline(in, line) || line != header(archive.manifest)) throw Error {"archive: unexpected samples.tsv header"};
    if (!std::getline(in, line)) throw Error {"archive: missing initial state row"};
    archive.initial = parse_row(line, archive.manifest);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        archive.samples.push_back(parse_row(line, archive.manifest));
    }
    return archive;
}

} // namespace pairclone
