#include "pairclone/hyperparameters.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pairclone/data.hpp"

namespace pairclone {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value)
{
    double x = 0.0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, x);
    if (ec != std::errc {} || ptr != end) throw Error {"config: bad number for '" + key + "': " + value};
    return x;
}

int parse_int(const std::string& key, const std::string& value)
{
    int x = 0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, x);
    if (ec != std::errc {} || ptr != end) throw Error {"config: bad integer for '" + key + "': " + value};
    return x;
}

} // namespace

void Hyperparameters::validate() const
{
    auto positive = [](double x, const char* name) {
        if (!(x > 0.0)) throw Error {std::string {"hyperparameter "} + name + " must be positive"};
    };
    positive(alpha, "alpha");
    positive(gamma, "gamma");
    positive(d, "d");
    positive(d0, "d0");
    positive(d1, "d1");
    positive(d1_star, "d1_star");
    positive(d2_star, "d2_star");
    positive(theta_step, "theta_step");
    positive(rho_step, "rho_step");
    positive(wstar_step, "wstar_step");
    if (!(r > 0.0 && r < 1.0)) throw Error {"hyperparameter r must lie in (0, 1)"};
    if (b > 0.0 && b >= 1.0) throw Error {"training fraction b must lie in (0, 1)"};
    if (c_min < 1 || c_min > c_max) throw Error {"need 1 <= cmin <= cmax"};
    if (ladder.empty()) throw Error {"temperature ladder is empty"};
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!(ladder[i] >= 1.0)) throw Error {"temperatures must be >= 1"};
        if (i > 0 && ladder[i] > ladder[i - 1]) throw Error {"temperature ladder must be non-increasing"};
    }
    if (ladder.back() != 1.0) throw Error {"temperature ladder must end at 1"};
    if (!(u0 > 0.0 && u0 <= 1.0)) throw Error {"u0 must lie in (0, 1]"};
    if (iterations < 0 || burn_in < 0 || thin < 1) throw Error {"bad iteration schedule"};
    if (iterations > 0 && burn_in >= iterations) throw Error {"burn-in must be shorter than the run"};
    if (selection_sweeps < 1) throw Error {"selection_sweeps must be >= 1"};
}

void Hyperparameters::set(const std::string& key, const std::string& value)
{
    if (key == "alpha") alpha = parse_double(key, value);
    else if (key == "gamma") gamma = parse_double(key, value);
    else if (key == "d") d = parse_double(key, value);
    else if (key == "d0") d0 = parse_double(key, value);
    else if (key == "d1") d1 = parse_double(key, value);
    else if (key == "r") r = parse_double(key, value);
    else if (key == "d1_star") d1_star = parse_double(key, value);
    else if (key == "d2_star") d2_star = parse_double(key, value);
    else if (key == "cmin" || key == "c_min") c_min = parse_int(key, value);
    else if (key == "cmax" || key == "c_max") c_max = parse_int(key, value);
    else if (key == "b") b = parse_double(key, value);
    else if (key == "theta_step") theta_step = parse_double(key, value);
    else if (key == "rho_step") rho_step = parse_double(key, value);
    else if (key == "wstar_step") wstar_step = parse_double(key, value);
    else if (key == "u0") u0 = parse_double(key, value);
    else if (key == "iterations" || key == "iters") iterations = parse_int(key, value);
    else if (key == "burnin" || key == "burn_in") burn_in = parse_int(key, value);
    else if (key == "thin") thin = parse_int(key, value);
    else if (key == "selection_sweeps") selection_sweeps = parse_int(key, value);
    else if (key == "ladder") {
        ladder.clear();
        std::stringstream ss {value};
        std::string item;
        while (std::getline(ss, item, ',')) ladder.push_back(parse_double(key, trim(item)));
    } else {
        throw Error {"config: unknown key '" + key + "'"};
    }
}

Hyperparameters load_hyperparameters(const std::filesystem::path& path, Hyperparameters hp)
{
    std::ifstream in {path};
    if (!in) throw Error {"cannot open config file " + path.string()};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error {"config line " + std::to_string(lineno) + ": expected key = value"};
        hp.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return hp;
}

void to_json(nlohmann::json& j, const Hyperparameters& hp)
{
    j = nlohmann::json {
        {"alpha", hp.alpha}, {"gamma", hp.gamma}, {"d", hp.d}, {"d0", hp.d0}, {"d1", hp.d1}, {"r", hp.r},
        {"d1_star", hp.d1_star}, {"d2_star", hp.d2_star}, {"c_min", hp.c_min}, {"c_max", hp.c_max}, {"b", hp.b},
        {"theta_step", hp.theta_step}, {"rho_step", hp.rho_step}, {"wstar_step", hp.wstar_step},
        {"ladder", hp.ladder}, {"u0", hp.u0}, {"iterations", hp.iterations}, {"burn_in", hp.burn_in},
        {"thin", hp.thin}, {"selection_sweeps", hp.selection_sweeps},
    };
}

void from_json(const nlohmann::json& j, Hyperparameters& hp)
{
    j.at("alpha").get_to(hp.alpha);
    j.at("gamma").get_to(hp.gamma);
    j.at("d").get_to(hp.d);
    j.at("d0").get_to(hp.d0);
    j.at("d1").get_to(hp.d1);
    j.at("r").get_to(hp.r);
    j.at("d1_star").get_to(hp.d1_star);
    j.at("d2_star").get_to(hp.d2_star);
    j.at("c_min").get_to(hp.c_min);
    j.at("c_max").get_to(hp.c_max);
    j.at("b").get_to(hp.b);
    j.at("theta_step").get_to(hp.theta_step);
    j.at("rho_step").get_to(hp.rho_step);
    j.at("wstar_step").get_to(hp.wstar_step);
    j.at("ladder").get_to(hp.ladder);
    j.at("u0").get_to(hp.u0);
    j.at("iterations").get_to(hp.iterations);
    j.at("burn_in").get_to(hp.burn_in);
    j.at("thin").get_to(hp.thin);
    j.at("selection_sweeps").get_to(hp.selection_sweeps);
}

} // namespace pairclone
