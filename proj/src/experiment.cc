// Copyright 2026 The peakcirc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "peakcirc/experiment.h"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "peakcirc/errors.h"
#include "peakcirc/hexfloat.h"
#include "peakcirc/oracle.h"
#include "peakcirc/seeding.h"

namespace peakcirc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char *kRowsFile = "rows.tsv";
constexpr const char *kRecordFile = "record.json";
constexpr const char *kManifestFile = "manifest.json";
constexpr const char *kResumeMarker = "RESUME";
constexpr const char *kRowsHeader = "# peakcirc rows v1";

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 failed");
    }
    static const char *hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string read_file(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IntegrityError(path.string(), "file", "cannot open");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

std::string utc_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool is_optimizing(ExperimentKind kind) {
    return kind == ExperimentKind::PeakSweep || kind == ExperimentKind::ScalingFit;
}

// ---- manifest JSON ----

json depth_rule_json(const DepthRule &rule) {
    switch (rule.kind) {
        case DepthRule::Kind::N:
            return "n";
        case DepthRule::Kind::HalfN:
            return "n/2";
        default:
            return rule.value;
    }
}

json peaking_rule_json(const PeakingRule &rule) {
    if (rule.divisor > 0) {
        return "tau_r/" + std::to_string(rule.divisor);
    }
    return rule.values;
}

json optimizer_json(const OptimizerConfig &c) {
    return json{{"learning_rate", c.learning_rate}, {"beta1", c.beta1},
                {"beta2", c.beta2},                 {"eps", c.eps},
                {"max_iters", c.max_iters},         {"restarts", c.restarts},
                {"plateau_tol", c.plateau_tol},     {"plateau_window", c.plateau_window},
                {"init_scale", c.init_scale},       {"peaking_parity", to_string(c.parity)}};
}

json manifest_json(const ExperimentManifest &m) {
    json j{{"kind", to_string(m.kind)},
           {"n", m.n},
           {"tau_r", depth_rule_json(m.tau_r)},
           {"instances", m.instances},
           {"seed", m.seed},
           {"output", m.output},
           {"thresholds", m.thresholds},
           {"extrapolate_n", m.extrapolate_n}};
    if (is_optimizing(m.kind)) {
        j["tau_p"] = peaking_rule_json(m.tau_p);
        j["optimizer"] = optimizer_json(m.optimizer);
    }
    return j;
}

class FieldErrors {
  public:
    void add(const std::string &field, const std::string &why) {
        errors_.push_back(field + ": " + why);
    }
    void raise_if_any() const {
        if (errors_.empty()) {
            return;
        }
        std::string msg = "invalid manifest";
        for (const auto &e : errors_) {
            msg += "\n  " + e;
        }
        throw ValidationError(msg);
    }

  private:
    std::vector<std::string> errors_;
};

template <typename T>
bool read_number(const json &j, const std::string &field, T &out, FieldErrors &errors) {
    try {
        if (!j.is_number()) {
            throw std::invalid_argument("not a number");
        }
        if constexpr (std::is_integral_v<T>) {
            if (!j.is_number_integer()) {
                throw std::invalid_argument("not an integer");
            }
        }
        out = j.get<T>();
        return true;
    } catch (const std::exception &e) {
        errors.add(field, e.what());
        return false;
    }
}

// ---- rows ----

std::string format_row(const ResultRow &r) {
    std::ostringstream line;
    line << r.point << '\t' << r.instance << '\t' << r.seed << '\t' << format_hex(r.delta) << '\t'
         << format_hex(r.max_peak) << '\t' << format_hex(r.pi) << '\t' << r.iterations << '\t'
         << format_hex(r.wall_seconds) << '\t';
    if (r.extra.empty()) {
        line << '-';
    }
    for (std::size_t k = 0; k < r.extra.size(); ++k) {
        line << (k ? "," : "") << format_hex(r.extra[k]);
    }
    std::string body = line.str();
    return body + '\t' + sha256_hex(body).substr(0, 16);
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = text.find(sep, start);
        parts.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            return parts;
        }
        start = pos + 1;
    }
}

// Parses one row line; nullopt plus the failing field name when malformed.
std::optional<ResultRow> parse_row(const std::string &line, std::string &bad_field) {
    auto fields = split(line, '\t');
    if (fields.size() != 10) {
        bad_field = "field count";
        return std::nullopt;
    }
    std::string body = line.substr(0, line.rfind('\t'));
    if (sha256_hex(body).substr(0, 16) != fields[9]) {
        bad_field = "checksum";
        return std::nullopt;
    }
    ResultRow r;
    auto integer = [&](const std::string &text, const char *name, auto &out) {
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            bad_field = name;
            return false;
        }
        return true;
    };
    auto real = [&](const std::string &text, const char *name, double &out) {
        auto v = parse_hex(text);
        if (!v) {
            bad_field = name;
            return false;
        }
        out = *v;
        return true;
    };
    if (!integer(fields[0], "point", r.point) || !integer(fields[1], "instance", r.instance) ||
        !integer(fields[2], "seed", r.seed) || !real(fields[3], "delta", r.delta) ||
        !real(fields[4], "max_peak", r.max_peak) || !real(fields[5], "pi", r.pi) ||
        !integer(fields[6], "iterations", r.iterations) || !real(fields[7], "wall_seconds", r.wall_seconds)) {
        return std::nullopt;
    }
    if (fields[8] != "-") {
        for (const auto &part : split(fields[8], ',')) {
            double v = 0;
            if (!real(part, "extra", v)) {
                return std::nullopt;
            }
            r.extra.push_back(v);
        }
    }
    return r;
}

std::string rows_text(const std::vector<ResultRow> &rows) {
    std::string text = std::string(kRowsHeader) + "\n";
    for (const auto &r : rows) {
        text += format_row(r) + "\n";
    }
    return text;
}

// Strict parse for load(); `tolerate_tail` drops a malformed last line (an interrupted append).
std::vector<ResultRow> parse_rows(const std::string &text, const std::string &file, bool tolerate_tail) {
    auto lines = split(text, '\n');
    bool ends_clean = !lines.empty() && lines.back().empty();
    if (ends_clean) {
        lines.pop_back();
    }
    if (lines.empty() || lines[0] != kRowsHeader) {
        throw IntegrityError(file, "header", "missing or wrong header line");
    }
    std::vector<ResultRow> rows;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        std::string bad;
        bool last = k + 1 == lines.size();
        auto row = parse_row(lines[k], bad);
        if (row && last && !ends_clean && !tolerate_tail) {
            row.reset();
            bad = "line terminator";
        }
        if (!row) {
            if (last && tolerate_tail) {
                break;
            }
            throw IntegrityError(file, "line " + std::to_string(k + 1) + " " + bad, "malformed row");
        }
        if (!seen.insert({row->point, row->instance}).second) {
            throw IntegrityError(file, "line " + std::to_string(k + 1), "duplicate (point, instance)");
        }
        rows.push_back(std::move(*row));
    }
    return rows;
}

void sort_rows(std::vector<ResultRow> &rows) {
    std::sort(rows.begin(), rows.end(), [](const ResultRow &a, const ResultRow &b) {
        return std::tie(a.point, a.instance) < std::tie(b.point, b.instance);
    });
}

// ---- aggregates JSON ----

json hex_array(const std::vector<double> &values) {
    json arr = json::array();
    for (double v : values) {
        arr.push_back(format_hex(v));
    }
    return arr;
}

json aggregates_json(const Aggregates &a) {
    json points = json::array();
    for (const auto &p : a.points) {
        json rarity = json::array();
        for (const auto &r : p.rarity) {
            rarity.push_back({{"threshold", format_hex(r.estimate.threshold)},
                              {"hits", r.estimate.hits},
                              {"total", r.estimate.total},
                              {"p_hat", format_hex(r.estimate.p_hat)},
                              {"ci_low", format_hex(r.estimate.ci95.low)},
                              {"ci_high", format_hex(r.estimate.ci95.high)},
                              {"bound", format_hex(r.bound)},
                              {"consistent", r.consistent}});
        }
        points.push_back({{"n", p.point.n},
                          {"tau_r", p.point.tau_r},
                          {"tau_p", p.point.tau_p},
                          {"count", p.count},
                          {"mean_delta", format_hex(p.mean_delta)},
                          {"var_delta", format_hex(p.var_delta)},
                          {"stderr_delta", format_hex(p.stderr_delta)},
                          {"max_delta", format_hex(p.max_delta)},
                          {"mean_max_peak", format_hex(p.mean_max_peak)},
                          {"max_max_peak", format_hex(p.max_max_peak)},
                          {"mean_pi", format_hex(p.mean_pi)},
                          {"gamma_hat", format_hex(p.gamma_hat)},
                          {"rarity", rarity},
                          {"extra_mean", hex_array(p.extra_mean)},
                          {"extra_stderr", hex_array(p.extra_stderr)}});
    }
    json j{{"points", points}};
    if (a.fit) {
        j["fit"] = {{"c", format_hex(a.fit->c)}, {"a", format_hex(a.fit->a)}, {"residuals", hex_array(a.fit->residuals)}};
    }
    json extra = json::array();
    for (const auto &[n, v] : a.extrapolation) {
        extra.push_back({{"n", n}, {"delta", format_hex(v)}});
    }
    j["extrapolation"] = extra;
    json checks = json::array();
    for (const auto &c : a.checks) {
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    j["checks"] = checks;
    return j;
}

class JsonReader {
  public:
    explicit JsonReader(std::string file) : file_(std::move(file)) {
    }

    const json &at(const json &obj, const std::string &key, const std::string &path) const {
        if (!obj.is_object() || !obj.contains(key)) {
            fail(path + key, "missing");
        }
        return obj.at(key);
    }
    double hex(const json &obj, const std::string &key, const std::string &path) const {
        const json &v = at(obj, key, path);
        std::optional<double> d = v.is_string() ? parse_hex(v.get<std::string>()) : std::nullopt;
        if (!d) {
            fail(path + key, "not a hex float");
        }
        return *d;
    }
    std::vector<double> hex_list(const json &obj, const std::string &key, const std::string &path) const {
        const json &v = at(obj, key, path);
        if (!v.is_array()) {
            fail(path + key, "not an array");
        }
        std::vector<double> out;
        for (std::size_t k = 0; k < v.size(); ++k) {
            std::optional<double> d = v[k].is_string() ? parse_hex(v[k].get<std::string>()) : std::nullopt;
            if (!d) {
                fail(path + key + "[" + std::to_string(k) + "]", "not a hex float");
            }
            out.push_back(*d);
        }
        return out;
    }
    template <typename T>
    T get(const json &obj, const std::string &key, const std::string &path) const {
        const json &v = at(obj, key, path);
        try {
            return v.get<T>();
        } catch (const std::exception &e) {
            fail(path + key, e.what());
        }
    }
    [[noreturn]] void fail(const std::string &field, const std::string &what) const {
        throw IntegrityError(file_, field, what);
    }

  private:
    std::string file_;
};

Aggregates parse_aggregates(const json &j, const JsonReader &r) {
    Aggregates a;
    const json &points = r.at(j, "points", "aggregates.");
    for (std::size_t k = 0; k < points.size(); ++k) {
        const json &p = points[k];
        std::string path = "aggregates.points[" + std::to_string(k) + "].";
        PointAggregate out;
        out.point = {r.get<int>(p, "n", path), r.get<int>(p, "tau_r", path), r.get<int>(p, "tau_p", path)};
        out.count = r.get<std::size_t>(p, "count", path);
        out.mean_delta = r.hex(p, "mean_delta", path);
        out.var_delta = r.hex(p, "var_delta", path);
        out.stderr_delta = r.hex(p, "stderr_delta", path);
        out.max_delta = r.hex(p, "max_delta", path);
        out.mean_max_peak = r.hex(p, "mean_max_peak", path);
        out.max_max_peak = r.hex(p, "max_max_peak", path);
        out.mean_pi = r.hex(p, "mean_pi", path);
        out.gamma_hat = r.hex(p, "gamma_hat", path);
        const json &rarity = r.at(p, "rarity", path);
        for (std::size_t q = 0; q < rarity.size(); ++q) {
            const json &e = rarity[q];
            std::string rp = path + "rarity[" + std::to_string(q) + "].";
            RarityCheck c;
            c.estimate.threshold = r.hex(e, "threshold", rp);
            c.estimate.hits = r.get<std::size_t>(e, "hits", rp);
            c.estimate.total = r.get<std::size_t>(e, "total", rp);
            c.estimate.p_hat = r.hex(e, "p_hat", rp);
            c.estimate.ci95 = {r.hex(e, "ci_low", rp), r.hex(e, "ci_high", rp)};
            c.bound = r.hex(e, "bound", rp);
            c.consistent = r.get<bool>(e, "consistent", rp);
            out.rarity.push_back(c);
        }
        out.extra_mean = r.hex_list(p, "extra_mean", path);
        out.extra_stderr = r.hex_list(p, "extra_stderr", path);
        a.points.push_back(std::move(out));
    }
    if (j.contains("fit")) {
        const json &f = j.at("fit");
        a.fit = DecayFit{r.hex(f, "c", "aggregates.fit."), r.hex(f, "a", "aggregates.fit."),
                         r.hex_list(f, "residuals", "aggregates.fit.")};
    }
    for (const auto &e : r.at(j, "extrapolation", "aggregates.")) {
        a.extrapolation.emplace_back(r.get<int>(e, "n", "aggregates.extrapolation."),
                                     r.hex(e, "delta", "aggregates.extrapolation."));
    }
    for (const auto &c : r.at(j, "checks", "aggregates.")) {
        a.checks.push_back({r.get<std::string>(c, "name", "aggregates.checks."),
                            r.get<bool>(c, "passed", "aggregates.checks."),
                            r.get<std::string>(c, "detail", "aggregates.checks.")});
    }
    return a;
}

std::string record_json_text(const ResultRecord &record, const std::string &rows) {
    json j{{"format", "peakcirc-record"},
           {"format_version", 1},
           {"manifest", manifest_json(record.manifest)},
           {"manifest_hash", record.manifest_hash},
           {"software_version", record.software_version},
           {"timestamp", record.timestamp},
           {"complete", record.complete},
           {"row_count", record.rows.size()},
           {"rows_sha256", sha256_hex(rows)},
           {"aggregates", aggregates_json(record.aggregates)}};
    return j.dump(2) + "\n";
}

}  // namespace

// ---- kinds and rules ----

const char *to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Rarity:
            return "rarity";
        case ExperimentKind::PeakSweep:
            return "peak-sweep";
        case ExperimentKind::EntropyProfile:
            return "entropy-profile";
        case ExperimentKind::ScalingFit:
            return "scaling-fit";
        case ExperimentKind::OracleCheck:
            return "oracle-check";
    }
    return "?";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view text) {
    for (auto kind : {ExperimentKind::Rarity, ExperimentKind::PeakSweep, ExperimentKind::EntropyProfile,
                      ExperimentKind::ScalingFit, ExperimentKind::OracleCheck}) {
        if (text == to_string(kind)) {
            return kind;
        }
    }
    return std::nullopt;
}

int DepthRule::resolve(int n) const {
    switch (kind) {
        case Kind::N:
            return n;
        case Kind::HalfN:
            return n / 2;
        default:
            return value;
    }
}

std::vector<int> PeakingRule::resolve(int tau_r) const {
    if (divisor > 0) {
        return {std::max(1, tau_r / divisor)};
    }
    return values;
}

// ---- manifest ----

namespace {

void collect_validation_errors(const ExperimentManifest &m, FieldErrors &errors) {
    const auto &[kind, n, tau_r, tau_p, instances, optimizer, seed, output, thresholds, extrapolate_n] = m;
    (void)seed;
    (void)extrapolate_n;
    if (n.empty()) {
        errors.add("n", "empty");
    }
    for (int q : n) {
        if (q < 2 || q % 2 != 0 || q > kMaxQubits) {
            errors.add("n", std::to_string(q) + " is not an even qubit count in [2, " + std::to_string(kMaxQubits) + "]");
        }
        if (kind == ExperimentKind::OracleCheck && q > 16) {
            errors.add("n", "oracle-check is limited to n <= 16");
        }
        if (tau_r.resolve(q) < 1) {
            errors.add("tau_r", "resolves to " + std::to_string(tau_r.resolve(q)) + " for n=" + std::to_string(q));
        }
        if (is_optimizing(kind)) {
            auto tps = tau_p.resolve(tau_r.resolve(q));
            if (tps.empty()) {
                errors.add("tau_p", "no peaking depths given");
            }
            for (int t : tps) {
                if (t < 1) {
                    errors.add("tau_p", "value " + std::to_string(t) + " is not positive");
                }
            }
        }
    }
    if (kind == ExperimentKind::OracleCheck && !(tau_r.kind == DepthRule::Kind::Fixed && tau_r.value == 2)) {
        errors.add("tau_r", "oracle-check needs tau_r = 2");
    }
    if (kind == ExperimentKind::ScalingFit) {
        std::set<int> distinct(n.begin(), n.end());
        if (distinct.size() < 3 || distinct.size() != n.size()) {
            errors.add("n", "scaling-fit needs at least 3 distinct qubit counts, each listed once");
        }
        if (tau_p.divisor == 0 && tau_p.values.size() != 1) {
            errors.add("tau_p", "scaling-fit needs one peaking depth per n");
        }
    }
    if (instances < 1) {
        errors.add("instances", "must be >= 1");
    }
    if (output.empty()) {
        errors.add("output", "empty output directory");
    }
    for (double t : thresholds) {
        if (!(t > 0.0 && t <= 1.0)) {
            errors.add("thresholds", "value outside (0, 1]");
        }
    }
    if (is_optimizing(kind)) {
        try {
            optimizer.validate();
        } catch (const std::exception &e) {
            errors.add("optimizer", e.what());
        }
    }
}

}  // namespace

void ExperimentManifest::validate() const {
    FieldErrors errors;
    collect_validation_errors(*this, errors);
    errors.raise_if_any();
}

std::string ExperimentManifest::to_json() const {
    return manifest_json(*this).dump();
}

std::string ExperimentManifest::hash() const {
    return sha256_hex(to_json());
}

ExperimentManifest parse_manifest(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw ValidationError(std::string("invalid manifest\n  json: ") + e.what());
    }
    if (!j.is_object()) {
        throw ValidationError("invalid manifest\n  json: top level is not an object");
    }
    FieldErrors errors;
    ExperimentManifest m;
    static const std::set<std::string> known = {"kind",   "n",         "tau_r",     "tau_p",        "instances",
                                                "seed",   "output",    "optimizer", "thresholds", "extrapolate_n"};
    for (const auto &[key, _] : j.items()) {
        if (!known.count(key)) {
            errors.add(key, "unknown field");
        }
    }

    if (!j.contains("kind") || !j["kind"].is_string() || !parse_experiment_kind(j["kind"].get<std::string>())) {
        errors.add("kind", "must be one of rarity, peak-sweep, entropy-profile, scaling-fit, oracle-check");
    } else {
        m.kind = *parse_experiment_kind(j["kind"].get<std::string>());
    }

    if (!j.contains("n") || !j["n"].is_array()) {
        errors.add("n", "must be an array of integers");
    } else {
        for (const auto &v : j["n"]) {
            int q = 0;
            if (read_number(v, "n", q, errors)) {
                m.n.push_back(q);
            }
        }
    }

    if (!j.contains("tau_r")) {
        if (m.kind == ExperimentKind::OracleCheck) {
            m.tau_r = {DepthRule::Kind::Fixed, 2};
        } else {
            errors.add("tau_r", "missing");
        }
    } else if (j["tau_r"].is_string()) {
        std::string rule = j["tau_r"];
        if (rule == "n") {
            m.tau_r.kind = DepthRule::Kind::N;
        } else if (rule == "n/2") {
            m.tau_r.kind = DepthRule::Kind::HalfN;
        } else {
            errors.add("tau_r", "rule must be an integer, \"n\" or \"n/2\"");
        }
    } else {
        read_number(j["tau_r"], "tau_r", m.tau_r.value, errors);
    }

    if (j.contains("tau_p")) {
        const json &tp = j["tau_p"];
        if (tp.is_string()) {
            std::string rule = tp;
            if (rule == "tau_r/2" || rule == "tau_r/3" || rule == "tau_r/4") {
                m.tau_p.divisor = rule.back() - '0';
            } else {
                errors.add("tau_p", "rule must be an integer, a list, \"tau_r/2\", \"tau_r/3\" or \"tau_r/4\"");
            }
        } else if (tp.is_array()) {
            for (const auto &v : tp) {
                int t = 0;
                if (read_number(v, "tau_p", t, errors)) {
                    m.tau_p.values.push_back(t);
                }
            }
        } else {
            int t = 0;
            if (read_number(tp, "tau_p", t, errors)) {
                m.tau_p.values = {t};
            }
        }
    } else if (is_optimizing(m.kind)) {
        errors.add("tau_p", "missing");
    }
    if (!is_optimizing(m.kind) && j.contains("tau_p")) {
        errors.add("tau_p", std::string("not used by ") + to_string(m.kind));
    }

    if (j.contains("instances")) {
        read_number(j["instances"], "instances", m.instances, errors);
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) {
            errors.add("seed", "must be a non-negative integer");
        } else {
            m.seed = j["seed"].get<std::uint64_t>();
        }
    }
    if (j.contains("output")) {
        if (!j["output"].is_string()) {
            errors.add("output", "must be a string");
        } else {
            m.output = j["output"];
        }
    }
    if (j.contains("thresholds")) {
        m.thresholds.clear();
        if (!j["thresholds"].is_array()) {
            errors.add("thresholds", "must be an array");
        } else {
            for (const auto &v : j["thresholds"]) {
                double t = 0;
                if (read_number(v, "thresholds", t, errors)) {
                    m.thresholds.push_back(t);
                }
            }
        }
    }
    if (j.contains("extrapolate_n")) {
        if (!j["extrapolate_n"].is_array()) {
            errors.add("extrapolate_n", "must be an array");
        } else {
            for (const auto &v : j["extrapolate_n"]) {
                int q = 0;
                if (read_number(v, "extrapolate_n", q, errors)) {
                    m.extrapolate_n.push_back(q);
                }
            }
        }
    }
    if (j.contains("optimizer")) {
        const json &o = j["optimizer"];
        if (!o.is_object()) {
            errors.add("optimizer", "must be an object");
        } else {
            OptimizerConfig &c = m.optimizer;
            for (const auto &[key, v] : o.items()) {
                std::string field = "optimizer." + key;
                if (key == "learning_rate") {
                    read_number(v, field, c.learning_rate, errors);
                } else if (key == "beta1") {
                    read_number(v, field, c.beta1, errors);
                } else if (key == "beta2") {
                    read_number(v, field, c.beta2, errors);
                } else if (key == "eps") {
                    read_number(v, field, c.eps, errors);
                } else if (key == "max_iters") {
                    read_number(v, field, c.max_iters, errors);
                } else if (key == "restarts") {
                    read_number(v, field, c.restarts, errors);
                } else if (key == "plateau_tol") {
                    read_number(v, field, c.plateau_tol, errors);
                } else if (key == "plateau_window") {
                    read_number(v, field, c.plateau_window, errors);
                } else if (key == "init_scale") {
                    read_number(v, field, c.init_scale, errors);
                } else if (key == "peaking_parity") {
                    if (v == "continue") {
                        c.parity = PeakingParity::Continue;
                    } else if (v == "mirror") {
                        c.parity = PeakingParity::Mirror;
                    } else {
                        errors.add(field, "must be \"continue\" or \"mirror\"");
                    }
                } else {
                    errors.add(field, "unknown field");
                }
            }
        }
    }
    collect_validation_errors(m, errors);
    errors.raise_if_any();
    return m;
}

ExperimentManifest load_manifest(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("invalid manifest\n  file: cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str());
}

std::vector<ExperimentPoint> experiment_points(const ExperimentManifest &manifest) {
    std::vector<ExperimentPoint> points;
    for (int q : manifest.n) {
        int tr = manifest.tau_r.resolve(q);
        if (is_optimizing(manifest.kind)) {
            for (int tp : manifest.tau_p.resolve(tr)) {
                points.push_back({q, tr, tp});
            }
        } else {
            points.push_back({q, tr, 0});
        }
    }
    return points;
}

// ---- rows ----

bool ResultRow::same_outcome(const ResultRow &o) const {
    return point == o.point && instance == o.instance && seed == o.seed && delta == o.delta &&
           max_peak == o.max_peak && pi == o.pi && iterations == o.iterations && extra == o.extra;
}

bool Aggregates::all_checks_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const NamedCheck &c) { return c.passed; });
}

ResultRow compute_row(const ExperimentManifest &manifest, std::size_t point_index, std::size_t instance) {
    const auto points = experiment_points(manifest);
    const ExperimentPoint &point = points.at(point_index);
    const auto start = std::chrono::steady_clock::now();
    ResultRow row;
    row.point = point_index;
    row.instance = instance;
    row.seed = derive_seed(manifest.seed, instance);
    PeakedCircuitInstance circuit = sample_random_circuit(point.n, point.tau_r, row.seed);

    switch (manifest.kind) {
        case ExperimentKind::Rarity: {
            StateVector state = run(circuit);
            row.max_peak = max_peak(state).value;
            row.delta = row.max_peak;
            row.pi = collision_probability(state);
            break;
        }
        case ExperimentKind::EntropyProfile: {
            StateVector state = zero_state(point.n);
            std::size_t k = 0;
            for (const auto &layer : circuit.layout_r().layers) {
                for (const auto &pair : layer) {
                    apply_two_qubit_gate(state, circuit.fixed_gates()[k++], pair.a, pair.b);
                }
                row.extra.push_back(entanglement_entropy_halfchain(state));
            }
            row.max_peak = max_peak(state).value;
            row.delta = row.max_peak;
            row.pi = collision_probability(state);
            break;
        }
        case ExperimentKind::PeakSweep:
        case ExperimentKind::ScalingFit: {
            OptimizationResult result = optimize_peaking(circuit, point.tau_p, manifest.optimizer, row.seed);
            PeakedCircuitInstance peaked =
                attach_peaking_layers(circuit, point.tau_p, result.best_theta, manifest.optimizer.parity);
            StateVector state = run(peaked);
            row.delta = result.best_delta;
            row.max_peak = max_peak(state).value;
            row.pi = collision_probability(state);
            for (const auto &r : result.per_restart) {
                row.iterations += r.iterations;
            }
            row.extra = {run_random_part(circuit).probability(0)};
            break;
        }
        case ExperimentKind::OracleCheck: {
            StateVector one_layer = zero_state(point.n);
            const auto &first = circuit.layout_r().layers[0];
            for (std::size_t p = 0; p < first.size(); ++p) {
                apply_two_qubit_gate(one_layer, circuit.fixed_gate(0, p), first[p].a, first[p].b);
            }
            StateVector state = run_random_part(circuit);
            double two_layer_peak = max_peak(state).value;
            AnalyticPeakingLayer layer = analytic_peaking_layer(circuit);
            layer.apply(state);
            double reconstruction = 0.0, alpha2 = 0.0;
            for (std::size_t p = 0; p < layer.schmidt.size(); ++p) {
                Eigen::Vector4cd col = circuit.fixed_gate(0, p).col(0);
                reconstruction = std::max(reconstruction, (layer.schmidt[p].reconstruct() - col).cwiseAbs().maxCoeff());
                alpha2 += layer.schmidt[p].alpha * layer.schmidt[p].alpha;
            }
            row.delta = state.probability(0);
            row.max_peak = max_peak(state).value;
            row.pi = collision_probability(state);
            row.extra = {max_peak(one_layer).value, two_layer_peak, layer.predicted_peak_weight(), reconstruction,
                         alpha2 / static_cast<double>(layer.schmidt.size())};
            break;
        }
    }
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

Aggregates aggregate_rows(const ExperimentManifest &manifest, const std::vector<ResultRow> &rows) {
    const auto points = experiment_points(manifest);
    Aggregates out;
    for (std::size_t p = 0; p < points.size(); ++p) {
        std::vector<InstanceSample> samples;
        std::vector<const ResultRow *> mine;
        for (const auto &r : rows) {
            if (r.point == p) {
                samples.push_back({r.delta, r.max_peak, r.pi, {}});
                mine.push_back(&r);
            }
        }
        if (samples.empty()) {
            continue;
        }
        const int n = points[p].n;
        EnsembleStats stats = summarize_ensemble(n, std::move(samples));
        PointAggregate agg;
        agg.point = points[p];
        agg.count = mine.size();
        agg.mean_delta = stats.mean_delta;
        agg.var_delta = stats.var_delta;
        agg.stderr_delta = stats.stderr_delta;
        agg.max_delta = stats.max_delta;
        agg.mean_pi = stats.mean_pi;
        agg.gamma_hat = stats.gamma_hat;
        std::vector<double> peaks;
        for (const auto *r : mine) {
            peaks.push_back(r->max_peak);
        }
        agg.mean_max_peak = mean_and_error(peaks).mean;
        agg.max_max_peak = *std::max_element(peaks.begin(), peaks.end());
        for (double t : manifest.thresholds) {
            RarityCheck c;
            c.estimate = rarity_estimate(stats, t);
            c.bound = rarity_bound(stats.gamma_hat, t, n);
            c.consistent = c.estimate.p_hat <= c.bound + (c.estimate.ci95.high - c.estimate.p_hat);
            agg.rarity.push_back(c);
            out.checks.push_back({"rarity_bound n=" + std::to_string(n) + " tau_r=" + std::to_string(points[p].tau_r) +
                                      " tau_p=" + std::to_string(points[p].tau_p) + " delta=" + std::to_string(t),
                                  c.consistent,
                                  "p_hat=" + std::to_string(c.estimate.p_hat) + " bound=" + std::to_string(c.bound)});
        }
        const std::size_t columns = mine.front()->extra.size();
        for (std::size_t col = 0; col < columns; ++col) {
            std::vector<double> values;
            for (const auto *r : mine) {
                values.push_back(col < r->extra.size() ? r->extra[col] : 0.0);
            }
            MeanAndError me = mean_and_error(values);
            agg.extra_mean.push_back(me.mean);
            agg.extra_stderr.push_back(me.std_error);
        }

        if (manifest.kind == ExperimentKind::OracleCheck) {
            std::vector<double> single, two_layer, gap;
            double worst_product = 0.0, worst_reconstruction = 0.0;
            for (const auto *r : mine) {
                single.push_back(r->extra[0]);
                two_layer.push_back(r->extra[1]);
                worst_product = std::max(worst_product, std::abs(r->delta - r->extra[2]));
                worst_reconstruction = std::max(worst_reconstruction, r->extra[3]);
            }
            const std::string tag = " n=" + std::to_string(n);
            MeanAndError s = mean_and_error(single);
            double law1 = single_layer_peak_law(n);
            out.checks.push_back({"single_layer_law" + tag, std::abs(s.mean - law1) <= 3 * s.std_error,
                                  "mean=" + std::to_string(s.mean) + " law=" + std::to_string(law1) +
                                      " se=" + std::to_string(s.std_error)});
            double law2 = analytic_peaking_law(n);
            out.checks.push_back({"analytic_peaking_law" + tag,
                                  std::abs(agg.mean_delta - law2) <= 3 * agg.stderr_delta,
                                  "mean=" + std::to_string(agg.mean_delta) + " law=" + std::to_string(law2) +
                                      " se=" + std::to_string(agg.stderr_delta)});
            out.checks.push_back({"analytic_matches_schmidt_product" + tag, worst_product <= 1e-9,
                                  "max |delta - prod alpha^2| = " + std::to_string(worst_product)});
            out.checks.push_back({"schmidt_reconstruction" + tag, worst_reconstruction <= 1e-9,
                                  "max error = " + std::to_string(worst_reconstruction)});
            double two_mean = mean_and_error(two_layer).mean;
            out.checks.push_back({"peaking_not_worse_on_average" + tag, agg.mean_delta >= two_mean,
                                  "peaked=" + std::to_string(agg.mean_delta) +
                                      " unpeaked max-peak=" + std::to_string(two_mean)});
        }
        out.points.push_back(std::move(agg));
    }

    if (manifest.kind == ExperimentKind::ScalingFit && out.points.size() >= 3) {
        std::vector<DecayPoint> fit_points;
        bool positive = true;
        for (const auto &p : out.points) {
            fit_points.push_back({static_cast<double>(p.point.n), p.mean_delta});
            positive = positive && p.mean_delta > 0.0;
        }
        if (positive) {
            out.fit = fit_exponential_decay(fit_points);
            for (int q : manifest.extrapolate_n) {
                out.extrapolation.emplace_back(q, out.fit->c * std::pow(out.fit->a, -q));
            }
        }
    }
    return out;
}

// ---- running ----

ResultRecord run_experiment(ExperimentManifest manifest, const RunOptions &options) {
    manifest.validate();
    const fs::path dir = manifest.output;
    fs::create_directories(dir);
    const std::string hash = manifest.hash();
    const fs::path rows_path = dir / kRowsFile;

    std::vector<ResultRow> rows;
    if (options.resume) {
        ExperimentManifest stored = load_manifest(dir / kManifestFile);
        if (stored.hash() != hash) {
            throw IntegrityError((dir / kManifestFile).string(), "manifest_hash",
                                 "stored manifest differs from the one being resumed");
        }
        if (fs::exists(rows_path)) {
            rows = parse_rows(read_file(rows_path), rows_path.string(), true);
        }
    } else {
        fs::remove(rows_path);
        fs::remove(dir / kRecordFile);
    }
    write_file(dir / kManifestFile, manifest_json(manifest).dump(2) + "\n");
    write_file(dir / kResumeMarker, hash + "\n");
    write_file(rows_path, rows_text(rows));

    const auto points = experiment_points(manifest);
    std::set<std::pair<std::size_t, std::size_t>> done;
    for (const auto &r : rows) {
        done.insert({r.point, r.instance});
    }
    std::vector<std::pair<std::size_t, std::size_t>> todo;
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (std::size_t i = 0; i < static_cast<std::size_t>(manifest.instances); ++i) {
            if (!done.count({p, i})) {
                todo.emplace_back(p, i);
            }
        }
    }

    std::ofstream append(rows_path, std::ios::app);
    std::mutex writer;
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> finished{0};
    std::atomic<bool> stop{false};
    std::exception_ptr failure;
    const std::size_t budget = options.max_new_rows.value_or(todo.size());

    auto worker = [&] {
        while (!stop) {
            std::size_t k = next++;
            if (k >= todo.size() || k >= budget) {
                return;
            }
            try {
                ResultRow row = compute_row(manifest, todo[k].first, todo[k].second);
                std::lock_guard lock(writer);
                append << format_row(row) << '\n';
                append.flush();
                rows.push_back(std::move(row));
                ++finished;
            } catch (const std::bad_alloc &) {
                stop = true;
            } catch (...) {
                std::lock_guard lock(writer);
                if (!failure) {
                    failure = std::current_exception();
                }
                stop = true;
            }
        }
    };
    {
        const int workers = std::max(1, options.workers);
        std::vector<std::jthread> pool;
        for (int w = 1; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        worker();
    }
    append.close();
    if (failure) {
        std::rethrow_exception(failure);
    }

    ResultRecord record;
    record.manifest = manifest;
    record.manifest_hash = hash;
    sort_rows(rows);
    record.rows = std::move(rows);
    record.timestamp = utc_timestamp();
    record.complete = finished.load() == todo.size();
    if (!record.complete) {
        return record;
    }
    record.aggregates = aggregate_rows(manifest, record.rows);
    persist(record, dir);
    write_plot_data(record, dir);
    fs::remove(dir / kResumeMarker);
    return record;
}

// ---- persistence ----

void persist(const ResultRecord &record, const fs::path &dir) {
    fs::create_directories(dir);
    std::string rows = rows_text(record.rows);
    write_file(dir / kManifestFile, manifest_json(record.manifest).dump(2) + "\n");
    write_file(dir / kRowsFile, rows);
    write_file(dir / kRecordFile, record_json_text(record, rows));
}

ResultRecord load(const fs::path &dir) {
    const std::string record_path = (dir / kRecordFile).string();
    const std::string rows_path = (dir / kRowsFile).string();
    const std::string record_text = read_file(record_path);
    json j;
    try {
        j = json::parse(record_text);
    } catch (const json::parse_error &e) {
        throw IntegrityError(record_path, "json", e.what());
    }
    JsonReader r(record_path);
    if (r.get<std::string>(j, "format", "") != "peakcirc-record") {
        r.fail("format", "not a peakcirc record");
    }
    ResultRecord record;
    try {
        record.manifest = parse_manifest(r.at(j, "manifest", "").dump());
    } catch (const ValidationError &e) {
        r.fail("manifest", e.what());
    }
    record.manifest_hash = r.get<std::string>(j, "manifest_hash", "");
    if (record.manifest.hash() != record.manifest_hash) {
        r.fail("manifest_hash", "does not match the stored manifest");
    }
    record.software_version = r.get<std::string>(j, "software_version", "");
    record.timestamp = r.get<std::string>(j, "timestamp", "");
    record.complete = r.get<bool>(j, "complete", "");

    const std::string rows_text_on_disk = read_file(rows_path);
    if (sha256_hex(rows_text_on_disk) != r.get<std::string>(j, "rows_sha256", "")) {
        throw IntegrityError(rows_path, "rows_sha256", "file content does not match the record");
    }
    record.rows = parse_rows(rows_text_on_disk, rows_path, false);
    if (record.rows.size() != r.get<std::size_t>(j, "row_count", "")) {
        throw IntegrityError(rows_path, "row_count", "row count does not match the record");
    }
    record.aggregates = parse_aggregates(r.at(j, "aggregates", ""), r);
    return record;
}

void write_plot_data(const ResultRecord &record, const fs::path &dir) {
    auto open = [&](const std::string &name, const std::string &columns) {
        std::ofstream out(dir / name);
        out << "# " << columns << '\n';
        out.precision(17);
        return out;
    };
    const auto &points = record.aggregates.points;
    std::map<int, std::vector<const PointAggregate *>> by_n;
    for (const auto &p : points) {
        by_n[p.point.n].push_back(&p);
    }
    switch (record.manifest.kind) {
        case ExperimentKind::Rarity: {
            auto out = open("plot_rarity.dat", "n mean_max_peak stderr");
            for (const auto &p : points) {
                out << p.point.n << ' ' << p.mean_delta << ' ' << p.stderr_delta << '\n';
            }
            break;
        }
        case ExperimentKind::PeakSweep: {
            for (const auto &[n, series] : by_n) {
                auto out = open("plot_n" + std::to_string(n) + ".dat", "tau_p mean_delta stderr");
                for (const auto *p : series) {
                    out << p->point.tau_p << ' ' << p->mean_delta << ' ' << p->stderr_delta << '\n';
                }
            }
            break;
        }
        case ExperimentKind::EntropyProfile: {
            for (const auto &[n, series] : by_n) {
                auto out = open("plot_n" + std::to_string(n) + ".dat", "depth mean_entropy_bits stderr");
                for (const auto *p : series) {
                    for (std::size_t d = 0; d < p->extra_mean.size(); ++d) {
                        out << d + 1 << ' ' << p->extra_mean[d] << ' ' << p->extra_stderr[d] << '\n';
                    }
                }
            }
            break;
        }
        case ExperimentKind::ScalingFit: {
            auto out = open("plot_scaling.dat", "n mean_delta stderr");
            for (const auto &p : points) {
                out << p.point.n << ' ' << p.mean_delta << ' ' << p.stderr_delta << '\n';
            }
            if (record.aggregates.fit) {
                auto fit = open("plot_fit.dat", "n fitted_delta 0");
                for (const auto &p : points) {
                    fit << p.point.n << ' ' << record.aggregates.fit->c * std::pow(record.aggregates.fit->a, -p.point.n)
                        << " 0\n";
                }
                auto extra = open("extrapolation.txt", "EXTRAPOLATION of the fitted curve, not a measurement: n delta");
                for (const auto &[n, v] : record.aggregates.extrapolation) {
                    extra << "EXTRAPOLATION " << n << ' ' << v << '\n';
                }
            }
            break;
        }
        case ExperimentKind::OracleCheck: {
            auto peaked = open("plot_analytic.dat", "n mean_peak_weight stderr");
            auto single = open("plot_single_layer.dat", "n mean_max_peak stderr");
            for (const auto &p : points) {
                peaked << p.point.n << ' ' << p.mean_delta << ' ' << p.stderr_delta << '\n';
                single << p.point.n << ' ' << p.extra_mean[0] << ' ' << p.extra_stderr[0] << '\n';
            }
            break;
        }
    }
}

}  // namespace peakcirc
