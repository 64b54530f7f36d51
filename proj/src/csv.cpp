#include "dandelion/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dandelion/errors.hpp"

namespace dandelion {

namespace {

std::string fixed6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

void append_line(std::string& out, const TrialRow& r, const std::string& key, const std::string& value) {
    out += r.experiment;
    out += ',' + r.topology;
    out += ',' + std::to_string(r.n);
    out += ',' + std::to_string(r.eta);
    out += ',' + std::to_string(r.d);
    out += ',' + fixed6(r.p);
    out += ',' + fixed6(r.q);
    out += ',' + fixed6(r.beta);
    out += ',' + r.scheme;
    out += ',' + r.estimator;
    out += ',' + r.mode;
    out += ',' + std::to_string(r.m);
    out += ',' + std::to_string(r.trial);
    out += ',' + std::to_string(r.seed);
    out += ',' + fixed6(r.avg_precision);
    out += ',' + fixed6(r.avg_recall);
    out += ',' + key;
    out += ',' + value;
    out += '\n';
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <class T>
T field(std::string_view s, const std::string& origin, std::size_t line) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(origin, line, "bad numeric field '" + std::string(s) + "'");
    }
    return v;
}

bool same_trial(const TrialRow& a, const TrialRow& b) {
    return a.experiment == b.experiment && a.topology == b.topology && a.n == b.n && a.eta == b.eta && a.d == b.d &&
           a.p == b.p && a.q == b.q && a.beta == b.beta && a.scheme == b.scheme && a.estimator == b.estimator &&
           a.mode == b.mode && a.m == b.m && a.trial == b.trial && a.seed == b.seed;
}

}  // namespace

std::string format_csv(const std::vector<TrialRow>& rows) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : rows) {
        if (r.aux.empty()) {
            append_line(out, r, "", "");
            continue;
        }
        for (const auto& [key, value] : r.aux) append_line(out, r, key, fixed6(value));
    }
    return out;
}

void write_csv(const std::vector<TrialRow>& rows, const std::filesystem::path& path) {
    if (rows.empty()) throw InvalidParameters("no rows to write to " + path.string());
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << format_csv(rows);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<TrialRow> parse_csv(std::string_view text, const std::string& origin) {
    std::vector<TrialRow> rows;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line_no == 1) {
            if (line != kCsvHeader) throw ParseError(origin, line_no, "unexpected header");
            continue;
        }
        if (line.empty()) continue;
        const auto f = split_commas(line);
        if (f.size() != 18) throw ParseError(origin, line_no, "expected 18 fields");
        TrialRow r;
        r.experiment = std::string(f[0]);
        r.topology = std::string(f[1]);
        r.n = field<std::size_t>(f[2], origin, line_no);
        r.eta = field<std::size_t>(f[3], origin, line_no);
        r.d = field<std::size_t>(f[4], origin, line_no);
        r.p = field<double>(f[5], origin, line_no);
        r.q = field<double>(f[6], origin, line_no);
        r.beta = field<double>(f[7], origin, line_no);
        r.scheme = std::string(f[8]);
        r.estimator = std::string(f[9]);
        r.mode = std::string(f[10]);
        r.m = field<std::size_t>(f[11], origin, line_no);
        r.trial = field<std::size_t>(f[12], origin, line_no);
        r.seed = field<std::uint64_t>(f[13], origin, line_no);
        r.avg_precision = field<double>(f[14], origin, line_no);
        r.avg_recall = field<double>(f[15], origin, line_no);
        const bool has_aux = !f[16].empty();
        if (has_aux) r.aux.emplace_back(std::string(f[16]), field<double>(f[17], origin, line_no));
        if (!rows.empty() && has_aux && same_trial(rows.back(), r) && !rows.back().aux.empty() &&
            !rows.back().find_aux(r.aux.front().first)) {
            rows.back().aux.push_back(std::move(r.aux.front()));
        } else {
            rows.push_back(std::move(r));
        }
    }
    if (line_no == 0) throw ParseError(origin, 1, "empty file");
    return rows;
}

std::vector<TrialRow> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path.string());
}

}  // namespace dandelion
