#include "dandelion/graph_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "dandelion/errors.hpp"

namespace dandelion {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::uint64_t parse_uint(std::string_view s, const std::string& origin, std::size_t line) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(origin, line, "expected a non-negative integer, got '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

void write_edge_list(std::ostream& out, const Digraph& g) {
    out << "n " << g.node_count() << '\n';
    for (NodeId v = 0; v < g.node_count(); ++v)
        for (NodeId w : g.out(v)) out << v << ' ' << w << '\n';
}

void write_roles(std::ostream& out, const Digraph& g) {
    for (NodeId v = 0; v < g.node_count(); ++v)
        out << v << ' ' << (g.is_spy(v) ? 'a' : 'h') << ' ' << (g.supports(v) ? 1 : 0) << '\n';
}

Digraph read_edge_list(std::istream& in, const std::string& origin) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<Digraph> g;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (!g) {
            if (fields.size() != 2 || fields[0] != "n") throw ParseError(origin, line_no, "expected header 'n <count>'");
            g.emplace(parse_uint(fields[1], origin, line_no));
            continue;
        }
        if (fields.size() != 2) throw ParseError(origin, line_no, "expected 'src dst'");
        const auto src = parse_uint(fields[0], origin, line_no);
        const auto dst = parse_uint(fields[1], origin, line_no);
        if (src >= g->node_count() || dst >= g->node_count()) throw ParseError(origin, line_no, "node id out of range");
        try {
            g->add_edge(static_cast<NodeId>(src), static_cast<NodeId>(dst));
        } catch (const InvalidParameters& e) {
            throw ParseError(origin, line_no, e.what());
        }
    }
    if (!g) throw ParseError(origin, line_no, "missing header 'n <count>'");
    return std::move(*g);
}

void read_roles(std::istream& in, const std::string& origin, Digraph& g) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (fields.size() != 3) throw ParseError(origin, line_no, "expected 'node role support'");
        const auto v = parse_uint(fields[0], origin, line_no);
        if (v >= g.node_count()) throw ParseError(origin, line_no, "node id out of range");
        NodeProfile profile;
        if (fields[1] == "h") profile.role = Role::honest;
        else if (fields[1] == "a") profile.role = Role::spy;
        else throw ParseError(origin, line_no, "role must be 'h' or 'a'");
        if (fields[2] == "1") profile.supports_protocol = true;
        else if (fields[2] == "0") profile.supports_protocol = false;
        else throw ParseError(origin, line_no, "support must be 0 or 1");
        g.set_profile(static_cast<NodeId>(v), profile);
    }
}

std::filesystem::path roles_path_for(const std::filesystem::path& edges) {
    auto p = edges;
    p += ".roles";
    return p;
}

void serialize_graph(const Digraph& g, const std::filesystem::path& path) {
    auto write = [](const std::filesystem::path& p, auto&& body) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        body(out);
        if (!out) throw std::runtime_error("write failed: " + p.string());
    };
    write(path, [&](std::ostream& o) { write_edge_list(o, g); });
    write(roles_path_for(path), [&](std::ostream& o) { write_roles(o, g); });
}

Digraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    Digraph g = read_edge_list(in, path.string());
    const auto roles = roles_path_for(path);
    if (std::filesystem::exists(roles)) {
        std::ifstream rin(roles, std::ios::binary);
        read_roles(rin, roles.string(), g);
    }
    return g;
}

}  // namespace dandelion
