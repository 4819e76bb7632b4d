#include "gridblocks/net_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "json.hpp"

#include "gridblocks/errors.hpp"

namespace gridblocks {

PowerNetwork::PowerNetwork(std::vector<Bus> buses, std::vector<Line> lines)
    : buses_(std::move(buses)), lines_(std::move(lines)) {
    incident_.assign(buses_.size(), {});
    for (const Line& l : lines_) {
        if (l.from < 0 || l.from >= bus_count() || l.to < 0 || l.to >= bus_count())
            throw DataError("line " + std::to_string(l.id) + " references a bus outside the network");
        if (l.from == l.to)
            throw DataError("line " + std::to_string(l.id) + " is a self-loop");
        if (l.susceptance <= 0.0)
            throw DataError("line " + std::to_string(l.id) + " has non-positive susceptance");
        incident_[l.from].push_back(l.id);
        incident_[l.to].push_back(l.id);
    }
}

int PowerNetwork::branch_count() const {
    int n = 0;
    for (const Line& l : lines_) n += std::max<int>(1, static_cast<int>(l.merged_from.size()));
    return n;
}

namespace {

struct Token {
    double value;
    int line_no;
};

// Reads the bracketed numeric matrix that follows `pos` in the source text.
std::vector<std::vector<Token>> read_matrix(const std::string& text, size_t pos, int* line_counter) {
    size_t open = text.find('[', pos);
    if (open == std::string::npos) throw ParseError("expected '[' after matrix assignment");
    int line_no = 1 + static_cast<int>(std::count(text.begin(), text.begin() + open, '\n'));
    std::vector<std::vector<Token>> rows;
    std::vector<Token> row;
    std::string num;
    auto flush_num = [&]() {
        if (num.empty()) return;
        try {
            size_t used = 0;
            double v = std::stod(num, &used);
            if (used != num.size()) throw std::invalid_argument(num);
            row.push_back({v, line_no});
        } catch (const std::exception&) {
            throw ParseError("malformed number '" + num + "'", line_no);
        }
        num.clear();
    };
    auto flush_row = [&]() {
        flush_num();
        if (!row.empty()) rows.push_back(row);
        row.clear();
    };
    for (size_t i = open + 1; i < text.size(); ++i) {
        char c = text[i];
        if (c == '%') {
            while (i < text.size() && text[i] != '\n') ++i;
            --i;
            continue;
        }
        if (c == ']') {
            flush_row();
            if (line_counter) *line_counter = line_no;
            return rows;
        }
        if (c == '\n') {
            flush_row();
            ++line_no;
        } else if (c == ';') {
            flush_row();
        } else if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
            flush_num();
        } else {
            num += c;
        }
    }
    throw ParseError("unterminated matrix (missing ']')", line_no);
}

double field(const std::vector<Token>& row, size_t idx, const char* table) {
    if (idx >= row.size())
        throw ParseError(std::string(table) + " row has only " + std::to_string(row.size()) +
                             " columns, need " + std::to_string(idx + 1),
                         row.empty() ? -1 : row[0].line_no);
    return row[idx].value;
}

}  // namespace

ParseResult parse_matpower(std::string_view text_view) {
    std::string text(text_view);
    auto find_table = [&](const char* name) {
        size_t pos = text.find(name);
        return pos;
    };

    size_t pos_bus = find_table("mpc.bus");
    size_t pos_gen = find_table("mpc.gen");
    size_t pos_branch = find_table("mpc.branch");
    if (pos_bus == std::string::npos) throw ParseError("missing mpc.bus table");
    if (pos_branch == std::string::npos) throw ParseError("missing mpc.branch table");
    // mpc.bus also matches "mpc.busname" etc.; the subset grammar only has the
    // four tables, so prefix matching is adequate here.

    auto bus_rows = read_matrix(text, pos_bus, nullptr);
    auto branch_rows = read_matrix(text, pos_branch, nullptr);
    std::vector<std::vector<Token>> gen_rows;
    if (pos_gen != std::string::npos) gen_rows = read_matrix(text, pos_gen, nullptr);

    if (bus_rows.empty()) throw ParseError("mpc.bus table is empty");

    std::vector<Bus> buses;
    std::map<int, int> index_of;  // original id -> internal
    for (const auto& row : bus_rows) {
        Bus b;
        b.id = static_cast<int>(buses.size());
        double raw_id = field(row, 0, "bus");
        b.original_id = static_cast<int>(raw_id);
        if (b.original_id != raw_id)
            throw ParseError("non-integer bus id", row[0].line_no);
        if (index_of.count(b.original_id))
            throw DataError("duplicate bus id " + std::to_string(b.original_id));
        b.injection_mw = -field(row, 2, "bus");  // Pd
        index_of[b.original_id] = b.id;
        buses.push_back(b);
    }

    for (const auto& row : gen_rows) {
        int bus_id = static_cast<int>(field(row, 0, "gen"));
        double pg = field(row, 1, "gen");
        double status = field(row, 7, "gen");
        auto it = index_of.find(bus_id);
        if (it == index_of.end())
            throw DataError("gen row references unknown bus " + std::to_string(bus_id));
        if (status > 0) {
            buses[it->second].injection_mw += pg;
            buses[it->second].is_generator = true;
        }
    }

    std::vector<Line> lines;
    std::map<std::pair<int, int>, int> line_of;  // unordered internal pair -> line index
    int branch_row_no = 0;
    for (const auto& row : branch_rows) {
        ++branch_row_no;
        int f = static_cast<int>(field(row, 0, "branch"));
        int t = static_cast<int>(field(row, 1, "branch"));
        double x = field(row, 3, "branch");
        double rate_a = field(row, 5, "branch");
        double status = field(row, 10, "branch");
        if (status <= 0) continue;
        auto fi = index_of.find(f), ti = index_of.find(t);
        if (fi == index_of.end())
            throw DataError("branch row " + std::to_string(branch_row_no) +
                            " references unknown bus " + std::to_string(f));
        if (ti == index_of.end())
            throw DataError("branch row " + std::to_string(branch_row_no) +
                            " references unknown bus " + std::to_string(t));
        if (x <= 0.0)
            throw DataError("branch row " + std::to_string(branch_row_no) +
                            " has reactance x <= 0 while in service");
        if (fi->second == ti->second)
            throw DataError("branch row " + std::to_string(branch_row_no) + " is a self-loop");
        double b = 1.0 / x;
        double cap = rate_a == 0.0 ? kInfiniteCapacity : rate_a;
        std::pair<int, int> key{std::min(fi->second, ti->second), std::max(fi->second, ti->second)};
        auto existing = line_of.find(key);
        if (existing == line_of.end()) {
            Line l;
            l.id = static_cast<int>(lines.size());
            l.from = fi->second;
            l.to = ti->second;
            l.susceptance = b;
            l.capacity_mw = cap;
            l.merged_from = {branch_row_no};
            line_of[key] = l.id;
            lines.push_back(l);
        } else {
            Line& l = lines[existing->second];
            l.susceptance += b;
            l.capacity_mw = (l.capacity_mw == kInfiniteCapacity || cap == kInfiniteCapacity)
                                ? kInfiniteCapacity
                                : l.capacity_mw + cap;
            l.merged_from.push_back(branch_row_no);
        }
    }

    ParseResult res;
    res.injections.resize(static_cast<Eigen::Index>(buses.size()));
    for (const Bus& b : buses) res.injections[b.id] = b.injection_mw;
    res.network = PowerNetwork(std::move(buses), std::move(lines));
    return res;
}

ParseResult parse_network_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what());
    }
    try {
        std::vector<Bus> buses;
        for (const auto& jb : j.at("buses")) {
            Bus b;
            b.id = jb.at("id").get<int>();
            b.original_id = b.id;
            b.injection_mw = jb.at("injection_mw").get<double>();
            b.is_generator = jb.at("is_generator").get<bool>();
            if (b.id != static_cast<int>(buses.size()))
                throw DataError("bus ids must be contiguous from 0");
            buses.push_back(b);
        }
        std::vector<Line> lines;
        for (const auto& jl : j.at("lines")) {
            Line l;
            l.id = jl.at("id").get<int>();
            l.from = jl.at("from").get<int>();
            l.to = jl.at("to").get<int>();
            l.susceptance = jl.at("susceptance").get<double>();
            l.capacity_mw =
                jl.at("capacity_mw").is_null() ? kInfiniteCapacity : jl.at("capacity_mw").get<double>();
            l.merged_from = {l.id + 1};
            if (l.id != static_cast<int>(lines.size()))
                throw DataError("line ids must be contiguous from 0");
            lines.push_back(l);
        }
        ParseResult res;
        res.injections.resize(static_cast<Eigen::Index>(buses.size()));
        for (const Bus& b : buses) res.injections[b.id] = b.injection_mw;
        res.network = PowerNetwork(std::move(buses), std::move(lines));
        return res;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad network JSON: ") + e.what());
    }
}

ParseResult parse_auto(std::string_view text) {
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '{') return parse_network_json(text);
        break;
    }
    return parse_matpower(text);
}

std::string serialize_network(const PowerNetwork& net) {
    nlohmann::ordered_json j;
    j["buses"] = nlohmann::ordered_json::array();
    for (const Bus& b : net.buses()) {
        j["buses"].push_back({{"id", b.id},
                              {"injection_mw", b.injection_mw},
                              {"is_generator", b.is_generator}});
    }
    j["lines"] = nlohmann::ordered_json::array();
    for (const Line& l : net.lines()) {
        nlohmann::ordered_json jl{{"id", l.id},
                                  {"from", l.from},
                                  {"to", l.to},
                                  {"susceptance", l.susceptance}};
        if (l.capacity_mw == kInfiniteCapacity)
            jl["capacity_mw"] = nullptr;
        else
            jl["capacity_mw"] = l.capacity_mw;
        j["lines"].push_back(jl);
    }
    return j.dump(2) + "\n";
}

namespace {

std::vector<std::vector<int>> find_islands(const PowerNetwork& net) {
    int n = net.bus_count();
    std::vector<int> comp(n, -1);
    std::vector<std::vector<int>> islands;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        int c = static_cast<int>(islands.size());
        islands.push_back({});
        std::vector<int> stack{s};
        comp[s] = c;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            islands[c].push_back(v);
            for (int lid : net.incident(v)) {
                int u = net.other_end(lid, v);
                if (comp[u] < 0) {
                    comp[u] = c;
                    stack.push_back(u);
                }
            }
        }
        std::sort(islands[c].begin(), islands[c].end());
    }
    return islands;
}

}  // namespace

InjectionVector rebalance(const InjectionVector& p, const PowerNetwork& net,
                          RebalanceMode mode, double tol) {
    if (p.size() != net.bus_count())
        throw DataError("injection vector length does not match bus count");
    InjectionVector out = p;
    auto islands = find_islands(net);
    for (size_t j = 0; j < islands.size(); ++j) {
        double imbalance = 0.0;
        for (int v : islands[j]) imbalance += p[v];
        if (std::abs(imbalance) <= tol) continue;
        if (mode == RebalanceMode::reject) {
            std::ostringstream os;
            os << "island " << j << " has injection imbalance " << imbalance << " MW";
            throw BalanceError(os.str());
        }
        std::vector<int> gens;
        for (int v : islands[j])
            if (net.bus(v).is_generator) gens.push_back(v);
        if (gens.empty()) {
            std::ostringstream os;
            os << "island " << j << " has imbalance " << imbalance << " MW and no generator bus";
            throw UnbalanceableError(os.str());
        }
        if (mode == RebalanceMode::uniform_generators) {
            double share = imbalance / static_cast<double>(gens.size());
            for (int v : gens) out[v] -= share;
        } else {
            double total = 0.0;
            for (int v : gens) total += std::abs(p[v]);
            if (total <= 0.0) {
                double share = imbalance / static_cast<double>(gens.size());
                for (int v : gens) out[v] -= share;
            } else {
                for (int v : gens) out[v] -= imbalance * std::abs(p[v]) / total;
            }
        }
    }
    return out;
}

Subnetwork extract_subnetwork(const PowerNetwork& net, const std::vector<int>& vertices) {
    Subnetwork sub;
    sub.to_sub.assign(net.bus_count(), -1);
    std::vector<int> sorted = vertices;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<Bus> buses;
    for (int v : sorted) {
        Bus b = net.bus(v);
        sub.to_sub[v] = static_cast<int>(buses.size());
        sub.from_sub.push_back(v);
        b.id = sub.to_sub[v];
        buses.push_back(b);
    }
    std::vector<Line> lines;
    for (const Line& l : net.lines()) {
        if (sub.to_sub[l.from] < 0 || sub.to_sub[l.to] < 0) continue;
        Line nl = l;
        nl.id = static_cast<int>(lines.size());
        nl.from = sub.to_sub[l.from];
        nl.to = sub.to_sub[l.to];
        sub.line_map.push_back(l.id);
        lines.push_back(nl);
    }
    sub.network = PowerNetwork(std::move(buses), std::move(lines));
    return sub;
}

ReducedNetwork remove_lines(const PowerNetwork& net, const std::vector<int>& line_ids) {
    std::vector<char> drop(net.line_count(), 0);
    for (int id : line_ids) {
        if (id < 0 || id >= net.line_count())
            throw DataError("line id " + std::to_string(id) + " out of range");
        drop[id] = 1;
    }
    ReducedNetwork res;
    std::vector<Line> lines;
    for (const Line& l : net.lines()) {
        if (drop[l.id]) continue;
        Line nl = l;
        nl.id = static_cast<int>(lines.size());
        res.line_map.push_back(l.id);
        lines.push_back(nl);
    }
    res.network = PowerNetwork(net.buses(), std::move(lines));
    return res;
}

}  // namespace gridblocks
