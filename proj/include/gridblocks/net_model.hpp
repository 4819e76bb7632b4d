#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace gridblocks {

inline constexpr double kInfiniteCapacity = std::numeric_limits<double>::infinity();

struct Bus {
    int id = 0;           // internal 0-based index
    int original_id = 0;  // bus number as it appears in the case file
    double injection_mw = 0.0;
    bool is_generator = false;
};

struct Line {
    int id = 0;    // internal 0-based index
    int from = 0;  // internal bus index, orientation from -> to
    int to = 0;
    double susceptance = 0.0;            // per-unit, > 0
    double capacity_mw = kInfiniteCapacity;  // rateA; infinity = unlimited
    std::vector<int> merged_from;        // original branch row numbers (1-based)

    bool has_capacity() const { return capacity_mw != kInfiniteCapacity; }
    int multiplicity() const { return static_cast<int>(merged_from.size()); }
};

// Simple oriented graph of buses and lines; parallel branches are merged at
// parse time (susceptances and capacities summed) with provenance retained.
class PowerNetwork {
public:
    PowerNetwork() = default;
    PowerNetwork(std::vector<Bus> buses, std::vector<Line> lines);

    int bus_count() const { return static_cast<int>(buses_.size()); }
    int line_count() const { return static_cast<int>(lines_.size()); }
    const std::vector<Bus>& buses() const { return buses_; }
    const std::vector<Line>& lines() const { return lines_; }
    const Bus& bus(int i) const { return buses_[i]; }
    const Line& line(int l) const { return lines_[l]; }

    // lines incident to a bus, by line id
    const std::vector<int>& incident(int bus) const { return incident_[bus]; }
    int other_end(int line_id, int bus) const {
        const Line& l = lines_[line_id];
        return l.from == bus ? l.to : l.from;
    }

    // total branch count before parallel merging
    int branch_count() const;

private:
    std::vector<Bus> buses_;
    std::vector<Line> lines_;
    std::vector<std::vector<int>> incident_;
};

using InjectionVector = Eigen::VectorXd;

struct ParseResult {
    PowerNetwork network;
    InjectionVector injections;
};

// Parses the MATPOWER .m subset (mpc.baseMVA, mpc.bus, mpc.gen, mpc.branch).
ParseResult parse_matpower(std::string_view text);

// Parses the canonical JSON export written by serialize_network.
ParseResult parse_network_json(std::string_view text);

// Dispatches on content: '{' starts JSON, otherwise MATPOWER.
ParseResult parse_auto(std::string_view text);

std::string serialize_network(const PowerNetwork& net);

enum class RebalanceMode { reject, uniform_generators, proportional_generators };

// Distributes each island's injection imbalance over that island's generator
// buses. Throws BalanceError (reject mode) or UnbalanceableError.
InjectionVector rebalance(const InjectionVector& p, const PowerNetwork& net,
                          RebalanceMode mode, double tol = 1e-9);

// Induced subnetwork on a vertex subset: buses reindexed 0..k-1, lines with
// both endpoints inside kept. to_sub maps parent bus index -> sub index (-1
// outside); line_map maps sub line index -> parent line id.
struct Subnetwork {
    PowerNetwork network;
    std::vector<int> to_sub;
    std::vector<int> from_sub;  // sub bus index -> parent bus index
    std::vector<int> line_map;
};

Subnetwork extract_subnetwork(const PowerNetwork& net, const std::vector<int>& vertices);

// Copy of the network with the given lines removed (ids renumbered densely);
// line_map maps new line id -> old line id.
struct ReducedNetwork {
    PowerNetwork network;
    std::vector<int> line_map;
};

ReducedNetwork remove_lines(const PowerNetwork& net, const std::vector<int>& line_ids);

}  // namespace gridblocks
