#include "doctest.h"

#include <cmath>

#include "gridblocks/errors.hpp"
#include "gridblocks/net_model.hpp"
#include "test_helpers.hpp"

using namespace gridblocks;
using testutil::load_case;

TEST_CASE("matpower parse: case14 basics") {
    ParseResult r = load_case("case14_ieee");
    const PowerNetwork& net = r.network;
    CHECK(net.bus_count() == 14);
    CHECK(net.line_count() == 20);
    CHECK(net.branch_count() == 20);

    // bus 1 (index 0): Pd = 0, Pg = 232.4
    CHECK(r.injections[0] == doctest::Approx(232.4));
    // bus 2: Pd 21.7, Pg 40
    CHECK(r.injections[1] == doctest::Approx(40.0 - 21.7));
    // bus 4 (index 3): pure load
    CHECK(r.injections[3] == doctest::Approx(-47.8));

    // generator flags: buses 1, 2, 3, 6, 8
    std::vector<int> gen_ids;
    for (const Bus& b : net.buses())
        if (b.is_generator) gen_ids.push_back(b.original_id);
    CHECK(gen_ids == std::vector<int>{1, 2, 3, 6, 8});

    // first branch 1-2, x = 0.05917 -> susceptance 1/x
    const Line& l0 = net.line(0);
    CHECK(net.bus(l0.from).original_id == 1);
    CHECK(net.bus(l0.to).original_id == 2);
    CHECK(l0.susceptance == doctest::Approx(1.0 / 0.05917));
    CHECK(l0.capacity_mw == doctest::Approx(472.0));
    CHECK(l0.multiplicity() == 1);
}

TEST_CASE("matpower parse: parallel branches merge on case57") {
    ParseResult r = load_case("case57_ieee");
    const PowerNetwork& net = r.network;
    CHECK(net.branch_count() == 80);
    CHECK(net.line_count() == 78);  // 4-18 and 24-25 appear twice each

    int merged_seen = 0;
    for (const Line& l : net.lines()) {
        int f = net.bus(l.from).original_id, t = net.bus(l.to).original_id;
        if ((f == 4 && t == 18) || (f == 18 && t == 4)) {
            ++merged_seen;
            CHECK(l.multiplicity() == 2);
            CHECK(l.susceptance == doctest::Approx(1.0 / 0.555 + 1.0 / 0.43));
            CHECK(l.capacity_mw == doctest::Approx(100.0));  // 50 + 50
            CHECK(l.merged_from == std::vector<int>{19, 20});
        }
        if ((f == 24 && t == 25) || (f == 25 && t == 24)) {
            ++merged_seen;
            CHECK(l.multiplicity() == 2);
            CHECK(l.susceptance == doctest::Approx(1.0 / 1.182 + 1.0 / 1.23));
        }
    }
    CHECK(merged_seen == 2);
}

TEST_CASE("matpower parse: out-of-service branches are dropped") {
    std::string text = R"(
mpc.bus = [
 1 3 0 0 0 0 1 1 0 138 1 1.1 0.9;
 2 1 10 0 0 0 1 1 0 138 1 1.1 0.9;
 3 1 0 0 0 0 1 1 0 138 1 1.1 0.9;
];
mpc.gen = [
 1 10 0 10 -10 1 100 1 20 0;
 3 5 0 10 -10 1 100 0 20 0;
];
mpc.branch = [
 1 2 0.01 0.1 0 100 0 0 0 0 1 -360 360;
 2 3 0.01 -0.5 0 100 0 0 0 0 0 -360 360;
 1 3 0.01 0.2 0 0 0 0 0 0 1 -360 360;
];
)";
    ParseResult r = parse_matpower(text);
    CHECK(r.network.line_count() == 2);          // the status-0 branch vanishes
    CHECK(r.network.branch_count() == 2);
    CHECK(!r.network.line(1).has_capacity());    // rateA = 0 means unlimited
    CHECK(!r.network.bus(2).is_generator);       // its generator is off too
    CHECK(r.injections[2] == doctest::Approx(0.0));
}

TEST_CASE("matpower parse errors") {
    CHECK_THROWS_AS(parse_matpower("mpc.branch = [1 2 0 0.1];"), ParseError);  // no bus table
    CHECK_THROWS_AS(parse_matpower("mpc.bus = [ 1 1 0 0 ];\nmpc.branch = [ 1 2 0 0.1 0 0 0 0 0 0 1; ]"),
                    DataError);  // unknown bus 2

    // malformed number carries the source line in the message
    try {
        parse_matpower("mpc.bus = [\n 1 1 0 0;\n 2x 1 0 0;\n];\nmpc.branch = [];");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        CHECK(e.line_no() == 3);
        CHECK(e.exit_code() == 2);
    }

    // in-service branch with x <= 0
    CHECK_THROWS_AS(parse_matpower("mpc.bus = [ 1 1 0 0; 2 1 0 0 ];\n"
                                   "mpc.branch = [ 1 2 0 -0.1 0 0 0 0 0 0 1 ];"),
                    DataError);
    // duplicate bus id
    CHECK_THROWS_AS(parse_matpower("mpc.bus = [ 1 1 0 0; 1 1 0 0 ];\nmpc.branch = [];"), DataError);
    // unterminated matrix
    CHECK_THROWS_AS(parse_matpower("mpc.bus = [ 1 1 0 0"), ParseError);
    // branch self-loop
    CHECK_THROWS_AS(parse_matpower("mpc.bus = [ 1 1 0 0 ];\n"
                                   "mpc.branch = [ 1 1 0 0.1 0 0 0 0 0 0 1 ];"),
                    DataError);
}

TEST_CASE("JSON round trip preserves the network") {
    ParseResult r = load_case("case30_ieee");
    std::string json = serialize_network(r.network);
    ParseResult back = parse_auto(json);  // leading '{' routes to the JSON parser
    REQUIRE(back.network.bus_count() == r.network.bus_count());
    REQUIRE(back.network.line_count() == r.network.line_count());
    for (int l = 0; l < r.network.line_count(); ++l) {
        const Line& a = r.network.line(l);
        const Line& b = back.network.line(l);
        CHECK(a.from == b.from);
        CHECK(a.to == b.to);
        CHECK(a.susceptance == doctest::Approx(b.susceptance).epsilon(1e-12));
        if (a.has_capacity())
            CHECK(a.capacity_mw == doctest::Approx(b.capacity_mw).epsilon(1e-12));
        else
            CHECK(!b.has_capacity());
    }
    for (int v = 0; v < r.network.bus_count(); ++v) {
        CHECK(back.network.bus(v).injection_mw ==
              doctest::Approx(r.network.bus(v).injection_mw).epsilon(1e-12));
        CHECK(back.network.bus(v).is_generator == r.network.bus(v).is_generator);
    }
    CHECK_THROWS_AS(parse_network_json("{ not json"), ParseError);
    CHECK_THROWS_AS(parse_network_json("{\"buses\": []}"), ParseError);  // missing lines
}

TEST_CASE("network construction validation") {
    std::vector<Bus> buses(2);
    buses[0].id = 0;
    buses[1].id = 1;
    Line l;
    l.id = 0;
    l.from = 0;
    l.to = 0;
    l.susceptance = 1.0;
    CHECK_THROWS_AS(PowerNetwork(buses, {l}), DataError);  // self-loop
    l.to = 5;
    CHECK_THROWS_AS(PowerNetwork(buses, {l}), DataError);  // endpoint outside
    l.to = 1;
    l.susceptance = 0.0;
    CHECK_THROWS_AS(PowerNetwork(buses, {l}), DataError);  // non-positive b
}

TEST_CASE("rebalance: uniform and proportional generator absorption") {
    ParseResult r = load_case("case14_ieee");
    InjectionVector p = r.injections;
    double imbalance = p.sum();
    REQUIRE(std::abs(imbalance) > 1.0);  // the raw case is not balanced

    InjectionVector u = rebalance(p, r.network, RebalanceMode::uniform_generators);
    CHECK(std::abs(u.sum()) < 1e-9);
    int gens = 0;
    for (const Bus& b : r.network.buses())
        if (b.is_generator) ++gens;
    for (const Bus& b : r.network.buses()) {
        if (b.is_generator)
            CHECK(u[b.id] == doctest::Approx(p[b.id] - imbalance / gens));
        else
            CHECK(u[b.id] == p[b.id]);  // loads untouched, bitwise
    }

    InjectionVector q = rebalance(p, r.network, RebalanceMode::proportional_generators);
    CHECK(std::abs(q.sum()) < 1e-9);
    double total_abs = 0.0;
    for (const Bus& b : r.network.buses())
        if (b.is_generator) total_abs += std::abs(p[b.id]);
    for (const Bus& b : r.network.buses())
        if (b.is_generator)
            CHECK(q[b.id] == doctest::Approx(p[b.id] - imbalance * std::abs(p[b.id]) / total_abs));

    CHECK_THROWS_AS(rebalance(p, r.network, RebalanceMode::reject), BalanceError);

    // already balanced vectors pass through unchanged in reject mode
    InjectionVector same = rebalance(u, r.network, RebalanceMode::reject);
    CHECK((same - u).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rebalance: island without a generator is unbalanceable") {
    // two islands: 0-1 (generator at 0) and 2-3 (no generator)
    PowerNetwork net = testutil::make_net(4, {{0, 1}, {2, 3}});
    std::vector<Bus> buses = net.buses();
    for (Bus& b : buses) b.is_generator = (b.id == 0);
    PowerNetwork net2(buses, net.lines());
    InjectionVector p(4);
    p << 5.0, -3.0, 1.0, 0.0;
    CHECK_THROWS_AS(rebalance(p, net2, RebalanceMode::uniform_generators), UnbalanceableError);

    // per-island rebalancing only touches the unbalanced island's generators
    std::vector<Bus> buses3 = buses;
    buses3[2].is_generator = true;
    PowerNetwork net3(buses3, net.lines());
    InjectionVector out = rebalance(p, net3, RebalanceMode::uniform_generators);
    CHECK(out[0] + out[1] == doctest::Approx(0.0));
    CHECK(out[2] + out[3] == doctest::Approx(0.0));
    CHECK(out[1] == p[1]);
    CHECK(out[3] == p[3]);
}

TEST_CASE("extract_subnetwork maps buses and lines consistently") {
    ParseResult r = load_case("case30_ieee");
    std::vector<int> verts = {0, 1, 2, 3, 5};  // internal indices
    Subnetwork sub = extract_subnetwork(r.network, verts);
    CHECK(sub.network.bus_count() == 5);
    for (int v = 0; v < sub.network.bus_count(); ++v) {
        CHECK(sub.to_sub[sub.from_sub[v]] == v);
        CHECK(sub.network.bus(v).original_id == r.network.bus(sub.from_sub[v]).original_id);
    }
    for (int l = 0; l < sub.network.line_count(); ++l) {
        const Line& sl = sub.network.line(l);
        const Line& pl = r.network.line(sub.line_map[l]);
        CHECK(sub.from_sub[sl.from] == pl.from);
        CHECK(sub.from_sub[sl.to] == pl.to);
        CHECK(sl.susceptance == pl.susceptance);
    }
    // every parent line with both ends inside is present
    int expect = 0;
    for (const Line& l : r.network.lines())
        if (sub.to_sub[l.from] >= 0 && sub.to_sub[l.to] >= 0) ++expect;
    CHECK(sub.network.line_count() == expect);
}

TEST_CASE("remove_lines renumbers and maps back") {
    ParseResult r = load_case("case14_ieee");
    ReducedNetwork cut = remove_lines(r.network, {3, 7});
    CHECK(cut.network.line_count() == r.network.line_count() - 2);
    for (size_t i = 0; i < cut.line_map.size(); ++i) {
        CHECK(cut.line_map[i] != 3);
        CHECK(cut.line_map[i] != 7);
        CHECK(cut.network.line(static_cast<int>(i)).from == r.network.line(cut.line_map[i]).from);
    }
    CHECK_THROWS_AS(remove_lines(r.network, {99}), DataError);
}
