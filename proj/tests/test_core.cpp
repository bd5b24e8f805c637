#include "support.hpp"

#include <doctest.h>

using namespace testing;

namespace {

Bmsc crossing()
{
    Bmsc b = make_bmsc(pids({"p", "q"}), {{"a", ProcessId("p"), ProcessId("q"), MessageLabel("m"), 0},
                                          {"b", ProcessId("q"), ProcessId("p"), MessageLabel("m'"), 0}});
    b.order[ProcessId("p")] = {send_of(0), receive_of(1)};
    b.order[ProcessId("q")] = {send_of(1), receive_of(0)};
    return b;
}

Bmsc single(const std::string& label = "m")
{
    return make_bmsc(pids({"p", "q"}), {{"x", ProcessId("p"), ProcessId("q"), MessageLabel(label), 0}});
}

bool has_kind(const std::vector<BmscViolation>& vs, BmscViolationKind k)
{
    return std::any_of(vs.begin(), vs.end(), [&](const BmscViolation& v) { return v.kind == k; });
}

std::vector<std::vector<bool>> matrix(const VisualOrder& o)
{
    std::vector<std::vector<bool>> out(o.size(), std::vector<bool>(o.size()));
    for (EventId a = 0; a < o.size(); ++a) {
        for (EventId b = 0; b < o.size(); ++b) {
            out[a][b] = o(a, b);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("the crossing chart is a valid bMSC")
{
    CHECK(validate_bmsc(crossing()).empty());
    CHECK(validate_bmsc(load("cross").chart("S")).empty());
    CHECK(validate_bmsc(Bmsc{}).empty());
}

TEST_CASE("overtaking messages violate FIFO")
{
    Bmsc b = make_bmsc(pids({"p", "q"}), {{"x", ProcessId("p"), ProcessId("q"), MessageLabel("m"), 0},
                                          {"y", ProcessId("p"), ProcessId("q"), MessageLabel("m"), 0}});
    b.order[ProcessId("q")] = {receive_of(1), receive_of(0)};
    CHECK(has_kind(validate_bmsc(b), BmscViolationKind::fifo));
}

TEST_CASE("self messages, broken pairing and cycles are reported")
{
    Bmsc self = make_bmsc(pids({"p"}), {{"x", ProcessId("p"), ProcessId("p"), MessageLabel("m"), 0}});
    CHECK(has_kind(validate_bmsc(self), BmscViolationKind::self_message));

    Bmsc missing = single();
    missing.order[ProcessId("q")].clear();
    CHECK(has_kind(validate_bmsc(missing), BmscViolationKind::pairing));

    Bmsc cycle = crossing();
    cycle.order[ProcessId("p")] = {receive_of(1), send_of(0)};
    cycle.order[ProcessId("q")] = {receive_of(0), send_of(1)};
    CHECK(has_kind(validate_bmsc(cycle), BmscViolationKind::cycle));
    CHECK_THROWS_AS(visual_order(cycle), InvalidBmsc);
}

TEST_CASE("visual order of the crossing chart")
{
    const Bmsc b = crossing();
    const VisualOrder o = visual_order(b);
    const EventId e1 = send_of(0), e2 = receive_of(1), f1 = send_of(1), f2 = receive_of(0);
    CHECK(o(e1, e2));
    CHECK(o(f1, f2));
    CHECK(o(e1, f2));
    CHECK(o(f1, e2));
    CHECK_FALSE(o(e1, f1));
    CHECK_FALSE(o(f1, e1));
    CHECK_FALSE(o(e2, f2));
    CHECK_FALSE(o(f2, e2));
    CHECK(o.pairs().size() == 4);
    CHECK(matrix(o) == closure_oracle(b));
}

TEST_CASE("visual order of trivial charts")
{
    CHECK(visual_order(Bmsc{}).pairs().empty());
    const auto pairs = visual_order(single()).pairs();
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0] == std::pair<EventId, EventId>{send_of(0), receive_of(0)});
}

TEST_CASE("projections of the crossing chart")
{
    const Bmsc b = crossing();
    CHECK(projection(b, ProcessId("p")) == Word{snd("p", "q", "m"), rcv("p", "q", "m'")});
    CHECK(projection(b, ProcessId("q")) == Word{snd("q", "p", "m'"), rcv("q", "p", "m")});
    CHECK(projection(Bmsc{}, ProcessId("p")).empty());
    CHECK(projection(b, ProcessId("zz")).empty());
}

TEST_CASE("weak composition")
{
    const Bmsc s = crossing();
    CHECK(isomorphic(compose(s, Bmsc{}), s));
    CHECK(isomorphic(compose(Bmsc{}, s), s));

    const Bmsc ss = compose(s, s);
    CHECK(ss.event_count() == 8);
    CHECK(validate_bmsc(ss).empty());
    CHECK(projection(ss, ProcessId("p")) ==
          Word{snd("p", "q", "m"), rcv("p", "q", "m'"), snd("p", "q", "m"), rcv("p", "q", "m'")});
    CHECK(matrix(visual_order(ss)) == closure_oracle(ss));

    // q may send the second b before p has received the first one.
    const auto b1 = ss.find_message(0, "b");
    const auto b2 = ss.find_message(1, "b");
    REQUIRE(b1);
    REQUIRE(b2);
    CHECK_FALSE(visual_order(ss)(receive_of(*b1), send_of(*b2)));
    CHECK(visual_order(ss)(send_of(*b1), send_of(*b2)));
}

TEST_CASE("composition concatenates projections and is associative")
{
    std::mt19937_64 rng(7);
    const auto ps = pids({"p", "q", "r"});
    for (int i = 0; i < 30; ++i) {
        const Bmsc a = random_bmsc(rng, ps, rng() % 3, "a");
        const Bmsc b = random_bmsc(rng, ps, rng() % 3, "b");
        const Bmsc c = random_bmsc(rng, ps, rng() % 3, "c");
        const Bmsc ab = compose(a, b);
        for (const ProcessId& p : ps) {
            Word expected = projection(a, p);
            const Word tail = projection(b, p);
            expected.insert(expected.end(), tail.begin(), tail.end());
            CHECK(projection(ab, p) == expected);
        }
        CHECK(validate_bmsc(ab).empty());
        CHECK(isomorphic(compose(ab, c), compose(a, compose(b, c))));
    }
}

TEST_CASE("composition rejects invalid operands")
{
    Bmsc broken = single();
    broken.order[ProcessId("q")].clear();
    CHECK_THROWS_AS(compose(broken, single()), InvalidBmsc);
}

TEST_CASE("compose_path on the fixtures")
{
    const MsgGraph cross = graph("cross");
    const NodeIndex s0 = cross.index_of("s0"), s = cross.index_of("s"), sf = cross.index_of("sf");
    CHECK(isomorphic(compose_path(cross, {s0, s}), crossing()));
    const Bmsc twice = compose_path(cross, {s0, s, s, sf});
    CHECK(twice.event_count() == 8);
    CHECK(isomorphic(twice, compose(crossing(), crossing())));
    CHECK_THROWS_AS(compose_path(cross, {s0, sf}), Error);

    const MsgGraph empty = graph("empty");
    CHECK(compose_path(empty, {empty.initial, empty.terminal}).empty());

    const MsgGraph local = graph("local");
    const Path run{local.index_of("s0"), local.index_of("c"), local.index_of("A"), local.index_of("sf")};
    CHECK(isomorphic(compose_path(local, run), local.labels[local.index_of("A")]));
}

TEST_CASE("compose_path is a homomorphism for path concatenation")
{
    const MsgGraph g = graph("cross");
    const NodeIndex s0 = g.index_of("s0"), s = g.index_of("s"), sf = g.index_of("sf");
    const Path left{s0, s, s};
    const Path right{s, sf};
    Path all = left;
    all.insert(all.end(), right.begin(), right.end());
    CHECK(isomorphic(compose_path(g, all), compose(compose_path(g, left), compose_path(g, right))));
}

TEST_CASE("linearizations of the crossing chart")
{
    const auto e1 = snd("p", "q", "m"), e2 = rcv("p", "q", "m'"), f1 = snd("q", "p", "m'"), f2 = rcv("q", "p", "m");
    const std::set<Word> expected{{e1, f1, e2, f2}, {e1, f1, f2, e2}, {f1, e1, e2, f2}, {f1, e1, f2, e2}};
    CHECK(linearizations(crossing()) == expected);
    CHECK(linearizations_oracle(crossing()) == expected);
}

TEST_CASE("linearizations of trivial charts")
{
    CHECK(linearizations(Bmsc{}) == std::set<Word>{Word{}});
    CHECK(linearizations(single()) == std::set<Word>{{snd("p", "q", "m"), rcv("q", "p", "m")}});
}

TEST_CASE("linearizations respect the event cap")
{
    const Bmsc big = compose(compose(crossing(), crossing()), crossing());
    CHECK_THROWS_AS(linearizations(big, 8), SizeError);
    CHECK(linearizations(big).size() == linearizations_oracle(big).size());
}

TEST_CASE("linearizations agree with permutation filtering on random charts")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 40; ++i) {
        const Bmsc b = random_bmsc(rng, pids({"p", "q", "r"}), 1 + rng() % 4);
        REQUIRE(validate_bmsc(b).empty());
        CHECK(linearizations(b) == linearizations_oracle(b));
        CHECK(matrix(visual_order(b)) == closure_oracle(b));
    }
}

TEST_CASE("visual order is a strict partial order on random charts")
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
        const Bmsc b = random_bmsc(rng, pids({"p", "q", "r"}), 1 + rng() % 5);
        const VisualOrder o = visual_order(b);
        for (EventId x = 0; x < o.size(); ++x) {
            CHECK_FALSE(o(x, x));
            for (EventId y = 0; y < o.size(); ++y) {
                CHECK_FALSE((o(x, y) && o(y, x)));
                for (EventId z = 0; z < o.size(); ++z) {
                    if (o(x, y) && o(y, z)) {
                        CHECK(o(x, z));
                    }
                }
            }
        }
    }
}

TEST_CASE("isomorphism ignores message names and process declaration order")
{
    Bmsc renamed = make_bmsc(pids({"q", "p"}), {{"k", ProcessId("q"), ProcessId("p"), MessageLabel("m'"), 0},
                                                 {"j", ProcessId("p"), ProcessId("q"), MessageLabel("m"), 0}});
    renamed.order[ProcessId("p")] = {send_of(1), receive_of(0)};
    renamed.order[ProcessId("q")] = {send_of(0), receive_of(1)};
    CHECK(isomorphic(renamed, crossing()));
    CHECK_FALSE(isomorphic(single("m"), single("n")));
}

TEST_CASE("graph validation")
{
    CHECK(validate_graph(graph("cross")).empty());
    CHECK(validate_graph(graph("local")).empty());

    MsgGraph into_initial = graph("cross");
    into_initial.add_edge(into_initial.index_of("s"), into_initial.index_of("s0"));
    CHECK_FALSE(validate_graph(into_initial).empty());

    MsgGraph dead_end = graph("cross");
    const NodeIndex d = dead_end.add_node("d", Bmsc{});
    dead_end.add_edge(dead_end.index_of("s"), d);
    CHECK_FALSE(validate_graph(dead_end).empty());

    MsgGraph unreachable = graph("cross");
    const NodeIndex u = unreachable.add_node("u", Bmsc{});
    unreachable.add_edge(u, unreachable.terminal);
    CHECK_FALSE(validate_graph(unreachable).empty());
}

TEST_CASE("paths and runs")
{
    const MsgGraph g = graph("cross");
    const NodeIndex s0 = g.index_of("s0"), s = g.index_of("s"), sf = g.index_of("sf");
    CHECK(g.is_path({s, s, s}));
    CHECK_FALSE(g.is_path({s0, sf}));
    CHECK(g.is_run({s0, s, sf}));
    CHECK_FALSE(g.is_run({s0, s}));
    CHECK(g.render({s0, s}) == "[s0,s]");
    CHECK_THROWS_AS(g.index_of("nope"), Error);
}
