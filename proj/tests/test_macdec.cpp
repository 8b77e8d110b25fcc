#include <random>
#include <stdexcept>

#include "doctest.h"
#include "ncma/macdec.hpp"

using namespace ncma;

namespace {

constexpr unsigned kK = 4;

struct Pair {
    GaloisField gf{8};
    SourceMessage ma, mb;

    Pair(unsigned l_a, unsigned l_b, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        ma = random_message(kK, l_a, Stream::A, rng);
        mb = random_message(kK, l_b, Stream::B, rng);
    }
    CodedPacket a(unsigned i) const { return encode_packet(gf, ma, i); }
    CodedPacket b(unsigned i) const { return encode_packet(gf, mb, i); }
    CodedPacket x(unsigned i) const { return xor_packets(a(i), b(i)); }
};

}  // namespace

TEST_CASE("constructor validates the thresholds") {
    const GaloisField gf(8);
    CHECK_THROWS_AS(EquationStore(gf, kK, 0, 3), std::invalid_argument);
    CHECK_THROWS_AS(EquationStore(gf, kK, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS(EquationStore(gf, kK, 256, 3), std::invalid_argument);
    CHECK_NOTHROW(EquationStore(gf, kK, 255, 255));
}

TEST_CASE("insert dispatches on the stream tag and rejects duplicates") {
    const Pair p(3, 3, 101);
    EquationStore store(p.gf, kK, 3, 3);

    store.insert(p.a(5), PacketOrigin::PhyDecoded);
    store.insert(p.b(5), PacketOrigin::PhyDecoded);
    store.insert(p.x(5), PacketOrigin::PhyDecoded);
    CHECK(store.has_index(Stream::A, 5));
    CHECK(store.has_index(Stream::B, 5));
    CHECK(store.has_index(Stream::AxorB, 5));
    CHECK(store.equation_count(Stream::A) == 1);

    CHECK_THROWS_AS(store.insert(p.a(5), PacketOrigin::PhyDecoded),
                    std::invalid_argument);

    CodedPacket bad = p.a(6);
    bad.payload.pop_back();
    CHECK_THROWS_AS(store.insert(bad, PacketOrigin::PhyDecoded),
                    std::invalid_argument);
}

TEST_CASE("ingest records the origin of phy-bridged packets") {
    const Pair p(3, 3, 103);
    EquationStore store(p.gf, kK, 3, 3);

    SlotOutcome o;
    o.b = p.b(2);
    o.x = p.x(2);
    o.mud = MudEvent::OnlyB;
    o.pnc = PncEvent::Decoded;
    store.ingest(phy_bridge(o));

    CHECK(store.origins(Stream::B).at(2) == PacketOrigin::PhyDecoded);
    CHECK(store.origins(Stream::A).at(2) == PacketOrigin::PhyBridged);
    CHECK(store.origins(Stream::AxorB).at(2) == PacketOrigin::PhyDecoded);
}

TEST_CASE("a native system solves at its threshold") {
    const Pair p(3, 3, 107);
    EquationStore store(p.gf, kK, 3, 3);

    store.insert(p.a(2), PacketOrigin::PhyDecoded);
    store.insert(p.a(9), PacketOrigin::PhyDecoded);
    CHECK_FALSE(store.resolve());
    CHECK_FALSE(store.solved(Stream::A));

    store.insert(p.a(5), PacketOrigin::PhyDecoded);
    CHECK(store.resolve());
    REQUIRE(store.solved(Stream::A));
    CHECK(*store.message(Stream::A) == p.ma);
    CHECK_FALSE(store.solved(Stream::B));

    // Extra equations beyond the threshold never change the answer.
    store.insert(p.a(77), PacketOrigin::PhyDecoded);
    store.resolve();
    CHECK(*store.message(Stream::A) == p.ma);
}

TEST_CASE("a solved native bridges the XOR equations to the other stream") {
    // Eq^A = {1,4,5}, Eq^B = {3,4}, Eq^X = {2,4}; once A solves, index 2
    // converts and B reaches its threshold without any new slot.
    const Pair p(3, 3, 109);
    EquationStore store(p.gf, kK, 3, 3);
    for (unsigned i : {1u, 4u, 5u}) store.insert(p.a(i), PacketOrigin::PhyDecoded);
    for (unsigned i : {3u, 4u}) store.insert(p.b(i), PacketOrigin::PhyDecoded);
    for (unsigned i : {2u, 4u}) store.insert(p.x(i), PacketOrigin::PhyDecoded);

    CHECK(store.resolve());
    REQUIRE(store.solved(Stream::A));
    REQUIRE(store.solved(Stream::B));
    CHECK(*store.message(Stream::A) == p.ma);
    CHECK(*store.message(Stream::B) == p.mb);

    // Index 4 stays the packet B decoded itself; index 2 was derived.
    CHECK(store.origins(Stream::B).at(4) == PacketOrigin::PhyDecoded);
    CHECK(store.origins(Stream::B).at(2) == PacketOrigin::MacDerived);
    CHECK(store.equation_count(Stream::B) == 3);
}

TEST_CASE("a solved XOR message converts lone native packets") {
    const Pair p(3, 3, 113);
    EquationStore store(p.gf, kK, 3, 3);
    for (unsigned i : {1u, 2u, 3u}) store.insert(p.x(i), PacketOrigin::PhyDecoded);
    store.insert(p.a(7), PacketOrigin::PhyDecoded);

    CHECK(store.resolve());
    REQUIRE(store.solved(Stream::AxorB));
    CHECK(*store.message(Stream::AxorB) == xor_messages(p.ma, p.mb));
    // The lone A packet at 7 yields B's equation at 7, but neither native
    // system is anywhere near its threshold yet.
    CHECK(store.has_index(Stream::B, 7));
    CHECK(store.origins(Stream::B).at(7) == PacketOrigin::MacDerived);
    CHECK_FALSE(store.solved(Stream::A));
    CHECK_FALSE(store.solved(Stream::B));

    // Two more native A equations finish both streams: A solves directly,
    // and every XOR index bridges across.
    store.insert(p.a(8), PacketOrigin::PhyDecoded);
    store.insert(p.a(9), PacketOrigin::PhyDecoded);
    CHECK(store.resolve());
    REQUIRE(store.solved(Stream::A));
    REQUIRE(store.solved(Stream::B));
    CHECK(*store.message(Stream::A) == p.ma);
    CHECK(*store.message(Stream::B) == p.mb);
}

TEST_CASE("unequal lengths disable the XOR-message solve but not bridging") {
    const Pair p(2, 3, 127);
    EquationStore store(p.gf, kK, 2, 3);
    CHECK_FALSE(store.xor_solve_enabled());
    CHECK(store.threshold(Stream::AxorB) == 3);

    for (unsigned i : {1u, 2u, 3u, 4u}) store.insert(p.x(i), PacketOrigin::PhyDecoded);
    CHECK_FALSE(store.resolve());
    CHECK_FALSE(store.solved(Stream::AxorB));  // undefined for L_A != L_B

    // Per-index bridging still applies once a native message is known.
    store.insert(p.a(6), PacketOrigin::PhyDecoded);
    store.insert(p.a(7), PacketOrigin::PhyDecoded);
    CHECK(store.resolve());
    REQUIRE(store.solved(Stream::A));
    REQUIRE(store.solved(Stream::B));  // bridged at {1,2,3,4} >= L_B
    CHECK(*store.message(Stream::B) == p.mb);
}

TEST_CASE("resolve reaches the same fixed point in any slot order") {
    // All packets of one slot share its index and are ingested together;
    // shuffling whole slots (with or without resolving between them) must
    // land on the same final state.
    const Pair p(3, 3, 131);
    std::vector<std::vector<CodedPacket>> slots = {
        {p.a(1)}, {p.x(2)}, {p.b(3)}, {p.a(4), p.b(4), p.x(4)}, {p.a(5)}};

    auto run = [&](bool resolve_each, std::uint64_t shuffle_seed) {
        auto order = slots;
        std::mt19937_64 rng(shuffle_seed);
        std::shuffle(order.begin(), order.end(), rng);
        EquationStore store(p.gf, kK, 3, 3);
        for (const auto& slot : order) {
            for (const auto& pkt : slot)
                store.insert(pkt, PacketOrigin::PhyDecoded);
            if (resolve_each) store.resolve();
        }
        store.resolve();
        return store.dump();
    };

    const auto base = run(false, 0);
    CHECK(base["A"]["solved"] == true);
    CHECK(base["B"]["solved"] == true);
    for (std::uint64_t s = 1; s <= 6; ++s) {
        CHECK(run(false, s) == base);
        CHECK(run(true, s) == base);
    }
}

TEST_CASE("rotate_pairing starts the solved stream's next round") {
    const Pair p(3, 3, 137);
    EquationStore store(p.gf, kK, 3, 3);
    for (unsigned i : {1u, 2u, 3u}) store.insert(p.a(i), PacketOrigin::PhyDecoded);
    store.insert(p.b(1), PacketOrigin::PhyDecoded);
    store.insert(p.x(2), PacketOrigin::PhyDecoded);
    store.resolve();
    REQUIRE(store.solved(Stream::A));
    REQUIRE_FALSE(store.solved(Stream::B));

    SUBCASE("the wrong stream name is rejected") {
        CHECK_THROWS_AS(store.rotate_pairing(Stream::B, 3), std::logic_error);
        CHECK_THROWS_AS(store.rotate_pairing(Stream::AxorB, 3),
                        std::invalid_argument);
    }
    SUBCASE("rotation clears the finished stream and the XOR system") {
        store.rotate_pairing(Stream::A, 3);
        CHECK_FALSE(store.solved(Stream::A));
        CHECK(store.equation_count(Stream::A) == 0);
        CHECK(store.equation_count(Stream::AxorB) == 0);
        // B survives: index 1 native plus index 2 bridged while A was known.
        CHECK(store.equation_count(Stream::B) == 2);
        CHECK(store.round_start(Stream::A) == 4);
        CHECK(store.round_start(Stream::AxorB) == 4);
        CHECK(store.round_start(Stream::B) == 1);
    }
    SUBCASE("the new round wraps past N") {
        store.rotate_pairing(Stream::A, 255);
        CHECK(store.round_start(Stream::A) == 1);
    }
    SUBCASE("neither or both solved is a state error") {
        EquationStore fresh(p.gf, kK, 3, 3);
        CHECK_THROWS_AS(fresh.rotate_pairing(Stream::A, 1), std::logic_error);

        for (unsigned i : {1u, 2u, 3u}) {
            store.insert(p.b(i + 4), PacketOrigin::PhyDecoded);
        }
        store.resolve();
        REQUIRE(store.solved(Stream::B));
        CHECK_THROWS_AS(store.rotate_pairing(Stream::A, 9), std::logic_error);
    }
}

TEST_CASE("reset_rounds clears all three systems") {
    const Pair p(3, 3, 139);
    EquationStore store(p.gf, kK, 3, 3);
    for (unsigned i : {1u, 2u, 3u}) {
        store.insert(p.a(i), PacketOrigin::PhyDecoded);
        store.insert(p.b(i), PacketOrigin::PhyDecoded);
    }
    store.insert(p.x(1), PacketOrigin::PhyDecoded);
    store.resolve();
    REQUIRE(store.solved(Stream::A));
    REQUIRE(store.solved(Stream::B));

    store.reset_rounds(7);
    for (Stream s : {Stream::A, Stream::B, Stream::AxorB}) {
        CHECK_FALSE(store.solved(s));
        CHECK(store.equation_count(s) == 0);
        CHECK(store.round_start(s) == 8);
    }
}

TEST_CASE("abandon_round drops an unsolved stream and its XOR pairing") {
    const Pair p(3, 3, 149);
    EquationStore store(p.gf, kK, 3, 3);
    store.insert(p.b(1), PacketOrigin::PhyDecoded);
    store.insert(p.x(1), PacketOrigin::PhyDecoded);
    store.insert(p.a(1), PacketOrigin::PhyDecoded);

    store.abandon_round(Stream::B, 255);
    CHECK(store.equation_count(Stream::B) == 0);
    CHECK(store.equation_count(Stream::AxorB) == 0);
    CHECK(store.equation_count(Stream::A) == 1);  // the survivor keeps its round
    CHECK(store.round_start(Stream::B) == 1);

    for (unsigned i : {2u, 3u}) store.insert(p.a(i), PacketOrigin::PhyDecoded);
    store.resolve();
    REQUIRE(store.solved(Stream::A));
    CHECK_THROWS_AS(store.abandon_round(Stream::A, 3), std::logic_error);
    CHECK_THROWS_AS(store.abandon_round(Stream::AxorB, 3),
                    std::invalid_argument);
}

TEST_CASE("dump snapshots indices, flags and round starts") {
    const Pair p(3, 3, 151);
    EquationStore store(p.gf, kK, 3, 3);
    for (unsigned i : {1u, 2u, 3u}) store.insert(p.a(i), PacketOrigin::PhyDecoded);
    store.insert(p.x(9), PacketOrigin::PhyDecoded);
    store.resolve();

    const auto j = store.dump();
    CHECK(j["A"]["indices"] == nlohmann::json({1, 2, 3}));
    CHECK(j["A"]["solved"] == true);
    CHECK(j["B"]["indices"] == nlohmann::json({9}));  // bridged from A
    CHECK(j["B"]["solved"] == false);
    CHECK(j["AxorB"]["indices"] == nlohmann::json({9}));
    CHECK(j["L_A"] == 3);
    CHECK(j["L_B"] == 3);
    CHECK(j["K"] == kK);
}
