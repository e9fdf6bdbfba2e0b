#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cstdio>
#include <cstdlib>

#include "doctest.h"
#include "pqofh/errors.hpp"
#include "pqofh/esp.hpp"
#include "pqofh/ike_message.hpp"
#include "pqofh/session.hpp"
#include "pqofh/trace.hpp"
#include "pqofh/udp_endpoint.hpp"

using namespace pqofh;

namespace {

std::string config_path(const std::string& name) {
    const char* dir = std::getenv("PQOFH_CONFIG_DIR");
    REQUIRE(dir != nullptr);
    return std::string(dir) + "/" + name;
}

const KemRegistry& registry() {
    static KemRegistry reg = KemRegistry::standard_from_file(config_path("mock_kems.conf"));
    return reg;
}

std::string temp_path(const std::string& stem) {
    return "/tmp/pqofh_test_" + stem + "_" + std::to_string(getpid());
}

SessionSpec small_spec(const std::string& kem = "none") {
    SessionSpec spec;
    spec.kem = kem;
    spec.profile.packet_size = 200;
    spec.profile.rate_pps = 50000;
    spec.profile.duration_s = 0.04;  // 2,000 packets
    spec.seed = Bytes(32, 0x5e);
    spec.registry = &registry();
    return spec;
}

}  // namespace

TEST_CASE("traffic profiles reject out-of-range parameters") {
    TrafficProfile p;
    CHECK_NOTHROW(p.validate());  // defaults
    CHECK(p.packet_count() == 100000);
    CHECK(p.send_ns(0) == 0);
    CHECK(p.send_ns(1) == 100000);  // 10 kpps -> 100 us spacing
    CHECK(p.send_ns(10) == 1000000);

    auto reject = [](auto mutate) {
        TrafficProfile bad;
        mutate(bad);
        CHECK_THROWS_AS(bad.validate(), Error);
    };
    reject([](TrafficProfile& t) { t.packet_size = 0; });
    reject([](TrafficProfile& t) { t.packet_size = 65001; });
    reject([](TrafficProfile& t) { t.rate_pps = 0; });
    reject([](TrafficProfile& t) { t.rate_pps = 0.5; });
    reject([](TrafficProfile& t) { t.duration_s = 0; });
    reject([](TrafficProfile& t) { t.rate_pps = 1e6, t.duration_s = 101; });  // > 1e8 packets
}

TEST_CASE("channel models reject malformed parameters") {
    ChannelModel c;
    CHECK_NOTHROW(c.validate());
    c.loss_rate = 1.0;
    CHECK_NOTHROW(c.validate());  // total loss is a valid boundary
    c.loss_rate = 1.01;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.base_delay_us = -1;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.delay_jitter_us = -0.1;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("the channel sampler honors loss and delay bounds deterministically") {
    Bytes seed(32, 0x11);

    SUBCASE("loss_rate 1 drops everything") {
        ChannelModel c{0, 0, 1.0};
        ChannelSampler s(c, seed);
        for (int i = 0; i < 1000; ++i) CHECK(s.next().dropped);
    }
    SUBCASE("loss_rate 0 drops nothing") {
        ChannelModel c{100, 50, 0.0};
        ChannelSampler s(c, seed);
        for (int i = 0; i < 1000; ++i) CHECK_FALSE(s.next().dropped);
    }
    SUBCASE("zero jitter gives exactly the base delay") {
        ChannelModel c{450, 0, 0.0};
        ChannelSampler s(c, seed);
        for (int i = 0; i < 100; ++i) CHECK(s.next().delay_ns == 450000);
    }
    SUBCASE("delays stay inside [base - jitter, base + jitter]") {
        ChannelModel c{450, 170, 0.0};
        ChannelSampler s(c, seed);
        for (int i = 0; i < 10000; ++i) {
            auto f = s.next();
            CHECK(f.delay_ns >= 280000);
            CHECK(f.delay_ns <= 620000);
        }
    }
    SUBCASE("negative draws clamp to zero") {
        ChannelModel c{10, 170, 0.0};
        ChannelSampler s(c, seed);
        bool clamped = false;
        for (int i = 0; i < 1000; ++i) {
            auto f = s.next();
            CHECK(f.delay_ns >= 0);
            clamped = clamped || f.delay_ns == 0;
        }
        CHECK(clamped);
    }
    SUBCASE("half loss over 10,000 packets lands in the binomial interval") {
        ChannelModel c{0, 0, 0.5};
        ChannelSampler s(c, seed);
        int delivered = 0;
        for (int i = 0; i < 10000; ++i) delivered += s.next().dropped ? 0 : 1;
        CHECK(delivered >= 4700);
        CHECK(delivered <= 5300);
    }
    SUBCASE("identical seeds replay the identical fate sequence") {
        ChannelModel c{450, 170, 0.3};
        ChannelSampler a(c, seed), b(c, seed);
        for (int i = 0; i < 1000; ++i) {
            auto fa = a.next(), fb = b.next();
            CHECK(fa.dropped == fb.dropped);
            CHECK(fa.delay_ns == fb.delay_ns);
        }
        ChannelSampler other(c, Bytes(32, 0x12));
        int differing = 0;
        ChannelSampler a2(c, seed);
        for (int i = 0; i < 1000; ++i)
            differing += a2.next().delay_ns != other.next().delay_ns ? 1 : 0;
        CHECK(differing > 900);
    }
}

TEST_CASE("trace files round-trip through write and read") {
    PacketTrace t;
    t.kem = "toy-lwe";
    t.encr = "AES-192";
    t.integ = "SHA-384";
    t.handshake_ms = 1.25;
    t.handshake_bytes = 9001;
    t.mem_bytes_peak = 123456;
    t.rss_bytes = 7 * 1024 * 1024;
    t.records.push_back({1, 0, 452125, 240, 3.75});
    t.records.push_back({2, 100000, kLostRecv, 240, 2.5});
    t.records.push_back({3, 200000, 641000, 240, 4.125});

    const std::string path = temp_path("trace");
    write_trace(path, t);
    PacketTrace r = read_trace(path);
    CHECK(r.kem == t.kem);
    CHECK(r.encr == t.encr);
    CHECK(r.integ == t.integ);
    CHECK(r.handshake_ms == t.handshake_ms);
    CHECK(r.handshake_bytes == t.handshake_bytes);
    CHECK(r.mem_bytes_peak == t.mem_bytes_peak);
    CHECK(r.rss_bytes == t.rss_bytes);
    REQUIRE(r.records.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(r.records[i].seq == t.records[i].seq);
        CHECK(r.records[i].send_ns == t.records[i].send_ns);
        CHECK(r.records[i].recv_ns == t.records[i].recv_ns);
        CHECK(r.records[i].wire_len == t.records[i].wire_len);
        CHECK(r.records[i].enc_time_us == t.records[i].enc_time_us);
    }
    CHECK(r.delivered_count() == 2);
    std::remove(path.c_str());
}

TEST_CASE("malformed trace files are rejected with the offending line") {
    const std::string path = temp_path("badtrace");
    auto write_file = [&](const char* text) {
        FILE* f = fopen(path.c_str(), "w");
        REQUIRE(f != nullptr);
        fputs(text, f);
        fclose(f);
    };
    write_file("# kem=none\n1 0 100\n");  // too few fields
    CHECK_THROWS_AS(read_trace(path), Error);
    write_file("# bogus_key=1\n");
    CHECK_THROWS_AS(read_trace(path), Error);
    write_file("# kem none\n");  // missing '='
    CHECK_THROWS_AS(read_trace(path), Error);
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_trace(path), Error);  // absent file
}

TEST_CASE("sequence-tagged payloads are deterministic and seq-distinct") {
    CHECK(session_payload(7, 200) == session_payload(7, 200));
    CHECK(session_payload(7, 200) != session_payload(8, 200));
    Bytes p = session_payload(0x0102030405060708ull, 12);
    CHECK(p[0] == 0x01);
    CHECK(p[7] == 0x08);
    CHECK(session_payload(3, 4).size() == 4);  // below the 8-byte tag still works
}

TEST_CASE("session specs validate their inputs") {
    SessionSpec spec = small_spec();
    CHECK_NOTHROW(spec.validate());
    spec.kem = "no-such-kem";
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = small_spec();
    spec.registry = nullptr;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = small_spec();
    spec.seed.pop_back();
    CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("a lossless in-process session delivers every packet intact") {
    SessionSpec spec = small_spec();
    PacketTrace t = run_session(spec);
    REQUIRE(t.records.size() == 2000);
    CHECK(t.delivered_count() == 2000);
    CHECK(t.kem == "none");
    CHECK(t.encr == "AES-128");
    CHECK(t.integ == "SHA-256");
    CHECK(t.handshake_bytes > 0);
    CHECK(t.handshake_ms > 0);
    int64_t prev_send = -1;
    for (const auto& r : t.records) {
        CHECK(r.send_ns > prev_send);
        prev_send = r.send_ns;
        CHECK(r.recv_ns >= r.send_ns);
        CHECK(r.wire_len == 200 + kEspOverhead);
        CHECK(r.enc_time_us >= 0);
    }
    CHECK(t.records.front().seq == 1);
    CHECK(t.records.back().seq == 2000);
}

TEST_CASE("injected constant delay shows up exactly in the virtual clock") {
    SessionSpec spec = small_spec();
    spec.channel.base_delay_us = 500;
    PacketTrace t = run_session(spec);
    CHECK(t.delivered_count() == 2000);
    for (const auto& r : t.records) CHECK(r.recv_ns - r.send_ns == 500000);
}

TEST_CASE("seeded loss reproduces the identical delivery pattern") {
    SessionSpec spec = small_spec();
    spec.channel.loss_rate = 0.3;
    spec.channel.base_delay_us = 450;
    spec.channel.delay_jitter_us = 170;
    PacketTrace a = run_session(spec);
    PacketTrace b = run_session(spec);
    REQUIRE(a.records.size() == b.records.size());
    uint64_t delivered = a.delivered_count();
    CHECK(delivered > 1200);
    CHECK(delivered < 1600);  // 0.3 loss on 2,000: binomial-safe bounds
    for (size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].seq == b.records[i].seq);
        CHECK(a.records[i].send_ns == b.records[i].send_ns);
        CHECK(a.records[i].recv_ns == b.records[i].recv_ns);  // virtual clock
        CHECK(a.records[i].wire_len == b.records[i].wire_len);
    }
    CHECK(a.handshake_bytes == b.handshake_bytes);
    CHECK(a.mem_bytes_peak == b.mem_bytes_peak);
}

TEST_CASE("hybrid sessions carry exactly the advertised extra handshake bytes") {
    PacketTrace plain = run_session(small_spec());
    PacketTrace hybrid = run_session(small_spec("toy-lwe"));
    const KemProvider& kem = registry().find("toy-lwe");
    // Extra bytes: the intermediate-supported notify in both SA_INIT messages,
    // one INTERMEDIATE request/response pair framing the public key and
    // ciphertext, and the suite name in both proposal lists.
    const uint64_t expected =
        2 * (kPayloadHeaderLen + 2) +
        (2 * kMessageHeaderLen + 2 * kPayloadHeaderLen + kem.params().public_key_len +
         kem.params().ciphertext_len) +
        2 * (1 + std::string("toy-lwe").size());
    CHECK(hybrid.handshake_bytes - plain.handshake_bytes == expected);
}

TEST_CASE("the memory ledger grows with the KEM and not with traffic") {
    PacketTrace plain = run_session(small_spec());
    PacketTrace hybrid = run_session(small_spec("toy-lwe"));
    CHECK(hybrid.mem_bytes_peak > plain.mem_bytes_peak);

    SessionSpec tiny = small_spec();
    tiny.profile.rate_pps = 50;
    tiny.profile.duration_s = 0.004;  // rounds to zero packets
    PacketTrace empty = run_session(tiny);
    CHECK(empty.records.empty());
    CHECK(empty.mem_bytes_peak == plain.mem_bytes_peak);  // tunnel phase adds nothing
    CHECK(plain.rss_bytes > 0);  // the OS probe exists on this platform
}

TEST_CASE("tunnel SPIs are direction-distinct and avoid the control magic") {
    KeySchedule ks;
    ks.sk_d = Bytes(32, 0xab);
    CHECK(forward_spi(ks) != reverse_spi(ks));
    CHECK(forward_spi(ks) != kUdpControlMagic);
    CHECK(reverse_spi(ks) != kUdpControlMagic);
    KeySchedule other;
    other.sk_d = Bytes(32, 0xac);
    CHECK(forward_spi(ks) != forward_spi(other));
}

TEST_CASE("the UDP loopback transport delivers the same session shape") {
    SessionSpec spec = small_spec();
    spec.transport = Transport::udp_loopback;
    spec.profile.packet_size = 300;
    spec.profile.rate_pps = 2000;
    spec.profile.duration_s = 0.1;  // 200 packets
    PacketTrace t = run_session(spec);
    REQUIRE(t.records.size() == 200);
    CHECK(t.delivered_count() == 200);  // loopback, no loss injected
    int64_t prev_send = -1;
    for (const auto& r : t.records) {
        CHECK(r.send_ns > prev_send);
        prev_send = r.send_ns;
        CHECK(r.recv_ns >= r.send_ns);
        CHECK(r.recv_ns - r.send_ns < 50'000'000);  // loopback sanity ceiling
        CHECK(r.wire_len == 300 + kEspOverhead);
    }

    // The handshake is byte-deterministic, so both transports account the
    // same number of handshake bytes for the same seed.
    SessionSpec in_proc = spec;
    in_proc.transport = Transport::in_process;
    PacketTrace reference = run_session(in_proc);
    CHECK(t.handshake_bytes == reference.handshake_bytes);
}

TEST_CASE("a DU with no RU gives up after three attempts") {
    SessionSpec spec = small_spec();
    const int64_t t0 = steady_now_ns();
    try {
        run_du_udp(spec, parse_endpoint("127.0.0.1:9"));  // discard port: nobody home
        FAIL("handshake must time out");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::handshake_failed);
    }
    const double elapsed_s = static_cast<double>(steady_now_ns() - t0) / 1e9;
    CHECK(elapsed_s > 2.5);
    CHECK(elapsed_s < 10.0);
}

TEST_CASE("endpoint strings parse or fail loudly") {
    sockaddr_in a = parse_endpoint("127.0.0.1:9000");
    CHECK(ntohs(a.sin_port) == 9000);
    CHECK_THROWS_AS(parse_endpoint("127.0.0.1"), Error);
    CHECK_THROWS_AS(parse_endpoint("127.0.0.1:0"), Error);
    CHECK_THROWS_AS(parse_endpoint("127.0.0.1:99999"), Error);
    CHECK_THROWS_AS(parse_endpoint("not-an-ip:123"), Error);
    CHECK_THROWS_AS(parse_endpoint("::1:123"), Error);
}
