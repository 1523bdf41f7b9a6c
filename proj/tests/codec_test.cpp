#include <gtest/gtest.h>

#include "generators.hpp"
#include "oli/codec.hpp"
#include "oli/error.hpp"

using namespace oli;
using comm::Message;

namespace {

std::vector<std::uint8_t> frame_of(const std::string& body) {
    std::vector<std::uint8_t> f = {'M', 'O', 'P', '1'};
    auto n = static_cast<std::uint32_t>(body.size());
    for (int shift = 24; shift >= 0; shift -= 8) f.push_back(static_cast<std::uint8_t>(n >> shift));
    f.insert(f.end(), body.begin(), body.end());
    return f;
}

std::string body_of(const std::vector<std::uint8_t>& frame) {
    return std::string(frame.begin() + comm::kFrameHeaderSize, frame.end());
}

Message ping() {
    Message m;
    m.operation = "ping";
    return m;
}

} // namespace

TEST(Codec, MinimalMessageIsBitExact) {
    EXPECT_EQ(comm::encode_message(ping()), frame_of(R"({"op":"ping","res":"/","val":{"$":null}})"));
    EXPECT_EQ(comm::decode_message(frame_of(R"({"op":"ping","res":"/","val":{"$":null}})")), ping());
}

TEST(Codec, CustomerRequestEncodesChildrenAsArrays) {
    Message m;
    m.operation = "get_car";
    m.payload.add_child("name", ValueTree(std::string("John Smith")));
    m.payload.add_child("age", ValueTree(std::int32_t{32}));
    m.payload.add_child("license", ValueTree(std::string("l23454675")));
    auto frame = comm::encode_message(m);
    EXPECT_EQ(body_of(frame),
              R"({"op":"get_car","res":"/","val":{"$":null,"age":[{"$":{"i":32}}],"license":[{"$":"l23454675"}],)"
              R"("name":[{"$":"John Smith"}]}})");
    Message back = comm::decode_message(frame);
    EXPECT_EQ(back, m);
    EXPECT_EQ(std::get<std::string>(back.payload.find_child("name")->root()), "John Smith");
}

TEST(Codec, TaggedRootsAndFaults) {
    Message m;
    m.operation = "op";
    m.fault = "TypeMismatch";
    m.payload = ValueTree(std::int64_t{5});
    m.payload.add_child("d", ValueTree(0.5));
    m.payload.add_child("b", ValueTree(Bytes{0xde, 0xad}));
    m.payload.add_child("t", ValueTree(true));
    EXPECT_EQ(body_of(comm::encode_message(m)),
              R"({"fault":"TypeMismatch","op":"op","res":"/","val":{"$":{"l":5},"b":[{"$":{"b":"3q0="}}],)"
              R"("d":[{"$":{"d":0.5}}],"t":[{"$":true}]}})");
}

TEST(Codec, EncodeRejectsWhatHasNoWireForm) {
    Message m = ping();
    m.payload = ValueTree(std::numeric_limits<double>::infinity());
    EXPECT_THROW(comm::encode_message(m), EncodeError);
    m.payload = ValueTree(std::string("\xff\xfe"));
    EXPECT_THROW(comm::encode_message(m), EncodeError);
    EXPECT_THROW(comm::encode_message(Message{}), EncodeError);
}

TEST(Codec, DecodeRejectsMalformedFrames) {
    auto good = comm::encode_message(ping());
    auto bad_magic = good;
    bad_magic[0] = 'X';
    EXPECT_THROW(comm::decode_message(bad_magic), DecodeError);
    EXPECT_THROW(comm::decode_message(std::vector<std::uint8_t>(good.begin(), good.begin() + 5)), DecodeError);

    std::vector<std::uint8_t> huge = {'M', 'O', 'P', '1', 0x01, 0x00, 0x00, 0x01};
    EXPECT_THROW(comm::decode_message(huge), DecodeError) << "16 MiB + 1";

    for (const char* body : {
             R"({"op":"x","res":"/"})",
             R"({"op":"","res":"/","val":{"$":null}})",
             R"({"op":"x","res":"/","val":{"$":{"q":1}}})",
             R"({"op":"x","res":"/","val":{"$":{"i":2147483648}}})",
             R"({"op":"x","res":"/","val":{"$":{"i":1.5}}})",
             R"({"op":"x","res":"/","val":{"$":null,"a":[]}})",
             R"({"op":"x","res":"/","val":{"$":null,"a":{"$":null}}})",
             R"({"op":"x","res":"/","val":{"a":[{"$":null}]}})",
             R"({"op":"x","res":"/","val":{"$":{"b":"!!"}}})",
             R"({"op":"x","res":"/","val":{"$":null},"extra":1})",
             R"({"op":"x","res":"/","val":{"$":null})",
             R"([1,2])",
         })
        EXPECT_THROW(comm::decode_message(frame_of(body)), DecodeError) << body;
}

TEST(Codec, MutatedLengthFieldAlwaysFails) {
    testgen::Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        auto frame = comm::encode_message(testgen::random_message(rng));
        std::uint32_t n = static_cast<std::uint32_t>(frame.size() - comm::kFrameHeaderSize);
        for (std::uint32_t wrong : {n - 1, n + 1, n / 2, n * 2, 0u, 0xFFFFFFFFu}) {
            if (wrong == n) continue;
            auto copy = frame;
            for (int k = 0; k < 4; ++k) copy[4 + k] = static_cast<std::uint8_t>(wrong >> (24 - 8 * k));
            EXPECT_THROW(comm::decode_message(copy), DecodeError) << "length " << wrong << " for body " << n;
        }
    }
}

TEST(CodecProperty, RoundTrip) {
    testgen::Rng rng(1);
    for (int i = 0; i < 3000; ++i) {
        Message m = testgen::random_message(rng);
        auto frame = comm::encode_message(m);
        ASSERT_EQ(comm::decode_message(frame), m);
        ASSERT_EQ(comm::encode_message(comm::decode_message(frame)), frame) << "deterministic";
    }
}

TEST(CodecProperty, ConcatenatedFramesSplitInOrder) {
    testgen::Rng rng(2);
    std::vector<Message> sent;
    std::vector<std::uint8_t> stream;
    for (int i = 0; i < 100; ++i) {
        sent.push_back(testgen::random_message(rng));
        auto f = comm::encode_message(sent.back());
        stream.insert(stream.end(), f.begin(), f.end());
    }
    // Feed in irregular chunks.
    comm::FrameReader reader;
    std::vector<Message> got;
    std::size_t pos = 0;
    std::uniform_int_distribution<std::size_t> chunk(1, 97);
    while (pos < stream.size()) {
        std::size_t n = std::min(chunk(rng), stream.size() - pos);
        reader.feed(std::span(stream.data() + pos, n));
        pos += n;
        while (auto m = reader.next()) got.push_back(std::move(*m));
    }
    EXPECT_EQ(reader.buffered(), 0u);
    EXPECT_EQ(got, sent);
}

TEST(Codec, ValueNodesRoundTripAsText) {
    ValueTree v(std::string("root"));
    v.add_child("k", ValueTree(std::int32_t{1}));
    EXPECT_EQ(comm::encode_value(v), R"({"$":"root","k":[{"$":{"i":1}}]})");
    EXPECT_EQ(comm::decode_value(comm::encode_value(v)), v);
}
