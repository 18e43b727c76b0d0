// Copyright 2026 The MaestroCut Authors
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

#include <maestrocut/aead.hpp>
#include <maestrocut/errors.hpp>
#include <maestrocut/phasepad.hpp>
#include <maestrocut/rng.hpp>

#include <maestrocut_tools/oracles.hpp>

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace maestrocut;
using namespace maestrocut::phasepad;

namespace {

Bytes from_hex(const std::string &hex) {
    Bytes out;
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        out.push_back(static_cast<Byte>(std::stoi(hex.substr(i, 2), nullptr, 16)));
    }
    return out;
}

std::string to_hex(std::span<const Byte> bytes) {
    std::ostringstream out;
    for (const Byte b : bytes) {
        out << "0123456789abcdef"[b >> 4U] << "0123456789abcdef"[b & 0xfU];
    }
    return out.str();
}

// The documented keystream construction, computed directly with OpenSSL.
Bytes reference_keystream(const FragmentKey &key, std::size_t length) {
    Bytes material = {'m', 'a', 'e', 's', 't', 'r', 'o', 'c', 'u', 't', '-', 'p',
                      'h', 'a', 's', 'e', 'p', 'a', 'd', '-', 'v', '1'};
    for (int i = 0; i < 4; ++i) {
        material.push_back(static_cast<Byte>(static_cast<unsigned>(key.bits) >> (8 * i)));
    }
    material.insert(material.end(), key.bytes.begin(), key.bytes.end());
    Byte digest[SHA256_DIGEST_LENGTH];
    SHA256(material.data(), material.size(), digest);
    Byte iv[16] = {};
    Bytes zeros(length, 0);
    Bytes out(length);
    EVP_CIPHER_CTX *ctx = EVP_CIPHER_CTX_new();
    int len = 0;
    EVP_EncryptInit_ex(ctx, EVP_aes_128_ctr(), nullptr, digest, iv);
    EVP_EncryptUpdate(ctx, out.data(), &len, zeros.data(), static_cast<int>(length));
    EVP_CIPHER_CTX_free(ctx);
    return out;
}

std::vector<Fragment> fragments(std::size_t n, Rng &rng) {
    std::vector<Fragment> out;
    for (std::size_t i = 0; i < n; ++i) {
        Fragment f;
        f.id = static_cast<std::uint32_t>(i);
        f.payload.resize(32 + rng.uniform_int(64));
        for (auto &b : f.payload) {
            b = static_cast<Byte>(rng.uniform_int(256));
        }
        f.header = {static_cast<Byte>(i), 1, 2, 3};
        f.shots = 100 + static_cast<std::int64_t>(rng.uniform_int(1000));
        out.push_back(std::move(f));
    }
    return out;
}

} // namespace

TEST(Polyval, RfcVector) {
    aead::Block h{};
    const auto hb = from_hex("25629347589242761d31f826ba4b757b");
    std::copy(hb.begin(), hb.end(), h.begin());
    const auto x = from_hex("4f4f95668c83dfb6401762bb2d01a262d1a24ddd2721d006bbe45f20d3c9f362");
    EXPECT_EQ(to_hex(aead::polyval(h, x)), "f7a3b47b846119fae5b7866cf5e5b77e");
    EXPECT_EQ(to_hex(aead::polyval_portable(h, x)), "f7a3b47b846119fae5b7866cf5e5b77e");
}

TEST(Polyval, AcceleratedMatchesPortable) {
    Rng rng = master_stream(31);
    for (int trial = 0; trial < 200; ++trial) {
        aead::Block h{};
        for (auto &b : h) {
            b = static_cast<Byte>(rng.uniform_int(256));
        }
        Bytes data(16 * (1 + rng.uniform_int(8)));
        for (auto &b : data) {
            b = static_cast<Byte>(rng.uniform_int(256));
        }
        EXPECT_EQ(aead::polyval(h, data), aead::polyval_portable(h, data));
    }
}

TEST(Aead, RfcEmptyPlaintext) {
    Bytes key(32, 0);
    Bytes nonce(12, 0);
    key[0] = 1;
    nonce[0] = 3;
    EXPECT_EQ(to_hex(aead::seal(key, nonce, {})), "07f5f4169bbf55a8400cd47ea6fd400f");
}

TEST(Aead, FrozenVectorWithAad) {
    Bytes key(32, 0);
    Bytes nonce(12, 0);
    key[0] = 1;
    nonce[0] = 3;
    Bytes pt;
    for (int i = 0; i < 40; ++i) {
        pt.push_back(static_cast<Byte>((i * 7 + 1) & 255));
    }
    const Bytes aad = {1, 2, 3};
    const auto sealed = aead::seal(key, nonce, pt, aad);
    EXPECT_EQ(to_hex(sealed),
              "a6eab97f672453748ea82a8c45a518136eebdcb88828679dda06f021c9105ed3973252e0f2bac502"
              "f42275acc52a8068ebb59cff61578ee4");
    EXPECT_EQ(aead::open(key, nonce, sealed, aad), pt);
    const Bytes other_aad = {1, 2, 4};
    EXPECT_THROW((void)aead::open(key, nonce, sealed, other_aad), AuthenticationError);
}

TEST(Keygen, CeilingOfHalfLambda) {
    Rng rng = master_stream(32);
    EXPECT_EQ(keygen({128, 0.02, 0.1}, rng).bits, 64);
    const auto k7 = keygen({7, 0.02, 0.1}, rng);
    EXPECT_EQ(k7.bits, 4);
    EXPECT_EQ(k7.bytes.size(), 1U);
    EXPECT_EQ(k7.bytes[0] & 0xf0U, 0U);
    Rng a = master_stream(9).child("k");
    Rng b = master_stream(9).child("k");
    Rng c = master_stream(9).child("other");
    const SecurityParams p;
    const auto ka = keygen(p, a);
    EXPECT_EQ(ka.bytes, keygen(p, b).bytes);
    EXPECT_NE(ka.bytes, keygen(p, c).bytes);
}

TEST(Mask, MatchesReferenceXor) {
    const FragmentKey key{64, from_hex("0123456789abcdef")};
    const Bytes payload = {0xDE, 0xAD, 0xBE, 0xEF};
    const auto ks = reference_keystream(key, payload.size());
    Bytes want(payload.size());
    for (std::size_t i = 0; i < payload.size(); ++i) {
        want[i] = payload[i] ^ ks[i];
    }
    EXPECT_EQ(mask_payload(payload, key), want);
    EXPECT_EQ(mask_payload(mask_payload(payload, key), key), payload);
    EXPECT_THROW((void)keystream(FragmentKey{}, 4), DomainError);
}

TEST(Envelope, FixedSizeAndTamperRejection) {
    Rng rng = master_stream(33);
    Bytes hk(32);
    for (auto &b : hk) {
        b = static_cast<Byte>(rng.uniform_int(256));
    }
    NonceSource nonces(rng);
    const Bytes short_header = {1};
    const Bytes long_header(200, 7);
    const auto a = seal_header(short_header, hk, nonces.next());
    const auto b = seal_header(long_header, hk, nonces.next());
    EXPECT_EQ(a.size(), kEnvelopeSize);
    EXPECT_EQ(b.size(), kEnvelopeSize);
    EXPECT_EQ(open_header(b, hk), long_header);
    for (int t = 0; t < 256; ++t) {
        auto bad = a;
        const auto bit = rng.uniform_int(bad.size() * 8);
        bad[bit / 8] ^= static_cast<Byte>(1U << (bit % 8));
        EXPECT_THROW((void)open_header(bad, hk), AuthenticationError);
    }
    const Bytes too_long(kHeaderCap + 1, 0);
    EXPECT_THROW((void)seal_header(too_long, hk, nonces.next()), DomainError);
}

TEST(Decoys, FloorOfEtaN) {
    EXPECT_EQ(decoy_count({128, 0.02, 0.1}, 100), 2U);
    EXPECT_EQ(decoy_count({128, 0.02, 0.1}, 10), 0U);
    EXPECT_EQ(pad_shots(1), 64);
    EXPECT_EQ(pad_shots(128), 128);
}

TEST(Dispatch, HonestRoundTripAccepts) {
    Rng rng = master_stream(34);
    const SecurityParams p;
    const auto frags = fragments(100, rng);
    auto batch = dispatch(frags, p, 7, rng);
    EXPECT_EQ(batch.envelopes.size(), 102U);
    EXPECT_EQ(batch.records.decoys, 2U);
    for (const auto &e : batch.envelopes) {
        EXPECT_EQ(e.shots % kShotQuantum, 0);
        EXPECT_EQ(e.sealed_header.size(), kEnvelopeSize);
    }
    AuditLog audit;
    const auto replies = echo_backend(batch.envelopes);
    const auto report = verify_and_recover(replies, p, batch.records, audit, 1);
    EXPECT_EQ(report.decision, Decision::Accept);
    EXPECT_DOUBLE_EQ(report.decoy_pass_rate, 1.0);
    ASSERT_EQ(report.recovered.size(), 100U);
    for (const auto &f : frags) {
        EXPECT_EQ(report.recovered.at(f.id), f.payload);
    }
    EXPECT_TRUE(audit.events().empty());
}

TEST(Dispatch, CorruptedDecoysAbortAndRotate) {
    Rng rng = master_stream(35);
    const SecurityParams p{128, 0.05, 0.1};
    auto batch = dispatch(fragments(100, rng), p, 3, rng);
    auto replies = echo_backend(batch.envelopes);
    for (auto &r : replies) {
        if (batch.records.by_id.at(r.fragment_id).is_decoy) {
            r.payload[0] ^= 1U;
        }
    }
    AuditLog audit;
    const auto report = verify_and_recover(replies, p, batch.records, audit, 11);
    EXPECT_EQ(report.decision, Decision::Abort);
    EXPECT_TRUE(batch.records.keys_rotated);
    ASSERT_EQ(audit.events().size(), 1U);
    EXPECT_EQ(audit.events()[0].batch_id, 3U);
    EXPECT_EQ(audit.events()[0].seed, 11U);
    EXPECT_EQ(audit.events()[0].content_hash.size(), 64U);
    std::ostringstream jsonl;
    audit.write_jsonl(jsonl);
    EXPECT_NE(jsonl.str().find("\"cause\""), std::string::npos);
}

TEST(Dispatch, TamperedHeaderIsRejectedAndCounted) {
    Rng rng = master_stream(36);
    const SecurityParams p;
    auto batch = dispatch(fragments(99, rng), p, 4, rng);
    auto replies = echo_backend(batch.envelopes);
    std::size_t victim = 0;
    while (batch.records.by_id.at(replies[victim].fragment_id).is_decoy) {
        ++victim;
    }
    replies[victim].sealed_header[40] ^= 0x10U;
    AuditLog audit;
    const auto report = verify_and_recover(replies, p, batch.records, audit, 1);
    EXPECT_EQ(report.envelopes_rejected, 1U);
    EXPECT_EQ(report.recovered.size(), 98U);
    EXPECT_EQ(report.decision, Decision::Accept);
}

TEST(Dispatch, UnknownFragmentIsAProtocolError) {
    Rng rng = master_stream(37);
    const SecurityParams p;
    auto batch = dispatch(fragments(5, rng), p, 1, rng);
    auto replies = echo_backend(batch.envelopes);
    replies[0].fragment_id = 9999;
    AuditLog audit;
    EXPECT_THROW((void)verify_and_recover(replies, p, batch.records, audit, 1), ProtocolError);
}

TEST(Bounds, DetectionAndAcceptIncorrect) {
    EXPECT_EQ(detection_lower_bound(100, 2, 0), 0.0);
    EXPECT_EQ(detection_lower_bound(50, 50, 3), 1.0);
    EXPECT_NEAR(detection_lower_bound(100, 2, 10), 1.0 - std::pow(0.98, 10), 1e-15);
    EXPECT_NEAR(detection_lower_bound(100, 2, 10), 0.1829, 1e-4);
    Rng rng = master_stream(38);
    const double mc = oracle::simulate_detection(100, 2, 10, 20000, rng);
    EXPECT_GE(mc, detection_lower_bound(100, 2, 10) - 3.0 * std::sqrt(mc * (1 - mc) / 20000.0));

    EXPECT_EQ(accept_incorrect_bound(0, 0.1), 1.0);
    EXPECT_EQ(accept_incorrect_bound(100, 0.0), 1.0);
    EXPECT_NEAR(accept_incorrect_bound(200, 0.1), std::exp(-4.0), 1e-15);
}

TEST(Sha256, KnownDigest) {
    const Bytes abc = {'a', 'b', 'c'};
    EXPECT_EQ(sha256_hex(abc), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
