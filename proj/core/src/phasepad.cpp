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

#include "maestrocut/phasepad.hpp"

#include "maestrocut/errors.hpp"
#include "maestrocut/stats.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <openssl/sha.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <string_view>

namespace maestrocut::phasepad {

namespace {

constexpr std::string_view kKeystreamLabel = "maestrocut-phasepad-v1";

std::array<Byte, 4> le32(std::uint32_t v) {
    return {static_cast<Byte>(v), static_cast<Byte>(v >> 8U), static_cast<Byte>(v >> 16U),
            static_cast<Byte>(v >> 24U)};
}

Bytes random_bytes(Rng &rng, std::size_t n) {
    Bytes out(n);
    for (std::size_t i = 0; i < n; i += 8) {
        const auto word = rng();
        for (std::size_t j = 0; j < 8 && i + j < n; ++j) {
            out[i + j] = static_cast<Byte>(word >> (8U * j));
        }
    }
    return out;
}

struct CipherDeleter {
    void operator()(EVP_CIPHER_CTX *ctx) const { EVP_CIPHER_CTX_free(ctx); }
};

} // namespace

void SecurityParams::validate() const {
    if (lambda < 1) {
        throw ConfigurationError("security parameter must be positive");
    }
    if (!(eta >= 0.0 && eta < 1.0)) {
        throw ConfigurationError("decoy rate must lie in [0, 1)");
    }
    if (!(eps_ver > 0.0 && eps_ver < 1.0)) {
        throw ConfigurationError("verification threshold must lie in (0, 1)");
    }
}

FragmentKey keygen(const SecurityParams &params, Rng &rng) {
    params.validate();
    FragmentKey key;
    key.bits = params.key_bits();
    key.bytes = random_bytes(rng, (static_cast<std::size_t>(key.bits) + 7) / 8);
    if (const int spare = key.bits % 8; spare != 0) {
        key.bytes.back() &= static_cast<Byte>((1U << static_cast<unsigned>(spare)) - 1U);
    }
    return key;
}

Bytes keystream(const FragmentKey &key, std::size_t length) {
    if (key.bits <= 0 || key.bytes.empty()) {
        throw DomainError("mask key must be non-empty");
    }
    Bytes seed_input(kKeystreamLabel.begin(), kKeystreamLabel.end());
    const auto bits = le32(static_cast<std::uint32_t>(key.bits));
    seed_input.insert(seed_input.end(), bits.begin(), bits.end());
    seed_input.insert(seed_input.end(), key.bytes.begin(), key.bytes.end());
    std::array<Byte, SHA256_DIGEST_LENGTH> digest{};
    SHA256(seed_input.data(), seed_input.size(), digest.data());

    Bytes out(length, 0);
    if (length == 0) {
        return out;
    }
    const std::array<Byte, 16> iv{};
    std::unique_ptr<EVP_CIPHER_CTX, CipherDeleter> ctx(EVP_CIPHER_CTX_new());
    int len = 0;
    if (!ctx ||
        EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_ctr(), nullptr, digest.data(), iv.data()) != 1 ||
        EVP_EncryptUpdate(ctx.get(), out.data(), &len, out.data(), static_cast<int>(length)) !=
            1) {
        throw NumericError("keystream expansion failed");
    }
    return out;
}

Bytes mask_payload(std::span<const Byte> payload, const FragmentKey &key) {
    Bytes out = keystream(key, payload.size());
    for (std::size_t i = 0; i < payload.size(); ++i) {
        out[i] ^= payload[i];
    }
    return out;
}

NonceSource::NonceSource(Rng &rng) {
    const auto word = rng();
    for (std::size_t i = 0; i < prefix_.size(); ++i) {
        prefix_[i] = static_cast<Byte>(word >> (8U * i));
    }
}

std::array<Byte, aead::kNonceSize> NonceSource::next() {
    std::array<Byte, aead::kNonceSize> nonce{};
    std::copy(prefix_.begin(), prefix_.end(), nonce.begin());
    for (std::size_t i = 0; i < 8; ++i) {
        nonce[4 + i] = static_cast<Byte>(counter_ >> (8U * i));
    }
    ++counter_;
    return nonce;
}

namespace {

Bytes seal_with_aad(std::span<const Byte> header, std::span<const Byte> header_key,
                    const std::array<Byte, aead::kNonceSize> &nonce, std::span<const Byte> aad) {
    if (header.size() > kHeaderCap) {
        throw DomainError("header of " + std::to_string(header.size()) + " bytes exceeds the " +
                          std::to_string(kHeaderCap) + "-byte cap");
    }
    Bytes plain(4 + kHeaderCap, 0);
    const auto len = le32(static_cast<std::uint32_t>(header.size()));
    std::copy(len.begin(), len.end(), plain.begin());
    std::copy(header.begin(), header.end(), plain.begin() + 4);
    const Bytes sealed = aead::seal(header_key, nonce, plain, aad);
    Bytes out(nonce.begin(), nonce.end());
    out.insert(out.end(), sealed.begin(), sealed.end());
    return out;
}

Bytes open_with_aad(std::span<const Byte> sealed, std::span<const Byte> header_key,
                    std::span<const Byte> aad) {
    if (sealed.size() != kEnvelopeSize) {
        throw AuthenticationError("envelope has the wrong size");
    }
    const Bytes plain =
        aead::open(header_key, sealed.first(aead::kNonceSize), sealed.subspan(aead::kNonceSize),
                   aad);
    std::uint32_t len = 0;
    for (int i = 3; i >= 0; --i) {
        len = (len << 8U) | plain[static_cast<std::size_t>(i)];
    }
    if (len > kHeaderCap) {
        throw AuthenticationError("envelope length field out of range");
    }
    return {plain.begin() + 4, plain.begin() + 4 + len};
}

} // namespace

Bytes seal_header(std::span<const Byte> header, std::span<const Byte> header_key,
                  const std::array<Byte, aead::kNonceSize> &nonce) {
    return seal_with_aad(header, header_key, nonce, {});
}

Bytes open_header(std::span<const Byte> sealed, std::span<const Byte> header_key) {
    return open_with_aad(sealed, header_key, {});
}

std::size_t decoy_count(const SecurityParams &params, std::size_t fragments) {
    params.validate();
    return static_cast<std::size_t>(std::floor(params.eta * static_cast<double>(fragments)));
}

std::int64_t pad_shots(std::int64_t shots) {
    if (shots < 0) {
        throw DomainError("shot counts must be nonnegative");
    }
    return (shots + kShotQuantum - 1) / kShotQuantum * kShotQuantum;
}

Batch dispatch(std::span<const Fragment> fragments, const SecurityParams &params,
               std::uint64_t batch_id, Rng &rng) {
    if (fragments.empty()) {
        throw DomainError("cannot dispatch an empty batch");
    }
    params.validate();
    Batch batch;
    auto &records = batch.records;
    records.batch_id = batch_id;
    records.header_key = random_bytes(rng, aead::kKeySize);
    NonceSource nonces(rng);

    std::uint32_t max_id = 0;
    std::vector<double> padded;
    for (const auto &f : fragments) {
        max_id = std::max(max_id, f.id);
        padded.push_back(static_cast<double>(pad_shots(f.shots)));
    }
    const auto decoy_shots = pad_shots(static_cast<std::int64_t>(std::llround(stats::median(padded))));

    auto add = [&](std::uint32_t id, std::span<const Byte> payload, std::span<const Byte> header,
                   std::int64_t shots, bool is_decoy) {
        if (records.by_id.contains(id)) {
            throw ProtocolError("duplicate fragment id " + std::to_string(id));
        }
        ClientRecord rec{keygen(params, rng), is_decoy, {}, shots};
        Envelope env;
        env.fragment_id = id;
        const auto aad = le32(id);
        env.sealed_header = seal_with_aad(header, records.header_key, nonces.next(), aad);
        env.masked_payload = mask_payload(payload, rec.key);
        env.shots = pad_shots(shots);
        if (is_decoy) {
            rec.expected = env.masked_payload;
        }
        records.by_id.emplace(id, std::move(rec));
        batch.envelopes.push_back(std::move(env));
    };

    for (const auto &f : fragments) {
        add(f.id, f.payload, f.header, f.shots, false);
    }
    const std::size_t h = decoy_count(params, fragments.size());
    records.decoys = h;
    const std::size_t payload_size = fragments.front().payload.size();
    for (std::size_t j = 0; j < h; ++j) {
        const auto id = static_cast<std::uint32_t>(max_id + 1 + j);
        const Bytes payload = random_bytes(rng, payload_size);
        const std::string header = "fragment " + std::to_string(id);
        add(id, payload, std::span(reinterpret_cast<const Byte *>(header.data()), header.size()),
            decoy_shots, true);
    }
    rng.shuffle(std::span(batch.envelopes));
    return batch;
}

std::vector<FragmentResult> echo_backend(std::span<const Envelope> envelopes) {
    std::vector<FragmentResult> out;
    out.reserve(envelopes.size());
    for (const auto &e : envelopes) {
        out.push_back({e.fragment_id, e.sealed_header, e.masked_payload});
    }
    return out;
}

void AuditLog::append(AuditEvent event) {
    event.timestamp = next_timestamp();
    events_.push_back(std::move(event));
}

void AuditLog::write_jsonl(std::ostream &out) const {
    for (const auto &e : events_) {
        const nlohmann::ordered_json j = {{"timestamp", e.timestamp},
                                          {"batch_id", e.batch_id},
                                          {"cause", e.cause},
                                          {"seed", e.seed},
                                          {"eta", e.eta},
                                          {"eps_ver", e.eps_ver},
                                          {"content_hash", e.content_hash}};
        out << j.dump() << '\n';
    }
}

VerificationReport verify_and_recover(std::span<const FragmentResult> results,
                                      const SecurityParams &params, ClientRecords &records,
                                      AuditLog &audit, std::uint64_t seed) {
    params.validate();
    VerificationReport report;
    std::size_t decoys_passed = 0;
    Bytes transcript;
    for (const auto &r : results) {
        const auto it = records.by_id.find(r.fragment_id);
        if (it == records.by_id.end()) {
            throw ProtocolError("result for unknown fragment id " + std::to_string(r.fragment_id));
        }
        transcript.insert(transcript.end(), r.sealed_header.begin(), r.sealed_header.end());
        const auto aad = le32(r.fragment_id);
        try {
            (void)open_with_aad(r.sealed_header, records.header_key, aad);
        } catch (const AuthenticationError &) {
            ++report.envelopes_rejected;
            continue;
        }
        const ClientRecord &rec = it->second;
        if (rec.is_decoy) {
            if (r.payload == rec.expected) {
                ++decoys_passed;
            }
        } else {
            report.recovered[r.fragment_id] = mask_payload(r.payload, rec.key);
        }
    }
    if (records.decoys > 0) {
        report.decoy_pass_rate =
            static_cast<double>(decoys_passed) / static_cast<double>(records.decoys);
        if (report.decoy_pass_rate < 1.0 - params.eps_ver) {
            report.decision = Decision::Abort;
        }
    }
    if (report.decision == Decision::Abort) {
        records.keys_rotated = true;
        audit.append({0, records.batch_id, "decoy pass rate below threshold", seed, params.eta,
                      params.eps_ver, sha256_hex(transcript)});
    }
    return report;
}

double detection_lower_bound(std::size_t n, std::size_t h, std::size_t k) {
    if (n == 0 || h > n || k > n) {
        throw DomainError("detection bound needs 0 <= h, k <= N and N > 0");
    }
    const double miss = 1.0 - static_cast<double>(h) / static_cast<double>(n);
    return 1.0 - std::pow(miss, static_cast<double>(k));
}

double accept_incorrect_bound(std::size_t h, double eps_ver) {
    if (!(eps_ver >= 0.0)) {
        throw DomainError("verification threshold must be nonnegative");
    }
    return std::exp(-2.0 * static_cast<double>(h) * eps_ver * eps_ver);
}

std::string sha256_hex(std::span<const Byte> data) {
    std::array<Byte, SHA256_DIGEST_LENGTH> digest{};
    SHA256(data.data(), data.size(), digest.data());
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (const Byte b : digest) {
        out.push_back(kHex[b >> 4U]);
        out.push_back(kHex[b & 0xfU]);
    }
    return out;
}

} // namespace maestrocut::phasepad
