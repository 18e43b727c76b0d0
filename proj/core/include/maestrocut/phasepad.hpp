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

#pragma once

#include "maestrocut/aead.hpp"
#include "maestrocut/rng.hpp"

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace maestrocut::phasepad {

using aead::Byte;
using Bytes = std::vector<Byte>;

inline constexpr std::size_t kHeaderCap = 256;
inline constexpr std::size_t kEnvelopeSize = 288; ///< 12 nonce + 4 length + 256 header + 16 tag
inline constexpr std::int64_t kShotQuantum = 64;

struct SecurityParams {
    int lambda = 128;
    double eta = 0.02;    ///< decoy rate
    double eps_ver = 0.1; ///< verification slack

    [[nodiscard]] int key_bits() const noexcept { return (lambda + 1) / 2; }
    /// Throws ConfigurationError on lambda < 1, eta outside [0,1) or eps_ver outside (0,1).
    void validate() const;
};

/// Per-fragment mask key of `bits` bits, packed little-endian; unused high bits are zero.
struct FragmentKey {
    int bits = 0;
    Bytes bytes;
};

[[nodiscard]] FragmentKey keygen(const SecurityParams &params, Rng &rng);

/**
 * Keystream for a key: AES-128-CTR with a zero initial counter block, keyed by
 * the first 16 bytes of SHA-256("maestrocut-phasepad-v1" || bits as u32 LE ||
 * key bytes). Throws DomainError for an empty key.
 */
[[nodiscard]] Bytes keystream(const FragmentKey &key, std::size_t length);

/// payload XOR keystream; applying it twice restores the payload.
[[nodiscard]] Bytes mask_payload(std::span<const Byte> payload, const FragmentKey &key);

/// 4 random prefix bytes followed by a 64-bit little-endian counter.
class NonceSource {
  public:
    explicit NonceSource(Rng &rng);
    [[nodiscard]] std::array<Byte, aead::kNonceSize> next();

  private:
    std::array<Byte, 4> prefix_{};
    std::uint64_t counter_ = 0;
};

/// nonce || AEAD(len u32 LE || header || zero pad); always kEnvelopeSize bytes.
/// Throws DomainError when the header exceeds kHeaderCap.
[[nodiscard]] Bytes seal_header(std::span<const Byte> header, std::span<const Byte> header_key,
                                const std::array<Byte, aead::kNonceSize> &nonce);

/// Throws AuthenticationError on any modification or a malformed envelope.
[[nodiscard]] Bytes open_header(std::span<const Byte> sealed, std::span<const Byte> header_key);

struct Fragment {
    std::uint32_t id = 0;
    Bytes payload;
    Bytes header;
    std::int64_t shots = 0;
};

/// What the backend sees.
struct Envelope {
    std::uint32_t fragment_id = 0;
    Bytes sealed_header;
    Bytes masked_payload;
    std::int64_t shots = 0; ///< padded
};

/// What only the client keeps.
struct ClientRecord {
    FragmentKey key;
    bool is_decoy = false;
    Bytes expected; ///< decoys: the exact result the backend must return
    std::int64_t shots = 0;
};

struct ClientRecords {
    std::uint64_t batch_id = 0;
    Bytes header_key;
    std::map<std::uint32_t, ClientRecord> by_id;
    std::size_t decoys = 0;
    bool keys_rotated = false;
};

struct Batch {
    std::vector<Envelope> envelopes;
    ClientRecords records;
};

/// floor(eta * n)
[[nodiscard]] std::size_t decoy_count(const SecurityParams &params, std::size_t fragments);

/// Rounds up to a multiple of kShotQuantum.
[[nodiscard]] std::int64_t pad_shots(std::int64_t shots);

/**
 * Masks and seals every fragment, adds floor(eta * N) decoys with random
 * payloads and ids above the largest real id, pads shot counts (decoys get the
 * median padded count) and shuffles the batch.
 */
[[nodiscard]] Batch dispatch(std::span<const Fragment> fragments, const SecurityParams &params,
                             std::uint64_t batch_id, Rng &rng);

/// Backend reply for one envelope.
struct FragmentResult {
    std::uint32_t fragment_id = 0;
    Bytes sealed_header;
    Bytes payload;
};

/// The honest backend returns every envelope unchanged.
[[nodiscard]] std::vector<FragmentResult> echo_backend(std::span<const Envelope> envelopes);

enum class Decision { Accept, Abort };

struct AuditEvent {
    std::uint64_t timestamp = 0; ///< logical clock
    std::uint64_t batch_id = 0;
    std::string cause;
    std::uint64_t seed = 0;
    double eta = 0.0;
    double eps_ver = 0.0;
    std::string content_hash; ///< SHA-256 hex of the batch's sealed headers
};

/// Append-only, totally ordered by append position.
class AuditLog {
  public:
    void append(AuditEvent event);
    [[nodiscard]] const std::vector<AuditEvent> &events() const noexcept { return events_; }
    [[nodiscard]] std::uint64_t next_timestamp() const noexcept { return events_.size(); }
    /// One JSON object per line.
    void write_jsonl(std::ostream &out) const;

  private:
    std::vector<AuditEvent> events_;
};

struct VerificationReport {
    double decoy_pass_rate = 1.0;
    std::size_t envelopes_rejected = 0;
    Decision decision = Decision::Accept;
    std::map<std::uint32_t, Bytes> recovered; ///< real fragments that opened cleanly
};

/**
 * Opens every header (tampered ones are dropped and counted), checks decoys
 * against their records and unmasks real payloads. Missing or rejected decoys
 * count as failures. Abort iff there are decoys and the pass rate is below
 * 1 - eps_ver; on Abort the records are marked rotated and an audit event is
 * appended. Throws ProtocolError on an unknown fragment id.
 */
[[nodiscard]] VerificationReport verify_and_recover(std::span<const FragmentResult> results,
                                                    const SecurityParams &params,
                                                    ClientRecords &records, AuditLog &audit,
                                                    std::uint64_t seed);

/// 1 - (1 - h/N)^k
[[nodiscard]] double detection_lower_bound(std::size_t n, std::size_t h, std::size_t k);

/// exp(-2 h eps^2)
[[nodiscard]] double accept_incorrect_bound(std::size_t h, double eps_ver);

/// Hex SHA-256 digest.
[[nodiscard]] std::string sha256_hex(std::span<const Byte> data);

} // namespace maestrocut::phasepad
