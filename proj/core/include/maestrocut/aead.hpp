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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

/**
 * AES-256-GCM-SIV (RFC 8452) built on the AES block cipher from OpenSSL and a
 * portable POLYVAL. Ciphertext output is plaintext-length bytes followed by the
 * 16-byte tag.
 */
namespace maestrocut::aead {

using Byte = std::uint8_t;
using Block = std::array<Byte, 16>;

inline constexpr std::size_t kKeySize = 32;
inline constexpr std::size_t kNonceSize = 12;
inline constexpr std::size_t kTagSize = 16;

/// POLYVAL(H, X_1, ..., X_n) over whole 16-byte blocks; `data.size()` must be a multiple of 16.
/// Uses carry-less multiply instructions when the CPU has them.
[[nodiscard]] Block polyval(const Block &h, std::span<const Byte> data);

/// Bit-serial reference implementation of polyval().
[[nodiscard]] Block polyval_portable(const Block &h, std::span<const Byte> data);

/// Whether polyval() takes the carry-less multiply path on this machine.
[[nodiscard]] bool polyval_accelerated() noexcept;

[[nodiscard]] std::vector<Byte> seal(std::span<const Byte> key, std::span<const Byte> nonce,
                                     std::span<const Byte> plaintext,
                                     std::span<const Byte> aad = {});

/// Throws AuthenticationError when the tag does not verify; nothing is released in that case.
[[nodiscard]] std::vector<Byte> open(std::span<const Byte> key, std::span<const Byte> nonce,
                                     std::span<const Byte> sealed,
                                     std::span<const Byte> aad = {});

} // namespace maestrocut::aead
