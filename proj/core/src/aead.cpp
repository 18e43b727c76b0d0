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

#include "maestrocut/aead.hpp"

#include "maestrocut/errors.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cstring>
#include <memory>

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#include <immintrin.h>
#define MAESTROCUT_HAVE_CLMUL 1
#endif

namespace maestrocut::aead {

namespace {

struct Element {
    std::uint64_t lo = 0; // coefficients of x^0 .. x^63
    std::uint64_t hi = 0; // coefficients of x^64 .. x^127
};

Element load(const Byte *p) {
    Element e;
    for (int i = 7; i >= 0; --i) {
        e.lo = (e.lo << 8U) | p[i];
        e.hi = (e.hi << 8U) | p[8 + i];
    }
    return e;
}

void store(const Element &e, Byte *p) {
    for (int i = 0; i < 8; ++i) {
        p[i] = static_cast<Byte>(e.lo >> (8U * static_cast<unsigned>(i)));
        p[8 + i] = static_cast<Byte>(e.hi >> (8U * static_cast<unsigned>(i)));
    }
}

// Field modulus x^128 + x^127 + x^126 + x^121 + 1.
constexpr std::uint64_t kReduceHi = (1ULL << 63U) | (1ULL << 62U) | (1ULL << 57U);

Element mul_x(Element a) {
    const bool carry = (a.hi >> 63U) != 0;
    a.hi = (a.hi << 1U) | (a.lo >> 63U);
    a.lo <<= 1U;
    if (carry) {
        a.lo ^= 1U;
        a.hi ^= kReduceHi;
    }
    return a;
}

// Division by x; x^-1 = x^127 + x^126 + x^125 + x^120.
Element div_x(Element a) {
    const bool odd = (a.lo & 1U) != 0;
    a.lo = (a.lo >> 1U) | (a.hi << 63U);
    a.hi >>= 1U;
    if (odd) {
        a.hi ^= (1ULL << 63U) | (kReduceHi >> 1U);
    }
    return a;
}

// a * b * x^-128
Element dot(const Element &a, const Element &b) {
    Element r;
    for (int i = 127; i >= 0; --i) {
        r = mul_x(r);
        const std::uint64_t word = i >= 64 ? b.hi : b.lo;
        if (((word >> static_cast<unsigned>(i & 63)) & 1U) != 0) {
            r.lo ^= a.lo;
            r.hi ^= a.hi;
        }
    }
    for (int i = 0; i < 128; ++i) {
        r = div_x(r);
    }
    return r;
}

#ifdef MAESTROCUT_HAVE_CLMUL
// V * x^-64: with V = V1 x^64 + V0 and p = 1 mod x^64,
// V0 x^-64 = V0 x^64 + V0 (x^63 + x^62 + x^57).
__attribute__((target("pclmul,sse2"))) __m128i fold(__m128i v) {
    const __m128i c = _mm_set_epi64x(0, static_cast<long long>(0xc200000000000000ULL));
    return _mm_xor_si128(_mm_shuffle_epi32(v, 0x4e), _mm_clmulepi64_si128(v, c, 0x00));
}

__attribute__((target("pclmul,sse2"))) void polyval_clmul(const Byte *h, const Byte *data,
                                                          std::size_t blocks, Byte *out) {
    const __m128i hk = _mm_loadu_si128(reinterpret_cast<const __m128i *>(h));
    __m128i s = _mm_setzero_si128();
    for (std::size_t b = 0; b < blocks; ++b) {
        s = _mm_xor_si128(s, _mm_loadu_si128(reinterpret_cast<const __m128i *>(data + 16 * b)));
        const __m128i lo = _mm_clmulepi64_si128(s, hk, 0x00);
        const __m128i hi = _mm_clmulepi64_si128(s, hk, 0x11);
        const __m128i mid = _mm_xor_si128(_mm_clmulepi64_si128(s, hk, 0x01),
                                          _mm_clmulepi64_si128(s, hk, 0x10));
        const __m128i low = _mm_xor_si128(lo, _mm_slli_si128(mid, 8));
        const __m128i high = _mm_xor_si128(hi, _mm_srli_si128(mid, 8));
        s = _mm_xor_si128(high, fold(fold(low)));
    }
    _mm_storeu_si128(reinterpret_cast<__m128i *>(out), s);
}
#endif

struct CipherDeleter {
    void operator()(EVP_CIPHER_CTX *ctx) const { EVP_CIPHER_CTX_free(ctx); }
};

class Aes {
  public:
    explicit Aes(std::span<const Byte> key) : ctx_(EVP_CIPHER_CTX_new()) {
        const EVP_CIPHER *cipher = key.size() == 32 ? EVP_aes_256_ecb() : EVP_aes_128_ecb();
        if (!ctx_ || (key.size() != 16 && key.size() != 32) ||
            EVP_EncryptInit_ex(ctx_.get(), cipher, nullptr, key.data(), nullptr) != 1 ||
            EVP_CIPHER_CTX_set_padding(ctx_.get(), 0) != 1) {
            throw NumericError("AES initialisation failed");
        }
    }

    void encrypt(const Byte *in, Byte *out, std::size_t blocks) {
        int len = 0;
        if (EVP_EncryptUpdate(ctx_.get(), out, &len, in, static_cast<int>(16 * blocks)) != 1) {
            throw NumericError("AES block encryption failed");
        }
    }

  private:
    std::unique_ptr<EVP_CIPHER_CTX, CipherDeleter> ctx_;
};

struct DerivedKeys {
    Block auth{};
    std::array<Byte, 32> enc{};
};

DerivedKeys derive(std::span<const Byte> key, std::span<const Byte> nonce) {
    if (key.size() != kKeySize) {
        throw DomainError("AES-256-GCM-SIV key must be 32 bytes");
    }
    if (nonce.size() != kNonceSize) {
        throw DomainError("AES-256-GCM-SIV nonce must be 12 bytes");
    }
    Aes aes(key);
    std::array<Byte, 96> in{};
    std::array<Byte, 96> out{};
    for (int i = 0; i < 6; ++i) {
        in[static_cast<std::size_t>(16 * i)] = static_cast<Byte>(i);
        std::memcpy(&in[static_cast<std::size_t>(16 * i + 4)], nonce.data(), kNonceSize);
    }
    aes.encrypt(in.data(), out.data(), 6);
    DerivedKeys keys;
    for (std::size_t i = 0; i < 6; ++i) {
        Byte *dst = i < 2 ? keys.auth.data() + 8 * i : keys.enc.data() + 8 * (i - 2);
        std::memcpy(dst, &out[16 * i], 8);
    }
    OPENSSL_cleanse(out.data(), out.size());
    return keys;
}

Block compute_tag(const DerivedKeys &keys, Aes &enc, std::span<const Byte> nonce,
                  std::span<const Byte> plaintext, std::span<const Byte> aad) {
    const auto padded = [](std::size_t n) { return (n + 15) / 16 * 16; };
    std::vector<Byte> input(padded(aad.size()) + padded(plaintext.size()) + 16, 0);
    std::copy(aad.begin(), aad.end(), input.begin());
    std::copy(plaintext.begin(), plaintext.end(),
              input.begin() + static_cast<std::ptrdiff_t>(padded(aad.size())));
    const std::uint64_t bits[2] = {8ULL * aad.size(), 8ULL * plaintext.size()};
    Byte *lengths = input.data() + input.size() - 16;
    for (int w = 0; w < 2; ++w) {
        for (int i = 0; i < 8; ++i) {
            lengths[8 * w + i] = static_cast<Byte>(bits[w] >> (8U * static_cast<unsigned>(i)));
        }
    }
    Block s = polyval(keys.auth, input);
    for (std::size_t i = 0; i < kNonceSize; ++i) {
        s[i] ^= nonce[i];
    }
    s[15] &= 0x7fU;
    Block tag{};
    enc.encrypt(s.data(), tag.data(), 1);
    return tag;
}

void ctr_xor(Aes &enc, const Block &tag, std::span<const Byte> in,
             Byte *out) {
    Block counter = tag;
    counter[15] |= 0x80U;
    std::uint32_t c = 0;
    for (int i = 3; i >= 0; --i) {
        c = (c << 8U) | counter[static_cast<std::size_t>(i)];
    }
    const std::size_t blocks = (in.size() + 15) / 16;
    std::vector<Byte> counters(16 * blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        std::memcpy(&counters[16 * b], counter.data(), 16);
        for (std::size_t i = 0; i < 4; ++i) {
            counters[16 * b + i] = static_cast<Byte>(c >> (8U * i));
        }
        ++c;
    }
    std::vector<Byte> stream(counters.size());
    if (blocks > 0) {
        enc.encrypt(counters.data(), stream.data(), blocks);
    }
    for (std::size_t i = 0; i < in.size(); ++i) {
        out[i] = in[i] ^ stream[i];
    }
}

} // namespace

bool polyval_accelerated() noexcept {
#ifdef MAESTROCUT_HAVE_CLMUL
    static const bool supported = __builtin_cpu_supports("pclmul") != 0;
    return supported;
#else
    return false;
#endif
}

Block polyval(const Block &h, std::span<const Byte> data) {
#ifdef MAESTROCUT_HAVE_CLMUL
    if (polyval_accelerated()) {
        if (data.size() % 16 != 0) {
            throw DomainError("POLYVAL input must be whole blocks");
        }
        Block out{};
        polyval_clmul(h.data(), data.data(), data.size() / 16, out.data());
        return out;
    }
#endif
    return polyval_portable(h, data);
}

Block polyval_portable(const Block &h, std::span<const Byte> data) {
    if (data.size() % 16 != 0) {
        throw DomainError("POLYVAL input must be whole blocks");
    }
    const Element hk = load(h.data());
    Element s;
    for (std::size_t off = 0; off < data.size(); off += 16) {
        const Element x = load(data.data() + off);
        s.lo ^= x.lo;
        s.hi ^= x.hi;
        s = dot(s, hk);
    }
    Block out{};
    store(s, out.data());
    return out;
}

std::vector<Byte> seal(std::span<const Byte> key, std::span<const Byte> nonce,
                       std::span<const Byte> plaintext, std::span<const Byte> aad) {
    const DerivedKeys keys = derive(key, nonce);
    Aes enc(keys.enc);
    const Block tag = compute_tag(keys, enc, nonce, plaintext, aad);
    std::vector<Byte> out(plaintext.size() + kTagSize);
    ctr_xor(enc, tag, plaintext, out.data());
    std::copy(tag.begin(), tag.end(), out.begin() + static_cast<std::ptrdiff_t>(plaintext.size()));
    return out;
}

std::vector<Byte> open(std::span<const Byte> key, std::span<const Byte> nonce,
                       std::span<const Byte> sealed, std::span<const Byte> aad) {
    if (sealed.size() < kTagSize) {
        throw AuthenticationError("sealed message shorter than the tag");
    }
    const DerivedKeys keys = derive(key, nonce);
    const std::size_t n = sealed.size() - kTagSize;
    Block tag{};
    std::copy(sealed.begin() + static_cast<std::ptrdiff_t>(n), sealed.end(), tag.begin());
    std::vector<Byte> plaintext(n);
    Aes enc(keys.enc);
    ctr_xor(enc, tag, sealed.first(n), plaintext.data());
    const Block expected = compute_tag(keys, enc, nonce, plaintext, aad);
    if (CRYPTO_memcmp(expected.data(), tag.data(), kTagSize) != 0) {
        OPENSSL_cleanse(plaintext.data(), plaintext.size());
        throw AuthenticationError("envelope failed authentication");
    }
    return plaintext;
}

} // namespace maestrocut::aead
