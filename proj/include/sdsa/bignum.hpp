#pragma once

#include <gmpxx.h>

#include "sdsa/bytes.hpp"

namespace sdsa {

// Big integers serialize as a 4-byte big-endian length followed by the
// big-endian magnitude bytes. Only nonnegative values appear on the wire.
void put_mpz(Bytes& out, const mpz_class& v);
mpz_class read_mpz(ByteReader& r);

mpz_class mpz_from_bytes(std::span<const uint8_t> raw);
Bytes mpz_to_bytes(const mpz_class& v);

}  // namespace sdsa
