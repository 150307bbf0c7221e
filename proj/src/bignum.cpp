#include "sdsa/bignum.hpp"

namespace sdsa {

Bytes mpz_to_bytes(const mpz_class& v) {
    if (v < 0) throw codec_error("negative bignum not serializable");
    size_t count = 0;
    Bytes raw((mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8);
    if (v != 0) mpz_export(raw.data(), &count, 1, 1, 0, 0, v.get_mpz_t());
    raw.resize(count);
    return raw;
}

mpz_class mpz_from_bytes(std::span<const uint8_t> raw) {
    mpz_class v;
    if (!raw.empty()) mpz_import(v.get_mpz_t(), raw.size(), 1, 1, 0, 0, raw.data());
    return v;
}

void put_mpz(Bytes& out, const mpz_class& v) {
    Bytes raw = mpz_to_bytes(v);
    put_blob(out, raw);
}

mpz_class read_mpz(ByteReader& r) {
    Bytes raw = r.blob();
    return mpz_from_bytes(raw);
}

}  // namespace sdsa
