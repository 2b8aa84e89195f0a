"""GF(2^8) arithmetic and the Rijndael byte tables built from it.

Everything here is derived from the field defined by the reduction
polynomial x^8 + x^4 + x^3 + x + 1 (0x11B): multiplication, inverses,
the S-box (inverse composed with the affine map) and the MixColumns
matrices. Tables are numpy arrays so they can be indexed with whole
states at once.
"""

import numpy as np

POLY = 0x11B

MIX_COEFFS = (0x02, 0x03, 0x01, 0x01)
INV_MIX_COEFFS = (0x0E, 0x0B, 0x0D, 0x09)


def gf_mul(a: int, b: int) -> int:
    """Product of two bytes in GF(2^8) mod 0x11B."""
    r = 0
    a &= 0xFF
    b &= 0xFF
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        if a & 0x100:
            a ^= POLY
        b >>= 1
    return r


def _inverse_table() -> np.ndarray:
    inv = np.zeros(256, dtype=np.uint8)
    # x^254 = x^-1; exponentiation by squaring keeps this independent of
    # any log-table shortcuts.
    for x in range(1, 256):
        y, acc, e = x, 1, 254
        while e:
            if e & 1:
                acc = gf_mul(acc, y)
            y = gf_mul(y, y)
            e >>= 1
        inv[x] = acc
    return inv


def _sbox_from_inverse(inv: np.ndarray) -> np.ndarray:
    sbox = np.zeros(256, dtype=np.uint8)
    for x in range(256):
        b = int(inv[x])
        s = 0
        for i in range(8):
            bit = (
                (b >> i)
                ^ (b >> ((i + 4) % 8))
                ^ (b >> ((i + 5) % 8))
                ^ (b >> ((i + 6) % 8))
                ^ (b >> ((i + 7) % 8))
                ^ (0x63 >> i)
            ) & 1
            s |= bit << i
        sbox[x] = s
    return sbox


GF_INV = _inverse_table()
SBOX = _sbox_from_inverse(GF_INV)
INV_SBOX = np.zeros(256, dtype=np.uint8)
INV_SBOX[SBOX] = np.arange(256, dtype=np.uint8)

def _mul_table() -> np.ndarray:
    # row a = products a*x for all x, built by doubling: a*x = 2*((a>>1)*x) ^ (x if a odd)
    tab = np.zeros((256, 256), dtype=np.uint8)
    x = np.arange(256, dtype=np.uint16)
    tab[1] = x.astype(np.uint8)
    for a in range(2, 256):
        dbl = tab[a >> 1].astype(np.uint16) << 1
        dbl ^= np.where(dbl & 0x100, POLY, 0).astype(np.uint16)
        if a & 1:
            dbl ^= x
        tab[a] = dbl.astype(np.uint8)
    return tab


MUL_TABLE = _mul_table()
# per-coefficient views used by MixColumns
MUL = {c: MUL_TABLE[c] for c in sorted(set(MIX_COEFFS) | set(INV_MIX_COEFFS))}

MIX_MATRIX = np.array(
    [[MIX_COEFFS[(j - i) % 4] for j in range(4)] for i in range(4)], dtype=np.uint8
)
INV_MIX_MATRIX = np.array(
    [[INV_MIX_COEFFS[(j - i) % 4] for j in range(4)] for i in range(4)], dtype=np.uint8
)
