"""Bulk encryption kernels for structure sums and attack ciphertext capture.

The property searches need on the order of 2^36 reduced-round encryptions,
so the hot path is a numba T-table implementation working on states packed
as one uint32 per column (row 0 in the top byte). SubBytes, ShiftRows and
MixColumns collapse into four table lookups per column per round; ShiftRows
becomes a precomputed source-index matrix.

Structures are never materialized: each kernel enumerates the d-byte
counter of a structured plaintext set on the fly and either XOR-folds the
ciphertexts or extracts the few ciphertext bytes an attack needs. Work is
split over a fixed number of counter ranges, so results are bit-identical
for any thread count.
"""

import numpy as np
from numba import njit, prange, set_num_threads

from .cipher import SHIFT_OFFSETS, CipherParams
from .gf import MIX_COEFFS, SBOX, gf_mul

N_CHUNKS = 256


def set_threads(n: int):
    set_num_threads(max(1, n))


def _make_ttables() -> np.ndarray:
    tt = np.zeros((4, 256), dtype=np.uint32)
    for x in range(256):
        s = int(SBOX[x])
        for k in range(4):
            col = [gf_mul(MIX_COEFFS[(k - i) % 4], s) for i in range(4)]
            tt[k, x] = (col[0] << 24) | (col[1] << 16) | (col[2] << 8) | col[3]
    return tt


TTABLES = _make_ttables()
SBOX_U32 = SBOX.astype(np.uint32)


def src_index(t: int) -> np.ndarray:
    offs = SHIFT_OFFSETS[t]
    return np.array([[(j + offs[i]) % t for j in range(t)] for i in range(4)], dtype=np.int64)


def pack_columns(state: np.ndarray) -> np.ndarray:
    s = state.astype(np.uint32)
    return (s[0] << 24) | (s[1] << 16) | (s[2] << 8) | s[3]


def unpack_columns(cols: np.ndarray) -> np.ndarray:
    t = len(cols)
    out = np.zeros((4, t), dtype=np.uint8)
    for i in range(4):
        out[i] = (cols >> (24 - 8 * i)) & 0xFF
    return out


def pack_round_keys(round_keys: np.ndarray) -> np.ndarray:
    return np.stack([pack_columns(k) for k in round_keys])


def _positions_to_lanes(positions) -> tuple[np.ndarray, np.ndarray]:
    cols = np.array([c for _, c in positions], dtype=np.int64)
    lanes = np.array([24 - 8 * r for r, _ in positions], dtype=np.int64)
    return cols, lanes


@njit(cache=True)
def _encrypt_cols(st, tmp, t, srcidx, rk, rounds, final_special, tt, sb32):
    for j in range(t):
        st[j] ^= rk[0, j]
    last = rounds if final_special else rounds + 1
    for r in range(1, last):
        for j in range(t):
            tmp[j] = (tt[0, (st[srcidx[0, j]] >> 24) & 0xFF]
                      ^ tt[1, (st[srcidx[1, j]] >> 16) & 0xFF]
                      ^ tt[2, (st[srcidx[2, j]] >> 8) & 0xFF]
                      ^ tt[3, st[srcidx[3, j]] & 0xFF]) ^ rk[r, j]
        for j in range(t):
            st[j] = tmp[j]
    if final_special:
        for j in range(t):
            tmp[j] = ((sb32[(st[srcidx[0, j]] >> 24) & 0xFF] << 24)
                      | (sb32[(st[srcidx[1, j]] >> 16) & 0xFF] << 16)
                      | (sb32[(st[srcidx[2, j]] >> 8) & 0xFF] << 8)
                      | sb32[st[srcidx[3, j]] & 0xFF]) ^ rk[rounds, j]
        for j in range(t):
            st[j] = tmp[j]


@njit(cache=True, parallel=True)
def _xor_sum_kernel(t, srcidx, rk, base, act_col, act_lane, d, total,
                    rounds, final_special, tt, sb32, out):
    chunk = (total + N_CHUNKS - 1) // N_CHUNKS
    for ci in prange(N_CHUNKS):
        lo = ci * chunk
        hi = min(lo + chunk, total)
        acc = np.zeros(t, dtype=np.uint32)
        st = np.empty(t, dtype=np.uint32)
        tmp = np.empty(t, dtype=np.uint32)
        for idx in range(lo, hi):
            for j in range(t):
                st[j] = base[j]
            v = idx
            for a in range(d - 1, -1, -1):
                st[act_col[a]] = (st[act_col[a]] & ~np.uint32(0xFF << act_lane[a])) \
                    | np.uint32((v & 0xFF) << act_lane[a])
                v >>= 8
            _encrypt_cols(st, tmp, t, srcidx, rk, rounds, final_special, tt, sb32)
            for j in range(t):
                acc[j] ^= st[j]
        for j in range(t):
            out[ci, j] = acc[j]


@njit(cache=True, parallel=True)
def _tuples_kernel(t, srcidx, rk, base, act_col, act_lane, d, total,
                   rounds, final_special, tt, sb32, cap_col, cap_shift, out):
    chunk = (total + N_CHUNKS - 1) // N_CHUNKS
    for ci in prange(N_CHUNKS):
        lo = ci * chunk
        hi = min(lo + chunk, total)
        st = np.empty(t, dtype=np.uint32)
        tmp = np.empty(t, dtype=np.uint32)
        for idx in range(lo, hi):
            for j in range(t):
                st[j] = base[j]
            v = idx
            for a in range(d - 1, -1, -1):
                st[act_col[a]] = (st[act_col[a]] & ~np.uint32(0xFF << act_lane[a])) \
                    | np.uint32((v & 0xFF) << act_lane[a])
                v >>= 8
            _encrypt_cols(st, tmp, t, srcidx, rk, rounds, final_special, tt, sb32)
            packed = 0
            for j in range(4):
                packed = (packed << 8) | ((np.int64(st[cap_col[j]]) >> cap_shift[j]) & 0xFF)
            out[idx] = np.uint32(packed)


def structure_xor_sum(params: CipherParams, round_keys: np.ndarray, base_state: np.ndarray,
                      positions, rounds: int, final_special: bool = False) -> np.ndarray:
    """XOR of all 2^{8d} ciphertexts of the structure, as a (4, t) state."""
    d = len(positions)
    act_col, act_lane = _positions_to_lanes(positions)
    out = np.zeros((N_CHUNKS, params.block_cols), dtype=np.uint32)
    _xor_sum_kernel(params.block_cols, src_index(params.block_cols),
                    pack_round_keys(round_keys), pack_columns(base_state),
                    act_col, act_lane, d, 1 << (8 * d),
                    rounds, final_special, TTABLES, SBOX_U32, out)
    return unpack_columns(np.bitwise_xor.reduce(out, axis=0))


def structure_ciphertext_tuples(params: CipherParams, round_keys: np.ndarray,
                                base_state: np.ndarray, positions, rounds: int,
                                capture_positions, final_special: bool = True) -> np.ndarray:
    """Encrypt a structure and keep 4 ciphertext bytes per text, packed
    into a uint32 (first capture position in the top byte)."""
    d = len(positions)
    act_col, act_lane = _positions_to_lanes(positions)
    cap_col = np.array([c for _, c in capture_positions], dtype=np.int64)
    cap_shift = np.array([24 - 8 * r for r, _ in capture_positions], dtype=np.int64)
    total = 1 << (8 * d)
    out = np.zeros(total, dtype=np.uint32)
    _tuples_kernel(params.block_cols, src_index(params.block_cols),
                   pack_round_keys(round_keys), pack_columns(base_state),
                   act_col, act_lane, d, total,
                   rounds, final_special, TTABLES, SBOX_U32, cap_col, cap_shift, out)
    return out


def encrypt_one(params: CipherParams, round_keys: np.ndarray, state: np.ndarray,
                rounds: int, final_special: bool = True) -> np.ndarray:
    """Single-block encryption through the packed kernel (for cross-checks)."""
    st = pack_columns(state)
    tmp = np.empty_like(st)
    _encrypt_cols(st, tmp, params.block_cols, src_index(params.block_cols),
                  pack_round_keys(round_keys), rounds, final_special, TTABLES, SBOX_U32)
    return unpack_columns(st)
