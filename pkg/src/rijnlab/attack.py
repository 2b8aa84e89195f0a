"""Key-recovery engines.

Two attacks against reduced-round Rijndael-b:

* the byte-wise last-round attack: a first-order structure is balanced
  everywhere after 3 rounds, so guessing one last-round key byte at a
  time and summing the partially decrypted byte filters 4-round keys;

* the partial-sums attack on 6 rounds: a 4-round property plus two
  appended rounds. Rewriting round 5 as AddRoundKey-before-MixColumns
  (with the equivalent key K' = InvMixColumns(K)) makes any byte of the
  round-4 output depend on 4 ciphertext bytes, 4 bytes of the last round
  key and 1 byte of K'. The five bytes are recovered with the staged
  partial-sums evaluation: fold one guessed key byte at a time into a
  parity multiset of shrinking tuples, x_k = sum_j S_j[c_j ^ k_j] with
  S_j the inverse S-box scaled by an InvMixColumns coefficient.

The staged sweep costs far more than the product of data size and stage
count when structures are small (the tuple lists stop shrinking), so the
driver projects the exact lookup count up front and refuses to run past
a configurable budget; `assume_prefix` pins leading key bytes to their
true values to validate the machinery on a smaller swept space, and is
always disclosed in the result.
"""

import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit, prange

from .batch import structure_ciphertext_tuples
from .cipher import (
    CipherParams,
    encrypt_reduced,
    inv_mix_columns,
    key_schedule,
    mix_columns,
)
from .gf import INV_MIX_MATRIX, INV_SBOX, MUL_TABLE
from .integral import CONVENTION_FULL, IntegralProperty, Position
from .search import verify_property


def equivalent_key_rewrite(round_keys: np.ndarray, r: int,
                           final_special_round: int | None = None) -> np.ndarray:
    """K'_r = InvMixColumns(K_r): AddK'_r then MixColumns equals
    MixColumns then AddK_r. Rejects the final special round, which has no
    MixColumns to commute with."""
    last = len(round_keys) - 1 if final_special_round is None else final_special_round
    if r == last:
        raise ValueError(f"round {r} is the final special round (no MixColumns)")
    if not 0 <= r < len(round_keys):
        raise ValueError(f"round {r} outside key schedule")
    return inv_mix_columns(round_keys[r])


def fused_tables(target_row: int) -> np.ndarray:
    """S_0..S_3 for a target row: the inverse S-box scaled by the matching
    InvMixColumns coefficient, so x_3 = (InvMixColumns . InvSubBytes) of a
    column, evaluated one byte at a time."""
    out = np.zeros((4, 256), dtype=np.uint8)
    for j in range(4):
        out[j] = MUL_TABLE[int(INV_MIX_MATRIX[target_row, j])][INV_SBOX]
    return out


@dataclass(frozen=True)
class BackMap:
    """Where one byte of the pre-attack state shows up in the ciphertext."""

    target: Position             # (row, col) of A^(R+1), the 4-round output
    mix_column: int              # MixColumns column of round R+1 feeding it
    ciphertext_positions: tuple  # 4 positions (row j, col), j = 0..3
    coeffs: tuple                # InvMixColumns row applied on the way back


def target_byte_backmap(params: CipherParams, target: Position) -> BackMap:
    """Two appended rounds, the last one special: the target byte needs the
    4 ciphertext bytes that are the InvShiftRows preimages of one column."""
    r, c = target
    t = params.block_cols
    offs = params.shift_offsets
    col5 = (c - offs[r]) % t
    positions = tuple((j, (col5 + offs[j]) % t) for j in range(4))
    coeffs = tuple(int(INV_MIX_MATRIX[r, j]) for j in range(4))
    return BackMap(target=(r, c), mix_column=col5,
                   ciphertext_positions=positions, coeffs=coeffs)


def parity_collapse(values: np.ndarray) -> np.ndarray:
    """Values occurring an odd number of times (XOR-parity multiset)."""
    vals, counts = np.unique(values, return_counts=True)
    return vals[(counts & 1) == 1]


def naive_filter(tuples: np.ndarray, key_bytes, fused: np.ndarray) -> int:
    """Reference evaluation: fold every ciphertext tuple through all five
    guessed bytes directly."""
    k0, k1, k2, k3, k4 = (int(k) for k in key_bytes)
    x = (fused[0][((tuples >> 24) & 0xFF) ^ k0]
         ^ fused[1][((tuples >> 16) & 0xFF) ^ k1]
         ^ fused[2][((tuples >> 8) & 0xFF) ^ k2]
         ^ fused[3][(tuples & 0xFF) ^ k3])
    return int(np.bitwise_xor.reduce(INV_SBOX[x ^ k4]))


def partial_sums_filter(tuples: np.ndarray, key_bytes, fused: np.ndarray) -> int:
    """Staged evaluation of the same sum: guess k_k and collapse
    (c_0..c_3) -> (x_k, c_{k+1}..c_3) one stage at a time, then fold the
    surviving x_3 parities through the inverse S-box with k_4."""
    k = [int(b) for b in key_bytes]
    v = tuples.astype(np.int64)
    for stage in range(4):
        top = 8 * (3 - stage)          # bit offset of the byte being folded
        x = (v >> (top + 8)) if stage else np.zeros(len(v), dtype=np.int64)
        c = (v >> top) & 0xFF
        rest = v & ((1 << top) - 1)
        v = ((x ^ fused[stage][c ^ k[stage]]) << top) | rest
        v = parity_collapse(v)
    acc = 0
    for x3 in v:
        acc ^= int(INV_SBOX[int(x3) ^ k[4]])
    return acc


@njit(cache=True, parallel=True)
def _filter_many(tuples, fused, inv_sbox, cands, out):
    for i in prange(len(cands)):
        k0 = cands[i, 0]
        k1 = cands[i, 1]
        k2 = cands[i, 2]
        k3 = cands[i, 3]
        k4 = cands[i, 4]
        acc = np.uint8(0)
        for n in range(len(tuples)):
            v = tuples[n]
            x = (fused[0, ((v >> 24) & 0xFF) ^ k0]
                 ^ fused[1, ((v >> 16) & 0xFF) ^ k1]
                 ^ fused[2, ((v >> 8) & 0xFF) ^ k2]
                 ^ fused[3, (v & 0xFF) ^ k3])
            acc ^= inv_sbox[x ^ k4]
        out[i] = acc


def filter_candidates(tuples: np.ndarray, cands: np.ndarray) -> np.ndarray:
    """Filter bytes for many (k0..k4) candidates over one tuple list;
    `cands` has shape (n, 5) with (k0..k3, k4) as int64 rows."""
    fused = _kernel_fused
    raise NotImplementedError  # replaced below; kept for doc tools


@njit(cache=True, parallel=True)
def _staged_sweep(tu_a, tu_b, fused, inv_sbox, first_stage,
                  surv, surv_n, overflow, lookups):
    """Depth-first staged sweep over stages `first_stage`..3 plus k4.

    tu_a / tu_b: odd-parity tuple lists of the two in-sweep structures,
    packed (x, c_first..c_3) with x in the top byte: width 5-first_stage
    bytes. Survivors (guessed bytes packed big-endian, k4 last) go to
    surv[g, :] per outer guess g; results are identical for any thread
    count. lookups[g] counts fused/inv_sbox table lookups exactly.
    """
    n_stages = 4 - first_stage
    for g0 in prange(256):
        look = 0
        # level buffers, reused across the subtree under g0
        space1 = 1 << (8 * (3 - first_stage))  # after one more stage
        flags1 = np.zeros(space1, dtype=np.uint8)
        space2 = 1 << (8 * max(3 - first_stage - 1, 0))
        flags2 = np.zeros(space2, dtype=np.uint8)
        x3flags_a = np.zeros(256, dtype=np.uint8)
        x3odd_a = np.empty(256, dtype=np.int64)
        x3flags_b = np.zeros(256, dtype=np.uint8)
        x3odd_b = np.empty(256, dtype=np.int64)

        la = len(tu_a)
        lb = len(tu_b)
        buf_a1 = np.empty(la, dtype=np.int64)
        buf_b1 = np.empty(lb, dtype=np.int64)
        buf_a2 = np.empty(la, dtype=np.int64)
        buf_b2 = np.empty(lb, dtype=np.int64)

        nsv = 0
        ovf = 0

        # stage `first_stage` with guess g0
        na1 = _transform(tu_a, buf_a1, fused, first_stage, g0, flags1)
        nb1 = _transform(tu_b, buf_b1, fused, first_stage, g0, flags1)
        look += la + lb

        if n_stages == 1:
            nsv, ovf, lk = _leaf(buf_a1, na1, buf_b1, nb1, fused, inv_sbox,
                                 x3flags_a, x3odd_a, x3flags_b, x3odd_b,
                                 np.int64(g0), surv, np.int64(g0 * 0), nsv, ovf)
            look += lk
        elif n_stages == 2:
            for g1 in range(256):
                na2 = _transform(buf_a1[:na1], buf_a2, fused, first_stage + 1, g1, flags2)
                nb2 = _transform(buf_b1[:nb1], buf_b2, fused, first_stage + 1, g1, flags2)
                look += na1 + nb1
                nsv, ovf, lk = _leaf(buf_a2, na2, buf_b2, nb2, fused, inv_sbox,
                                     x3flags_a, x3odd_a, x3flags_b, x3odd_b,
                                     np.int64((g0 << 8) | g1), surv, np.int64(g0), nsv, ovf)
                look += lk
        else:  # n_stages == 3
            for g1 in range(256):
                na2 = _transform(buf_a1[:na1], buf_a2, fused, first_stage + 1, g1, flags1)
                nb2 = _transform(buf_b1[:nb1], buf_b2, fused, first_stage + 1, g1, flags1)
                look += na1 + nb1
                for g2 in range(256):
                    base = np.int64((g0 << 16) | (g1 << 8) | g2)
                    nsv, ovf, lk = _leaf3(buf_a2[:na2], buf_b2[:nb2], fused, inv_sbox,
                                          x3flags_a, x3odd_a, x3flags_b, x3odd_b,
                                          g2, base, surv, np.int64(g0), nsv, ovf)
                    look += na2 + nb2 + lk
        surv_n[g0] = nsv
        overflow[g0] = ovf
        lookups[g0] = look
