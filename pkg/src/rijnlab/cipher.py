"""Parametric Rijndael-b: all block sizes from 128 to 256 bits in 32-bit steps.

A state is a numpy uint8 array of shape (4, t) with t = block_bits / 32,
indexed (row, column). Every transformation broadcasts over leading axes,
so a stack of states with shape (n, 4, t) goes through `encrypt_reduced`
in one call. Bytes map to states column-major: byte k of a message lives
at row k % 4, column k // 4.
"""

from dataclasses import dataclass

import numpy as np

from .gf import INV_MIX_MATRIX, INV_SBOX, MIX_MATRIX, MUL, SBOX

BLOCK_COLS = (4, 5, 6, 7, 8)
KEY_COLS = (4, 6, 8)

SHIFT_OFFSETS = {
    4: (0, 1, 2, 3),
    5: (0, 1, 2, 3),
    6: (0, 1, 2, 3),
    7: (0, 1, 2, 4),
    8: (0, 1, 3, 4),
}

# rounds[(block_cols, key_cols)]
NUM_ROUNDS = {
    (4, 4): 10, (5, 4): 11, (6, 4): 12, (7, 4): 13, (8, 4): 14,
    (4, 6): 12, (5, 6): 12, (6, 6): 12, (7, 6): 13, (8, 6): 14,
    (4, 8): 14, (5, 8): 14, (6, 8): 14, (7, 8): 14, (8, 8): 14,
}


@dataclass(frozen=True)
class CipherParams:
    """Geometry of one Rijndael instance (plus an optional round override)."""

    block_cols: int
    key_cols: int
    rounds: int
    shift_offsets: tuple[int, int, int, int]

    @classmethod
    def for_sizes(cls, block_bits: int, key_bits: int, rounds: int | None = None) -> "CipherParams":
        if block_bits % 32 or block_bits // 32 not in BLOCK_COLS:
            raise ValueError(f"unsupported block size {block_bits}; need 128..256 in 32-bit steps")
        t = block_bits // 32
        if key_bits % 32 or key_bits // 32 not in KEY_COLS:
            raise ValueError(f"unsupported key size {key_bits}; need 128, 192 or 256")
        nk = key_bits // 32
        nr = NUM_ROUNDS[(t, nk)] if rounds is None else rounds
        if not 1 <= nr <= 14:
            raise ValueError(f"round count {nr} out of range 1..14")
        return cls(t, nk, nr, SHIFT_OFFSETS[t])

    @property
    def block_bits(self) -> int:
        return 32 * self.block_cols

    @property
    def key_bits(self) -> int:
        return 32 * self.key_cols


def state_from_bytes(data: bytes) -> np.ndarray:
    if len(data) % 4:
        raise ValueError(f"block length {len(data)} is not a multiple of 4")
    t = len(data) // 4
    if t not in BLOCK_COLS:
        raise ValueError(f"block length {len(data)} bytes is not a Rijndael block")
    return np.frombuffer(data, dtype=np.uint8).reshape(t, 4).T.copy()


def state_to_bytes(state: np.ndarray) -> bytes:
    return state.T.tobytes()


def state_from_hex(text: str) -> np.ndarray:
    return state_from_bytes(bytes.fromhex(text))


def state_to_hex(state: np.ndarray) -> str:
    return state_to_bytes(state).hex()


def sub_bytes(state: np.ndarray) -> np.ndarray:
    return SBOX[state]


def inv_sub_bytes(state: np.ndarray) -> np.ndarray:
    return INV_SBOX[state]


def shift_rows(state: np.ndarray, offsets=None) -> np.ndarray:
    """Rotate row i left by its offset; offsets default to the block's own."""
    offsets = SHIFT_OFFSETS[state.shape[-1]] if offsets is None else offsets
    out = state.copy()
    for i in range(1, 4):
        out[..., i, :] = np.roll(state[..., i, :], -offsets[i], axis=-1)
    return out


def inv_shift_rows(state: np.ndarray, offsets=None) -> np.ndarray:
    offsets = SHIFT_OFFSETS[state.shape[-1]] if offsets is None else offsets
    out = state.copy()
    for i in range(1, 4):
        out[..., i, :] = np.roll(state[..., i, :], offsets[i], axis=-1)
    return out


def _mix_with(matrix: np.ndarray, state: np.ndarray) -> np.ndarray:
    out = np.zeros_like(state)
    for i in range(4):
        acc = out[..., i, :]
        for k in range(4):
            acc ^= MUL[int(matrix[i, k])][state[..., k, :]]
    return out


def mix_columns(state: np.ndarray) -> np.ndarray:
    return _mix_with(MIX_MATRIX, state)


def inv_mix_columns(state: np.ndarray) -> np.ndarray:
    return _mix_with(INV_MIX_MATRIX, state)


def add_round_key(state: np.ndarray, round_key: np.ndarray) -> np.ndarray:
    return state ^ round_key


def key_schedule(master_key: bytes, params: CipherParams) -> np.ndarray:
    """Expand a master key into rounds+1 round keys of shape (4, t).

    Word recurrence per the Rijndael definition: RotWord/SubWord/Rcon every
    key_cols words, plus the extra SubWord at offset 4 when key_cols is 8.
    The expanded word stream is cut into t-column round keys sequentially.
    """
    nk = params.key_cols
    if len(master_key) != 4 * nk:
        raise ValueError(f"key must be {4 * nk} bytes for key_cols={nk}, got {len(master_key)}")
    t = params.block_cols
    total = t * (params.rounds + 1)

    words = np.zeros((total, 4), dtype=np.uint8)
    words[:nk] = np.frombuffer(master_key, dtype=np.uint8).reshape(nk, 4)

    rcon = 1
    for i in range(nk, total):
        temp = words[i - 1].copy()
        if i % nk == 0:
            temp = SBOX[np.roll(temp, -1)]
            temp[0] ^= rcon
            rcon = (rcon << 1) ^ (0x11B if rcon & 0x80 else 0)
            rcon &= 0xFF
        elif nk == 8 and i % nk == 4:
            temp = SBOX[temp]
        words[i] = words[i - nk] ^ temp

    # round key r holds words r*t .. r*t+t-1 as its columns
    return words.reshape(params.rounds + 1, t, 4).transpose(0, 2, 1).copy()


def _check_rounds(round_keys: np.ndarray, rounds: int):
    if not 1 <= rounds <= len(round_keys) - 1:
        raise ValueError(f"rounds={rounds} out of range 1..{len(round_keys) - 1}")


def encrypt_reduced(pt: np.ndarray, round_keys: np.ndarray, rounds: int,
                    final_special: bool = True) -> np.ndarray:
    """Initial key addition then `rounds` rounds.

    With final_special set, the last of those rounds omits MixColumns (the
    cipher's own final-round form); encrypt_reduced(pt, rk, Nr, True) is the
    full cipher.
    """
    _check_rounds(round_keys, rounds)
    state = pt ^ round_keys[0]
    for r in range(1, rounds + 1):
        state = shift_rows(sub_bytes(state))
        if not (final_special and r == rounds):
            state = mix_columns(state)
        state = state ^ round_keys[r]
    return state


def decrypt_reduced(ct: np.ndarray, round_keys: np.ndarray, rounds: int,
                    final_special: bool = True) -> np.ndarray:
    """Exact inverse of encrypt_reduced."""
    _check_rounds(round_keys, rounds)
    state = ct.copy()
    for r in range(rounds, 0, -1):
        state = state ^ round_keys[r]
        if not (final_special and r == rounds):
            state = inv_mix_columns(state)
        state = inv_sub_bytes(inv_shift_rows(state))
    return state ^ round_keys[0]


def encrypt(pt: np.ndarray, round_keys: np.ndarray) -> np.ndarray:
    return encrypt_reduced(pt, round_keys, len(round_keys) - 1, final_special=True)


def decrypt(ct: np.ndarray, round_keys: np.ndarray) -> np.ndarray:
    return decrypt_reduced(ct, round_keys, len(round_keys) - 1, final_special=True)
