"""The three reversible zone transforms.

All three are length-preserving bijections on the zone byte buffer so that
layers compose in any order and invert exactly.  Normative constructions:

  1  AES-128-CBC over the 16-byte-aligned prefix.
     IV = HMAC-SHA256(layer_key, "iv" || i64be(zone_id))[:16].
     The r = n mod 16 trailing bytes are XORed with the first r bytes of
     AES-ECB(layer_key, last ciphertext block), or of AES-ECB(layer_key, IV)
     when n < 16.  (CBC needs whole blocks; zone areas rarely align, and the
     tail construction keeps the transform length-preserving and invertible.)

  2  Keyed Fisher-Yates shuffle of the zone's pixels (3-byte units).
     Draw stream: concatenated HMAC-SHA256(layer_key, u64be(counter)) blocks,
     counter = 0,1,2,...; consumed as big-endian u32 words.  For i from
     n_px-1 down to 1, j = draw mod (i+1), swap positions i and j.  The
     inverse recomputes the same permutation and applies its inverse.

  3  Keystream XOR.  Keystream block k = HMAC-SHA256(layer_key, u64be(k)),
     concatenated and truncated to the zone length.  Involutive.
"""

from __future__ import annotations

import hashlib
import hmac
import struct

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from ..errors import InvalidInput
from .keys import ALG_CBC, ALG_PERMUTE, ALG_XOR

PIXEL_BYTES = 3
AES_BLOCK = 16


def _hmac_stream(key: bytes, nbytes: int) -> bytes:
    """Concatenated HMAC-SHA256(key, u64be(counter)) blocks, counter from 0."""
    base = hmac.new(key, digestmod=hashlib.sha256)
    chunks = []
    produced = 0
    counter = 0
    while produced < nbytes:
        h = base.copy()
        h.update(struct.pack(">Q", counter))
        chunks.append(h.digest())
        produced += 32
        counter += 1
    return b"".join(chunks)[:nbytes]


def _xor_bytes(data: bytes, keystream: bytes) -> bytes:
    a = np.frombuffer(data, dtype=np.uint8)
    b = np.frombuffer(keystream, dtype=np.uint8)
    return np.bitwise_xor(a, b).tobytes()


# -- algorithm 1: AES-128-CBC with XOR tail ---------------------------------


def _cbc_iv(key: bytes, zone_id: int) -> bytes:
    return hmac.new(key, b"iv" + struct.pack(">q", zone_id), hashlib.sha256).digest()[
        :AES_BLOCK
    ]


def _ecb_block(key: bytes, block: bytes) -> bytes:
    enc = Cipher(algorithms.AES(key), modes.ECB()).encryptor()
    return enc.update(block) + enc.finalize()


def cbc_apply(data: bytes, key: bytes, zone_id: int) -> bytes:
    iv = _cbc_iv(key, zone_id)
    n = len(data)
    body_len = n - n % AES_BLOCK
    body = data[:body_len]
    tail = data[body_len:]
    if body:
        enc = Cipher(algorithms.AES(key), modes.CBC(iv)).encryptor()
        body_ct = enc.update(body) + enc.finalize()
    else:
        body_ct = b""
    if tail:
        seed = body_ct[-AES_BLOCK:] if body_ct else iv
        ks = _ecb_block(key, seed)
        tail = _xor_bytes(tail, ks[: len(tail)])
    return body_ct + tail


def cbc_invert(data: bytes, key: bytes, zone_id: int) -> bytes:
    iv = _cbc_iv(key, zone_id)
    n = len(data)
    body_len = n - n % AES_BLOCK
    body_ct = data[:body_len]
    tail = data[body_len:]
    if tail:
        seed = body_ct[-AES_BLOCK:] if body_ct else iv
        ks = _ecb_block(key, seed)
        tail = _xor_bytes(tail, ks[: len(tail)])
    if body_ct:
        dec = Cipher(algorithms.AES(key), modes.CBC(iv)).decryptor()
        body = dec.update(body_ct) + dec.finalize()
    else:
        body = b""
    return body + tail


# -- algorithm 2: keyed pixel permutation -----------------------------------


def _permutation(key: bytes, n_px: int) -> np.ndarray:
    """Fisher-Yates permutation of range(n_px) from the layer's draw stream."""
    perm = list(range(n_px))
    if n_px < 2:
        return np.asarray(perm, dtype=np.int64)
    draws = np.frombuffer(_hmac_stream(key, 4 * (n_px - 1)), dtype=">u4").tolist()
    k = 0
    for i in range(n_px - 1, 0, -1):
        j = draws[k] % (i + 1)
        k += 1
        perm[i], perm[j] = perm[j], perm[i]
    return np.asarray(perm, dtype=np.int64)


def permute_apply(data: bytes, key: bytes, zone_id: int) -> bytes:
    if len(data) % PIXEL_BYTES:
        raise InvalidInput("zone byte count is not a whole number of pixels")
    n_px = len(data) // PIXEL_BYTES
    perm = _permutation(key, n_px)
    px = np.frombuffer(data, dtype=np.uint8).reshape(n_px, PIXEL_BYTES)
    return px[perm].tobytes()


def permute_invert(data: bytes, key: bytes, zone_id: int) -> bytes:
    if len(data) % PIXEL_BYTES:
        raise InvalidInput("zone byte count is not a whole number of pixels")
    n_px = len(data) // PIXEL_BYTES
    perm = _permutation(key, n_px)
    inverse = np.empty(n_px, dtype=np.int64)
    inverse[perm] = np.arange(n_px, dtype=np.int64)
    px = np.frombuffer(data, dtype=np.uint8).reshape(n_px, PIXEL_BYTES)
    return px[inverse].tobytes()


# -- algorithm 3: keystream XOR ----------------------------------------------


def xor_apply(data: bytes, key: bytes, zone_id: int) -> bytes:
    return _xor_bytes(data, _hmac_stream(key, len(data)))


xor_invert = xor_apply  # involutive


_FORWARD = {ALG_CBC: cbc_apply, ALG_PERMUTE: permute_apply, ALG_XOR: xor_apply}
_INVERSE = {ALG_CBC: cbc_invert, ALG_PERMUTE: permute_invert, ALG_XOR: xor_invert}


def apply_layer(algorithm_id: int, data: bytes, key: bytes, zone_id: int) -> bytes:
    try:
        fn = _FORWARD[algorithm_id]
    except KeyError:
        raise InvalidInput(f"unknown algorithm_id {algorithm_id}") from None
    return fn(data, key, zone_id)


def invert_layer(algorithm_id: int, data: bytes, key: bytes, zone_id: int) -> bytes:
    try:
        fn = _INVERSE[algorithm_id]
    except KeyError:
        raise InvalidInput(f"unknown algorithm_id {algorithm_id}") from None
    return fn(data, key, zone_id)


def keystream(key: bytes, nbytes: int) -> bytes:
    """Public view of the XOR layer's keystream (used by verification tools)."""
    return _hmac_stream(key, nbytes)
