"""Hybrid data-encapsulation layer and the on-disk ciphertext container.

The KEM side produces a target-group element K; this module derives a
32-byte symmetric key from K's canonical bytes (HKDF-SHA256 under a fixed
context tag) and authenticate-encrypts the payload (AES-256-GCM, 12-byte
nonce).  Opening with the wrong K fails authentication, which is the sole
unauthorized-decryption signal at the user API.

Container layout (bit-exact):

    magic "RBEC" | version 0x01 | mode (0x01 single-org, 0x02 multi-org)
    | kdf id | aead id | element-encoding id
    | org [| partner org] | role name [| partner role name]      (u16 strings)
    | element records, fixed order:
        masked_key, user_leg, [partner_user_leg], role_leg,
        [partner_role_leg], u16 lift count, lift entries sorted by role
        name (u16 name | record) [, u16 partner count, partner entries]
    | nonce (12 bytes) | u32 body length | body

Algorithm ids are header constants so the choices travel with the file.
"""

from __future__ import annotations

import os
import random
import struct
from dataclasses import dataclass

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.hashes import SHA256
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from . import errors
from .algebra import (
    GTElement,
    PairingContext,
    Reader,
    TAG_G1,
    TAG_GT,
    encode_element,
    encode_str,
)
from .hierarchy import RoleId
from .mo_rbe import MultiKemCiphertext
from .so_rbe import KemCiphertext

__all__ = [
    "SealedPayload", "derive_dek", "seal", "open_sealed",
    "MODE_SINGLE_ORG", "MODE_MULTI_ORG",
    "pack_ciphertext", "unpack_ciphertext",
]

MAGIC = b"RBEC"
VERSION = 0x01
MODE_SINGLE_ORG = 0x01
MODE_MULTI_ORG = 0x02
KDF_HKDF_SHA256 = 0x01
AEAD_AES256_GCM = 0x01

NONCE_LEN = 12
DEK_LEN = 32
_KDF_TAG = b"rbe.dem-key.v1"


@dataclass(frozen=True)
class SealedPayload:
    """Authenticated payload: nonce plus AEAD body (ciphertext || tag)."""

    nonce: bytes
    body: bytes


def derive_dek(key: GTElement) -> bytes:
    """Deterministic 32-byte symmetric key from a target-group element."""
    return HKDF(algorithm=SHA256(), length=DEK_LEN, salt=None,
                info=_KDF_TAG).derive(key.serialize())


def seal(message: bytes, key: GTElement,
         rng: random.Random | None = None) -> SealedPayload:
    """Authenticate-encrypt message under the key derived from K.

    A fresh nonce is drawn per call; pass a seeded rng for reproducible
    containers, otherwise the OS source is used.
    """
    nonce = rng.randbytes(NONCE_LEN) if rng is not None else os.urandom(NONCE_LEN)
    body = AESGCM(derive_dek(key)).encrypt(nonce, message, None)
    return SealedPayload(nonce=nonce, body=body)


def open_sealed(sp: SealedPayload, key: GTElement) -> bytes:
    """Decrypt and verify; raises AuthFailure on wrong key or tampering."""
    try:
        return AESGCM(derive_dek(key)).decrypt(sp.nonce, sp.body, None)
    except InvalidTag as exc:
        raise errors.AuthFailure("payload authentication failed") from exc


# -- container ---------------------------------------------------------------

def _lift_block(lift: dict) -> bytes:
    out = struct.pack(">H", len(lift))
    for role in sorted(lift, key=lambda r: r.name):
        out += encode_str(role.name) + encode_element(lift[role])
    return out


def pack_ciphertext(kem: KemCiphertext | MultiKemCiphertext,
                    sealed: SealedPayload) -> bytes:
    """Serialize a KEM ciphertext and its sealed payload."""
    ctx = kem.masked_key.ctx
    multi = isinstance(kem, MultiKemCiphertext)
    head = MAGIC + bytes([VERSION, MODE_MULTI_ORG if multi else MODE_SINGLE_ORG,
                          KDF_HKDF_SHA256, AEAD_AES256_GCM,
                          ctx.backend.encoding_id])
    head += encode_str(kem.org)
    if multi:
        head += encode_str(kem.partner_org)
    head += encode_str(kem.role.name)
    if multi:
        head += encode_str(kem.partner_role.name)

    body = encode_element(kem.masked_key) + encode_element(kem.user_leg)
    if multi:
        body += encode_element(kem.partner_user_leg)
    body += encode_element(kem.role_leg)
    if multi:
        body += encode_element(kem.partner_role_leg)
    body += _lift_block(dict(kem.lift))
    if multi:
        body += _lift_block(dict(kem.partner_lift))

    if len(sealed.nonce) != NONCE_LEN:
        raise errors.EncodingError("nonce must be 12 bytes")
    tail = sealed.nonce + struct.pack(">I", len(sealed.body)) + sealed.body
    return head + body + tail


def _read_lift(r: Reader, ctx: PairingContext, org: str) -> dict:
    out = {}
    for _ in range(r.u16()):
        name = r.string()
        out[RoleId(org, name)] = r.record(ctx, expect=TAG_G1)
    return out


def unpack_ciphertext(ctx: PairingContext, data: bytes
                      ) -> tuple[KemCiphertext | MultiKemCiphertext, SealedPayload]:
    """Parse a container produced by :func:`pack_ciphertext`."""
    r = Reader(data)
    if r.raw(4) != MAGIC:
        raise errors.EncodingError("not a ciphertext container (bad magic)")
    version = r.u8()
    if version != VERSION:
        raise errors.EncodingError(f"unsupported container version {version}")
    mode = r.u8()
    if mode not in (MODE_SINGLE_ORG, MODE_MULTI_ORG):
        raise errors.EncodingError(f"unknown container mode {mode:#04x}")
    kdf, aead = r.u8(), r.u8()
    if (kdf, aead) != (KDF_HKDF_SHA256, AEAD_AES256_GCM):
        raise errors.EncodingError(f"unsupported algorithm ids kdf={kdf} aead={aead}")
    enc_id = r.u8()
    if enc_id != ctx.backend.encoding_id:
        raise errors.EncodingError(
            f"container encoding id {enc_id} does not match backend "
            f"{ctx.backend.name} ({ctx.backend.encoding_id})")

    multi = mode == MODE_MULTI_ORG
    org = r.string()
    partner_org = r.string() if multi else None
    role = RoleId(org, r.string())
    partner_role = RoleId(partner_org, r.string()) if multi else None

    masked_key = r.record(ctx, expect=TAG_GT)
    user_leg = r.record(ctx, expect=TAG_G1)
    partner_user_leg = r.record(ctx, expect=TAG_G1) if multi else None
    role_leg = r.record(ctx, expect=TAG_G1)
    partner_role_leg = r.record(ctx, expect=TAG_G1) if multi else None
    lift = _read_lift(r, ctx, org)
    partner_lift = _read_lift(r, ctx, partner_org) if multi else None

    nonce = r.raw(NONCE_LEN)
    body = r.raw(r.u32())
    r.expect_end()
    sealed = SealedPayload(nonce=nonce, body=body)

    if multi:
        kem: KemCiphertext | MultiKemCiphertext = MultiKemCiphertext(
            org=org, partner_org=partner_org, role=role,
            partner_role=partner_role, masked_key=masked_key,
            user_leg=user_leg, partner_user_leg=partner_user_leg,
            role_leg=role_leg, partner_role_leg=partner_role_leg,
            lift=lift, partner_lift=partner_lift)
    else:
        kem = KemCiphertext(org=org, role=role, masked_key=masked_key,
                            user_leg=user_leg, role_leg=role_leg, lift=lift)
    return kem, sealed
