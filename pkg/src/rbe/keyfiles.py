"""Tagged binary containers for key material.

Common header:

    magic "RBE1" | record type byte | element-encoding id
    | u16 org id | u16 subject id | type-specific body

Subject is the role name, user id, or partner org the record concerns
(empty when not applicable).  Bodies are built from the algebra wire
records, so scalar counts and element counts are auditable by walking the
file.
"""

from __future__ import annotations

import struct
from pathlib import Path

from . import errors
from .algebra import (
    PairingContext,
    Reader,
    TAG_SCALAR,
    encode_element,
    encode_scalar,
    encode_str,
)
from .hierarchy import RoleId
from .mo_rbe import ReKey
from .so_rbe import (
    MasterSecret,
    PublicParams,
    RoleKey,
    RoleParams,
    RolePublicKey,
    RoleSecret,
    UserCredential,
)

__all__ = [
    "TYPE_MASTER", "TYPE_PUBLIC_PARAMS", "TYPE_ROLE_PUBLIC_KEY",
    "TYPE_ROLE_SECRET", "TYPE_USER_CREDENTIAL", "TYPE_ROLE_KEY",
    "TYPE_REKEY", "TYPE_LINK_POINT",
    "save_master", "load_master", "inspect_master",
    "save_public_params", "load_public_params",
    "save_role_public_key", "load_role_public_key",
    "save_role_secret", "load_role_secret",
    "save_user_credential", "load_user_credential",
    "save_role_key", "load_role_key",
    "save_rekey", "load_rekey",
    "save_link_point", "load_link_point",
]

MAGIC = b"RBE1"
TYPE_MASTER = 0x01
TYPE_PUBLIC_PARAMS = 0x02
TYPE_ROLE_PUBLIC_KEY = 0x03
TYPE_ROLE_SECRET = 0x04
TYPE_USER_CREDENTIAL = 0x05
TYPE_ROLE_KEY = 0x06
TYPE_REKEY = 0x07
TYPE_LINK_POINT = 0x08


def _header(rtype: int, ctx: PairingContext, org: str, subject: str = "") -> bytes:
    return MAGIC + bytes([rtype, ctx.backend.encoding_id]) + \
        encode_str(org) + encode_str(subject)


def _open(ctx: PairingContext, data: bytes, rtype: int) -> tuple[Reader, str, str]:
    r = Reader(data)
    if r.raw(4) != MAGIC:
        raise errors.EncodingError("not a key file (bad magic)")
    got = r.u8()
    if got != rtype:
        raise errors.EncodingError(f"expected record type {rtype:#04x}, got {got:#04x}")
    enc_id = r.u8()
    if enc_id != ctx.backend.encoding_id:
        raise errors.EncodingError(
            f"key file encoding id {enc_id} does not match backend "
            f"{ctx.backend.name}")
    return r, r.string(), r.string()


def _write(path, data: bytes) -> None:
    Path(path).write_bytes(data)


# -- master secret (+ role seeds): exactly 4 + n_t scalar records ------------

def save_master(path, ctx: PairingContext, org: str, msk: MasterSecret,
                role_params: RoleParams | None = None) -> bytes:
    body = _header(TYPE_MASTER, ctx, org)
    for v in (msk.kem_exp, msk.link_exp, msk.share_exp, msk.gate_exp):
        body += encode_scalar(v, ctx)
    seeds = dict(role_params.seeds) if role_params is not None else {}
    body += struct.pack(">H", len(seeds))
    for role in sorted(seeds):
        body += encode_str(role.name) + encode_scalar(seeds[role], ctx)
    _write(path, body)
    return body


def load_master(ctx: PairingContext, path
                ) -> tuple[str, MasterSecret, RoleParams | None]:
    r, org, _ = _open(ctx, Path(path).read_bytes(), TYPE_MASTER)
    vals = [r.record(ctx, expect=TAG_SCALAR) for _ in range(4)]
    msk = MasterSecret(kem_exp=vals[0], link_exp=vals[1],
                       share_exp=vals[2], gate_exp=vals[3])
    n = r.u16()
    seeds = {}
    for _ in range(n):
        name = r.string()
        seeds[RoleId(org, name)] = r.record(ctx, expect=TAG_SCALAR)
    r.expect_end()
    rp = RoleParams(org=org, seeds=seeds) if seeds else None
    return org, msk, rp


def inspect_master(data: bytes) -> dict:
    """Structural audit: number of scalar records and role names carried."""
    r = Reader(data)
    r.raw(4)
    r.u8(), r.u8()
    org = r.string()
    r.string()
    scalars = 0
    for _ in range(4):
        tag = r.u8()
        r.raw(r.u16())
        scalars += 1 if tag == TAG_SCALAR else 0
    names = []
    for _ in range(r.u16()):
        names.append(r.string())
        tag = r.u8()
        r.raw(r.u16())
        scalars += 1 if tag == TAG_SCALAR else 0
    r.expect_end()
    return {"org": org, "scalars": scalars, "roles": names}


# -- public params ------------------------------------------------------------

def save_public_params(path, pp: PublicParams) -> bytes:
    body = _header(TYPE_PUBLIC_PARAMS, pp.ctx, pp.org)
    body += encode_element(pp.kem_base) + encode_element(pp.link_base)
    body += encode_element(pp.gate_point)
    _write(path, body)
    return body


def load_public_params(ctx: PairingContext, path) -> PublicParams:
    r, org, _ = _open(ctx, Path(path).read_bytes(), TYPE_PUBLIC_PARAMS)
    kem_base, link_base, gate_point = (r.record(ctx) for _ in range(3))
    r.expect_end()
    return PublicParams(org=org, ctx=ctx, kem_base=kem_base,
                        link_base=link_base, gate_point=gate_point)


# -- role public key ----------------------------------------------------------

def save_role_public_key(path, rpk: RolePublicKey) -> bytes:
    ctx = rpk.point.ctx
    body = _header(TYPE_ROLE_PUBLIC_KEY, ctx, rpk.role.org, rpk.role.name)
    body += encode_element(rpk.point)
    anc = dict(rpk.ancestor_points)
    body += struct.pack(">H", len(anc))
    for role in sorted(anc):
        body += encode_str(role.name) + encode_element(anc[role])
    _write(path, body)
    return body


def load_role_public_key(ctx: PairingContext, path) -> RolePublicKey:
    r, org, name = _open(ctx, Path(path).read_bytes(), TYPE_ROLE_PUBLIC_KEY)
    point = r.record(ctx)
    anc = {}
    for _ in range(r.u16()):
        rname = r.string()
        anc[RoleId(org, rname)] = r.record(ctx)
    r.expect_end()
    return RolePublicKey(role=RoleId(org, name), point=point, ancestor_points=anc)


# -- role secret ---------------------------------------------------------------

def save_role_secret(path, ctx: PairingContext, rs: RoleSecret) -> bytes:
    body = _header(TYPE_ROLE_SECRET, ctx, rs.role.org, rs.role.name)
    body += encode_scalar(rs.value, ctx)
    _write(path, body)
    return body


def load_role_secret(ctx: PairingContext, path) -> RoleSecret:
    r, org, name = _open(ctx, Path(path).read_bytes(), TYPE_ROLE_SECRET)
    value = r.record(ctx, expect=TAG_SCALAR)
    r.expect_end()
    return RoleSecret(role=RoleId(org, name), value=value)


# -- user credential ------------------------------------------------------------

def save_user_credential(path, cred: UserCredential) -> bytes:
    ctx = cred.pub.ctx
    body = _header(TYPE_USER_CREDENTIAL, ctx, cred.org, cred.user_id)
    body += encode_scalar(cred.priv, ctx)
    body += encode_element(cred.pub) + encode_element(cred.secret_point)
    _write(path, body)
    return body


def load_user_credential(ctx: PairingContext, path) -> UserCredential:
    r, org, user_id = _open(ctx, Path(path).read_bytes(), TYPE_USER_CREDENTIAL)
    priv = r.record(ctx, expect=TAG_SCALAR)
    pub = r.record(ctx)
    secret_point = r.record(ctx)
    r.expect_end()
    return UserCredential(org=org, user_id=user_id, priv=priv, pub=pub,
                          secret_point=secret_point)


# -- role key -------------------------------------------------------------------

def save_role_key(path, rk: RoleKey) -> bytes:
    ctx = rk.point.ctx
    body = _header(TYPE_ROLE_KEY, ctx, rk.role.org, rk.user_id)
    body += encode_str(rk.role.name) + encode_element(rk.point)
    _write(path, body)
    return body


def load_role_key(ctx: PairingContext, path) -> RoleKey:
    r, org, user_id = _open(ctx, Path(path).read_bytes(), TYPE_ROLE_KEY)
    name = r.string()
    point = r.record(ctx)
    r.expect_end()
    return RoleKey(role=RoleId(org, name), user_id=user_id, point=point)


# -- rekey (private-cloud store entry) -------------------------------------------

def save_rekey(path, rekey: ReKey) -> bytes:
    ctx = rekey.point.ctx
    body = _header(TYPE_REKEY, ctx, rekey.org, rekey.partner_org)
    body += encode_element(rekey.point)
    _write(path, body)
    return body


def load_rekey(ctx: PairingContext, path) -> ReKey:
    r, org, partner = _open(ctx, Path(path).read_bytes(), TYPE_REKEY)
    point = r.record(ctx)
    r.expect_end()
    return ReKey(org=org, partner_org=partner, point=point)


# -- link point (role-manager provisioning) ---------------------------------------

def save_link_point(path, ctx: PairingContext, org: str, point) -> bytes:
    body = _header(TYPE_LINK_POINT, ctx, org) + encode_element(point)
    _write(path, body)
    return body


def load_link_point(ctx: PairingContext, path):
    r, _, _ = _open(ctx, Path(path).read_bytes(), TYPE_LINK_POINT)
    point = r.record(ctx)
    r.expect_end()
    return point
