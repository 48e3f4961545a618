"""Single-organization role-based encryption (KEM side).

Master exponents (q = group order, g = source generator, gt = pair(g, g)):

    kem_exp   masks encapsulated keys:          kem_base  = gt^kem_exp
    link_exp  ties user keys to role keys:      link_base = gt^link_exp,
                                                link_point = g^link_exp
    gate_exp  guards the outsourced pub leg:    gate_point = g^gate_exp
    share_exp reserved for cross-org sharing (unused here, held alongside)

Role material, per role r with outside(r) = roles outside r's ancestor set
and seeds t[·] drawn per role:

    role public key point  = g^(sum of t over outside(r))
    ancestor points        = { l in ancestors(r): g^t[l] }
    role secret            = 1 / (sum of t over outside(r))   (mod q)

User material for identity `id` with private scalar u and idh = H(id):

    pub          = g^((u + idh) * link_exp / gate_exp)
    secret_point = g^(kem_exp * u)                      (private-cloud held)
    role key for role m = (secret_point * link_point^idh)^role_secret(m)
                        = g^((kem_exp*u + idh*link_exp) / outside-sum(m))

Encapsulation under role i with session exponent d and key K in GT:

    masked_key = K * (kem_base / link_base)^d
    user_leg   = gate_point^d
    lift[l]    = ancestor_point(l)^d          for l in ancestors(i)
    role_leg   = (role public key point)^d

Outsourced decryption by a holder of role x (an ancestor of i), with
one-shot blinding scalar v kept by the user:

    transformed role key = role_key^v
    cloud:  role_pairing = pair(role_leg * prod of lift over gamma(x, i),
                                transformed role key)
            pub_pairing  = pair(user_leg, pub)
    user:   K = masked_key / (role_pairing^(1/v) / pub_pairing)^(1/u)

Revocation removes pub from the org's bulletin board; the cloud refuses
to compute for absent public keys, and nothing is re-encrypted.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

from . import errors
from .algebra import G1Element, GTElement, PairingContext
from .hierarchy import RoleHierarchy, RoleId, gamma

__all__ = [
    "MasterSecret", "PublicParams", "RoleParams", "RolePublicKey",
    "RoleSecret", "UserCredential", "RoleKey", "KemCiphertext",
    "TransformedRoleKey", "PartialDecryption",
    "init_org", "gen_role_params", "gen_user_keys", "gen_role_key",
    "kem_encrypt", "transform_role_key", "cloud_partial_decrypt",
    "finalize_decrypt", "revoke_user",
]


@dataclass(frozen=True)
class MasterSecret:
    """Four master exponents; never serialized into public artifacts.
    gate_exp and share_exp are private-cloud resident."""

    kem_exp: int
    link_exp: int
    share_exp: int
    gate_exp: int


@dataclass(frozen=True)
class PublicParams:
    org: str
    ctx: PairingContext
    kem_base: GTElement
    link_base: GTElement
    gate_point: G1Element


@dataclass(frozen=True)
class RoleParams:
    """Secret per-role seeds; stays with the org administrator."""

    org: str
    seeds: Mapping[RoleId, int]


@dataclass(frozen=True)
class RolePublicKey:
    role: RoleId
    point: G1Element
    ancestor_points: Mapping[RoleId, G1Element]


@dataclass(frozen=True)
class RoleSecret:
    """Inverse of the role's outside-set seed sum; held by its role manager."""

    role: RoleId
    value: int


@dataclass(frozen=True)
class UserCredential:
    """priv stays with the user; secret_point is private-cloud resident;
    pub is published on the bulletin board."""

    org: str
    user_id: str
    priv: int
    pub: G1Element
    secret_point: G1Element


@dataclass(frozen=True)
class RoleKey:
    role: RoleId
    user_id: str
    point: G1Element


@dataclass(frozen=True)
class KemCiphertext:
    org: str
    role: RoleId
    masked_key: GTElement
    user_leg: G1Element
    role_leg: G1Element
    lift: Mapping[RoleId, G1Element]


@dataclass(frozen=True)
class TransformedRoleKey:
    role: RoleId
    user_id: str
    point: G1Element


@dataclass(frozen=True)
class PartialDecryption:
    role_pairing: GTElement
    pub_pairing: GTElement


def init_org(ctx: PairingContext, org: str, rng: random.Random
             ) -> tuple[MasterSecret, PublicParams, G1Element]:
    """Draw the master exponents and publish the org's public parameters.

    Returns (master secret, public params, link_point); link_point goes to
    the org's role managers only.
    """
    msk = MasterSecret(
        kem_exp=ctx.rand_nonzero_scalar(rng),
        link_exp=ctx.rand_nonzero_scalar(rng),
        share_exp=ctx.rand_nonzero_scalar(rng),
        gate_exp=ctx.rand_nonzero_scalar(rng),
    )
    pp = PublicParams(
        org=org,
        ctx=ctx,
        kem_base=ctx.exp(ctx.gt, msk.kem_exp),
        link_base=ctx.exp(ctx.gt, msk.link_exp),
        gate_point=ctx.exp(ctx.g, msk.gate_exp),
    )
    link_point = ctx.exp(ctx.g, msk.link_exp)
    return msk, pp, link_point


def gen_role_params(pp: PublicParams, h: RoleHierarchy, rng: random.Random
                    ) -> tuple[RoleParams, dict[RoleId, RolePublicKey],
                               dict[RoleId, RoleSecret]]:
    """Draw per-role seeds and derive every role's public key and secret.

    Rejects hierarchies in which some role's outside set is empty (its seed
    sum is 0 for any draw, e.g. a singleton hierarchy).  A zero sum from an
    unlucky draw resamples the whole seed vector.
    """
    ctx = pp.ctx
    if pp.org != h.org:
        raise ValueError(f"hierarchy for {h.org!r} does not match org {pp.org!r}")
    order = h.sorted_roles()
    if not order:
        raise errors.DegenerateHierarchy("hierarchy has no roles")
    for r in order:
        if not h.outside(r):
            raise errors.DegenerateHierarchy(
                f"{r} is an ancestor of every role; its parameter sum is always 0")

    while True:
        seeds = {r: ctx.rand_nonzero_scalar(rng) for r in order}
        sums = {r: sum(seeds[j] for j in h.outside(r)) % ctx.q for r in order}
        if all(sums.values()):
            break

    base_points = {r: ctx.exp(ctx.g, seeds[r]) for r in order}
    pks: dict[RoleId, RolePublicKey] = {}
    secrets: dict[RoleId, RoleSecret] = {}
    for r in order:
        pks[r] = RolePublicKey(
            role=r,
            point=ctx.exp(ctx.g, sums[r]),
            ancestor_points={l: base_points[l] for l in sorted(h.ancestors[r])},
        )
        secrets[r] = RoleSecret(role=r, value=pow(sums[r], -1, ctx.q))
    return RoleParams(org=pp.org, seeds=seeds), pks, secrets


def gen_user_keys(pp: PublicParams, msk: MasterSecret, user_id: str,
                  rng: random.Random) -> UserCredential:
    """Issue a registering user's private scalar, public key and secret point.

    Resamples the private scalar in the measure-zero event that
    priv + H(id) = 0 mod q, which would zero the public key.
    """
    ctx = pp.ctx
    idh = ctx.hash_to_scalar(user_id)
    while True:
        priv = ctx.rand_nonzero_scalar(rng)
        if (priv + idh) % ctx.q != 0:
            break
    pub_exp = (priv + idh) * msk.link_exp % ctx.q * pow(msk.gate_exp, -1, ctx.q)
    return UserCredential(
        org=pp.org,
        user_id=user_id,
        priv=priv,
        pub=ctx.exp(ctx.g, pub_exp),
        secret_point=ctx.exp(ctx.g, msk.kem_exp * priv),
    )


def gen_role_key(pp: PublicParams, role_secret: RoleSecret,
                 link_point: G1Element, secret_point: G1Element,
                 user_id: str) -> RoleKey:
    """Role manager issues a role key from the user's secret point.

    The caller (role manager) is responsible for authenticating the user
    before fetching secret_point from the private cloud.
    """
    ctx = pp.ctx
    idh = ctx.hash_to_scalar(user_id)
    folded = ctx.mul(secret_point, ctx.exp(link_point, idh))
    return RoleKey(role=role_secret.role, user_id=user_id,
                   point=ctx.exp(folded, role_secret.value))


def kem_encrypt(pp: PublicParams, rpk: RolePublicKey, rng: random.Random
                ) -> tuple[GTElement, KemCiphertext]:
    """Encapsulate a fresh target-group key under a role public key."""
    ctx = pp.ctx
    d = ctx.rand_nonzero_scalar(rng)
    key = ctx.sample_gt(rng)
    mask = ctx.exp(ctx.div(pp.kem_base, pp.link_base), d)
    ct = KemCiphertext(
        org=pp.org,
        role=rpk.role,
        masked_key=ctx.mul(key, mask),
        user_leg=ctx.exp(pp.gate_point, d),
        role_leg=ctx.exp(rpk.point, d),
        lift={l: ctx.exp(p, d) for l, p in rpk.ancestor_points.items()},
    )
    return key, ct


def transform_role_key(ctx: PairingContext, rk: RoleKey, rng: random.Random
                       ) -> tuple[TransformedRoleKey, int]:
    """Blind a role key for delegation to the cloud.

    The returned blinding scalar is single-use: keep it for
    :func:`finalize_decrypt` and destroy it afterwards.
    """
    blind = ctx.rand_nonzero_scalar(rng)
    trk = TransformedRoleKey(role=rk.role, user_id=rk.user_id,
                             point=ctx.exp(rk.point, blind))
    return trk, blind


def cloud_partial_decrypt(ctx: PairingContext, ct: KemCiphertext,
                          trk: TransformedRoleKey, pub: G1Element | None,
                          r_x: RoleId, h: RoleHierarchy) -> PartialDecryption:
    """Public cloud's two pairings over the retargeted ciphertext.

    Gate order: revocation (pub missing from the bulletin board), then role
    authorization, then component presence.  No exponentiations happen here.
    """
    if pub is None:
        raise errors.RevokedUser(f"user {trk.user_id!r} has no published key")
    h.require(r_x)
    h.require(ct.role)
    if r_x not in h.ancestors[ct.role]:
        raise errors.UnauthorizedRole(f"{r_x} is not an ancestor of {ct.role}")
    lift_set = gamma(h, r_x, ct.role)
    missing = lift_set - set(ct.lift)
    if missing:
        raise errors.MissingComponent(
            f"ciphertext lacks lift components for {sorted(missing)}")
    acc = ct.role_leg
    for l in sorted(lift_set):
        acc = ctx.mul(acc, ct.lift[l])
    return PartialDecryption(
        role_pairing=ctx.pair(acc, trk.point),
        pub_pairing=ctx.pair(ct.user_leg, pub),
    )


def finalize_decrypt(ctx: PairingContext, masked_key: GTElement,
                     pd: PartialDecryption, blind: int, priv: int) -> GTElement:
    """User's two target-group exponentiations recovering the key.

    A wrong key is not detectable here; it surfaces as an authentication
    failure when opening the payload.
    """
    unblinded = ctx.exp(pd.role_pairing, pow(blind, -1, ctx.q))
    ratio = ctx.div(unblinded, pd.pub_pairing)
    return ctx.div(masked_key, ctx.exp(ratio, pow(priv, -1, ctx.q)))


def revoke_user(board, user_id: str) -> None:
    """Remove the user's public key from the bulletin board.

    Subsequent partial-decryption requests for the user fail with
    RevokedUser.  A second call raises UnknownUser.
    """
    board.remove_user_pub(user_id)
