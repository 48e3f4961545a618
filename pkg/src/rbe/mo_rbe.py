"""Multi-organization extension: joint keys, shared-secret agreement,
ciphertext translation, and the three-party outsourced decryption flow.

Org k encrypts for its own role i and partner org k''s role j by reusing
one session exponent d across both halves:

    masked_key       = K * (kem_base_k / link_base_k)^d
    user_leg         = gate_point_k^d        partner_user_leg = gate_point_k'^d
    role_leg         = pk_point(i)^d         partner_role_leg = pk_point(j)^d
    lift / partner_lift as in the single-org form, over each role's ancestors

Agreement (one ceremony per ordered pair; enables k''s users on k's data):

    long-term secret (made by k') = g^((kem_k' - link_k') * share_k')
    rekey (kept in k's private cloud)
        = long-term secret / g^(kem_k - link_k)

Decryption by a k'-user holding role x (ancestor of j in k''s hierarchy):

    k 's private cloud:  translated = masked_key
                                      * pair(rekey, user_leg^(1/gate_k))
                                    = K * gt^((kem_k'-link_k')*share_k'*d)
    k''s private cloud:  tdk = transformed_role_key^share_k'
                         blinded_pub = pub^share_k'
    public cloud:        role_pairing = pair(partner_role_leg * lifts, tdk)
                         pub_pairing  = pair(partner_user_leg, blinded_pub)
    user:                K = translated / (role_pairing^(1/v)
                                           / pub_pairing)^(1/priv)

k's own users ignore the partner half entirely and run the single-org
pipeline against ``MultiKemCiphertext.so_view()``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

from . import errors, so_rbe
from .algebra import G1Element, GTElement, PairingContext
from .hierarchy import RoleHierarchy, RoleId, gamma
from .so_rbe import (
    KemCiphertext,
    MasterSecret,
    PartialDecryption,
    PublicParams,
    RolePublicKey,
    TransformedRoleKey,
)

__all__ = [
    "JointRolePublicKey", "MultiKemCiphertext", "LongTermSecret", "ReKey",
    "TempDecryptionKey", "make_joint_role_key", "multi_kem_encrypt",
    "make_long_term_secret", "make_rekey", "translate_ciphertext",
    "make_temp_decryption_key", "multi_cloud_partial_decrypt",
    "multi_finalize_decrypt",
]


@dataclass(frozen=True)
class JointRolePublicKey:
    """Concatenation of two orgs' role public keys; the first is the
    encryptor's side.  Construction performs no group operations."""

    enc_side: RolePublicKey
    partner_side: RolePublicKey


@dataclass(frozen=True)
class MultiKemCiphertext:
    org: str
    partner_org: str
    role: RoleId
    partner_role: RoleId
    masked_key: GTElement
    user_leg: G1Element
    partner_user_leg: G1Element
    role_leg: G1Element
    partner_role_leg: G1Element
    lift: Mapping[RoleId, G1Element]
    partner_lift: Mapping[RoleId, G1Element]

    def so_view(self) -> KemCiphertext:
        """Encrypting-org projection; feeds the single-org decryption path."""
        return KemCiphertext(org=self.org, role=self.role,
                             masked_key=self.masked_key, user_leg=self.user_leg,
                             role_leg=self.role_leg, lift=self.lift)


@dataclass(frozen=True)
class LongTermSecret:
    """g^((kem - link) * share) of the issuing org; sent to partner admins."""

    org: str
    point: G1Element


@dataclass(frozen=True)
class ReKey:
    """Translation key for the ordered pair (org, partner_org); resident in
    org's private cloud.  Lets partner_org's users finish decryption."""

    org: str
    partner_org: str
    point: G1Element


@dataclass(frozen=True)
class TempDecryptionKey:
    role: RoleId
    user_id: str
    point: G1Element
    blinded_pub: G1Element


def make_joint_role_key(enc_side: RolePublicKey,
                        partner_side: RolePublicKey) -> JointRolePublicKey:
    """Join two published role public keys from different organizations."""
    if enc_side.role.org == partner_side.role.org:
        raise errors.SameOrgJointKey(
            "both roles belong to {0}; same-org requests use the single-org "
            "scheme".format(enc_side.role.org))
    return JointRolePublicKey(enc_side=enc_side, partner_side=partner_side)


def multi_kem_encrypt(pp: PublicParams, partner_pp: PublicParams,
                      joint: JointRolePublicKey, rng: random.Random
                      ) -> tuple[GTElement, MultiKemCiphertext]:
    """Encapsulate one key against both halves of a joint role public key."""
    ctx = pp.ctx
    if pp.org != joint.enc_side.role.org:
        raise ValueError("encryptor public params do not match the joint key")
    if partner_pp.org != joint.partner_side.role.org:
        raise ValueError("partner public params do not match the joint key")
    d = ctx.rand_nonzero_scalar(rng)
    key = ctx.sample_gt(rng)
    mask = ctx.exp(ctx.div(pp.kem_base, pp.link_base), d)
    ct = MultiKemCiphertext(
        org=pp.org,
        partner_org=partner_pp.org,
        role=joint.enc_side.role,
        partner_role=joint.partner_side.role,
        masked_key=ctx.mul(key, mask),
        user_leg=ctx.exp(pp.gate_point, d),
        partner_user_leg=ctx.exp(partner_pp.gate_point, d),
        role_leg=ctx.exp(joint.enc_side.point, d),
        partner_role_leg=ctx.exp(joint.partner_side.point, d),
        lift={l: ctx.exp(p, d) for l, p in joint.enc_side.ancestor_points.items()},
        partner_lift={l: ctx.exp(p, d)
                      for l, p in joint.partner_side.ancestor_points.items()},
    )
    return key, ct


def make_long_term_secret(ctx: PairingContext, org: str,
                          msk: MasterSecret) -> LongTermSecret:
    """Issuing org's half of the agreement ceremony (one exponentiation)."""
    exp = (msk.kem_exp - msk.link_exp) * msk.share_exp % ctx.q
    return LongTermSecret(org=org, point=ctx.exp(ctx.g, exp))


def make_rekey(ctx: PairingContext, org: str, msk: MasterSecret,
               lts: LongTermSecret) -> ReKey:
    """Receiving org folds its own mask out of the partner's long-term
    secret; the result lives in the receiving org's private cloud."""
    own = ctx.exp(ctx.g, (msk.kem_exp - msk.link_exp) % ctx.q)
    return ReKey(org=org, partner_org=lts.org, point=ctx.div(lts.point, own))


def translate_ciphertext(ctx: PairingContext, masked_key: GTElement,
                         user_leg: G1Element, rekey: ReKey | None,
                         gate_exp: int) -> GTElement:
    """Re-encrypt the masked key for the partner org (private-cloud step:
    one exponentiation plus one pairing).

    Depends only on the ciphertext and the org pair, never on which user
    later finishes the decryption.
    """
    if rekey is None:
        raise errors.MissingRekey("no re-encryption key for the requested org pair")
    session_point = ctx.exp(user_leg, pow(gate_exp, -1, ctx.q))
    return ctx.mul(masked_key, ctx.pair(rekey.point, session_point))


def make_temp_decryption_key(ctx: PairingContext, trk: TransformedRoleKey,
                             pub: G1Element | None, share_exp: int
                             ) -> TempDecryptionKey:
    """Partner org's private cloud blinds the delegated key material with
    its share exponent (two exponentiations).  Revocation gates first."""
    if pub is None:
        raise errors.RevokedUser(f"user {trk.user_id!r} has no published key")
    return TempDecryptionKey(
        role=trk.role,
        user_id=trk.user_id,
        point=ctx.exp(trk.point, share_exp),
        blinded_pub=ctx.exp(pub, share_exp),
    )


def multi_cloud_partial_decrypt(ctx: PairingContext, ct: MultiKemCiphertext,
                                tdk: TempDecryptionKey, r_x: RoleId,
                                h: RoleHierarchy) -> PartialDecryption:
    """Public cloud's two pairings over the partner half of the ciphertext."""
    h.require(r_x)
    h.require(ct.partner_role)
    if r_x not in h.ancestors[ct.partner_role]:
        raise errors.UnauthorizedRole(
            f"{r_x} is not an ancestor of {ct.partner_role}")
    lift_set = gamma(h, r_x, ct.partner_role)
    missing = lift_set - set(ct.partner_lift)
    if missing:
        raise errors.MissingComponent(
            f"ciphertext lacks lift components for {sorted(missing)}")
    acc = ct.partner_role_leg
    for l in sorted(lift_set):
        acc = ctx.mul(acc, ct.partner_lift[l])
    return PartialDecryption(
        role_pairing=ctx.pair(acc, tdk.point),
        pub_pairing=ctx.pair(ct.partner_user_leg, tdk.blinded_pub),
    )


def multi_finalize_decrypt(ctx: PairingContext, translated_key: GTElement,
                           pd: PartialDecryption, blind: int,
                           priv: int) -> GTElement:
    """Same unblinding arithmetic as the single-org finalize, applied to the
    translated masked key."""
    return so_rbe.finalize_decrypt(ctx, translated_key, pd, blind, priv)
