"""Deterministic in-process simulation of the six protocol entities.

Entities: system administrator (one per org), role managers (one per role),
private cloud (one per org), one shared public cloud, data owners, users.
Every inter-entity transfer is appended to a transcript as a typed message;
secret residency is auditable after the fact (:func:`audit_secret_residency`)
against an allow-list of the provisioning flows the protocol prescribes.

The simulator is a single-threaded synchronous message loop: runs are
byte-for-byte reproducible given a seed.  The two private-cloud legs of a
cross-org decryption are independent (no shared mutable state) and execute
here in a fixed order (translation first) with the public cloud joining
both results; a concurrent runtime could overlap them freely.

Secure channels are modeled as tamper-free delivery; authentication is a
pluggable stub that passes exactly for registered, unrevoked users.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Any, Callable

from . import envelope, errors, mo_rbe, so_rbe
from .algebra import G1Element, GTElement, PairingContext, setup_pairing
from .hierarchy import RoleHierarchy, RoleId, parse_hierarchy_text

__all__ = [
    "BulletinBoard", "Simulation", "Transcript", "Message", "Event",
    "run_scenario", "parse_scenario", "audit_secret_residency",
    "authenticate", "CANNED_SCENARIOS", "FIG1_HIERARCHY_TEXT",
    "SECRET_FIELD_RULES",
]


# -- bulletin board -----------------------------------------------------------

class BulletinBoard:
    """Per-org public registry.  Removing a user's public key is the
    revocation primitive; reads after removal never observe the key."""

    def __init__(self, org: str):
        self.org = org
        self._params: so_rbe.PublicParams | None = None
        self._user_pubs: dict[str, G1Element] = {}
        self._role_pubs: dict[RoleId, so_rbe.RolePublicKey] = {}

    def publish_params(self, pp: so_rbe.PublicParams) -> None:
        self._params = pp

    def params(self) -> so_rbe.PublicParams:
        if self._params is None:
            raise errors.ProtocolOrderError(f"org {self.org!r} not initialized")
        return self._params

    def publish_user_pub(self, user_id: str, pub: G1Element) -> None:
        self._user_pubs[user_id] = pub

    def get_user_pub(self, user_id: str) -> G1Element | None:
        return self._user_pubs.get(user_id)

    def remove_user_pub(self, user_id: str) -> None:
        if user_id not in self._user_pubs:
            raise errors.UnknownUser(f"no published key for {user_id!r}")
        del self._user_pubs[user_id]

    def publish_role_pub(self, rpk: so_rbe.RolePublicKey) -> None:
        self._role_pubs[rpk.role] = rpk

    def get_role_pub(self, role: RoleId) -> so_rbe.RolePublicKey:
        if role not in self._role_pubs:
            raise errors.UnknownRole(f"no published role public key for {role}")
        return self._role_pubs[role]


# -- transcript ----------------------------------------------------------------

def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:12]


def _summarize(value: Any) -> str:
    if isinstance(value, (G1Element, GTElement)):
        return "elem#" + _digest(value.serialize())
    if isinstance(value, bytes):
        return f"bytes:{len(value)}#" + _digest(value)
    if isinstance(value, int):
        return "scalar#" + _digest(value.to_bytes(64, "big", signed=True))
    if isinstance(value, str):
        return value
    return "obj#" + _digest(repr(value).encode())


@dataclass(frozen=True)
class Message:
    seq: int
    sender: str
    receiver: str
    kind: str
    fields: tuple[tuple[str, str], ...]

    def to_text(self) -> str:
        body = " ".join(f"{k}={v}" for k, v in self.fields)
        return f"{self.seq:04d} {self.sender} -> {self.receiver} [{self.kind}] {body}"


@dataclass(frozen=True)
class Event:
    seq: int
    entity: str
    kind: str
    detail: str

    def to_text(self) -> str:
        return f"{self.seq:04d} {self.entity} :: {self.kind} {self.detail}"


@dataclass
class Transcript:
    seed: int
    steps: list = field(default_factory=list)

    def messages(self) -> list[Message]:
        return [s for s in self.steps if isinstance(s, Message)]

    def events(self) -> list[Event]:
        return [s for s in self.steps if isinstance(s, Event)]

    def to_text(self) -> str:
        lines = [f"# transcript seed={self.seed}"]
        lines += [s.to_text() for s in self.steps]
        return "\n".join(lines) + "\n"


# -- residency audit -------------------------------------------------------------

#: Allow-list of who may send which secret field to whom.  An empty set means
#: the field must never appear in any message.
SECRET_FIELD_RULES: dict[str, frozenset[tuple[str, str]]] = {
    "kem_exp": frozenset(),
    "link_exp": frozenset(),
    "master_secret": frozenset(),
    "role_seeds": frozenset(),
    "blind": frozenset(),
    "share_exp": frozenset({("SA", "PrivateCloud")}),
    "gate_exp": frozenset({("SA", "PrivateCloud")}),
    "secret_point": frozenset({("SA", "PrivateCloud"),
                               ("PrivateCloud", "RoleManager")}),
    "priv": frozenset({("SA", "User")}),
    "role_secret": frozenset({("SA", "RoleManager")}),
    "link_point": frozenset({("SA", "RoleManager")}),
    "role_key": frozenset({("RoleManager", "User")}),
    "rekey": frozenset({("SA", "PrivateCloud")}),
    "long_term_secret": frozenset({("SA", "SA")}),
}


def _kind_of(entity: str) -> str:
    return entity.split(":", 1)[0]


def audit_secret_residency(transcript: Transcript) -> list[str]:
    """Return one violation per message field that carried a secret outside
    its residency allow-list, plus any blinding scalar left uncleared."""
    violations = []
    for msg in transcript.messages():
        route = (_kind_of(msg.sender), _kind_of(msg.receiver))
        for name, _ in msg.fields:
            allowed = SECRET_FIELD_RULES.get(name)
            if allowed is not None and route not in allowed:
                violations.append(
                    f"step {msg.seq}: {name} sent {msg.sender} -> {msg.receiver}")
    stored: dict[str, int] = {}
    for ev in transcript.events():
        if ev.kind == "blind-stored":
            stored[ev.detail] = stored.get(ev.detail, 0) + 1
        elif ev.kind == "blind-cleared":
            stored[ev.detail] = stored.get(ev.detail, 0) - 1
    for detail, count in sorted(stored.items()):
        if count != 0:
            violations.append(f"blinding scalar not cleared: {detail}")
    return violations


# -- entities ----------------------------------------------------------------------

@dataclass
class SystemAdministrator:
    org: str
    msk: so_rbe.MasterSecret
    pp: so_rbe.PublicParams
    link_point: G1Element
    role_params: so_rbe.RoleParams | None = None


@dataclass
class PrivateCloud:
    org: str
    share_exp: int
    gate_exp: int
    secret_points: dict[str, G1Element] = field(default_factory=dict)
    rekeys: dict[str, mo_rbe.ReKey] = field(default_factory=dict)


@dataclass
class RoleManager:
    role: RoleId
    role_secret: so_rbe.RoleSecret
    link_point: G1Element


@dataclass
class User:
    org: str
    user_id: str
    priv: int
    role_keys: dict[RoleId, so_rbe.RoleKey] = field(default_factory=dict)
    session: dict[str, int] = field(default_factory=dict)


class Phase(IntEnum):
    CREATED = 0
    INITIALIZED = 1
    ROLES_MANAGED = 2


@dataclass
class Org:
    name: str
    board: BulletinBoard
    sa: SystemAdministrator
    private_cloud: PrivateCloud
    phase: Phase = Phase.INITIALIZED
    hierarchy: RoleHierarchy | None = None
    role_managers: dict[RoleId, RoleManager] = field(default_factory=dict)
    users: dict[str, User] = field(default_factory=dict)


def authenticate(org: "Org", user_id: str) -> bool:
    """Authentication stub: passes iff the id is registered and unrevoked."""
    return user_id in org.users and org.board.get_user_pub(user_id) is not None


# -- simulation -------------------------------------------------------------------

class Simulation:
    """Scripted multi-entity protocol run over one pairing context."""

    def __init__(self, seed: int, security_level: int = 128,
                 backend: str | None = None, workdir: str | Path | None = None,
                 ledger: bool = False,
                 authenticator: Callable[[Org, str], bool] = authenticate):
        self.seed = seed
        self.rng = random.Random(seed)
        self.ctx = setup_pairing(security_level, backend=backend, ledger=ledger)
        self.workdir = Path(workdir) if workdir is not None else None
        self.orgs: dict[str, Org] = {}
        self.cloud_store: dict[str, bytes] = {}
        self.transcript = Transcript(seed=seed)
        self._seq = 0
        self._authenticate = authenticator

    # -- transcript plumbing ------------------------------------------------
    def _send(self, sender: str, receiver: str, kind: str, **payload) -> None:
        self._seq += 1
        fields = tuple((k, _summarize(v)) for k, v in payload.items())
        self.transcript.steps.append(
            Message(self._seq, sender, receiver, kind, fields))

    def _event(self, entity: str, kind: str, detail: str = "") -> None:
        self._seq += 1
        self.transcript.steps.append(Event(self._seq, entity, kind, detail))

    def inject_message(self, sender: str, receiver: str, kind: str,
                       **payload) -> None:
        """Fault injection for residency audits: record an arbitrary message."""
        self._send(sender, receiver, kind, **payload)

    # -- helpers ---------------------------------------------------------------
    def _org(self, name: str) -> Org:
        if name not in self.orgs:
            raise errors.ProtocolOrderError(f"org {name!r} was never initialized")
        return self.orgs[name]

    def _require_phase(self, org: Org, phase: Phase, step: str) -> None:
        if org.phase < phase:
            raise errors.ProtocolOrderError(
                f"{step} requires phase {phase.name} but org {org.name!r} "
                f"is at {org.phase.name}")

    def _user(self, org: Org, user_id: str) -> User:
        if user_id not in org.users:
            raise errors.ProtocolOrderError(
                f"user {user_id!r} is not registered with org {org.name!r}")
        return org.users[user_id]

    # -- phase: system initialization ------------------------------------------
    def init_org(self, name: str) -> Org:
        if name in self.orgs:
            raise errors.ProtocolOrderError(f"org {name!r} already initialized")
        msk, pp, link_point = so_rbe.init_org(self.ctx, name, self.rng)
        sa = f"SA:{name}"
        board = BulletinBoard(name)
        board.publish_params(pp)
        org = Org(name=name, board=board,
                  sa=SystemAdministrator(name, msk, pp, link_point),
                  private_cloud=PrivateCloud(name, msk.share_exp, msk.gate_exp))
        self.orgs[name] = org
        # master-secret split: the exchange and gate exponents live in the
        # private cloud, never anywhere else.
        self._send(sa, f"PrivateCloud:{name}", "provision-private-cloud",
                   share_exp=msk.share_exp, gate_exp=msk.gate_exp)
        self._event(sa, "publish-params", name)
        return org

    # -- phase: manage role -------------------------------------------------------
    def add_hierarchy(self, org_name: str, hierarchy: RoleHierarchy) -> None:
        org = self._org(org_name)
        self._require_phase(org, Phase.INITIALIZED, "add-hierarchy")
        if org.hierarchy is not None:
            raise errors.ProtocolOrderError(
                f"org {org_name!r} already has a hierarchy")
        if hierarchy.org != org_name:
            raise ValueError("hierarchy org mismatch")
        rp, pks, secrets = so_rbe.gen_role_params(org.sa.pp, hierarchy, self.rng)
        org.hierarchy = hierarchy
        org.sa.role_params = rp
        sa = f"SA:{org_name}"
        for role in hierarchy.sorted_roles():
            org.board.publish_role_pub(pks[role])
            org.role_managers[role] = RoleManager(
                role=role, role_secret=secrets[role],
                link_point=org.sa.link_point)
            self._send(sa, f"RoleManager:{org_name}:{role.name}",
                       "provision-role-manager",
                       role_secret=secrets[role], link_point=org.sa.link_point)
        self._event(sa, "publish-role-pubs", f"{org_name} n={len(pks)}")
        org.phase = Phase.ROLES_MANAGED

    # -- phase: key generation ------------------------------------------------------
    def register(self, org_name: str, user_id: str) -> None:
        org = self._org(org_name)
        self._require_phase(org, Phase.ROLES_MANAGED, "register")
        if user_id in org.users:
            raise errors.ProtocolOrderError(
                f"user {user_id!r} already registered with {org_name!r}")
        cred = so_rbe.gen_user_keys(org.sa.pp, org.sa.msk, user_id, self.rng)
        org.users[user_id] = User(org=org_name, user_id=user_id, priv=cred.priv)
        org.board.publish_user_pub(user_id, cred.pub)
        sa = f"SA:{org_name}"
        self._send(sa, f"User:{org_name}:{user_id}", "issue-private-key",
                   priv=cred.priv)
        self._send(sa, f"PrivateCloud:{org_name}", "store-user-secret",
                   user=user_id, secret_point=cred.secret_point)
        org.private_cloud.secret_points[user_id] = cred.secret_point
        self._event(sa, "publish-pub", f"{org_name}/{user_id}")

    def assign(self, org_name: str, user_id: str, role_name: str) -> None:
        org = self._org(org_name)
        self._require_phase(org, Phase.ROLES_MANAGED, "assign")
        user = self._user(org, user_id)
        role = org.hierarchy.role(role_name)
        manager = org.role_managers[role]
        rm = f"RoleManager:{org_name}:{role_name}"
        if not self._authenticate(org, user_id):
            raise errors.AuthenticationFailed(
                f"role manager rejected {user_id!r}")
        secret_point = org.private_cloud.secret_points[user_id]
        self._send(f"PrivateCloud:{org_name}", rm, "fetch-user-secret",
                   user=user_id, secret_point=secret_point)
        rk = so_rbe.gen_role_key(org.sa.pp, manager.role_secret,
                                 manager.link_point, secret_point, user_id)
        user.role_keys[role] = rk
        self._send(rm, f"User:{org_name}:{user_id}", "issue-role-key",
                   role_key=rk)

    # -- phase: encryption -------------------------------------------------------------
    def encrypt(self, org_name: str, role_name: str, plaintext: bytes,
                name: str) -> bytes:
        org = self._org(org_name)
        self._require_phase(org, Phase.ROLES_MANAGED, "encrypt")
        role = org.hierarchy.role(role_name)
        rpk = org.board.get_role_pub(role)
        key, kem = so_rbe.kem_encrypt(org.sa.pp, rpk, self.rng)
        sealed = envelope.seal(plaintext, key, self.rng)
        container = envelope.pack_ciphertext(kem, sealed)
        self._store_container(f"DataOwner:{org_name}", name, container)
        return container

    def mencrypt(self, org_name: str, role_name: str, partner_org_name: str,
                 partner_role_name: str, plaintext: bytes, name: str) -> bytes:
        org = self._org(org_name)
        partner = self._org(partner_org_name)
        self._require_phase(org, Phase.ROLES_MANAGED, "mencrypt")
        self._require_phase(partner, Phase.ROLES_MANAGED, "mencrypt")
        joint = mo_rbe.make_joint_role_key(
            org.board.get_role_pub(org.hierarchy.role(role_name)),
            partner.board.get_role_pub(partner.hierarchy.role(partner_role_name)))
        key, kem = mo_rbe.multi_kem_encrypt(org.sa.pp, partner.sa.pp, joint,
                                            self.rng)
        sealed = envelope.seal(plaintext, key, self.rng)
        container = envelope.pack_ciphertext(kem, sealed)
        self._store_container(f"DataOwner:{org_name}", name, container)
        return container

    def _store_container(self, owner: str, name: str, container: bytes) -> None:
        self.cloud_store[name] = container
        self._send(owner, "PublicCloud", "upload", name=name, container=container)
        if self.workdir is not None:
            (self.workdir / name).write_bytes(container)

    # -- phase: decryption ---------------------------------------------------------------
    def _fetch_container(self, name: str) -> bytes:
        if name not in self.cloud_store:
            raise errors.ProtocolOrderError(f"no ciphertext named {name!r}")
        return self.cloud_store[name]

    def decrypt(self, org_name: str, user_id: str, role_name: str,
                name: str) -> bytes:
        """Single-org outsourced decryption (also the encrypting-org path
        for cross-org ciphertexts)."""
        org = self._org(org_name)
        user = self._user(org, user_id)
        role = org.hierarchy.role(role_name)
        if role not in user.role_keys:
            raise errors.ProtocolOrderError(
                f"user {user_id!r} holds no role key for {role}")
        kem, sealed = envelope.unpack_ciphertext(self.ctx,
                                                 self._fetch_container(name))
        if isinstance(kem, mo_rbe.MultiKemCiphertext):
            if kem.org != org_name:
                return self._multi_decrypt(org, user, role, kem, sealed, name)
            kem = kem.so_view()
        elif kem.org != org_name:
            raise errors.UnauthorizedRole(
                f"ciphertext belongs to org {kem.org!r}")

        user_ent = f"User:{org_name}:{user_id}"
        trk, blind = so_rbe.transform_role_key(self.ctx,
                                               user.role_keys[role], self.rng)
        user.session[name] = blind
        self._event(user_ent, "blind-stored", f"{user_ent}/{name}")
        self._send(user_ent, "PublicCloud", "decrypt-request",
                   name=name, role=str(role), trk=trk.point)
        try:
            pub = org.board.get_user_pub(user_id)
            pd = so_rbe.cloud_partial_decrypt(self.ctx, kem, trk, pub, role,
                                              org.hierarchy)
        except errors.RbeError as exc:
            self._event("PublicCloud", "decrypt-refused",
                        f"{type(exc).__name__}: {exc}")
            user.session.pop(name, None)
            self._event(user_ent, "blind-cleared", f"{user_ent}/{name}")
            raise
        self._send("PublicCloud", user_ent, "partial-decryption",
                   masked_key=kem.masked_key, role_pairing=pd.role_pairing,
                   pub_pairing=pd.pub_pairing, sealed=sealed.body)
        key = so_rbe.finalize_decrypt(self.ctx, kem.masked_key, pd,
                                      user.session.pop(name), user.priv)
        self._event(user_ent, "blind-cleared", f"{user_ent}/{name}")
        plaintext = envelope.open_sealed(sealed, key)
        self._event(user_ent, "decrypt-ok", name)
        return plaintext

    def mdecrypt(self, org_name: str, user_id: str, role_name: str,
                 name: str) -> bytes:
        """Cross-org decryption entry point; encrypting-org users fall back
        to the single-org path."""
        org = self._org(org_name)
        user = self._user(org, user_id)
        role = org.hierarchy.role(role_name)
        if role not in user.role_keys:
            raise errors.ProtocolOrderError(
                f"user {user_id!r} holds no role key for {role}")
        kem, sealed = envelope.unpack_ciphertext(self.ctx,
                                                 self._fetch_container(name))
        if not isinstance(kem, mo_rbe.MultiKemCiphertext):
            raise errors.ProtocolOrderError(f"{name!r} is a single-org ciphertext")
        if kem.org == org_name:
            return self.decrypt(org_name, user_id, role_name, name)
        return self._multi_decrypt(org, user, role, kem, sealed, name)

    def _multi_decrypt(self, org: Org, user: User, role: RoleId,
                       kem: mo_rbe.MultiKemCiphertext,
                       sealed: envelope.SealedPayload, name: str) -> bytes:
        data_org = self._org(kem.org)
        user_ent = f"User:{org.name}:{user.user_id}"
        trk, blind = so_rbe.transform_role_key(self.ctx, user.role_keys[role],
                                               self.rng)
        user.session[name] = blind
        self._event(user_ent, "blind-stored", f"{user_ent}/{name}")
        self._send(user_ent, "PublicCloud", "decrypt-request",
                   name=name, role=str(role), trk=trk.point)
        try:
            # Leg 1: encrypting org's private cloud re-encrypts the masked key.
            self._send("PublicCloud", f"PrivateCloud:{data_org.name}",
                       "translate-request", name=name, partner=org.name,
                       masked_key=kem.masked_key, user_leg=kem.user_leg)
            rekey = data_org.private_cloud.rekeys.get(org.name)
            translated = mo_rbe.translate_ciphertext(
                self.ctx, kem.masked_key, kem.user_leg, rekey,
                data_org.private_cloud.gate_exp)
            self._send(f"PrivateCloud:{data_org.name}", "PublicCloud",
                       "translated-key", name=name, translated=translated)
            # Leg 2: the user's home private cloud blinds the delegated key.
            self._send("PublicCloud", f"PrivateCloud:{org.name}",
                       "tdk-request", user=user.user_id, trk=trk.point)
            pub = org.board.get_user_pub(user.user_id)
            tdk = mo_rbe.make_temp_decryption_key(
                self.ctx, trk, pub, org.private_cloud.share_exp)
            self._send(f"PrivateCloud:{org.name}", "PublicCloud",
                       "tdk-response", tdk=tdk.point, blinded_pub=tdk.blinded_pub)
            # Join: the public cloud pairs over the partner half.
            pd = mo_rbe.multi_cloud_partial_decrypt(self.ctx, kem, tdk, role,
                                                    org.hierarchy)
        except errors.RbeError as exc:
            self._event("PublicCloud", "decrypt-refused",
                        f"{type(exc).__name__}: {exc}")
            user.session.pop(name, None)
            self._event(user_ent, "blind-cleared", f"{user_ent}/{name}")
            raise
        self._send("PublicCloud", user_ent, "partial-decryption",
                   translated=translated, role_pairing=pd.role_pairing,
                   pub_pairing=pd.pub_pairing, sealed=sealed.body)
        key = mo_rbe.multi_finalize_decrypt(self.ctx, translated, pd,
                                            user.session.pop(name), user.priv)
        self._event(user_ent, "blind-cleared", f"{user_ent}/{name}")
        plaintext = envelope.open_sealed(sealed, key)
        self._event(user_ent, "decrypt-ok", name)
        return plaintext

    # -- phase: user revocation -------------------------------------------------------
    def revoke(self, org_name: str, user_id: str) -> None:
        org = self._org(org_name)
        so_rbe.revoke_user(org.board, user_id)
        self._event(f"SA:{org_name}", "revoke", f"{org_name}/{user_id}")

    # -- phase: administrator agreement --------------------------------------------------
    def link(self, user_org_name: str, data_org_name: str) -> None:
        """Agreement ceremony letting user_org's members read data_org's
        ciphertexts.  Directional; run twice for both directions."""
        user_org = self._org(user_org_name)
        data_org = self._org(data_org_name)
        if user_org_name == data_org_name:
            raise errors.SameOrgJointKey("an org cannot link to itself")
        if user_org_name in data_org.private_cloud.rekeys:
            self._event(f"SA:{data_org_name}", "link-reissued",
                        f"{user_org_name}->{data_org_name}")
        lts = mo_rbe.make_long_term_secret(self.ctx, user_org_name,
                                           user_org.sa.msk)
        self._send(f"SA:{user_org_name}", f"SA:{data_org_name}",
                   "share-long-term-secret", long_term_secret=lts)
        rekey = mo_rbe.make_rekey(self.ctx, data_org_name, data_org.sa.msk, lts)
        data_org.private_cloud.rekeys[user_org_name] = rekey
        self._send(f"SA:{data_org_name}", f"PrivateCloud:{data_org_name}",
                   "store-rekey", rekey=rekey)


# -- scenario scripts ---------------------------------------------------------------------

FIG1_HIERARCHY_TEXT = """\
role r1
role r2
role r3
role r4
role r5
role r6
role r7
role r8
edge r1 r2
edge r1 r3
edge r1 r4
edge r2 r5
edge r2 r6
edge r4 r6
edge r4 r7
edge r5 r8
edge r6 r8
edge r7 r8
"""

_FIG1_SCENARIO = """\
# one org, eight roles; an r5-holder reads an r8-encryption
payload msg.bin 726f6c652d62617365642064656d6f0a
init-org A
add-hierarchy A fig1.txt
register A alice
assign A alice r5
encrypt A r8 msg.bin out.rbec
decrypt A alice r5 out.rbec plain.bin
"""

_TWO_ORG_SCENARIO = """\
# consortium: org B's engineer reads org A's cross-org ciphertext
payload report.bin 636f6e736f727469756d207265706f72740a
init-org A
init-org B
add-hierarchy A fig1.txt
add-hierarchy B org-b.txt
register A alice
assign A alice r4
register B bob
assign B bob lead
link B A
mencrypt A r6 B eng report.bin shared.rbec
decrypt A alice r4 shared.rbec
mdecrypt B bob lead shared.rbec plain-b.bin
"""

_ORG_B_HIERARCHY = """\
role head
role lead
role eng
role ops
edge head lead
edge head eng
edge head ops
edge lead eng
"""

#: name -> (script text, auxiliary files materialized into the workdir)
CANNED_SCENARIOS: dict[str, tuple[str, dict[str, bytes]]] = {
    "fig1-single-org": (_FIG1_SCENARIO,
                        {"fig1.txt": FIG1_HIERARCHY_TEXT.encode()}),
    "two-org-consortium": (_TWO_ORG_SCENARIO,
                           {"fig1.txt": FIG1_HIERARCHY_TEXT.encode(),
                            "org-b.txt": _ORG_B_HIERARCHY.encode()}),
}


def parse_scenario(text: str) -> list[list[str]]:
    """Split a script into token lists, dropping comments and blanks."""
    steps = []
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        steps.append(line.split())
    return steps


def run_scenario(script: str, seed: int, workdir: str | Path,
                 security_level: int = 128, backend: str | None = None,
                 extra_files: dict[str, bytes] | None = None) -> Transcript:
    """Execute a scenario script; deterministic under the seed.

    Raises the underlying protocol error unless the failing step is wrapped
    in ``expect-fail <ErrorName> <command...>``.
    """
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    for fname, data in (extra_files or {}).items():
        (workdir / fname).write_bytes(data)
    sim = Simulation(seed, security_level=security_level, backend=backend,
                     workdir=workdir)

    def step(tokens: list[str]) -> None:
        cmd, args = tokens[0], tokens[1:]
        if cmd == "payload":
            (workdir / args[0]).write_bytes(bytes.fromhex(args[1]))
        elif cmd == "init-org":
            sim.init_org(args[0])
        elif cmd == "add-hierarchy":
            text = (workdir / args[1]).read_text(encoding="utf-8")
            sim.add_hierarchy(args[0], parse_hierarchy_text(args[0], text))
        elif cmd == "register":
            sim.register(args[0], args[1])
        elif cmd == "assign":
            sim.assign(args[0], args[1], args[2])
        elif cmd == "encrypt":
            sim.encrypt(args[0], args[1], (workdir / args[2]).read_bytes(),
                        args[3])
        elif cmd == "mencrypt":
            sim.mencrypt(args[0], args[1], args[2], args[3],
                         (workdir / args[4]).read_bytes(), args[5])
        elif cmd == "decrypt":
            plain = sim.decrypt(args[0], args[1], args[2], args[3])
            if len(args) > 4:
                (workdir / args[4]).write_bytes(plain)
        elif cmd == "mdecrypt":
            plain = sim.mdecrypt(args[0], args[1], args[2], args[3])
            if len(args) > 4:
                (workdir / args[4]).write_bytes(plain)
        elif cmd == "revoke":
            sim.revoke(args[0], args[1])
        elif cmd == "link":
            sim.link(args[0], args[1])
        elif cmd == "leak-master":
            # fault injection: ships the master secret to the public cloud so
            # residency audits have a guaranteed violation to catch
            org = sim._org(args[0])
            sim.inject_message(f"SA:{args[0]}", "PublicCloud", "leak",
                               master_secret=org.sa.msk)
        else:
            raise errors.ProtocolOrderError(f"unknown scenario command {cmd!r}")

    for tokens in parse_scenario(script):
        if tokens[0] == "expect-fail":
            want, rest = tokens[1], tokens[2:]
            try:
                step(rest)
            except errors.RbeError as exc:
                if type(exc).__name__ != want:
                    raise
                sim._event("scenario", "expected-failure",
                           f"{want}: {' '.join(rest)}")
            else:
                raise errors.ProtocolOrderError(
                    f"step {' '.join(rest)!r} was expected to fail with {want}")
        else:
            step(tokens)
    return sim.transcript
