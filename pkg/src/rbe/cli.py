"""Command-line frontend.

Thin wrappers over the library: every group operation happens inside the
library calls, never in CLI plumbing.  Key material lives under a state
directory (``--state``, default ``./.rbe-state``):

    <state>/config.json                 curve profile for the deployment
    <state>/<org>/hierarchy.txt         accumulated role/edge lines
    <state>/<org>/master.key            master record (4 + n_roles scalars)
    <state>/<org>/params.pub            public parameters
    <state>/<org>/link.point            role-manager provisioning point
    <state>/<org>/board.json            bulletin board (active user ids)
    <state>/<org>/roles/<r>.rpk|.rsec   role public keys / role secrets
    <state>/<org>/users/<u>.cred        user credential
    <state>/<org>/users/<u>.<r>.rkey    issued role keys
    <state>/<org>/rekeys/<p>.rekey      translation keys (private cloud)

Exit codes: 0 success, 1 usage error, 2 crypto/protocol error with the
error class name (RevokedUser, UnauthorizedRole, AuthFailure, ...) on
stderr.  ``RBE_SEED`` seeds all randomness for reproducible artifacts.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import secrets
import sys
from pathlib import Path

from . import actors, bench, envelope, errors, keyfiles, mo_rbe, so_rbe
from .algebra import PairingContext, setup_pairing
from .hierarchy import RoleId, load_hierarchy_file, parse_hierarchy_text

__all__ = ["main"]


def _rng() -> random.Random:
    seed = os.environ.get("RBE_SEED")
    return random.Random(int(seed) if seed is not None else secrets.randbits(64))


class _State:
    """Paths and loaders for one deployment's state directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    # -- config -----------------------------------------------------------
    def write_config(self, security_level: int, backend: str) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        cfg = {"security_level": security_level, "backend": backend}
        (self.root / "config.json").write_text(json.dumps(cfg, indent=2))

    def context(self) -> PairingContext:
        cfg_path = self.root / "config.json"
        if not cfg_path.exists():
            raise errors.ProtocolOrderError(
                f"no deployment at {self.root} (run init-org first)")
        cfg = json.loads(cfg_path.read_text())
        return setup_pairing(cfg["security_level"], backend=cfg["backend"])

    # -- per-org paths ------------------------------------------------------
    def org_dir(self, org: str, must_exist: bool = True) -> Path:
        d = self.root / org
        if must_exist and not d.is_dir():
            raise errors.ProtocolOrderError(f"org {org!r} was never initialized")
        return d

    def board(self, org: str) -> set[str]:
        path = self.org_dir(org) / "board.json"
        return set(json.loads(path.read_text())["active_users"])

    def write_board(self, org: str, users: set[str]) -> None:
        path = self.org_dir(org) / "board.json"
        path.write_text(json.dumps({"active_users": sorted(users)}, indent=2))

    def user_pub(self, ctx: PairingContext, org: str, user: str):
        """Bulletin-board lookup: None once the user is revoked."""
        if user not in self.board(org):
            return None
        cred = keyfiles.load_user_credential(
            ctx, self.org_dir(org) / "users" / f"{user}.cred")
        return cred.pub


def _load_hierarchy(state: _State, ctx: PairingContext, org: str):
    path = state.org_dir(org) / "hierarchy.txt"
    if not path.exists():
        raise errors.ProtocolOrderError(f"org {org!r} has no roles yet")
    return load_hierarchy_file(org, path)


# -- commands -------------------------------------------------------------------

def _cmd_init_org(state: _State, args) -> int:
    cfg_path = state.root / "config.json"
    if cfg_path.exists():
        cfg = json.loads(cfg_path.read_text())
        if cfg["security_level"] != args.level:
            raise errors.ProtocolOrderError(
                "deployment already configured at level "
                f"{cfg['security_level']}")
    else:
        from .algebra import default_backend
        state.write_config(args.level, args.backend or default_backend().name)
    ctx = state.context()
    org_dir = state.org_dir(args.org, must_exist=False)
    if org_dir.exists():
        raise errors.ProtocolOrderError(f"org {args.org!r} already initialized")
    for sub in ("roles", "users", "rekeys"):
        (org_dir / sub).mkdir(parents=True)
    msk, pp, link_point = so_rbe.init_org(ctx, args.org, _rng())
    keyfiles.save_master(org_dir / "master.key", ctx, args.org, msk)
    keyfiles.save_public_params(org_dir / "params.pub", pp)
    keyfiles.save_link_point(org_dir / "link.point", ctx, args.org, link_point)
    state.write_board(args.org, set())
    print(f"initialized org {args.org}")
    return 0


def _cmd_add_role(state: _State, args) -> int:
    org_dir = state.org_dir(args.org)
    if list((org_dir / "roles").iterdir()):
        raise errors.ProtocolOrderError(
            "role parameters already generated; the hierarchy is frozen")
    path = org_dir / "hierarchy.txt"
    lines = path.read_text().splitlines() if path.exists() else []
    lines.append(f"role {args.role}")
    for parent in args.parent or []:
        lines.append(f"edge {parent} {args.role}")
    text = "\n".join(lines) + "\n"
    parse_hierarchy_text(args.org, text)  # validates before persisting
    path.write_text(text)
    print(f"added role {args.role} to {args.org}")
    return 0


def _cmd_gen_role_params(state: _State, args) -> int:
    ctx = state.context()
    org_dir = state.org_dir(args.org)
    h = _load_hierarchy(state, ctx, args.org)
    org, msk, _ = keyfiles.load_master(ctx, org_dir / "master.key")
    pp = keyfiles.load_public_params(ctx, org_dir / "params.pub")
    rp, pks, rsecs = so_rbe.gen_role_params(pp, h, _rng())
    keyfiles.save_master(org_dir / "master.key", ctx, org, msk, rp)
    for role in h.sorted_roles():
        keyfiles.save_role_public_key(org_dir / "roles" / f"{role.name}.rpk",
                                      pks[role])
        keyfiles.save_role_secret(org_dir / "roles" / f"{role.name}.rsec",
                                  ctx, rsecs[role])
    print(f"generated role parameters for {len(pks)} roles")
    return 0


def _cmd_register_user(state: _State, args) -> int:
    ctx = state.context()
    org_dir = state.org_dir(args.org)
    cred_path = org_dir / "users" / f"{args.user}.cred"
    if cred_path.exists():
        raise errors.ProtocolOrderError(f"user {args.user!r} already registered")
    _, msk, _ = keyfiles.load_master(ctx, org_dir / "master.key")
    pp = keyfiles.load_public_params(ctx, org_dir / "params.pub")
    cred = so_rbe.gen_user_keys(pp, msk, args.user, _rng())
    keyfiles.save_user_credential(cred_path, cred)
    state.write_board(args.org, state.board(args.org) | {args.user})
    print(f"registered {args.user} with {args.org}")
    return 0


def _cmd_assign_role(state: _State, args) -> int:
    ctx = state.context()
    org_dir = state.org_dir(args.org)
    pp = keyfiles.load_public_params(ctx, org_dir / "params.pub")
    if args.user not in state.board(args.org):
        raise errors.AuthenticationFailed(
            f"user {args.user!r} is not an active registered user")
    cred = keyfiles.load_user_credential(ctx, org_dir / "users" / f"{args.user}.cred")
    rsec = keyfiles.load_role_secret(ctx, org_dir / "roles" / f"{args.role}.rsec")
    link_point = keyfiles.load_link_point(ctx, org_dir / "link.point")
    rk = so_rbe.gen_role_key(pp, rsec, link_point, cred.secret_point, args.user)
    keyfiles.save_role_key(org_dir / "users" / f"{args.user}.{args.role}.rkey", rk)
    print(f"assigned {args.role} to {args.user}")
    return 0


def _cmd_encrypt(state: _State, args) -> int:
    ctx = state.context()
    org_dir = state.org_dir(args.org)
    pp = keyfiles.load_public_params(ctx, org_dir / "params.pub")
    rpk = keyfiles.load_role_public_key(ctx, org_dir / "roles" / f"{args.role}.rpk")
    rng = _rng()
    key, kem = so_rbe.kem_encrypt(pp, rpk, rng)
    sealed = envelope.seal(Path(args.infile).read_bytes(), key, rng)
    Path(args.outfile).write_bytes(envelope.pack_ciphertext(kem, sealed))
    print(f"encrypted {args.infile} for {args.org}/{args.role}")
    return 0


def _load_role_key(state, ctx, org: str, user: str, role: str):
    path = state.org_dir(org) / "users" / f"{user}.{role}.rkey"
    if not path.exists():
        raise errors.ProtocolOrderError(
            f"user {user!r} holds no role key for {role!r}")
    return keyfiles.load_role_key(ctx, path)


def _finish(args, plaintext: bytes) -> int:
    if args.outfile:
        Path(args.outfile).write_bytes(plaintext)
    else:
        sys.stdout.buffer.write(plaintext)
    return 0


def _cmd_decrypt(state: _State, args) -> int:
    ctx = state.context()
    org_dir = state.org_dir(args.org)
    h = _load_hierarchy(state, ctx, args.org)
    role = h.role(args.role)
    cred = keyfiles.load_user_credential(ctx, org_dir / "users" / f"{args.user}.cred")
    rk = _load_role_key(state, ctx, args.org, args.user, args.role)
    kem, sealed = envelope.unpack_ciphertext(ctx, Path(args.infile).read_bytes())
    if isinstance(kem, mo_rbe.MultiKemCiphertext):
        if kem.org != args.org:
            return _mdecrypt_flow(state, ctx, args, h, role, cred, rk, kem, sealed)
        kem = kem.so_view()
    rng = _rng()
    trk, blind = so_rbe.transform_role_key(ctx, rk, rng)
    pub = state.user_pub(ctx, args.org, args.user)
    pd = so_rbe.cloud_partial_decrypt(ctx, kem, trk, pub, role, h)
    key = so_rbe.finalize_decrypt(ctx, kem.masked_key, pd, blind, cred.priv)
    return _finish(args, envelope.open_sealed(sealed, key))


def _mdecrypt_flow(state, ctx, args, h, role, cred, rk, kem, sealed) -> int:
    data_org_dir = state.org_dir(kem.org)
    rng = _rng()
    trk, blind = so_rbe.transform_role_key(ctx, rk, rng)
    # translation leg (data org's private cloud)
    rekey_path = data_org_dir / "rekeys" / f"{args.org}.rekey"
    rekey = keyfiles.load_rekey(ctx, rekey_path) if rekey_path.exists() else None
    _, data_msk, _ = keyfiles.load_master(ctx, data_org_dir / "master.key")
    translated = mo_rbe.translate_ciphertext(ctx, kem.masked_key, kem.user_leg,
                                             rekey, data_msk.gate_exp)
    # home-org leg (user's private cloud)
    _, home_msk, _ = keyfiles.load_master(ctx, state.org_dir(args.org) / "master.key")
    pub = state.user_pub(ctx, args.org, args.user)
    tdk = mo_rbe.make_temp_decryption_key(ctx, trk, pub, home_msk.share_exp)
    pd = mo_rbe.multi_cloud_partial_decrypt(ctx, kem, tdk, role, h)
    key = mo_rbe.multi_finalize_decrypt(ctx, translated, pd, blind, cred.priv)
    return _finish(args, envelope.open_sealed(sealed, key))


def _cmd_mdecrypt(state: _State, args) -> int:
    ctx = state.context()
    h = _load_hierarchy(state, ctx, args.org)
    role = h.role(args.role)
    cred = keyfiles.load_user_credential(
        ctx, state.org_dir(args.org) / "users" / f"{args.user}.cred")
    rk = _load_role_key(state, ctx, args.org, args.user, args.role)
    kem, sealed = envelope.unpack_ciphertext(ctx, Path(args.infile).read_bytes())
    if not isinstance(kem, mo_rbe.MultiKemCiphertext):
        raise errors.ProtocolOrderError("input is a single-org ciphertext")
    if kem.org == args.org:
        return _cmd_decrypt(state, args)
    return _mdecrypt_flow(state, ctx, args, h, role, cred, rk, kem, sealed)


def _cmd_revoke(state: _State, args) -> int:
    users = state.board(args.org)
    if args.user not in users:
        raise errors.UnknownUser(f"no published key for {args.user!r}")
    state.write_board(args.org, users - {args.user})
    print(f"revoked {args.user} from {args.org}")
    return 0


def _cmd_link_orgs(state: _State, args) -> int:
    ctx = state.context()
    user_dir = state.org_dir(args.user_org)
    data_dir = state.org_dir(args.data_org)
    if args.user_org == args.data_org:
        raise errors.SameOrgJointKey("an org cannot link to itself")
    _, user_msk, _ = keyfiles.load_master(ctx, user_dir / "master.key")
    _, data_msk, _ = keyfiles.load_master(ctx, data_dir / "master.key")
    lts = mo_rbe.make_long_term_secret(ctx, args.user_org, user_msk)
    rekey = mo_rbe.make_rekey(ctx, args.data_org, data_msk, lts)
    keyfiles.save_rekey(data_dir / "rekeys" / f"{args.user_org}.rekey", rekey)
    print(f"linked: {args.user_org} users may now read {args.data_org} data")
    return 0


def _cmd_mencrypt(state: _State, args) -> int:
    ctx = state.context()
    pp = keyfiles.load_public_params(
        ctx, state.org_dir(args.org) / "params.pub")
    partner_pp = keyfiles.load_public_params(
        ctx, state.org_dir(args.partner_org) / "params.pub")
    rpk = keyfiles.load_role_public_key(
        ctx, state.org_dir(args.org) / "roles" / f"{args.role}.rpk")
    partner_rpk = keyfiles.load_role_public_key(
        ctx, state.org_dir(args.partner_org) / "roles" / f"{args.partner_role}.rpk")
    joint = mo_rbe.make_joint_role_key(rpk, partner_rpk)
    rng = _rng()
    key, kem = mo_rbe.multi_kem_encrypt(pp, partner_pp, joint, rng)
    sealed = envelope.seal(Path(args.infile).read_bytes(), key, rng)
    Path(args.outfile).write_bytes(envelope.pack_ciphertext(kem, sealed))
    print(f"encrypted {args.infile} for {args.org}/{args.role} + "
          f"{args.partner_org}/{args.partner_role}")
    return 0


def _cmd_run_scenario(state: _State, args) -> int:
    if args.canned:
        script, files = actors.CANNED_SCENARIOS[args.canned]
    else:
        if not args.script:
            raise errors.ProtocolOrderError("need a script path or --canned NAME")
        script, files = Path(args.script).read_text(encoding="utf-8"), {}
    seed = args.seed if args.seed is not None else \
        int(os.environ.get("RBE_SEED", "0"))
    transcript = actors.run_scenario(script, seed, args.workdir,
                                     security_level=args.level,
                                     extra_files=files)
    violations = actors.audit_secret_residency(transcript)
    if args.transcript_out:
        Path(args.transcript_out).write_text(transcript.to_text())
    else:
        sys.stdout.write(transcript.to_text())
    if violations:
        for v in violations:
            print(f"residency violation: {v}", file=sys.stderr)
        return 2
    print(f"# ok: {len(transcript.steps)} steps, residency audit clean",
          file=sys.stderr)
    return 0


def _cmd_bench(state: _State, args) -> int:
    cfg = bench.BenchConfig()
    if args.config:
        cfg = bench.BenchConfig(**json.loads(Path(args.config).read_text()))
    if args.iterations:
        cfg.iterations = args.iterations
    if args.seed is not None:
        cfg.seed = args.seed
    elif "RBE_SEED" in os.environ:
        cfg.seed = int(os.environ["RBE_SEED"])
    report = bench.run_bench(cfg)
    out = bench.render_machine(report) if args.format == "machine" \
        else bench.render_text(report)
    sys.stdout.write(out)
    return 0 if report.all_conformant() else 2


# -- parser ------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rbe", exit_on_error=False,
                                description="role-based encryption toolkit")
    p.add_argument("--state", default=".rbe-state", help="state directory")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("init-org", exit_on_error=False)
    sp.add_argument("org")
    sp.add_argument("--level", type=int, default=128)
    sp.add_argument("--backend", default=None)
    sp.set_defaults(func=_cmd_init_org)

    sp = sub.add_parser("add-role", exit_on_error=False)
    sp.add_argument("org")
    sp.add_argument("role")
    sp.add_argument("--parent", action="append")
    sp.set_defaults(func=_cmd_add_role)

    sp = sub.add_parser("gen-role-params", exit_on_error=False)
    sp.add_argument("org")
    sp.set_defaults(func=_cmd_gen_role_params)

    sp = sub.add_parser("register-user", exit_on_error=False)
    sp.add_argument("org")
    sp.add_argument("user")
    sp.set_defaults(func=_cmd_register_user)

    sp = sub.add_parser("assign-role", exit_on_error=False)
    sp.add_argument("org")
    sp.add_argument("user")
    sp.add_argument("role")
    sp.set_defaults(func=_cmd_assign_role)

    sp = sub.add_parser("encrypt", exit_on_error=False)
    sp.add_argument("org")
    sp.add_argument("role")
    sp.add_argument("infile")
    sp.add_argument("outfile")
    sp.set_defaults(func=_cmd_encrypt)

    sp = sub.add_parser("decrypt", exit_on_error=False)
    sp.add_argument("org")
    sp.add_argument("user")
    sp.add_argument("role")
    sp.add_argument("infile")
    sp.add_argument("outfile", nargs="?")
    sp.set_defaults(func=_cmd_decrypt)

    sp = sub.add_parser("revoke", exit_on_error=False)
    sp.add_argument("org")
    sp.add_argument("user")
    sp.set_defaults(func=_cmd_revoke)

    sp = sub.add_parser("link-orgs", exit_on_error=False,
                        help="let USER_ORG's users read DATA_ORG's data")
    sp.add_argument("user_org")
    sp.add_argument("data_org")
    sp.set_defaults(func=_cmd_link_orgs)

    sp = sub.add_parser("mencrypt", exit_on_error=False)
    sp.add_argument("org")
    sp.add_argument("role")
    sp.add_argument("partner_org")
    sp.add_argument("partner_role")
    sp.add_argument("infile")
    sp.add_argument("outfile")
    sp.set_defaults(func=_cmd_mencrypt)

    sp = sub.add_parser("mdecrypt", exit_on_error=False)
    sp.add_argument("org")
    sp.add_argument("user")
    sp.add_argument("role")
    sp.add_argument("infile")
    sp.add_argument("outfile", nargs="?")
    sp.set_defaults(func=_cmd_mdecrypt)

    sp = sub.add_parser("run-scenario", exit_on_error=False)
    sp.add_argument("script", nargs="?")
    sp.add_argument("--canned", choices=sorted(actors.CANNED_SCENARIOS))
    sp.add_argument("--workdir", default=".")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--level", type=int, default=128)
    sp.add_argument("--transcript-out", default=None)
    sp.set_defaults(func=_cmd_run_scenario)

    sp = sub.add_parser("bench", exit_on_error=False)
    sp.add_argument("--format", choices=("text", "machine"), default="text")
    sp.add_argument("--config", default=None)
    sp.add_argument("--iterations", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.set_defaults(func=_cmd_bench)

    return p


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except argparse.ArgumentError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # -h/--help exits 0; argparse errors exit 2
        return 0 if exc.code in (0, None) else 1
    state = _State(args.state)
    try:
        return args.func(state, args)
    except errors.RbeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
