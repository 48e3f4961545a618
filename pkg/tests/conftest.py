"""Shared fixtures: a ledger-enabled context, the demo hierarchy, and
deployment helpers used across the scheme tests."""

import random
import warnings
from types import SimpleNamespace

import pytest

from rbe import so_rbe
from rbe.actors import FIG1_HIERARCHY_TEXT
from rbe.algebra import setup_pairing
from rbe.hierarchy import build_hierarchy, parse_hierarchy_text


@pytest.fixture(scope="session")
def ctx():
    """One ledger-enabled context for the whole suite (tests know the
    secrets anyway; the ledger is the independent oracle)."""
    return setup_pairing(128, ledger=True)


@pytest.fixture()
def rng(request):
    # per-test deterministic stream, varied by test name
    return random.Random(f"rbe-tests:{request.node.name}")


@pytest.fixture(scope="session")
def fig1():
    return parse_hierarchy_text("A", FIG1_HIERARCHY_TEXT)


def make_org(ctx, h, rng):
    """Init an org and generate role material over hierarchy h."""
    msk, pp, link_point = so_rbe.init_org(ctx, h.org, rng)
    rp, pks, rsecs = so_rbe.gen_role_params(pp, h, rng)
    return SimpleNamespace(h=h, msk=msk, pp=pp, link_point=link_point,
                           rp=rp, pks=pks, rsecs=rsecs)


def make_user(ctx, org, user_id, role, rng):
    cred = so_rbe.gen_user_keys(org.pp, org.msk, user_id, rng)
    rk = so_rbe.gen_role_key(org.pp, org.rsecs[role], org.link_point,
                             cred.secret_point, user_id)
    return cred, rk


def so_pipeline(ctx, org, cred, rk, r_x, target_role, rng, pub="board"):
    """encrypt -> transform -> cloud partial -> finalize; returns
    (encapsulated key, recovered key, ciphertext)."""
    key, ct = so_rbe.kem_encrypt(org.pp, org.pks[target_role], rng)
    trk, blind = so_rbe.transform_role_key(ctx, rk, rng)
    pub_el = cred.pub if pub == "board" else pub
    pd = so_rbe.cloud_partial_decrypt(ctx, ct, trk, pub_el, r_x, org.h)
    got = so_rbe.finalize_decrypt(ctx, ct.masked_key, pd, blind, cred.priv)
    return key, got, ct


def random_admissible_dag(rng, org="P", max_roles=12):
    """Random DAG in which every role's complement-ancestor set is
    non-empty (the scheme's admissibility condition); resamples otherwise."""
    while True:
        n = rng.randrange(2, max_roles + 1)
        names = [f"n{i}" for i in range(1, n + 1)]
        edges = []
        for j in range(1, n):
            for i in range(j):
                if rng.random() < 0.35:
                    edges.append((names[i], names[j]))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            h = build_hierarchy(org, names, edges)
        if all(h.outside(r) for r in h.roles):
            return h
