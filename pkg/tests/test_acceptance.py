"""Acceptance suite: one test per release criterion, each printing its own
pass/fail line (run with ``pytest tests/test_acceptance.py -v -s``).

The membership oracle for the demo hierarchy is computed here by naive
reachability over the published edge list, independently of the library,
and cross-checked against every explicitly listed set before it is used."""

import random
import time
import warnings

import pytest

from conftest import make_org, make_user, random_admissible_dag
from rbe import envelope, errors, mo_rbe, so_rbe
from rbe.actors import (
    CANNED_SCENARIOS,
    FIG1_HIERARCHY_TEXT,
    Simulation,
    audit_secret_residency,
    run_scenario,
)
from rbe.algebra import setup_pairing
from rbe.algebra.wire import Reader, TAG_G1, TAG_GT
from rbe.bench import BenchConfig, run_bench
from rbe.hierarchy import build_hierarchy, gamma, parse_hierarchy_text


def report(num, ok, detail):
    line = f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    assert ok, line


# -- independent membership oracle for the demo DAG ---------------------------------

FIG1_CHILDREN = {
    "r1": ["r2", "r3", "r4"],
    "r2": ["r5", "r6"],
    "r4": ["r6", "r7"],
    "r5": ["r8"],
    "r6": ["r8"],
    "r7": ["r8"],
}
FIG1_ROLES = [f"r{i}" for i in range(1, 9)]


def naive_ancestor_oracle():
    """Self-inclusive ancestor sets by plain breadth-first search upward."""
    parents = {r: set() for r in FIG1_ROLES}
    for p, cs in FIG1_CHILDREN.items():
        for c in cs:
            parents[c].add(p)
    anc = {}
    for r in FIG1_ROLES:
        seen = {r}
        frontier = [r]
        while frontier:
            nxt = []
            for node in frontier:
                for p in parents[node]:
                    if p not in seen:
                        seen.add(p)
                        nxt.append(p)
            frontier = nxt
        anc[r] = seen
    return anc


def test_oracle_matches_every_published_set():
    anc = naive_ancestor_oracle()
    allr = set(FIG1_ROLES)
    # ancestor sets listed for the worked example
    assert anc["r8"] == {"r1", "r2", "r4", "r5", "r6", "r7", "r8"}
    assert anc["r5"] == {"r1", "r2", "r5"}
    assert anc["r6"] == {"r1", "r2", "r4", "r6"}
    # complement sets
    assert allr - anc["r8"] == {"r3"}
    assert allr - anc["r5"] == {"r3", "r4", "r6", "r7", "r8"}
    assert allr - anc["r6"] == {"r3", "r5", "r7", "r8"}
    # descendant sets (derived from the same reachability, downward)
    desc = {r: {x for x in FIG1_ROLES if r in anc[x]} - {r} for r in FIG1_ROLES}
    assert desc["r5"] == {"r8"}
    assert desc["r1"] == allr - {"r1"}
    assert desc["r3"] == set()
    assert desc["r4"] == {"r6", "r7", "r8"}
    assert allr - desc["r5"] == allr - {"r8"}
    assert allr - desc["r1"] == {"r1"}
    assert allr - desc["r4"] == {"r1", "r2", "r3", "r4", "r5"}


def test_criterion_1_so_authorization_matrix(ctx):
    """64/64 ordered role pairs match the membership oracle; < 30 s."""
    t0 = time.monotonic()
    rng = random.Random(0xACCE01)
    fig1 = parse_hierarchy_text("A", FIG1_HIERARCHY_TEXT)
    org = make_org(ctx, fig1, rng)
    oracle = naive_ancestor_oracle()

    users = {}
    for name in FIG1_ROLES:
        users[name] = make_user(ctx, org, f"holder-{name}",
                                fig1.role(name), rng)
    message = b"matrix payload"
    matched = 0
    for target_name in FIG1_ROLES:
        target = fig1.role(target_name)
        key, kem = so_rbe.kem_encrypt(org.pp, org.pks[target], rng)
        sealed = envelope.seal(message, key, rng)
        for holder_name in FIG1_ROLES:
            cred, rk = users[holder_name]
            r_x = fig1.role(holder_name)
            authorized = holder_name in oracle[target_name]
            trk, blind = so_rbe.transform_role_key(ctx, rk, rng)
            try:
                pd = so_rbe.cloud_partial_decrypt(ctx, kem, trk, cred.pub,
                                                  r_x, fig1)
                got = so_rbe.finalize_decrypt(ctx, kem.masked_key, pd,
                                              blind, cred.priv)
                plain = envelope.open_sealed(sealed, got)
                outcome = plain == message
            except (errors.UnauthorizedRole, errors.AuthFailure):
                outcome = False
            assert outcome == authorized, \
                f"({holder_name}, {target_name}): got {outcome}, " \
                f"oracle says {authorized}"
            matched += 1
    elapsed = time.monotonic() - t0
    report(1, matched == 64 and elapsed < 30.0,
           f"64/64 matrix cases match the set-membership oracle "
           f"({elapsed:.1f}s < 30s)")


def test_criterion_2_random_dag_property_suite(ctx):
    """200 random DAGs: KEM correctness + telescoping identity on an
    authorized case, AuthFailure on a white-box unauthorized case; < 5 min."""
    t0 = time.monotonic()
    rng = random.Random(0xACCE02)
    checked_auth = checked_unauth = 0
    for i in range(200):
        h = random_admissible_dag(rng, org=f"P{i}")
        org = make_org(ctx, h, rng)
        roles = h.sorted_roles()

        r_i = rng.choice(roles)
        r_x = rng.choice(sorted(h.ancestors[r_i]))
        lift_set = gamma(h, r_x, r_i)
        out_i, out_x = h.outside(r_i), h.outside(r_x)
        assert not (out_i & lift_set) and out_i | lift_set == out_x, \
            f"telescoping identity failed on {h.org}"

        cred, rk = make_user(ctx, org, f"u{i}", r_x, rng)
        message = rng.randbytes(40)
        key, kem = so_rbe.kem_encrypt(org.pp, org.pks[r_i], rng)
        sealed = envelope.seal(message, key, rng)
        trk, blind = so_rbe.transform_role_key(ctx, rk, rng)
        pd = so_rbe.cloud_partial_decrypt(ctx, kem, trk, cred.pub, r_x, h)
        got = so_rbe.finalize_decrypt(ctx, kem.masked_key, pd, blind,
                                      cred.priv)
        assert envelope.open_sealed(sealed, got) == message
        checked_auth += 1

        bad_pairs = [(x, t) for t in roles for x in roles
                     if x not in h.ancestors[t]]
        r_bad, r_tgt = rng.choice(bad_pairs)
        cred_b, rk_b = make_user(ctx, org, f"w{i}", r_bad, rng)
        key2, kem2 = so_rbe.kem_encrypt(org.pp, org.pks[r_tgt], rng)
        sealed2 = envelope.seal(message, key2, rng)
        trk2, blind2 = so_rbe.transform_role_key(ctx, rk_b, rng)
        # white-box: skip the cloud's role gate and pair anyway
        acc = kem2.role_leg
        for l in sorted(gamma(h, r_bad, r_tgt)):
            acc = ctx.mul(acc, kem2.lift[l])
        pd2 = so_rbe.PartialDecryption(
            role_pairing=ctx.pair(acc, trk2.point),
            pub_pairing=ctx.pair(kem2.user_leg, cred_b.pub))
        wrong = so_rbe.finalize_decrypt(ctx, kem2.masked_key, pd2, blind2,
                                        cred_b.priv)
        with pytest.raises(errors.AuthFailure):
            envelope.open_sealed(sealed2, wrong)
        checked_unauth += 1
    elapsed = time.monotonic() - t0
    report(2, checked_auth == 200 and checked_unauth == 200 and elapsed < 300,
           f"200 hierarchies: {checked_auth} authorized recoveries, "
           f"{checked_unauth} white-box AuthFailures ({elapsed:.1f}s < 300s)")


def test_criterion_3_exponent_ledger_equivalence():
    """50 seeded runs; every element produced by either scheme re-derives
    bit-exactly from its independently tracked exponent."""
    t0 = time.monotonic()
    total = 0
    for seed in range(50):
        rng = random.Random(1000 + seed)
        c = setup_pairing(128, ledger=True)
        c.clear_ledger_registry()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            h_a = build_hierarchy("A", ["top", "mid", "leaf", "spare"],
                                  [("top", "mid"), ("mid", "leaf")])
            h_b = build_hierarchy("B", ["boss", "dev", "qa"],
                                  [("boss", "dev"), ("boss", "qa")])
        org_a = make_org(c, h_a, rng)
        org_b = make_org(c, h_b, rng)
        cred_a, rk_a = make_user(c, org_a, f"a{seed}", h_a.role("mid"), rng)
        key, kem = so_rbe.kem_encrypt(org_a.pp, org_a.pks[h_a.role("leaf")], rng)
        trk, blind = so_rbe.transform_role_key(c, rk_a, rng)
        pd = so_rbe.cloud_partial_decrypt(c, kem, trk, cred_a.pub,
                                          h_a.role("mid"), h_a)
        assert so_rbe.finalize_decrypt(c, kem.masked_key, pd, blind,
                                       cred_a.priv) == key
        joint = mo_rbe.make_joint_role_key(org_a.pks[h_a.role("leaf")],
                                           org_b.pks[h_b.role("dev")])
        mkey, mct = mo_rbe.multi_kem_encrypt(org_a.pp, org_b.pp, joint, rng)
        lts = mo_rbe.make_long_term_secret(c, "B", org_b.msk)
        rekey = mo_rbe.make_rekey(c, "A", org_a.msk, lts)
        translated = mo_rbe.translate_ciphertext(c, mct.masked_key,
                                                 mct.user_leg, rekey,
                                                 org_a.msk.gate_exp)
        cred_b, rk_b = make_user(c, org_b, f"b{seed}", h_b.role("boss"), rng)
        mtrk, mblind = so_rbe.transform_role_key(c, rk_b, rng)
        tdk = mo_rbe.make_temp_decryption_key(c, mtrk, cred_b.pub,
                                              org_b.msk.share_exp)
        mpd = mo_rbe.multi_cloud_partial_decrypt(c, mct, tdk,
                                                 h_b.role("boss"), h_b)
        assert mo_rbe.multi_finalize_decrypt(c, translated, mpd, mblind,
                                             cred_b.priv) == mkey
        elements = c.ledger_elements
        assert elements, "ledger registry must not be empty"
        for el in elements:
            assert c.ledger_check(el)
        total += len(elements)
    elapsed = time.monotonic() - t0
    report(3, total > 0,
           f"{total} elements across 50 seeded runs re-derived bit-exactly "
           f"from tracked exponents ({elapsed:.1f}s)")


def test_criterion_4_mo_three_org_end_to_end(tmp_path):
    """A linked to B (B's users read A); C unlinked fails at translation."""
    sim = Simulation(seed=0xACCE04, workdir=tmp_path)
    sim.init_org("A")
    sim.add_hierarchy("A", parse_hierarchy_text("A", FIG1_HIERARCHY_TEXT))
    sim.init_org("B")
    sim.add_hierarchy("B", parse_hierarchy_text(
        "B", "role head\nrole lead\nrole eng\nrole ops\n"
             "edge head lead\nedge head eng\nedge head ops\nedge lead eng\n"))
    sim.init_org("C")
    sim.add_hierarchy("C", parse_hierarchy_text(
        "C", "role x\nrole y\nrole z\nedge x y\nedge x z\n"))
    sim.register("A", "alice")
    sim.assign("A", "alice", "r2")
    sim.register("C", "carol")
    sim.assign("C", "carol", "x")
    sim.link("B", "A")
    sim.mencrypt("A", "r6", "B", "eng", b"consortium data", "shared")

    # every qualified org-B holder decrypts via the cross-org path
    b_hier = sim.orgs["B"].hierarchy
    ok_b = 0
    for r_x in sorted(b_hier.ancestors[b_hier.role("eng")]):
        uid = f"b-{r_x.name}"
        sim.register("B", uid)
        sim.assign("B", uid, r_x.name)
        assert sim.mdecrypt("B", uid, r_x.name, "shared") == b"consortium data"
        ok_b += 1

    # encrypting org's own users use the single-org path
    assert sim.decrypt("A", "alice", "r2", "shared") == b"consortium data"
    so_path_ok = True

    # unqualified org-B role is refused
    sim.register("B", "outsider")
    sim.assign("B", "outsider", "ops")
    with pytest.raises(errors.UnauthorizedRole):
        sim.mdecrypt("B", "outsider", "ops", "shared")

    # org C never ran the ceremony: fails at the translation step
    with pytest.raises(errors.MissingRekey):
        sim.mdecrypt("C", "carol", "x", "shared")

    assert audit_secret_residency(sim.transcript) == []
    report(4, ok_b == 3 and so_path_ok,
           f"{ok_b} qualified org-B roles decrypt; org-A decrypts via the "
           f"single-org path; org-C blocked by missing rekey at translation")


@pytest.fixture(scope="module")
def bench_report():
    return run_bench(BenchConfig(iterations=5, phase_iterations=5,
                                 size_iterations=30,
                                 sizes=tuple(range(1, 11)), seed=0xACCE05))


def test_criterion_5_operation_count_conformance(bench_report):
    """Measured counter diffs satisfy the cost formulas; constant offsets
    from the compact table forms are reported alongside."""
    rows = {r["name"]: r for r in bench_report.conformance}
    for name, row in rows.items():
        print(f"  {name}: {'PASS' if row['ok'] else 'FAIL'} "
              f"expected={row['expected']} measured={row['measured']}"
              + (f"  [{row['note']}]" if row.get("note") else ""))
    checks = [
        rows["so.encrypt.exp_gt"]["ok"],
        rows["so.encrypt.exp_g1.slope"]["ok"],
        rows["so.encrypt.exp_g1.literal"]["ok"],
        rows["so.decrypt.split"]["ok"],
        rows["mo.decrypt.pipeline"]["ok"],
        rows["mo.decrypt.attribution"]["ok"],
        rows["mo.encrypt.counts"]["ok"],
    ]
    report(5, all(checks),
           "SO enc: 1 target-exp, source-exp slope 1 (literal n+2 vs compact "
           "1+n printed); SO dec: 2 pairings + 1/2 user exps; MO dec: "
           "4/2/3 split across user, private clouds, public cloud")


def test_criterion_6_constant_decryption(bench_report):
    """Counted decryption work identical for ancestor counts 1..10 and
    wall-time coefficient of variation < 25%."""
    flat_row = next(r for r in bench_report.conformance
                    if r["name"] == "so.decrypt.counters.flat")
    cov = bench_report.flatness["cov"]
    print(f"  decryption medians (ms) vs ancestor count: "
          f"{bench_report.flatness['median_ms']}")
    print(f"  reference-only figures from the original hardware: "
          f"4.60 ms (single-org) / 9.675 ms (multi-org); not a gate")
    report(6, flat_row["ok"] and cov < 0.25,
           f"counters identical across sizes 1..10; wall-time CoV "
           f"{cov:.3f} < 0.25")


def test_criterion_7_revocation(ctx):
    """After revocation, 100% of the revoked user's requests fail with
    RevokedUser and every other user's authorized matrix still passes."""
    rng = random.Random(0xACCE07)
    fig1 = parse_hierarchy_text("A", FIG1_HIERARCHY_TEXT)
    org = make_org(ctx, fig1, rng)
    oracle = naive_ancestor_oracle()
    users = {n: make_user(ctx, org, f"u-{n}", fig1.role(n), rng)
             for n in FIG1_ROLES}
    cts = {}
    for n in FIG1_ROLES:
        key, kem = so_rbe.kem_encrypt(org.pp, org.pks[fig1.role(n)], rng)
        cts[n] = (key, kem)
    board = {n: users[n][0].pub for n in FIG1_ROLES}

    revoked = "r2"
    board[revoked] = None
    refused = attempted = 0
    for target in FIG1_ROLES:
        _, kem = cts[target]
        trk, _ = so_rbe.transform_role_key(ctx, users[revoked][1], rng)
        attempted += 1
        try:
            so_rbe.cloud_partial_decrypt(ctx, kem, trk, board[revoked],
                                         fig1.role(revoked), fig1)
        except errors.RevokedUser:
            refused += 1

    others_ok = 0
    for holder in FIG1_ROLES:
        if holder == revoked:
            continue
        cred, rk = users[holder]
        for target in FIG1_ROLES:
            if holder not in oracle[target]:
                continue
            key, kem = cts[target]
            trk, blind = so_rbe.transform_role_key(ctx, rk, rng)
            pd = so_rbe.cloud_partial_decrypt(ctx, kem, trk, board[holder],
                                              fig1.role(holder), fig1)
            got = so_rbe.finalize_decrypt(ctx, kem.masked_key, pd, blind,
                                          cred.priv)
            assert got == key
            others_ok += 1
    total_auth = sum(len(oracle[t]) for t in FIG1_ROLES)
    expected_others = total_auth - sum(1 for t in FIG1_ROLES
                                       if revoked in oracle[t])
    report(7, refused == attempted == 8 and others_ok == expected_others,
           f"revoked user refused {refused}/{attempted}; "
           f"{others_ok}/{expected_others} other authorized cases unaffected")


def walk_so_container(data: bytes) -> dict:
    """Structural record census of a single-org ciphertext container."""
    r = Reader(data)
    assert r.raw(4) == b"RBEC"
    _ver, mode = r.u8(), r.u8()
    assert mode == 0x01
    r.u8(), r.u8(), r.u8()
    r.string(), r.string()
    counts = {TAG_G1: 0, TAG_GT: 0}

    def record():
        tag = r.u8()
        r.raw(r.u16())
        counts[tag] += 1

    record(), record(), record()
    for _ in range(r.u16()):
        r.string()
        record()
    r.raw(12)
    r.raw(r.u32())
    r.expect_end()
    return counts


def test_criterion_8_storage_conformance(ctx, tmp_path):
    """Master file carries exactly 4 + n_t scalars; a single-org container
    carries exactly 1 target-group + (ancestors + 2) source-group records."""
    from rbe import keyfiles
    rng = random.Random(0xACCE08)
    fig1 = parse_hierarchy_text("A", FIG1_HIERARCHY_TEXT)
    org = make_org(ctx, fig1, rng)
    data = keyfiles.save_master(tmp_path / "m.key", ctx, "A", org.msk, org.rp)
    info = keyfiles.inspect_master(data)
    n_t = len(fig1.roles)
    master_ok = info["scalars"] == 4 + n_t
    print(f"  master secret: {info['scalars']} scalars "
          f"(table formula 4 + n_t = {4 + n_t})")

    r6 = fig1.role("r6")
    key, kem = so_rbe.kem_encrypt(org.pp, org.pks[r6], rng)
    container = envelope.pack_ciphertext(kem, envelope.seal(b"m", key, rng))
    counts = walk_so_container(container)
    n_anc = len(fig1.ancestors[r6])
    ct_ok = counts[TAG_GT] == 1 and counts[TAG_G1] == n_anc + 2
    print(f"  ciphertext: {counts[TAG_GT]} target + {counts[TAG_G1]} source "
          f"records (compact table form (1+n_c)|G1|+|GT| with n_c={n_anc}; "
          f"literal ({n_anc}+2)|G1|+|GT|)")
    report(8, master_ok and ct_ok,
           f"master = 4+{n_t} scalars; ciphertext = 1 GT + {n_anc}+2 G1, "
           f"both printed against the table formulas")


def test_criterion_9_determinism(tmp_path):
    """Identical seeds give byte-identical transcripts and containers."""
    script, files = CANNED_SCENARIOS["two-org-consortium"]
    t1 = run_scenario(script, seed=0xACCE09, workdir=tmp_path / "run1",
                      extra_files=files)
    t2 = run_scenario(script, seed=0xACCE09, workdir=tmp_path / "run2",
                      extra_files=files)
    text_same = t1.to_text() == t2.to_text()
    c1 = (tmp_path / "run1" / "shared.rbec").read_bytes()
    c2 = (tmp_path / "run2" / "shared.rbec").read_bytes()
    report(9, text_same and c1 == c2,
           f"transcripts ({len(t1.to_text())} bytes) and containers "
           f"({len(c1)} bytes) byte-identical across two seeded runs")
