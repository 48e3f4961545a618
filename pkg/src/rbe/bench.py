"""Instrumented benchmark: wall-time statistics, exact operation counts per
phase per party, storage audits, and conformance verdicts against the
scheme's cost formulas.

Cost model being checked (n = ancestor count of the target role):

    single-org encrypt      (n + 2) source-exp + 1 target-exp
    single-org decrypt      1 source-exp (user) + 2 pairings (public cloud)
                            + 2 target-exp (user)
    multi-org encrypt       (n_enc + n_partner + 4) source-exp + 1 target-exp
    multi-org decrypt       4 source-exp + 2 target-exp + 3 pairings total:
                            user 1 exp + 2 target-exp; private clouds
                            3 exp + 1 pairing; public cloud 2 pairings

The widely-quoted compact formulas count one source-exp per ciphertext role
plus one ((1+n_c) single-org, (2+n_c) multi-org); the literal construction
carries one extra leg per org.  Both are printed, with the constant offset
called out, and neither depends on hierarchy size: decryption cost is flat
in both the ancestor count and the total role count, which the flatness
series demonstrates.

Group multiplications and hashes are tallied but excluded from the
identical-across-sizes verdict, matching the cost model (they are orders of
magnitude cheaper than exponentiations and pairings).  Published
reference-hardware timings for the original type-A 160-bit-order
instantiation are included as informational lines only; pass/fail rests on
counts and flatness, never on absolute milliseconds.
"""

from __future__ import annotations

import json
import random
import statistics
import time
from dataclasses import dataclass, field

from . import envelope, keyfiles, mo_rbe, so_rbe
from .algebra import OpCounts, setup_pairing
from .hierarchy import build_hierarchy

__all__ = ["BenchConfig", "BenchReport", "run_bench",
           "render_text", "render_machine", "REFERENCE_TIMINGS_MS"]

#: Informational only: reported elementary-op timings of the original
#: implementation (PBC type-A curve, 160-bit order) on its two test hosts.
REFERENCE_TIMINGS_MS = {
    "commodity-laptop-2.4GHz": {"exp_g1": 2.062, "exp_gt": 0.126,
                                "pairing": 1.292, "mul_g1": 0.008,
                                "mul_gt": 0.002, "hash": 0.003},
    "workstation-3.5GHz-xeon": {"exp_g1": 1.153, "exp_gt": 0.091,
                                "pairing": 0.645, "mul_g1": 0.005,
                                "mul_gt": 0.001, "hash": 0.002},
}


@dataclass
class BenchConfig:
    security_level: int = 128
    backend: str | None = None
    seed: int = 20240601
    iterations: int = 100        # elementary-operation timing samples
    phase_iterations: int = 100  # per-phase timing samples
    size_iterations: int = 25    # decryption samples per ancestor-count size
    sizes: tuple[int, ...] = tuple(range(1, 11))
    message_len: int = 256


@dataclass
class BenchReport:
    backend: str = ""
    security_level: int = 0
    q_bits: int = 0
    timings: dict = field(default_factory=dict)       # op -> stats
    phase_counts: dict = field(default_factory=dict)  # phase -> party -> counts
    conformance: list = field(default_factory=list)   # verdict rows
    flatness: dict = field(default_factory=dict)
    storage: list = field(default_factory=list)
    reference: dict = field(default_factory=lambda: REFERENCE_TIMINGS_MS)

    def all_conformant(self) -> bool:
        return all(row["ok"] for row in self.conformance)


def _stats(samples_s: list[float]) -> dict:
    ms = sorted(s * 1e3 for s in samples_s)
    p95 = ms[min(len(ms) - 1, int(0.95 * (len(ms) - 1) + 0.5))]
    return {"n": len(ms), "median_ms": round(statistics.median(ms), 6),
            "p95_ms": round(p95, 6)}


def _time(fn, iterations: int) -> dict:
    samples = []
    for _ in range(iterations):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return _stats(samples)


def _chain_org(ctx, rng, depth: int, org: str = "bench"):
    """Chain of `depth` roles plus one isolated spare so no role's
    complement set is empty; the chain bottom has exactly `depth` ancestors."""
    names = [f"c{i}" for i in range(1, depth + 1)] + ["spare"]
    edges = [(f"c{i}", f"c{i + 1}") for i in range(1, depth)]
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # bench chains have thin roots
        h = build_hierarchy(org, names, edges)
    msk, pp, link_point = so_rbe.init_org(ctx, org, rng)
    rp, pks, rsecs = so_rbe.gen_role_params(pp, h, rng)
    return h, msk, pp, link_point, rp, pks, rsecs


def _verdict(name: str, expected, measured, note: str = "") -> dict:
    return {"name": name, "expected": expected, "measured": measured,
            "ok": expected == measured, "note": note}


def run_bench(config: BenchConfig | None = None) -> BenchReport:
    cfg = config or BenchConfig()
    rng = random.Random(cfg.seed)
    ctx = setup_pairing(cfg.security_level, backend=cfg.backend)
    report = BenchReport(backend=ctx.backend.name,
                         security_level=cfg.security_level,
                         q_bits=ctx.q.bit_length())

    # -- elementary operations -------------------------------------------------
    x = ctx.exp(ctx.g, ctx.rand_nonzero_scalar(rng))
    y = ctx.exp(ctx.g, ctx.rand_nonzero_scalar(rng))
    gx = ctx.exp(ctx.gt, ctx.rand_nonzero_scalar(rng))
    gy = ctx.exp(ctx.gt, ctx.rand_nonzero_scalar(rng))
    n = cfg.iterations
    report.timings["exp_g1"] = _time(
        lambda: ctx.exp(x, rng.randrange(1, ctx.q)), n)
    report.timings["exp_gt"] = _time(
        lambda: ctx.exp(gx, rng.randrange(1, ctx.q)), n)
    report.timings["pairing"] = _time(lambda: ctx.pair(x, y), n)
    report.timings["mul_g1"] = _time(lambda: ctx.mul(x, y), n)
    report.timings["mul_gt"] = _time(lambda: ctx.mul(gx, gy), n)
    report.timings["hash"] = _time(
        lambda: ctx.hash_to_scalar(rng.randbytes(32)), n)

    # -- single-org phases: counters + timings ----------------------------------
    depth = max(cfg.sizes)
    h, msk, pp, link_point, rp, pks, rsecs = _chain_org(ctx, rng, depth)
    target = h.role(f"c{depth}")
    root = h.role("c1")
    cred = so_rbe.gen_user_keys(pp, msk, "bench-user", rng)
    rk_root = so_rbe.gen_role_key(pp, rsecs[root], link_point,
                                  cred.secret_point, "bench-user")

    with ctx.measure() as enc_ops:
        key, kem = so_rbe.kem_encrypt(pp, pks[target], rng)
    report.phase_counts["so.encrypt"] = {"data-owner": enc_ops.as_dict()}
    report.timings["so.encrypt"] = _time(
        lambda: so_rbe.kem_encrypt(pp, pks[target], rng), cfg.phase_iterations)

    with ctx.measure() as tr_ops:
        trk, blind = so_rbe.transform_role_key(ctx, rk_root, rng)
    with ctx.measure() as cloud_ops:
        pd = so_rbe.cloud_partial_decrypt(ctx, kem, trk, cred.pub, root, h)
    with ctx.measure() as fin_ops:
        so_rbe.finalize_decrypt(ctx, kem.masked_key, pd, blind, cred.priv)
    report.phase_counts["so.decrypt"] = {
        "user.transform": tr_ops.as_dict(),
        "public-cloud.partial": cloud_ops.as_dict(),
        "user.finalize": fin_ops.as_dict(),
    }

    def so_decrypt_once():
        t, b = so_rbe.transform_role_key(ctx, rk_root, rng)
        p = so_rbe.cloud_partial_decrypt(ctx, kem, t, cred.pub, root, h)
        so_rbe.finalize_decrypt(ctx, kem.masked_key, p, b, cred.priv)

    report.timings["so.decrypt"] = _time(so_decrypt_once, cfg.phase_iterations)

    # -- conformance: encrypt slope and decrypt counters across sizes ------------
    enc_exp_by_size = {}
    dec_counts_by_size = {}
    flat_medians = []
    for size in cfg.sizes:
        hs, msks, pps, lks, _, pkss, rsecss = _chain_org(
            ctx, rng, size, org=f"bench{size}")
        tgt = hs.role(f"c{size}")
        rt = hs.role("c1")
        c = so_rbe.gen_user_keys(pps, msks, "u", rng)
        rk_top = so_rbe.gen_role_key(pps, rsecss[rt], lks, c.secret_point, "u")
        with ctx.measure() as ops:
            k2, ct2 = so_rbe.kem_encrypt(pps, pkss[tgt], rng)
        enc_exp_by_size[size] = ops.as_dict()

        # worst-case requester (root): maximal lift set, same exp/pair counts
        with ctx.measure() as dops:
            t2, b2 = so_rbe.transform_role_key(ctx, rk_top, rng)
            p2 = so_rbe.cloud_partial_decrypt(ctx, ct2, t2, c.pub, rt, hs)
            so_rbe.finalize_decrypt(ctx, ct2.masked_key, p2, b2, c.priv)
        dec_counts_by_size[size] = dops.as_dict()

        samples = []
        for _ in range(cfg.size_iterations):
            t0 = time.perf_counter()
            t3, b3 = so_rbe.transform_role_key(ctx, rk_top, rng)
            p3 = so_rbe.cloud_partial_decrypt(ctx, ct2, t3, c.pub, rt, hs)
            so_rbe.finalize_decrypt(ctx, ct2.masked_key, p3, b3, c.priv)
            samples.append(time.perf_counter() - t0)
        flat_medians.append(statistics.median(s * 1e3 for s in samples))

    sizes = list(cfg.sizes)
    report.conformance.append(_verdict(
        "so.encrypt.exp_gt", [1] * len(sizes),
        [enc_exp_by_size[s]["exp_gt"] for s in sizes]))
    report.conformance.append(_verdict(
        "so.encrypt.exp_g1.slope", [1] * (len(sizes) - 1),
        [enc_exp_by_size[sizes[i + 1]]["exp_g1"] - enc_exp_by_size[sizes[i]]["exp_g1"]
         for i in range(len(sizes) - 1)],
        note="one extra source-exp per additional ancestor role"))
    report.conformance.append(_verdict(
        "so.encrypt.exp_g1.literal", [s + 2 for s in sizes],
        [enc_exp_by_size[s]["exp_g1"] for s in sizes],
        note="compact formula counts 1+n; literal construction is n+2 "
             "(constant offset +1 for the extra org leg)"))
    counted = ("exp_g1", "exp_gt", "pairings")
    report.conformance.append(_verdict(
        "so.decrypt.counters.flat",
        [tuple(dec_counts_by_size[sizes[0]][k] for k in counted)] * len(sizes),
        [tuple(dec_counts_by_size[s][k] for k in counted) for s in sizes],
        note="exp/pairing counts identical for every ancestor count; "
             "mul_g1 grows with the lift set and is excluded by the cost "
             "model: " + str([dec_counts_by_size[s]["mul_g1"] for s in sizes])))
    report.conformance.append(_verdict(
        "so.decrypt.split", {"pairings": 2, "user_exp_g1": 1, "user_exp_gt": 2},
        {"pairings": cloud_ops.pairings, "user_exp_g1": tr_ops.exp_g1,
         "user_exp_gt": fin_ops.exp_gt}))

    cov = statistics.pstdev(flat_medians) / statistics.fmean(flat_medians)
    report.flatness = {"sizes": sizes,
                       "median_ms": [round(m, 6) for m in flat_medians],
                       "cov": round(cov, 6)}

    # decryption is also flat in the total role count at a fixed ancestor
    # count: grow the hierarchy with unrelated roles and re-measure
    by_total = {}
    for extra in (1, 5, 9):
        names = ["c1", "c2"] + [f"x{i}" for i in range(extra)]
        edges = [("c1", "c2")]
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            hx = build_hierarchy(f"wide{extra}", names, edges)
        mskx, ppx, lkx = so_rbe.init_org(ctx, hx.org, rng)
        _, pksx, rsecsx = so_rbe.gen_role_params(ppx, hx, rng)
        cx = so_rbe.gen_user_keys(ppx, mskx, "u", rng)
        rkx = so_rbe.gen_role_key(ppx, rsecsx[hx.role("c1")], lkx,
                                  cx.secret_point, "u")
        _, ct_x = so_rbe.kem_encrypt(ppx, pksx[hx.role("c2")], rng)
        with ctx.measure() as dops:
            tx, bx = so_rbe.transform_role_key(ctx, rkx, rng)
            px = so_rbe.cloud_partial_decrypt(ctx, ct_x, tx, cx.pub,
                                              hx.role("c1"), hx)
            so_rbe.finalize_decrypt(ctx, ct_x.masked_key, px, bx, cx.priv)
        by_total[len(names)] = tuple(dops.as_dict()[k] for k in counted)
    totals = sorted(by_total)
    report.conformance.append(_verdict(
        "so.decrypt.counters.hierarchy_size",
        [by_total[totals[0]]] * len(totals),
        [by_total[t] for t in totals],
        note=f"fixed ancestor count, total role counts {totals}"))

    # -- multi-org pipeline -------------------------------------------------------
    h_a, msk_a, pp_a, lk_a, rp_a, pks_a, rsecs_a = _chain_org(ctx, rng, 3, "orgA")
    h_b, msk_b, pp_b, lk_b, rp_b, pks_b, rsecs_b = _chain_org(ctx, rng, 3, "orgB")
    role_a = h_a.role("c3")
    role_b = h_b.role("c2")
    joint = mo_rbe.make_joint_role_key(pks_a[role_a], pks_b[role_b])
    with ctx.measure() as menc_ops:
        mkey, mct = mo_rbe.multi_kem_encrypt(pp_a, pp_b, joint, rng)
    report.phase_counts["mo.encrypt"] = {"data-owner": menc_ops.as_dict()}
    n_enc, n_partner = len(h_a.ancestors[role_a]), len(h_b.ancestors[role_b])
    report.conformance.append(_verdict(
        "mo.encrypt.counts", {"exp_g1": n_enc + n_partner + 4, "exp_gt": 1},
        {"exp_g1": menc_ops.exp_g1, "exp_gt": menc_ops.exp_gt},
        note="compact formula counts 2+n_c; literal construction is n_c+4 "
             "(two user legs, two role legs)"))

    lts = mo_rbe.make_long_term_secret(ctx, "orgB", msk_b)
    rekey = mo_rbe.make_rekey(ctx, "orgA", msk_a, lts)
    cred_b = so_rbe.gen_user_keys(pp_b, msk_b, "bench-bob", rng)
    rk_b = so_rbe.gen_role_key(pp_b, rsecs_b[h_b.role("c1")], lk_b,
                               cred_b.secret_point, "bench-bob")
    with ctx.measure() as mo_user1:
        mtrk, mblind = so_rbe.transform_role_key(ctx, rk_b, rng)
    with ctx.measure() as mo_priv_a:
        translated = mo_rbe.translate_ciphertext(ctx, mct.masked_key,
                                                 mct.user_leg, rekey,
                                                 msk_a.gate_exp)
    with ctx.measure() as mo_priv_b:
        tdk = mo_rbe.make_temp_decryption_key(ctx, mtrk, cred_b.pub,
                                              msk_b.share_exp)
    with ctx.measure() as mo_pub:
        mpd = mo_rbe.multi_cloud_partial_decrypt(ctx, mct, tdk,
                                                 h_b.role("c1"), h_b)
    with ctx.measure() as mo_user2:
        mo_rbe.multi_finalize_decrypt(ctx, translated, mpd, mblind, cred_b.priv)
    report.phase_counts["mo.decrypt"] = {
        "user.transform": mo_user1.as_dict(),
        "private-cloud.data-org.translate": mo_priv_a.as_dict(),
        "private-cloud.home-org.tdk": mo_priv_b.as_dict(),
        "public-cloud.partial": mo_pub.as_dict(),
        "user.finalize": mo_user2.as_dict(),
    }
    total = mo_user1 + mo_priv_a + mo_priv_b + mo_pub + mo_user2
    report.conformance.append(_verdict(
        "mo.decrypt.pipeline",
        {"exp_g1": 4, "exp_gt": 2, "pairings": 3},
        {"exp_g1": total.exp_g1, "exp_gt": total.exp_gt,
         "pairings": total.pairings}))
    report.conformance.append(_verdict(
        "mo.decrypt.attribution",
        {"user": (1, 2, 0), "private_clouds": (3, 0, 1), "public_cloud": (0, 0, 2)},
        {"user": (mo_user1.exp_g1 + mo_user2.exp_g1,
                  mo_user1.exp_gt + mo_user2.exp_gt,
                  mo_user1.pairings + mo_user2.pairings),
         "private_clouds": (mo_priv_a.exp_g1 + mo_priv_b.exp_g1,
                            mo_priv_a.exp_gt + mo_priv_b.exp_gt,
                            mo_priv_a.pairings + mo_priv_b.pairings),
         "public_cloud": (mo_pub.exp_g1, mo_pub.exp_gt, mo_pub.pairings)},
        note="(source-exp, target-exp, pairings) per party"))

    # -- storage ------------------------------------------------------------------
    import tempfile
    from pathlib import Path
    with tempfile.TemporaryDirectory() as td:
        master_bytes = keyfiles.save_master(Path(td) / "m.key", ctx, "bench",
                                            msk, rp)
        info = keyfiles.inspect_master(master_bytes)
        n_t = len(h.roles)
        report.storage.append({
            "artifact": "master-secret", "bytes": len(master_bytes),
            "scalars": info["scalars"], "formula": f"4 + n_t = {4 + n_t}",
            "ok": info["scalars"] == 4 + n_t})
        msg = rng.randbytes(cfg.message_len)
        sealed = envelope.seal(msg, key, rng)
        container = envelope.pack_ciphertext(kem, sealed)
        report.storage.append({
            "artifact": f"so-ciphertext[n={depth}]", "bytes": len(container),
            "gt_elements": 1, "g1_elements": len(kem.lift) + 2,
            "formula": f"compact (1+n_c)|G1|+|GT| with n_c={depth}; "
                       f"literal ({depth}+2)|G1|+|GT|",
            "ok": len(kem.lift) == depth})
        msealed = envelope.seal(msg, mkey, rng)
        mcontainer = envelope.pack_ciphertext(mct, msealed)
        report.storage.append({
            "artifact": "mo-ciphertext", "bytes": len(mcontainer),
            "gt_elements": 1,
            "g1_elements": len(mct.lift) + len(mct.partner_lift) + 4,
            "formula": f"compact (2+n_c)|G1|+|GT| with n_c="
                       f"{len(mct.lift) + len(mct.partner_lift)}; literal "
                       f"(n_c+4)|G1|+|GT|",
            "ok": True})
        cred_bytes = keyfiles.save_user_credential(Path(td) / "u.cred", cred)
        rk_bytes = keyfiles.save_role_key(Path(td) / "u.rkey", rk_root)
        report.storage.append({"artifact": "user-credential",
                               "bytes": len(cred_bytes),
                               "formula": "|G1|x2 + |Zq| + header", "ok": True})
        report.storage.append({"artifact": "role-key", "bytes": len(rk_bytes),
                               "formula": "|G1| + header (user key material "
                                          "= |G1| + |Zq| private scalar)",
                               "ok": True})
    return report


# -- rendering --------------------------------------------------------------------

def render_text(report: BenchReport) -> str:
    out = []
    out.append(f"backend={report.backend} level={report.security_level} "
               f"q_bits={report.q_bits}")
    out.append("")
    out.append("== elementary and phase timings (this host) ==")
    for op, st in report.timings.items():
        out.append(f"  {op:<14} median {st['median_ms']:>10.4f} ms   "
                   f"p95 {st['p95_ms']:>10.4f} ms   (n={st['n']})")
    out.append("")
    out.append("== reference timings, original type-A 160-bit instantiation "
               "(informational only) ==")
    for host, vals in report.reference.items():
        pretty = " ".join(f"{k}={v}ms" for k, v in vals.items())
        out.append(f"  {host}: {pretty}")
    out.append("")
    out.append("== operation counts per phase per party ==")
    for phase, parties in report.phase_counts.items():
        out.append(f"  {phase}:")
        for party, counts in parties.items():
            nz = {k: v for k, v in counts.items() if v}
            out.append(f"    {party:<34} {nz or '{}'}")
    out.append("")
    out.append("== conformance verdicts ==")
    for row in report.conformance:
        mark = "PASS" if row["ok"] else "FAIL"
        out.append(f"  [{mark}] {row['name']}")
        out.append(f"         expected {row['expected']}")
        out.append(f"         measured {row['measured']}")
        if row.get("note"):
            out.append(f"         note: {row['note']}")
    out.append("")
    f = report.flatness
    out.append("== decryption flatness vs ancestor count ==")
    out.append(f"  sizes      {f['sizes']}")
    out.append(f"  median ms  {f['median_ms']}")
    out.append(f"  coefficient of variation {f['cov']:.4f}")
    out.append("")
    out.append("== storage ==")
    for row in report.storage:
        mark = "PASS" if row["ok"] else "FAIL"
        extras = {k: v for k, v in row.items()
                  if k not in ("artifact", "bytes", "formula", "ok")}
        out.append(f"  [{mark}] {row['artifact']:<22} {row['bytes']:>7} bytes  "
                   f"{extras}  {row['formula']}")
    out.append("")
    out.append(f"overall: {'CONFORMANT' if report.all_conformant() else 'NONCONFORMANT'}")
    return "\n".join(out) + "\n"


def render_machine(report: BenchReport) -> str:
    payload = {
        "backend": report.backend,
        "security_level": report.security_level,
        "q_bits": report.q_bits,
        "timings": report.timings,
        "phase_counts": report.phase_counts,
        "conformance": report.conformance,
        "flatness": report.flatness,
        "storage": report.storage,
        "reference_timings_ms": report.reference,
        "conformant": report.all_conformant(),
    }
    return json.dumps(payload, indent=2, default=str) + "\n"
