"""Symmetric-contract pairing context with instrumented operation counting.

``setup_pairing`` returns a :class:`PairingContext` over a prime-order group
pair with generator ``g`` and pairing ``pair(x, y)`` satisfying

    pair(g^a, g^b) = pair(g, g)^(a*b)        (bilinear)
    pair(x, y)     = pair(y, x)              (symmetric contract)
    pair(g, g)    != 1                       (non-degenerate)

Every logical source-group element is a mirrored (left, right) component
pair over the asymmetric backend; see :mod:`rbe.algebra.backends`.

Instrumentation
---------------
Each ``exp`` / ``mul`` / ``pair`` / ``hash_to_scalar`` call bumps the
context's :class:`OpCounter`.  Counter diffs are exact within a
single-threaded measurement scope (use :meth:`PairingContext.measure`).
Contexts and elements are immutable and freely shareable across threads;
the counter is the only mutable state.

Exponent ledger
---------------
With ``ledger=True`` every element carries ``log``, its discrete log with
respect to ``g`` (or ``pair(g, g)``), propagated purely by arithmetic
mod q.  ``ledger_check`` revalidates an element's canonical bytes against
``g^log``, giving an oracle for every scheme equation that is independent
of the group-operation path that produced the element.  Test builds only;
the ledger holds secrets by construction.
"""

from __future__ import annotations

import hashlib
import random
from contextlib import contextmanager
from dataclasses import dataclass, fields

from ..errors import CrossContextError, UnsupportedSecurityLevel
from .backends import default_backend, get_backend

__all__ = [
    "OpCounts",
    "OpCounter",
    "G1Element",
    "GTElement",
    "PairingContext",
    "setup_pairing",
    "SUPPORTED_SECURITY_LEVELS",
]

HASH_DOMAIN_TAG = b"rbe.hash-to-scalar.v1\x00"

#: Security levels with a configured curve profile.  Both currently select
#: BLS12-381 (255-bit prime order), the smallest curve offered by the
#: available backends whose strength meets or exceeds the request.
SUPPORTED_SECURITY_LEVELS = (80, 128)


@dataclass
class OpCounts:
    """Snapshot of group-operation tallies."""

    exp_g1: int = 0
    exp_gt: int = 0
    pairings: int = 0
    mul_g1: int = 0
    mul_gt: int = 0
    hashes: int = 0

    def __sub__(self, other: "OpCounts") -> "OpCounts":
        return OpCounts(**{f.name: getattr(self, f.name) - getattr(other, f.name)
                           for f in fields(self)})

    def __add__(self, other: "OpCounts") -> "OpCounts":
        return OpCounts(**{f.name: getattr(self, f.name) + getattr(other, f.name)
                           for f in fields(self)})

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def copy_from(self, other: "OpCounts") -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(other, f.name))


class OpCounter:
    """Monotone operation counter confined to one measurement thread."""

    def __init__(self) -> None:
        self._counts = OpCounts()

    def bump(self, name: str, by: int = 1) -> None:
        setattr(self._counts, name, getattr(self._counts, name) + by)

    def snapshot(self) -> OpCounts:
        return OpCounts(**self._counts.as_dict())

    def diff(self, since: OpCounts) -> OpCounts:
        return self.snapshot() - since

    @contextmanager
    def measure(self):
        """Yield an OpCounts that holds the scope's exact diff on exit."""
        before = self.snapshot()
        delta = OpCounts()
        try:
            yield delta
        finally:
            delta.copy_from(self.snapshot() - before)


class G1Element:
    """Immutable source-group element (mirrored backend component pair)."""

    __slots__ = ("ctx", "left", "right", "log")

    def __init__(self, ctx: "PairingContext", left, right, log: int | None):
        self.ctx = ctx
        self.left = left
        self.right = right
        self.log = log
        ctx._register(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, G1Element):
            return NotImplemented
        if other.ctx is not self.ctx:
            return False
        b = self.ctx.backend
        return b.eq(self.left, other.left) and b.eq(self.right, other.right)

    __hash__ = None

    def serialize(self) -> bytes:
        b = self.ctx.backend
        return b.ser_g1(self.left) + b.ser_g2(self.right)

    def __repr__(self) -> str:
        return f"<G1Element {self.serialize()[:8].hex()}…>"


class GTElement:
    """Immutable target-group element."""

    __slots__ = ("ctx", "raw", "log")

    def __init__(self, ctx: "PairingContext", raw, log: int | None):
        self.ctx = ctx
        self.raw = raw
        self.log = log
        ctx._register(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GTElement):
            return NotImplemented
        if other.ctx is not self.ctx:
            return False
        return self.ctx.backend.eq(self.raw, other.raw)

    __hash__ = None

    def serialize(self) -> bytes:
        return self.ctx.backend.ser_gt(self.raw)

    def __repr__(self) -> str:
        return f"<GTElement {self.serialize()[:8].hex()}…>"


class PairingContext:
    """Prime-order symmetric-contract pairing group with op counting."""

    def __init__(self, security_level: int, backend, ledger: bool = False):
        self.security_level = security_level
        self.backend = backend
        self.q: int = backend.order
        #: input-domain width of hash_to_scalar in bits; None = unbounded
        #: (inputs are arbitrary byte strings)
        self.hash_width: int | None = None
        self.scalar_len = (self.q.bit_length() + 7) // 8
        self.g1_elem_len = backend.g1_len + backend.g2_len
        self.gt_elem_len = backend.gt_len
        self.counter = OpCounter()
        self.ledger = ledger
        self._ledger_elements: list[object] = []
        self.g = self._make_g1(backend.g1, backend.g2, 1)
        self.gt = self._make_gt(backend.gt_gen, 1)

    # -- element plumbing --------------------------------------------------
    def _register(self, el) -> None:
        if self.ledger:
            self._ledger_elements.append(el)

    def _make_g1(self, left, right, log) -> G1Element:
        return G1Element(self, left, right, log if self.ledger else None)

    def _make_gt(self, raw, log) -> GTElement:
        return GTElement(self, raw, log if self.ledger else None)

    def _check(self, *els) -> None:
        for el in els:
            if el.ctx is not self:
                raise CrossContextError("operands belong to a different context")

    def _mod(self, n: int) -> int:
        return n % self.q

    # -- group operations ----------------------------------------------------
    def exp(self, x, n: int):
        """x^n.  Counts one exp in x's group."""
        self._check(x)
        b = self.backend
        n = self._mod(n)
        if isinstance(x, G1Element):
            self.counter.bump("exp_g1")
            log = None if x.log is None else self._mod(x.log * n)
            return self._make_g1(b.exp_g1(x.left, n), b.exp_g2(x.right, n), log)
        self.counter.bump("exp_gt")
        log = None if x.log is None else self._mod(x.log * n)
        return self._make_gt(b.exp_gt(x.raw, n), log)

    def mul(self, x, y):
        """x·y.  Counts one mul in the operands' group."""
        self._check(x, y)
        b = self.backend
        if isinstance(x, G1Element):
            if not isinstance(y, G1Element):
                raise TypeError("cannot multiply elements of different groups")
            self.counter.bump("mul_g1")
            log = None if x.log is None or y.log is None else self._mod(x.log + y.log)
            return self._make_g1(b.mul_g1(x.left, y.left), b.mul_g2(x.right, y.right), log)
        if not isinstance(y, GTElement):
            raise TypeError("cannot multiply elements of different groups")
        self.counter.bump("mul_gt")
        log = None if x.log is None or y.log is None else self._mod(x.log + y.log)
        return self._make_gt(b.mul_gt(x.raw, y.raw), log)

    def div(self, x, y):
        """x·y^{-1}.  Counted as one mul (inversion cost is not tracked)."""
        self._check(x, y)
        b = self.backend
        if isinstance(x, G1Element):
            self.counter.bump("mul_g1")
            log = None if x.log is None or y.log is None else self._mod(x.log - y.log)
            return self._make_g1(b.mul_g1(x.left, b.inv_g1(y.left)),
                                 b.mul_g2(x.right, b.inv_g2(y.right)), log)
        self.counter.bump("mul_gt")
        log = None if x.log is None or y.log is None else self._mod(x.log - y.log)
        return self._make_gt(b.mul_gt(x.raw, b.inv_gt(y.raw)), log)

    def pair(self, x: G1Element, y: G1Element) -> GTElement:
        """Bilinear map; symmetric in its arguments.  Counts one pairing."""
        self._check(x, y)
        self.counter.bump("pairings")
        log = None if x.log is None or y.log is None else self._mod(x.log * y.log)
        return self._make_gt(self.backend.pair(x.left, y.right), log)

    def identity_g1(self) -> G1Element:
        return self._exp_g1_raw(0)

    def one_gt(self) -> GTElement:
        return self._exp_gt_raw(0)

    # -- uncounted internals (sampling, ledger verification) ---------------
    def _exp_g1_raw(self, n: int) -> G1Element:
        b = self.backend
        n = self._mod(n)
        return self._make_g1(b.exp_g1(b.g1, n), b.exp_g2(b.g2, n), n)

    def _exp_gt_raw(self, n: int) -> GTElement:
        n = self._mod(n)
        return self._make_gt(self.backend.exp_gt(self.backend.gt_gen, n), n)

    # -- scalars -----------------------------------------------------------
    def hash_to_scalar(self, data: bytes | str) -> int:
        """Collision-resistant hash of non-empty data into [1, q-1].

        Deterministic, domain-separated; the measure-zero event of hitting
        0 mod q re-derives with a counter suffix.  Counts one hash.
        """
        if isinstance(data, str):
            data = data.encode("utf-8")
        if not data:
            raise ValueError("hash_to_scalar input must be non-empty")
        self.counter.bump("hashes")
        suffix = b""
        ctr = 0
        while True:
            digest = hashlib.shake_256(HASH_DOMAIN_TAG + data + suffix).digest(48)
            n = int.from_bytes(digest, "big") % self.q
            if n != 0:
                return n
            ctr += 1
            suffix = b"\x00retry" + ctr.to_bytes(4, "big")

    def rand_nonzero_scalar(self, rng: random.Random) -> int:
        """Uniform scalar in [1, q-1] from the caller's seeded source."""
        return rng.randrange(1, self.q)

    def sample_gt(self, rng: random.Random) -> GTElement:
        """Uniform element of the order-q target group.

        Sampling is not a scheme operation: it does not touch the counter
        (mirrors cost accounting that treats random keys as inputs).
        """
        return self._exp_gt_raw(rng.randrange(self.q))

    # -- serialization -------------------------------------------------------
    def serialize(self, el) -> bytes:
        self._check(el)
        return el.serialize()

    def deserialize_g1(self, data: bytes) -> G1Element:
        b = self.backend
        if len(data) != self.g1_elem_len:
            raise ValueError(f"need {self.g1_elem_len} bytes, got {len(data)}")
        left = b.deser_g1(data[:b.g1_len])
        right = b.deser_g2(data[b.g1_len:])
        return G1Element(self, left, right, None)

    def deserialize_gt(self, data: bytes) -> GTElement:
        return GTElement(self, self.backend.deser_gt(data), None)

    # -- exponent-ledger oracle ---------------------------------------------
    def ledger_check(self, el) -> bool:
        """True iff el's canonical bytes equal g (or pair(g,g)) ^ el.log."""
        if el.log is None:
            raise ValueError("element carries no ledger annotation")
        if isinstance(el, G1Element):
            return el.serialize() == self._exp_g1_raw(el.log).serialize()
        return el.serialize() == self._exp_gt_raw(el.log).serialize()

    @property
    def ledger_elements(self) -> tuple:
        return tuple(self._ledger_elements)

    def clear_ledger_registry(self) -> None:
        self._ledger_elements.clear()

    # -- measurement ---------------------------------------------------------
    def measure(self):
        """Context manager yielding this scope's exact OpCounts diff."""
        return self.counter.measure()

    def __repr__(self) -> str:
        return (f"<PairingContext level={self.security_level} "
                f"backend={self.backend.name} q_bits={self.q.bit_length()}>")


def setup_pairing(security_level: int, *, backend: str | None = None,
                  ledger: bool = False) -> PairingContext:
    """Build a pairing context for a supported security level.

    Levels 80 and 128 both select BLS12-381 (255-bit prime group order);
    80 is the compatibility level for deployments sized against older
    160-bit-order symmetric-curve parameters, and the resulting group
    meets it with margin.  Deterministic given the curve choice: repeated
    setups serialize ``g`` identically.
    """
    if security_level not in SUPPORTED_SECURITY_LEVELS:
        raise UnsupportedSecurityLevel(
            f"security level {security_level} not in {SUPPORTED_SECURITY_LEVELS}")
    be = get_backend(backend) if backend else default_backend()
    return PairingContext(security_level, be, ledger=ledger)
