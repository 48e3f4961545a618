"""Curve backend adapters.

The toolkit's group layer exposes a *symmetric* pairing contract (both
pairing arguments come from one logical source group).  No maintained
Python library provides a symmetric (supersingular) pairing, so both
backends here are asymmetric BLS12-381 implementations; the context layer
mirrors every logical source-group element into (left, right) components
with the same exponent and pairs left-against-right, which preserves the
symmetric equations exactly.

Backends
--------
- ``petrelic``: RELIC bindings, native speed (~1 ms per pairing).
  Preferred whenever importable.
- ``py_ecc``: pure Python, slow but dependency-light; always available.

Both expose the same duck-typed surface: generators, per-group exp/mul/inv,
``pair``, equality, and canonical fixed-length serialization.  Encodings are
backend-specific (RELIC binary vs ZCash-style compression + FQ12 coords),
so every file format records the backend's ``encoding_id`` and refuses to
mix encodings.

The group identity never occurs in honest protocol runs; RELIC encodes it
as a single zero byte, which we pad to the group's fixed length with an
all-zero block (not a valid point encoding, so the mapping is injective).
"""

from __future__ import annotations

from ..errors import EncodingError

__all__ = ["available_backends", "get_backend", "default_backend"]


class PetrelicBackend:
    """BLS12-381 via the RELIC-based `petrelic` bindings."""

    name = "petrelic"
    encoding_id = 0x01
    g1_len = 49
    g2_len = 97
    gt_len = 384

    def __init__(self) -> None:
        from petrelic.multiplicative import pairing as _p

        self._m = _p
        self.order = int(_p.G1.order())
        self.g1 = _p.G1.generator()
        self.g2 = _p.G2.generator()
        self.gt_gen = self.g1.pair(self.g2)

    # -- group operations ------------------------------------------------
    def exp_g1(self, p, n: int):
        return p ** (n % self.order)

    def exp_g2(self, p, n: int):
        return p ** (n % self.order)

    def exp_gt(self, e, n: int):
        return e ** (n % self.order)

    def mul_g1(self, a, b):
        return a * b

    def mul_g2(self, a, b):
        return a * b

    def mul_gt(self, a, b):
        return a * b

    def inv_g1(self, a):
        return a.inverse()

    def inv_g2(self, a):
        return a.inverse()

    def inv_gt(self, a):
        return a.inverse()

    def pair(self, p, q):
        return p.pair(q)

    def eq(self, a, b) -> bool:
        return a == b

    # -- serialization ---------------------------------------------------
    def _ser(self, el, width: int) -> bytes:
        raw = el.to_binary()
        if len(raw) == width:
            return bytes(raw)
        if len(raw) == 1:  # RELIC encodes the identity as b"\x00"
            return b"\x00" * width
        raise EncodingError(f"unexpected petrelic encoding length {len(raw)}")

    def _deser(self, cls, data: bytes, width: int):
        if len(data) != width:
            raise EncodingError(f"expected {width} bytes, got {len(data)}")
        if data == b"\x00" * width:
            data = b"\x00"
        try:
            return cls.from_binary(bytes(data))
        except Exception as exc:  # RELIC raises its own error types
            raise EncodingError(f"invalid point encoding: {exc}") from exc

    def ser_g1(self, p) -> bytes:
        return self._ser(p, self.g1_len)

    def ser_g2(self, p) -> bytes:
        return self._ser(p, self.g2_len)

    def ser_gt(self, e) -> bytes:
        return self._ser(e, self.gt_len)

    def deser_g1(self, data: bytes):
        return self._deser(self._m.G1Element, data, self.g1_len)

    def deser_g2(self, data: bytes):
        return self._deser(self._m.G2Element, data, self.g2_len)

    def deser_gt(self, data: bytes):
        return self._deser(self._m.GTElement, data, self.gt_len)


class PyEccBackend:
    """BLS12-381 via `py_ecc.optimized_bls12_381` (pure Python)."""

    name = "py_ecc"
    encoding_id = 0x02
    g1_len = 48
    g2_len = 96
    gt_len = 576

    def __init__(self) -> None:
        from py_ecc import optimized_bls12_381 as _c
        from py_ecc.bls import point_compression as _pc

        self._c = _c
        self._pc = _pc
        self.order = int(_c.curve_order)
        self.g1 = _c.G1
        self.g2 = _c.G2
        self.gt_gen = _c.pairing(_c.G2, _c.G1)
        self._fq12 = type(self.gt_gen)

    def exp_g1(self, p, n: int):
        return self._c.multiply(p, n % self.order)

    def exp_g2(self, p, n: int):
        return self._c.multiply(p, n % self.order)

    def exp_gt(self, e, n: int):
        return e ** (n % self.order)

    def mul_g1(self, a, b):
        return self._c.add(a, b)

    def mul_g2(self, a, b):
        return self._c.add(a, b)

    def mul_gt(self, a, b):
        return a * b

    def inv_g1(self, a):
        return self._c.neg(a)

    def inv_g2(self, a):
        return self._c.neg(a)

    def inv_gt(self, a):
        return self._fq12.one() / a

    def pair(self, p, q):
        if self._c.is_inf(p) or self._c.is_inf(q):
            return self._fq12.one()
        return self._c.pairing(q, p)

    def eq(self, a, b) -> bool:
        if isinstance(a, tuple):
            return self._c.eq(a, b)
        return a == b

    def ser_g1(self, p) -> bytes:
        return self._pc.compress_G1(p).to_bytes(self.g1_len, "big")

    def ser_g2(self, p) -> bytes:
        n = self._pc.compress_G2(p)
        return ((n[0] << 384) | n[1]).to_bytes(self.g2_len, "big")

    def ser_gt(self, e) -> bytes:
        out = bytearray()
        for c in e.coeffs:
            out += int(c).to_bytes(48, "big")
        return bytes(out)

    def deser_g1(self, data: bytes):
        if len(data) != self.g1_len:
            raise EncodingError(f"expected {self.g1_len} bytes, got {len(data)}")
        try:
            return self._pc.decompress_G1(int.from_bytes(data, "big"))
        except Exception as exc:
            raise EncodingError(f"invalid G1 encoding: {exc}") from exc

    def deser_g2(self, data: bytes):
        if len(data) != self.g2_len:
            raise EncodingError(f"expected {self.g2_len} bytes, got {len(data)}")
        n = int.from_bytes(data, "big")
        try:
            return self._pc.decompress_G2((n >> 384, n & ((1 << 384) - 1)))
        except Exception as exc:
            raise EncodingError(f"invalid G2 encoding: {exc}") from exc

    def deser_gt(self, data: bytes):
        if len(data) != self.gt_len:
            raise EncodingError(f"expected {self.gt_len} bytes, got {len(data)}")
        coeffs = [int.from_bytes(data[i * 48:(i + 1) * 48], "big") for i in range(12)]
        return self._fq12(coeffs)


_BACKENDS = {"petrelic": PetrelicBackend, "py_ecc": PyEccBackend}
_instances: dict[str, object] = {}


def available_backends() -> list[str]:
    """Names of backends whose imports succeed, preferred first."""
    found = []
    for name in ("petrelic", "py_ecc"):
        try:
            get_backend(name)
            found.append(name)
        except ImportError:
            pass
    return found


def get_backend(name: str):
    """Instantiate (and cache) the named backend."""
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; know {sorted(_BACKENDS)}")
    if name not in _instances:
        _instances[name] = _BACKENDS[name]()
    return _instances[name]


def default_backend():
    """Fastest importable backend: petrelic if present, else py_ecc."""
    try:
        return get_backend("petrelic")
    except ImportError:
        return get_backend("py_ecc")
