"""Element wire format.

One record per value:

    tag byte || u16 big-endian length || canonical bytes

Tags: 0x01 source-group element, 0x02 target-group element, 0x03 scalar
(fixed-width big-endian, width = ceil(bits(q) / 8)).  Strings used by the
container formats are u16-length-prefixed UTF-8.
"""

from __future__ import annotations

import struct

from ..errors import EncodingError
from .context import G1Element, GTElement, PairingContext

TAG_G1 = 0x01
TAG_GT = 0x02
TAG_SCALAR = 0x03

__all__ = [
    "TAG_G1", "TAG_GT", "TAG_SCALAR",
    "encode_element", "encode_scalar", "decode_record",
    "encode_str", "Reader",
]


def _record(tag: int, body: bytes) -> bytes:
    if len(body) > 0xFFFF:
        raise EncodingError("record body too long")
    return struct.pack(">BH", tag, len(body)) + body


def encode_element(el) -> bytes:
    if isinstance(el, G1Element):
        return _record(TAG_G1, el.serialize())
    if isinstance(el, GTElement):
        return _record(TAG_GT, el.serialize())
    raise TypeError(f"not a group element: {type(el).__name__}")


def encode_scalar(n: int, ctx: PairingContext) -> bytes:
    return _record(TAG_SCALAR, (n % ctx.q).to_bytes(ctx.scalar_len, "big"))


def encode_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    if len(raw) > 0xFFFF:
        raise EncodingError("string too long")
    return struct.pack(">H", len(raw)) + raw


class Reader:
    """Cursor over a wire buffer; every read validates remaining length."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def _take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise EncodingError("truncated buffer")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u8(self) -> int:
        return self._take(1)[0]

    def u16(self) -> int:
        return struct.unpack(">H", self._take(2))[0]

    def u32(self) -> int:
        return struct.unpack(">I", self._take(4))[0]

    def raw(self, n: int) -> bytes:
        return self._take(n)

    def string(self) -> str:
        return self._take(self.u16()).decode("utf-8")

    def record(self, ctx: PairingContext, expect: int | None = None):
        tag = self.u8()
        body = self._take(self.u16())
        if expect is not None and tag != expect:
            raise EncodingError(f"expected record tag {expect:#04x}, got {tag:#04x}")
        if tag == TAG_G1:
            return self._checked(ctx.deserialize_g1, body)
        if tag == TAG_GT:
            return self._checked(ctx.deserialize_gt, body)
        if tag == TAG_SCALAR:
            if len(body) != ctx.scalar_len:
                raise EncodingError("bad scalar width")
            return int.from_bytes(body, "big")
        raise EncodingError(f"unknown record tag {tag:#04x}")

    @staticmethod
    def _checked(deser, body: bytes):
        try:
            return deser(body)
        except EncodingError:
            raise
        except Exception as exc:
            raise EncodingError(str(exc)) from exc

    def expect_end(self) -> None:
        if self.pos != len(self.data):
            raise EncodingError(f"{len(self.data) - self.pos} trailing bytes")


def decode_record(ctx: PairingContext, data: bytes):
    """Decode a single standalone record; rejects trailing bytes."""
    r = Reader(data)
    value = r.record(ctx)
    r.expect_end()
    return value
