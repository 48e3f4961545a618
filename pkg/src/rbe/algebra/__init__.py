"""Pairing-group layer: contexts, elements, counters, wire records."""

from .backends import available_backends, default_backend, get_backend
from .context import (
    SUPPORTED_SECURITY_LEVELS,
    G1Element,
    GTElement,
    OpCounter,
    OpCounts,
    PairingContext,
    setup_pairing,
)
from .wire import (
    TAG_G1,
    TAG_GT,
    TAG_SCALAR,
    Reader,
    decode_record,
    encode_element,
    encode_scalar,
    encode_str,
)

__all__ = [
    "available_backends", "default_backend", "get_backend",
    "SUPPORTED_SECURITY_LEVELS", "G1Element", "GTElement",
    "OpCounter", "OpCounts", "PairingContext", "setup_pairing",
    "TAG_G1", "TAG_GT", "TAG_SCALAR", "Reader", "decode_record",
    "encode_element", "encode_scalar", "encode_str",
]
