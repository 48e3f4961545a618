"""Exception hierarchy for the toolkit.

Protocol-level failures (revocation, authorization, authentication) carry
stable class names because the CLI surfaces them verbatim on stderr and
maps them to exit code 2.
"""


class RbeError(Exception):
    """Base class for all toolkit errors."""


class UnsupportedSecurityLevel(RbeError):
    """Requested security level has no configured curve profile."""


class CrossContextError(RbeError):
    """Group operation mixed elements from different pairing contexts."""


class EncodingError(RbeError):
    """Malformed wire bytes, or bytes from an incompatible backend encoding."""


class HierarchyError(RbeError):
    """Base class for role-hierarchy construction and lookup failures."""


class CycleError(HierarchyError):
    """The parent/child relation contains a cycle."""


class UnknownRole(HierarchyError):
    """A role id was referenced that is not part of the hierarchy."""


class DuplicateRole(HierarchyError):
    """The same role id was declared twice."""


class DegenerateHierarchy(RbeError):
    """Role parameters cannot be generated (empty role set, or some role's
    complement-ancestor set is empty so its parameter sum is identically 0)."""


class RevokedUser(RbeError):
    """The user's public key is absent from the bulletin board."""


class UnauthorizedRole(RbeError):
    """The requesting role is not an ancestor of the ciphertext's role."""


class MissingComponent(RbeError):
    """A ciphertext lacks a lift component it must carry; signals corruption."""


class AuthFailure(RbeError):
    """Payload authentication failed: wrong key or corrupted ciphertext."""


class UnknownUser(RbeError):
    """Operation referenced a user id that is not registered."""


class MissingRekey(RbeError):
    """No re-encryption key exists for the requested organization pair."""


class SameOrgJointKey(RbeError):
    """Joint role public keys are cross-organization by definition."""


class ProtocolOrderError(RbeError):
    """A scenario step ran before its prerequisite phase completed."""


class AuthenticationFailed(RbeError):
    """The authentication stub rejected the requesting user."""
