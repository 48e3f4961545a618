"""Role-based encryption toolkit.

Hierarchical role-based encryption for single- and multi-organization
deployments over a symmetric-contract bilinear pairing, with outsourced
decryption, bulletin-board revocation, cross-org ciphertext translation,
a deterministic protocol simulator, and an instrumented benchmark.
"""

from . import actors, algebra, bench, cli, envelope, errors, hierarchy, keyfiles, mo_rbe, so_rbe
from .algebra import PairingContext, setup_pairing
from .hierarchy import RoleHierarchy, RoleId, build_hierarchy, gamma

__version__ = "0.1.0"

__all__ = [
    "actors", "algebra", "bench", "cli", "envelope", "errors", "hierarchy",
    "keyfiles", "mo_rbe", "so_rbe",
    "PairingContext", "setup_pairing",
    "RoleHierarchy", "RoleId", "build_hierarchy", "gamma",
    "__version__",
]
