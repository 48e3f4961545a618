"""Role-hierarchy DAG with derived ancestor/descendant algebra.

A hierarchy is a DAG of roles (multiple parents allowed).  For each role r
the build derives, by transitive closure:

    ancestors(r)        self-inclusive  (r is its own ancestor)
    descendants(r)      self-exclusive
    outside(r)          all roles minus ancestors(r)
    non_descendants(r)  all roles minus descendants(r)

``gamma(h, r_x, r_i)`` = ancestors(r_i) minus ancestors(r_x) is the set of
lift components a ciphertext targeted at r_i needs in order to be retargeted
to the requesting ancestor role r_x; whenever r_x is an ancestor of r_i the
disjoint-union identity

    outside(r_i) ⊎ gamma(r_x, r_i) = outside(r_x)

holds, which is what makes the outsourced-decryption product telescope.
"""

from __future__ import annotations

import graphlib
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from . import errors

__all__ = [
    "RoleId", "RoleHierarchy", "RootFanoutWarning",
    "build_hierarchy", "gamma", "parse_hierarchy_text", "load_hierarchy_file",
    "dump_hierarchy_text",
]


class RootFanoutWarning(UserWarning):
    """A root role has fewer than three children (policy, not correctness:
    with two children each child's manager could infer the other's secret
    role parameter)."""


@dataclass(frozen=True, order=True)
class RoleId:
    """Organization-qualified role name."""

    org: str
    name: str

    def __post_init__(self):
        if not self.org or not self.name:
            raise ValueError("RoleId org and name must be non-empty")

    def __str__(self) -> str:
        return f"{self.org}/{self.name}"


@dataclass(frozen=True)
class RoleHierarchy:
    """Immutable DAG over an organization's roles plus its closure sets."""

    org: str
    roles: frozenset[RoleId]
    edges: tuple[tuple[RoleId, RoleId], ...]
    ancestors: Mapping[RoleId, frozenset[RoleId]]
    descendants: Mapping[RoleId, frozenset[RoleId]]

    def require(self, role: RoleId) -> None:
        if role not in self.roles:
            raise errors.UnknownRole(f"{role} is not in this hierarchy")

    def outside(self, role: RoleId) -> frozenset[RoleId]:
        """Complement of the (self-inclusive) ancestor set."""
        self.require(role)
        return self.roles - self.ancestors[role]

    def non_descendants(self, role: RoleId) -> frozenset[RoleId]:
        """Complement of the (self-exclusive) descendant set."""
        self.require(role)
        return self.roles - self.descendants[role]

    def role(self, name: str) -> RoleId:
        rid = RoleId(self.org, name)
        self.require(rid)
        return rid

    def sorted_roles(self) -> list[RoleId]:
        return sorted(self.roles)


def build_hierarchy(org: str, roles: Iterable[str],
                    edges: Iterable[tuple[str, str]]) -> RoleHierarchy:
    """Build and validate a hierarchy from role names and parent→child pairs.

    Raises on duplicate roles, edges naming undeclared roles, and cycles.
    Emits :class:`RootFanoutWarning` when any root has fewer than three
    children.
    """
    role_ids: list[RoleId] = []
    seen: set[str] = set()
    for name in roles:
        if name in seen:
            raise errors.DuplicateRole(f"role {name!r} declared twice")
        seen.add(name)
        role_ids.append(RoleId(org, name))
    role_set = frozenset(role_ids)

    edge_ids: list[tuple[RoleId, RoleId]] = []
    for parent, child in edges:
        if parent not in seen:
            raise errors.UnknownRole(f"edge references undeclared role {parent!r}")
        if child not in seen:
            raise errors.UnknownRole(f"edge references undeclared role {child!r}")
        edge_ids.append((RoleId(org, parent), RoleId(org, child)))

    parents: dict[RoleId, set[RoleId]] = {r: set() for r in role_set}
    children: dict[RoleId, set[RoleId]] = {r: set() for r in role_set}
    for p, c in edge_ids:
        parents[c].add(p)
        children[p].add(c)

    # Topological order doubles as the cycle check.
    sorter = graphlib.TopologicalSorter({r: parents[r] for r in role_set})
    try:
        order = list(sorter.static_order())
    except graphlib.CycleError as exc:
        raise errors.CycleError(f"hierarchy contains a cycle: {exc.args[1]}") from exc

    ancestors: dict[RoleId, frozenset[RoleId]] = {}
    for r in order:
        acc: set[RoleId] = {r}
        for p in parents[r]:
            acc |= ancestors[p]
        ancestors[r] = frozenset(acc)

    descendants: dict[RoleId, frozenset[RoleId]] = {}
    for r in reversed(order):
        acc = set()
        for c in children[r]:
            acc |= {c} | descendants[c]
        descendants[r] = frozenset(acc)

    for r in sorted(role_set):
        if not parents[r] and len(children[r]) < 3:
            warnings.warn(
                f"root role {r} has {len(children[r])} children (< 3)",
                RootFanoutWarning, stacklevel=2)

    return RoleHierarchy(org=org, roles=role_set,
                         edges=tuple(sorted(edge_ids)),
                         ancestors=ancestors, descendants=descendants)


def gamma(h: RoleHierarchy, r_x: RoleId, r_i: RoleId) -> frozenset[RoleId]:
    """Lift set for retargeting an r_i-ciphertext to requester role r_x."""
    h.require(r_x)
    h.require(r_i)
    return h.ancestors[r_i] - h.ancestors[r_x]


# -- file format: "role <name>" / "edge <parent> <child>" lines --------------

def parse_hierarchy_text(org: str, text: str) -> RoleHierarchy:
    """Parse the line-oriented hierarchy format (order-insensitive)."""
    roles: list[str] = []
    edges: list[tuple[str, str]] = []
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "role" and len(parts) == 2:
            roles.append(parts[1])
        elif parts[0] == "edge" and len(parts) == 3:
            edges.append((parts[1], parts[2]))
        else:
            raise errors.HierarchyError(f"line {ln}: cannot parse {line!r}")
    return build_hierarchy(org, roles, edges)


def load_hierarchy_file(org: str, path: str | Path) -> RoleHierarchy:
    return parse_hierarchy_text(org, Path(path).read_text(encoding="utf-8"))


def dump_hierarchy_text(h: RoleHierarchy) -> str:
    lines = [f"role {r.name}" for r in h.sorted_roles()]
    lines += [f"edge {p.name} {c.name}" for p, c in h.edges]
    return "\n".join(lines) + "\n"
