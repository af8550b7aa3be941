"""The interface every concrete theory implements, plus shared helpers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg as la
from .cones import ConeV, cone_member, minimal_face
from .core import TransfMap, TestSpec, validate_witness
from .rational import ONE, ZERO, q
from .systems import TRIVIAL, SystemId, fmt_system


@dataclass(frozen=True)
class FaceInfo:
    """Minimal face of a transformation (or state) in its cone.

    ``basis`` spans the face in coordinates; ``generators`` lists extreme
    generators when the face is polyhedral (None for continuous faces).
    ``decided_by`` is "cone" or "catalog".
    """

    dim: int
    basis: tuple
    generators: Optional[tuple] = None
    decided_by: str = "cone"


class PolyCone:
    """Adapter giving a ConeV the same face interface as PSDCone."""

    kind = "polyhedral"

    def __init__(self, cone: ConeV):
        self.cone = cone
        self.ambient_dim = cone.ambient_dim

    def __repr__(self):
        return f"PolyCone({self.cone!r})"

    @property
    def generators(self):
        return self.cone.generators

    def contains(self, v) -> bool:
        return cone_member(self.cone, v)

    def face(self, v, candidates=None):
        K = self.cone
        idx = None
        if candidates is not None:
            idx = sorted(candidates)
            K = ConeV(self.ambient_dim, [self.cone.generators[i] for i in idx])
        f = minimal_face(K, v)
        support = sorted(f.support)
        if idx is not None:
            support = [idx[i] for i in support]
        gens = tuple(self.cone.generators[i] for i in support)
        return f.dim, tuple(la.row_basis(gens)), gens

    def is_extreme(self, v) -> bool:
        return self.face(v)[0] <= 1


class TheoryModel:
    """Abstract concrete OPT.  Subclasses fill in the representation."""

    name = "abstract"
    kind = "abstract"
    leaf = "?"
    causal = True
    convex = True
    no_restriction = True

    def __init__(self):
        self._witness_ok: Dict[SystemId, bool] = {}
        self._cache: Dict = {}

    # -- identity ---------------------------------------------------------
    @property
    def params(self) -> dict:
        return {}

    def system(self, k: int) -> SystemId:
        return (self.leaf,) * k

    def registered_systems(self) -> List[SystemId]:
        raise NotImplementedError

    def memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    # -- state and effect spaces -----------------------------------------
    def dim(self, A: SystemId) -> int:
        raise NotImplementedError

    def state_cone(self, A: SystemId):
        raise NotImplementedError

    def effect_cone(self, A: SystemId):
        raise NotImplementedError

    def pair(self, e, rho, A: SystemId):
        raise NotImplementedError

    def unit_effect(self, A: SystemId) -> tuple:
        raise NotImplementedError

    def det_effects(self, A: SystemId) -> list:
        return [self.unit_effect(A)]

    def is_deterministic_effect(self, e, A) -> bool:
        return any(tuple(e) == tuple(d) for d in self.det_effects(A))

    def pure_states(self, A: SystemId) -> Optional[list]:
        """Normalised pure states, or None for a continuum."""
        raise NotImplementedError

    def probe_states(self, A: SystemId, C: SystemId) -> list:
        raise NotImplementedError

    def product_state(self, rho, A, sigma, B):
        raise NotImplementedError

    def product_effect(self, a, A, b, B):
        raise NotImplementedError

    def discard(self, psi, A, B, e):
        """(id_A x e)(psi) for psi on A*B."""
        raise NotImplementedError

    def effect_marginal(self, c, A, B, omega):
        """Effect on A given by c(. x omega) for c on A*B."""
        raise NotImplementedError

    def normalise(self, rho, A):
        t = self.pair(self.unit_effect(A), rho, A)
        if t == 0:
            raise ZeroDivisionError("cannot normalise a null state")
        return tuple(x / t for x in rho)

    # -- transformations ---------------------------------------------------
    def identity(self, A: SystemId) -> TransfMap:
        raise NotImplementedError

    def apply_at(self, T: TransfMap, psi, before: SystemId, after: SystemId):
        raise NotImplementedError

    def apply_dual_at(self, T: TransfMap, e, before: SystemId, after: SystemId):
        raise NotImplementedError

    def seq(self, T2: TransfMap, T1: TransfMap) -> TransfMap:
        raise NotImplementedError

    def par(self, T1: TransfMap, T2: TransfMap) -> TransfMap:
        raise NotImplementedError

    def transf_coords(self, T: TransfMap) -> tuple:
        raise NotImplementedError

    def transf_from_coords(self, A, B, v) -> TransfMap:
        raise NotImplementedError

    def transf_cone(self, A: SystemId, B: SystemId):
        raise NotImplementedError

    def transf_span_basis(self, A: SystemId, B: SystemId) -> list:
        raise NotImplementedError

    def prep_map(self, rho, A) -> TransfMap:
        raise NotImplementedError

    def effect_map(self, e, A) -> TransfMap:
        raise NotImplementedError

    def witnesses(self, A: SystemId) -> list:
        raise NotImplementedError

    def witness_validated(self, A: SystemId) -> bool:
        if A not in self._witness_ok:
            self._witness_ok[A] = validate_witness(self, A)
        return self._witness_ok[A]

    def reversibles(self, A: SystemId) -> list:
        raise NotImplementedError

    def test_catalog(self, A: SystemId) -> list:
        raise NotImplementedError

    # -- derived notions with sensible defaults ----------------------------
    def in_transf_cone(self, T: TransfMap) -> bool:
        return self.transf_cone(T.inp, T.out).contains(self.transf_coords(T))

    def refines(self, D: TransfMap, C: TransfMap) -> bool:
        return self.in_transf_cone(D) and self.in_transf_cone(C - D)

    def is_deterministic(self, T: TransfMap) -> bool:
        if not self.in_transf_cone(T):
            return False
        back = self.apply_dual_at(T, self.unit_effect(T.out), TRIVIAL, TRIVIAL)
        return tuple(back) == tuple(self.unit_effect(T.inp))

    def coexistent(self, A: TransfMap, B: TransfMap) -> bool:
        """A and B fit in one test: both admissible and A+B below a channel."""
        if not (self.in_transf_cone(A) and self.in_transf_cone(B)):
            return False
        tot = A + B
        back = self.apply_dual_at(tot, self.unit_effect(tot.out), TRIVIAL, TRIVIAL)
        rest = la.vsub(self.unit_effect(tot.inp), back)
        return self.effect_cone(tot.inp).contains(rest)

    def face_info(self, T: TransfMap) -> FaceInfo:
        cone = self.transf_cone(T.inp, T.out)
        x = self.transf_coords(T)
        if isinstance(cone, PolyCone):
            dim, basis, gens = cone.face(x, self.face_candidates(T))
            maps = tuple(self.transf_from_coords(T.inp, T.out, g) for g in gens)
            return FaceInfo(dim, basis, maps, "cone")
        f = cone.face(x)
        return FaceInfo(f.dim, f.basis, None, "cone")

    def face_candidates(self, T: TransfMap):
        """Optional prefilter of generators that may lie in the face of T."""
        return None

    def is_atomic(self, T: TransfMap) -> bool:
        if T.is_zero():
            return True
        return self.face_info(T).dim <= 1

    def describe(self) -> str:
        return f"{self.name} ({self.kind})"
