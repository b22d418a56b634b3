"""Group model backends and the descriptor registry."""

from __future__ import annotations

from ..errors import ValidationError
from .base import GroupModel, LazyEmbedding
from .bass_serre import BassSerreModel, BSElement, parse_britton, render_britton
from .constant_local import ConstantLocalModel, CLElement
from .cover import (
    CoverElement,
    CoverModel,
    CycleGraph,
    FiniteAuto,
    StripAuto,
    StripGraph,
    aut_graph,
    fiber_auto,
    is_graph_automorphism,
    iterate_graph_autos,
    reflection_auto,
    rotation_auto,
)
from .full_aut import FullAutModel, RigidElement
from .padic import LatticeClass, Mat2, PSL2Element, PSL2Model

__all__ = [
    "GroupModel",
    "LazyEmbedding",
    "BassSerreModel",
    "BSElement",
    "parse_britton",
    "render_britton",
    "ConstantLocalModel",
    "CLElement",
    "CoverElement",
    "CoverModel",
    "CycleGraph",
    "StripGraph",
    "FiniteAuto",
    "StripAuto",
    "aut_graph",
    "iterate_graph_autos",
    "is_graph_automorphism",
    "rotation_auto",
    "reflection_auto",
    "fiber_auto",
    "FullAutModel",
    "RigidElement",
    "PSL2Model",
    "PSL2Element",
    "LatticeClass",
    "Mat2",
    "build_model",
]


def build_model(descriptor):
    """Construct a model backend from a plain-dict descriptor.

    Shapes:
      {"model": "constant_local", "d": 3, "F": "sym"}
      {"model": "full_aut", "d": 3}
      {"model": "bs", "m": 2, "n": 3}
      {"model": "psl2", "p": 2}
      {"model": "cover", "graph": "C", "p": 2, "r": 5}
      {"model": "cover", "graph": "strip", "p": 2}
    """
    if not isinstance(descriptor, dict):
        raise ValidationError("model descriptor must be an object")
    kind = descriptor.get("model")
    if kind == "constant_local":
        return ConstantLocalModel(
            int(descriptor["d"]), descriptor.get("F", "sym")
        )
    if kind == "full_aut":
        return FullAutModel(int(descriptor["d"]))
    if kind == "bs":
        return BassSerreModel(int(descriptor["m"]), int(descriptor["n"]))
    if kind == "psl2":
        return PSL2Model(int(descriptor["p"]))
    if kind == "cover":
        graph = descriptor.get("graph", "C")
        p = int(descriptor["p"])
        r = descriptor.get("r")
        if graph == "strip" or r == "inf":
            return CoverModel(StripGraph(p))
        return CoverModel(CycleGraph(p, int(r)))
    raise ValidationError(f"unknown model kind: {kind!r}")
