"""Distance and tube zeta functions of fractal sets, with their complex dimensions."""
from __future__ import annotations

__version__ = "0.1.0"

from .sets import (  # noqa: E402
    distance,
    make_astring,
    make_cantor,
    make_fractal_string,
    make_grill,
    make_sphere,
    make_union,
    scale,
)
from .tubes import tube_model  # noqa: E402
from .zeta import ZetaEvalConfig, distance_zeta, tube_zeta  # noqa: E402

__all__ = [
    "ZetaEvalConfig",
    "distance",
    "distance_zeta",
    "make_astring",
    "make_cantor",
    "make_fractal_string",
    "make_grill",
    "make_sphere",
    "make_union",
    "scale",
    "tube_model",
    "tube_zeta",
]
