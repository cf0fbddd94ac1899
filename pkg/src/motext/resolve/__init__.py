"""Minimal resolutions, Ext charts, products and the cobar oracle."""
from .algebra import DualAlgebra, ModuleData
from .chart import ExtChart, ExtClass, ext_chart, gf2_rank
from .cobar import CobarComplex, FastCobar, cobar_ext_dims, massey_defining_systems
from .engine import Generator, Resolution, TruncationError, minimal_resolution
from .products import (ChainMapLift, MasseyResult, lift_cocycle_to_chain_map, massey_triple, module_product,
                       periodicity_apply, yoneda_product)

__all__ = [
    "DualAlgebra", "ModuleData", "ExtChart", "ExtClass", "ext_chart", "gf2_rank",
    "CobarComplex", "FastCobar", "cobar_ext_dims", "massey_defining_systems",
    "Generator", "Resolution", "TruncationError", "minimal_resolution",
    "ChainMapLift", "MasseyResult", "lift_cocycle_to_chain_map", "massey_triple",
    "periodicity_apply", "yoneda_product", "module_product",
]
