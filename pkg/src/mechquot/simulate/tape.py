"""Lower symbolic vector fields to flat float arrays for the RK4 kernels.

Layout (``nfields`` fields of ``dim`` components each, slot = field*dim + comp):

    num_ptr[slot]..num_ptr[slot+1]   numerator terms of the slot
    den_ptr[slot]..den_ptr[slot+1]   denominator terms (empty range means 1)
    coef[t]                          term coefficient
    fac_ptr[t]..fac_ptr[t+1]         factors of term t
    fac_var[f], fac_exp[f]           variable index and exponent of factor f
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import ChartMismatch
from ..geometry import VectorField
from ..symexpr import Polynomial


@dataclass
class Tape:
    dim: int
    nfields: int
    num_ptr: np.ndarray
    den_ptr: np.ndarray
    coef: np.ndarray
    fac_ptr: np.ndarray
    fac_var: np.ndarray
    fac_exp: np.ndarray


def compile_fields(coords: Sequence[str], fields: Sequence[VectorField]) -> Tape:
    index = {name: i for i, name in enumerate(coords)}
    dim = len(coords)
    num_ptr = [0]
    den_ptr = [0]
    coef = []
    fac_ptr = [0]
    fac_var = []
    fac_exp = []

    def emit(poly: Polynomial) -> None:
        for mono, c in poly.terms.items():
            coef.append(float(c))
            for name, e in mono:
                if name not in index:
                    raise ChartMismatch(f"expression uses {name!r}, not a coordinate of {tuple(coords)}")
                fac_var.append(index[name])
                fac_exp.append(e)
            fac_ptr.append(len(fac_var))

    # numerators of every slot first, then denominators, so each range is contiguous
    for f in fields:
        if len(f.comps) != dim:
            raise ChartMismatch("field dimension does not match the state")
        for c in f.comps:
            emit(c.num)
            num_ptr.append(len(coef))
    start = len(coef)
    den_ptr = [start]
    for f in fields:
        for c in f.comps:
            if not (c.den.is_constant() and c.den.constant_value() == 1):
                emit(c.den)
            den_ptr.append(len(coef))
    return Tape(
        dim=dim,
        nfields=len(fields),
        num_ptr=np.asarray(num_ptr, dtype=np.int64),
        den_ptr=np.asarray(den_ptr, dtype=np.int64),
        coef=np.asarray(coef, dtype=np.float64),
        fac_ptr=np.asarray(fac_ptr, dtype=np.int64),
        fac_var=np.asarray(fac_var, dtype=np.int64),
        fac_exp=np.asarray(fac_exp, dtype=np.int64),
    )
