"""Exact arithmetic for q-deformed Witt-Burnside and necklace rings.

Submodules:

``exactmath``  rational polynomials in ``q`` and in several variables
``poset``      orbit-type posets, tables of marks, twisted zeta/Moebius matrices
``necklace``   orbit-sum (q-necklace) polynomials and the q-word counting oracle
``rings``      coefficient rings, ghost maps, Witt and necklace ring operations
``transfer``   induction, q-restriction, Frobenius, Teichmueller map
``classify``   strict isomorphisms between deformations
``verify``     machine-checked identity suites
"""
from __future__ import annotations

from .exactmath import (
    GuardExceeded,
    IntegralityError,
    MultiPoly,
    NonUnitError,
    QPoly,
    binomial_basis,
    is_numerical,
    is_numerical_multi,
)
from .poset import (
    GroupPoset,
    PosetError,
    TwistedMatrix,
    build_cyclic,
    build_finite_abelian,
    divisors,
    load_marks,
    mu_q,
    poset_from_json,
    zeta_q,
)
from .necklace import orbit_sum, qword_aperiodic_count
from .rings import (
    INTEGERS,
    POLY_INT,
    POLY_POWER,
    RATIONALS,
    SYM,
    IntegersMod,
    PolyRing,
    RingVector,
    convert,
    ghost_necklace,
    ghost_witt,
    nr_add,
    nr_mul,
    p_coeffs,
    structure_table,
    witt_add,
    witt_mul,
    witt_neg,
)
from .transfer import (
    frobenius_cyclic,
    induce,
    lenart_Q,
    q_restrict,
    restriction_matrix,
    tau,
    tau_inverse,
    verschiebung_cyclic,
)
from .classify import solve_transfer, strict_iso_over_Z

__version__ = "0.1.0"
