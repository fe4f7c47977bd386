"""Chern characters in entire cyclic homology, computed exactly where possible.

Noncommutative forms and their operators, the tensor algebra as even forms
with the Fedosov product, the Goodwillie equivalence, bar cochains, JLO and
bivariant Chern characters of finite spectral triples, and the Bott element
on R^n.
"""

from .algebra import (
    UNIT,
    FiniteAlgebra,
    GradedMatrix,
    algebra_from_json,
    algebra_to_json,
    clifford_one,
    complex_numbers,
    make_algebra,
    matrix_algebra,
    nilpotent_polynomials,
    supertrace,
)
from .bott import GaussianForm, NaturalOneForm, bott_chern, deRham_d, fedosov_T, fundamental_cocycle, integrate_top, pair_bott_dirac, wedge
from .fedosov import TensorElem, XChain, fedosov_exp, fedosov_product, idempotent_e_hat, x_boundary_b, x_boundary_d
from .forms import NCForm, connes_B, differential_d, hochschild_b, karoubi_kappa, natural_quotient, parse_form
from .goodwillie import TensorLetters, gamma, homotopy_h, phi, pi_projection
from .opforms import OperatorForm
from .scalars import Gaussian, MonomialSum, lower
from .simplex import duhamel_integral, heat_kernel
from .spectral import (
    BivariantChern,
    CliffordRep,
    SpectralTriple,
    TriplePath,
    ch_idempotent,
    chern_simons,
    fredholm_index,
    homotopy_residual,
    index_pairing,
    jlo,
)
from .suites import run_suite

__version__ = "0.1.0"

__all__ = [
    "BivariantChern",
    "CliffordRep",
    "FiniteAlgebra",
    "Gaussian",
    "GaussianForm",
    "GradedMatrix",
    "MonomialSum",
    "NCForm",
    "NaturalOneForm",
    "OperatorForm",
    "SpectralTriple",
    "TensorElem",
    "TensorLetters",
    "TriplePath",
    "UNIT",
    "XChain",
    "algebra_from_json",
    "algebra_to_json",
    "bott_chern",
    "ch_idempotent",
    "chern_simons",
    "clifford_one",
    "complex_numbers",
    "connes_B",
    "deRham_d",
    "differential_d",
    "duhamel_integral",
    "fedosov_T",
    "fedosov_exp",
    "fedosov_product",
    "fredholm_index",
    "fundamental_cocycle",
    "gamma",
    "heat_kernel",
    "hochschild_b",
    "homotopy_h",
    "homotopy_residual",
    "idempotent_e_hat",
    "index_pairing",
    "integrate_top",
    "jlo",
    "karoubi_kappa",
    "lower",
    "make_algebra",
    "matrix_algebra",
    "natural_quotient",
    "nilpotent_polynomials",
    "pair_bott_dirac",
    "parse_form",
    "phi",
    "pi_projection",
    "run_suite",
    "supertrace",
    "wedge",
    "x_boundary_b",
    "x_boundary_d",
]
