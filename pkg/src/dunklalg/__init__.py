"""dunklalg: exact operator algebra for Dunkl operators and their hidden symmetries.

The package machine-verifies the commutation identities of the Dunkl-Coulomb
model over any supported finite Coxeter root system, rewrites the abstract
symmetry algebra into its non-crossing PBW basis, and emits exact
superintegrability certificates.  All arithmetic is exact (rationals only);
every identity check is a structural zero of a normal form, never numerics.
"""

from .errors import DunklAlgError
from .exactnum import Poly, PolyRing, RatFunc, RExt, normalize, poly_gcd
from .coxeter import (
    GroupAlgebraElement,
    GroupElement,
    GroupTable,
    RootSystem,
    System,
    build_root_system,
    exchange_element,
    generate_group,
    parse_system_spec,
    s_element,
)

__version__ = "0.1.0"
