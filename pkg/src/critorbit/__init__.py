"""Prime divisors of quadratic polynomial recurrences.

Exact critical-orbit arithmetic, iterate irreducibility certificates,
rigid divisibility, Galois-layer maximality witnesses, binary-tree
wreath-group models, and prime-divisor density experiments.
"""

from .exactnum import (
    Dyadic,
    FactoredValue,
    dyadic_valuation,
    factor,
    is_prime,
    is_square,
    sqrt_mod,
    valuation,
)
from .polys import (
    DiscChain,
    IntPoly,
    QuadMap,
    compose,
    conjugate_by_shift,
    critical_orbit,
    disc_chain,
    is_critically_finite,
    iterate_poly,
    resultant,
)
from .parsing import PolyParseError, parse_poly, poly_to_string
from .stability import (
    eventual_stability_scan,
    family_classify,
    irreducible_mod_p,
    kronecker_factor,
    stability_scan,
)
from .orbits import (
    MaximalityCertificate,
    OrbitEntry,
    certificate_scan,
    classify_prime,
    maximality_certificate,
    orbit_factor_table,
    verify_rigid_divisibility,
)
from .treemodel import (
    TreeAut,
    enumerate_aut,
    exceptional_fixed_fraction,
    fixed_leaves,
    martingale_check,
    qn_exact,
    sample_process,
    stabav_check,
)
from .density import (
    chebotarev_upper_bound,
    density_estimate,
    divides_orbit,
    preimage_exists_mod_p,
    prime_sieve,
    zero_periodic_density,
)

__version__ = "0.1.0"
