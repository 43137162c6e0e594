"""Leading-digit (Benford) logarithmic densities for subsets of primes and prime ideals."""
from .asymptotics import (
    AsymptoticCheck,
    block_actual,
    block_expected,
    digit_ratio_product,
    euler_gamma_product,
    gamma_asymptote,
    log_gamma,
    sandwich_limit,
)
from .density import (
    DensityReport,
    OscillationStats,
    accumulate,
    integer_leading_densities,
    mertens_total,
    natural_density_ratio,
    oscillation_scan,
    run_density,
)
from .digits import DigitString, begins_with, digit_length, expected_density, parse_digit_string
from .sieve import PrimeCache, cache_load, cache_store, indexed_primes, prime_count, primes_up_to, sieve_segment
from .subsets import (
    kronecker_symbol,
    membership,
    parse_subset_spec,
    poly_irreducible_mod_p,
    quad_norm_stream,
    theoretical_delta,
)

__version__ = "0.1.0"
